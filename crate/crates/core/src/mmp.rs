//! The toric MMP for foliated pairs on Q-factorial projective fans.
//!
//! Each step contracts the `(K_F+Δ)`-negative extremal ray with the
//! lexicographically smallest generator: divisorial contractions drop a ray,
//! small ones are replaced by their flip, and a fiber-type ray ends the run
//! with a Mori fiber space.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::divisor::{self, TorusDivisor};
use crate::fan::Fan;
use crate::foliation::{FoliatedPair, FoliationSubspace};
use crate::io::{big_vec, rat_str};
use crate::lattice::RatVector;
use crate::moricone::{self, BundleDetection, ContractionKind, MoriCone};
use crate::{Error, Rat, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Divisorial,
    Flip,
    Fiber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    MinimalModel,
    MoriFiberSpace,
}

#[derive(Clone, Debug, Serialize)]
pub struct MmpStep {
    /// Generator of the contracted ray in the current Picard-dual basis.
    #[serde(with = "big_vec")]
    pub ray: Vec<BigInt>,
    pub kind: StepKind,
    #[serde(with = "rat_str")]
    pub length: Rat,
    /// Ray removed by a divisorial contraction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contracted_ray: Option<usize>,
    /// Number of rays and cones after the step.
    pub rays_after: usize,
    pub cones_after: usize,
    /// Whether a fiber-type step was certified as a `P^r`-bundle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MmpTrace {
    pub steps: Vec<MmpStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal: Option<Terminal>,
    pub note: &'static str,
    /// The pair reached by the last step.
    #[serde(skip)]
    pub last: Option<FoliatedPair>,
}

const NOTE: &str = "flips keep the foliation subspace V, so the number of V-invariant rays \
                    is unchanged; each step re-checks log canonicity";

/// Outcome of a single step.
#[derive(Clone, Debug)]
pub enum StepOutcome {
    MinimalModel,
    Divisorial { step: MmpStep, pair: FoliatedPair },
    Flip { step: MmpStep, pair: FoliatedPair },
    Fiber { step: MmpStep },
}

/// Index of the negative ray with the smallest generator, with its length.
pub fn negative_ray(pair: &FoliatedPair, mc: &MoriCone) -> Result<Option<(usize, Rat)>> {
    let mut best: Option<(usize, Rat)> = None;
    for k in 0..mc.rays().len() {
        let len = moricone::ray_length(pair, mc, k)?;
        if len.is_positive()
            && best
                .as_ref()
                .is_none_or(|(b, _)| mc.rays()[k].generator < mc.rays()[*b].generator)
        {
            best = Some((k, len));
        }
    }
    Ok(best)
}

pub fn mmp_step(pair: &FoliatedPair) -> Result<StepOutcome> {
    let fan = pair.fan();
    if !fan.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    pair.log_canonical_status()
        .map_err(|e| Error::Precondition(format!("pair is not log canonical: {e}")))?;
    let mc = MoriCone::new(fan)?;
    let Some((k, length)) = negative_ray(pair, &mc)? else {
        return Ok(StepOutcome::MinimalModel);
    };
    let ray = mc.rays()[k].generator.clone();
    let c = mc.contraction(k)?;
    match c.kind {
        ContractionKind::Fiber => {
            let bundle = matches!(moricone::detect_pr_bundle(fan, &c)?, BundleDetection::Bundle(_));
            Ok(StepOutcome::Fiber {
                step: MmpStep {
                    ray,
                    kind: StepKind::Fiber,
                    length,
                    contracted_ray: None,
                    rays_after: c.target.num_rays(),
                    cones_after: c.target.cones().len(),
                    bundle: Some(bundle),
                },
            })
        }
        ContractionKind::Divisorial => {
            let (new_pair, j) = divisorial(pair, &c)?;
            Ok(StepOutcome::Divisorial {
                step: MmpStep {
                    ray,
                    kind: StepKind::Divisorial,
                    length,
                    contracted_ray: Some(j),
                    rays_after: new_pair.fan().num_rays(),
                    cones_after: new_pair.fan().cones().len(),
                    bundle: None,
                },
                pair: new_pair,
            })
        }
        ContractionKind::Small => {
            let wall = &mc.classes()[mc.rays()[k].walls[0]].wall;
            let new_pair = flip(pair, &c, wall)?;
            Ok(StepOutcome::Flip {
                step: MmpStep {
                    ray,
                    kind: StepKind::Flip,
                    length,
                    contracted_ray: None,
                    rays_after: new_pair.fan().num_rays(),
                    cones_after: new_pair.fan().cones().len(),
                    bundle: None,
                },
                pair: new_pair,
            })
        }
    }
}

fn divisorial(pair: &FoliatedPair, c: &moricone::Contraction) -> Result<(FoliatedPair, usize)> {
    let fan = pair.fan();
    let lost: Vec<usize> = (0..fan.num_rays()).filter(|&i| c.ray_images[i].is_none()).collect();
    let [j] = lost[..] else {
        return Err(Error::Internal(format!(
            "divisorial contraction lost {} rays",
            lost.len()
        )));
    };
    let target = c.target.clone();
    if !target.is_simplicial() {
        return Err(Error::Internal("divisorial target is not Q-factorial".into()));
    }
    let mut delta = TorusDivisor::zero(target.num_rays());
    for (i, img) in c.ray_images.iter().enumerate() {
        if let Some(t) = img {
            delta.coeffs[*t] = pair.delta().coeffs[i].clone();
        }
    }
    let basis: Vec<RatVector> = pair
        .subspace()
        .basis()
        .iter()
        .map(|v| project(&c.projection, v))
        .collect();
    let v = FoliationSubspace::new(basis, target.dim())?;
    Ok((FoliatedPair::new(target, v, delta)?, j))
}

fn project(p: &crate::IntMatrix, v: &RatVector) -> RatVector {
    RatVector(
        (0..p.rows())
            .map(|i| {
                (0..p.cols())
                    .map(|j| Rat::from_integer(p.get(i, j).clone()) * &v.0[j])
                    .sum()
            })
            .collect(),
    )
}

/// Replaces the triangulation `{(J∖j) ∪ F : j ∈ J+}` of every contracted
/// circuit by `{(J∖j) ∪ F : j ∈ J-}`.
fn flip(pair: &FoliatedPair, c: &moricone::Contraction, wall: &crate::Wall) -> Result<FoliatedPair> {
    let fan = pair.fan();
    let b = divisor::ray_pairings(fan, wall)?;
    let plus: Vec<usize> = (0..b.len()).filter(|&i| b[i].is_positive()).collect();
    let minus: Vec<usize> = (0..b.len()).filter(|&i| b[i].is_negative()).collect();
    if minus.len() < 2 || plus.len() < 2 {
        return Err(Error::Internal("small contraction with a degenerate circuit".into()));
    }
    let circuit: BTreeSet<usize> = plus.iter().chain(&minus).copied().collect();
    let options = |f: &BTreeSet<usize>, side: &[usize]| -> BTreeSet<Vec<usize>> {
        side.iter()
            .map(|j| {
                let mut s: Vec<usize> = circuit.iter().filter(|&x| x != j).chain(f).copied().collect();
                s.sort_unstable();
                s
            })
            .collect()
    };
    let mut cones: Vec<Vec<usize>> = Vec::new();
    let mut flipped_face = None;
    for g in &c.groups {
        if g.len() == 1 {
            cones.push(fan.cones()[g[0]].clone());
            continue;
        }
        let mut common: BTreeSet<usize> = fan.cones()[g[0]].iter().copied().collect();
        for &s in &g[1..] {
            let other: BTreeSet<usize> = fan.cones()[s].iter().copied().collect();
            common = &common & &other;
        }
        let f: BTreeSet<usize> = &common - &circuit;
        let have: BTreeSet<Vec<usize>> = g.iter().map(|&s| fan.cones()[s].clone()).collect();
        if have != options(&f, &plus) {
            return Err(Error::Internal("contracted cones do not form a circuit".into()));
        }
        cones.extend(options(&f, &minus));
        flipped_face.get_or_insert(f);
    }
    let f = flipped_face.ok_or_else(|| Error::Internal("small contraction merges no cones".into()))?;
    let new_fan = Fan::new(fan.dim(), fan.rays().to_vec(), cones)?;
    if !new_fan.validate().is_valid() || !new_fan.is_complete() || !new_fan.is_simplicial() {
        return Err(Error::Internal("flipped fan is not a complete simplicial fan".into()));
    }
    if !new_fan.is_projective()? {
        return Err(Error::Internal("flipped fan is not projective".into()));
    }
    let new_pair = FoliatedPair::new(new_fan, pair.subspace().clone(), pair.delta().clone())?;
    // the flipped curve is (K_F+Δ)-positive
    let mut tau: Vec<usize> = circuit
        .iter()
        .filter(|x| **x != minus[0] && **x != minus[1])
        .chain(&f)
        .copied()
        .collect();
    tau.sort_unstable();
    let walls = new_pair.fan().walls()?;
    let w = walls
        .iter()
        .find(|w| w.rays == tau)
        .ok_or_else(|| Error::Internal("flipped curve is not a wall".into()))?;
    let v = divisor::intersect_wall(new_pair.fan(), new_pair.cartier_data(), w)?;
    if !v.is_positive() {
        return Err(Error::Internal("flip did not change the sign of K_F+Δ".into()));
    }
    Ok(new_pair)
}

/// Runs steps until a minimal model or Mori fiber space is reached.
pub fn run_mmp(pair: &FoliatedPair, max_steps: usize) -> Result<MmpTrace> {
    let mut trace = MmpTrace {
        steps: Vec::new(),
        terminal: None,
        note: NOTE,
        last: Some(pair.clone()),
    };
    let mut current = pair.clone();
    loop {
        let outcome = mmp_step(&current)?;
        let next = match outcome {
            StepOutcome::MinimalModel => {
                trace.terminal = Some(Terminal::MinimalModel);
                return Ok(trace);
            }
            StepOutcome::Fiber { step } => {
                trace.steps.push(step);
                trace.terminal = Some(Terminal::MoriFiberSpace);
                return Ok(trace);
            }
            StepOutcome::Divisorial { step, pair } | StepOutcome::Flip { step, pair } => {
                trace.steps.push(step);
                pair
            }
        };
        if !next.is_log_canonical() {
            return Err(Error::Internal("log canonicity lost along the MMP".into()));
        }
        trace.last = Some(next.clone());
        current = next;
        if trace.steps.len() >= max_steps {
            return Err(Error::StepLimit {
                trace: Box::new(trace),
            });
        }
    }
}

impl MmpTrace {
    /// Sum of `-(K_F+Δ)` lengths, a coarse progress measure.
    pub fn total_length(&self) -> Rat {
        self.steps.iter().fold(Rat::zero(), |a, s| a + &s.length)
    }
}
