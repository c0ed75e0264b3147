//! Cohomology of torus-invariant Weil divisors on complete simplicial fans.
//!
//! `H^i(X, O(L))` splits over weights `m ∈ M`; the `m`-piece is the reduced
//! cohomology `H̃^{i-1}` of the subcomplex of the fan induced on
//! `R_m = {ρ : <m, u_ρ> < -a_ρ}`, with the empty complex contributing to
//! `H^0`.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::divisor::{self, TorusDivisor, MAX_SCAN_CELLS};
use crate::fan::Fan;
use crate::foliation::{FoliatedPair, Perturbation};
use crate::io::rat_str;
use crate::lattice::{rank, IntVector};
use crate::{Error, Rat, Result};

/// A weight with nonzero contribution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightContribution {
    pub m: Vec<i64>,
    pub h: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    /// `h^0, ..., h^n`.
    pub h: Vec<usize>,
    /// Weights scanned satisfy `|m_j| ≤ box`.
    #[serde(rename = "box")]
    pub scan_box: i64,
    #[serde(skip)]
    pub contributions: Vec<WeightContribution>,
}

impl CohomologyReport {
    /// `h^i = 0` for every `i ≥ 1`.
    pub fn higher_vanish(&self) -> bool {
        self.h.iter().skip(1).all(|&x| x == 0)
    }
}

/// Conservative scan radius `n·(1 + max|a_ρ|)·max|u_ρ| + 1`.
pub fn default_box(fan: &Fan, l: &TorusDivisor) -> i64 {
    let n = fan.dim() as i64;
    let amax = l
        .coeffs
        .iter()
        .map(|a| a.abs().ceil().to_integer())
        .max()
        .unwrap_or_default();
    let amax = i64::try_from(amax).unwrap_or(i64::MAX / 4);
    let umax = fan.rays().iter().map(IntVector::max_abs).max().unwrap_or(0);
    n.saturating_mul(1 + amax).saturating_mul(umax).saturating_add(1)
}

/// `H^i(X, O(L))` with the default cell cap.
pub fn weil_cohomology(fan: &Fan, l: &TorusDivisor, scan_box: Option<i64>) -> Result<CohomologyReport> {
    weil_cohomology_capped(fan, l, scan_box, MAX_SCAN_CELLS)
}

pub fn weil_cohomology_capped(
    fan: &Fan,
    l: &TorusDivisor,
    scan_box: Option<i64>,
    cap: u128,
) -> Result<CohomologyReport> {
    if l.len() != fan.num_rays() {
        return Err(Error::DimensionMismatch {
            expected: fan.num_rays(),
            found: l.len(),
        });
    }
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    if !fan.is_simplicial() {
        // only Cartier divisors pull back to the small Q-factorialization
        let data = divisor::qcartier_data(fan, l)
            .filter(|d| d.is_integral())
            .ok_or_else(|| {
                Error::Precondition("non-simplicial fans need a Cartier divisor".into())
            })?;
        let q = fan.qfactorialize()?;
        let pulled = divisor::pullback(fan, &q.fan, &data)?;
        let b = scan_box.unwrap_or_else(|| default_box(fan, l));
        return weil_cohomology_capped(&q.fan, &pulled, Some(b), cap);
    }
    let n = fan.dim();
    let b = scan_box.unwrap_or_else(|| default_box(fan, l));
    if b < 0 {
        return Err(Error::Precondition("scan box must be nonnegative".into()));
    }
    let side = (2 * b as u128) + 1;
    let cells = (0..n).try_fold(1u128, |acc, _| acc.checked_mul(side)).unwrap_or(u128::MAX);
    if cells > cap {
        return Err(Error::BoxOverflow { cells, cap });
    }
    // <m, u> < -a  ⟺  <m, u> ≤ ceil(-a) - 1 for integral <m, u>
    let thresholds: Vec<i64> = l
        .coeffs
        .iter()
        .map(|a| {
            let t: crate::Int = (-a).ceil().to_integer() - 1;
            i64::try_from(&t).unwrap_or(if t.is_negative() { i64::MIN } else { i64::MAX })
        })
        .collect();
    let complex = SimplicialFan::new(fan);
    let mut cache: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
    let mut h = vec![0usize; n + 1];
    let mut contributions = Vec::new();
    let mut m = vec![-b; n];
    loop {
        let mask: Vec<bool> = fan
            .rays()
            .iter()
            .zip(&thresholds)
            .map(|(u, &t)| u.0.iter().zip(&m).map(|(x, y)| x * y).sum::<i64>() <= t)
            .collect();
        let local = cache
            .entry(mask)
            .or_insert_with_key(|mask| complex.contribution(mask))
            .clone();
        if local.iter().any(|&x| x > 0) {
            for (acc, x) in h.iter_mut().zip(&local) {
                *acc += x;
            }
            contributions.push(WeightContribution {
                m: m.clone(),
                h: local,
            });
        }
        // odometer
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(CohomologyReport {
                    h,
                    scan_box: b,
                    contributions,
                });
            }
            j -= 1;
            if m[j] < b {
                m[j] += 1;
                for x in m[j + 1..].iter_mut() {
                    *x = -b;
                }
                break;
            }
        }
    }
}

/// The fan's cones as a simplicial complex on the rays.
struct SimplicialFan {
    n: usize,
    cones: Vec<Vec<usize>>,
}

impl SimplicialFan {
    fn new(fan: &Fan) -> Self {
        SimplicialFan {
            n: fan.dim(),
            cones: fan.cones().to_vec(),
        }
    }

    /// `dim H̃^{i-1}` of the induced subcomplex, for `i = 0..=n`.
    fn contribution(&self, mask: &[bool]) -> Vec<usize> {
        // faces by size, the empty face included
        let mut faces: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); self.n + 1];
        faces[0].insert(Vec::new());
        for c in &self.cones {
            let s: Vec<usize> = c.iter().copied().filter(|&r| mask[r]).collect();
            for bits in 1u32..(1u32 << s.len()) {
                let f: Vec<usize> = (0..s.len())
                    .filter(|&k| bits & (1 << k) != 0)
                    .map(|k| s[k])
                    .collect();
                faces[f.len()].insert(f);
            }
        }
        let faces: Vec<Vec<Vec<usize>>> = faces.into_iter().map(|s| s.into_iter().collect()).collect();
        // bd[k]: boundary from size-k faces to size-(k-1) faces, k ≥ 1
        let mut ranks = vec![0usize; self.n + 2];
        for k in 1..=self.n {
            if faces[k].is_empty() {
                continue;
            }
            let index: HashMap<&Vec<usize>, usize> =
                faces[k - 1].iter().enumerate().map(|(i, f)| (f, i)).collect();
            let rows: Vec<Vec<Rat>> = faces[k]
                .iter()
                .map(|f| {
                    let mut row = vec![Rat::zero(); faces[k - 1].len()];
                    for drop in 0..f.len() {
                        let mut g = f.clone();
                        g.remove(drop);
                        let sign = if drop % 2 == 0 { 1 } else { -1 };
                        row[index[&g]] = Rat::from_integer(sign.into());
                    }
                    row
                })
                .collect();
            ranks[k] = rank(&rows);
        }
        // H̃_{k-1} over Q from chain groups C_{k-1} of size-k faces
        (0..=self.n)
            .map(|i| faces[i].len() - ranks[i] - ranks[i + 1])
            .collect()
    }
}

/// Hypothesis part of a vanishing check.
#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    /// `L - (K_F + Δ)` is ample.
    pub ample: bool,
    /// `Δ'` from the klt perturbation, as coefficient strings.
    pub perturbed_boundary: Vec<String>,
    #[serde(with = "rat_str")]
    pub epsilon: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct KodairaReport {
    pub hypothesis: Hypothesis,
    pub h: Vec<usize>,
    #[serde(rename = "box")]
    pub scan_box: i64,
    /// Doubling the box leaves every `h^i` unchanged.
    pub box_stable: bool,
    pub vanishing: bool,
}

impl KodairaReport {
    pub fn ok(&self) -> bool {
        self.hypothesis.ample && self.box_stable && self.vanishing
    }
}

/// Checks `H^i(X, O(L)) = 0` for `i ≥ 1` when `L - (K_F+Δ)` is ample and
/// the pair is log canonical.
pub fn kodaira_check(pair: &FoliatedPair, l: &TorusDivisor, scan_box: Option<i64>) -> Result<KodairaReport> {
    kodaira_check_capped(pair, l, scan_box, MAX_SCAN_CELLS)
}

pub fn kodaira_check_capped(
    pair: &FoliatedPair,
    l: &TorusDivisor,
    scan_box: Option<i64>,
    cap: u128,
) -> Result<KodairaReport> {
    pair.log_canonical_status()
        .map_err(|e| Error::Precondition(format!("pair is not log canonical: {e}")))?;
    let Perturbation { delta, epsilon } = pair.klt_perturbation(l)?;
    let fan = pair.fan();
    let rep = weil_cohomology_capped(fan, l, scan_box, cap)?;
    let doubled = weil_cohomology_capped(fan, l, Some(rep.scan_box * 2), cap.saturating_mul(1 << fan.dim()))?;
    Ok(KodairaReport {
        hypothesis: Hypothesis {
            ample: true,
            perturbed_boundary: delta.coeffs.iter().map(ToString::to_string).collect(),
            epsilon,
        },
        vanishing: rep.higher_vanish(),
        box_stable: doubled.h == rep.h,
        h: rep.h,
        scan_box: rep.scan_box,
    })
}

/// `h^i(L) = h^{n-i}(K_X - L)` on a smooth complete fan.
pub fn serre_duality_check(fan: &Fan, l: &TorusDivisor) -> Result<bool> {
    if !fan.is_smooth() {
        return Err(Error::NotSmooth);
    }
    let k = TorusDivisor::new(vec![-Rat::from_integer(1.into()); fan.num_rays()]);
    let a = weil_cohomology(fan, l, None)?;
    let b = weil_cohomology(fan, &k.sub(l), None)?;
    let mut rev = b.h.clone();
    rev.reverse();
    Ok(a.h == rev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::standard::*;
    use crate::foliation::FoliationSubspace;
    use crate::lattice::rat;

    fn d(c: &[i64]) -> TorusDivisor {
        TorusDivisor::from_ints(c)
    }

    #[test]
    fn projective_line() {
        let p1 = projective_space(1);
        let r = weil_cohomology(&p1, &d(&[-2, 0]), None).unwrap();
        assert_eq!(r.h, vec![0, 1]);
        assert_eq!(r.contributions.len(), 1);
        assert_eq!(r.contributions[0].m, vec![1]);
    }

    #[test]
    fn projective_plane() {
        let p2 = projective_space(2);
        assert_eq!(weil_cohomology(&p2, &d(&[0, 0, 2]), None).unwrap().h, vec![6, 0, 0]);
        assert_eq!(weil_cohomology(&p2, &d(&[-1, -1, -1]), None).unwrap().h, vec![0, 0, 1]);
        for k in 0..=5 {
            let h = weil_cohomology(&p2, &d(&[k, 0, 0]), None).unwrap().h;
            assert_eq!(h[0] as i64, (k + 1) * (k + 2) / 2);
        }
    }

    #[test]
    fn weighted_plane_weil_divisor() {
        let p112 = weighted_p112();
        let r = weil_cohomology(&p112, &d(&[0, 0, 1]), None).unwrap();
        assert_eq!(r.h, vec![2, 0, 0]);
        let half = TorusDivisor::new(vec![rat(1, 2), Rat::zero(), Rat::zero()]);
        // floor-type rounding: O(1/2 D_1) has the sections of O
        assert_eq!(weil_cohomology(&p112, &half, None).unwrap().h, vec![1, 0, 0]);
    }

    #[test]
    fn non_simplicial_input() {
        let cube = cube_face_fan();
        let k = TorusDivisor::new(vec![-Rat::from_integer(1.into()); 8]);
        // the anticanonical class of the cube fan is the octahedron polytope
        let anti = k.scale(&-Rat::from_integer(1.into()));
        let r = weil_cohomology(&cube, &anti, None).unwrap();
        assert_eq!(r.h, vec![7, 0, 0, 0]);
        assert!(matches!(
            weil_cohomology(&cube, &TorusDivisor::prime(8, 0), None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn box_guard() {
        let p2 = projective_space(2);
        assert!(matches!(
            weil_cohomology_capped(&p2, &d(&[1, 0, 0]), Some(100), 1000),
            Err(Error::BoxOverflow { .. })
        ));
    }

    #[test]
    fn serre() {
        let p2 = projective_space(2);
        assert!(serre_duality_check(&p2, &d(&[0, 0, 2])).unwrap());
        let p1 = projective_space(1);
        let pp = product(&p1, &p1);
        assert!(serre_duality_check(&pp, &d(&[1, 0, 0, 0])).unwrap());
        assert!(serre_duality_check(&blown_up_plane(), &TorusDivisor::zero(4)).unwrap());
        assert!(matches!(
            serre_duality_check(&weighted_p112(), &d(&[0, 0, 1])),
            Err(Error::NotSmooth)
        ));
    }

    #[test]
    fn kodaira_examples() {
        let p2 = projective_space(2);
        let pair = FoliatedPair::without_boundary(p2, FoliationSubspace::full(2)).unwrap();
        let r = kodaira_check(&pair, &d(&[-2, 0, 0]), None).unwrap();
        assert!(r.ok());
        assert_eq!(r.h, vec![0, 0, 0]);

        let p112 = weighted_p112();
        let pair = FoliatedPair::without_boundary(p112, FoliationSubspace::full(2)).unwrap();
        let r = kodaira_check(&pair, &d(&[0, 0, 1]), None).unwrap();
        assert!(r.ok());
        assert_eq!(r.h, vec![2, 0, 0]);

        let bad = kodaira_check(&pair, &d(&[-3, -3, -3]), None);
        assert!(matches!(bad, Err(Error::Hypothesis(_))));
    }
}
