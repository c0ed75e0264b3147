//! Toric foliations `F_V` given by rational subspaces `V ⊆ N_Q`, their
//! canonical divisors, foliated pairs, log canonicity and discrepancies.

use num_traits::{One, Signed, Zero};

use crate::divisor::{self, CartierData, TorusDivisor};
use crate::fan::Fan;
use crate::lattice::{
    primitive_vector, rank_of_vectors, same_span, subspace_contains, IntVector, RatVector,
};
use crate::{Error, Rat, Result};

/// A rational subspace `V ⊆ N_Q` of rank `1 ≤ r ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoliationSubspace {
    basis: Vec<RatVector>,
    ambient: usize,
}

impl FoliationSubspace {
    pub fn new(basis: Vec<RatVector>, ambient: usize) -> Result<Self> {
        if let Some(b) = basis.iter().find(|b| b.dim() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: b.dim(),
            });
        }
        if basis.is_empty() {
            return Err(Error::InvalidSubspace("rank must be at least 1".into()));
        }
        if rank_of_vectors(&basis) != basis.len() {
            return Err(Error::InvalidSubspace("basis is linearly dependent".into()));
        }
        Ok(FoliationSubspace { basis, ambient })
    }

    pub fn from_int(vectors: &[IntVector], ambient: usize) -> Result<Self> {
        Self::new(vectors.iter().map(IntVector::to_rat).collect(), ambient)
    }

    /// `V = N_Q`, so `F_V = T_X`.
    pub fn full(n: usize) -> Self {
        let basis = (0..n).map(|i| IntVector::unit(n, i).to_rat()).collect();
        FoliationSubspace { basis, ambient: n }
    }

    pub fn basis(&self) -> &[RatVector] {
        &self.basis
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        subspace_contains(&self.basis, v).unwrap_or(false)
    }

    pub fn same_as(&self, other: &[RatVector]) -> bool {
        same_span(&self.basis, other)
    }

    /// Rays lying in `V`.
    pub fn membership(&self, fan: &Fan) -> Vec<bool> {
        fan.rays().iter().map(|u| self.contains(u)).collect()
    }
}

/// `K_F = -Σ_{ρ ⊂ V} D_ρ`.
pub fn canonical_divisor(fan: &Fan, v: &FoliationSubspace) -> TorusDivisor {
    TorusDivisor::new(
        fan.rays()
            .iter()
            .map(|u| {
                if v.contains(u) {
                    -Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect(),
    )
}

/// `D_ρ` is `F_V`-invariant iff `u_ρ ∉ V`.
pub fn is_invariant_divisor(v: &FoliationSubspace, ray: &IntVector) -> bool {
    !v.contains(ray)
}

/// Why a pair fails to be log canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LcFailure {
    /// `b_ρ > 0` on a ray not contained in `V`.
    SupportViolation { ray: usize },
    /// `b_ρ > 1`.
    CoefficientAboveOne { ray: usize },
}

impl std::fmt::Display for LcFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LcFailure::SupportViolation { ray } => {
                write!(f, "support violation: ray {ray} carries boundary but is invariant")
            }
            LcFailure::CoefficientAboveOne { ray } => {
                write!(f, "coefficient > 1 on ray {ray}")
            }
        }
    }
}

/// Discrepancy `a(E_w)` of the exceptional divisor of the star subdivision
/// at `w`, with `ι(E_w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub a: Rat,
    pub iota: u8,
}

/// A foliated pair `(F_V, Δ)` on a fan, with `K_F + Δ` Q-Cartier.
#[derive(Clone, Debug)]
pub struct FoliatedPair {
    fan: Fan,
    subspace: FoliationSubspace,
    delta: TorusDivisor,
    in_v: Vec<bool>,
    k_f: TorusDivisor,
    data: CartierData,
}

impl FoliatedPair {
    pub fn new(fan: Fan, subspace: FoliationSubspace, delta: TorusDivisor) -> Result<Self> {
        if subspace.ambient() != fan.dim() {
            return Err(Error::DimensionMismatch {
                expected: fan.dim(),
                found: subspace.ambient(),
            });
        }
        if delta.len() != fan.num_rays() {
            return Err(Error::DimensionMismatch {
                expected: fan.num_rays(),
                found: delta.len(),
            });
        }
        if let Some(i) = (0..delta.len()).find(|&i| delta.coeffs[i].is_negative()) {
            return Err(Error::NotEffective(i));
        }
        let in_v = subspace.membership(&fan);
        let k_f = canonical_divisor(&fan, &subspace);
        let data =
            divisor::qcartier_data(&fan, &k_f.add(&delta)).ok_or(Error::PairNotQCartier)?;
        Ok(FoliatedPair {
            fan,
            subspace,
            delta,
            in_v,
            k_f,
            data,
        })
    }

    pub fn without_boundary(fan: Fan, subspace: FoliationSubspace) -> Result<Self> {
        let n = fan.num_rays();
        Self::new(fan, subspace, TorusDivisor::zero(n))
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn subspace(&self) -> &FoliationSubspace {
        &self.subspace
    }

    pub fn delta(&self) -> &TorusDivisor {
        &self.delta
    }

    pub fn rank(&self) -> usize {
        self.subspace.rank()
    }

    pub fn in_v(&self, ray: usize) -> bool {
        self.in_v[ray]
    }

    pub fn canonical_divisor(&self) -> &TorusDivisor {
        &self.k_f
    }

    /// `K_F + Δ`.
    pub fn log_canonical_divisor(&self) -> TorusDivisor {
        self.k_f.add(&self.delta)
    }

    pub fn cartier_data(&self) -> &CartierData {
        &self.data
    }

    /// `Ok(())` when log canonical, else the first failing ray.
    pub fn log_canonical_status(&self) -> std::result::Result<(), LcFailure> {
        for (ray, b) in self.delta.coeffs.iter().enumerate() {
            if b.is_positive() && !self.in_v[ray] {
                return Err(LcFailure::SupportViolation { ray });
            }
            if *b > Rat::one() {
                return Err(LcFailure::CoefficientAboveOne { ray });
            }
        }
        Ok(())
    }

    pub fn is_log_canonical(&self) -> bool {
        self.log_canonical_status().is_ok()
    }

    /// Closed form `a = φ_{K_F+Δ}(w) - [w ∈ V]`, `ι = [w ∈ V]`.
    pub fn discrepancy(&self, w: &IntVector) -> Result<Discrepancy> {
        self.check_exceptional(w)?;
        let phi = self
            .data
            .eval(&self.fan, &w.to_rat())
            .ok_or_else(|| Error::OutsideSupport(w.to_string()))?;
        let iota = u8::from(self.subspace.contains(w));
        Ok(Discrepancy {
            a: phi - Rat::from_integer(iota.into()),
            iota,
        })
    }

    /// The same discrepancy read off from an explicit star subdivision:
    /// the coefficient of `E_w` in `K_F̃ + Δ̃ - π^*(K_F + Δ)`.
    pub fn discrepancy_via_subdivision(&self, w: &IntVector) -> Result<Rat> {
        self.check_exceptional(w)?;
        let refined = self.fan.star_subdivision(w)?;
        let pb = divisor::pullback(&self.fan, &refined, &self.data)?;
        let e = refined.num_rays() - 1;
        let k_new = canonical_divisor(&refined, &self.subspace);
        // strict transform of Δ has no E_w component
        Ok(&k_new.coeffs[e] - &pb.coeffs[e])
    }

    fn check_exceptional(&self, w: &IntVector) -> Result<()> {
        if w.dim() != self.fan.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.fan.dim(),
                found: w.dim(),
            });
        }
        if primitive_vector(w)? != *w {
            return Err(Error::Precondition(format!("{w} is not primitive")));
        }
        if self.fan.ray_index(w).is_some() {
            return Err(Error::RayExists(w.to_string()));
        }
        if self.fan.cone_containing(&w.to_rat()).is_none() {
            return Err(Error::OutsideSupport(w.to_string()));
        }
        Ok(())
    }

    /// Candidate exceptional vectors `primitive(k·u_ρ + u_ρ')` for rays in a
    /// common cone and `1 ≤ k ≤ 16`, in deterministic order.
    pub fn witness_candidates(&self) -> Vec<IntVector> {
        let mut out: Vec<IntVector> = Vec::new();
        for c in self.fan.cones() {
            for &i in c {
                for &j in c {
                    if i == j {
                        continue;
                    }
                    for k in 1..=16 {
                        let v = self.fan.ray(i).scale(k).add(self.fan.ray(j));
                        let Ok(p) = primitive_vector(&v) else {
                            continue;
                        };
                        if self.fan.ray_index(&p).is_none() && !out.contains(&p) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    /// A toric exceptional divisor with `a(E) < -ι(E)`, if one exists among
    /// [`FoliatedPair::witness_candidates`].
    pub fn find_discrepancy_witness(&self) -> Option<(IntVector, Discrepancy)> {
        self.witness_candidates().into_iter().find_map(|w| {
            let d = self.discrepancy(&w).ok()?;
            (d.a < -Rat::from_integer(d.iota.into())).then_some((w, d))
        })
    }

    /// `Σ_{ρ ⊄ V} D_ρ + Δ`, the boundary turning `K_F + Δ` into `K_X + ·`.
    pub fn transverse_boundary(&self) -> TorusDivisor {
        let mut b = self.delta.clone();
        for (i, inv) in self.in_v.iter().enumerate() {
            if !inv {
                b.coeffs[i] += Rat::one();
            }
        }
        b
    }

    /// Toric klt perturbation: the largest dyadic `ε ≤ 1/2` with
    /// `L - (K_X + (1-ε)(Σ_{ρ⊄V} D_ρ + Δ))` ample.
    pub fn klt_perturbation(&self, l: &TorusDivisor) -> Result<Perturbation> {
        const DEPTH: u32 = 40;
        let gap = l.sub(&self.log_canonical_divisor());
        if !divisor::is_qcartier(&self.fan, l) {
            return Err(Error::NotQCartier(l.to_string()));
        }
        if !divisor::is_ample(&self.fan, &gap)? {
            return Err(Error::Hypothesis("L - (K_F+Δ) is not ample".into()));
        }
        let base = self.transverse_boundary();
        let k_x = TorusDivisor::new(vec![-Rat::one(); self.fan.num_rays()]);
        let mut eps = Rat::new(1.into(), 2.into());
        let mut last_wall = Vec::new();
        for _ in 0..DEPTH {
            let delta_prime = base.scale(&(Rat::one() - &eps));
            let target = l.sub(&k_x.add(&delta_prime));
            if divisor::is_qcartier(&self.fan, &target) {
                let vals = divisor::wall_values(&self.fan, &target)?;
                match vals.iter().position(|v| !v.is_positive()) {
                    None => {
                        return Ok(Perturbation {
                            delta: delta_prime,
                            epsilon: eps,
                        })
                    }
                    Some(t) => last_wall = self.fan.walls()?[t].rays.clone(),
                }
            }
            eps /= Rat::from_integer(2.into());
        }
        Err(Error::PerturbationFailed {
            depth: DEPTH,
            wall: last_wall,
        })
    }
}

/// Output of [`FoliatedPair::klt_perturbation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub delta: TorusDivisor,
    pub epsilon: Rat,
}
