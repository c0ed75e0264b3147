//! Fans in `N ≅ Z^n`: validation, invariants, walls, subdivisions,
//! Q-factorialization, projectivity and split projective-bundle fans.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cone::{meet_in_common_face, Cone};
use crate::divisor::{self, ClassSpace, TorusDivisor};
use crate::lattice::{
    invert_rat, primitive_vector, rank_of_int_vectors, sublattice_index, IntMatrix, IntVector,
    RatVector,
};
use crate::lp::max_margin;
use crate::{Error, Rat, Result};

/// A fan: primitive ray generators and maximal cones as sorted ray-index
/// sets. Immutable once built.
#[derive(Clone)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVector>,
    cones: Vec<Vec<usize>>,
    geometry: OnceLock<Vec<Cone>>,
    facet_map: OnceLock<BTreeMap<Vec<usize>, Vec<usize>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("dim", &self.dim)
            .field("rays", &self.rays)
            .field("cones", &self.cones)
            .finish()
    }
}

/// A codimension-one cone `τ` shared by exactly two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    /// Ray indices spanning `τ`.
    pub rays: Vec<usize>,
    /// The two maximal cones containing `τ`, smaller index first.
    pub cones: (usize, usize),
}

/// One failed fan invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroRay { ray: usize },
    NotPrimitive { ray: usize },
    DuplicateRay { first: usize, second: usize },
    UnusedRay { ray: usize },
    DuplicateCone { first: usize, second: usize },
    NotStronglyConvex { cone: usize },
    NonExtremalGenerator { cone: usize, ray: usize },
    NotMaximal { cone: usize, container: usize },
    FaceCondition { first: usize, second: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            Violation::NotPrimitive { ray } => write!(f, "ray {ray} is not primitive"),
            Violation::DuplicateRay { first, second } => {
                write!(f, "duplicate ray: rays {first} and {second} coincide")
            }
            Violation::UnusedRay { ray } => write!(f, "ray {ray} lies in no maximal cone"),
            Violation::DuplicateCone { first, second } => {
                write!(f, "cones {first} and {second} are identical")
            }
            Violation::NotStronglyConvex { cone } => {
                write!(f, "cone {cone} is not strongly convex")
            }
            Violation::NonExtremalGenerator { cone, ray } => {
                write!(f, "ray {ray} is not an extremal ray of cone {cone}")
            }
            Violation::NotMaximal { cone, container } => {
                write!(f, "cone {cone} is a face of cone {container}")
            }
            Violation::FaceCondition { first, second } => write!(
                f,
                "face condition: cones {first} and {second} do not meet in a common face"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Output of [`Fan::qfactorialize`].
#[derive(Clone, Debug)]
pub struct QFactorialization {
    pub fan: Fan,
    /// For each output cone, the input cone containing it.
    pub cone_map: Vec<usize>,
    /// A divisor whose support function is strictly convex across every
    /// wall interior to an input cone.
    pub certificate: TorusDivisor,
    /// Smallest certificate intersection over contracted walls (capped at
    /// 1); positive exactly when the certificate is valid. `None` when no
    /// wall is contracted.
    pub margin: Option<Rat>,
}

impl Fan {
    /// Builds a fan after structural checks (ray dimensions, index ranges).
    /// Semantic invariants are checked by [`Fan::validate`].
    pub fn new(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        if let Some(r) = rays.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: r.dim(),
            });
        }
        let mut sorted = Vec::with_capacity(cones.len());
        for (ci, c) in cones.into_iter().enumerate() {
            let mut c = c;
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!(
                    "cone {ci} references ray {bad}, but there are {} rays",
                    rays.len()
                )));
            }
            c.sort_unstable();
            let before = c.len();
            c.dedup();
            if c.len() != before {
                return Err(Error::InvalidFan(format!("cone {ci} repeats a ray index")));
            }
            sorted.push(c);
        }
        if sorted.is_empty() {
            return Err(Error::InvalidFan("fan has no cones".into()));
        }
        Ok(Fan {
            dim,
            rays,
            cones: sorted,
            geometry: OnceLock::new(),
            facet_map: OnceLock::new(),
        })
    }

    /// Builds and fully validates.
    pub fn checked(dim: usize, rays: Vec<IntVector>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        let f = Fan::new(dim, rays, cones)?;
        let report = f.validate();
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidFan(v.to_string()));
        }
        Ok(f)
    }

    pub fn from_arrays(dim: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Result<Fan> {
        Fan::new(
            dim,
            rays.iter().map(|r| IntVector(r.to_vec())).collect(),
            cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &IntVector {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_rays(&self, cone: &[usize]) -> Vec<IntVector> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub(crate) fn geometry(&self) -> &[Cone] {
        self.geometry.get_or_init(|| {
            self.cones
                .iter()
                .map(|c| Cone::from_int(&self.cone_rays(c), self.dim))
                .collect()
        })
    }

    pub fn cone_geometry(&self, cone: usize) -> &Cone {
        &self.geometry()[cone]
    }

    /// Index of the first maximal cone containing `x`.
    pub fn cone_containing(&self, x: &RatVector) -> Option<usize> {
        self.geometry().iter().position(|c| c.contains(x))
    }

    pub fn ray_index(&self, v: &IntVector) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// Checks every fan invariant, reporting each violation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (i, r) in self.rays.iter().enumerate() {
            if r.is_zero() {
                violations.push(Violation::ZeroRay { ray: i });
            } else if primitive_vector(r).is_ok_and(|p| &p != r) {
                violations.push(Violation::NotPrimitive { ray: i });
            }
        }
        for i in 0..self.rays.len() {
            for j in (i + 1)..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    violations.push(Violation::DuplicateRay { first: i, second: j });
                }
            }
        }
        for i in 0..self.rays.len() {
            if !self.cones.iter().any(|c| c.contains(&i)) {
                violations.push(Violation::UnusedRay { ray: i });
            }
        }
        let geo = self.geometry();
        for (ci, c) in self.cones.iter().enumerate() {
            let g = &geo[ci];
            if !g.is_pointed() {
                violations.push(Violation::NotStronglyConvex { cone: ci });
                continue;
            }
            let ext = g.extreme_generators();
            for (k, &ray) in c.iter().enumerate() {
                if !ext.contains(&k) {
                    violations.push(Violation::NonExtremalGenerator { cone: ci, ray });
                }
            }
        }
        for i in 0..self.cones.len() {
            for j in (i + 1)..self.cones.len() {
                let (a, b) = (&self.cones[i], &self.cones[j]);
                if a == b {
                    violations.push(Violation::DuplicateCone { first: i, second: j });
                    continue;
                }
                let sub = |x: &[usize], y: &[usize]| x.iter().all(|k| y.contains(k));
                if sub(a, b) && geo[j].is_face(&positions(b, a)) {
                    violations.push(Violation::NotMaximal { cone: i, container: j });
                    continue;
                }
                if sub(b, a) && geo[i].is_face(&positions(a, b)) {
                    violations.push(Violation::NotMaximal { cone: j, container: i });
                    continue;
                }
                if !meet_in_common_face(&self.cone_rays(a), &self.cone_rays(b)) {
                    violations.push(Violation::FaceCondition { first: i, second: j });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Facets of a maximal cone as sorted global ray-index sets.
    fn cone_facets(&self, ci: usize) -> Vec<Vec<usize>> {
        let c = &self.cones[ci];
        self.geometry()[ci]
            .facets()
            .iter()
            .map(|f| f.generators.iter().map(|&k| c[k]).collect())
            .collect()
    }

    /// Facet ray sets of all maximal cones, with the cones having each one.
    fn facet_map(&self) -> &BTreeMap<Vec<usize>, Vec<usize>> {
        self.facet_map.get_or_init(|| {
            let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
            for ci in 0..self.cones.len() {
                for f in self.cone_facets(ci) {
                    map.entry(f).or_default().push(ci);
                }
            }
            map
        })
    }

    /// Whether the support is all of `N_R`: every maximal cone is
    /// full-dimensional and each of its facets is shared with exactly one
    /// other cone.
    pub fn is_complete(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        self.geometry().iter().all(|g| g.dim() == self.dim)
            && self.facet_map().values().all(|cs| cs.len() == 2)
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones
            .iter()
            .all(|c| rank_of_int_vectors(&self.cone_rays(c)) == c.len())
    }

    pub fn is_smooth(&self) -> bool {
        self.is_simplicial()
            && self
                .cones
                .iter()
                .all(|c| sublattice_index(&self.cone_rays(c)).is_ok_and(|m| m.is_one()))
    }

    /// Index of the lattice generated by a simplicial cone's rays.
    pub fn multiplicity(&self, cone: &[usize]) -> Result<BigInt> {
        let gens = self.cone_rays(cone);
        if rank_of_int_vectors(&gens) != gens.len() {
            return Err(Error::NonSimplicialCone);
        }
        sublattice_index(&gens)
    }

    /// All walls of a complete fan, each once, sorted by ray sets.
    pub fn walls(&self) -> Result<Vec<Wall>> {
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        Ok(self
            .facet_map()
            .iter()
            .map(|(rays, cs)| Wall {
                rays: rays.clone(),
                cones: (cs[0].min(cs[1]), cs[0].max(cs[1])),
            })
            .collect())
    }

    /// Star subdivision at a primitive lattice vector `w` in the support.
    pub fn star_subdivision(&self, w: &IntVector) -> Result<Fan> {
        if w.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: w.dim(),
            });
        }
        let p = primitive_vector(w)?;
        if &p != w {
            return Err(Error::Precondition(format!("{w} is not primitive")));
        }
        if self.ray_index(w).is_some() {
            return Err(Error::RayExists(w.to_string()));
        }
        let wr = w.to_rat();
        if self.cone_containing(&wr).is_none() {
            return Err(Error::OutsideSupport(w.to_string()));
        }
        let new_idx = self.rays.len();
        let mut cones = BTreeSet::new();
        for (ci, c) in self.cones.iter().enumerate() {
            let g = &self.geometry()[ci];
            if !g.contains(&wr) {
                cones.insert(c.clone());
                continue;
            }
            for f in g.facets() {
                if f.normal.dot(&wr).is_positive() {
                    let mut nc: Vec<usize> = f.generators.iter().map(|&k| c[k]).collect();
                    nc.push(new_idx);
                    cones.insert(nc);
                }
            }
        }
        let mut rays = self.rays.clone();
        rays.push(w.clone());
        Fan::new(self.dim, rays, cones.into_iter().collect())
    }

    /// Small Q-factorialization: every non-simplicial maximal cone is
    /// triangulated by pulling its rays in increasing index order. Pulling
    /// triangulations restrict to pulling triangulations on faces, so shared
    /// faces are subdivided compatibly.
    pub fn qfactorialize(&self) -> Result<QFactorialization> {
        let mut new_cones: Vec<Vec<usize>> = Vec::new();
        let mut cone_map = Vec::new();
        for (ci, c) in self.cones.iter().enumerate() {
            let mut simplices = self.pulling(c);
            simplices.sort();
            for s in simplices {
                new_cones.push(s);
                cone_map.push(ci);
            }
        }
        let fan = Fan::new(self.dim, self.rays.clone(), new_cones)?;
        if fan.cones.len() == self.cones.len() {
            return Ok(QFactorialization {
                certificate: TorusDivisor::zero(self.rays.len()),
                fan,
                cone_map,
                margin: None,
            });
        }
        let (certificate, margin) = relative_ampleness_certificate(&fan, &cone_map)?;
        Ok(QFactorialization {
            fan,
            cone_map,
            certificate,
            margin,
        })
    }

    fn pulling(&self, gens: &[usize]) -> Vec<Vec<usize>> {
        let geo = Cone::from_int(&self.cone_rays(gens), self.dim);
        if geo.dim() == gens.len() {
            return vec![gens.to_vec()];
        }
        let apex = gens[0];
        let mut out = Vec::new();
        for f in geo.facets() {
            let face: Vec<usize> = f.generators.iter().map(|&k| gens[k]).collect();
            if face.contains(&apex) {
                continue;
            }
            for mut s in self.pulling(&face) {
                s.push(apex);
                s.sort_unstable();
                out.push(s);
            }
        }
        out
    }

    /// Decides projectivity by maximizing the convexity margin of a
    /// Q-Cartier support function across every wall.
    pub fn is_projective(&self) -> Result<bool> {
        if !self.is_complete() {
            return Err(Error::NotComplete);
        }
        if self.dim == 0 {
            return Ok(true);
        }
        let space = ClassSpace::new(self)?;
        Ok(space.ample_margin().is_positive())
    }

    /// Cones of `self` refining cones of `coarse`: returns for each maximal
    /// cone of `self` the index of a cone of `coarse` containing it, after
    /// checking that the images cover every coarse cone.
    pub fn refinement_map(&self, coarse: &Fan) -> Result<Vec<usize>> {
        if self.dim != coarse.dim {
            return Err(Error::DimensionMismatch {
                expected: coarse.dim,
                found: self.dim,
            });
        }
        let cgeo = coarse.geometry();
        let mut map = Vec::with_capacity(self.cones.len());
        for (ci, c) in self.cones.iter().enumerate() {
            let gens: Vec<RatVector> = self.cone_rays(c).iter().map(IntVector::to_rat).collect();
            let host = cgeo
                .iter()
                .position(|g| gens.iter().all(|x| g.contains(x)))
                .ok_or_else(|| Error::NotRefinement(format!("cone {ci} lies in no coarse cone")))?;
            map.push(host);
        }
        let fgeo = self.geometry();
        for (k, g) in cgeo.iter().enumerate() {
            let parts: Vec<usize> = (0..self.cones.len())
                .filter(|&i| map[i] == k && fgeo[i].dim() == g.dim())
                .collect();
            if parts.is_empty() {
                return Err(Error::NotRefinement(format!("coarse cone {k} is not covered")));
            }
            for &i in &parts {
                for f in self.cone_facets(i) {
                    let pts: Vec<RatVector> = f.iter().map(|&r| self.rays[r].to_rat()).collect();
                    let on_boundary = g
                        .facets()
                        .iter()
                        .any(|h| pts.iter().all(|x| h.normal.dot(x).is_zero()));
                    if on_boundary {
                        continue;
                    }
                    let shared = parts
                        .iter()
                        .filter(|&&j| j != i && f.iter().all(|r| self.cones[j].contains(r)))
                        .count();
                    if shared != 1 {
                        return Err(Error::NotRefinement(format!(
                            "coarse cone {k} is not covered across facet {f:?}"
                        )));
                    }
                }
            }
        }
        Ok(map)
    }
}

fn positions(outer: &[usize], inner: &[usize]) -> Vec<usize> {
    inner
        .iter()
        .map(|x| outer.iter().position(|y| y == x).expect("subset"))
        .collect()
}

/// Relative ampleness over the coarse fan: a divisor positive on every wall
/// whose two sides lie in the same coarse cone.
fn relative_ampleness_certificate(
    fine: &Fan,
    cone_map: &[usize],
) -> Result<(TorusDivisor, Option<Rat>)> {
    let walls = internal_walls(fine, cone_map)?;
    if walls.is_empty() {
        return Ok((TorusDivisor::zero(fine.num_rays()), None));
    }
    let n = fine.num_rays();
    let rows: Vec<Vec<Rat>> = walls
        .iter()
        .map(|w| divisor::ray_pairings(fine, w))
        .collect::<Result<_>>()?;
    let (t, x) = max_margin(&rows, &[], n);
    Ok((TorusDivisor::new(x), Some(t)))
}

/// Walls of a simplicial refinement lying in the interior of a coarse cone.
pub fn internal_walls(fine: &Fan, cone_map: &[usize]) -> Result<Vec<Wall>> {
    let mut out = Vec::new();
    for ci in 0..fine.cones.len() {
        for f in fine.cone_facets(ci) {
            let partner = (0..fine.cones.len()).find(|&cj| {
                cj != ci
                    && cone_map[cj] == cone_map[ci]
                    && f.iter().all(|r| fine.cones[cj].contains(r))
            });
            if let Some(cj) = partner {
                if ci < cj {
                    out.push(Wall {
                        rays: f,
                        cones: (ci, cj),
                    });
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The fan of `P(O ⊕ L_1 ⊕ ... ⊕ L_r)` over `base`, where `L_i` is given by
/// the integral `Σ'`-linear support function with values `lifts[i][ρ']` on
/// the base rays. Coordinates are `N'' ⊕ N'` with the fiber summand first;
/// fiber rays `e_1, ..., e_r, -(e_1 + ... + e_r)` come first, then each base
/// ray `y` lifted to `(h_1(y), ..., h_r(y), y)`.
pub fn build_split_bundle(base: &Fan, lifts: &[Vec<i64>]) -> Result<Fan> {
    let r = lifts.len();
    let m = base.dim();
    for (i, h) in lifts.iter().enumerate() {
        if h.len() != base.num_rays() {
            return Err(Error::InvalidSupportFunction(format!(
                "support function {i} has {} values for {} base rays",
                h.len(),
                base.num_rays()
            )));
        }
        let d = TorusDivisor::new(h.iter().map(|&x| -Rat::from_integer(x.into())).collect());
        let data = divisor::qcartier_data(base, &d).ok_or_else(|| {
            Error::InvalidSupportFunction(format!("support function {i} is not Σ'-linear"))
        })?;
        if !data.is_integral() {
            return Err(Error::InvalidSupportFunction(format!(
                "support function {i} is not integral"
            )));
        }
    }
    let n = r + m;
    let mut rays = Vec::with_capacity(r + 1 + base.num_rays());
    for i in 0..r {
        rays.push(IntVector::unit(n, i));
    }
    let mut last = vec![0i64; n];
    last[..r].iter_mut().for_each(|x| *x = -1);
    rays.push(IntVector(last));
    for (j, y) in base.rays().iter().enumerate() {
        let mut v: Vec<i64> = lifts.iter().map(|h| h[j]).collect();
        v.extend_from_slice(&y.0);
        rays.push(IntVector(v));
    }
    let mut cones = Vec::new();
    for c in base.cones() {
        for omit in 0..=r {
            let mut cone: Vec<usize> = (0..=r).filter(|&i| i != omit).collect();
            cone.extend(c.iter().map(|&j| r + 1 + j));
            cones.push(cone);
        }
    }
    Fan::new(n, rays, cones)
}

/// A unimodular map carrying `a` onto `b` (rays to rays, cones to cones),
/// found by brute force over images of a basis among `b`'s rays.
pub fn unimodular_equivalence(a: &Fan, b: &Fan) -> Option<IntMatrix> {
    if a.dim != b.dim || a.rays.len() != b.rays.len() || a.cones.len() != b.cones.len() {
        return None;
    }
    let n = a.dim;
    if n == 0 {
        return Some(IntMatrix::identity(0));
    }
    // a basis of Q^n among a's rays
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..a.rays.len() {
        let mut t: Vec<IntVector> = basis.iter().map(|&k| a.rays[k].clone()).collect();
        t.push(a.rays[i].clone());
        if rank_of_int_vectors(&t) == t.len() {
            basis.push(i);
            if basis.len() == n {
                break;
            }
        }
    }
    if basis.len() < n {
        return None;
    }
    // columns = basis rays
    let a_cols: Vec<Vec<Rat>> = (0..n)
        .map(|row| basis.iter().map(|&k| Rat::from_integer(a.rays[k].0[row].into())).collect())
        .collect();
    let a_inv = invert_rat(&a_cols)?;
    let b_cones: BTreeSet<Vec<usize>> = b.cones.iter().cloned().collect();
    let mut images = vec![0usize; n];
    search_images(a, b, &a_inv, &b_cones, &mut images, 0)
}

fn search_images(
    a: &Fan,
    b: &Fan,
    a_inv: &[Vec<Rat>],
    b_cones: &BTreeSet<Vec<usize>>,
    images: &mut Vec<usize>,
    depth: usize,
) -> Option<IntMatrix> {
    let n = a.dim;
    if depth == n {
        // T = B_cols * A_cols^{-1}
        let mut t = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Rat::zero();
                for k in 0..n {
                    s += Rat::from_integer(b.rays[images[k]].0[i].into()) * &a_inv[k][j];
                }
                if !s.is_integer() {
                    return None;
                }
                t.set(i, j, s.to_integer());
            }
        }
        if !t.determinant().abs().is_one() {
            return None;
        }
        let mut perm = Vec::with_capacity(a.rays.len());
        for r in &a.rays {
            let img = t.mul_vec(&r.to_big());
            let img = IntVector::from_big(&img)?;
            perm.push(b.ray_index(&img)?);
        }
        for c in &a.cones {
            let mut mc: Vec<usize> = c.iter().map(|&i| perm[i]).collect();
            mc.sort_unstable();
            if !b_cones.contains(&mc) {
                return None;
            }
        }
        return Some(t);
    }
    for cand in 0..b.rays.len() {
        if images[..depth].contains(&cand) {
            continue;
        }
        images[depth] = cand;
        if let Some(t) = search_images(a, b, a_inv, b_cones, images, depth + 1) {
            return Some(t);
        }
    }
    None
}

/// Standard fans used across the test corpus and the CLI.
pub mod standard {
    use super::*;

    /// `P^n` with rays `e_1, ..., e_n, -(e_1 + ... + e_n)`.
    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<IntVector> = (0..n).map(|i| IntVector::unit(n, i)).collect();
        rays.push(IntVector(vec![-1; n]));
        let cones = (0..=n).map(|omit| (0..=n).filter(|&i| i != omit).collect()).collect();
        Fan::new(n, rays, cones).expect("projective space")
    }

    /// The fan of Example F_1: rays (1,0), (1,1), (0,1), (-1,-1) in cyclic
    /// order, cones between consecutive rays.
    pub fn blown_up_plane() -> Fan {
        Fan::from_arrays(
            2,
            &[&[1, 0], &[1, 1], &[0, 1], &[-1, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
        )
        .expect("F_1")
    }

    /// Hirzebruch surface `F_a`: rays (1,0), (0,1), (-1,a), (0,-1).
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_arrays(
            2,
            &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]],
        )
        .expect("Hirzebruch")
    }

    /// `P(1,1,2)`: rays (1,0), (0,1), (-1,-2).
    pub fn weighted_p112() -> Fan {
        Fan::from_arrays(2, &[&[1, 0], &[0, 1], &[-1, -2]], &[&[0, 1], &[1, 2], &[2, 0]])
            .expect("P(1,1,2)")
    }

    /// Product fan in `N_1 ⊕ N_2`; rays of `a` first.
    pub fn product(a: &Fan, b: &Fan) -> Fan {
        let n = a.dim() + b.dim();
        let mut rays = Vec::new();
        for r in a.rays() {
            let mut v = r.0.clone();
            v.extend(std::iter::repeat_n(0, b.dim()));
            rays.push(IntVector(v));
        }
        for r in b.rays() {
            let mut v = vec![0; a.dim()];
            v.extend_from_slice(&r.0);
            rays.push(IntVector(v));
        }
        let off = a.num_rays();
        let mut cones = Vec::new();
        for c in a.cones() {
            for d in b.cones() {
                let mut cone = c.clone();
                cone.extend(d.iter().map(|&j| j + off));
                cones.push(cone);
            }
        }
        Fan::new(n, rays, cones).expect("product fan")
    }

    /// Face fan of the cube `[-1,1]^3`: 8 rays, 6 square cones.
    pub fn cube_face_fan() -> Fan {
        let mut rays = Vec::new();
        for x in [-1, 1] {
            for y in [-1, 1] {
                for z in [-1, 1] {
                    rays.push(IntVector(vec![x, y, z]));
                }
            }
        }
        let mut cones = Vec::new();
        for axis in 0..3 {
            for sign in [-1, 1] {
                let c: Vec<usize> = (0..8).filter(|&i| rays[i].0[axis] == sign).collect();
                cones.push(c);
            }
        }
        Fan::new(3, rays, cones).expect("cube face fan")
    }

    /// The point: `N = 0`, one (empty) cone.
    pub fn point() -> Fan {
        Fan::new(0, Vec::new(), vec![Vec::new()]).expect("point")
    }
}
