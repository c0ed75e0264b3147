//! Curve classes of wall curves, the Kleiman–Mori cone, extremal rays and
//! their lengths, contractions, projective-bundle detection, and the
//! cone-theorem and Fujita reporters built on them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cone::{combinations, Cone};
use crate::dd::extreme_rays;
use crate::divisor::{self, ClassSpace, TorusDivisor};
use crate::fan::{build_split_bundle, standard, Fan, Wall};
use crate::foliation::{FoliatedPair, FoliationSubspace};
use crate::io::{big_vec, rat_str};
use crate::lattice::{
    kernel_lattice, primitive_vector, rank, rank_of_int_vectors, same_span, sublattice_index,
    IntMatrix, IntVector, RatVector,
};
use crate::{Error, Rat, Result};

/// The class of a wall curve `V(τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub wall: Wall,
    /// Pairings `C_i·V(τ)` with the Picard basis.
    pub coords: Vec<Rat>,
    /// `(D_ρ·V(τ))_ρ`, on simplicial fans.
    pub ray_pairings: Option<Vec<Rat>>,
}

/// An extremal ray of `NE(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalRay {
    /// Primitive integral direction in Picard-dual coordinates.
    pub generator: Vec<BigInt>,
    /// Indices of the wall curves whose classes lie on the ray, ascending.
    pub walls: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    Fiber,
    Divisorial,
    Small,
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionKind::Fiber => "fiber",
            ContractionKind::Divisorial => "divisorial",
            ContractionKind::Small => "small",
        })
    }
}

/// `NE(X)` of a complete projective fan.
#[derive(Clone, Debug)]
pub struct MoriCone {
    fan: Fan,
    space: ClassSpace,
    classes: Vec<CurveClass>,
    nef_rays: Vec<RatVector>,
    rays: Vec<ExtremalRay>,
}

/// The cone spanned by all wall-curve classes, with its extremal rays.
pub fn mori_cone(fan: &Fan) -> Result<MoriCone> {
    MoriCone::new(fan)
}

/// Class of a single wall curve.
pub fn wall_curve_class(fan: &Fan, wall: &Wall) -> Result<CurveClass> {
    let space = ClassSpace::new(fan)?;
    let t = space
        .walls()
        .iter()
        .position(|w| w == wall)
        .ok_or(Error::NotAWall)?;
    Ok(class_at(&space, t))
}

fn class_at(space: &ClassSpace, t: usize) -> CurveClass {
    CurveClass {
        wall: space.walls()[t].clone(),
        coords: space.wall_classes()[t].clone(),
        ray_pairings: space.ray_pairings().map(|b| b[t].clone()),
    }
}

fn direction(v: &[Rat]) -> Vec<BigInt> {
    RatVector(v.to_vec()).primitive_integral()
}

impl MoriCone {
    pub fn new(fan: &Fan) -> Result<MoriCone> {
        if !fan.is_complete() {
            return Err(Error::NotComplete);
        }
        let space = ClassSpace::new(fan)?;
        if !space.ample_margin().is_positive() {
            return Err(Error::NotProjective);
        }
        let p = space.rank();
        let classes: Vec<CurveClass> = (0..space.walls().len()).map(|t| class_at(&space, t)).collect();
        if p == 0 {
            return Ok(MoriCone {
                fan: fan.clone(),
                space,
                classes,
                nef_rays: Vec::new(),
                rays: Vec::new(),
            });
        }
        let nef_rays = extreme_rays(space.wall_classes(), p)
            .ok_or_else(|| Error::Internal("nef cone is not pointed".into()))?;
        // group wall classes by direction and keep those dual to nef facets
        let mut dirs: Vec<(Vec<BigInt>, Vec<usize>)> = Vec::new();
        for (t, c) in classes.iter().enumerate() {
            let d = direction(&c.coords);
            match dirs.iter_mut().find(|(x, _)| *x == d) {
                Some((_, ws)) => ws.push(t),
                None => dirs.push((d, vec![t])),
            }
        }
        let mut rays = Vec::new();
        for (generator, walls) in dirs {
            let y = &classes[walls[0]].coords;
            let tight: Vec<Vec<Rat>> = nef_rays
                .iter()
                .filter(|x| dot(&x.0, y).is_zero())
                .map(|x| x.0.clone())
                .collect();
            if rank(&tight) == p - 1 {
                rays.push(ExtremalRay { generator, walls });
            }
        }
        rays.sort_by(|a, b| a.generator.cmp(&b.generator));
        Ok(MoriCone {
            fan: fan.clone(),
            space,
            classes,
            nef_rays,
            rays,
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn space(&self) -> &ClassSpace {
        &self.space
    }

    pub fn classes(&self) -> &[CurveClass] {
        &self.classes
    }

    pub fn rays(&self) -> &[ExtremalRay] {
        &self.rays
    }

    /// Extreme rays of the nef cone in Picard coordinates.
    pub fn nef_rays(&self) -> &[RatVector] {
        &self.nef_rays
    }

    /// Index of the extremal ray containing a wall curve, if any.
    pub fn ray_of_wall(&self, wall: usize) -> Option<usize> {
        self.rays.iter().position(|r| r.walls.contains(&wall))
    }

    /// `D·R`: the pairing with a generating wall curve of the ray.
    pub fn pair_ray(&self, d: &TorusDivisor, ray: usize) -> Result<Rat> {
        let x = self
            .space
            .coordinates(d)
            .ok_or_else(|| Error::NotQCartier(d.to_string()))?;
        Ok(self.space.pair(&x, self.rays[ray].walls[0]))
    }

    /// A nef divisor vanishing exactly on the ray: the sum of the nef-cone
    /// rays on the dual facet.
    pub fn supporting_divisor(&self, ray: usize) -> TorusDivisor {
        let y = &self.classes[self.rays[ray].walls[0]].coords;
        let p = self.space.rank();
        let mut x = vec![Rat::zero(); p];
        for v in &self.nef_rays {
            if dot(&v.0, y).is_zero() {
                for (a, b) in x.iter_mut().zip(&v.0) {
                    *a += b;
                }
            }
        }
        self.space.divisor(&x)
    }

    /// The contraction `φ_R` realized as the normal fan of the supporting
    /// divisor's polytope in the quotient lattice.
    pub fn contraction(&self, ray: usize) -> Result<Contraction> {
        contract(&self.fan, &self.supporting_divisor(ray))
    }

    /// Detects a `P^r`-bundle structure on a fiber-type contraction.
    pub fn detect_pr_bundle(&self, ray: usize) -> Result<BundleDetection> {
        detect_pr_bundle(&self.fan, &self.contraction(ray)?)
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A toric contraction `X → Y` from a nef divisor.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub kind: ContractionKind,
    pub target: Fan,
    /// `N → N / N''` as a `(n - r) × n` integral matrix.
    pub projection: IntMatrix,
    /// Unimodular `[basis of N'' | complement]`.
    pub splitting: IntMatrix,
    /// `r = dim N''`, the relative dimension.
    pub fiber_dim: usize,
    /// Source cones mapping onto each target cone, aligned with
    /// `target.cones()`.
    pub groups: Vec<Vec<usize>>,
    /// Target ray hit by each source ray, if its image spans one.
    pub ray_images: Vec<Option<usize>>,
    pub supporting: TorusDivisor,
}

/// Contraction defined by a nef Q-Cartier divisor on a complete fan.
pub fn contract(fan: &Fan, d: &TorusDivisor) -> Result<Contraction> {
    let data = divisor::qcartier_data(fan, d).ok_or_else(|| Error::NotQCartier(d.to_string()))?;
    let n = fan.dim();
    let m0 = data.local[0].clone();
    let mut diff_rows: Vec<Vec<BigInt>> = Vec::new();
    for m in &data.local {
        let diff = m.sub(&m0);
        if !diff.is_zero() {
            diff_rows.push(diff.primitive_integral());
        }
    }
    let rat_rows: Vec<Vec<Rat>> = diff_rows
        .iter()
        .map(|r| r.iter().cloned().map(Rat::from_integer).collect())
        .collect();
    let dim_target = rank(&rat_rows);
    let fiber_dim = n - dim_target;
    let (projection, splitting) = if dim_target == n {
        (IntMatrix::identity(n), IntMatrix::identity(n))
    } else if diff_rows.is_empty() {
        (IntMatrix::zeros(0, n), IntMatrix::identity(n))
    } else {
        let (_, basis) = kernel_lattice(&IntMatrix::from_rows(diff_rows));
        let inv = basis
            .unimodular_inverse()
            .ok_or_else(|| Error::Internal("kernel completion is not unimodular".into()))?;
        let rows: Vec<Vec<BigInt>> = (fiber_dim..n).map(|i| inv.row(i).to_vec()).collect();
        let proj = if rows.is_empty() {
            IntMatrix::zeros(0, n)
        } else {
            IntMatrix::from_rows(rows)
        };
        (proj, basis)
    };
    let project = |u: &IntVector| -> Result<Option<IntVector>> {
        if dim_target == 0 {
            return Ok(None);
        }
        let img = projection.mul_vec(&u.to_big());
        let v = IntVector::from_big(&img)
            .ok_or_else(|| Error::Internal("projected ray out of range".into()))?;
        if v.is_zero() {
            Ok(None)
        } else {
            Ok(Some(primitive_vector(&v)?))
        }
    };
    let images: Vec<Option<IntVector>> = fan.rays().iter().map(project).collect::<Result<_>>()?;

    // group cones by their local functional
    let mut keys: Vec<RatVector> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (ci, m) in data.local.iter().enumerate() {
        match keys.iter().position(|k| k == m) {
            Some(g) => groups[g].push(ci),
            None => {
                keys.push(m.clone());
                groups.push(vec![ci]);
            }
        }
    }
    let mut group_gens: Vec<Vec<IntVector>> = Vec::new();
    for g in &groups {
        let mut pts: Vec<IntVector> = Vec::new();
        for &ci in g {
            for &ri in &fan.cones()[ci] {
                if let Some(v) = &images[ri] {
                    if !pts.contains(v) {
                        pts.push(v.clone());
                    }
                }
            }
        }
        let cone = Cone::from_int(&pts, dim_target);
        if cone.dim() != dim_target {
            return Err(Error::Internal("target cone is not full-dimensional".into()));
        }
        let ext = cone.extreme_generators();
        group_gens.push(ext.into_iter().map(|k| pts[k].clone()).collect());
    }
    let mut target_rays: Vec<IntVector> = Vec::new();
    for v in images.iter().flatten() {
        if !target_rays.contains(v) && group_gens.iter().any(|g| g.contains(v)) {
            target_rays.push(v.clone());
        }
    }
    let cones: Vec<Vec<usize>> = group_gens
        .iter()
        .map(|g| {
            g.iter()
                .map(|v| target_rays.iter().position(|t| t == v).expect("collected"))
                .collect()
        })
        .collect();
    let ray_images: Vec<Option<usize>> = images
        .iter()
        .map(|v| v.as_ref().and_then(|v| target_rays.iter().position(|t| t == v)))
        .collect();
    let n_target_rays = target_rays.len();
    let target = Fan::new(dim_target, target_rays, cones)?;
    let kind = if dim_target < n {
        ContractionKind::Fiber
    } else if n_target_rays + 1 == fan.num_rays() {
        ContractionKind::Divisorial
    } else if n_target_rays == fan.num_rays() {
        ContractionKind::Small
    } else {
        return Err(Error::Internal(format!(
            "birational contraction lost {} rays",
            fan.num_rays() - n_target_rays
        )));
    };
    Ok(Contraction {
        kind,
        target,
        projection,
        splitting,
        fiber_dim,
        groups,
        ray_images,
        supporting: d.clone(),
    })
}

/// A splitting-fan presentation `X = P(O ⊕ L_1 ⊕ ... ⊕ L_r) → Y`.
#[derive(Clone, Debug)]
pub struct BundleStructure {
    /// `r + 1` rays spanning `N''`; the first is minus the sum of the rest.
    pub fiber_rays: Vec<usize>,
    pub base: Fan,
    /// `h_i(u')` on each base ray, one row per `i`.
    pub lift_functions: Vec<Vec<i64>>,
    /// `L_i = Σ h_i(u') D'`, divisors on the base.
    pub line_degrees: Vec<TorusDivisor>,
    /// Unimodular `[fiber_rays[1..] | complement]`.
    pub splitting: IntMatrix,
    /// Base ray index of each non-fiber ray of `X`.
    pub base_ray_of: Vec<Option<usize>>,
}

impl BundleStructure {
    pub fn rank(&self) -> usize {
        self.lift_functions.len()
    }

    /// Over `P^1`: the degrees `0 = c_0 ≤ c_1 ≤ ... ≤ c_r` after twisting
    /// so the smallest is zero, without `c_0`.
    pub fn normalized_degrees(&self) -> Option<Vec<BigInt>> {
        if self.base.dim() != 1 {
            return None;
        }
        let mut degs: Vec<BigInt> = vec![BigInt::zero()];
        for l in &self.line_degrees {
            let s: Rat = l.coeffs.iter().sum();
            degs.push(s.to_integer());
        }
        let min = degs.iter().min().cloned().unwrap_or_default();
        let mut out: Vec<BigInt> = degs.into_iter().map(|d| d - &min).collect();
        out.sort();
        out.remove(0);
        Some(out)
    }
}

#[derive(Clone, Debug)]
pub enum BundleDetection {
    Bundle(BundleStructure),
    NotBundle(String),
}

impl BundleDetection {
    pub fn bundle(&self) -> Option<&BundleStructure> {
        match self {
            BundleDetection::Bundle(b) => Some(b),
            BundleDetection::NotBundle(_) => None,
        }
    }
}

/// Recognizes a fiber-type contraction as a split projective bundle.
pub fn detect_pr_bundle(fan: &Fan, c: &Contraction) -> Result<BundleDetection> {
    use BundleDetection::NotBundle;
    if c.kind != ContractionKind::Fiber {
        return Err(Error::Precondition(format!(
            "bundle detection needs a fiber-type contraction, got {}",
            c.kind
        )));
    }
    let n = fan.dim();
    let r = c.fiber_dim;
    let d = n - r;
    let fiber: Vec<usize> = (0..fan.num_rays())
        .filter(|&i| {
            let img = c.projection.mul_vec(&fan.ray(i).to_big());
            img.iter().all(Zero::is_zero)
        })
        .collect();
    if fiber.len() != r + 1 {
        return Ok(NotBundle(format!(
            "{} rays lie in the fiber lattice, expected {}",
            fiber.len(),
            r + 1
        )));
    }
    let vecs: Vec<IntVector> = fiber.iter().map(|&i| fan.ray(i).clone()).collect();
    let mut sum = IntVector::zero(n);
    for v in &vecs {
        sum = sum.add(v);
    }
    if !sum.is_zero() {
        return Ok(NotBundle("fiber rays do not sum to zero".into()));
    }
    for sub in combinations(&vecs, r) {
        if rank_of_int_vectors(&sub) != r || !sublattice_index(&sub)?.is_one() {
            return Ok(NotBundle("fiber rays do not form a P^r fan".into()));
        }
    }
    let mut split = c.splitting.clone();
    for (k, v) in vecs[1..].iter().enumerate() {
        for i in 0..n {
            split.set(i, k, BigInt::from(v.0[i]));
        }
    }
    let Some(inv) = split.unimodular_inverse() else {
        return Ok(NotBundle("fiber rays do not split off a summand".into()));
    };
    let mut base_rays: Vec<IntVector> = Vec::new();
    let mut lifts: Vec<Vec<i64>> = vec![Vec::new(); r];
    let mut base_ray_of = vec![None; fan.num_rays()];
    for i in 0..fan.num_rays() {
        if fiber.contains(&i) {
            continue;
        }
        let coords = inv.mul_vec(&fan.ray(i).to_big());
        let Some(coords) = IntVector::from_big(&coords) else {
            return Ok(NotBundle("coordinates out of range".into()));
        };
        let y = IntVector(coords.0[r..].to_vec());
        if primitive_vector(&y).ok().as_ref() != Some(&y) {
            return Ok(NotBundle(format!("ray {i} does not map to a primitive base ray")));
        }
        if base_rays.contains(&y) {
            return Ok(NotBundle(format!("ray {i} maps to an already used base ray")));
        }
        base_ray_of[i] = Some(base_rays.len());
        base_rays.push(y);
        for (k, h) in lifts.iter_mut().enumerate() {
            h.push(coords.0[k]);
        }
    }
    // every maximal cone is (all but one fiber ray) + a lifted base cone
    let mut base_cones: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for cone in fan.cones() {
        let in_fiber: Vec<usize> = cone.iter().copied().filter(|i| fiber.contains(i)).collect();
        if in_fiber.len() != r {
            return Ok(NotBundle("a maximal cone does not omit exactly one fiber ray".into()));
        }
        let omitted = *fiber.iter().find(|f| !in_fiber.contains(f)).expect("one omitted");
        let mut bc: Vec<usize> = cone.iter().filter_map(|&i| base_ray_of[i]).collect();
        bc.sort_unstable();
        match base_cones.iter_mut().find(|(b, _)| *b == bc) {
            Some((_, om)) => {
                if om.contains(&omitted) {
                    return Ok(NotBundle("repeated cone over the same base cone".into()));
                }
                om.push(omitted);
            }
            None => base_cones.push((bc, vec![omitted])),
        }
    }
    if base_cones.iter().any(|(_, om)| om.len() != r + 1) {
        return Ok(NotBundle("a base cone is not covered by all fiber simplices".into()));
    }
    let base = Fan::new(d, base_rays, base_cones.into_iter().map(|(b, _)| b).collect())?;
    if d > 0 && !base.is_complete() {
        return Ok(NotBundle("base fan is not complete".into()));
    }
    let mut line_degrees = Vec::with_capacity(r);
    for h in &lifts {
        let l = TorusDivisor::from_ints(h);
        match divisor::qcartier_data(&base, &l.scale(&-Rat::one())) {
            Some(data) if data.is_integral() => {}
            _ => return Ok(NotBundle("lift is not an integral Σ'-linear function".into())),
        }
        line_degrees.push(l);
    }
    Ok(BundleDetection::Bundle(BundleStructure {
        fiber_rays: fiber,
        base,
        lift_functions: lifts,
        line_degrees,
        splitting: split,
        base_ray_of,
    }))
}

/// Outcome of comparing `V` with the span of the fiber rays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentCheck {
    Equal,
    RankMismatch,
    SpanMismatch,
}

/// `F = T_{X/Y}` iff `V` is the rational span of the fiber rays.
pub fn relative_tangent_check(
    fan: &Fan,
    v: &FoliationSubspace,
    b: &BundleStructure,
) -> TangentCheck {
    let fib: Vec<RatVector> = b.fiber_rays.iter().map(|&i| fan.ray(i).to_rat()).collect();
    let fr = crate::lattice::rank_of_vectors(&fib);
    if fr != v.rank() {
        TangentCheck::RankMismatch
    } else if same_span(v.basis(), &fib) {
        TangentCheck::Equal
    } else {
        TangentCheck::SpanMismatch
    }
}

/// `l_{(F,Δ)}(R)`: the minimum of `-(K_F+Δ)·V(τ)` over wall curves in `R`.
pub fn ray_length(pair: &FoliatedPair, mc: &MoriCone, ray: usize) -> Result<Rat> {
    let data = pair.cartier_data();
    mc.rays[ray]
        .walls
        .iter()
        .map(|&t| divisor::intersect_wall(pair.fan(), data, &mc.classes[t].wall).map(|v| -v))
        .try_fold(None::<Rat>, |acc, v| {
            let v = v?;
            Ok(Some(match acc {
                Some(a) if a <= v => a,
                _ => v,
            }))
        })?
        .ok_or_else(|| Error::Internal("extremal ray without wall curves".into()))
}

/// What the cone theorem asserts about a ray with length above `r`.
#[derive(Clone, Debug, Serialize)]
pub struct BundleReport {
    pub detected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent: Option<TangentCheck>,
    #[serde(with = "rat_str")]
    pub delta_sum: Rat,
    pub delta_sum_ok: bool,
    pub base_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", with = "big_vec::option")]
    pub degrees: Option<Vec<BigInt>>,
}

impl BundleReport {
    pub fn ok(&self) -> bool {
        self.detected && self.tangent == Some(TangentCheck::Equal) && self.delta_sum_ok
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    #[serde(with = "big_vec")]
    pub generator: Vec<BigInt>,
    /// Ray-index sets of the member walls.
    pub walls: Vec<Vec<usize>>,
    #[serde(with = "rat_str")]
    pub length: Rat,
    pub kind: ContractionKind,
    pub bound_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeTheoremReport {
    pub rank: usize,
    pub rays: Vec<RayReport>,
    /// Every length is at most `r + 1`.
    pub bound_ok: bool,
    /// Every ray longer than `r` is a verified bundle with `F = T_{X/Y}`.
    pub dichotomy_ok: bool,
    pub note: &'static str,
}

impl ConeTheoremReport {
    pub fn ok(&self) -> bool {
        self.bound_ok && self.dichotomy_ok
    }
}

const WALL_CURVE_NOTE: &str =
    "lengths are minima over torus-invariant wall curves in each ray";

fn require_lc(pair: &FoliatedPair) -> Result<()> {
    pair.log_canonical_status()
        .map_err(|e| Error::Precondition(format!("pair is not log canonical: {e}")))
}

/// Analyses one ray: bundle detection and the tangent and boundary checks.
fn bundle_report(pair: &FoliatedPair, mc: &MoriCone, ray: usize) -> Result<(ContractionKind, BundleReport)> {
    let c = mc.contraction(ray)?;
    let delta_sum: Rat = pair.delta().coeffs.iter().sum();
    let delta_sum_ok = delta_sum < Rat::one();
    let mut rep = BundleReport {
        detected: false,
        reason: None,
        tangent: None,
        delta_sum,
        delta_sum_ok,
        base_dim: c.target.dim(),
        degrees: None,
    };
    if c.kind != ContractionKind::Fiber {
        rep.reason = Some(format!("{} contraction", c.kind));
        return Ok((c.kind, rep));
    }
    match detect_pr_bundle(pair.fan(), &c)? {
        BundleDetection::Bundle(b) => {
            rep.detected = true;
            rep.tangent = Some(relative_tangent_check(pair.fan(), pair.subspace(), &b));
            rep.degrees = b.normalized_degrees();
        }
        BundleDetection::NotBundle(why) => rep.reason = Some(why),
    }
    Ok((c.kind, rep))
}

/// Verifies the cone theorem on every extremal ray of a log canonical pair.
pub fn check_cone_theorem(pair: &FoliatedPair) -> Result<ConeTheoremReport> {
    require_lc(pair)?;
    let mc = mori_cone(pair.fan())?;
    let r = pair.rank();
    let rr = Rat::from_integer(r.into());
    let mut rays = Vec::new();
    for k in 0..mc.rays().len() {
        let length = ray_length(pair, &mc, k)?;
        let (kind, rep) = bundle_report(pair, &mc, k)?;
        let over = length > rr;
        rays.push(RayReport {
            generator: mc.rays()[k].generator.clone(),
            walls: mc.rays()[k]
                .walls
                .iter()
                .map(|&t| mc.classes()[t].wall.rays.clone())
                .collect(),
            bound_ok: length <= &rr + Rat::one(),
            length,
            kind,
            bundle: over.then_some(rep),
        });
    }
    let bound_ok = rays.iter().all(|r| r.bound_ok);
    let dichotomy_ok = rays
        .iter()
        .all(|x| x.length <= rr || x.bundle.as_ref().is_some_and(BundleReport::ok));
    Ok(ConeTheoremReport {
        rank: r,
        rays,
        bound_ok,
        dichotomy_ok,
        note: WALL_CURVE_NOTE,
    })
}

/// An exception certificate: a `P^r`-bundle ray with `F = T_{X/Y}` and a
/// fiber line of `A`-degree one.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionCertificate {
    #[serde(with = "big_vec")]
    pub ray: Vec<BigInt>,
    pub bundle: bool,
    pub tangent: Option<TangentCheck>,
    #[serde(with = "rat_str")]
    pub a_dot_line: Rat,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VeryAmpleReport {
    /// `K_F + (r+2)A` is ample, hence very ample on a smooth fan.
    pub r_plus_two_ample: bool,
    /// `K_F + (r+1)A` is ample.
    pub r_plus_one_ample: bool,
    pub exceptions: Vec<ExceptionCertificate>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FujitaReport {
    pub rank: usize,
    /// `K_F + Δ + (r+1)A` is nef.
    pub generic_nef: bool,
    /// ... and Cartier, hence basepoint-free.
    pub generic_cartier: bool,
    /// `K_F + rA` is nef.
    pub improved_nef: bool,
    pub exceptions: Vec<ExceptionCertificate>,
    /// `improved_nef` or every negative ray carries a verified exception.
    pub improved_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub very_ample: Option<VeryAmpleReport>,
}

impl FujitaReport {
    pub fn ok(&self) -> bool {
        self.generic_nef && self.improved_ok && self.very_ample.as_ref().is_none_or(|v| v.ok)
    }
}

/// Certificates for the rays where `d` fails to be positive (or nef, when
/// `strict` is false).
fn exceptions(
    pair: &FoliatedPair,
    mc: &MoriCone,
    d: &TorusDivisor,
    a: &TorusDivisor,
    strict: bool,
) -> Result<Vec<ExceptionCertificate>> {
    let r = pair.rank();
    let a_data = divisor::qcartier_data(pair.fan(), a).ok_or_else(|| Error::NotQCartier(a.to_string()))?;
    let mut out = Vec::new();
    for k in 0..mc.rays().len() {
        let v = mc.pair_ray(d, k)?;
        let bad = if strict { !v.is_positive() } else { v.is_negative() };
        if !bad {
            continue;
        }
        let c = mc.contraction(k)?;
        let mut cert = ExceptionCertificate {
            ray: mc.rays()[k].generator.clone(),
            bundle: false,
            tangent: None,
            a_dot_line: Rat::zero(),
            verified: false,
        };
        // fiber lines: the wall curves in the ray
        let lines: Vec<Rat> = mc.rays()[k]
            .walls
            .iter()
            .map(|&t| divisor::intersect_wall(pair.fan(), &a_data, &mc.classes()[t].wall))
            .collect::<Result<_>>()?;
        cert.a_dot_line = lines.into_iter().min().unwrap_or_default();
        if c.kind == ContractionKind::Fiber && c.fiber_dim == r {
            if let BundleDetection::Bundle(b) = detect_pr_bundle(pair.fan(), &c)? {
                cert.bundle = true;
                cert.tangent = Some(relative_tangent_check(pair.fan(), pair.subspace(), &b));
            }
        }
        cert.verified =
            cert.bundle && cert.tangent == Some(TangentCheck::Equal) && cert.a_dot_line.is_one();
        out.push(cert);
    }
    Ok(out)
}

/// Fujita-type freeness and very-ampleness checks for an ample Cartier `A`.
pub fn fujita_report(pair: &FoliatedPair, a: &TorusDivisor) -> Result<FujitaReport> {
    require_lc(pair)?;
    let fan = pair.fan();
    if !divisor::is_cartier(fan, a) {
        return Err(Error::Precondition("A must be Cartier".into()));
    }
    if !divisor::is_ample(fan, a)? {
        return Err(Error::Precondition("A must be ample".into()));
    }
    let mc = mori_cone(fan)?;
    let r = pair.rank();
    let k_f = pair.canonical_divisor().clone();
    let times = |k: usize| a.scale(&Rat::from_integer(k.into()));
    let generic = pair.log_canonical_divisor().add(&times(r + 1));
    let generic_nef = divisor::is_nef(fan, &generic)?;
    let generic_cartier = divisor::is_cartier(fan, &generic);
    let improved = k_f.add(&times(r));
    let improved_nef = divisor::is_nef(fan, &improved)?;
    let exc = exceptions(pair, &mc, &improved, a, false)?;
    let improved_ok = exc.iter().all(|e| e.verified);
    let very_ample = if fan.is_smooth() {
        let r2 = divisor::is_ample(fan, &k_f.add(&times(r + 2)))?;
        let r1d = k_f.add(&times(r + 1));
        let r1 = divisor::is_ample(fan, &r1d)?;
        let exc1 = exceptions(pair, &mc, &r1d, a, true)?;
        let ok = r2 && exc1.iter().all(|e| e.verified);
        Some(VeryAmpleReport {
            r_plus_two_ample: r2,
            r_plus_one_ample: r1,
            exceptions: exc1,
            ok,
        })
    } else {
        None
    };
    Ok(FujitaReport {
        rank: r,
        generic_nef,
        generic_cartier,
        improved_nef,
        exceptions: exc,
        improved_ok,
        very_ample,
    })
}

/// Outcome of the bundle-over-`P^1` dichotomy on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct SplitBundleReport {
    #[serde(with = "big_vec")]
    pub normalized_degrees: Vec<BigInt>,
    pub trivial: bool,
    /// Some extremal ray pairs to zero with `K_{X/Y} + Δ`.
    pub zero_ray: bool,
    /// `zero_ray ⟺ trivial`.
    pub holds: bool,
}

/// Builds `P(O ⊕ O(c_1) ⊕ ... ⊕ O(c_r))` over `P^1` with horizontal
/// boundary `Δ = Σ b_i H_i` (one coefficient per fiber ray) and checks that
/// a ray with `(K_{X/Y}+Δ)·R = 0` exists exactly in the product case.
pub fn verify_split_bundle_over_p1(degrees: &[i64], deltas: &[Rat]) -> Result<SplitBundleReport> {
    let r = degrees.len();
    if r == 0 {
        return Err(Error::Precondition("at least one degree is required".into()));
    }
    if deltas.len() != r + 1 {
        return Err(Error::Precondition(format!(
            "expected {} boundary coefficients, got {}",
            r + 1,
            deltas.len()
        )));
    }
    if let Some(b) = deltas.iter().find(|b| b.is_negative() || **b >= Rat::one()) {
        return Err(Error::Precondition(format!("boundary coefficient {b} is not in [0, 1)")));
    }
    let p1 = standard::projective_space(1);
    let lifts: Vec<Vec<i64>> = degrees.iter().map(|&c| vec![0, c]).collect();
    let x = build_split_bundle(&p1, &lifts)?;
    // fiber rays come first; K_{X/Y} = -Σ fiber divisors
    let mut kd = TorusDivisor::zero(x.num_rays());
    for (i, b) in deltas.iter().enumerate() {
        kd.coeffs[i] = b - Rat::one();
    }
    let mc = mori_cone(&x)?;
    let mut zero_ray = false;
    for k in 0..mc.rays().len() {
        if mc.pair_ray(&kd, k)?.is_zero() {
            zero_ray = true;
        }
    }
    let mut degs: Vec<i64> = std::iter::once(0).chain(degrees.iter().copied()).collect();
    let min = *degs.iter().min().expect("nonempty");
    degs.iter_mut().for_each(|d| *d -= min);
    degs.sort_unstable();
    degs.remove(0);
    let trivial = degs.iter().all(|&d| d == 0);
    Ok(SplitBundleReport {
        normalized_degrees: degs.into_iter().map(BigInt::from).collect(),
        trivial,
        zero_ray,
        holds: zero_ray == trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::standard::*;
    use crate::lattice::{int, rat};

    fn iv(v: &[i64]) -> IntVector {
        IntVector(v.to_vec())
    }

    fn span(v: &[&[i64]], n: usize) -> FoliationSubspace {
        FoliationSubspace::from_int(&v.iter().map(|x| iv(x)).collect::<Vec<_>>(), n).unwrap()
    }

    fn wall_index(fan: &Fan, rays: &[usize]) -> usize {
        fan.walls().unwrap().iter().position(|w| w.rays == rays).unwrap()
    }

    #[test]
    fn curve_classes() {
        let p2 = projective_space(2);
        for w in p2.walls().unwrap() {
            let c = wall_curve_class(&p2, &w).unwrap();
            assert_eq!(c.ray_pairings.unwrap(), vec![int(1); 3]);
        }
        let p112 = weighted_p112();
        let w = p112.walls().unwrap().into_iter().find(|w| w.rays == [0]).unwrap();
        let c = wall_curve_class(&p112, &w).unwrap();
        assert_eq!(c.ray_pairings.unwrap(), vec![rat(1, 2), int(1), rat(1, 2)]);
    }

    #[test]
    fn mori_cones() {
        assert_eq!(mori_cone(&projective_space(2)).unwrap().rays().len(), 1);
        let p1 = projective_space(1);
        assert_eq!(mori_cone(&product(&p1, &p1)).unwrap().rays().len(), 2);
        let f1 = blown_up_plane();
        let mc = mori_cone(&f1).unwrap();
        assert_eq!(mc.rays().len(), 2);
        // [D_1] = [D_3] span one ray, [D_2] the other; D_4 is not extremal
        let w1 = wall_index(&f1, &[0]);
        let w2 = wall_index(&f1, &[1]);
        let w3 = wall_index(&f1, &[2]);
        let w4 = wall_index(&f1, &[3]);
        let r3 = mc.ray_of_wall(w3).unwrap();
        assert_eq!(mc.ray_of_wall(w1), Some(r3));
        assert_ne!(mc.ray_of_wall(w2), Some(r3));
        assert!(mc.ray_of_wall(w2).is_some());
        assert!(mc.ray_of_wall(w4).is_none());
    }

    #[test]
    fn lengths_on_f1() {
        let f1 = blown_up_plane();
        let mc = mori_cone(&f1).unwrap();
        let r3 = mc.ray_of_wall(wall_index(&f1, &[2])).unwrap();
        let v = FoliatedPair::without_boundary(f1.clone(), span(&[&[1, 1]], 2)).unwrap();
        assert_eq!(ray_length(&v, &mc, r3).unwrap(), int(2));
        let w = FoliatedPair::without_boundary(f1, span(&[&[1, 0]], 2)).unwrap();
        assert_eq!(ray_length(&w, &mc, r3).unwrap(), int(0));
        let p2 = projective_space(2);
        let full = FoliatedPair::without_boundary(p2.clone(), FoliationSubspace::full(2)).unwrap();
        assert_eq!(ray_length(&full, &mori_cone(&p2).unwrap(), 0).unwrap(), int(3));
    }

    #[test]
    fn supporting_divisors_and_contractions() {
        let p2 = projective_space(2);
        let mc = mori_cone(&p2).unwrap();
        assert!(mc.supporting_divisor(0).is_zero());
        let c = mc.contraction(0).unwrap();
        assert_eq!((c.kind, c.target.dim()), (ContractionKind::Fiber, 0));

        let f1 = blown_up_plane();
        let mc = mori_cone(&f1).unwrap();
        let walls = f1.walls().unwrap();
        let r3 = mc.ray_of_wall(wall_index(&f1, &[2])).unwrap();
        let r2 = mc.ray_of_wall(wall_index(&f1, &[1])).unwrap();
        for r in [r2, r3] {
            let d = mc.supporting_divisor(r);
            let vals = divisor::wall_values(&f1, &d).unwrap();
            for (t, v) in vals.iter().enumerate() {
                assert_eq!(v.is_zero(), mc.rays()[r].walls.contains(&t), "{:?}", walls[t]);
                assert!(!v.is_negative());
            }
        }
        let c3 = mc.contraction(r3).unwrap();
        assert_eq!(c3.kind, ContractionKind::Fiber);
        assert!(crate::fan::unimodular_equivalence(&c3.target, &projective_space(1)).is_some());
        let c2 = mc.contraction(r2).unwrap();
        assert_eq!(c2.kind, ContractionKind::Divisorial);
        assert!(crate::fan::unimodular_equivalence(&c2.target, &p2).is_some());
        assert_eq!(c2.ray_images[1], None);
    }

    #[test]
    fn bundle_detection() {
        let p1 = projective_space(1);
        let pp = product(&p1, &p1);
        let mc = mori_cone(&pp).unwrap();
        for k in 0..2 {
            let b = mc.detect_pr_bundle(k).unwrap();
            let b = b.bundle().unwrap();
            assert_eq!(b.normalized_degrees().unwrap(), vec![BigInt::zero()]);
        }
        let f1 = blown_up_plane();
        let mc = mori_cone(&f1).unwrap();
        let r3 = mc.ray_of_wall(wall_index(&f1, &[2])).unwrap();
        let b = mc.detect_pr_bundle(r3).unwrap();
        assert_eq!(b.bundle().unwrap().normalized_degrees().unwrap(), vec![BigInt::one()]);
        let r2 = mc.ray_of_wall(wall_index(&f1, &[1])).unwrap();
        assert!(matches!(mc.detect_pr_bundle(r2), Err(Error::Precondition(_))));
    }

    #[test]
    fn tangent_checks() {
        let p1 = projective_space(1);
        let pp = product(&p1, &p1);
        let mc = mori_cone(&pp).unwrap();
        // the ray whose fiber rays are ±e1
        let k = (0..2)
            .find(|&k| {
                let b = mc.detect_pr_bundle(k).unwrap();
                b.bundle().unwrap().fiber_rays == [0, 1]
            })
            .unwrap();
        let b = mc.detect_pr_bundle(k).unwrap();
        let b = b.bundle().unwrap();
        assert_eq!(relative_tangent_check(&pp, &span(&[&[1, 0]], 2), b), TangentCheck::Equal);
        assert_eq!(
            relative_tangent_check(&pp, &span(&[&[0, 1]], 2), b),
            TangentCheck::SpanMismatch
        );
        assert_eq!(
            relative_tangent_check(&pp, &FoliationSubspace::full(2), b),
            TangentCheck::RankMismatch
        );
        let p2 = projective_space(2);
        let mc = mori_cone(&p2).unwrap();
        let b = mc.detect_pr_bundle(0).unwrap();
        assert_eq!(
            relative_tangent_check(&p2, &FoliationSubspace::full(2), b.bundle().unwrap()),
            TangentCheck::Equal
        );
    }

    #[test]
    fn cone_theorem_examples() {
        let p1 = projective_space(1);
        let pp = product(&p1, &p1);
        let pair = FoliatedPair::without_boundary(pp, span(&[&[1, 0]], 2)).unwrap();
        let rep = check_cone_theorem(&pair).unwrap();
        assert!(rep.ok());
        let long: Vec<&RayReport> = rep.rays.iter().filter(|r| r.length > int(1)).collect();
        assert_eq!(long.len(), 1);
        assert_eq!(long[0].length, int(2));
        assert!(long[0].bundle.as_ref().unwrap().ok());

        let p2 = projective_space(2);
        let pair = FoliatedPair::without_boundary(p2, FoliationSubspace::full(2)).unwrap();
        let rep = check_cone_theorem(&pair).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.rays[0].length, int(3));

        let f1 = blown_up_plane();
        let mut delta = TorusDivisor::zero(4);
        delta.coeffs[1] = rat(1, 2);
        let pair = FoliatedPair::new(f1, span(&[&[1, 1]], 2), delta).unwrap();
        let rep = check_cone_theorem(&pair).unwrap();
        assert!(rep.ok());
        assert!(rep.rays.iter().all(|r| r.length <= int(2)));
    }

    #[test]
    fn fujita_examples() {
        let p2 = projective_space(2);
        let pair = FoliatedPair::without_boundary(p2, span(&[&[1, 0]], 2)).unwrap();
        let rep = fujita_report(&pair, &TorusDivisor::prime(3, 0)).unwrap();
        assert!(rep.generic_nef && rep.generic_cartier && rep.ok());

        let p1 = projective_space(1);
        let pp = product(&p1, &p1);
        let pair = FoliatedPair::without_boundary(pp, span(&[&[1, 0]], 2)).unwrap();
        let a = TorusDivisor::from_ints(&[1, 0, 1, 0]);
        let rep = fujita_report(&pair, &a).unwrap();
        assert!(!rep.improved_nef);
        assert_eq!(rep.exceptions.len(), 1);
        assert!(rep.exceptions[0].verified);
        assert!(rep.ok());

        let f1 = blown_up_plane();
        let pair = FoliatedPair::without_boundary(f1, span(&[&[1, 0]], 2)).unwrap();
        let a = TorusDivisor::from_ints(&[0, 0, 2, 1]);
        let rep = fujita_report(&pair, &a).unwrap();
        assert!(rep.generic_nef && rep.ok());

        let bad = TorusDivisor::from_ints(&[0, 1, 0, 0]);
        assert!(matches!(fujita_report(&pair, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn split_bundles_over_the_line() {
        let r = verify_split_bundle_over_p1(&[0], &[int(0), int(0)]).unwrap();
        assert!(r.zero_ray && r.trivial && r.holds);
        let r = verify_split_bundle_over_p1(&[1], &[int(0), int(0)]).unwrap();
        assert!(!r.zero_ray && r.holds);
        let r = verify_split_bundle_over_p1(&[0, 2], &vec![int(0); 3]).unwrap();
        assert!(!r.zero_ray && r.holds);
        let r = verify_split_bundle_over_p1(&[-1, -1], &[rat(1, 2), int(0), rat(1, 3)]).unwrap();
        assert_eq!(r.normalized_degrees, vec![BigInt::zero(), BigInt::one()]);
        assert!(r.holds);
        assert!(verify_split_bundle_over_p1(&[0], &[int(1), int(0)]).is_err());
    }
}
