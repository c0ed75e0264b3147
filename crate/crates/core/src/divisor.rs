//! Torus-invariant divisors: local Cartier data, support functions,
//! intersections with wall curves, nef/ample tests, polytopes, pullbacks and
//! the Picard space of a complete fan.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::cone::combinations;
use crate::fan::{Fan, Wall};
use crate::lattice::{
    rank, rational_kernel, solve, unit_preimage, IntVector, RatVector,
};
use crate::lp::max_margin;
use crate::{Error, Rat, Result};

/// `Σ a_ρ D_ρ` with one rational coefficient per ray of the fan.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusDivisor {
    pub coeffs: Vec<Rat>,
}

impl TorusDivisor {
    pub fn new(coeffs: Vec<Rat>) -> Self {
        TorusDivisor { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        TorusDivisor::new(vec![Rat::zero(); n])
    }

    /// The prime divisor `D_i`.
    pub fn prime(n: usize, i: usize) -> Self {
        let mut d = TorusDivisor::zero(n);
        d.coeffs[i] = Rat::from_integer(1.into());
        d
    }

    pub fn from_ints(c: &[i64]) -> Self {
        TorusDivisor::new(c.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &TorusDivisor) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|a| !a.is_negative())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_integer())
    }

    /// Rays with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    /// Drops the coefficient of one ray (push-forward under a contraction of
    /// that divisor).
    pub fn without(&self, i: usize) -> TorusDivisor {
        let mut c = self.coeffs.clone();
        c.remove(i);
        TorusDivisor::new(c)
    }
}

impl fmt::Display for TorusDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| format!("{a}·D{}", i + 1))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Local linear functionals `m_σ` with `<m_σ, u_ρ> = -a_ρ` on each cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub local: Vec<RatVector>,
}

impl CartierData {
    /// Cartier: every local functional is integral.
    pub fn is_integral(&self) -> bool {
        self.local.iter().all(RatVector::is_integral)
    }

    /// The support function `φ(x) = <m_σ, x>` for `x` in cone `σ`.
    pub fn eval(&self, fan: &Fan, x: &RatVector) -> Option<Rat> {
        fan.cone_containing(x).map(|c| self.local[c].dot(x))
    }
}

/// Per-cone local data, or `None` if `d` is not Q-Cartier.
pub fn qcartier_data(fan: &Fan, d: &TorusDivisor) -> Option<CartierData> {
    if d.len() != fan.num_rays() {
        return None;
    }
    let n = fan.dim();
    let mut local = Vec::with_capacity(fan.cones().len());
    for c in fan.cones() {
        let rows: Vec<Vec<Rat>> = c.iter().map(|&i| fan.ray(i).to_rat().0).collect();
        let rhs: Vec<Rat> = c.iter().map(|&i| -&d.coeffs[i]).collect();
        local.push(RatVector(solve(&rows, &rhs, n)?));
    }
    Some(CartierData { local })
}

pub fn is_qcartier(fan: &Fan, d: &TorusDivisor) -> bool {
    qcartier_data(fan, d).is_some()
}

pub fn is_cartier(fan: &Fan, d: &TorusDivisor) -> bool {
    qcartier_data(fan, d).is_some_and(|c| c.is_integral())
}

/// `div(χ^m) = Σ <m, u_ρ> D_ρ`.
pub fn principal(fan: &Fan, m: &RatVector) -> TorusDivisor {
    TorusDivisor::new(fan.rays().iter().map(|u| u.pair(m)).collect())
}

/// Primitive normal `ν` to the span of a wall and a lattice vector `w` with
/// `ν(w) = 1`, oriented so that `w` points into the second side.
fn wall_transversal(fan: &Fan, wall: &Wall) -> Result<Vec<BigInt>> {
    let n = fan.dim();
    let rows: Vec<Vec<Rat>> = wall.rays.iter().map(|&i| fan.ray(i).to_rat().0).collect();
    let ker = rational_kernel(&rows, n);
    if ker.len() != 1 {
        return Err(Error::NotAWall);
    }
    let nu = ker[0].primitive_integral();
    let mut w = unit_preimage(&nu).ok_or_else(|| Error::Internal("non-primitive normal".into()))?;
    let far = fan.cones()[wall.cones.1]
        .iter()
        .find(|i| !wall.rays.contains(i))
        .ok_or(Error::NotAWall)?;
    let s: BigInt = nu
        .iter()
        .zip(&fan.ray(*far).0)
        .map(|(a, &b)| a * BigInt::from(b))
        .sum();
    if s.is_negative() {
        w.iter_mut().for_each(|x| *x = -&*x);
    }
    Ok(w)
}

fn check_wall(fan: &Fan, wall: &Wall) -> Result<()> {
    let (a, b) = wall.cones;
    let cones = fan.cones();
    if a >= cones.len() || b >= cones.len() || a == b {
        return Err(Error::NotAWall);
    }
    if !wall.rays.iter().all(|r| cones[a].contains(r) && cones[b].contains(r)) {
        return Err(Error::NotAWall);
    }
    Ok(())
}

fn pair_big(m: &RatVector, w: &[BigInt]) -> Rat {
    m.0.iter()
        .zip(w)
        .map(|(x, y)| x * Rat::from_integer(y.clone()))
        .sum()
}

/// `D·V(τ) = <m_σ - m_σ', w>`, with `w` a lift of the generator of
/// `N / (N ∩ span τ)` pointing to the `σ'` side.
pub fn intersect_wall(fan: &Fan, data: &CartierData, wall: &Wall) -> Result<Rat> {
    check_wall(fan, wall)?;
    let w = wall_transversal(fan, wall)?;
    let diff = data.local[wall.cones.0].sub(&data.local[wall.cones.1]);
    Ok(pair_big(&diff, &w))
}

/// `D·V(τ)` for every wall of a complete fan, in [`Fan::walls`] order.
pub fn wall_values(fan: &Fan, d: &TorusDivisor) -> Result<Vec<Rat>> {
    let walls = fan.walls()?;
    let data = qcartier_data(fan, d).ok_or_else(|| Error::NotQCartier(d.to_string()))?;
    walls.iter().map(|w| intersect_wall(fan, &data, w)).collect()
}

/// The class vector `(D_ρ·V(τ))_ρ` of a wall in a simplicial fan.
pub fn ray_pairings(fan: &Fan, wall: &Wall) -> Result<Vec<Rat>> {
    check_wall(fan, wall)?;
    let n = fan.dim();
    let w = wall_transversal(fan, wall)?;
    let (sa, sb) = (&fan.cones()[wall.cones.0], &fan.cones()[wall.cones.1]);
    let local = |cone: &[usize], ray: usize| -> Result<RatVector> {
        let rows: Vec<Vec<Rat>> = cone.iter().map(|&i| fan.ray(i).to_rat().0).collect();
        let rhs: Vec<Rat> = cone
            .iter()
            .map(|&i| if i == ray { Rat::from_integer((-1).into()) } else { Rat::zero() })
            .collect();
        solve(&rows, &rhs, n)
            .map(RatVector)
            .ok_or(Error::NotSimplicial)
    };
    let mut out = vec![Rat::zero(); fan.num_rays()];
    for ray in 0..fan.num_rays() {
        if !sa.contains(&ray) && !sb.contains(&ray) {
            continue;
        }
        let diff = local(sa, ray)?.sub(&local(sb, ray)?);
        out[ray] = pair_big(&diff, &w);
    }
    Ok(out)
}

fn require_qcartier(fan: &Fan, d: &TorusDivisor) -> Result<()> {
    if is_qcartier(fan, d) {
        Ok(())
    } else {
        Err(Error::NotQCartier(d.to_string()))
    }
}

/// Nonnegative on every wall curve.
pub fn is_nef(fan: &Fan, d: &TorusDivisor) -> Result<bool> {
    require_qcartier(fan, d)?;
    Ok(wall_values(fan, d)?.iter().all(|v| !v.is_negative()))
}

/// Positive on every wall curve (toric Kleiman criterion).
pub fn is_ample(fan: &Fan, d: &TorusDivisor) -> Result<bool> {
    require_qcartier(fan, d)?;
    Ok(wall_values(fan, d)?.iter().all(|v| v.is_positive()))
}

/// `{m : <m, u_ρ> ≥ -a_ρ}` with its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub normals: Vec<IntVector>,
    pub bounds: Vec<Rat>,
    pub vertices: Vec<RatVector>,
    dim: usize,
}

/// Default cap on lattice-point scans.
pub const MAX_SCAN_CELLS: u128 = 10_000_000;

impl Polytope {
    pub fn contains(&self, m: &RatVector) -> bool {
        self.normals
            .iter()
            .zip(&self.bounds)
            .all(|(u, b)| u.pair(m) >= *b)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Affine dimension; `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        let first = self.vertices.first()?;
        let diffs: Vec<Vec<Rat>> = self.vertices.iter().map(|v| v.sub(first).0).collect();
        Some(rank(&diffs))
    }

    /// Lattice points, by a scan of the vertex bounding box, sorted.
    pub fn lattice_points(&self) -> Result<Vec<IntVector>> {
        let Some(first) = self.vertices.first() else {
            return Ok(Vec::new());
        };
        let n = first.dim();
        let mut lo = vec![0i64; n];
        let mut hi = vec![0i64; n];
        let mut cells: u128 = 1;
        for j in 0..n {
            let min = self.vertices.iter().map(|v| &v.0[j]).min().expect("nonempty");
            let max = self.vertices.iter().map(|v| &v.0[j]).max().expect("nonempty");
            lo[j] = to_i64(&min.ceil().to_integer())?;
            hi[j] = to_i64(&max.floor().to_integer())?;
            if hi[j] < lo[j] {
                return Ok(Vec::new());
            }
            cells = cells.saturating_mul((hi[j] - lo[j] + 1) as u128);
        }
        if cells > MAX_SCAN_CELLS {
            return Err(Error::BoxOverflow {
                cells,
                cap: MAX_SCAN_CELLS,
            });
        }
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let m = IntVector(cur.clone());
            if self.contains(&m.to_rat()) {
                out.push(m);
            }
            // odometer, last coordinate fastest
            let mut j = n;
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                if cur[j] < hi[j] {
                    cur[j] += 1;
                    cur[j + 1..].copy_from_slice(&lo[j + 1..]);
                    break;
                }
            }
        }
    }
}

fn to_i64(x: &BigInt) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Internal(format!("coordinate {x} out of range")))
}

/// The polytope `P_D` of a divisor on a complete fan.
pub fn divisor_polytope(fan: &Fan, d: &TorusDivisor) -> Result<Polytope> {
    if !fan.is_complete() {
        return Err(Error::NotComplete);
    }
    let n = fan.dim();
    let normals = fan.rays().to_vec();
    let bounds: Vec<Rat> = d.coeffs.iter().map(|a| -a).collect();
    let mut poly = Polytope {
        normals,
        bounds,
        vertices: Vec::new(),
        dim: n,
    };
    if n == 0 {
        poly.vertices.push(RatVector(Vec::new()));
        return Ok(poly);
    }
    let idx: Vec<usize> = (0..fan.num_rays()).collect();
    let mut verts: Vec<RatVector> = Vec::new();
    for sub in combinations(&idx, n) {
        let rows: Vec<Vec<Rat>> = sub.iter().map(|&i| fan.ray(i).to_rat().0).collect();
        if rank(&rows) < n {
            continue;
        }
        let rhs: Vec<Rat> = sub.iter().map(|&i| poly.bounds[i].clone()).collect();
        let m = RatVector(solve(&rows, &rhs, n).expect("independent rows"));
        if poly.contains(&m) && !verts.contains(&m) {
            verts.push(m);
        }
    }
    if verts.is_empty() {
        // a complete fan's polytope is bounded, so a nonempty one has a vertex
        return Ok(poly);
    }
    verts.sort();
    poly.vertices = verts;
    debug_assert_eq!(poly.dim, n);
    Ok(poly)
}

/// Pullback of a Q-Cartier divisor to a refinement: coefficient `-φ_D(w)`
/// on each ray `w` of `refined`.
pub fn pullback(fan: &Fan, refined: &Fan, data: &CartierData) -> Result<TorusDivisor> {
    refined.refinement_map(fan)?;
    let mut coeffs = Vec::with_capacity(refined.num_rays());
    for w in refined.rays() {
        let v = data
            .eval(fan, &w.to_rat())
            .ok_or_else(|| Error::NotRefinement(format!("{w} lies outside the coarse support")))?;
        coeffs.push(-v);
    }
    Ok(TorusDivisor::new(coeffs))
}

/// The Picard space `Pic(X)_Q` of a complete fan: Q-Cartier divisors modulo
/// principal ones, with a basis `C_1, ..., C_p` and the coordinates of every
/// wall curve against it.
#[derive(Clone, Debug)]
pub struct ClassSpace {
    walls: Vec<Wall>,
    basis: Vec<TorusDivisor>,
    principal: Vec<Vec<Rat>>,
    constraints: Vec<Vec<Rat>>,
    wall_classes: Vec<Vec<Rat>>,
    ray_pairings: Option<Vec<Vec<Rat>>>,
}

impl ClassSpace {
    pub fn new(fan: &Fan) -> Result<ClassSpace> {
        let walls = fan.walls()?;
        let n = fan.dim();
        let nr = fan.num_rays();
        // linear conditions on coefficients for Q-Cartier-ness, one per
        // relation among the rays of a cone
        let mut constraints = Vec::new();
        for c in fan.cones() {
            let cols: Vec<Vec<Rat>> = (0..n)
                .map(|j| c.iter().map(|&i| Rat::from_integer(fan.ray(i).0[j].into())).collect())
                .collect();
            for lam in rational_kernel(&cols, c.len()) {
                let mut row = vec![Rat::zero(); nr];
                for (k, &i) in c.iter().enumerate() {
                    row[i] = lam.0[k].clone();
                }
                constraints.push(row);
            }
        }
        let cartier = rational_kernel(&constraints, nr);
        let principal: Vec<Vec<Rat>> = (0..n)
            .map(|j| fan.rays().iter().map(|u| Rat::from_integer(u.0[j].into())).collect())
            .collect();
        let mut span = principal.clone();
        let mut basis = Vec::new();
        let mut r = rank(&span);
        for v in cartier {
            span.push(v.0.clone());
            let r2 = rank(&span);
            if r2 > r {
                r = r2;
                basis.push(TorusDivisor::new(v.0));
            } else {
                span.pop();
            }
        }
        let mut by_basis = Vec::with_capacity(basis.len());
        for c in &basis {
            let data = qcartier_data(fan, c)
                .ok_or_else(|| Error::Internal("basis divisor is not Q-Cartier".into()))?;
            let vals: Vec<Rat> = walls
                .iter()
                .map(|w| intersect_wall(fan, &data, w))
                .collect::<Result<_>>()?;
            by_basis.push(vals);
        }
        let wall_classes: Vec<Vec<Rat>> = (0..walls.len())
            .map(|t| by_basis.iter().map(|v| v[t].clone()).collect())
            .collect();
        let ray_pairings = if fan.is_simplicial() {
            Some(
                walls
                    .iter()
                    .map(|w| ray_pairings(fan, w))
                    .collect::<Result<_>>()?,
            )
        } else {
            None
        };
        Ok(ClassSpace {
            walls,
            basis,
            principal,
            constraints,
            wall_classes,
            ray_pairings,
        })
    }

    /// Picard number.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn basis(&self) -> &[TorusDivisor] {
        &self.basis
    }

    /// Coordinates `y_i = C_i·V(τ)` of each wall curve.
    pub fn wall_classes(&self) -> &[Vec<Rat>] {
        &self.wall_classes
    }

    /// Per-wall vectors `(D_ρ·V(τ))_ρ`, available on simplicial fans.
    pub fn ray_pairings(&self) -> Option<&[Vec<Rat>]> {
        self.ray_pairings.as_deref()
    }

    pub fn is_qcartier(&self, d: &TorusDivisor) -> bool {
        self.constraints.iter().all(|row| {
            row.iter()
                .zip(&d.coeffs)
                .map(|(a, b)| a * b)
                .sum::<Rat>()
                .is_zero()
        })
    }

    /// Coordinates of the class of `d` in the basis, if `d` is Q-Cartier.
    pub fn coordinates(&self, d: &TorusDivisor) -> Option<Vec<Rat>> {
        if !self.is_qcartier(d) {
            return None;
        }
        let p = self.basis.len();
        let n = self.principal.len();
        let rows: Vec<Vec<Rat>> = (0..d.len())
            .map(|i| {
                self.basis
                    .iter()
                    .map(|c| c.coeffs[i].clone())
                    .chain(self.principal.iter().map(|pr| pr[i].clone()))
                    .collect()
            })
            .collect();
        let x = solve(&rows, &d.coeffs, p + n)?;
        Some(x[..p].to_vec())
    }

    /// The divisor `Σ x_i C_i`.
    pub fn divisor(&self, coords: &[Rat]) -> TorusDivisor {
        let nr = self.principal.first().map_or_else(
            || self.basis.first().map_or(0, TorusDivisor::len),
            Vec::len,
        );
        let mut d = TorusDivisor::zero(nr);
        for (x, c) in coords.iter().zip(&self.basis) {
            d = d.add(&c.scale(x));
        }
        d
    }

    /// `D·V(τ)` from Picard coordinates.
    pub fn pair(&self, coords: &[Rat], wall: usize) -> Rat {
        coords
            .iter()
            .zip(&self.wall_classes[wall])
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Largest `t ≤ 1` such that some class pairs to at least `t` with every
    /// wall curve; positive iff the fan is projective.
    pub fn ample_margin(&self) -> Rat {
        if self.walls.is_empty() {
            return Rat::from_integer(1.into());
        }
        max_margin(&self.wall_classes, &[], self.basis.len()).0
    }

    /// An ample class, when one exists.
    pub fn ample_class(&self) -> Option<TorusDivisor> {
        if self.walls.is_empty() {
            return Some(self.divisor(&[]));
        }
        let (t, x) = max_margin(&self.wall_classes, &[], self.basis.len());
        t.is_positive().then(|| self.divisor(&x))
    }
}
