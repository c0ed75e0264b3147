//! Exact integer and rational linear algebra.
//!
//! Everything here works over `BigInt`/`BigRational`; lattice vectors carry
//! `i64` coordinates because ray generators and weights are small, but every
//! product that can grow (minors, Smith forms, eliminations) is promoted to
//! arbitrary precision first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Rat, Result};

/// A vector in the lattice `N ≅ Z^n` (or its dual `M`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<i64>);

/// A vector with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector(pub Vec<Rat>);

/// Rectangular integer matrix, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntVector {
    pub fn new(coords: Vec<i64>) -> Self {
        IntVector(coords)
    }

    pub fn zero(n: usize) -> Self {
        IntVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        IntVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn to_rat(&self) -> RatVector {
        RatVector(self.0.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("lattice coordinate overflow"))
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_sub(*b).expect("lattice coordinate overflow"))
                .collect(),
        )
    }

    pub fn scale(&self, k: i64) -> IntVector {
        IntVector(
            self.0
                .iter()
                .map(|a| a.checked_mul(k).expect("lattice coordinate overflow"))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntVector {
        self.scale(-1)
    }

    /// Exact pairing with a rational functional.
    pub fn pair(&self, m: &RatVector) -> Rat {
        debug_assert_eq!(self.dim(), m.dim());
        let mut acc = Rat::zero();
        for (x, y) in self.0.iter().zip(&m.0) {
            if *x != 0 {
                acc += y * Rat::from_integer((*x).into());
            }
        }
        acc
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Converts a rational vector with integral entries.
    pub fn from_rat(v: &RatVector) -> Option<IntVector> {
        v.0.iter()
            .map(|x| {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()
            .map(IntVector)
    }

    pub fn from_big(v: &[BigInt]) -> Option<IntVector> {
        v.iter()
            .map(|x| x.to_i64())
            .collect::<Option<Vec<_>>>()
            .map(IntVector)
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl RatVector {
    pub fn zero(n: usize) -> Self {
        RatVector(vec![Rat::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn dot(&self, other: &RatVector) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> RatVector {
        RatVector(self.0.iter().map(|a| a * k).collect())
    }

    /// Positive rescaling to a primitive integral vector. Zero maps to zero.
    pub fn primitive_integral(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![BigInt::zero(); self.dim()];
        }
        let mut lcm = BigInt::one();
        for x in &self.0 {
            lcm = lcm.lcm(x.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        ints.into_iter().map(|x| x / &g).collect()
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![vec![BigInt::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows,
        }
    }

    /// Matrix whose rows are the given vectors; `cols` is needed for the
    /// empty case.
    pub fn from_vectors(vs: &[IntVector], cols: usize) -> Self {
        let mut m = Self::zeros(vs.len(), cols);
        for (i, v) in vs.iter().enumerate() {
            assert_eq!(v.dim(), cols, "dimension mismatch");
            for (j, &x) in v.0.iter().enumerate() {
                m.data[i][j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j][i] = self.data[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.data
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn to_rat_rows(&self) -> Vec<Vec<Rat>> {
        self.data
            .iter()
            .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
            .collect()
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut rows = self.to_rat_rows();
        det_rat(&mut rows).to_integer()
    }

    /// Inverse over the integers; `None` unless the matrix is unimodular.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        let inv = invert_rat(&self.to_rat_rows())?;
        let data = inv
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| x.is_integer().then(|| x.to_integer()))
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntMatrix::from_rows(data))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in &mut self.data {
            r.swap(a, b);
        }
    }

    // row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self.data[src][j] * k;
            self.data[dst][j] += t;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in &mut self.data {
            let t = &r[src] * k;
            r[dst] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i] {
            *x = -&*x;
        }
    }
}

/// Result of a Smith normal form computation: `left * A * right = D`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal of `D`, length `min(rows, cols)`, each entry dividing the next.
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by pivot reduction. Both transforms are unimodular.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);
    let k = m.min(n);
    for t in 0..k {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d.data[i][j];
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if d.data[bi][bj].abs() <= x.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in (t + 1)..m {
                if d.data[i][t].is_zero() {
                    continue;
                }
                let q = d.data[i][t].div_floor(&d.data[t][t]);
                let nq = -q;
                d.add_row(i, t, &nq);
                left.add_row(i, t, &nq);
                if !d.data[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..n {
                if d.data[t][j].is_zero() {
                    continue;
                }
                let q = d.data[t][j].div_floor(&d.data[t][t]);
                let nq = -q;
                d.add_col(j, t, &nq);
                right.add_col(j, t, &nq);
                if !d.data[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let p = d.data[t][t].clone();
            let bad = ((t + 1)..m)
                .flat_map(|i| ((t + 1)..n).map(move |j| (i, j)))
                .find(|&(i, j)| !(&d.data[i][j] % &p).is_zero());
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    left.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d.data.get(t).is_some_and(|r| r.get(t).is_some_and(|x| x.is_negative())) {
            d.negate_row(t);
            left.negate_row(t);
        }
    }
    let diag = (0..k).map(|i| d.data[i][i].clone()).collect();
    SmithForm { diag, left, right }
}

/// `v / gcd(v)`.
pub fn primitive_vector(v: &IntVector) -> Result<IntVector> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let g = v.0.iter().fold(0i64, |g, &x| g.gcd(&x));
    Ok(IntVector(v.0.iter().map(|x| x / g).collect()))
}

/// Index of the lattice generated by `generators` inside the saturation of
/// their rational span.
pub fn sublattice_index(generators: &[IntVector]) -> Result<BigInt> {
    let Some(first) = generators.first() else {
        return Ok(BigInt::one());
    };
    let a = IntMatrix::from_vectors(generators, first.dim());
    let snf = smith_normal_form(&a);
    if snf.rank() < generators.len() {
        return Err(Error::DependentGenerators);
    }
    Ok(snf.diag.iter().product())
}

/// Basis of the saturated sublattice `{x ∈ Z^n : A x = 0}` together with a
/// unimodular completion: the returned matrix has the kernel basis in its
/// first columns, followed by a complement.
pub fn kernel_lattice(a: &IntMatrix) -> (Vec<Vec<BigInt>>, IntMatrix) {
    let n = a.cols();
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let right = &snf.right;
    let kernel: Vec<Vec<BigInt>> = (r..n).map(|j| right.column(j)).collect();
    let mut basis = IntMatrix::zeros(n, n);
    let order: Vec<usize> = (r..n).chain(0..r).collect();
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            basis.set(i, new_j, right.get(i, old_j).clone());
        }
    }
    (kernel, basis)
}

/// For a primitive integral functional `nu`, a lattice vector `w` with
/// `<nu, w> = 1`.
pub fn unit_preimage(nu: &[BigInt]) -> Option<Vec<BigInt>> {
    let a = IntMatrix::from_rows(vec![nu.to_vec()]);
    let snf = smith_normal_form(&a);
    if snf.diag.first().is_none_or(|d| !d.is_one()) {
        return None;
    }
    // left * nu * right = (1, 0, ...), left = ±1
    let sign = snf.left.get(0, 0).clone();
    let w: Vec<BigInt> = snf.right.column(0).into_iter().map(|x| x * &sign).collect();
    Some(w)
}

// ---------------------------------------------------------------------------
// Rational elimination

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut [Vec<Rat>]) -> Vec<usize> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            let (src, dst) = if i < r {
                let (a, b) = rows.split_at_mut(r);
                (&b[0], &mut a[i])
            } else {
                let (a, b) = rows.split_at_mut(i);
                (&a[r], &mut b[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d -= &f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn rank_of_vectors(vs: &[RatVector]) -> usize {
    let rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.0.clone()).collect();
    rank(&rows)
}

pub fn rank_of_int_vectors(vs: &[IntVector]) -> usize {
    let rows: Vec<Vec<Rat>> = vs.iter().map(|v| v.to_rat().0).collect();
    rank(&rows)
}

/// Basis of the right kernel `{x : A x = 0}` over the rationals.
pub fn rational_kernel(a: &[Vec<Rat>], cols: usize) -> Vec<RatVector> {
    let mut m = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            RatVector(v)
        })
        .collect()
}

/// Some solution of `A x = b`, if one exists.
pub fn solve(a: &[Vec<Rat>], b: &[Rat], cols: usize) -> Option<Vec<Rat>> {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

fn det_rat(rows: &mut [Vec<Rat>]) -> Rat {
    let n = rows.len();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !rows[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            rows.swap(p, c);
            det = -det;
        }
        let piv = rows[c][c].clone();
        det *= &piv;
        for i in (c + 1)..n {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &piv;
            for j in c..n {
                let t = &f * &rows[c][j];
                rows[i][j] -= t;
            }
        }
    }
    det
}

pub fn invert_rat(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Whether `v` lies in the rational span of `basis`.
pub fn subspace_contains(basis: &[RatVector], v: &IntVector) -> Result<bool> {
    subspace_contains_rat(basis, &v.to_rat())
}

pub fn subspace_contains_rat(basis: &[RatVector], v: &RatVector) -> Result<bool> {
    if let Some(b) = basis.iter().find(|b| b.dim() != v.dim()) {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            found: b.dim(),
        });
    }
    if v.is_zero() {
        return Ok(true);
    }
    let base = rank_of_vectors(basis);
    let mut ext = basis.to_vec();
    ext.push(v.clone());
    Ok(rank_of_vectors(&ext) == base)
}

/// Whether two families span the same rational subspace.
pub fn same_span(a: &[RatVector], b: &[RatVector]) -> bool {
    let ra = rank_of_vectors(a);
    if ra != rank_of_vectors(b) {
        return false;
    }
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    rank_of_vectors(&all) == ra
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}
