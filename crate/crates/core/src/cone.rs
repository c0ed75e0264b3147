//! Rational polyhedral cones given by generators, with their facet
//! description computed exactly.

use num_traits::{Signed, Zero};

use crate::lattice::{rank, rational_kernel, rref, IntVector, RatVector};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::Rat;

/// A facet: inward normal (as a functional on the ambient space) and the
/// generators lying on it.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: RatVector,
    pub generators: Vec<usize>,
}

/// `cone(generators)` with its linear span data and facets.
#[derive(Clone, Debug)]
pub struct Cone {
    generators: Vec<RatVector>,
    ambient: usize,
    dim: usize,
    /// Functionals vanishing on the linear span.
    equations: Vec<RatVector>,
    facets: Vec<Facet>,
    pointed: bool,
}

impl Cone {
    pub fn from_int(generators: &[IntVector], ambient: usize) -> Cone {
        let gens: Vec<RatVector> = generators.iter().map(IntVector::to_rat).collect();
        Cone::new(gens, ambient)
    }

    pub fn new(generators: Vec<RatVector>, ambient: usize) -> Cone {
        let rows: Vec<Vec<Rat>> = generators.iter().map(|g| g.0.clone()).collect();
        let equations = rational_kernel(&rows, ambient);
        let mut echelon = rows.clone();
        let pivots = rref(&mut echelon);
        let dim = pivots.len();
        // coordinates on the span: the pivot columns
        let proj: Vec<Vec<Rat>> = generators
            .iter()
            .map(|g| pivots.iter().map(|&p| g.0[p].clone()).collect())
            .collect();
        let facets = facets_in_span(&proj, dim)
            .into_iter()
            .map(|(normal, on)| {
                let mut full = vec![Rat::zero(); ambient];
                for (k, &p) in pivots.iter().enumerate() {
                    full[p] = normal[k].clone();
                }
                Facet {
                    normal: RatVector(full),
                    generators: on,
                }
            })
            .collect::<Vec<_>>();
        let normals_proj: Vec<Vec<Rat>> = facets
            .iter()
            .map(|f| pivots.iter().map(|&p| f.normal.0[p].clone()).collect())
            .collect();
        let pointed = dim == 0 || rank(&normals_proj) == dim;
        Cone {
            generators,
            ambient,
            dim,
            equations,
            facets,
            pointed,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn generators(&self) -> &[RatVector] {
        &self.generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[RatVector] {
        &self.equations
    }

    /// Contains no line.
    pub fn is_pointed(&self) -> bool {
        self.pointed
    }

    pub fn contains(&self, x: &RatVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facets.iter().all(|f| !f.normal.dot(x).is_negative())
    }

    /// Strictly inside the relative interior.
    pub fn contains_relint(&self, x: &RatVector) -> bool {
        self.equations.iter().all(|e| e.dot(x).is_zero())
            && self.facets.iter().all(|f| f.normal.dot(x).is_positive())
    }

    /// Indices of generators spanning one-dimensional faces. Parallel
    /// generators are all reported.
    pub fn extreme_generators(&self) -> Vec<usize> {
        if !self.pointed {
            return Vec::new();
        }
        (0..self.generators.len())
            .filter(|&i| {
                if self.generators[i].is_zero() {
                    return false;
                }
                let on: Vec<Vec<Rat>> = self
                    .facets
                    .iter()
                    .filter(|f| f.generators.contains(&i))
                    .map(|f| f.normal.0.clone())
                    .collect();
                // ranks measured modulo the span's annihilator
                let mut with_eq = on;
                with_eq.extend(self.equations.iter().map(|e| e.0.clone()));
                rank(&with_eq) == self.ambient - 1
            })
            .collect()
    }

    /// Generators of the smallest face containing the given generators.
    pub fn face_closure(&self, subset: &[usize]) -> Vec<usize> {
        let containing: Vec<&Facet> = self
            .facets
            .iter()
            .filter(|f| subset.iter().all(|s| f.generators.contains(s)))
            .collect();
        (0..self.generators.len())
            .filter(|g| containing.iter().all(|f| f.generators.contains(g)))
            .collect()
    }

    /// Whether `subset` is exactly the generator set of a face.
    pub fn is_face(&self, subset: &[usize]) -> bool {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        self.face_closure(&s) == s
    }
}

fn facets_in_span(gens: &[Vec<Rat>], d: usize) -> Vec<(Vec<Rat>, Vec<usize>)> {
    let mut out: Vec<(Vec<Rat>, Vec<usize>)> = Vec::new();
    if d == 0 {
        return out;
    }
    let k = gens.len();
    let nonzero: Vec<usize> = (0..k).filter(|&i| gens[i].iter().any(|x| !x.is_zero())).collect();
    for subset in combinations(&nonzero, d - 1) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| gens[i].clone()).collect();
        if rank(&rows) != d - 1 {
            continue;
        }
        let ker = rational_kernel(&rows, d);
        debug_assert_eq!(ker.len(), 1);
        let mut normal = ker.into_iter().next().expect("one-dimensional kernel").0;
        let vals: Vec<Rat> = gens.iter().map(|g| dot(&normal, g)).collect();
        let pos = vals.iter().any(|v| v.is_positive());
        let neg = vals.iter().any(|v| v.is_negative());
        if pos && neg {
            continue;
        }
        if neg {
            normal.iter_mut().for_each(|x| *x = -&*x);
        }
        let normal = normalize(&normal);
        if out.iter().any(|(n, _)| *n == normal) {
            continue;
        }
        let on: Vec<usize> = (0..k).filter(|&i| vals[i].is_zero()).collect();
        out.push((normal, on));
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &[Rat]) -> Vec<Rat> {
    RatVector(v.to_vec())
        .primitive_integral()
        .into_iter()
        .map(Rat::from_integer)
        .collect()
}

/// All `k`-subsets of `items`, in lexicographic order.
pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..items.len() {
            if items.len() - i < need {
                break;
            }
            cur.push(items[i].clone());
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Decides whether `cone(a) ∩ cone(b)` is the common face `cone(a ∩ b)` of
/// both, via a separating functional that vanishes on the shared generators,
/// is positive on the rest of `a` and negative on the rest of `b`.
pub fn meet_in_common_face(a: &[IntVector], b: &[IntVector]) -> bool {
    let n = a.first().or(b.first()).map_or(0, IntVector::dim);
    let mut lp = LinearProgram::new(n);
    for g in a {
        let row: Vec<Rat> = g.to_rat().0;
        if b.contains(g) {
            lp.constrain(row, Relation::Eq, Rat::zero());
        } else {
            lp.constrain(row, Relation::Ge, Rat::from_integer(1.into()));
        }
    }
    for g in b {
        if a.contains(g) {
            continue;
        }
        lp.constrain(g.to_rat().0, Relation::Le, Rat::from_integer((-1).into()));
    }
    !matches!(lp.maximize(vec![Rat::zero(); n]).solve(), LpOutcome::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[i64]) -> IntVector {
        IntVector(v.to_vec())
    }

    #[test]
    fn quadrant_facets() {
        let c = Cone::from_int(&[iv(&[1, 0]), iv(&[0, 1])], 2);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.facets().len(), 2);
        assert!(c.is_pointed());
        assert!(c.contains(&iv(&[3, 1]).to_rat()));
        assert!(!c.contains(&iv(&[-1, 1]).to_rat()));
        assert_eq!(c.extreme_generators(), vec![0, 1]);
    }

    #[test]
    fn square_cone_in_three_space() {
        let gens = [
            iv(&[1, 1, 1]),
            iv(&[1, -1, 1]),
            iv(&[-1, -1, 1]),
            iv(&[-1, 1, 1]),
            iv(&[0, 0, 1]),
        ];
        let c = Cone::from_int(&gens, 3);
        assert_eq!(c.facets().len(), 4);
        assert_eq!(c.extreme_generators(), vec![0, 1, 2, 3]);
        assert!(c.is_face(&[0, 1]));
        assert!(!c.is_face(&[0, 2]));
        assert_eq!(c.face_closure(&[0, 2]), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn lines_are_not_pointed() {
        let c = Cone::from_int(&[iv(&[1, 0]), iv(&[-1, 0])], 2);
        assert_eq!(c.dim(), 1);
        assert!(!c.is_pointed());
        let h = Cone::from_int(&[iv(&[1, 0]), iv(&[-1, 0]), iv(&[0, 1])], 2);
        assert!(!h.is_pointed());
    }

    #[test]
    fn lower_dimensional_cone() {
        let c = Cone::from_int(&[iv(&[1, 0, 0]), iv(&[1, 1, 0])], 3);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.equations().len(), 1);
        assert!(c.contains(&iv(&[2, 1, 0]).to_rat()));
        assert!(!c.contains(&iv(&[2, 1, 1]).to_rat()));
        assert!(!c.contains(&iv(&[0, 1, 0]).to_rat()));
    }

    #[test]
    fn separation() {
        let a = [iv(&[1, 0]), iv(&[1, 1])];
        let b = [iv(&[1, 1]), iv(&[0, 1])];
        assert!(meet_in_common_face(&a, &b));
        let c = [iv(&[1, 0]), iv(&[0, 1])];
        assert!(!meet_in_common_face(&a, &c));
        // overlap without shared generators
        let d = [iv(&[2, 1]), iv(&[0, 1])];
        let d: Vec<IntVector> = d.to_vec();
        assert!(!meet_in_common_face(&a, &d));
    }
}
