//! Double description: extreme rays of `{x ∈ Q^p : A x ≥ 0}`.
//!
//! Incremental insertion of constraints starting from a simplicial cone, with
//! the algebraic adjacency test (two rays are adjacent iff the constraints
//! tight at both have rank `p - 2`).

use num_traits::{Signed, Zero};

use crate::lattice::{invert_rat, rank, RatVector};
use crate::Rat;

/// Extreme rays of the pointed cone `{x : rows·x ≥ 0}`, as primitive
/// integral vectors in canonical (sorted) order. Returns `None` when the
/// cone has a lineality space, i.e. the rows do not have full column rank.
pub fn extreme_rays(rows: &[Vec<Rat>], p: usize) -> Option<Vec<RatVector>> {
    if p == 0 {
        return Some(Vec::new());
    }
    if rank(rows) < p {
        return None;
    }
    // greedy independent subset for the starting simplex
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..rows.len() {
        let mut trial: Vec<Vec<Rat>> = chosen.iter().map(|&c| rows[c].clone()).collect();
        trial.push(rows[i].clone());
        if rank(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == p {
                break;
            }
        }
    }
    let basis: Vec<Vec<Rat>> = chosen.iter().map(|&c| rows[c].clone()).collect();
    let inv = invert_rat(&basis).expect("independent rows");
    let mut rays: Vec<Vec<Rat>> = (0..p)
        .map(|j| normalize((0..p).map(|i| inv[i][j].clone()).collect()))
        .collect();
    let mut processed: Vec<usize> = chosen.clone();

    for i in 0..rows.len() {
        if chosen.contains(&i) {
            continue;
        }
        let a = &rows[i];
        let vals: Vec<Rat> = rays.iter().map(|r| dot(a, r)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if minus.is_empty() {
            processed.push(i);
            continue;
        }
        let zero_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&k| dot(&rows[k], r).is_zero())
                    .collect()
            })
            .collect();
        let mut next: Vec<Vec<Rat>> = (0..rays.len())
            .filter(|k| !vals[*k].is_negative())
            .map(|k| rays[k].clone())
            .collect();
        for &pi in &plus {
            for &mi in &minus {
                let common: Vec<usize> = zero_sets[pi]
                    .iter()
                    .copied()
                    .filter(|k| zero_sets[mi].contains(k))
                    .collect();
                if common.len() + 2 < p {
                    continue;
                }
                let tight: Vec<Vec<Rat>> = common.iter().map(|&k| rows[k].clone()).collect();
                if rank(&tight) != p - 2 {
                    continue;
                }
                let sp = &vals[pi];
                let sm = &vals[mi];
                let combo: Vec<Rat> = rays[mi]
                    .iter()
                    .zip(&rays[pi])
                    .map(|(m, pl)| sp * m - sm * pl)
                    .collect();
                let r = normalize(combo);
                if !next.contains(&r) {
                    next.push(r);
                }
            }
        }
        rays = next;
        processed.push(i);
    }
    let mut out: Vec<RatVector> = rays.into_iter().map(RatVector).collect();
    out.sort();
    Some(out)
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: Vec<Rat>) -> Vec<Rat> {
    RatVector(v)
        .primitive_integral()
        .into_iter()
        .map(Rat::from_integer)
        .collect()
}
