//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's rule. Problems here are tiny (a few
//! dozen variables), so clarity wins over sparse tricks.

use num_traits::{One, Signed, Zero};

use crate::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `maximize objective·x` subject to linear constraints, `x` free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    nvars: usize,
    constraints: Vec<(Vec<Rat>, Relation, Rat)>,
    objective: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: Vec<Rat> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram {
            nvars,
            constraints: Vec::new(),
            objective: vec![Rat::zero(); nvars],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Rat>, rel: Relation, rhs: Rat) -> &mut Self {
        assert_eq!(coeffs.len(), self.nvars, "constraint width");
        self.constraints.push((coeffs, rel, rhs));
        self
    }

    pub fn maximize(mut self, objective: Vec<Rat>) -> Self {
        assert_eq!(objective.len(), self.nvars, "objective width");
        self.objective = objective;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let k = self.nvars;
        let m = self.constraints.len();
        // columns: x+ (k), x- (k), one slack/surplus per inequality, artificials
        let n_ineq = self
            .constraints
            .iter()
            .filter(|c| c.1 != Relation::Eq)
            .count();
        let slack0 = 2 * k;
        let art0 = slack0 + n_ineq;
        let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
        let mut basis: Vec<usize> = Vec::with_capacity(m);
        let mut n_art = 0;
        let mut slack_idx = 0;
        let total_art = self
            .constraints
            .iter()
            .filter(|(_, rel, rhs)| {
                let rel = if rhs.is_negative() { flip_rel(*rel) } else { *rel };
                rel != Relation::Le
            })
            .count();
        let width = art0 + total_art + 1;
        for (coeffs, rel, rhs) in &self.constraints {
            let flip = rhs.is_negative();
            let sgn = if flip { -Rat::one() } else { Rat::one() };
            let rel = if flip { flip_rel(*rel) } else { *rel };
            let mut row = vec![Rat::zero(); width];
            for j in 0..k {
                row[j] = &coeffs[j] * &sgn;
                row[k + j] = -&row[j];
            }
            row[width - 1] = rhs * &sgn;
            match rel {
                Relation::Le => {
                    row[slack0 + slack_idx] = Rat::one();
                    basis.push(slack0 + slack_idx);
                    slack_idx += 1;
                }
                Relation::Ge => {
                    row[slack0 + slack_idx] = -Rat::one();
                    slack_idx += 1;
                    row[art0 + n_art] = Rat::one();
                    basis.push(art0 + n_art);
                    n_art += 1;
                }
                Relation::Eq => {
                    row[art0 + n_art] = Rat::one();
                    basis.push(art0 + n_art);
                    n_art += 1;
                }
            }
            rows.push(row);
        }

        let mut tab = Tableau { rows, basis, width };
        if total_art > 0 {
            let mut c1 = vec![Rat::zero(); width - 1];
            for a in 0..total_art {
                c1[art0 + a] = -Rat::one();
            }
            let allowed: Vec<bool> = (0..width - 1).map(|_| true).collect();
            match tab.run(&c1, &allowed) {
                PhaseResult::Unbounded => unreachable!("phase one is bounded"),
                PhaseResult::Optimal => {}
            }
            if tab.objective_value(&c1).is_negative() {
                return LpOutcome::Infeasible;
            }
            // drive artificials out of the basis
            let mut r = 0;
            while r < tab.rows.len() {
                if tab.basis[r] >= art0 {
                    if let Some(j) = (0..art0).find(|&j| !tab.rows[r][j].is_zero()) {
                        tab.pivot(r, j);
                    } else {
                        tab.rows.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
                r += 1;
            }
        }
        let mut c2 = vec![Rat::zero(); width - 1];
        for j in 0..k {
            c2[j] = self.objective[j].clone();
            c2[k + j] = -&self.objective[j];
        }
        let allowed: Vec<bool> = (0..width - 1).map(|j| j < art0).collect();
        match tab.run(&c2, &allowed) {
            PhaseResult::Unbounded => LpOutcome::Unbounded,
            PhaseResult::Optimal => {
                let mut full = vec![Rat::zero(); width - 1];
                for (r, &b) in tab.basis.iter().enumerate() {
                    full[b] = tab.rows[r][width - 1].clone();
                }
                let point: Vec<Rat> = (0..k).map(|j| &full[j] - &full[k + j]).collect();
                let value = point
                    .iter()
                    .zip(&self.objective)
                    .map(|(a, b)| a * b)
                    .sum();
                LpOutcome::Optimal { value, point }
            }
        }
    }
}

fn flip_rel(r: Relation) -> Relation {
    match r {
        Relation::Le => Relation::Ge,
        Relation::Ge => Relation::Le,
        Relation::Eq => Relation::Eq,
    }
}

enum PhaseResult {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn objective_value(&self, c: &[Rat]) -> Rat {
        self.rows
            .iter()
            .zip(&self.basis)
            .map(|(row, &b)| &c[b] * &row[self.width - 1])
            .sum()
    }

    fn run(&mut self, c: &[Rat], allowed: &[bool]) -> PhaseResult {
        let rhs = self.width - 1;
        loop {
            // Bland: lowest-index improving column
            let entering = (0..rhs).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut red = c[j].clone();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if !row[j].is_zero() && !c[b].is_zero() {
                        red -= &c[b] * &row[j];
                    }
                }
                red.is_positive()
            });
            let Some(j) = entering else {
                return PhaseResult::Optimal;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[j];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return PhaseResult::Unbounded;
            };
            self.pivot(r, j);
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = j;
    }
}

/// Maximizes a margin `t ≤ 1` with `rows_i · x ≥ t` for every row and
/// `eq_i · x = 0` for every equation. Returns the optimal `(t, x)`.
pub fn max_margin(rows: &[Vec<Rat>], equations: &[Vec<Rat>], nvars: usize) -> (Rat, Vec<Rat>) {
    let mut lp = LinearProgram::new(nvars + 1);
    for r in rows {
        let mut c = r.clone();
        c.push(-Rat::one());
        lp.constrain(c, Relation::Ge, Rat::zero());
    }
    for e in equations {
        let mut c = e.clone();
        c.push(Rat::zero());
        lp.constrain(c, Relation::Eq, Rat::zero());
    }
    let mut cap = vec![Rat::zero(); nvars + 1];
    cap[nvars] = Rat::one();
    lp.constrain(cap.clone(), Relation::Le, Rat::one());
    let lp = lp.maximize(cap);
    match lp.solve() {
        LpOutcome::Optimal { value, mut point } => {
            point.pop();
            (value, point)
        }
        // x = 0, t = 0 is always feasible and t is capped
        other => unreachable!("margin program cannot be {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{int, rat};

    #[test]
    fn small_maximization() {
        // max x + y, x + 2y <= 4, 3x + y <= 6, x,y >= 0  → (8/5, 6/5), 14/5
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![int(1), int(2)], Relation::Le, int(4))
            .constrain(vec![int(3), int(1)], Relation::Le, int(6))
            .constrain(vec![int(1), int(0)], Relation::Ge, int(0))
            .constrain(vec![int(0), int(1)], Relation::Ge, int(0));
        let out = lp.maximize(vec![int(1), int(1)]).solve();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: rat(14, 5),
                point: vec![rat(8, 5), rat(6, 5)]
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constrain(vec![int(1)], Relation::Ge, int(2))
            .constrain(vec![int(1)], Relation::Le, int(1));
        assert_eq!(lp.maximize(vec![int(0)]).solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![int(1), int(-1)], Relation::Eq, int(0));
        assert_eq!(lp.maximize(vec![int(1), int(0)]).solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_with_negative_rhs() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![int(1), int(1)], Relation::Eq, int(-3))
            .constrain(vec![int(1), int(0)], Relation::Le, int(-1))
            .constrain(vec![int(1), int(0)], Relation::Ge, int(-2));
        let out = lp.maximize(vec![int(-1), int(0)]).solve();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: int(2),
                point: vec![int(-2), int(-1)]
            }
        );
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.constrain(vec![int(1), int(1)], Relation::Eq, int(1))
            .constrain(vec![int(2), int(2)], Relation::Eq, int(2))
            .constrain(vec![int(1), int(0)], Relation::Le, int(5));
        let out = lp.maximize(vec![int(1), int(0)]).solve();
        assert_eq!(out.point().unwrap(), &[int(5), int(-4)]);
    }

    #[test]
    fn margin() {
        // x >= t, -x >= t: best margin 0
        let (t, _) = max_margin(&[vec![int(1)], vec![int(-1)]], &[], 1);
        assert!(t.is_zero());
        let (t, x) = max_margin(&[vec![int(1), int(0)], vec![int(0), int(2)]], &[], 2);
        assert_eq!(t, int(1));
        assert!(x[0] >= int(1) && &x[1] * int(2) >= int(1));
    }
}
