//! Dense two-phase primal simplex with Bland's rule.
//!
//! Solves `min c^T x  s.t.  A x = b, x >= 0` on a full tableau. Meant for
//! the small LPs produced by basis pursuit; Bland's rule guarantees
//! termination under degeneracy at the cost of speed.

use crate::error::{Error, Result};

/// Reduced costs above `-COST_TOL` count as non-negative.
const COST_TOL: f64 = 1e-11;
/// Pivot elements must exceed this in magnitude.
const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Sum of artificial variables at the end of phase 1.
    pub phase1_objective: f64,
    pub pivots: usize,
}

/// Standard-form LP; `a` is row-major `rows x cols`.
#[derive(Debug, Clone)]
pub struct StandardLp<'a> {
    pub rows: usize,
    pub cols: usize,
    pub a: &'a [f64],
    pub b: &'a [f64],
    pub c: &'a [f64],
}

struct Tableau {
    /// `rows + 1` rows of width `width + 1`; the last row holds reduced
    /// costs, the last column the right-hand side.
    t: Vec<f64>,
    rows: usize,
    width: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.width + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let p = self.at(r, c);
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for j in 0..w {
                self.t[i * w + j] -= f * self.t[r * w + j];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn drop_row(&mut self, r: usize) {
        let w = self.width + 1;
        self.t.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Runs Bland-rule iterations on columns `< allowed`. Returns
    /// `Ok(false)` when unbounded.
    fn optimize(&mut self, allowed: usize, pivots: &mut usize, cap: usize) -> Result<bool> {
        loop {
            let obj = self.rows;
            let entering = (0..allowed).find(|&j| self.at(obj, j) < -COST_TOL);
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if (tie && self.basis[i] < self.basis[bi]) || (!tie && ratio < br) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            if *pivots >= cap {
                return Err(Error::Solver(format!("simplex iteration cap of {cap} pivots exceeded")));
            }
            self.pivot(r, c);
            *pivots += 1;
        }
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width + 1;
        let obj = self.rows;
        for j in 0..w {
            let mut v = if j < self.width { cost[j] } else { 0.0 };
            for i in 0..self.rows {
                v -= cost[self.basis[i]] * self.t[i * w + j];
            }
            self.t[obj * w + j] = v;
        }
    }
}

/// Solves the LP; `phase1_tol` bounds the artificial sum accepted as
/// feasible, `cap` the total number of pivots across both phases.
pub fn solve(lp: &StandardLp<'_>, phase1_tol: f64, cap: usize) -> Result<LpSolution> {
    let (m, n) = (lp.rows, lp.cols);
    assert_eq!(lp.a.len(), m * n);
    assert_eq!(lp.b.len(), m);
    assert_eq!(lp.c.len(), n);

    // columns: n structural, then m artificials
    let width = n + m;
    let w = width + 1;
    let mut t = vec![0.0; (m + 1) * w];
    for i in 0..m {
        let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * w + j] = sign * lp.a[i * n + j];
        }
        t[i * w + n + i] = 1.0;
        t[i * w + width] = sign * lp.b[i];
    }
    let mut tab = Tableau { t, rows: m, width, basis: (n..n + m).collect() };

    let mut phase1_cost = vec![0.0; width];
    for c in &mut phase1_cost[n..] {
        *c = 1.0;
    }
    tab.set_costs(&phase1_cost);

    let mut pivots = 0;
    // phase 1 is bounded below by zero
    tab.optimize(width, &mut pivots, cap)?;
    let phase1_objective = -tab.at(tab.rows, width);
    if phase1_objective > phase1_tol {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            objective: f64::NAN,
            phase1_objective,
            pivots,
        });
    }

    // Drive remaining artificials out of the basis; rows that cannot pivot
    // onto a structural column are redundant.
    let mut i = 0;
    while i < tab.rows {
        if tab.basis[i] >= n {
            let col = (0..n).find(|&j| tab.at(i, j).abs() > 1e-9);
            match col {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => tab.drop_row(i),
            }
        } else {
            i += 1;
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(lp.c);
    tab.set_costs(&cost);
    let bounded = tab.optimize(n, &mut pivots, cap)?;

    let mut x = vec![0.0; n];
    for (r, &j) in tab.basis.iter().enumerate() {
        if j < n {
            x[j] = tab.rhs(r);
        }
    }
    let objective = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: if bounded { LpStatus::Optimal } else { LpStatus::Unbounded },
        x,
        objective,
        phase1_objective,
        pivots,
    })
}
