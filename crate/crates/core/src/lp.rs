//! Dense two-phase primal simplex for `min cᵀx s.t. Ax ≤ b, x ≥ 0`.
//!
//! Entering columns follow Dantzig's rule until a long run of degenerate
//! pivots is seen, after which Bland's rule takes over for the rest of the
//! solve. Problem sizes here stay at or below a few hundred rows.

use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEASIBILITY_TOL: f64 = 1e-7;
const DEGENERATE_RUN: usize = 64;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("problem is infeasible (phase-one residual {0:e})")]
    Infeasible(f64),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("no convergence after {0} pivots")]
    IterationLimit(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: usize,
    width: usize,
    /// Row-major, `rows` constraint rows of `width + 1` entries (last = rhs).
    data: Vec<f64>,
    /// Reduced costs; last entry holds minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    pivots: usize,
    degenerate_run: usize,
    bland: bool,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.width + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let stride = self.width + 1;
        let p = self.at(r, c);
        let (before, rest) = self.data.split_at_mut(r * stride);
        let (prow, after) = rest.split_at_mut(stride);
        prow.iter_mut().for_each(|v| *v /= p);
        for row in before.chunks_mut(stride).chain(after.chunks_mut(stride)) {
            let factor = row[c];
            if factor != 0.0 {
                row.iter_mut().zip(prow.iter()).for_each(|(v, &pv)| *v -= factor * pv);
                row[c] = 0.0;
            }
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            self.cost.iter_mut().zip(prow.iter()).for_each(|(v, &pv)| *v -= factor * pv);
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn entering(&self, allow_artificial: bool) -> Option<usize> {
        let limit = if allow_artificial {
            self.width
        } else {
            self.first_artificial
        };
        let candidates = (0..limit).filter(|&j| self.cost[j] < -COST_TOL);
        if self.bland {
            candidates.min()
        } else {
            candidates.min_by(|&a, &b| self.cost[a].total_cmp(&self.cost[b]))
        }
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, c);
            if a > PIVOT_TOL {
                let ratio = self.rhs(r) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - 1e-12
                            || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                        {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
        }
        best.map(|(r, _)| r)
    }

    fn optimize(&mut self, allow_artificial: bool) -> Result<(), LpError> {
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit(self.pivots));
            }
            let Some(c) = self.entering(allow_artificial) else {
                return Ok(());
            };
            let Some(r) = self.leaving(c) else {
                return Err(LpError::Unbounded);
            };
            if self.rhs(r).abs() < 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_RUN {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Solves `min cᵀx` subject to `Ax ≤ b`, `x ≥ 0`. Rows of `a` are constraints.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, LpError> {
    let vars = c.len();
    let rows = a.len();
    if b.len() != rows {
        return Err(LpError::Dimension(format!("{rows} rows but {} right-hand sides", b.len())));
    }
    if let Some(bad) = a.iter().position(|r| r.len() != vars) {
        return Err(LpError::Dimension(format!("row {bad} has wrong length")));
    }

    let negative: Vec<usize> = (0..rows).filter(|&i| b[i] < 0.0).collect();
    let first_artificial = vars + rows;
    let width = first_artificial + negative.len();
    let stride = width + 1;
    let mut data = vec![0.0; rows * stride];
    let mut basis = vec![0; rows];
    let mut art = first_artificial;
    for i in 0..rows {
        let row = &mut data[i * stride..(i + 1) * stride];
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..vars {
            row[j] = sign * a[i][j];
        }
        row[vars + i] = sign;
        row[width] = sign * b[i];
        if b[i] < 0.0 {
            row[art] = 1.0;
            basis[i] = art;
            art += 1;
        } else {
            basis[i] = vars + i;
        }
    }

    let mut t = Tableau {
        rows,
        width,
        data,
        cost: vec![0.0; stride],
        basis,
        first_artificial,
        pivots: 0,
        degenerate_run: 0,
        bland: false,
    };

    if !negative.is_empty() {
        for &i in &negative {
            for j in 0..stride {
                t.cost[j] -= t.at(i, j);
            }
        }
        for j in first_artificial..width {
            t.cost[j] = 0.0;
        }
        t.optimize(true)?;
        let residual = -t.cost[width];
        if residual > FEASIBILITY_TOL {
            return Err(LpError::Infeasible(residual));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..rows {
            if t.basis[r] >= first_artificial {
                if let Some(c) = (0..first_artificial).find(|&j| t.at(r, j).abs() > PIVOT_TOL) {
                    t.pivot(r, c);
                }
            }
        }
    }

    t.cost = vec![0.0; stride];
    t.cost[..vars].copy_from_slice(c);
    for r in 0..rows {
        let cb = if t.basis[r] < vars { c[t.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..stride {
                t.cost[j] -= cb * t.at(r, j);
            }
        }
    }
    t.degenerate_run = 0;
    t.bland = false;
    t.optimize(false)?;

    let mut x = vec![0.0; vars];
    for r in 0..rows {
        if t.basis[r] < vars {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots: t.pivots,
    })
}
