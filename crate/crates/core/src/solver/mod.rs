//! Dense block-diagonal primal-dual interior-point solver for linear matrix
//! inequalities.
//!
//! Solves the pair
//!
//! ```text
//!   dual:    maximize  b·y        s.t.  Z = C - Σᵢ yᵢ Aᵢ ⪰ 0
//!   primal:  minimize  ⟨C, X⟩     s.t.  ⟨Aᵢ, X⟩ = bᵢ,  X ⪰ 0
//! ```
//!
//! with the HKM search direction and Mehrotra predictor-corrector steps. All
//! matrices are block diagonal; blocks are processed in parallel.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{invalid, Result};

#[derive(Clone, Debug)]
pub struct LmiProblem {
    pub block_dims: Vec<usize>,
    /// `c[block]`
    pub c: Vec<DMatrix<f64>>,
    /// `a[i][block]`
    pub a: Vec<Vec<DMatrix<f64>>>,
    pub b: DVector<f64>,
}

impl LmiProblem {
    pub fn num_vars(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let nb = self.block_dims.len();
        if self.c.len() != nb {
            return invalid("C has wrong number of blocks");
        }
        if self.a.len() != self.b.len() {
            return invalid("number of constraint matrices differs from len(b)");
        }
        for (blk, &n) in self.block_dims.iter().enumerate() {
            if self.c[blk].shape() != (n, n) {
                return invalid(format!("C block {blk} has wrong size"));
            }
            for (i, ai) in self.a.iter().enumerate() {
                if ai.len() != nb || ai[blk].shape() != (n, n) {
                    return invalid(format!("A[{i}] block {blk} has wrong size"));
                }
            }
        }
        Ok(())
    }

    /// `C - Σ yᵢ Aᵢ`.
    pub fn slack(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        (0..self.block_dims.len())
            .map(|blk| {
                let mut z = self.c[blk].clone();
                for (i, ai) in self.a.iter().enumerate() {
                    if y[i] != 0.0 {
                        z -= &ai[blk] * y[i];
                    }
                }
                z
            })
            .collect()
    }

    fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a.iter().map(|ai| ai.iter().zip(x).map(|(a, x)| a.dot(x)).sum::<f64>()),
        )
    }

    fn apply_adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        (0..self.block_dims.len())
            .map(|blk| {
                let n = self.block_dims[blk];
                let mut out = DMatrix::zeros(n, n);
                for (i, ai) in self.a.iter().enumerate() {
                    if y[i] != 0.0 {
                        out += &ai[blk] * y[i];
                    }
                }
                out
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub gap_tolerance: f64,
    pub feasibility_tolerance: f64,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iterations: 120,
            gap_tolerance: 1e-10,
            feasibility_tolerance: 1e-10,
            step_fraction: 0.95,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: SolveStatus,
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub z: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

fn frob(blocks: &[DMatrix<f64>]) -> f64 {
    blocks.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Largest `α` with `s + α·d ⪰ 0` over all blocks (`∞` if unbounded).
fn max_step(s: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> Option<f64> {
    let per_block: Option<Vec<f64>> = s
        .par_iter()
        .zip(d.par_iter())
        .map(|(s, d)| {
            let l = Cholesky::<f64, Dyn>::new(s.clone())?.unpack();
            let linv = l.solve_lower_triangular(&DMatrix::identity(s.nrows(), s.nrows()))?;
            let w = sym(&linv * d * linv.transpose());
            let lmin = SymmetricEigen::new(w).eigenvalues.min();
            Some(if lmin >= 0.0 { f64::INFINITY } else { -1.0 / lmin })
        })
        .collect();
    per_block.map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
}

fn inverse_spd(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inv = Cholesky::<f64, Dyn>::new(m.clone())?.inverse();
    Some(sym(inv))
}

/// `X₀ = A*(G⁻¹ b) + ξ (I - Π I)` with `G` the Gram matrix of the `Aᵢ` and `Π`
/// the projection onto their span. It satisfies the equality constraints
/// exactly; returns `None` unless `I - Π I` is positive definite.
fn feasible_start(problem: &LmiProblem, xi: f64) -> Option<Vec<DMatrix<f64>>> {
    let m = problem.num_vars();
    let mut gram = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = inner(&problem.a[i], &problem.a[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let chol = Cholesky::<f64, Dyn>::new(gram)?;
    let identity: Vec<DMatrix<f64>> = problem.block_dims.iter().map(|&n| DMatrix::identity(n, n)).collect();
    let base = problem.apply_adjoint(&chol.solve(&problem.b));
    let proj = problem.apply_adjoint(&chol.solve(&problem.apply(&identity)));
    let rest: Vec<DMatrix<f64>> = identity.iter().zip(&proj).map(|(i, p)| sym(i - p)).collect();
    // smallest eigenvalues of the two parts fix the scale of ξ
    let lmin = |blocks: &[DMatrix<f64>]| {
        blocks.iter().map(|b| SymmetricEigen::new(b.clone()).eigenvalues.min()).fold(f64::INFINITY, f64::min)
    };
    let rest_min = lmin(&rest);
    if rest_min.is_nan() || rest_min <= 1e-8 {
        return None;
    }
    let scale = xi.max((1.0 - lmin(&base)).max(0.0) / rest_min);
    Some(base.iter().zip(&rest).map(|(b, r)| sym(b + r * scale)).collect())
}

/// Runs the interior-point method.
pub fn solve(problem: &LmiProblem, settings: &SolverSettings) -> Result<Solution> {
    problem.validate()?;
    let m = problem.num_vars();
    let nb = problem.block_dims.len();
    let ntot: usize = problem.block_dims.iter().sum();
    let norm_b = problem.b.norm();
    let norm_c = frob(&problem.c);

    let mut y = DVector::zeros(m);
    let c_is_pd = problem.c.iter().all(|c| Cholesky::<f64, Dyn>::new(c.clone()).is_some());
    let mut z: Vec<DMatrix<f64>> = if c_is_pd {
        problem.c.clone()
    } else {
        let scale = norm_c.max(1.0);
        problem.block_dims.iter().map(|&n| DMatrix::identity(n, n) * scale).collect()
    };
    let xi = problem
        .a
        .iter()
        .zip(problem.b.iter())
        .map(|(ai, bi)| (1.0 + bi.abs()) / (1.0 + frob(ai)))
        .fold(1.0, f64::max);
    let mut x = feasible_start(problem, xi)
        .unwrap_or_else(|| problem.block_dims.iter().map(|&n| DMatrix::identity(n, n) * xi).collect());

    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let (mut pinf, mut dinf);
    loop {
        let ax = problem.apply(&x);
        let rp = &problem.b - &ax;
        let aty = problem.apply_adjoint(&y);
        let rd: Vec<DMatrix<f64>> = (0..nb).map(|k| &problem.c[k] - &z[k] - &aty[k]).collect();
        let pobj = inner(&problem.c, &x);
        let dobj = problem.b.dot(&y);
        pinf = rp.norm() / (1.0 + norm_b);
        dinf = frob(&rd) / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let mu = inner(&x, &z) / ntot as f64;

        if pinf < settings.feasibility_tolerance && dinf < settings.feasibility_tolerance && gap < settings.gap_tolerance {
            status = SolveStatus::Optimal;
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        if !mu.is_finite() || frob(&x) > 1e14 || y.amax() > 1e14 {
            status = SolveStatus::NumericalFailure;
            break;
        }
        iterations += 1;

        let Some(zinv) = z.iter().map(inverse_spd).collect::<Option<Vec<_>>>() else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        // Schur complement M_ij = Σ_blocks tr(A_i X A_j Z⁻¹)
        let schur = (0..nb)
            .into_par_iter()
            .map(|blk| {
                let mut mb = DMatrix::zeros(m, m);
                let xz: Vec<DMatrix<f64>> =
                    (0..m).map(|j| &x[blk] * &problem.a[j][blk] * &zinv[blk]).collect();
                for j in 0..m {
                    for i in 0..=j {
                        let v = problem.a[i][blk].dot(&xz[j].transpose());
                        mb[(i, j)] = v;
                        mb[(j, i)] = v;
                    }
                }
                mb
            })
            .reduce(|| DMatrix::zeros(m, m), |a, b| a + b);
        let schur = sym(schur);
        let diag_scale = schur.diagonal().amax().max(1e-300);
        let chol = Cholesky::<f64, Dyn>::new(schur.clone()).or_else(|| {
            let reg = DMatrix::identity(m, m) * (1e-14 * diag_scale);
            Cholesky::<f64, Dyn>::new(&schur + reg)
        });
        let Some(chol) = chol else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        let x_rd_zinv: Vec<DMatrix<f64>> = (0..nb).map(|k| &x[k] * &rd[k] * &zinv[k]).collect();
        let a_x_rd_zinv = problem.apply(&x_rd_zinv);

        let direction = |k_term: &[DMatrix<f64>]| {
            let h = &rp - problem.apply(k_term) + &a_x_rd_zinv;
            let mut dy = chol.solve(&h);
            // one step of iterative refinement; M is badly conditioned near the optimum
            dy += chol.solve(&(&h - &schur * &dy));
            let atdy = problem.apply_adjoint(&dy);
            let dz: Vec<DMatrix<f64>> = (0..nb).map(|k| &rd[k] - &atdy[k]).collect();
            let dx: Vec<DMatrix<f64>> = (0..nb)
                .map(|k| &k_term[k] - sym(&x[k] * &dz[k] * &zinv[k]))
                .collect();
            (dx, dy, dz)
        };

        // predictor
        let k_aff: Vec<DMatrix<f64>> = x.iter().map(|xk| -xk).collect();
        let (dx_a, _dy_a, dz_a) = direction(&k_aff);
        let (Some(ap), Some(ad)) = (max_step(&x, &dx_a), max_step(&z, &dz_a)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mu_aff = (0..nb)
            .map(|k| (&x[k] + &dx_a[k] * ap).dot(&(&z[k] + &dz_a[k] * ad)))
            .sum::<f64>()
            / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let k_cor: Vec<DMatrix<f64>> = (0..nb)
            .map(|k| &zinv[k] * (sigma * mu) - &x[k] - sym(&dx_a[k] * &dz_a[k] * &zinv[k]))
            .collect();
        let (dx, dy, dz) = direction(&k_cor);
        let (Some(ap), Some(ad)) = (max_step(&x, &dx), max_step(&z, &dz)) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        let ap = (settings.step_fraction * ap).min(1.0);
        let ad = (settings.step_fraction * ad).min(1.0);

        for k in 0..nb {
            x[k] += &dx[k] * ap;
            x[k] = sym(std::mem::replace(&mut x[k], DMatrix::zeros(0, 0)));
            z[k] += &dz[k] * ad;
            z[k] = sym(std::mem::replace(&mut z[k], DMatrix::zeros(0, 0)));
        }
        y += &dy * ad;
    }

    Ok(Solution {
        status,
        primal_objective: inner(&problem.c, &x),
        dual_objective: problem.b.dot(&y),
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        iterations,
        y,
        x,
        z,
    })
}
