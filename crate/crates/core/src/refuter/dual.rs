use std::path::{Path, PathBuf};
use std::process::Command;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::assembler::sdpa::{read_solution, sdpa_text};
use crate::assembler::ReducedForm;
use crate::error::{Error, Result};
use crate::solver::{solve, LmiProblem, SolveStatus};

use super::{RefuteOptions, SolverChoice};

// relative eigenvalue threshold separating the lineality space of the Gram matrix
const GRAM_NULL_REL: f64 = 1e-10;
// minimum component of the cost on the lineality space that counts as a refutation
const LINEALITY_COST: f64 = 1e-8;
// primal residual below which 1 - <C, X> is trusted as a lower bound on the value
const PRIMAL_BOUND_INFEAS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DualStatus {
    /// A coefficient vector with negative objective was found.
    Refuted,
    /// Solved to optimality with a nonnegative value.
    NotRefuted,
    Inconclusive { reason: String },
}

/// Result of minimizing `Σ y_g q_g` over `{y : F(y) ⪰ 0, Σ tr F = T}`.
#[derive(Clone, Debug, Serialize)]
pub struct DualOutcome {
    pub status: DualStatus,
    /// Optimal (or last feasible) trace-normalized objective.
    pub value: f64,
    /// Candidate certificate scaled to `Σ y q = -1`, when refuted.
    pub y: Option<Vec<f64>>,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    /// Dimension of the removed lineality space.
    pub lineality: usize,
}

struct Reparam {
    /// z = basis · w
    basis: DMatrix<f64>,
    lineality: usize,
    refuting_direction: Option<DVector<f64>>,
}

fn reparametrize(rf: &ReducedForm) -> Reparam {
    let m = rf.num_vars();
    let eig = SymmetricEigen::new(rf.gram());
    let scale = eig.eigenvalues.amax().max(1.0);
    let cost = DVector::from_column_slice(&rf.cost);
    let mut range = Vec::new();
    let mut null_component = DVector::zeros(m);
    let mut lineality = 0;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        if lam <= GRAM_NULL_REL * scale {
            lineality += 1;
            null_component += v * v.dot(&cost);
        } else {
            range.push(v / lam.sqrt());
        }
    }
    let basis = if range.is_empty() { DMatrix::zeros(m, 0) } else { DMatrix::from_columns(&range) };
    let nc = null_component.norm();
    let refuting_direction = (nc > LINEALITY_COST * (1.0 + cost.norm())).then(|| -&null_component / (nc * nc));
    Reparam { basis, lineality, refuting_direction }
}

fn transformed(rf: &ReducedForm, basis: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<DMatrix<f64>>>) {
    let cost = (0..basis.ncols())
        .map(|j| basis.column(j).iter().zip(&rf.cost).map(|(b, c)| b * c).sum())
        .collect();
    let mats = (0..basis.ncols())
        .map(|j| {
            rf.block_dims
                .iter()
                .enumerate()
                .map(|(blk, &n)| {
                    let mut m = DMatrix::zeros(n, n);
                    for (g, &b) in basis.column(j).iter().enumerate() {
                        if b != 0.0 {
                            m += &rf.mats[g][blk] * b;
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    (cost, mats)
}

/// Minimizes the trace-normalized dual over explicit coefficient blocks
/// (`blocks[block][generator]`, generator 0 the identity).
pub fn minimize_dual(targets: &[f64], blocks: &[Vec<DMatrix<f64>>], opts: &RefuteOptions) -> Result<DualOutcome> {
    let rf = ReducedForm::new(targets, blocks)?;
    let rp = reparametrize(&rf);

    if let Some(dir) = &rp.refuting_direction {
        // Σ z_g A'_g = 0 along `dir`, so F(y) = 0 exactly with Σ y q = -1
        let z: Vec<f64> = dir.iter().copied().collect();
        let mut y = rf.lift(&z);
        y[0] -= 1.0;
        return Ok(DualOutcome {
            status: DualStatus::Refuted,
            value: f64::NEG_INFINITY,
            y: Some(y),
            iterations: 0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
            lineality: rp.lineality,
        });
    }

    let (cost, mats) = transformed(&rf, &rp.basis);
    if cost.is_empty() {
        return Ok(DualOutcome {
            status: DualStatus::NotRefuted,
            value: 1.0,
            y: None,
            iterations: 0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
            lineality: rp.lineality,
        });
    }
    let lmi = LmiProblem {
        block_dims: rf.block_dims.clone(),
        c: rf.block_dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        a: mats.iter().map(|mj| mj.iter().map(|m| -m).collect()).collect(),
        b: DVector::from_iterator(cost.len(), cost.iter().map(|c| -c)),
    };

    let raw = match &opts.solver {
        SolverChoice::Embedded => {
            let sol = solve(&lmi, &opts.settings)?;
            let reason = match sol.status {
                SolveStatus::Optimal => None,
                SolveStatus::MaxIterations => Some("iteration limit reached".to_string()),
                SolveStatus::NumericalFailure => Some("numerical failure".to_string()),
            };
            RawSolve {
                w: sol.y.iter().copied().collect(),
                reason,
                iterations: sol.iterations,
                pinf: sol.primal_infeasibility,
                dinf: sol.dual_infeasibility,
                lower_bound: (sol.primal_infeasibility <= PRIMAL_BOUND_INFEAS).then_some(1.0 - sol.primal_objective),
            }
        }
        SolverChoice::File(path) => run_external(path, &rf.block_dims, &cost, &mats)?,
    };

    let w = DVector::from_column_slice(&raw.w);
    let z: Vec<f64> = (&rp.basis * &w).iter().copied().collect();
    let value = rf.objective(&z);
    let (status, y) = if value < -opts.tol {
        let y = rf.lift(&z).into_iter().map(|v| v / value.abs()).collect();
        (DualStatus::Refuted, Some(y))
    } else {
        match raw.reason {
            // an unfinished solve still settles the level when the primal iterate bounds the value
            Some(reason) if !raw.lower_bound.is_some_and(|lb| lb >= -opts.tol) => {
                (DualStatus::Inconclusive { reason }, None)
            }
            _ => (DualStatus::NotRefuted, None),
        }
    };
    Ok(DualOutcome {
        status,
        value,
        y,
        iterations: raw.iterations,
        primal_infeasibility: raw.pinf,
        dual_infeasibility: raw.dinf,
        lineality: rp.lineality,
    })
}

struct RawSolve {
    w: Vec<f64>,
    reason: Option<String>,
    iterations: usize,
    pinf: f64,
    dinf: f64,
    lower_bound: Option<f64>,
}

/// Runs `program problem.dat-s solution.sol` and reads the CSDP-style answer.
fn run_external(program: &Path, block_dims: &[usize], cost: &[f64], mats: &[Vec<DMatrix<f64>>]) -> Result<RawSolve> {
    let dir = std::env::temp_dir().join(format!("specref-{}-{}", std::process::id(), unique()));
    std::fs::create_dir_all(&dir)?;
    let problem: PathBuf = dir.join("problem.dat-s");
    let solution: PathBuf = dir.join("solution.sol");
    std::fs::write(&problem, sdpa_text(block_dims, cost, mats, "reparametrized refutation program"))?;
    let out = Command::new(program).arg(&problem).arg(&solution).output();
    let result = (|| {
        let out = out.map_err(|e| Error::Solver(format!("cannot run {}: {e}", program.display())))?;
        let text = std::fs::read_to_string(&solution).map_err(|e| {
            Error::Solver(format!(
                "{} produced no solution file ({e}); stderr: {}",
                program.display(),
                String::from_utf8_lossy(&out.stderr).trim()
            ))
        })?;
        let sol = read_solution(&text, cost.len(), block_dims)?;
        let reason = (!out.status.success()).then(|| format!("external solver exited with {}", out.status));
        Ok(RawSolve { w: sol.y, reason, iterations: 0, pinf: f64::NAN, dinf: f64::NAN, lower_bound: None })
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

fn unique() -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    COUNTER.fetch_add(1, Ordering::Relaxed)
}
