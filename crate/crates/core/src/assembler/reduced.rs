use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};
use crate::solver::LmiProblem;

/// The dual program with the identity coefficient eliminated by trace
/// normalization.
///
/// With `T = Σ_blocks N` and `t_g = Σ_blocks tr B_g`, fixing `Σ tr F = T` gives
/// `y_id = 1 - Σ_{g≠id} z_g t_g / T`, and the program becomes
///
/// ```text
///   minimize 1 + c'·z   s.t.   I + Σ z_g A'_g ⪰ 0
///   A'_g = B_g - (t_g/T) I,    c'_g = q_g - t_g/T
/// ```
///
/// Variable `j` corresponds to generator `j + 1`.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    pub block_dims: Vec<usize>,
    pub total_trace: f64,
    /// `t_g` for every generator, identity included.
    pub traces: Vec<f64>,
    pub targets: Vec<f64>,
    pub cost: Vec<f64>,
    /// `mats[j][block]`
    pub mats: Vec<Vec<DMatrix<f64>>>,
}

impl ReducedForm {
    /// `blocks[block][generator]`; generator 0 must be the identity.
    pub fn new(targets: &[f64], blocks: &[Vec<DMatrix<f64>>]) -> Result<Self> {
        if targets.is_empty() {
            return invalid("no generators");
        }
        if blocks.is_empty() {
            return invalid("no blocks");
        }
        let g = targets.len();
        let mut block_dims = Vec::with_capacity(blocks.len());
        for b in blocks {
            if b.len() != g {
                return invalid("block coefficient count differs from number of targets");
            }
            let n = b[0].nrows();
            if b[0] != DMatrix::identity(n, n) {
                return invalid("first generator must be the identity");
            }
            block_dims.push(n);
        }
        let total_trace = block_dims.iter().sum::<usize>() as f64;
        let traces: Vec<f64> = (0..g).map(|i| blocks.iter().map(|b| b[i].trace()).sum()).collect();
        let cost = (1..g).map(|i| targets[i] - traces[i] / total_trace).collect();
        let mats = (1..g)
            .map(|i| {
                blocks
                    .iter()
                    .map(|b| {
                        let n = b[i].nrows();
                        &b[i] - DMatrix::identity(n, n) * (traces[i] / total_trace)
                    })
                    .collect()
            })
            .collect();
        Ok(ReducedForm { block_dims, total_trace, traces, targets: targets.to_vec(), cost, mats })
    }

    pub fn num_vars(&self) -> usize {
        self.mats.len()
    }

    /// Full coefficient vector `y` from reduced variables `z`.
    pub fn lift(&self, z: &[f64]) -> Vec<f64> {
        let shift: f64 = z.iter().zip(&self.traces[1..]).map(|(z, t)| z * t).sum::<f64>() / self.total_trace;
        std::iter::once(1.0 - shift).chain(z.iter().copied()).collect()
    }

    /// `1 + c'·z`, equal to `Σ y_g q_g` at `y = lift(z)` when `q_id = 1`.
    pub fn objective(&self, z: &[f64]) -> f64 {
        self.targets[0] + self.cost.iter().zip(z).map(|(c, z)| c * z).sum::<f64>()
    }

    /// `G_ij = Σ_blocks ⟨A'_i, A'_j⟩`.
    pub fn gram(&self) -> DMatrix<f64> {
        let m = self.num_vars();
        DMatrix::from_fn(m, m, |i, j| {
            self.mats[i].iter().zip(&self.mats[j]).map(|(a, b)| a.dot(b)).sum()
        })
    }

    /// As an [`LmiProblem`] in the solver's maximization form:
    /// `max -c'·z` s.t. `I - Σ z_j (-A'_j) ⪰ 0`.
    pub fn to_lmi(&self) -> LmiProblem {
        LmiProblem {
            block_dims: self.block_dims.clone(),
            c: self.block_dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
            a: self.mats.iter().map(|mj| mj.iter().map(|m| -m).collect()).collect(),
            b: DVector::from_iterator(self.cost.len(), self.cost.iter().map(|c| -c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_reproduces_block_combination() {
        let i1 = DMatrix::identity(1, 1);
        let i2 = DMatrix::identity(2, 2);
        let b1 = vec![i1.clone(), DMatrix::from_element(1, 1, -1.0)];
        let b2 = vec![i2.clone(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.5])];
        let rf = ReducedForm::new(&[1.0, 0.3], &[b1.clone(), b2.clone()]).unwrap();
        let z = [0.7];
        let y = rf.lift(&z);
        for (blk, b) in [b1, b2].iter().enumerate() {
            let f = &b[0] * y[0] + &b[1] * y[1];
            let g = DMatrix::identity(rf.block_dims[blk], rf.block_dims[blk]) + &rf.mats[0][blk] * z[0];
            assert!((f - g).amax() < 1e-14);
        }
        let direct = y[0] * 1.0 + y[1] * 0.3;
        assert!((rf.objective(&z) - direct).abs() < 1e-14);
        // total trace is preserved
        let tr: f64 = rf.mats[0].iter().map(|m| m.trace()).sum();
        assert!(tr.abs() < 1e-14);
    }

    #[test]
    fn requires_identity_first() {
        let b = vec![vec![DMatrix::from_element(1, 1, 2.0)]];
        assert!(ReducedForm::new(&[1.0], &b).is_err());
    }
}
