use serde::Serialize;

use crate::error::{invalid, Result};
use crate::marginals::{SpectrumSet, Subsystem};
use crate::permrep::Partition;

/// Spectra `λ/m` on site 1, `μ/m` on site 2 and `ν/m` on both sites. If
/// these are incompatible then the Kronecker coefficient `g(tλ, tμ, tν)`
/// vanishes for every `t >= 1`.
#[derive(Clone, Debug, Serialize)]
pub struct KroneckerJob {
    pub lambda: Partition,
    pub mu: Partition,
    pub nu: Partition,
}

impl KroneckerJob {
    pub fn new(lambda: Partition, mu: Partition, nu: Partition) -> Result<Self> {
        let m = lambda.weight();
        if mu.weight() != m || nu.weight() != m {
            return invalid(format!("partitions {lambda}, {mu}, {nu} have different weights"));
        }
        Ok(KroneckerJob { lambda, mu, nu })
    }

    pub fn weight(&self) -> usize {
        self.lambda.weight()
    }

    pub fn problem(&self) -> Result<SpectrumSet> {
        let m = self.weight() as f64;
        let norm = |p: &Partition| p.parts().iter().map(|&x| x as f64 / m).collect::<Vec<_>>();
        SpectrumSet::new(
            2,
            vec![
                (Subsystem::new(vec![1])?, norm(&self.lambda)),
                (Subsystem::new(vec![2])?, norm(&self.mu)),
                (Subsystem::new(vec![1, 2])?, norm(&self.nu)),
            ],
        )
    }

    /// Smallest local dimension holding all three spectra.
    pub fn minimal_dimension(&self) -> usize {
        let joint = self.nu.height();
        let mut d = self.lambda.height().max(self.mu.height()).max(1);
        while d * d < joint {
            d += 1;
        }
        d
    }
}
