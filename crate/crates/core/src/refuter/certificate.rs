use std::path::Path;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::assembler::{Block, BlockSdp};
use crate::error::{Error, Result};
use crate::marginals::{Generator, Mode, SpectrumSet};

pub const CERTIFICATE_SCHEMA: &str = "specref-certificate/1";

/// An incompatibility witness: `Σ y_g B_g ⪰ 0` in every block while
/// `Σ y_g q_g < 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub mode: Mode,
    pub spectra: SpectrumSet,
    pub generators: Vec<Generator>,
    /// Human-readable generator labels, parallel to `generators`.
    #[serde(default)]
    pub labels: Vec<String>,
    pub y: Vec<f64>,
    pub targets: Vec<f64>,
    /// `Σ y_g q_g` after the identity shift.
    pub objective: f64,
    /// Smallest block eigenvalue after the identity shift.
    pub min_block_eig: f64,
    /// Weight added to the identity generator to make every block PSD.
    pub identity_shift: f64,
    /// Valid for every local dimension (`k <= d`).
    pub dimension_free: bool,
    #[serde(default)]
    pub solver: String,
}

/// True iff a level-`k` certificate built with height bound `d` holds in all
/// local dimensions.
pub fn dimension_free_flag(k: usize, d: usize) -> bool {
    k <= d
}

pub(crate) fn min_block_eigenvalue(blocks: &[Block], y: &[f64]) -> f64 {
    blocks
        .iter()
        .map(|b| SymmetricEigen::new(b.combine(y)).eigenvalues.min())
        .fold(f64::INFINITY, f64::min)
}

impl Certificate {
    /// Applies the identity shift `δ = max(0, -λ_min)` to a candidate `y`.
    pub fn from_coefficients(sdp: &BlockSdp, mut y: Vec<f64>, solver: &str) -> Result<Self> {
        if y.len() != sdp.generators.len() {
            return Err(Error::InvalidArgument("coefficient vector length differs from generator count".into()));
        }
        let raw_min = min_block_eigenvalue(&sdp.blocks, &y);
        let shift = (-raw_min).max(0.0);
        y[0] += shift;
        Ok(Certificate {
            schema: CERTIFICATE_SCHEMA.to_string(),
            n: sdp.n,
            d: sdp.d,
            k: sdp.k,
            mode: sdp.mode,
            spectra: sdp.spectra.clone(),
            labels: sdp.generators.iter().map(|g| g.to_string()).collect(),
            generators: sdp.generators.clone(),
            objective: sdp.objective(&y),
            min_block_eig: min_block_eigenvalue(&sdp.blocks, &y),
            targets: sdp.targets.clone(),
            y,
            identity_shift: shift,
            dimension_free: dimension_free_flag(sdp.k, sdp.d),
            solver: solver.to_string(),
        })
    }

    /// `y` of a generator, if present.
    pub fn coefficient(&self, g: &Generator) -> Option<f64> {
        self.generators.iter().position(|h| h == g).map(|i| self.y[i])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(text)?;
        if c.schema != CERTIFICATE_SCHEMA {
            return Err(Error::Parse(format!(
                "certificate schema {:?}, expected {CERTIFICATE_SCHEMA:?}",
                c.schema
            )));
        }
        Ok(c)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
