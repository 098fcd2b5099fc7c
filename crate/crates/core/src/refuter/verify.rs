use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembler::{assemble_generators, AssembleOptions};
use crate::error::Result;
use crate::marginals::{SpectrumSet, Subsystem};
use crate::oracle::{partial_trace, random_density, CMatrix};

use super::certificate::{min_block_eigenvalue, Certificate, CERTIFICATE_SCHEMA};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Smallest admissible block eigenvalue.
    pub psd_eps: f64,
    pub sweep_samples: usize,
    /// Smallest admissible witness value on a random state.
    pub sweep_tol: f64,
    pub seed: u64,
    pub block_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            psd_eps: 1e-9,
            sweep_samples: 1000,
            sweep_tol: 1e-7,
            seed: 0x5eed,
            block_cap: AssembleOptions::default().block_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<14} {}  value={:.3e} threshold={:.3e}  {}",
                c.name,
                if c.passed { "ok  " } else { "FAIL" },
                c.value,
                c.threshold,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn spectra_match(a: &SpectrumSet, b: &SpectrumSet) -> bool {
    a.n() == b.n()
        && a.entries().len() == b.entries().len()
        && a.entries().iter().all(|(sub, mu)| {
            b.spectrum(sub).is_some_and(|nu| {
                let len = mu.len().max(nu.len());
                (0..len).all(|i| (mu.get(i).unwrap_or(&0.0) - nu.get(i).unwrap_or(&0.0)).abs() <= 1e-12)
            })
        })
}

/// Checks a certificate against `spectra` from scratch with default options.
pub fn verify_certificate(cert: &Certificate, spectra: &SpectrumSet) -> Result<VerificationReport> {
    verify_certificate_with(cert, spectra, &VerifyOptions::default())
}

pub fn verify_certificate_with(
    cert: &Certificate,
    spectra: &SpectrumSet,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let meta_ok = cert.schema == CERTIFICATE_SCHEMA
        && spectra_match(&cert.spectra, spectra)
        && cert.y.len() == cert.generators.len()
        && cert.n == spectra.n()
        && cert.generators.iter().all(|g| g.k() == cert.k)
        && cert.generators.first().is_some_and(|g| g.is_identity());
    checks.push(Check {
        name: "metadata",
        passed: meta_ok,
        value: if meta_ok { 0.0 } else { 1.0 },
        threshold: 0.0,
        detail: "schema, spectra, generator list and k agree".into(),
    });
    if !meta_ok {
        return Ok(VerificationReport { checks });
    }

    let sdp = assemble_generators(
        spectra,
        cert.d,
        cert.k,
        cert.mode,
        cert.generators.clone(),
        &AssembleOptions { block_cap: opts.block_cap },
    )?;
    let min_eig = min_block_eigenvalue(&sdp.blocks, &cert.y);
    checks.push(Check {
        name: "psd",
        passed: min_eig >= -opts.psd_eps,
        value: min_eig,
        threshold: -opts.psd_eps,
        detail: format!("minimum eigenvalue over {} rebuilt blocks", sdp.blocks.len()),
    });

    let objective = sdp.objective(&cert.y);
    let scale = 1.0 + cert.y.iter().map(|v| v.abs()).sum::<f64>();
    let consistent = (objective - cert.objective).abs() <= 1e-9 * scale;
    checks.push(Check {
        name: "objective",
        passed: objective < 0.0 && consistent,
        value: objective,
        threshold: 0.0,
        detail: format!("recomputed Σ y q (stored {:.6e})", cert.objective),
    });

    let shift = (-min_eig).max(0.0);
    checks.push(Check {
        name: "clean_up",
        passed: objective + shift < 0.0,
        value: objective + shift,
        threshold: 0.0,
        detail: format!("objective after identity shift δ = {shift:.3e}"),
    });

    if opts.sweep_samples > 0 {
        let worst = random_state_sweep(cert, opts)?;
        checks.push(Check {
            name: "random_states",
            passed: worst >= -opts.sweep_tol,
            value: worst,
            threshold: -opts.sweep_tol,
            detail: format!("minimum Σ y q(ρ) over {} random states (d = {})", opts.sweep_samples, cert.d),
        });
    }
    Ok(VerificationReport { checks })
}

/// Minimum of `Σ y_g q_g(ρ)` over Hilbert-Schmidt random states.
pub fn random_state_sweep(cert: &Certificate, opts: &VerifyOptions) -> Result<f64> {
    let dims = vec![cert.d; cert.n];
    let mut subsystems: Vec<Subsystem> = cert
        .generators
        .iter()
        .flat_map(|g| g.atoms().iter().map(|a| a.subsystem.clone()))
        .collect();
    subsystems.sort();
    subsystems.dedup();
    let values = (0..opts.sweep_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
            let rho = random_density(&dims, &mut rng);
            witness_value(cert, &rho, &dims, &subsystems)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

fn witness_value(cert: &Certificate, rho: &CMatrix, dims: &[usize], subsystems: &[Subsystem]) -> Result<f64> {
    // powers[A][ℓ] = tr(ρ_A^ℓ)
    let mut powers: BTreeMap<&Subsystem, Vec<f64>> = BTreeMap::new();
    for a in subsystems {
        let keep: Vec<usize> = a.sites().iter().map(|s| s - 1).collect();
        let m = partial_trace(rho, dims, &keep)?;
        let mut p = m.clone();
        let mut traces = vec![1.0, p.trace().re];
        for _ in 2..=cert.k {
            p = &p * &m;
            traces.push(p.trace().re);
        }
        powers.insert(a, traces);
    }
    Ok(cert
        .generators
        .iter()
        .zip(&cert.y)
        .map(|(g, y)| y * g.atoms().iter().map(|a| powers[&a.subsystem][a.len()]).product::<f64>())
        .sum())
}
