//! Solving the block SDP, extracting certificates and checking them
//! independently of the solver.

mod certificate;
mod dual;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::assembler::BlockSdp;
use crate::error::{Error, Result};
use crate::marginals::Mode;
use crate::solver::SolverSettings;

pub use certificate::{dimension_free_flag, Certificate, CERTIFICATE_SCHEMA};
pub use dual::{minimize_dual, DualOutcome, DualStatus};
pub use verify::{random_state_sweep, verify_certificate, verify_certificate_with, Check, VerificationReport, VerifyOptions};

/// Environment variable consulted by the CLI for the default solver.
pub const SOLVER_ENV: &str = "SPECREF_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SolverChoice {
    #[default]
    Embedded,
    /// External program called as `PATH problem.dat-s solution.sol`.
    File(PathBuf),
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "embedded" => Ok(SolverChoice::Embedded),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(SolverChoice::File(PathBuf::from(path))),
                _ => Err(Error::Parse(format!("solver must be 'embedded' or 'file:PATH', got {s:?}"))),
            },
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverChoice::Embedded => write!(f, "embedded"),
            SolverChoice::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefuteOptions {
    /// A trace-normalized optimum below `-tol` counts as a refutation.
    pub tol: f64,
    pub solver: SolverChoice,
    pub settings: SolverSettings,
    pub verify: VerifyOptions,
}

impl Default for RefuteOptions {
    fn default() -> Self {
        RefuteOptions {
            tol: 1e-7,
            solver: SolverChoice::Embedded,
            settings: SolverSettings::default(),
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelDiagnostics {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub mode: Mode,
    pub generators: usize,
    pub blocks: usize,
    /// Optimal value of `Σ y q` under the trace normalization `Σ tr F = Σ N`.
    pub value: f64,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub lineality: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Refuted { certificate: Box<Certificate>, diagnostics: LevelDiagnostics },
    /// No certificate exists at this level; says nothing about higher levels.
    NotRefuted { diagnostics: LevelDiagnostics },
    SolverInconclusive { reason: String, diagnostics: LevelDiagnostics },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_not_refuted(&self) -> bool {
        matches!(self, Verdict::NotRefuted { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Refuted { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    pub fn diagnostics(&self) -> &LevelDiagnostics {
        match self {
            Verdict::Refuted { diagnostics, .. }
            | Verdict::NotRefuted { diagnostics }
            | Verdict::SolverInconclusive { diagnostics, .. } => diagnostics,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Refuted { .. } => "REFUTED",
            Verdict::NotRefuted { .. } => "NOT_REFUTED",
            Verdict::SolverInconclusive { .. } => "SOLVER_INCONCLUSIVE",
        }
    }
}

/// Solves the level of `sdp`. A `Refuted` verdict always carries a
/// certificate that passed [`verify_certificate_with`] under `opts.verify`.
pub fn refute(sdp: &BlockSdp, opts: &RefuteOptions) -> Result<Verdict> {
    let outcome = minimize_dual(&sdp.targets, &sdp.coefficient_blocks(), opts)?;
    let diagnostics = LevelDiagnostics {
        n: sdp.n,
        d: sdp.d,
        k: sdp.k,
        mode: sdp.mode,
        generators: sdp.generators.len(),
        blocks: sdp.blocks.len(),
        value: outcome.value,
        iterations: outcome.iterations,
        primal_infeasibility: outcome.primal_infeasibility,
        dual_infeasibility: outcome.dual_infeasibility,
        lineality: outcome.lineality,
    };
    match outcome.status {
        DualStatus::Refuted => {
            let y = outcome.y.expect("refuted outcome carries coefficients");
            let cert = Certificate::from_coefficients(sdp, y, &opts.solver.to_string())?;
            let report = verify_certificate_with(&cert, &sdp.spectra, &opts.verify)?;
            if report.passed() {
                Ok(Verdict::Refuted { certificate: Box::new(cert), diagnostics })
            } else {
                let failed: Vec<String> = report
                    .failures()
                    .iter()
                    .map(|c| format!("{} ({:.3e} vs {:.3e})", c.name, c.value, c.threshold))
                    .collect();
                Ok(Verdict::SolverInconclusive {
                    reason: format!("candidate certificate failed verification: {}", failed.join(", ")),
                    diagnostics,
                })
            }
        }
        DualStatus::NotRefuted => Ok(Verdict::NotRefuted { diagnostics }),
        DualStatus::Inconclusive { reason } => Ok(Verdict::SolverInconclusive { reason, diagnostics }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::assemble;
    use crate::marginals::{SpectrumSet, Subsystem};

    fn rank2(l_ab: f64, l_ac: f64, l_bc: f64) -> SpectrumSet {
        let sub = |v: &[usize]| Subsystem::new(v.to_vec()).unwrap();
        SpectrumSet::new(
            3,
            vec![
                (sub(&[1, 2]), vec![1.0 - l_ab, l_ab]),
                (sub(&[1, 3]), vec![1.0 - l_ac, l_ac]),
                (sub(&[2, 3]), vec![1.0 - l_bc, l_bc]),
            ],
        )
        .unwrap()
    }

    fn quick() -> RefuteOptions {
        let mut o = RefuteOptions::default();
        o.verify.sweep_samples = 100;
        o
    }

    #[test]
    fn solver_choice_parsing() {
        assert_eq!("embedded".parse::<SolverChoice>().unwrap(), SolverChoice::Embedded);
        assert_eq!("file:/bin/x".parse::<SolverChoice>().unwrap(), SolverChoice::File("/bin/x".into()));
        assert!("file:".parse::<SolverChoice>().is_err());
        assert!("mosek".parse::<SolverChoice>().is_err());
    }

    #[test]
    fn two_copy_refutation() {
        let s = rank2(0.0, 0.0, 0.5);
        let v = refute(&assemble(&s, 2, 2, Mode::Cycles).unwrap(), &quick()).unwrap();
        let cert = v.certificate().expect("refuted");
        assert!(cert.objective < 0.0);
        assert!(cert.dimension_free);
        assert!(verify_certificate(cert, &s).unwrap().passed());
    }

    #[test]
    fn flat_marginals_not_refuted() {
        let s = rank2(0.5, 0.5, 0.5);
        for k in 2..=3 {
            let v = refute(&assemble(&s, 2, k, Mode::Cycles).unwrap(), &quick()).unwrap();
            assert!(v.is_not_refuted(), "k={k}: {v:?}");
        }
    }

    #[test]
    fn corrupted_certificate_fails() {
        let s = rank2(0.0, 0.0, 0.5);
        let v = refute(&assemble(&s, 2, 2, Mode::Cycles).unwrap(), &quick()).unwrap();
        let mut cert = v.certificate().unwrap().clone();
        cert.y[1] += 0.1;
        let report = verify_certificate(&cert, &s).unwrap();
        assert!(!report.passed());
        assert!(report.failures().iter().any(|c| c.name == "psd" || c.name == "objective"));
    }

    #[test]
    fn certificate_json_round_trip() {
        let s = rank2(0.0, 0.05, 0.5);
        let v = refute(&assemble(&s, 2, 2, Mode::Cycles).unwrap(), &quick()).unwrap();
        let cert = v.certificate().unwrap();
        let back = Certificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(&back, cert);
        let mut bad = serde_json::to_value(cert).unwrap();
        bad["schema"] = "other/1".into();
        assert!(Certificate::from_json(&bad.to_string()).is_err());
    }
}
