use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

use super::{Mode, SpectrumSet, Subsystem};

pub const PROBLEM_VERSION: u32 = 1;

/// On-disk problem description (JSON).
///
/// ```json
/// {
///   "version": 1,
///   "n": 3, "d": 2, "k": 2, "mode": "cycles",
///   "subsystems": [[1, 2], [1, 3], [2, 3]],
///   "spectra": { "1,2": [1.0, 0.0], "1,3": [1.0, 0.0], "2,3": [0.5, 0.5] }
/// }
/// ```
///
/// `d`, `k` and `mode` may be omitted and supplied on the command line instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub subsystems: Vec<Vec<usize>>,
    pub spectra: BTreeMap<String, Vec<f64>>,
}

fn default_version() -> u32 {
    PROBLEM_VERSION
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: ProblemFile = serde_json::from_str(text)?;
        if p.version != PROBLEM_VERSION {
            return Err(Error::Parse(format!("unsupported problem version {}", p.version)));
        }
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        ProblemFile::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_spectra(spectra: &SpectrumSet, d: Option<usize>, k: Option<usize>, mode: Option<Mode>) -> Self {
        ProblemFile {
            version: PROBLEM_VERSION,
            n: spectra.n(),
            d,
            k,
            mode,
            subsystems: spectra.entries().iter().map(|(a, _)| a.sites().to_vec()).collect(),
            spectra: spectra
                .entries()
                .iter()
                .map(|(a, mu)| (a.key(), mu.clone()))
                .collect(),
        }
    }

    /// Validated spectra in the order of `subsystems`.
    pub fn spectrum_set(&self) -> Result<SpectrumSet> {
        let mut keyed: BTreeMap<Subsystem, &Vec<f64>> = BTreeMap::new();
        for (key, mu) in &self.spectra {
            let a: Subsystem = key.parse()?;
            if keyed.insert(a.clone(), mu).is_some() {
                return invalid(format!("subsystem {a} given twice in spectra"));
            }
        }
        let mut entries = Vec::with_capacity(self.subsystems.len());
        for sites in &self.subsystems {
            let a = Subsystem::new(sites.clone())?;
            let Some(mu) = keyed.remove(&a) else {
                return invalid(format!("no spectrum for subsystem {a}"));
            };
            entries.push((a, mu.clone()));
        }
        if let Some(extra) = keyed.keys().next() {
            return invalid(format!("spectrum for {extra} which is not in subsystems"));
        }
        SpectrumSet::new(self.n, entries)
    }
}
