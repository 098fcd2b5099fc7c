use serde::Serialize;

use crate::assembler::assemble;
use crate::error::{invalid, Result};
use crate::marginals::{flat_spectrum, Mode, SpectrumSet, Subsystem};
use crate::refuter::{refute, RefuteOptions, Verdict};

/// Flat two-body marginals of ranks `r` on three pairs:
/// `AB, AC, BC` for `n = 3` and `AB, AC, AD` for `n = 4`.
#[derive(Clone, Debug, Serialize)]
pub struct FlatSpectraJob {
    pub n: usize,
    pub ranks: [usize; 3],
    pub d: usize,
    pub k: usize,
    pub mode: Mode,
    /// Adds the full system with spectrum `(1)`.
    pub pure: bool,
    /// For pure states also prescribes the complement of each pair with the
    /// same flat spectrum.
    pub complements: bool,
}

impl FlatSpectraJob {
    pub fn new(n: usize, ranks: [usize; 3], d: usize, k: usize) -> Self {
        FlatSpectraJob { n, ranks, d, k, mode: Mode::Factorizing, pure: true, complements: false }
    }

    pub fn pairs(&self) -> Result<Vec<Vec<usize>>> {
        match self.n {
            3 => Ok(vec![vec![1, 2], vec![1, 3], vec![2, 3]]),
            4 => Ok(vec![vec![1, 2], vec![1, 3], vec![1, 4]]),
            n => invalid(format!("flat-spectra jobs need n = 3 or 4, got {n}")),
        }
    }

    pub fn problem(&self) -> Result<SpectrumSet> {
        if self.ranks.contains(&0) {
            return invalid("ranks must be at least 1");
        }
        if self.complements && !self.pure {
            return invalid("complement marginals only follow from purity");
        }
        let mut entries = Vec::new();
        for (pair, &r) in self.pairs()?.into_iter().zip(&self.ranks) {
            let a = Subsystem::new(pair)?;
            if r > self.d.pow(a.len() as u32) {
                return invalid(format!("rank {r} does not fit on {a} with d = {}", self.d));
            }
            if self.complements {
                let rest: Vec<usize> = (1..=self.n).filter(|s| !a.contains(*s)).collect();
                let c = Subsystem::new(rest)?;
                if r > self.d.pow(c.len() as u32) {
                    return invalid(format!("rank {r} does not fit on complement {c} with d = {}", self.d));
                }
                entries.push((c, flat_spectrum(r)));
            }
            entries.push((a, flat_spectrum(r)));
        }
        if self.pure {
            entries.push((Subsystem::new((1..=self.n).collect())?, vec![1.0]));
        }
        entries.sort_by(|x, y| (x.0.len(), &x.0).cmp(&(y.0.len(), &y.0)));
        SpectrumSet::new(self.n, entries)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatRow {
    pub job: FlatSpectraJob,
    pub verdict: Verdict,
}

pub fn run_flat(job: &FlatSpectraJob, opts: &RefuteOptions) -> Result<FlatRow> {
    let sdp = assemble(&job.problem()?, job.d, job.k, job.mode)?;
    Ok(FlatRow { job: job.clone(), verdict: refute(&sdp, opts)? })
}

pub const FLAT_CSV_HEADER: &str = "n,r1,r2,r3,d,k,mode,pure,complements,verdict,value";

pub fn flat_csv_row(row: &FlatRow) -> String {
    let j = &row.job;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:.6e}",
        j.n,
        j.ranks[0],
        j.ranks[1],
        j.ranks[2],
        j.d,
        j.k,
        j.mode,
        j.pure,
        j.complements,
        row.verdict.label(),
        row.verdict.diagnostics().value
    )
}
