use rayon::prelude::*;
use serde::Serialize;

use crate::assembler::{assemble, BlockSdp};
use crate::error::{invalid, Result};
use crate::marginals::{Mode, SpectrumSet, Subsystem};
use crate::refuter::{refute, Certificate, RefuteOptions, Verdict};

/// Three qubits with rank-2 marginals on AB, AC, BC with smaller eigenvalues
/// `λ_AB, λ_AC, λ_BC ∈ [0, ½]`.
pub fn rank2_triple(l_ab: f64, l_ac: f64, l_bc: f64) -> Result<SpectrumSet> {
    for l in [l_ab, l_ac, l_bc] {
        if !(0.0..=0.5).contains(&l) {
            return invalid(format!("eigenvalue {l} outside [0, 1/2]"));
        }
    }
    let sub = |v: &[usize]| Subsystem::new(v.to_vec());
    SpectrumSet::new(
        3,
        vec![
            (sub(&[1, 2])?, vec![1.0 - l_ab, l_ab]),
            (sub(&[1, 3])?, vec![1.0 - l_ac, l_ac]),
            (sub(&[2, 3])?, vec![1.0 - l_bc, l_bc]),
        ],
    )
}

/// Bisection of the refutation boundary along rays in the `(λ_AB, λ_AC)` plane
/// at fixed `λ_BC`. Ray `θ` is `(½ - r cos θ, ½ - r sin θ)`, `r ∈ [0, ½ / max(cos θ, sin θ)]`.
#[derive(Clone, Debug)]
pub struct ScanJob {
    pub lambda_bc: f64,
    /// Ray angles in `[0, π/2]`.
    pub angles: Vec<f64>,
    pub k: usize,
    pub d: usize,
    pub mode: Mode,
    pub tol: f64,
    /// Equally spaced samples per ray used to detect non-monotone lines.
    pub coarse: usize,
    pub refute: RefuteOptions,
}

impl ScanJob {
    pub fn new(lambda_bc: f64, angles: Vec<f64>, k: usize, d: usize, mode: Mode) -> Self {
        ScanJob { lambda_bc, angles, k, d, mode, tol: 1e-3, coarse: 4, refute: RefuteOptions::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return invalid("bisection tolerance must be positive");
        }
        if !(0.0..=0.5).contains(&self.lambda_bc) {
            return invalid("lambda_bc must lie in [0, 1/2]");
        }
        if self.angles.iter().any(|a| !(0.0..=std::f64::consts::FRAC_PI_2).contains(a)) {
            return invalid("ray angles must lie in [0, pi/2]");
        }
        if self.coarse == 0 {
            return invalid("need at least one coarse sample");
        }
        Ok(())
    }
}

/// `count` ray angles strictly inside `(0, π/2)` at cell midpoints.
pub fn default_angles(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| (i as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / count as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStatus {
    Boundary,
    /// Not refuted anywhere on the ray; `r` is the ray end.
    NoCrossing,
    /// Refuted already at `r = 0`.
    RefutedAtCenter,
    /// Coarse samples switch between verdicts more than once.
    MultipleCrossings,
    Inconclusive,
}

impl LineStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            LineStatus::Boundary => "boundary",
            LineStatus::NoCrossing => "no_crossing",
            LineStatus::RefutedAtCenter => "refuted_at_center",
            LineStatus::MultipleCrossings => "multiple_crossings",
            LineStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanLine {
    pub angle: f64,
    pub lambda_bc: f64,
    pub r: f64,
    pub lambda_ab: f64,
    pub lambda_ac: f64,
    pub status: LineStatus,
    pub solves: usize,
    pub note: String,
    /// Certificate at the refuted end of the final bracket.
    #[serde(skip)]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Copy, PartialEq)]
enum Point {
    Refuted,
    NotRefuted,
    Inconclusive,
}

fn ray_point(angle: f64, r: f64) -> (f64, f64) {
    ((0.5 - r * angle.cos()).clamp(0.0, 0.5), (0.5 - r * angle.sin()).clamp(0.0, 0.5))
}

fn ray_end(angle: f64) -> f64 {
    0.5 / angle.cos().max(angle.sin())
}

/// Refutes one point of the rank-2 family with blocks assembled beforehand.
fn evaluate(template: &BlockSdp, l_ab: f64, l_ac: f64, l_bc: f64, opts: &RefuteOptions) -> Result<(Point, Verdict)> {
    let sdp = template.with_spectra(&rank2_triple(l_ab, l_ac, l_bc)?)?;
    let v = refute(&sdp, opts)?;
    let p = match &v {
        Verdict::Refuted { .. } => Point::Refuted,
        Verdict::NotRefuted { .. } => Point::NotRefuted,
        Verdict::SolverInconclusive { .. } => Point::Inconclusive,
    };
    Ok((p, v))
}

fn scan_line_with(job: &ScanJob, template: &BlockSdp, angle: f64) -> Result<ScanLine> {
    let r_max = ray_end(angle);
    let mut solves = 0;
    let mut at = |r: f64| {
        solves += 1;
        let (a, b) = ray_point(angle, r);
        evaluate(template, a, b, job.lambda_bc, &job.refute)
    };
    let mut samples = Vec::with_capacity(job.coarse + 1);
    for i in 0..=job.coarse {
        let r = r_max * i as f64 / job.coarse as f64;
        samples.push((r, at(r)?));
    }
    let finish = |r: f64, status: LineStatus, note: String, cert: Option<Certificate>, solves: usize| {
        let (a, b) = ray_point(angle, r);
        ScanLine {
            angle,
            lambda_bc: job.lambda_bc,
            r,
            lambda_ab: a,
            lambda_ac: b,
            status,
            solves,
            note,
            certificate: cert,
        }
    };

    let kinds: Vec<Point> = samples.iter().map(|(_, (p, _))| *p).collect();
    if kinds.contains(&Point::Inconclusive) {
        let i = kinds.iter().position(|p| *p == Point::Inconclusive).unwrap_or(0);
        let reason = match &samples[i].1 .1 {
            Verdict::SolverInconclusive { reason, .. } => reason.clone(),
            _ => String::new(),
        };
        return Ok(finish(samples[i].0, LineStatus::Inconclusive, format!("coarse sample: {reason}"), None, samples.len()));
    }
    let switches = kinds.windows(2).filter(|w| w[0] != w[1]).count();
    if switches > 1 || (switches == 1 && kinds[0] == Point::Refuted) {
        let pattern: String = kinds.iter().map(|p| if *p == Point::Refuted { 'R' } else { 'N' }).collect();
        return Ok(finish(f64::NAN, LineStatus::MultipleCrossings, format!("coarse pattern {pattern}"), None, samples.len()));
    }
    if kinds[0] == Point::Refuted {
        let cert = samples[0].1 .1.certificate().cloned();
        return Ok(finish(0.0, LineStatus::RefutedAtCenter, String::new(), cert, samples.len()));
    }
    let Some(first_r) = kinds.iter().position(|p| *p == Point::Refuted) else {
        return Ok(finish(r_max, LineStatus::NoCrossing, String::new(), None, samples.len()));
    };
    let mut lo = samples[first_r - 1].0;
    let mut hi = samples[first_r].0;
    let mut cert = samples[first_r].1 .1.certificate().cloned();
    drop(samples);
    let mut solves_bisect = 0;
    while hi - lo > job.tol {
        let mid = 0.5 * (lo + hi);
        solves_bisect += 1;
        let (a, b) = ray_point(angle, mid);
        let (p, v) = evaluate(template, a, b, job.lambda_bc, &job.refute)?;
        match p {
            Point::Refuted => {
                hi = mid;
                cert = v.certificate().cloned();
            }
            Point::NotRefuted => lo = mid,
            Point::Inconclusive => {
                let reason = match &v {
                    Verdict::SolverInconclusive { reason, .. } => reason.as_str(),
                    _ => "",
                };
                return Ok(finish(
                    mid,
                    LineStatus::Inconclusive,
                    format!("bisection stopped in [{lo:.6}, {hi:.6}]: {reason}"),
                    None,
                    job.coarse + 1 + solves_bisect,
                ));
            }
        }
    }
    Ok(finish(0.5 * (lo + hi), LineStatus::Boundary, String::new(), cert, job.coarse + 1 + solves_bisect))
}

/// Scans every ray of `job`; lines are solved in parallel, output keeps ray order.
pub fn scan_boundary(job: &ScanJob) -> Result<Vec<ScanLine>> {
    job.validate()?;
    let template = assemble(&rank2_triple(0.5, 0.5, job.lambda_bc)?, job.d, job.k, job.mode)?;
    job.angles.par_iter().map(|&a| scan_line_with(job, &template, a)).collect()
}

pub const SCAN_CSV_HEADER: &str = "lambda_bc,angle,r,lambda_ab,lambda_ac,k,d,mode,status,solves,note";

pub fn scan_csv(job: &ScanJob, lines: &[ScanLine]) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for l in lines {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{},{},{},{}\n",
            l.lambda_bc,
            l.angle,
            l.r,
            l.lambda_ab,
            l.lambda_ac,
            job.k,
            job.d,
            job.mode,
            l.status.as_str(),
            l.solves,
            l.note.replace(',', ";")
        ));
    }
    out
}

/// Left-hand side of the two-copy boundary relation,
/// `(λ_AB-½)² + (λ_AC-½)² - (λ_BC-½)²`; the boundary sits at `¼`.
pub fn two_copy_lhs(l_ab: f64, l_ac: f64, l_bc: f64) -> f64 {
    (l_ab - 0.5).powi(2) + (l_ac - 0.5).powi(2) - (l_bc - 0.5).powi(2)
}

/// Root `λ` of `2x² - 2b x⁴ = c` with `x = ½ - λ` on the slice
/// `λ_AB = λ_AC`, `λ_BC = ½`.
pub fn four_copy_symmetric_root(b: f64, c: f64) -> f64 {
    let x2 = (1.0 - (1.0 - 2.0 * b * c).sqrt()) / (2.0 * b);
    0.5 - x2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(two_copy_lhs(0.0, 0.5, 0.5), 0.25);
        let l = four_copy_symmetric_root(0.393931, 0.225380);
        let x = 0.5 - l;
        assert!((2.0 * x * x - 2.0 * 0.393931 * x.powi(4) - 0.225380).abs() < 1e-12);
        assert!((l - 0.1562).abs() < 1e-3);
    }

    #[test]
    fn rays_stay_in_domain() {
        for a in default_angles(7) {
            let (x, y) = ray_point(a, ray_end(a));
            assert!((0.0..=0.5).contains(&x) && (0.0..=0.5).contains(&y));
            assert!(x.min(y) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_job() {
        let mut job = ScanJob::new(0.5, vec![0.3], 2, 2, Mode::Cycles);
        job.tol = 0.0;
        assert!(job.validate().is_err());
        assert!(rank2_triple(0.6, 0.1, 0.1).is_err());
    }

    #[test]
    fn two_copy_line() {
        let mut job = ScanJob::new(0.5, vec![std::f64::consts::FRAC_PI_4], 2, 2, Mode::Cycles);
        job.refute.verify.sweep_samples = 50;
        let lines = scan_boundary(&job).unwrap();
        assert_eq!(lines[0].status, LineStatus::Boundary);
        let l = &lines[0];
        assert!((two_copy_lhs(l.lambda_ab, l.lambda_ac, l.lambda_bc) - 0.25).abs() < 2e-3);
        assert!(l.certificate.is_some());
    }
}
