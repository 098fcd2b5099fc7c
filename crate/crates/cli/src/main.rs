//! `specref` command-line tool.
//!
//! Exit codes: 0 = NOT_REFUTED (or success), 1 = REFUTED (certificate
//! written) or a failed check, 2 = solver inconclusive or error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use specref::assembler::{assemble, export_sdpa, size_report};
use specref::experiments::{
    compare_witness, default_angles, dims_csv_row, dims_table, flat_csv_row, purity_check, run_flat, scan_boundary,
    scan_csv, standard_rows, FlatSpectraJob, KroneckerJob, LineStatus, ScanJob, DIMS_CSV_HEADER, FLAT_CSV_HEADER,
};
use specref::marginals::{Mode, ProblemFile, SpectrumSet};
use specref::permrep::Partition;
use specref::refuter::{
    refute, verify_certificate_with, Certificate, RefuteOptions, SolverChoice, Verdict, VerifyOptions, SOLVER_ENV,
};

const NOT_REFUTED: u8 = 0;
const REFUTED: u8 = 1;
const INCONCLUSIVE: u8 = 2;

#[derive(Parser)]
#[command(name = "specref", version, about = "Refute quantum marginal spectra with symmetry-reduced SDPs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Number of copies (hierarchy level).
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Height bound on Young diagrams; d >= k gives dimension-free results.
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Generator family: cycles or factorizing.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Trace-normalized optimum below -tol counts as a refutation.
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,
    /// embedded or file:PATH (a CSDP-compatible executable).
    #[arg(long, global = true, env = SOLVER_ENV, default_value = "embedded")]
    solver: SolverChoice,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; its meaning depends on the subcommand.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Refute the spectra in a problem file (certificate goes to --output).
    Refute { problem: PathBuf },
    /// Bisect the refutation boundary of rank-2 three-qubit marginals (CSV).
    ScanBoundary(ScanArgs),
    /// One flat-spectra cell for pure three- or four-partite states.
    FlatSpectra(FlatArgs),
    /// Variable counts of the naive and reduced programs (CSV).
    DimsTable {
        /// Rows as n,d,k separated by ';' (default: the standard table).
        #[arg(long)]
        rows: Option<String>,
    },
    /// Check both purity inequalities on random tripartite states.
    PurityCheck {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        seed: u64,
        /// Skip the comparison of refuter certificates with the stated witnesses.
        #[arg(long)]
        no_witness: bool,
    },
    /// Spectra λ/m, μ/m, ν/m on sites 1, 2 and 12; refuted means the
    /// Kronecker coefficient vanishes for all dilations.
    Kron {
        #[arg(long, value_name = "PARTITION")]
        lambda: Partition,
        #[arg(long, value_name = "PARTITION")]
        mu: Partition,
        #[arg(long, value_name = "PARTITION")]
        nu: Partition,
    },
    /// Re-check a certificate from scratch.
    VerifyCert {
        certificate: PathBuf,
        /// Check against this problem instead of the spectra stored in the certificate.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Write the level's reduced program in SDPA sparse format.
    ExportSdpa { problem: PathBuf },
}

#[derive(Args)]
struct ScanArgs {
    /// Fixed smaller eigenvalue of the BC marginal.
    #[arg(long, default_value_t = 0.5)]
    lambda_bc: f64,
    /// Number of equally spaced rays in (0, π/2).
    #[arg(long, default_value_t = 10)]
    lines: usize,
    /// Explicit ray angles in radians, comma separated (overrides --lines).
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<f64>>,
    /// Bisection tolerance on the ray parameter.
    #[arg(long, default_value_t = 1e-3)]
    precision: f64,
    /// Coarse samples per ray used to detect multiple crossings.
    #[arg(long, default_value_t = 4)]
    coarse: usize,
    /// Directory for the certificates found next to each boundary point.
    #[arg(long)]
    cert_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FlatArgs {
    /// 3 (ranks on AB, AC, BC) or 4 (ranks on AB, AC, AD).
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Three ranks, e.g. 3,2,2.
    #[arg(long, value_delimiter = ',', required = true)]
    ranks: Vec<usize>,
    /// Drop the purity constraint on the joint state.
    #[arg(long)]
    mixed: bool,
    /// Also prescribe the complementary marginals implied by purity.
    #[arg(long)]
    complements: bool,
}

impl Global {
    fn k_or(&self, file: Option<usize>) -> usize {
        self.k.or(file).unwrap_or(2)
    }

    fn d_or(&self, file: Option<usize>, k: usize) -> usize {
        self.d.or(file).unwrap_or(k)
    }

    fn mode_or(&self, file: Option<Mode>) -> Mode {
        self.mode.or(file).unwrap_or(Mode::Factorizing)
    }

    fn refute_options(&self) -> Result<RefuteOptions> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("--tol must be positive");
        }
        Ok(RefuteOptions { tol: self.tol, solver: self.solver.clone(), ..RefuteOptions::default() })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(INCONCLUSIVE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INCONCLUSIVE)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    match &cli.command {
        Command::Refute { problem } => {
            let file = load_problem(problem)?;
            let spectra = file.spectrum_set()?;
            let k = g.k_or(file.k);
            let verdict = solve(&spectra, g.d_or(file.d, k), k, g.mode_or(file.mode), g)?;
            report_verdict(&verdict, g.output.as_deref(), None)
        }
        Command::ScanBoundary(args) => scan(args, g),
        Command::FlatSpectra(args) => {
            let &[r1, r2, r3] = args.ranks.as_slice() else {
                bail!("--ranks needs exactly three values, got {}", args.ranks.len());
            };
            let k = g.k_or(None);
            let mut job = FlatSpectraJob::new(args.n, [r1, r2, r3], g.d_or(None, k), k);
            job.mode = g.mode_or(None);
            job.pure = !args.mixed;
            job.complements = args.complements;
            let row = run_flat(&job, &g.refute_options()?)?;
            report_verdict(&row.verdict, g.output.as_deref(), Some(format!("{FLAT_CSV_HEADER}\n{}", flat_csv_row(&row))))
        }
        Command::DimsTable { rows } => {
            let rows = match rows {
                Some(spec) => parse_rows(spec)?,
                None => standard_rows(),
            };
            let mut out = format!("{DIMS_CSV_HEADER}\n");
            for (label, r) in dims_table(&rows)? {
                out.push_str(&dims_csv_row(&label, &r));
                out.push('\n');
            }
            emit(&out, g.output.as_deref())?;
            Ok(0)
        }
        Command::PurityCheck { samples, seed, no_witness } => {
            let report = purity_check(*samples, *seed)?;
            let holds = report.holds(1e-9);
            let mut out = json!({ "holds": holds, "tolerance": 1e-9, "report": report });
            if !no_witness {
                let opts = g.refute_options()?;
                out["witnesses"] = json!([
                    compare_witness(2, [0.05, 0.05, 0.5], &opts)?,
                    compare_witness(4, [0.14, 0.14, 0.5], &opts)?,
                ]);
            }
            emit(&serde_json::to_string_pretty(&out)?, g.output.as_deref())?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Kron { lambda, mu, nu } => {
            let job = KroneckerJob::new(lambda.clone(), mu.clone(), nu.clone())?;
            let k = g.k_or(None);
            let d = g.d.unwrap_or_else(|| job.minimal_dimension().max(k));
            let verdict = solve(&job.problem()?, d, k, g.mode_or(None), g)?;
            let note = verdict.is_refuted().then(|| {
                format!("Kronecker coefficient g(t{lambda}, t{mu}, t{nu}) vanishes for all t >= 1")
            });
            report_verdict(&verdict, g.output.as_deref(), note)
        }
        Command::VerifyCert { certificate, problem, samples, seed } => {
            let cert = Certificate::load(certificate)
                .with_context(|| format!("reading certificate {}", certificate.display()))?;
            let spectra = match problem {
                Some(p) => load_problem(p)?.spectrum_set()?,
                None => cert.spectra.clone(),
            };
            let opts = VerifyOptions { sweep_samples: *samples, seed: *seed, ..VerifyOptions::default() };
            let report = verify_certificate_with(&cert, &spectra, &opts)?;
            print!("{report}");
            println!("{}", if report.passed() { "certificate VALID" } else { "certificate INVALID" });
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::ExportSdpa { problem } => {
            let file = load_problem(problem)?;
            let k = g.k_or(file.k);
            let d = g.d_or(file.d, k);
            let sdp = assemble(&file.spectrum_set()?, d, k, g.mode_or(file.mode))?;
            let path = g.output.clone().unwrap_or_else(|| PathBuf::from("problem.dat-s"));
            export_sdpa(&sdp, &path)?;
            eprintln!(
                "wrote {} ({} generators, {} blocks, N_sym = {})",
                path.display(),
                sdp.generators.len(),
                sdp.blocks.len(),
                size_report(sdp.n, d, k)?.n_sym
            );
            Ok(0)
        }
    }
}

fn load_problem(path: &Path) -> Result<ProblemFile> {
    ProblemFile::load(path).with_context(|| format!("reading problem {}", path.display()))
}

fn solve(spectra: &SpectrumSet, d: usize, k: usize, mode: Mode, g: &Global) -> Result<Verdict> {
    let sdp = assemble(spectra, d, k, mode)?;
    Ok(refute(&sdp, &g.refute_options()?)?)
}

/// Prints a summary, writes the certificate when refuted and maps the verdict
/// to an exit code.
fn report_verdict(verdict: &Verdict, output: Option<&Path>, extra: Option<String>) -> Result<u8> {
    let diagnostics = verdict.diagnostics();
    let mut summary = json!({ "verdict": verdict.label(), "diagnostics": diagnostics });
    let code = match verdict {
        Verdict::Refuted { certificate, .. } => {
            let path = output.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("certificate.json"));
            certificate.save(&path).with_context(|| format!("writing certificate {}", path.display()))?;
            summary["certificate"] = json!(path);
            summary["objective"] = json!(certificate.objective);
            summary["dimension_free"] = json!(certificate.dimension_free);
            REFUTED
        }
        Verdict::NotRefuted { .. } => NOT_REFUTED,
        Verdict::SolverInconclusive { reason, .. } => {
            summary["reason"] = json!(reason);
            INCONCLUSIVE
        }
    };
    if let Some(extra) = extra {
        println!("{extra}");
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(code)
}

fn scan(args: &ScanArgs, g: &Global) -> Result<u8> {
    let k = g.k_or(None);
    let angles = args.angles.clone().unwrap_or_else(|| default_angles(args.lines));
    let mut job = ScanJob::new(args.lambda_bc, angles, k, g.d_or(None, k), g.mode_or(None));
    job.tol = args.precision;
    job.coarse = args.coarse;
    job.refute = g.refute_options()?;
    let lines = scan_boundary(&job)?;
    if let Some(dir) = &args.cert_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, line) in lines.iter().enumerate() {
            if let Some(cert) = &line.certificate {
                cert.save(&dir.join(format!("line{i:03}.json")))?;
            }
        }
    }
    emit(&scan_csv(&job, &lines), g.output.as_deref())?;
    let clean = lines
        .iter()
        .all(|l| !matches!(l.status, LineStatus::Inconclusive | LineStatus::MultipleCrossings));
    Ok(if clean { 0 } else { INCONCLUSIVE })
}

fn parse_rows(spec: &str) -> Result<Vec<(String, usize, usize, usize)>> {
    spec.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| {
            let v: Vec<usize> = r
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("bad row {r:?}, expected n,d,k"))?;
            match v.as_slice() {
                &[n, d, k] => Ok((format!("n={n} d={d}"), n, d, k)),
                _ => bail!("bad row {r:?}, expected n,d,k"),
            }
        })
        .collect()
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
