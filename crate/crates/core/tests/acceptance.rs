//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails. Run with
//! `cargo test --release -p specref --test acceptance`.

use std::f64::consts::FRAC_PI_4;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specref::assembler::{assemble, size_report};
use specref::experiments::{
    four_copy_symmetric_root, purity_check, rank2_triple, run_flat, scan_boundary, two_copy_lhs, FlatSpectraJob,
    KroneckerJob, LineStatus, ScanJob, ALPHA, B, C,
};
use specref::marginals::{Mode, SpectrumSet, Subsystem};
use specref::oracle::{dense_dual_minimize, dense_generator, DEFAULT_DENSE_CAP};
use specref::permrep::{character_mn, enumerate_partitions, rep_matrix, Partition, Permutation};
use specref::refuter::{refute, verify_certificate, Certificate, DualStatus, RefuteOptions, Verdict};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn p(v: &[usize]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

fn sub(v: &[usize]) -> Subsystem {
    Subsystem::new(v.to_vec()).unwrap()
}

/// Refutation options for the search; certificates are re-verified with the
/// full sweep separately.
fn search_opts() -> RefuteOptions {
    let mut o = RefuteOptions::default();
    o.verify.sweep_samples = 100;
    o
}

fn representation_engine() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_hom: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    let mut worst_char: f64 = 0.0;
    for k in 1..=5 {
        let all = Permutation::all(k);
        for lam in enumerate_partitions(k, k).unwrap() {
            let dim = lam.hook_dimension();
            for _ in 0..200 {
                let s = &all[rng.random_range(0..all.len())];
                let t = &all[rng.random_range(0..all.len())];
                let lhs = rep_matrix(&lam, &s.compose(t)).unwrap();
                let rhs = rep_matrix(&lam, s).unwrap() * rep_matrix(&lam, t).unwrap();
                worst_hom = worst_hom.max((lhs - rhs).amax());
            }
            for s in &all {
                let m = rep_matrix(&lam, s).unwrap();
                worst_orth = worst_orth.max((m.transpose() * &m - DMatrix::identity(dim, dim)).amax());
                let chi = character_mn(&lam, &s.cycle_type()).unwrap() as f64;
                worst_char = worst_char.max((m.trace() - chi).abs());
            }
        }
    }
    let mut sums_ok = true;
    for k in 1..=7 {
        let total: usize = enumerate_partitions(k, k).unwrap().iter().map(|l| l.hook_dimension().pow(2)).sum();
        sums_ok &= total == (1..=k).product::<usize>();
    }
    outcome(
        worst_hom <= 1e-12 && worst_orth <= 1e-12 && worst_char <= 1e-10 && sums_ok,
        format!(
            "homomorphism {worst_hom:.1e}, orthogonality {worst_orth:.1e}, characters {worst_char:.1e}, Σdim²=k! {sums_ok}"
        ),
    )
}

fn size_table() -> Outcome {
    // (n, d, k, N_sym, blocks, max block)
    let rows = [
        (2, 2, 2, 4, 4, 1),
        (2, 2, 3, 17, 4, 4),
        (2, 2, 4, 116, 9, 9),
        (2, 2, 5, 932, 9, 25),
        (3, 2, 2, 8, 8, 1),
        (3, 2, 3, 76, 8, 8),
        (3, 2, 4, 1480, 27, 27),
        (4, 2, 2, 16, 16, 1),
        (4, 2, 3, 353, 16, 16),
        (2, 3, 3, 26, 9, 4),
        (2, 3, 4, 305, 16, 9),
        (3, 3, 3, 140, 27, 8),
    ];
    let mut bad = Vec::new();
    for (n, d, k, n_sym, blocks, max_block) in rows {
        let r = size_report(n, d, k).unwrap();
        if (r.n_sym, r.block_count, r.max_block) != (n_sym, blocks, max_block) {
            bad.push(format!("(n={n},d={d},k={k}) got {} {} {}", r.n_sym, r.block_count, r.max_block));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { format!("{} rows match", rows.len()) } else { bad.join("; ") })
}

fn random_triple(rng: &mut ChaCha8Rng) -> SpectrumSet {
    rank2_triple(rng.random_range(0.0..0.5), rng.random_range(0.0..0.5), rng.random_range(0.0..0.5)).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for (n, k, d) in [(2, 2, 2), (3, 2, 2), (2, 3, 2)] {
        let spectra = if n == 2 {
            SpectrumSet::new(2, vec![(sub(&[1]), vec![0.7, 0.3]), (sub(&[2]), vec![0.6, 0.4]), (sub(&[1, 2]), vec![0.5, 0.3, 0.2])])
                .unwrap()
        } else {
            rank2_triple(0.2, 0.3, 0.4).unwrap()
        };
        let sdp = assemble(&spectra, d, k, Mode::Factorizing).unwrap();
        let dense: Vec<DMatrix<f64>> =
            sdp.generators.iter().map(|g| dense_generator(g, n, d, DEFAULT_DENSE_CAP).unwrap()).collect();
        for _ in 0..50 {
            let y: Vec<f64> = (0..dense.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut op = DMatrix::zeros(dense[0].nrows(), dense[0].ncols());
            for (m, c) in dense.iter().zip(&y) {
                op += m * *c;
            }
            let dense_min = SymmetricEigen::new(op).eigenvalues.min();
            let block_min = sdp
                .blocks
                .iter()
                .map(|b| SymmetricEigen::new(b.combine(&y)).eigenvalues.min())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max((dense_min - block_min).abs());
        }
    }
    let mut disagreements = 0;
    let opts = search_opts();
    for _ in 0..20 {
        let s = random_triple(&mut rng);
        let dense = dense_dual_minimize(&s, 2, 2, Mode::Cycles).unwrap();
        let block = refute(&assemble(&s, 2, 2, Mode::Cycles).unwrap(), &opts).unwrap();
        let agree = match dense.status {
            DualStatus::Refuted => block.is_refuted(),
            DualStatus::NotRefuted => block.is_not_refuted(),
            DualStatus::Inconclusive { .. } => false,
        };
        disagreements += usize::from(!agree);
    }
    outcome(
        worst <= 1e-8 && disagreements == 0,
        format!("max eigenvalue gap {worst:.1e} over 150 vectors, {disagreements}/20 verdict disagreements"),
    )
}

fn two_copy_boundary(certs: &mut Vec<Certificate>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let angles: Vec<f64> = (0..5).map(|i| 0.35 + 0.2 * i as f64).collect();
    for lambda_bc in [0.5, 0.4] {
        let mut job = ScanJob::new(lambda_bc, angles.clone(), 2, 2, Mode::Cycles);
        job.tol = 2.5e-4;
        job.refute = search_opts();
        for line in scan_boundary(&job).unwrap() {
            if line.status != LineStatus::Boundary {
                bad.push(format!("angle {:.2}: {} {}", line.angle, line.status.as_str(), line.note));
                continue;
            }
            let dev = (two_copy_lhs(line.lambda_ab, line.lambda_ac, lambda_bc) - 0.25).abs();
            worst = worst.max(dev);
            certs.extend(line.certificate);
        }
    }
    outcome(
        bad.is_empty() && worst <= 2e-3,
        format!("10 lines, max |lhs - 1/4| = {worst:.1e}{}", if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }),
    )
}

fn four_copy_slice(certs: &mut Vec<Certificate>) -> Outcome {
    let mut job = ScanJob::new(0.5, vec![FRAC_PI_4], 4, 4, Mode::Factorizing);
    job.tol = 2.5e-4;
    job.refute = search_opts();
    let line = scan_boundary(&job).unwrap().remove(0);
    let root = four_copy_symmetric_root(B, C);
    let dev = (line.lambda_ab - root).abs();
    let ok = line.status == LineStatus::Boundary && dev <= 2e-3;
    certs.extend(line.certificate);
    outcome(ok, format!("boundary λ = {:.5}, root {root:.5}, |Δ| = {dev:.1e} ({}{})", line.lambda_ab, line.status.as_str(), if line.note.is_empty() { String::new() } else { format!(": {}", line.note) }))
}

fn discriminating_point(certs: &mut Vec<Certificate>) -> Outcome {
    let s = rank2_triple(0.15, 0.15, 0.5).unwrap();
    let opts = search_opts();
    let k2 = refute(&assemble(&s, 2, 2, Mode::Factorizing).unwrap(), &opts).unwrap();
    let k4 = refute(&assemble(&s, 4, 4, Mode::Factorizing).unwrap(), &opts).unwrap();
    let ok = k2.is_not_refuted() && k4.is_refuted();
    if let Some(c) = k4.certificate() {
        certs.push(c.clone());
    }
    outcome(ok, format!("k=2 {}, k=4 {}", k2.label(), k4.label()))
}

fn certificate_soundness(certs: &[Certificate]) -> Outcome {
    let mut failed = 0;
    let mut worst = f64::INFINITY;
    for c in certs {
        let report = verify_certificate(c, &c.spectra).unwrap();
        if let Some(sweep) = report.checks.iter().find(|ch| ch.name == "random_states") {
            worst = worst.min(sweep.value);
        }
        failed += usize::from(!report.passed());
    }
    outcome(
        failed == 0 && !certs.is_empty(),
        format!("{} certificates, {failed} failed, worst sweep value {worst:.2e}", certs.len()),
    )
}

fn purity_inequalities() -> Outcome {
    let r = purity_check(10_000, 8).unwrap();
    outcome(
        r.holds(1e-9) && r.alpha == ALPHA,
        format!("10^4 states, min two-copy {:.2e}, min four-copy {:.2e}", r.min_two_copy, r.min_four_copy),
    )
}

fn refuted_up_to(job: &FlatSpectraJob, max_k: usize, opts: &RefuteOptions) -> Option<usize> {
    (2..=max_k).find(|&k| {
        let mut j = job.clone();
        j.k = k;
        run_flat(&j, opts).map(|row| row.verdict.is_refuted()).unwrap_or(false)
    })
}

fn flat_spectra() -> Outcome {
    let opts = search_opts();
    let four = (2..=3).find_map(|d| refuted_up_to(&FlatSpectraJob::new(4, [3, 2, 2], d, 4), 4, &opts).map(|k| (d, k)));
    let mut missed = Vec::new();
    let mut cells = 0;
    for r_ab in 1..=4 {
        for r_ac in 1..=4 {
            for r_bc in 1..=4 {
                if r_ab * r_ac >= r_bc {
                    continue;
                }
                cells += 1;
                if refuted_up_to(&FlatSpectraJob::new(3, [r_ab, r_ac, r_bc], 2, 4), 4, &opts).is_none() {
                    missed.push(format!("[{r_ab},{r_ac},{r_bc}]"));
                }
            }
        }
    }
    outcome(
        four.is_some() && missed.is_empty(),
        format!(
            "n=4 [3,2,2] {}; n=3 violating cells refuted {}/{cells}{}",
            four.map_or("not refuted".to_string(), |(d, k)| format!("refuted at d={d} k={k}")),
            cells - missed.len(),
            if missed.is_empty() { String::new() } else { format!(" (missed {})", missed.join(" ")) }
        ),
    )
}

fn hierarchy_monotonicity() -> Outcome {
    let opts = search_opts();
    let mut violations = Vec::new();
    let mut refuted = 0;
    for i in 0..5 {
        for j in 0..10 {
            // straddles the two- and four-copy boundaries
            let l_bc = 0.3 + 0.05 * i as f64;
            let l_ab = 0.10 + 0.01 * j as f64;
            let l_ac = l_ab + 0.005 * i as f64;
            let s = rank2_triple(l_ab, l_ac, l_bc).unwrap();
            let verdict = |k: usize, mode: Mode| -> Verdict { refute(&assemble(&s, 2, k, mode).unwrap(), &opts).unwrap() };
            let c2 = verdict(2, Mode::Cycles);
            let c4 = verdict(4, Mode::Cycles);
            let f2 = verdict(2, Mode::Factorizing);
            let f4 = verdict(4, Mode::Factorizing);
            refuted += usize::from(f4.is_refuted());
            let implications = [(&c2, &c4, "k2⇒k4 cycles"), (&f2, &f4, "k2⇒k4 factorizing"), (&c2, &f2, "cycles⇒factorizing k2"), (&c4, &f4, "cycles⇒factorizing k4")];
            for (a, b, what) in implications {
                if a.is_refuted() && !b.is_refuted() {
                    violations.push(format!("{what} at ({l_ab:.3},{l_ac:.3},{l_bc:.2})"));
                }
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!("50 points, {refuted} refuted at k=4 factorizing, {} violations {}", violations.len(), violations.join("; ")),
    )
}

fn kronecker_preset() -> Outcome {
    let opts = search_opts();
    let run = |job: &KroneckerJob| {
        let d = job.minimal_dimension().max(2);
        refute(&assemble(&job.problem().unwrap(), d, 2, Mode::Factorizing).unwrap(), &opts).unwrap()
    };
    let trivial: Vec<Verdict> = (2..=4).map(|m| run(&KroneckerJob::new(p(&[m]), p(&[m]), p(&[m])).unwrap())).collect();
    let mixed = run(&KroneckerJob::new(p(&[1, 1]), p(&[2]), p(&[2])).unwrap());
    let ok = trivial.iter().all(|v| v.is_not_refuted()) && mixed.is_refuted();
    outcome(
        ok,
        format!(
            "(m),(m),(m) for m=2..4: {}; (1,1),(2),(2): {}",
            trivial.iter().map(|v| v.label()).collect::<Vec<_>>().join(","),
            mixed.label()
        ),
    )
}

fn main() -> ExitCode {
    let mut certs = Vec::new();
    let mut all_passed = true;
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        all_passed &= o.passed;
        println!(
            "criterion {id:>2} {:<4} {name:<28} [{:>7.1}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    };
    report(1, "representation engine", &mut representation_engine);
    report(2, "size table", &mut size_table);
    report(3, "oracle equivalence", &mut oracle_equivalence);
    report(4, "two-copy boundary", &mut || two_copy_boundary(&mut certs));
    report(5, "four-copy symmetric slice", &mut || four_copy_slice(&mut certs));
    report(6, "discriminating point", &mut || discriminating_point(&mut certs));
    let soundness_certs = certs.clone();
    report(7, "certificate soundness", &mut || certificate_soundness(&soundness_certs));
    report(8, "purity inequalities", &mut purity_inequalities);
    report(9, "flat spectra", &mut flat_spectra);
    report(10, "hierarchy monotonicity", &mut hierarchy_monotonicity);
    report(11, "kronecker preset", &mut kronecker_preset);
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
