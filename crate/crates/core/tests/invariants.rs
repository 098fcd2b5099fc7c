//! Cross-checks of the reduced program against brute-force constructions.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use specref::assembler::sdpa::sdpa_string;
use specref::assembler::{assemble, read_sdpa, size_report, ReducedForm};
use specref::experiments::rank2_triple;
use specref::marginals::{enumerate_generators, Mode, SpectrumSet, Subsystem};
use specref::oracle::{
    dense_dual_minimize, dense_generator, generator_value_on_state, marginal_spectra, random_density_rank,
    weyl_dimension, DEFAULT_DENSE_CAP,
};
use specref::permrep::{character_mn, enumerate_partitions, rep_matrix, Permutation};
use specref::refuter::{refute, DualStatus, RefuteOptions, Verdict};

fn sub(v: &[usize]) -> Subsystem {
    Subsystem::new(v.to_vec()).unwrap()
}

fn perm(k: usize) -> impl Strategy<Value = Permutation> {
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn shape_and_pair() -> impl Strategy<Value = (usize, usize, Permutation, Permutation)> {
    (1usize..=6).prop_flat_map(|k| {
        let shapes = enumerate_partitions(k, k).unwrap().len();
        (Just(k), 0..shapes, perm(k), perm(k))
    })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_matrices_form_an_orthogonal_representation((k, idx, s, t) in shape_and_pair()) {
        let lam = &enumerate_partitions(k, k).unwrap()[idx];
        let rs = rep_matrix(lam, &s).unwrap();
        let rt = rep_matrix(lam, &t).unwrap();
        let prod = rep_matrix(lam, &s.compose(&t)).unwrap();
        prop_assert!(max_abs(&(&prod - &rs * &rt)) < 1e-12);
        let n = rs.nrows();
        prop_assert!(max_abs(&(rs.transpose() * &rs - DMatrix::identity(n, n))) < 1e-12);
        let chi = character_mn(lam, &s.cycle_type()).unwrap() as f64;
        prop_assert!((rs.trace() - chi).abs() < 1e-10);
    }

    #[test]
    fn generator_values_match_states(seed in any::<u64>(), rank in 1usize..=4, k in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [2, 2, 2];
        let rho = random_density_rank(&dims, rank, &mut rng);
        let subs = [sub(&[1]), sub(&[1, 2]), sub(&[1, 3]), sub(&[2, 3])];
        let spectra = marginal_spectra(&rho, &dims, &subs).unwrap();
        for g in enumerate_generators(&subs, k, Mode::Factorizing) {
            let direct = generator_value_on_state(&g, &rho, &dims).unwrap();
            let from_spectra = g.value(&spectra).unwrap();
            prop_assert!((direct - from_spectra).abs() < 1e-10, "{}: {} vs {}", g, direct, from_spectra);
        }
    }

    #[test]
    fn spectra_of_block_and_dense_operators_agree(
        case in 0usize..4,
        y in proptest::collection::vec(-1.0f64..1.0, 16),
    ) {
        let (n, d, k) = [(3, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 3)][case];
        let subs: Vec<(Subsystem, Vec<f64>)> = if n == 3 {
            vec![(sub(&[1, 2]), vec![0.6, 0.4]), (sub(&[1, 3]), vec![0.7, 0.3]), (sub(&[2, 3]), vec![0.8, 0.2])]
        } else {
            vec![(sub(&[1]), vec![0.6, 0.4]), (sub(&[1, 2]), vec![0.7, 0.3])]
        };
        let spectra = SpectrumSet::new(n, subs).unwrap();
        let sdp = assemble(&spectra, d, k, Mode::Cycles).unwrap();
        let y = &y[..sdp.generators.len().min(y.len())];

        let mut expected = Vec::new();
        for b in &sdp.blocks {
            let mult: f64 = b.key.partitions.iter().map(|p| weyl_dimension(p, d)).product();
            for ev in SymmetricEigen::new(b.combine(y)).eigenvalues.iter() {
                expected.extend(std::iter::repeat_n(*ev, mult.round() as usize));
            }
        }
        let mut dense = DMatrix::zeros(0, 0);
        for (g, &yg) in sdp.generators.iter().zip(y) {
            let m = dense_generator(g, n, d, DEFAULT_DENSE_CAP).unwrap() * yg;
            dense = if dense.nrows() == 0 { m } else { dense + m };
        }
        let mut actual: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        prop_assert_eq!(actual.len(), expected.len());
        actual.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        for (a, e) in actual.iter().zip(&expected) {
            prop_assert!((a - e).abs() < 1e-9, "{} vs {}", a, e);
        }
    }

    #[test]
    fn sdpa_text_round_trips(l_ab in 0.0f64..0.5, l_ac in 0.0f64..0.5, l_bc in 0.0f64..0.5, k in 2usize..=3) {
        let spectra = rank2_triple(l_ab, l_ac, l_bc).unwrap();
        let sdp = assemble(&spectra, 2, k, Mode::Factorizing).unwrap();
        let rf = ReducedForm::new(&sdp.targets, &sdp.coefficient_blocks()).unwrap();
        let parsed = read_sdpa(&sdpa_string(&rf, "round trip")).unwrap();
        prop_assert_eq!(&parsed.block_dims, &rf.block_dims);
        prop_assert_eq!(parsed.cost.len(), rf.num_vars());
        for (a, b) in parsed.cost.iter().zip(&rf.cost) {
            prop_assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
        for (blk, &n) in rf.block_dims.iter().enumerate() {
            prop_assert!(max_abs(&(&parsed.f[0][blk] + DMatrix::identity(n, n))) < 1e-15);
            for j in 0..rf.num_vars() {
                prop_assert!(max_abs(&(&parsed.f[j + 1][blk] - &rf.mats[j][blk])) < 1e-14);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reduced_and_dense_verdicts_agree(l_ab in 0.0f64..0.5, l_ac in 0.0f64..0.5, l_bc in 0.0f64..0.5) {
        let spectra = rank2_triple(l_ab, l_ac, l_bc).unwrap();
        let dense = dense_dual_minimize(&spectra, 2, 2, Mode::Cycles).unwrap();
        // too close to the boundary for the verdict to be meaningful
        prop_assume!(dense.value.abs() > 1e-5);
        let sdp = assemble(&spectra, 2, 2, Mode::Cycles).unwrap();
        let verdict = refute(&sdp, &RefuteOptions::default()).unwrap();
        // the two values use different trace normalizations, so only signs compare
        prop_assert_eq!(verdict.diagnostics().value < 0.0, dense.value < 0.0);
        match (&dense.status, &verdict) {
            (DualStatus::Refuted, Verdict::Refuted { .. }) | (DualStatus::NotRefuted, Verdict::NotRefuted { .. }) => {}
            (s, v) => prop_assert!(false, "dense {:?}, reduced {}", s, v.label()),
        }
    }
}

/// Symmetric part of the span of `η(π) + η(π⁻¹)` over all site tuples, from
/// the Gram matrix `⟨η(π), η(τ)⟩ = Π_i d^{cycles(π_i⁻¹ τ_i)}`.
fn brute_n_sym(n: usize, d: usize, k: usize) -> usize {
    let all = Permutation::all(k);
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..all.len()).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    let inv: Vec<Permutation> = all.iter().map(Permutation::inverse).collect();
    let tr = |a: &[&Permutation], b: &[&Permutation]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (d as f64).powi(x.inverse().compose(y).cycle_count() as i32))
            .product()
    };
    let m = tuples.len();
    let mut gram = DMatrix::zeros(m, m);
    for (i, s) in tuples.iter().enumerate() {
        let sp: Vec<&Permutation> = s.iter().map(|&a| &all[a]).collect();
        let si: Vec<&Permutation> = s.iter().map(|&a| &inv[a]).collect();
        for (j, t) in tuples.iter().enumerate().skip(i) {
            let tp: Vec<&Permutation> = t.iter().map(|&a| &all[a]).collect();
            let ti: Vec<&Permutation> = t.iter().map(|&a| &inv[a]).collect();
            let v = tr(&sp, &tp) + tr(&sp, &ti) + tr(&si, &tp) + tr(&si, &ti);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let ev = SymmetricEigen::new(gram).eigenvalues;
    let top = ev.amax();
    ev.iter().filter(|&&x| x > 1e-9 * top).count()
}

#[test]
fn symmetric_variable_count_matches_brute_force() {
    for n in 1..=3 {
        for k in 2..=4 {
            for d in 1..=3 {
                if n == 3 && k == 4 {
                    continue;
                }
                let r = size_report(n, d, k).unwrap();
                assert_eq!(r.n_sym, brute_n_sym(n, d, k) as u64, "n={n} d={d} k={k}");
            }
        }
    }
}

/// The three-site, four-copy counts follow from the single-site data: the
/// algebra is a tensor power, so `Σ N² = r^3` and `Σ N = s^3`.
#[test]
fn three_site_four_copy_count_from_single_site() {
    for d in 1..=3 {
        let parts = enumerate_partitions(4, d).unwrap();
        let r: u64 = parts.iter().map(|p| (p.hook_dimension() as u64).pow(2)).sum();
        let s: u64 = parts.iter().map(|p| p.hook_dimension() as u64).sum();
        let single = size_report(1, d, 4).unwrap().n_sym;
        assert_eq!(single, brute_n_sym(1, d, 4) as u64);
        assert_eq!(single, (r + s) / 2);
        assert_eq!(size_report(3, d, 4).unwrap().n_sym, (r.pow(3) + s.pow(3)) / 2, "d={d}");
    }
}
