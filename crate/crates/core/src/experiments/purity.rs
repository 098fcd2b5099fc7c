use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::assembler::{assemble, assemble_generators, AssembleOptions};
use crate::error::{invalid, Result};
use crate::marginals::{Generator, Mode, Subsystem};
use crate::oracle::{marginal_power, random_density_rank};
use crate::refuter::{refute, RefuteOptions};

use super::scan::rank2_triple;

/// Constants of the published four-copy boundary relation.
pub const B: f64 = 0.393931;
pub const C: f64 = 0.225380;
pub const ALPHA: f64 = 0.329107;

/// `α = 8b / (16c + 5b + 4)`.
pub fn alpha_from_bc(b: f64, c: f64) -> f64 {
    8.0 * b / (16.0 * c + 5.0 * b + 4.0)
}

/// Second and fourth moments `tr(ρ_S^ℓ)` of the AB, AC, BC marginals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairMoments {
    pub ab: [f64; 2],
    pub ac: [f64; 2],
    pub bc: [f64; 2],
}

/// `1 + tr ρ_BC² - tr ρ_AB² - tr ρ_AC²`.
pub fn two_copy_purity(m: &PairMoments) -> f64 {
    1.0 + m.bc[0] - m.ab[0] - m.ac[0]
}

/// `1 + (1+α)(tr ρ_BC² - tr ρ_AB² - tr ρ_AC²) - α(tr ρ_BC⁴ - tr ρ_AB⁴ - tr ρ_AC⁴)`.
pub fn four_copy_purity(m: &PairMoments, alpha: f64) -> f64 {
    1.0 + (1.0 + alpha) * (m.bc[0] - m.ab[0] - m.ac[0]) - alpha * (m.bc[1] - m.ab[1] - m.ac[1])
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub samples: usize,
    pub alpha: f64,
    pub min_two_copy: f64,
    pub min_four_copy: f64,
    pub worst_two_copy_dims: [usize; 3],
    pub worst_four_copy_dims: [usize; 3],
}

impl PurityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_two_copy >= -tol && self.min_four_copy >= -tol
    }
}

pub fn pair_moments(rho: &crate::oracle::CMatrix, dims: &[usize]) -> Result<PairMoments> {
    let get = |sites: &[usize]| -> Result<[f64; 2]> {
        let a = Subsystem::new(sites.to_vec())?;
        Ok([marginal_power(rho, dims, &a, 2)?, marginal_power(rho, dims, &a, 4)?])
    };
    Ok(PairMoments { ab: get(&[1, 2])?, ac: get(&[1, 3])?, bc: get(&[2, 3])? })
}

/// Evaluates both inequalities on `samples` random tripartite states with
/// local dimensions drawn from `{2, 3}` and rank drawn from `{1, 2, 3, 4}`,
/// so that pure and nearly pure states are well represented.
pub fn purity_check(samples: usize, seed: u64) -> Result<PurityReport> {
    let rows = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let dims = [rng.random_range(2..=3), rng.random_range(2..=3), rng.random_range(2..=3)];
            let rho = random_density_rank(&dims, rng.random_range(1..=4), &mut rng);
            let m = pair_moments(&rho, &dims)?;
            Ok((dims, two_copy_purity(&m), four_copy_purity(&m, ALPHA)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = PurityReport {
        samples,
        alpha: ALPHA,
        min_two_copy: f64::INFINITY,
        min_four_copy: f64::INFINITY,
        worst_two_copy_dims: [0; 3],
        worst_four_copy_dims: [0; 3],
    };
    for (dims, two, four) in rows {
        if two < report.min_two_copy {
            report.min_two_copy = two;
            report.worst_two_copy_dims = dims;
        }
        if four < report.min_four_copy {
            report.min_four_copy = four;
            report.worst_four_copy_dims = dims;
        }
    }
    Ok(report)
}

/// Coefficients of the stated two- and four-copy witnesses, as generators of
/// the cycles hierarchy on the pairs AB, AC, BC.
pub fn stated_witness(k: usize, alpha: f64) -> Result<Vec<(Generator, f64)>> {
    if k != 2 && k != 4 {
        return invalid(format!("stated witnesses exist for k = 2 and k = 4, not {k}"));
    }
    let mut out = vec![(Generator::identity(k), 1.0)];
    for (sites, sign) in [(vec![2, 3], 1.0), (vec![1, 2], -1.0), (vec![1, 3], -1.0)] {
        let s = Subsystem::new(sites)?;
        if k == 2 {
            out.push((Generator::canonical(2, vec![(2, s)])?, sign));
        } else {
            out.push((Generator::canonical(4, vec![(2, s.clone())])?, sign * (1.0 + alpha)));
            out.push((Generator::canonical(4, vec![(4, s)])?, -sign * alpha));
        }
    }
    Ok(out)
}

/// A refuter certificate next to the stated witness of the same level.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessComparison {
    pub k: usize,
    /// `(λ_AB, λ_AC, λ_BC)` at which the certificate was computed.
    pub point: [f64; 3],
    pub verdict: &'static str,
    /// `(generator, stated, certificate)`, certificate scaled to identity weight 1.
    pub coefficients: Vec<(String, f64, f64)>,
    pub max_deviation: f64,
    /// Smallest block eigenvalue of the stated witness with `d = k`; a
    /// negative value means the stated form is not itself a PSD operator.
    pub stated_min_eigenvalue: f64,
}

/// Runs the cycles hierarchy at level `k` (`d = k`) on a rank-2 triple and
/// lines the certificate up against [`stated_witness`].
pub fn compare_witness(k: usize, point: [f64; 3], opts: &RefuteOptions) -> Result<WitnessComparison> {
    let stated = stated_witness(k, ALPHA)?;
    let spectra = rank2_triple(point[0], point[1], point[2])?;
    let witness_sdp = assemble_generators(
        &spectra,
        k,
        k,
        Mode::Cycles,
        stated.iter().map(|(g, _)| g.clone()).collect(),
        &AssembleOptions::default(),
    )?;
    let ys: Vec<f64> = stated.iter().map(|(_, y)| *y).collect();
    let stated_min_eigenvalue = witness_sdp
        .blocks
        .iter()
        .map(|b| nalgebra::SymmetricEigen::new(b.combine(&ys)).eigenvalues.min())
        .fold(f64::INFINITY, f64::min);

    let verdict = refute(&assemble(&spectra, k, k, Mode::Cycles)?, opts)?;
    let mut coefficients: Vec<(String, f64, f64)> =
        stated.iter().map(|(g, y)| (g.to_string(), *y, f64::NAN)).collect();
    let mut max_deviation = f64::NAN;
    if let Some(cert) = verdict.certificate() {
        let id = cert.y[0];
        let scale = if id > 0.0 { id } else { cert.y.iter().fold(0.0_f64, |m, v| m.max(v.abs())) };
        coefficients = cert
            .generators
            .iter()
            .zip(&cert.y)
            .map(|(g, y)| {
                let s = stated.iter().find(|(h, _)| h == g).map_or(0.0, |(_, v)| *v);
                (g.to_string(), s, y / scale)
            })
            .collect();
        max_deviation = coefficients.iter().map(|(_, s, c)| (s - c).abs()).fold(0.0, f64::max);
    }
    Ok(WitnessComparison {
        k,
        point,
        verdict: verdict.label(),
        coefficients,
        max_deviation,
        stated_min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::CMatrix;
    use nalgebra::Complex;

    #[test]
    fn alpha_matches_constants() {
        assert!((alpha_from_bc(B, C) - ALPHA).abs() < 1e-6);
    }

    #[test]
    fn pure_product_saturates_two_copy() {
        let mut rho = CMatrix::zeros(8, 8);
        rho[(0, 0)] = Complex::new(1.0, 0.0);
        let m = pair_moments(&rho, &[2, 2, 2]).unwrap();
        assert!(two_copy_purity(&m).abs() < 1e-14);
        assert!(four_copy_purity(&m, ALPHA).abs() < 1e-14);
    }

    #[test]
    fn two_copy_witness_is_psd() {
        let mut opts = RefuteOptions::default();
        opts.verify.sweep_samples = 50;
        let cmp = compare_witness(2, [0.05, 0.05, 0.5], &opts).unwrap();
        assert_eq!(cmp.verdict, "REFUTED");
        assert!(cmp.stated_min_eigenvalue.abs() < 1e-12);
        assert!(cmp.max_deviation.is_finite());
    }

    #[test]
    fn small_random_batch() {
        assert!(purity_check(200, 11).unwrap().holds(1e-9));
    }
}
