//! Dense brute-force counterparts of the symmetry-reduced pipeline: explicit
//! permutation operators on `(ℂ^d)^{⊗nk}`, random states, partial traces and
//! the unreduced dual program. Intended for tests and verification.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::assembler::generator_orbit;
use crate::error::{invalid, Error, Result};
use crate::marginals::{enumerate_generators, Generator, Mode, SpectrumSet, Subsystem};
use crate::permrep::{Partition, Permutation};
use crate::refuter::{minimize_dual, DualOutcome, RefuteOptions};

pub type CMatrix = DMatrix<Complex<f64>>;

pub const DEFAULT_DENSE_CAP: usize = 4096;
pub const DEFAULT_DUAL_CAP: usize = 256;

fn dense_dim(n: usize, d: usize, k: usize, cap: usize) -> Result<usize> {
    let dim = (n * k) as u32;
    match d.checked_pow(dim) {
        Some(size) if size <= cap => Ok(size),
        _ => Err(Error::Capacity { what: "dense dimension", size: d.saturating_pow(dim), cap }),
    }
}

// digits[s * k + c] of a flat index, most significant first
fn digits(mut idx: usize, base: usize, len: usize, out: &mut [usize]) {
    for slot in out[..len].iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
}

fn undigits(ds: &[usize], base: usize) -> usize {
    ds.iter().fold(0, |acc, &x| acc * base + x)
}

fn check_tuple(tuple: &[Permutation]) -> Result<usize> {
    let Some(first) = tuple.first() else {
        return invalid("need at least one site");
    };
    let k = first.degree();
    if tuple.iter().any(|s| s.degree() != k) {
        return invalid("permutations of mixed degree");
    }
    Ok(k)
}

/// `η(σ₁) ⊗ … ⊗ η(σₙ)` on `(ℂ^d)^{⊗nk}`, tensor factors ordered site-major
/// (`site * k + copy`). Copy `c` of site `s` receives the content of copy
/// `σ_s⁻¹(c)`, so that `η(σ)η(τ) = η(στ)`.
pub fn eta_dense(tuple: &[Permutation], d: usize, cap: usize) -> Result<DMatrix<f64>> {
    let k = check_tuple(tuple)?;
    let n = tuple.len();
    let dim = dense_dim(n, d, k, cap)?;
    let len = n * k;
    let mut m = DMatrix::zeros(dim, dim);
    let mut a = vec![0; len];
    let mut b = vec![0; len];
    for col in 0..dim {
        digits(col, d, len, &mut a);
        for (s, sigma) in tuple.iter().enumerate() {
            for c in 0..k {
                b[s * k + sigma.apply(c)] = a[s * k + c];
            }
        }
        m[(undigits(&b, d), col)] = 1.0;
    }
    Ok(m)
}

/// `tr(η(σ) ρ^{⊗k})` for a state `ρ` on `n` sites of dimension `d`, without
/// forming `ρ^{⊗k}`.
pub fn eta_expectation(tuple: &[Permutation], rho: &CMatrix, d: usize, cap: usize) -> Result<Complex<f64>> {
    let k = check_tuple(tuple)?;
    let n = tuple.len();
    if rho.nrows() != d.pow(n as u32) || !rho.is_square() {
        return invalid("state dimension does not match d^n");
    }
    let dim = dense_dim(n, d, k, cap)?;
    let len = n * k;
    let mut b = vec![0; len];
    let mut total = Complex::new(0.0, 0.0);
    for idx in 0..dim {
        digits(idx, d, len, &mut b);
        // ⟨b|η ρ^{⊗k}|b⟩ = ρ^{⊗k}[η⁻¹b, b], with (η⁻¹b)_{s,c} = b_{s,σ_s(c)}
        let mut term = Complex::new(1.0, 0.0);
        for c in 0..k {
            let mut row = 0;
            let mut col = 0;
            for (s, sigma) in tuple.iter().enumerate() {
                row = row * d + b[s * k + sigma.apply(c)];
                col = col * d + b[s * k + c];
            }
            term *= rho[(row, col)];
        }
        total += term;
    }
    Ok(total)
}

/// Hilbert-Schmidt random state `G G† / tr(G G†)` on sites of the given dimensions.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> CMatrix {
    random_density_rank(dims, dims.iter().product(), rng)
}

/// Random state of rank at most `rank` (induced measure, `G` of size `D × rank`);
/// `rank = 1` gives Haar random pure states.
pub fn random_density_rank<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> CMatrix {
    let dim: usize = dims.iter().product();
    let g = CMatrix::from_fn(dim, rank.max(1), |_, _| Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / Complex::new(tr, 0.0)
}

/// `ρ_A = tr_{A^c} ρ` for 0-based sites `keep` (sorted), mixed local dimensions.
pub fn partial_trace(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if rho.nrows() != total || !rho.is_square() {
        return invalid("state dimension does not match product of local dimensions");
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&s| s >= dims.len()) {
        return invalid("kept sites must be sorted, distinct and in range");
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let dk: usize = keep.iter().map(|&s| dims[s]).product();
    let dt: usize = traced.iter().map(|&s| dims[s]).product();
    // full index from (kept index, traced index)
    let compose = |ik: usize, it: usize| {
        let mut digit = vec![0; dims.len()];
        let mut x = ik;
        for &s in keep.iter().rev() {
            digit[s] = x % dims[s];
            x /= dims[s];
        }
        let mut x = it;
        for &s in traced.iter().rev() {
            digit[s] = x % dims[s];
            x /= dims[s];
        }
        digit.iter().zip(dims).fold(0, |acc, (&g, &dd)| acc * dd + g)
    };
    let mut out = CMatrix::zeros(dk, dk);
    for t in 0..dt {
        let idx: Vec<usize> = (0..dk).map(|i| compose(i, t)).collect();
        for i in 0..dk {
            for j in 0..dk {
                out[(i, j)] += rho[(idx[i], idx[j])];
            }
        }
    }
    Ok(out)
}

/// `tr(ρ_A^ℓ)` via partial trace and matrix powers.
pub fn marginal_power(rho: &CMatrix, dims: &[usize], a: &Subsystem, ell: usize) -> Result<f64> {
    let keep: Vec<usize> = a.sites().iter().map(|s| s - 1).collect();
    let m = partial_trace(rho, dims, &keep)?;
    Ok(matrix_power_trace(&m, ell))
}

fn matrix_power_trace(m: &CMatrix, ell: usize) -> f64 {
    let mut p = CMatrix::identity(m.nrows(), m.nrows());
    for _ in 0..ell {
        p = &p * m;
    }
    p.trace().re
}

/// `tr(ρ_A^ℓ)` computed both as `tr(η(σ^A) ρ^{⊗k})` and by partial trace.
#[derive(Clone, Copy, Debug)]
pub struct BruteQ {
    pub via_permutation: f64,
    pub via_partial_trace: f64,
}

impl BruteQ {
    pub fn discrepancy(&self) -> f64 {
        (self.via_permutation - self.via_partial_trace).abs()
    }
}

pub fn brute_q(rho: &CMatrix, n: usize, d: usize, a: &Subsystem, ell: usize, k: usize) -> Result<BruteQ> {
    if ell < 1 || ell > k {
        return invalid(format!("need 1 <= ell <= k, got ell = {ell}, k = {k}"));
    }
    let tuple: Vec<Permutation> = (1..=n)
        .map(|s| {
            if a.contains(s) {
                Permutation::cycle(k, &(0..ell).collect::<Vec<_>>())
            } else {
                Ok(Permutation::identity(k))
            }
        })
        .collect::<Result<_>>()?;
    let via_permutation = eta_expectation(&tuple, rho, d, DEFAULT_DENSE_CAP)?.re;
    let via_partial_trace = marginal_power(rho, &vec![d; n], a, ell)?;
    Ok(BruteQ { via_permutation, via_partial_trace })
}

/// Expectation of a generator on `ρ^{⊗k}`: product over atoms of `tr(ρ_A^ℓ)`.
pub fn generator_value_on_state(g: &Generator, rho: &CMatrix, dims: &[usize]) -> Result<f64> {
    let mut v = 1.0;
    for atom in g.atoms() {
        v *= marginal_power(rho, dims, &atom.subsystem, atom.len())?;
    }
    Ok(v)
}

/// Eigenvalues of every marginal in `subsystems`, clipped at zero and renormalized.
pub fn marginal_spectra(rho: &CMatrix, dims: &[usize], subsystems: &[Subsystem]) -> Result<SpectrumSet> {
    let entries = subsystems
        .iter()
        .map(|a| {
            let keep: Vec<usize> = a.sites().iter().map(|s| s - 1).collect();
            let m = partial_trace(rho, dims, &keep)?;
            let ev = nalgebra::SymmetricEigen::new(m).eigenvalues;
            let mut mu: Vec<f64> = ev.iter().map(|x| x.max(0.0)).collect();
            let total: f64 = mu.iter().sum();
            mu.iter_mut().for_each(|x| *x /= total);
            Ok((a.clone(), mu))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectrumSet::new(dims.len(), entries)
}

/// Orbit-averaged, symmetrized dense operator of a generator.
pub fn dense_generator(g: &Generator, n: usize, d: usize, cap: usize) -> Result<DMatrix<f64>> {
    let dim = dense_dim(n, d, g.k(), cap)?;
    if g.is_identity() {
        return Ok(DMatrix::identity(dim, dim));
    }
    let orbit = generator_orbit(g, n)?;
    let mut acc = DMatrix::zeros(dim, dim);
    for tuple in &orbit {
        acc += eta_dense(tuple, d, cap)?;
    }
    acc /= orbit.len() as f64;
    Ok((&acc + acc.transpose()) * 0.5)
}

/// The unreduced dual at level `k`: a single dense block.
pub fn dense_dual_minimize(spectra: &SpectrumSet, k: usize, d: usize, mode: Mode) -> Result<DualOutcome> {
    dense_dual_minimize_with(spectra, k, d, mode, &RefuteOptions::default())
}

pub fn dense_dual_minimize_with(
    spectra: &SpectrumSet,
    k: usize,
    d: usize,
    mode: Mode,
    opts: &RefuteOptions,
) -> Result<DualOutcome> {
    let n = spectra.n();
    dense_dim(n, d, k, DEFAULT_DUAL_CAP)?;
    let generators = enumerate_generators(&spectra.subsystems(), k, mode);
    let targets = generators.iter().map(|g| g.value(spectra)).collect::<Result<Vec<_>>>()?;
    let block = generators
        .iter()
        .map(|g| dense_generator(g, n, d, DEFAULT_DUAL_CAP))
        .collect::<Result<Vec<_>>>()?;
    minimize_dual(&targets, &[block], opts)
}

/// Dimension of the unitary irrep `λ` of `U(d)` (Weyl dimension formula).
pub fn weyl_dimension(shape: &Partition, d: usize) -> f64 {
    if shape.height() > d {
        return 0.0;
    }
    let mut lam = shape.parts().to_vec();
    lam.resize(d, 0);
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..d {
        for j in i + 1..d {
            num *= (lam[i] as f64 - lam[j] as f64) + (j - i) as f64;
            den *= (j - i) as f64;
        }
    }
    num / den
}
