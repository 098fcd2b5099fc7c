use std::collections::{BTreeSet, HashMap};
use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::marginals::{enumerate_generators, Generator, Mode, SpectrumSet};
use crate::permrep::{conjugation_orbit, enumerate_partitions, Partition, Permutation, RepTable};

/// Default cap on the dimension of a single block.
pub const DEFAULT_BLOCK_CAP: usize = 1024;

/// One irreducible component: a partition of `k` per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    pub partitions: Vec<Partition>,
}

impl BlockKey {
    pub fn dim(&self) -> usize {
        self.partitions.iter().map(Partition::hook_dimension).product()
    }
}

impl fmt::Display for BlockKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.partitions.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// All block keys for `n` sites, `k` copies, local dimension `d`, site 1 varying slowest.
pub fn block_keys(n: usize, d: usize, k: usize) -> Result<Vec<BlockKey>> {
    if n == 0 {
        return invalid("need at least one site");
    }
    let parts = enumerate_partitions(k, d)?;
    let mut keys = vec![Vec::new()];
    for _ in 0..n {
        keys = keys
            .into_iter()
            .flat_map(|prefix: Vec<Partition>| {
                parts.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    Ok(keys.into_iter().map(|partitions| BlockKey { partitions }).collect())
}

/// A block with one symmetric coefficient matrix per generator.
#[derive(Clone, Debug)]
pub struct Block {
    pub key: BlockKey,
    pub coefficients: Vec<DMatrix<f64>>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.key.dim()
    }

    /// `Σ_g y_g B_g`.
    pub fn combine(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (b, &yg) in self.coefficients.iter().zip(y) {
            if yg != 0.0 {
                out += b * yg;
            }
        }
        out
    }
}

/// The symmetry-reduced dual program at one level.
///
/// A coefficient vector `y` (one entry per generator) refutes the spectra when
/// every block of `Σ y_g B_g` is positive semidefinite and `Σ y_g q_g < 0`.
#[derive(Clone, Debug)]
pub struct BlockSdp {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub mode: Mode,
    pub spectra: SpectrumSet,
    pub generators: Vec<Generator>,
    pub targets: Vec<f64>,
    pub blocks: Vec<Block>,
}

impl BlockSdp {
    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::dim).collect()
    }

    /// `Σ_g y_g q_g`.
    pub fn objective(&self, y: &[f64]) -> f64 {
        self.targets.iter().zip(y).map(|(q, y)| q * y).sum()
    }

    /// Coefficient matrices grouped per block.
    pub fn coefficient_blocks(&self) -> Vec<Vec<DMatrix<f64>>> {
        self.blocks.iter().map(|b| b.coefficients.clone()).collect()
    }

    /// Same blocks and generators with targets for other spectra on the same subsystems.
    pub fn with_spectra(&self, spectra: &SpectrumSet) -> Result<BlockSdp> {
        if spectra.subsystems() != self.spectra.subsystems() {
            return invalid("spectra must be given on the same subsystems");
        }
        let targets = self.generators.iter().map(|g| g.value(spectra)).collect::<Result<Vec<_>>>()?;
        Ok(BlockSdp { spectra: spectra.clone(), targets, ..self.clone() })
    }

    /// Σ over blocks of `N(N+1)/2`.
    pub fn n_sym(&self) -> u64 {
        self.blocks.iter().map(|b| tri(b.dim())).sum()
    }
}

pub(crate) fn tri(n: usize) -> u64 {
    let n = n as u64;
    n * (n + 1) / 2
}

/// Orbit of the site tuple of `g` under simultaneous conjugation, closed under
/// tuple-wise inversion.
pub fn generator_orbit(g: &Generator, n: usize) -> Result<Vec<Vec<Permutation>>> {
    let tuple = g.site_permutations(n)?;
    let mut orbit: BTreeSet<Vec<Permutation>> = conjugation_orbit(&tuple)?.into_iter().collect();
    let inverses: Vec<Vec<Permutation>> = orbit
        .iter()
        .map(|t| t.iter().map(Permutation::inverse).collect())
        .collect();
    orbit.extend(inverses);
    Ok(orbit.into_iter().collect())
}

fn check_cap(key: &BlockKey, cap: usize) -> Result<()> {
    let dim = key.dim();
    if dim > cap {
        return Err(Error::Capacity { what: "block dimension", size: dim, cap });
    }
    Ok(())
}

fn average_over_orbit(
    orbit: &[Vec<Permutation>],
    key: &BlockKey,
    tables: &HashMap<Partition, RepTable>,
) -> DMatrix<f64> {
    let dim = key.dim();
    let mut acc = DMatrix::zeros(dim, dim);
    for tuple in orbit {
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for (sigma, lam) in tuple.iter().zip(&key.partitions) {
            let r = tables[lam].get(sigma).expect("representation matrix precomputed");
            m = m.kronecker(r);
        }
        acc += m;
    }
    acc /= orbit.len() as f64;
    (&acc + acc.transpose()) * 0.5
}

fn rep_tables(
    partitions: impl IntoIterator<Item = Partition>,
    orbits: &[Vec<Vec<Permutation>>],
) -> Result<HashMap<Partition, RepTable>> {
    let perms: BTreeSet<&Permutation> = orbits.iter().flatten().flatten().collect();
    let mut tables = HashMap::new();
    for lam in partitions {
        let mut t = RepTable::new(&lam);
        for p in &perms {
            t.insert(p)?;
        }
        tables.insert(lam, t);
    }
    Ok(tables)
}

/// Orbit-averaged, symmetrized representation of `g` in block `key`.
pub fn orbit_block(g: &Generator, key: &BlockKey, cap: usize) -> Result<DMatrix<f64>> {
    check_cap(key, cap)?;
    if key.partitions.iter().any(|p| p.weight() != g.k()) {
        return invalid(format!("block {key} does not match generator with k = {}", g.k()));
    }
    if g.is_identity() {
        return Ok(DMatrix::identity(key.dim(), key.dim()));
    }
    let orbit = generator_orbit(g, key.partitions.len())?;
    let tables = rep_tables(key.partitions.iter().cloned(), std::slice::from_ref(&orbit))?;
    Ok(average_over_orbit(&orbit, key, &tables))
}

/// Options for [`assemble_with`].
#[derive(Clone, Debug)]
pub struct AssembleOptions {
    pub block_cap: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { block_cap: DEFAULT_BLOCK_CAP }
    }
}

/// Builds the level-`k` block SDP with the enumerated generators of `mode`.
pub fn assemble(spectra: &SpectrumSet, d: usize, k: usize, mode: Mode) -> Result<BlockSdp> {
    assemble_with(spectra, d, k, mode, &AssembleOptions::default())
}

pub fn assemble_with(
    spectra: &SpectrumSet,
    d: usize,
    k: usize,
    mode: Mode,
    opts: &AssembleOptions,
) -> Result<BlockSdp> {
    if k < 2 {
        return invalid("level k must be at least 2");
    }
    let generators = enumerate_generators(&spectra.subsystems(), k, mode);
    assemble_generators(spectra, d, k, mode, generators, opts)
}

/// Builds the block SDP for an explicit generator list.
pub fn assemble_generators(
    spectra: &SpectrumSet,
    d: usize,
    k: usize,
    mode: Mode,
    generators: Vec<Generator>,
    opts: &AssembleOptions,
) -> Result<BlockSdp> {
    if d == 0 {
        return invalid("local dimension must be at least 1");
    }
    if let Some(g) = generators.iter().find(|g| g.k() != k) {
        return invalid(format!("generator {g} has k = {}, expected {k}", g.k()));
    }
    let n = spectra.n();
    let keys = block_keys(n, d, k)?;
    for key in &keys {
        check_cap(key, opts.block_cap)?;
    }
    let targets = generators.iter().map(|g| g.value(spectra)).collect::<Result<Vec<_>>>()?;
    let orbits = generators
        .iter()
        .map(|g| generator_orbit(g, n))
        .collect::<Result<Vec<_>>>()?;
    let tables = rep_tables(enumerate_partitions(k, d)?, &orbits)?;

    let blocks: Vec<Block> = keys
        .into_par_iter()
        .map(|key| {
            let coefficients = generators
                .iter()
                .zip(&orbits)
                .map(|(g, orbit)| {
                    if g.is_identity() {
                        DMatrix::identity(key.dim(), key.dim())
                    } else {
                        average_over_orbit(orbit, &key, &tables)
                    }
                })
                .collect();
            Block { key, coefficients }
        })
        .collect();

    Ok(BlockSdp {
        n,
        d,
        k,
        mode,
        spectra: spectra.clone(),
        generators,
        targets,
        blocks,
    })
}
