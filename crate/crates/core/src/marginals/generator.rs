use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::permrep::Permutation;

use super::{power_sum, SpectrumSet, Subsystem};

/// Which permutations of `S_k^n` become dual variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Identity plus one `ℓ`-cycle per subsystem and length.
    Cycles,
    /// All products of disjoint cycles, each cycle acting on one subsystem.
    Factorizing,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cycles" => Ok(Mode::Cycles),
            "factorizing" => Ok(Mode::Factorizing),
            other => Err(Error::Parse(format!("unknown mode {other:?}, expected cycles|factorizing"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Cycles => "cycles",
            Mode::Factorizing => "factorizing",
        })
    }
}

/// One cycle on the copies `support` (1-based, in cycle order), acting on every
/// site of `subsystem`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub subsystem: Subsystem,
    pub support: Vec<usize>,
}

impl Atom {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    fn sort_key(&self) -> (usize, &Subsystem, &[usize]) {
        (self.len(), &self.subsystem, &self.support)
    }
}

/// A factorizing element of `S_k^n`: disjoint cycles, each labelled by a subsystem.
/// No atoms means the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GeneratorRepr", into = "GeneratorRepr")]
pub struct Generator {
    k: usize,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRepr {
    k: usize,
    atoms: Vec<Atom>,
}

impl TryFrom<GeneratorRepr> for Generator {
    type Error = Error;

    fn try_from(r: GeneratorRepr) -> Result<Self> {
        Generator::new(r.k, r.atoms)
    }
}

impl From<Generator> for GeneratorRepr {
    fn from(g: Generator) -> Self {
        GeneratorRepr { k: g.k, atoms: g.atoms }
    }
}

impl Generator {
    pub fn identity(k: usize) -> Self {
        Generator { k, atoms: Vec::new() }
    }

    /// Validates disjointness and stores atoms in canonical order.
    pub fn new(k: usize, mut atoms: Vec<Atom>) -> Result<Self> {
        let mut used = vec![false; k + 1];
        for atom in &atoms {
            if atom.len() < 2 {
                return invalid(format!("atom on {} has a cycle shorter than 2", atom.subsystem));
            }
            for &c in &atom.support {
                if c == 0 || c > k {
                    return invalid(format!("copy index {c} outside 1..={k}"));
                }
                if used[c] {
                    return invalid(format!("copy {c} used by two atoms"));
                }
                used[c] = true;
            }
        }
        atoms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Generator { k, atoms })
    }

    /// Canonical representative of a conjugacy class: atoms sorted by
    /// `(length, subsystem)` occupying consecutive copies `1, 2, …`.
    pub fn canonical(k: usize, mut shape: Vec<(usize, Subsystem)>) -> Result<Self> {
        shape.sort();
        let mut next = 1;
        let mut atoms = Vec::with_capacity(shape.len());
        for (len, subsystem) in shape {
            let support: Vec<usize> = (next..next + len).collect();
            next += len;
            atoms.push(Atom { subsystem, support });
        }
        Generator::new(k, atoms)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `(length, subsystem)` per atom, the conjugacy invariant of the generator.
    pub fn shape(&self) -> Vec<(usize, Subsystem)> {
        self.atoms.iter().map(|a| (a.len(), a.subsystem.clone())).collect()
    }

    /// Per-site permutations `(σ₁, …, σₙ)`: site `i` gets the product of the
    /// cycles of all atoms whose subsystem contains `i`.
    pub fn site_permutations(&self, n: usize) -> Result<Vec<Permutation>> {
        for atom in &self.atoms {
            if atom.subsystem.sites().iter().any(|&s| s > n) {
                return invalid(format!("atom subsystem {} exceeds n = {n}", atom.subsystem));
            }
        }
        (1..=n)
            .map(|site| {
                let mut images: Vec<usize> = (0..self.k).collect();
                for atom in self.atoms.iter().filter(|a| a.subsystem.contains(site)) {
                    let s = &atom.support;
                    for (i, &c) in s.iter().enumerate() {
                        images[c - 1] = s[(i + 1) % s.len()] - 1;
                    }
                }
                Permutation::from_images(images)
            })
            .collect()
    }

    /// Expectation on `ρ^{⊗k}` for any state with the given spectra: the
    /// product of `q_{A,ℓ}` over atoms.
    pub fn value(&self, spectra: &SpectrumSet) -> Result<f64> {
        let mut v = 1.0;
        for atom in &self.atoms {
            let Some(mu) = spectra.spectrum(&atom.subsystem) else {
                return invalid(format!("no spectrum for subsystem {}", atom.subsystem));
            };
            v *= power_sum(mu, atom.len())?;
        }
        Ok(v)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "id");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            let cyc: Vec<String> = a.support.iter().map(|c| c.to_string()).collect();
            write!(f, "({})^{}", cyc.join(" "), a.subsystem)?;
        }
        Ok(())
    }
}

/// Free-function form of [`Generator::value`].
pub fn generator_value(g: &Generator, spectra: &SpectrumSet) -> Result<f64> {
    g.value(spectra)
}

/// Free-function form of [`Generator::site_permutations`].
pub fn site_permutations(g: &Generator, n: usize) -> Result<Vec<Permutation>> {
    g.site_permutations(n)
}

/// Dual-variable generators for level `k`, one per conjugacy class, identity first.
pub fn enumerate_generators(subsystems: &[Subsystem], k: usize, mode: Mode) -> Vec<Generator> {
    let mut types: Vec<(usize, Subsystem)> = Vec::new();
    for len in 2..=k {
        for a in subsystems {
            types.push((len, a.clone()));
        }
    }
    types.sort();
    types.dedup();

    let mut shapes: Vec<Vec<(usize, Subsystem)>> = vec![Vec::new()];
    match mode {
        Mode::Cycles => shapes.extend(types.iter().map(|t| vec![t.clone()])),
        Mode::Factorizing => {
            let mut current = Vec::new();
            multisets(&types, 0, k, &mut current, &mut shapes);
        }
    }
    let mut gens: Vec<Generator> = shapes
        .into_iter()
        .map(|s| Generator::canonical(k, s).expect("enumerated shapes fit in k copies"))
        .collect();
    gens.sort_by_key(|g| (g.atoms.len(), g.shape()));
    gens.dedup();
    gens
}

fn multisets(
    types: &[(usize, Subsystem)],
    start: usize,
    budget: usize,
    current: &mut Vec<(usize, Subsystem)>,
    out: &mut Vec<Vec<(usize, Subsystem)>>,
) {
    for i in start..types.len() {
        let len = types[i].0;
        if len > budget {
            break;
        }
        current.push(types[i].clone());
        out.push(current.clone());
        multisets(types, i, budget - len, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marginals::flat_spectrum;

    fn sub(v: &[usize]) -> Subsystem {
        Subsystem::new(v.to_vec()).unwrap()
    }

    fn pairs3() -> Vec<Subsystem> {
        vec![sub(&[1, 2]), sub(&[1, 3]), sub(&[2, 3])]
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(enumerate_generators(&pairs3(), 2, Mode::Cycles).len(), 4);
        assert_eq!(enumerate_generators(&pairs3(), 3, Mode::Cycles).len(), 7);
        assert!(enumerate_generators(&pairs3(), 2, Mode::Cycles)[0].is_identity());
    }

    #[test]
    fn factorizing_equals_cycles_up_to_three_copies() {
        for k in 1..=3 {
            assert_eq!(
                enumerate_generators(&pairs3(), k, Mode::Cycles),
                enumerate_generators(&pairs3(), k, Mode::Factorizing)
            );
        }
    }

    #[test]
    fn factorizing_four_copies() {
        let subs = vec![sub(&[1, 2]), sub(&[2, 3])];
        let gens = enumerate_generators(&subs, 4, Mode::Factorizing);
        // identity, 2 subsystems x lengths {2,3,4}, and 3 two-atom products
        assert_eq!(gens.len(), 1 + 6 + 3);
        let target = Generator::canonical(4, vec![(2, sub(&[1, 2])), (2, sub(&[2, 3]))]).unwrap();
        assert!(gens.contains(&target));

        let spectra = SpectrumSet::new(
            3,
            vec![(sub(&[1, 2]), vec![0.7, 0.3]), (sub(&[2, 3]), vec![0.6, 0.4])],
        )
        .unwrap();
        let q12 = 0.49 + 0.09;
        let q23 = 0.36 + 0.16;
        assert!((target.value(&spectra).unwrap() - q12 * q23).abs() < 1e-15);
    }

    #[test]
    fn site_permutation_examples() {
        let id = Generator::identity(3);
        assert!(id.site_permutations(3).unwrap().iter().all(Permutation::is_identity));

        let g = Generator::canonical(2, vec![(2, sub(&[1, 2]))]).unwrap();
        let s = g.site_permutations(3).unwrap();
        assert_eq!(s[0].to_string(), "(1 2)");
        assert_eq!(s[1].to_string(), "(1 2)");
        assert!(s[2].is_identity());

        let g = Generator::canonical(4, vec![(2, sub(&[1, 2])), (2, sub(&[2, 3]))]).unwrap();
        let s: Vec<String> = g.site_permutations(3).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(s, vec!["(1 2)", "(1 2)(3 4)", "(3 4)"]);

        assert!(g.site_permutations(2).is_err());
    }

    #[test]
    fn value_examples() {
        let spectra = SpectrumSet::new(
            3,
            vec![(sub(&[1, 2]), vec![1.0, 0.0]), (sub(&[2, 3]), flat_spectrum(2))],
        )
        .unwrap();
        assert_eq!(Generator::identity(4).value(&spectra).unwrap(), 1.0);
        let single = Generator::canonical(2, vec![(2, sub(&[2, 3]))]).unwrap();
        assert_eq!(single.value(&spectra).unwrap(), 0.5);
        let pair = Generator::canonical(4, vec![(2, sub(&[1, 2])), (2, sub(&[2, 3]))]).unwrap();
        assert_eq!(pair.value(&spectra).unwrap(), 0.5);
        let unknown = Generator::canonical(2, vec![(2, sub(&[1, 3]))]).unwrap();
        assert!(unknown.value(&spectra).is_err());
    }

    #[test]
    fn invalid_generators() {
        let a = Atom { subsystem: sub(&[1]), support: vec![1, 2] };
        let b = Atom { subsystem: sub(&[2]), support: vec![2, 3] };
        assert!(Generator::new(3, vec![a.clone(), b]).is_err());
        assert!(Generator::new(1, vec![a]).is_err());
        let short = Atom { subsystem: sub(&[1]), support: vec![1] };
        assert!(Generator::new(3, vec![short]).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let g = Generator::canonical(4, vec![(2, sub(&[2, 3])), (2, sub(&[1, 2]))]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: Generator = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
