use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Result};

use super::Partition;

/// A permutation of `{0, …, k-1}` in one-line form: `images[i]` is the image of `i`.
///
/// Composition follows function composition: `a.compose(&b)` maps `x` to `a(b(x))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation { images: (0..k).collect() }
    }

    /// Builds from 0-based one-line form.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &x in &images {
            if x >= k || seen[x] {
                return invalid(format!("not a bijection on 0..{k}: {images:?}"));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a single cycle on `k` points from 0-based entries `c[0] -> c[1] -> … -> c[0]`.
    pub fn cycle(k: usize, cycle: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut seen = BTreeSet::new();
        for &c in cycle {
            if c >= k || !seen.insert(c) {
                return invalid(format!("bad cycle {cycle:?} in S_{k}"));
            }
        }
        for (i, &c) in cycle.iter().enumerate() {
            images[c] = cycle[(i + 1) % cycle.len()];
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "composing permutations of different degree");
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Permutation { images }
    }

    /// `pi ∘ self ∘ pi⁻¹`.
    pub fn conjugate_by(&self, pi: &Permutation) -> Permutation {
        pi.compose(self).compose(&pi.inverse())
    }

    /// Cycles including fixed points, each starting at its smallest element,
    /// ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    pub fn cycle_type(&self) -> Partition {
        let lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        Partition::from_unsorted(lens).expect("cycle lengths form a partition")
    }

    /// Adjacent transpositions `s_j = (j, j+1)` (0-based `j`) whose product, left to
    /// right, equals `self`. Obtained by bubble-sorting the one-line form.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut w = self.images.clone();
        let mut swaps = Vec::new();
        loop {
            let mut changed = false;
            for j in 0..w.len().saturating_sub(1) {
                if w[j] > w[j + 1] {
                    w.swap(j, j + 1);
                    swaps.push(j);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // self ∘ s_{j1} ∘ … ∘ s_{jm} = id, so self = s_{jm} ∘ … ∘ s_{j1}
        swaps.reverse();
        swaps
    }

    /// All permutations of `k` points in lexicographic order of one-line form.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..k).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..k).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", x + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Orbit of a tuple of permutations under simultaneous conjugation by `S_k`.
///
/// Returned sorted and deduplicated.
pub fn conjugation_orbit(tuple: &[Permutation]) -> Result<Vec<Vec<Permutation>>> {
    let Some(first) = tuple.first() else {
        return Ok(vec![vec![]]);
    };
    let k = first.degree();
    if tuple.iter().any(|s| s.degree() != k) {
        return invalid("conjugation_orbit: permutations of mixed degree");
    }
    let orbit: BTreeSet<Vec<Permutation>> = Permutation::all(k)
        .iter()
        .map(|pi| tuple.iter().map(|s| s.conjugate_by(pi)).collect())
        .collect();
    Ok(orbit.into_iter().collect())
}
