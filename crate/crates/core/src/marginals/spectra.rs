use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A nonempty set of sites, stored sorted, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Subsystem(Vec<usize>);

impl Subsystem {
    pub fn new(mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        if sites.is_empty() {
            return invalid("subsystem must be nonempty");
        }
        if sites[0] == 0 {
            return invalid("sites are 1-based");
        }
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("repeated site in subsystem {sites:?}"));
        }
        Ok(Subsystem(sites))
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, site: usize) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Key used in problem files, e.g. `"1,3"`.
    pub fn key(&self) -> String {
        self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl TryFrom<Vec<usize>> for Subsystem {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Subsystem::new(v)
    }
}

impl From<Subsystem> for Vec<usize> {
    fn from(s: Subsystem) -> Self {
        s.0
    }
}

impl FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad subsystem key {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Subsystem::new(sites)
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// `Σ μᵢ^ℓ`.
pub fn power_sum(mu: &[f64], ell: usize) -> Result<f64> {
    if ell < 1 {
        return invalid("power_sum needs ell >= 1");
    }
    Ok(mu.iter().map(|&m| m.powi(ell as i32)).sum())
}

/// Prescribed spectra on a collection of subsystems of `n` sites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    n: usize,
    entries: Vec<(Subsystem, Vec<f64>)>,
}

impl SpectrumSet {
    /// Validates and stores spectra, each sorted in weakly decreasing order.
    /// Subsystem order is preserved.
    pub fn new(n: usize, entries: Vec<(Subsystem, Vec<f64>)>) -> Result<Self> {
        if n == 0 {
            return invalid("need at least one site");
        }
        let mut out: Vec<(Subsystem, Vec<f64>)> = Vec::with_capacity(entries.len());
        for (a, mut mu) in entries {
            if a.sites().iter().any(|&s| s > n) {
                return invalid(format!("subsystem {a} exceeds n = {n}"));
            }
            if out.iter().any(|(b, _)| *b == a) {
                return invalid(format!("duplicate subsystem {a}"));
            }
            if mu.is_empty() {
                return invalid(format!("empty spectrum on {a}"));
            }
            if mu.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return invalid(format!("spectrum on {a} has negative or non-finite entries"));
            }
            let total: f64 = mu.iter().sum();
            if (total - 1.0).abs() > SUM_TOL {
                return invalid(format!("spectrum on {a} sums to {total}, not 1"));
            }
            mu.sort_by(|x, y| y.total_cmp(x));
            out.push((a, mu));
        }
        Ok(SpectrumSet { n, entries: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subsystems(&self) -> Vec<Subsystem> {
        self.entries.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn entries(&self) -> &[(Subsystem, Vec<f64>)] {
        &self.entries
    }

    pub fn spectrum(&self, a: &Subsystem) -> Option<&[f64]> {
        self.entries.iter().find(|(b, _)| b == a).map(|(_, mu)| mu.as_slice())
    }

    /// Longest spectrum length over all subsystems relative to `d^|A|`; `true`
    /// when every spectrum fits local dimension `d` (zero padding assumed).
    pub fn fits_dimension(&self, d: usize) -> bool {
        self.entries.iter().all(|(a, mu)| {
            let cap = (d as f64).powi(a.len() as i32);
            let nonzero = mu.iter().filter(|&&x| x > 0.0).count();
            (nonzero as f64) <= cap
        })
    }
}

/// Flat spectrum of rank `r`: `r` entries equal to `1/r`.
pub fn flat_spectrum(rank: usize) -> Vec<f64> {
    vec![1.0 / rank as f64; rank]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sub(v: &[usize]) -> Subsystem {
        Subsystem::new(v.to_vec()).unwrap()
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(&[0.5, 0.5], 2).unwrap(), 0.5);
        assert_eq!(power_sum(&[1.0, 0.0], 3).unwrap(), 1.0);
        for r in 1..6 {
            for ell in 1..5 {
                let expect = (r as f64).powi(1 - ell as i32);
                assert!((power_sum(&flat_spectrum(r), ell).unwrap() - expect).abs() < 1e-14);
            }
        }
        assert!(power_sum(&[1.0], 0).is_err());
    }

    #[test]
    fn subsystem_parsing() {
        assert_eq!("2, 1".parse::<Subsystem>().unwrap(), sub(&[1, 2]));
        assert!("1,1".parse::<Subsystem>().is_err());
        assert!("0".parse::<Subsystem>().is_err());
        assert!("x".parse::<Subsystem>().is_err());
        assert_eq!(sub(&[3, 1]).key(), "1,3");
    }

    #[test]
    fn spectrum_set_validation() {
        let ok = SpectrumSet::new(2, vec![(sub(&[1]), vec![0.25, 0.75])]).unwrap();
        assert_eq!(ok.spectrum(&sub(&[1])).unwrap(), &[0.75, 0.25]);
        assert!(SpectrumSet::new(2, vec![(sub(&[1]), vec![0.5, 0.6])]).is_err());
        assert!(SpectrumSet::new(2, vec![(sub(&[1]), vec![1.5, -0.5])]).is_err());
        assert!(SpectrumSet::new(2, vec![(sub(&[3]), vec![1.0])]).is_err());
        assert!(SpectrumSet::new(2, vec![(sub(&[1]), vec![1.0]), (sub(&[1]), vec![1.0])]).is_err());
    }

    #[test]
    fn dimension_fit() {
        let s = SpectrumSet::new(2, vec![(sub(&[1]), flat_spectrum(3))]).unwrap();
        assert!(!s.fits_dimension(2));
        assert!(s.fits_dimension(3));
    }

    proptest! {
        #[test]
        fn power_sums_normalized_and_monotone(raw in proptest::collection::vec(0.0f64..1.0, 1..8)) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
            prop_assert!((power_sum(&mu, 1).unwrap() - 1.0).abs() < 1e-12);
            for ell in 1..6 {
                prop_assert!(power_sum(&mu, ell + 1).unwrap() <= power_sum(&mu, ell).unwrap() + 1e-15);
            }
        }
    }
}
