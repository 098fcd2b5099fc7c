use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An integer partition: positive, weakly decreasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return invalid("partition must have at least one part");
        }
        if parts.contains(&0) {
            return invalid(format!("partition parts must be positive: {parts:?}"));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return invalid(format!("partition parts must be weakly decreasing: {parts:?}"));
        }
        Ok(Partition { parts })
    }

    /// Sorts and drops zeros, then builds the partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Result<Self> {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn height(&self) -> usize {
        self.parts.len()
    }

    /// Number of boxes in column `j` (0-based).
    pub fn column_len(&self, j: usize) -> usize {
        self.parts.iter().take_while(|&&p| p > j).count()
    }

    /// Number of standard tableaux of this shape, from the hook-length formula.
    pub fn hook_dimension(&self) -> usize {
        let k = self.weight();
        // k! / prod(hooks), computed with u128 to stay exact for the sizes used here
        let mut num: u128 = 1;
        for i in 2..=k as u128 {
            num *= i;
        }
        let mut den: u128 = 1;
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row {
                let arm = row - j - 1;
                let leg = self.column_len(j) - i - 1;
                den *= (arm + leg + 1) as u128;
            }
        }
        (num / den) as usize
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = crate::Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Accepts `2,1,1` with or without surrounding parentheses.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad partition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All partitions of `k` with at most `max_height` parts, in lexicographically
/// decreasing order.
pub fn enumerate_partitions(k: usize, max_height: usize) -> Result<Vec<Partition>> {
    if k == 0 || max_height == 0 {
        return invalid(format!(
            "enumerate_partitions needs k >= 1 and max_height >= 1, got ({k}, {max_height})"
        ));
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(k, k, max_height, &mut current, &mut out);
    Ok(out)
}

fn fill(rest: usize, max_part: usize, slots: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if rest == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    if slots == 0 {
        return;
    }
    for p in (1..=max_part.min(rest)).rev() {
        current.push(p);
        fill(rest - p, p, slots - 1, current, out);
        current.pop();
    }
}
