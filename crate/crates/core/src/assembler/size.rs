use serde::Serialize;

use crate::error::{invalid, Result};
use crate::permrep::enumerate_partitions;

use super::blocks::tri;

/// Variable counts of the naive and the symmetry-reduced programs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    /// `D(D+1)/2` with `D = d^{nk}`, as a float since it overflows quickly.
    pub n_naive: f64,
    pub n_sym: u64,
    pub block_count: usize,
    pub max_block: usize,
}

/// Counts without building any coefficient matrix.
pub fn size_report(n: usize, d: usize, k: usize) -> Result<SizeReport> {
    if n == 0 || d == 0 || k == 0 {
        return invalid("size_report needs n, d, k >= 1");
    }
    let dims: Vec<usize> = enumerate_partitions(k, d)?.iter().map(|p| p.hook_dimension()).collect();
    // distribution of block dimensions over n-fold products
    let mut counts: Vec<(usize, u64)> = vec![(1, 1)];
    for _ in 0..n {
        let mut next: Vec<(usize, u64)> = Vec::new();
        for &(dim, c) in &counts {
            for &f in &dims {
                let nd = dim * f;
                match next.iter_mut().find(|(x, _)| *x == nd) {
                    Some(entry) => entry.1 += c,
                    None => next.push((nd, c)),
                }
            }
        }
        counts = next;
    }
    let big_d = (d as f64).powi((n * k) as i32);
    Ok(SizeReport {
        n,
        d,
        k,
        n_naive: big_d * (big_d + 1.0) / 2.0,
        n_sym: counts.iter().map(|&(dim, c)| c * tri(dim)).sum(),
        block_count: dims.len().pow(n as u32),
        max_block: counts.iter().map(|&(dim, _)| dim).max().unwrap_or(1),
    })
}
