use std::collections::HashMap;

use crate::error::{invalid, Result};

use super::Partition;

/// Irreducible character `χ^shape` at the class of cycle type `cycle_type`,
/// by the Murnaghan–Nakayama rule.
///
/// Border strips are removed on the beta-set (abacus) of the shape: removing a
/// strip of length `r` moves one bead from `b` to `b - r`, with sign
/// `(-1)^(beads strictly between)`, which equals `(-1)^(strip height - 1)`.
pub fn character_mn(shape: &Partition, cycle_type: &Partition) -> Result<i64> {
    if shape.weight() != cycle_type.weight() {
        return invalid(format!(
            "character of {shape} (weight {}) at cycle type {cycle_type} (weight {})",
            shape.weight(),
            cycle_type.weight()
        ));
    }
    let len = shape.height();
    let beta: Vec<usize> = shape
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &p)| p + len - 1 - i)
        .collect();
    let mut memo = HashMap::new();
    Ok(mn(beta, cycle_type.parts(), &mut memo))
}

fn mn(beta: Vec<usize>, cycles: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&r, rest)) = cycles.split_first() else {
        return 1;
    };
    let key = (beta.clone(), cycles.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let target = b - r;
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[idx] = target;
        total += sign * mn(next, rest, memo);
    }
    memo.insert(key, total);
    total
}
