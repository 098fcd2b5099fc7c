use crate::assembler::{size_report, SizeReport};
use crate::error::Result;

/// Rows `(label, n, d, k)` of the standard variable-count table.
pub fn standard_rows() -> Vec<(String, usize, usize, usize)> {
    let mut rows = Vec::new();
    let mut push = |label: &str, n, d, ks: std::ops::RangeInclusive<usize>| {
        for k in ks {
            rows.push((label.to_string(), n, d, k));
        }
    };
    push("2 qubits", 2, 2, 2..=7);
    push("3 qubits", 3, 2, 2..=5);
    push("4 qubits", 4, 2, 2..=4);
    push("5 qubits", 5, 2, 2..=4);
    push("2 qutrits", 2, 3, 3..=6);
    push("3 qutrits", 3, 3, 3..=5);
    push("4 qutrits", 4, 3, 3..=4);
    push("2 ququarts", 2, 4, 4..=5);
    push("3 ququarts", 3, 4, 4..=5);
    push("4 ququarts", 4, 4, 4..=4);
    rows
}

pub fn dims_table(rows: &[(String, usize, usize, usize)]) -> Result<Vec<(String, SizeReport)>> {
    rows.iter()
        .map(|(label, n, d, k)| Ok((label.clone(), size_report(*n, *d, *k)?)))
        .collect()
}

pub const DIMS_CSV_HEADER: &str = "system,n,d,k,n_naive,n_sym,blocks,max_block";

pub fn dims_csv_row(label: &str, r: &SizeReport) -> String {
    format!("{label},{},{},{},{:.6e},{},{},{}", r.n, r.d, r.k, r.n_naive, r.n_sym, r.block_count, r.max_block)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_rows() {
        let r = size_report(2, 2, 4).unwrap();
        assert_eq!((r.n_naive, r.n_sym, r.block_count, r.max_block), (32896.0, 116, 9, 9));
        let r = size_report(3, 2, 5).unwrap();
        assert!((r.n_naive / 5.3e8 - 1.0).abs() < 0.02);
        assert_eq!((r.n_sym, r.block_count, r.max_block), (37544, 27, 125));
        let r = size_report(4, 3, 3).unwrap();
        assert!((r.n_naive / 1.4e11 - 1.0).abs() < 0.03);
        assert_eq!((r.n_sym, r.block_count, r.max_block), (776, 81, 16));
        assert_eq!(dims_table(&standard_rows()).unwrap().len(), 30);
    }
}
