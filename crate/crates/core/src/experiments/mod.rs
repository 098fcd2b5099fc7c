//! Reproducible experiments built on the library: boundary scans of rank-2
//! three-qubit marginals, flat-spectra cells, purity inequalities, the
//! Kronecker preset and variable-count tables.

mod dims;
mod flat;
mod kron;
mod purity;
mod scan;

pub use dims::{dims_csv_row, dims_table, standard_rows, DIMS_CSV_HEADER};
pub use flat::{flat_csv_row, run_flat, FlatRow, FlatSpectraJob, FLAT_CSV_HEADER};
pub use kron::KroneckerJob;
pub use purity::{
    alpha_from_bc, compare_witness, four_copy_purity, pair_moments, purity_check, stated_witness, two_copy_purity,
    PairMoments, PurityReport, WitnessComparison, ALPHA, B, C,
};
pub use scan::{
    default_angles, four_copy_symmetric_root, rank2_triple, scan_boundary, scan_csv, two_copy_lhs, LineStatus, ScanJob,
    ScanLine, SCAN_CSV_HEADER,
};
