//! Symmetric-group combinatorics: partitions, standard tableaux, Young's
//! orthogonal representation, characters and conjugation orbits.

mod character;
mod partition;
mod permutation;
mod tableau;
mod young;

pub use character::character_mn;
pub use partition::{enumerate_partitions, Partition};
pub use permutation::{conjugation_orbit, Permutation};
pub use tableau::{syt_enumerate, StandardTableau};
pub use young::{rep_matrix, yor_generator, RepTable, YoungRep};

/// Number of standard tableaux of shape `shape`.
pub fn hook_dimension(shape: &Partition) -> usize {
    shape.hook_dimension()
}
