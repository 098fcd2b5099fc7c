//! Problem statement: subsystems, prescribed spectra, power-sum targets and the
//! permutation generators that carry them.

mod generator;
mod problem;
mod spectra;

pub use generator::{enumerate_generators, generator_value, site_permutations, Atom, Generator, Mode};
pub use problem::{ProblemFile, PROBLEM_VERSION};
pub use spectra::{flat_spectrum, power_sum, SpectrumSet, Subsystem};
