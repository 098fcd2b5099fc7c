//! Symmetry-reduced block SDP: one block per tuple of Young diagrams of height
//! at most `d`, with orbit-averaged coefficient matrices per generator.

mod blocks;
mod reduced;
pub mod sdpa;
mod size;

pub use blocks::{
    assemble, assemble_generators, assemble_with, block_keys, generator_orbit, orbit_block, AssembleOptions, Block,
    BlockKey, BlockSdp, DEFAULT_BLOCK_CAP,
};
pub use reduced::ReducedForm;
pub use sdpa::{export_sdpa, read_sdpa, read_solution, SdpaProblem, SdpaSolution};
pub use size::{size_report, SizeReport};
