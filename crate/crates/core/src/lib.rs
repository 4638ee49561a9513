//! Simulator and decoder workbench for the semion code on a torus.

pub mod algebra;
pub mod bits;
pub mod dataset;
pub mod decoders;
pub mod experiments;
pub mod lattice;
pub mod mlp;
pub mod noise;
pub mod rng;
pub mod syndrome;
pub mod verify;
