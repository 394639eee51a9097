//! Core numerics for compressing sparse 3D detector volumes as implicit
//! neural representations.
//!
//! The crate is split along the pipeline:
//! - [`volume`]: the dense `(c, z, r)` ADC grid, its binary layout,
//!   normalization rules, and a synthetic sparse-track generator,
//! - [`nn`]: dense-stack forward/backward passes, finite-difference
//!   gradient checking, and the Adam optimizer,
//! - [`models`]: the four coordinate-network architectures (MLP, FFNet,
//!   SIREN, WIRE) as constructible parameter bundles,
//! - [`sampling`]: importance, entropy-based, and uniform training-point
//!   selection,
//! - [`codec`]: the compressed artifact, its byte format, and
//!   arbitrary-resolution decoding.
//!
//! Everything here is deterministic given explicit seeds and works without
//! `std` (the `std` feature, on by default, only swaps in the platform math
//! routines and enables runtime SIMD selection in the matrix kernels).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod codec;
pub(crate) mod math;
pub mod models;
pub mod nn;
pub mod sampling;
pub mod volume;

pub use codec::{CompressedArtifact, ErrorSummary, Precision};
pub use models::{ModelKind, ModelParams, ModelSpec};
pub use nn::{Activation, AdamHyper, AdamState, LayerGrads, LayerParams};
pub use sampling::{BinAllocation, HistogramModel, ImportanceWeights, SampleSet};
pub use volume::{Dims, SynthConfig, Volume3D};
