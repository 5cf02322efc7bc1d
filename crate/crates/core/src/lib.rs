// SPDX-License-Identifier: Apache-2.0

//! Fairness-aware graph filters.
//!
//! Designs spectral filters that suppress the correlation between a graph
//! aggregation and a binary sensitive attribute, applies them to node
//! signals, and evaluates the effect on GCN and label propagation
//! classifiers.
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── spectrum.rs                    # Laplacian spectrum, spectra of s and y
//! ├── design_filters.rs              # direct, LP and polynomial designs compared
//! ├── polynomial_filter.rs           # polynomial design, vertex-domain application
//! ├── gcn_preprocessing.rs           # GCN with the filter at each placement
//! ├── label_prop_postprocessing.rs   # label propagation with a post-filter
//! ├── effective_operator.rs          # intra/inter weight of the filtered aggregation
//! ├── tau_sweep.rs                   # fairness/accuracy trade-off over tau
//! └── csv_dataset.rs                 # reading and writing edges/nodes CSV
//! ```
//!
//! Run one with `cargo run --release --example design_filters`.
//!
//! ## Modules
//!
//! - [`graph`]: adjacency and the normalized operators `Â`, `L = I - Â`.
//! - [`spectral`]: Jacobi eigendecomposition and the graph Fourier transform.
//! - [`metrics`]: bias measure `ρ`, its linear bound, group fairness metrics.
//! - [`design`]: direct, closed-form LP and polynomial filter design.
//! - [`apply`]: filtering in the frequency and vertex domains.
//! - [`learners`]: two-layer GCN and label propagation.
//! - [`data`]: CSV datasets, SBM generator, stratified splits.
//! - [`cli`]: the `fairfilt` command line.

pub mod apply;
pub mod cli;
pub mod data;
pub mod design;
pub mod error;
pub mod graph;
pub mod learners;
pub mod metrics;
pub mod spectral;

pub use error::{Error, Result};
