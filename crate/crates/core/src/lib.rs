//! Uniform spanning trees of dense graphs: Wilson sampling, loop-erased
//! walks, spectral gaps and Cheeger constants, good decompositions, and
//! bubble-sum diameter bounds.
//!
//! Numeric code is generic over [`Scalar`] (`f64` or `f32`); the aliases
//! below fix the precision for the common cases.

pub mod cheeger;
pub mod decomposition;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod network;
pub mod partition;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod ust;
pub mod walk;

/// Schema tag carried by every report.
pub const SCHEMA: &str = "ustlab/1";

pub use cheeger::{cheeger_comparison_constant, cheeger_exact, cheeger_sweep};
pub use decomposition::{coarsen, good_decomposition, primary_decomposition, verify_good, verify_primary, GoodDecomposition, PrimaryAudit};
pub use error::{Error, Result};
pub use estimators::{bubble_sum, diameter_tail_bound, mns_c3, probe_hit_large_set, probe_stay_in_block, BubbleSumResult};
pub use generators::Family;
pub use graph::{Graph, VertexSet};
pub use network::{augment_rho, ContractionMap, Network};
pub use partition::{h_graph, Partition};
pub use rng::RngStream;
pub use scalar::{DenseMatrix, Scalar};
pub use spectral::{spectrum, ChainMode, SpectralSummary};
pub use ust::{loop_erase, spanning_tree_count, wilson, LoopErasedPath, SpanningTree, TreeCount, WilsonSampler};
pub use walk::{Distribution, StopRule, WalkMode, WalkTrace};

pub type Network64 = Network<f64>;
pub type Network32 = Network<f32>;
pub type Distribution64 = Distribution<f64>;
pub type Distribution32 = Distribution<f32>;
pub type SpectralSummary64 = SpectralSummary<f64>;
pub type SpectralSummary32 = SpectralSummary<f32>;
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type DenseMatrix32 = DenseMatrix<f32>;
