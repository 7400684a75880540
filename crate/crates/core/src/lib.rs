//! Real-valued multiset algebra and its extension to sampled functions.
//!
//! * [`mset`]: msets with signed real multiplicities and their operations.
//! * [`mfunction`]: sampled functions and 2-D fields as dense msets.
//! * [`similarity`]: mproduct, common and sup products, Jaccard and cosine
//!   indices.
//! * [`signal`]: mconvolution, mcorrelation, similarity correlation and
//!   peak analysis for template matching.
//! * [`transform`]: greedy basis decomposition and the Walsh basis.
//! * [`density`]: KDE densities of labeled clusters and their Jaccard
//!   comparison.
//! * [`expr`]: parser and evaluator for hybrid set/arithmetic expressions.
//! * [`cli`]: the `multikit` command line.

pub mod cli;
pub mod density;
pub mod error;
pub mod expr;
pub mod format;
pub mod mfunction;
pub mod mset;
pub mod signal;
pub mod similarity;
pub mod transform;

pub use error::{Error, Result};
pub use mfunction::{Builtin, Field2D, Grid1D, Grid2D, IndexMap, MFunction, PointwiseOp};
pub use mset::{CardinalityMode, CombineOp, Element, Mset, SupportMode};
pub use signal::{LagSeries, PeakReport};
pub use similarity::{CosineVariant, SimilarityKind, SimilarityReport};
