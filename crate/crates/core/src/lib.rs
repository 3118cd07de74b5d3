//! Graph-based approximate nearest neighbor search with interchangeable
//! termination rules, navigable graph construction and pruning, and a small
//! benchmark harness that counts distance computations.

pub mod bench;
pub mod dataset;
pub mod error;
pub mod graphs;
pub mod io;
pub mod search;
pub mod synthetic;

pub use dataset::{brute_force_knn, CountedEvaluator, Dataset, GroundTruth, Metric};
pub use error::{Error, Result};
pub use graphs::SearchGraph;
pub use search::{SearchResult, SearchStats, TerminationRule};
