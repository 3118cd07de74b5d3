//! Search graphs: storage and file format, navigable construction, pruning,
//! verifiers and constructed instances.

mod build;
mod distances;
mod graph;
mod instances;
mod prune;
mod verify;

pub use build::{
    build_navigable, build_navigable_with, navigable_degree_plan, navigable_out_degree,
};
pub use distances::{DistanceTable, Distances, PairDistance, DEFAULT_MEMORY_BUDGET};
pub use graph::{load_graph, save_graph, SearchGraph};
pub use instances::{
    counterexample_instance, hypercube_dimension, pairwise_summary, random_hypercube_instance,
    random_hypercube_instance_with, Counterexample, PairwiseSummary, COUNTEREXAMPLE_EPS,
    HYPERCUBE_C, HYPERCUBE_NOISE,
};
pub use prune::{prune_navigable, prune_navigable_with, prune_unchecked};
pub use verify::{
    find_alpha_detour, is_alpha_shortcut_reachable, is_navigable, navigability_with,
    pair_is_covered, NavigabilityReport,
};
