//! Graph clustering with limited random walks.
//!
//! A walk starts with all probability on one seed vertex and repeatedly
//! applies the transition `P = (I + A)(I + D)^-1`, drops entries below a
//! threshold, raises the remaining entries to a power `r > 1` and
//! renormalizes. The inflation keeps the walk near the seed, and the vector it
//! settles on describes the cluster around the seed.
//!
//! * [`graph`]: compressed adjacency graphs and edge-list loading.
//! * [`walk`]: the walk itself.
//! * [`cluster`]: global (multi-stage) and local clustering.
//! * [`generators`]: planted-partition and power-law benchmarks.
//! * [`metrics`]: NMI, conductance, Jaccard index, sampled Rand index.
//! * [`io`]: clustering and ground-truth file formats.

pub mod cluster;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod rng;
pub mod walk;

pub use cluster::{
    cluster_global, cluster_local, local_from_features, Cluster, ClusterDictionary, ClusterEntry,
    Clustering, GlobalOptions, GlobalRun, LocalCluster, RunStats, Workers,
};
pub use error::{Error, Result};
pub use generators::{
    generate_planted, generate_powerlaw, LabeledGraph, PlantedPartitionSpec, PowerLawSpec,
};
pub use graph::{load_edge_list, Graph, IdMap, LoadedGraph, VertexId};
pub use metrics::{GroundTruth, RandIndex};
pub use walk::{explore, LrwParams, SparseProbVector, WalkOutcome, Walker};
