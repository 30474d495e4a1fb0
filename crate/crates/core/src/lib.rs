//! Hardware-aware multi-objective neural-architecture-search engine.
//!
//! The search runs NSGA-II over a fixed 4-node cell space with three
//! objectives: maximize a precomputed representation-similarity score,
//! minimize a per-device hardware cost read from a benchmark table, and
//! maximize a population-coupled hardware-cost-diversity term that keeps
//! the population spread across the cost axis. A single run returns a
//! Pareto archive of every evaluated architecture together with its
//! non-dominated (similarity, cost) front.
//!
//! Modules:
//! - [`searchspace`]: cell encoding, index bijection, variation operators.
//! - [`objectives`]: the three objective computations and a histogram
//!   mutual-information estimator for externally supplied feature maps.
//! - [`moea`]: NSGA-II machinery, the generation loop, and the archive.
//! - [`benchmark`]: table ingestion, synthetic benchmark generation, and
//!   exact oracles (Pareto front, hypervolume).
//!
//! ```
//! use phdnas_core::{generate_synthetic, run_search, SearchConfig, SyntheticParams};
//!
//! let table = generate_synthetic(1, &SyntheticParams::default());
//! let mut config = SearchConfig::new(table.devices()[0].clone());
//! config.n_gen = 5;
//! let result = run_search(&config, &table).unwrap();
//! assert!(!result.archive.front().is_empty());
//! assert!(result.distinct_evaluations <= config.n_pop * (config.n_gen + 1));
//! ```

pub mod benchmark;
pub mod error;
pub mod moea;
pub mod objectives;
pub mod searchspace;

pub use benchmark::{
    exact_pareto_front, generate_synthetic, hypervolume_2d, load_benchmark, reference_point,
    save_benchmark, BenchmarkTable, MetricRow, SyntheticParams,
};
pub use error::{Error, Result};
pub use moea::{
    run_search, ObjectiveMode, ParetoArchive, Population, SearchConfig, SearchResult,
};
pub use objectives::{DeviceId, FeatureSample, ObjectiveVector, Sense};
pub use searchspace::{ArchIndex, Genotype, OpCode, NUM_EDGES, NUM_OPS, SPACE_SIZE};
