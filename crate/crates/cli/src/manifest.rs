//! JSON run manifest written next to the archive.

use serde::Serialize;

use phdnas_core::SearchConfig;

/// Echo of every search parameter, plus the run's measured statistics.
#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub config: ConfigEcho,
    pub seed: u64,
    pub duration_seconds: f64,
    pub distinct_evaluations: usize,
    pub evaluation_budget: usize,
    pub generations: usize,
    /// Population diversity of each generation, index 0 = initial population.
    pub population_diversity: Vec<f64>,
    pub archive_size: usize,
    pub archive_front: FrontSummary,
}

#[derive(Serialize, Debug)]
pub struct ConfigEcho {
    pub n_pop: usize,
    pub n_gen: usize,
    pub device: String,
    pub mutation_rate: f64,
    pub crossover_prob: f64,
    pub objectives: u8,
    pub normalize_costs: bool,
    pub seed: u64,
}

#[derive(Serialize, Debug)]
pub struct FrontSummary {
    pub size: usize,
    pub hypervolume: f64,
}

impl ConfigEcho {
    pub fn from_config(config: &SearchConfig, objectives: u8) -> Self {
        ConfigEcho {
            n_pop: config.n_pop,
            n_gen: config.n_gen,
            device: config.device.name().to_string(),
            mutation_rate: config.mutation_rate,
            crossover_prob: config.crossover_prob,
            objectives,
            normalize_costs: config.normalize_costs,
            seed: config.seed,
        }
    }
}
