//! `phdnas run`: execute a search and write `archive.csv` plus
//! `manifest.json` into the output directory.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use phdnas_core::{
    hypervolume_2d, load_benchmark, reference_point, run_search, DeviceId, ObjectiveMode,
    ParetoArchive, SearchConfig,
};

use crate::manifest::{ConfigEcho, FrontSummary, RunManifest};
use crate::{write_output_file, CliError};

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Benchmark CSV covering the full search space.
    #[arg(long)]
    pub bench: PathBuf,
    /// Device whose cost column drives the search.
    #[arg(long)]
    pub device: String,
    /// Population size (even, at least 2).
    #[arg(long, default_value_t = 20)]
    pub pop: usize,
    /// Number of generations after the initial evaluation.
    #[arg(long, default_value_t = 100)]
    pub gen: usize,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 3 for the full problem, 2 to disable the diversity objective.
    #[arg(long, default_value_t = 3)]
    pub objectives: u8,
    /// Output directory for archive.csv and manifest.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn objective_mode(objectives: u8) -> Result<ObjectiveMode, CliError> {
    match objectives {
        3 => Ok(ObjectiveMode::ThreeObjective),
        2 => Ok(ObjectiveMode::TwoObjective),
        other => Err(CliError::Domain(format!(
            "--objectives must be 2 or 3, got {other}"
        ))),
    }
}

/// Archive CSV: every evaluated architecture, flagged with front membership.
pub fn archive_to_csv(archive: &ParetoArchive) -> String {
    let mut out = String::from("index,genotype,similarity,cost,on_front\n");
    for (index, entry) in archive.entries() {
        let on_front = archive.front().binary_search(&index).is_ok();
        let _ = writeln!(
            out,
            "{index},{},{},{},{on_front}",
            entry.genotype, entry.similarity, entry.cost
        );
    }
    out
}

pub fn execute(args: RunArgs) -> Result<(), CliError> {
    let mode = objective_mode(args.objectives)?;
    let table = load_benchmark(&args.bench)?;
    let device = DeviceId::from(args.device.as_str());

    let mut config = SearchConfig::new(device.clone());
    config.n_pop = args.pop;
    config.n_gen = args.gen;
    config.seed = args.seed;
    config.objective_mode = mode;

    let started = Instant::now();
    let result = run_search(&config, &table)?;
    let duration_seconds = started.elapsed().as_secs_f64().max(1e-9);

    let reference = reference_point(&table, &device)?;
    let front_hypervolume = hypervolume_2d(&result.archive.front_points(), reference);

    let manifest = RunManifest {
        config: ConfigEcho::from_config(&config, args.objectives),
        seed: config.seed,
        duration_seconds,
        distinct_evaluations: result.distinct_evaluations,
        evaluation_budget: config.n_pop * (config.n_gen + 1),
        generations: result.generations,
        population_diversity: result.diversity_series.clone(),
        archive_size: result.archive.len(),
        archive_front: FrontSummary {
            size: result.archive.front().len(),
            hypervolume: front_hypervolume,
        },
    };

    write_output_file(&args.out, "archive.csv", &archive_to_csv(&result.archive))?;
    let manifest_json =
        serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail");
    write_output_file(&args.out, "manifest.json", &format!("{manifest_json}\n"))?;

    println!(
        "archive: {} architectures, front {} (hypervolume {:.6}), {} distinct evaluations (budget {}), {:.2}s",
        result.archive.len(),
        result.archive.front().len(),
        front_hypervolume,
        result.distinct_evaluations,
        manifest.evaluation_budget,
        duration_seconds
    );
    Ok(())
}
