//! `phdnas ablate`: paired 3-objective vs 2-objective searches over K seeds,
//! emitting the per-generation population-diversity series of both arms and
//! a verdict on the diversity trend.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use clap::Args;

use phdnas_core::{load_benchmark, run_search, DeviceId, ObjectiveMode, SearchConfig, SearchResult};

use crate::{write_output_file, CliError};

/// Seeds below this count make the median trend meaningless.
const MIN_SEEDS_FOR_VERDICT: u64 = 5;

#[derive(Args, Debug)]
pub struct AblateArgs {
    /// Benchmark CSV covering the full search space.
    #[arg(long)]
    pub bench: PathBuf,
    /// Device whose cost column drives both arms.
    #[arg(long)]
    pub device: String,
    /// Number of paired seeds (0, 1, ..., K-1).
    #[arg(long)]
    pub seeds: u64,
    /// Output directory for diversity.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

struct ArmRun {
    arm: &'static str,
    seed: u64,
    series: Vec<f64>,
}

fn arm_label(mode: ObjectiveMode) -> &'static str {
    match mode {
        ObjectiveMode::ThreeObjective => "3obj",
        ObjectiveMode::TwoObjective => "2obj",
    }
}

/// Parallelism cap: `PHDNAS_THREADS`, with 0 or unset meaning auto.
fn thread_cap(jobs: usize) -> Result<usize, CliError> {
    let configured = match std::env::var("PHDNAS_THREADS") {
        Err(_) => 0,
        Ok(raw) => raw.trim().parse::<usize>().map_err(|_| {
            CliError::Domain(format!("PHDNAS_THREADS must be a non-negative integer, got {raw:?}"))
        })?,
    };
    let auto = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = if configured == 0 { auto } else { configured };
    Ok(cap.max(1).min(jobs.max(1)))
}

/// Run every configuration, at most `cap` at a time; results keep job order.
fn run_all(
    configs: &[(ObjectiveMode, SearchConfig)],
    table: &phdnas_core::BenchmarkTable,
    cap: usize,
) -> Result<Vec<SearchResult>, CliError> {
    let slots: Vec<OnceLock<phdnas_core::Result<SearchResult>>> =
        (0..configs.len()).map(|_| OnceLock::new()).collect();
    let cursor = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..cap {
            scope.spawn(|| loop {
                let job = cursor.fetch_add(1, Ordering::Relaxed);
                if job >= configs.len() {
                    break;
                }
                let outcome = run_search(&configs[job].1, table);
                slots[job].set(outcome).expect("each job runs once");
            });
        }
    });

    let mut results = Vec::with_capacity(configs.len());
    for slot in slots {
        results.push(slot.into_inner().expect("all jobs completed")?);
    }
    Ok(results)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite diversity"));
    values[values.len() / 2]
}

pub fn execute(args: AblateArgs) -> Result<(), CliError> {
    if args.seeds == 0 {
        return Err(CliError::Domain("--seeds must be at least 1".into()));
    }
    let table = load_benchmark(&args.bench)?;
    let device = DeviceId::from(args.device.as_str());
    table.device_column(&device).map_err(CliError::from)?;

    let mut configs = Vec::with_capacity(2 * args.seeds as usize);
    for mode in [ObjectiveMode::ThreeObjective, ObjectiveMode::TwoObjective] {
        for seed in 0..args.seeds {
            let mut config = SearchConfig::new(device.clone());
            config.seed = seed;
            config.objective_mode = mode;
            configs.push((mode, config));
        }
    }

    let cap = thread_cap(configs.len())?;
    let results = run_all(&configs, &table, cap)?;
    let runs: Vec<ArmRun> = configs
        .iter()
        .zip(results)
        .map(|((mode, config), result)| ArmRun {
            arm: arm_label(*mode),
            seed: config.seed,
            series: result.diversity_series,
        })
        .collect();

    // Canonical CSV order: arm, seed, generation.
    let mut ordered: Vec<&ArmRun> = runs.iter().collect();
    ordered.sort_by(|a, b| a.arm.cmp(b.arm).then(a.seed.cmp(&b.seed)));
    let mut csv = String::from("generation,arm,seed,pop_diversity\n");
    for run in &ordered {
        for (generation, value) in run.series.iter().enumerate() {
            let _ = writeln!(csv, "{generation},{},{},{value}", run.arm, run.seed);
        }
    }
    let path = write_output_file(&args.out, "diversity.csv", &csv)?;

    // Trend medians compare the first evolved generation against the last.
    let last = runs[0].series.len() - 1;
    let baseline = 1.min(last);
    let gen1 = |arm: &str| {
        let mut values: Vec<f64> = runs
            .iter()
            .filter(|r| r.arm == arm)
            .map(|r| r.series[baseline])
            .collect();
        median(&mut values)
    };
    let three_gen1 = gen1("3obj");
    let two_gen1 = gen1("2obj");
    let final_median = |arm: &str| {
        let mut values: Vec<f64> = runs
            .iter()
            .filter(|r| r.arm == arm)
            .map(|r| r.series[last])
            .collect();
        median(&mut values)
    };
    let three_final = final_median("3obj");
    let two_final = final_median("2obj");

    println!(
        "3obj median diversity: generation {baseline} = {three_gen1:.4}, generation {last} = {three_final:.4}"
    );
    println!(
        "2obj median diversity: generation {baseline} = {two_gen1:.4}, generation {last} = {two_final:.4}"
    );
    if args.seeds < MIN_SEEDS_FOR_VERDICT {
        println!("verdict: insufficient seeds ({} < {MIN_SEEDS_FOR_VERDICT})", args.seeds);
    } else if three_final > three_gen1 && two_final < two_gen1 {
        println!("verdict: trend reproduced");
    } else {
        println!("verdict: trend not reproduced");
    }
    println!("wrote {}", path.display());
    Ok(())
}
