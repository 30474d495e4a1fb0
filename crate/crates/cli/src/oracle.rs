//! `phdnas oracle`: brute-force Pareto front of a benchmark table, its
//! hypervolume, and the best-accuracy row when the table carries accuracy.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use phdnas_core::{
    exact_pareto_front, hypervolume_2d, load_benchmark, reference_point, ArchIndex,
    BenchmarkTable, DeviceId, Genotype, SPACE_SIZE,
};

use crate::CliError;

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Benchmark CSV covering the full search space.
    #[arg(long)]
    pub bench: PathBuf,
    /// Device whose cost column defines the front.
    #[arg(long)]
    pub device: String,
    /// Front CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn front_to_csv(
    table: &BenchmarkTable,
    device: &DeviceId,
    front: &[ArchIndex],
) -> Result<String, CliError> {
    let with_accuracy = table.has_accuracy();
    let mut out = String::from("index,genotype,similarity,cost");
    if with_accuracy {
        out.push_str(",accuracy");
    }
    out.push('\n');
    for &index in front {
        let _ = write!(
            out,
            "{index},{},{},{}",
            Genotype::from_index(index),
            table.similarity(index)?,
            table.cost(index, device)?
        );
        if with_accuracy {
            let _ = write!(out, ",{}", table.accuracy(index)?.unwrap_or(0.0));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Row with the highest accuracy, ties broken by lowest index.
fn best_accuracy_row(table: &BenchmarkTable) -> Result<Option<(ArchIndex, f64)>, CliError> {
    if !table.has_accuracy() {
        return Ok(None);
    }
    let mut best: Option<(ArchIndex, f64)> = None;
    for i in 0..SPACE_SIZE {
        let index = ArchIndex::new(i).expect("in range");
        if let Some(accuracy) = table.accuracy(index)? {
            if best.is_none_or(|(_, b)| accuracy > b) {
                best = Some((index, accuracy));
            }
        }
    }
    Ok(best)
}

pub fn execute(args: OracleArgs) -> Result<(), CliError> {
    let table = load_benchmark(&args.bench)?;
    let device = DeviceId::from(args.device.as_str());

    let front = exact_pareto_front(&table, &device)?;
    let reference = reference_point(&table, &device)?;
    let points: Vec<(f64, f64)> = front
        .iter()
        .map(|&i| Ok((table.similarity(i)?, table.cost(i, &device)?)))
        .collect::<Result<_, CliError>>()?;
    let hypervolume = hypervolume_2d(&points, reference);

    let csv = front_to_csv(&table, &device, &front)?;
    let mut summary = format!("front_size={}\nhypervolume={hypervolume}\n", front.len());
    if let Some((index, accuracy)) = best_accuracy_row(&table)? {
        let _ = writeln!(
            summary,
            "best_accuracy_index={index}\nbest_accuracy_genotype={}\nbest_accuracy={accuracy}",
            Genotype::from_index(index)
        );
    }

    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    Ok(())
}
