//! `phdnas gen-bench`: write a synthetic benchmark CSV.

use std::path::PathBuf;

use clap::Args;

use phdnas_core::{generate_synthetic, save_benchmark, DeviceId, SyntheticParams};

use crate::CliError;

#[derive(Args, Debug)]
pub struct GenBenchArgs {
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated device names, one cost column each.
    #[arg(long, default_value = "fpga,edgegpu", value_delimiter = ',')]
    pub devices: Vec<String>,
    /// Destination CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn execute(args: GenBenchArgs) -> Result<(), CliError> {
    if args.devices.is_empty() || args.devices.iter().any(|d| d.trim().is_empty()) {
        return Err(CliError::Domain("--devices needs at least one name".into()));
    }
    let params = SyntheticParams {
        devices: args.devices.iter().map(|d| DeviceId::from(d.trim())).collect(),
        ..SyntheticParams::default()
    };
    let table = generate_synthetic(args.seed, &params);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    save_benchmark(&table, &args.out)?;
    println!(
        "wrote {} (seed {}, devices {})",
        args.out.display(),
        args.seed,
        args.devices.join(",")
    );
    Ok(())
}
