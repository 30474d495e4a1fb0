//! Shared fixtures for the criterion benchmarks.

use std::sync::OnceLock;

use phdnas_core::{generate_synthetic, BenchmarkTable, SyntheticParams};

/// The synthetic benchmark used throughout, generated once.
pub fn frozen_table() -> &'static BenchmarkTable {
    static TABLE: OnceLock<BenchmarkTable> = OnceLock::new();
    TABLE.get_or_init(|| generate_synthetic(1, &SyntheticParams::default()))
}
