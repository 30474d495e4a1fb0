//! Benchmark-table ingestion, synthetic benchmark generation, and exact
//! brute-force oracles (Pareto front, hypervolume).
//!
//! The on-disk format is a UTF-8 CSV with header
//! `index,genotype,similarity,cost_<device1>,...,cost_<deviceK>[,accuracy]`,
//! one row per architecture, exactly 15,625 data rows in any order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objectives::{standard_normal, DeviceId};
use crate::searchspace::{ArchIndex, Genotype, NUM_EDGES, NUM_OPS, SPACE_SIZE};

/// Per-architecture metrics: similarity score, one cost per device, and an
/// optional held-out accuracy used only by oracles and reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub similarity: f64,
    /// One cost per table device, in declaration order.
    pub costs: Vec<f64>,
    /// Excluded from every objective computation; the search never reads it.
    pub accuracy: Option<f64>,
}

impl MetricRow {
    pub fn new(similarity: f64, costs: Vec<f64>, accuracy: Option<f64>) -> Self {
        MetricRow {
            similarity,
            costs,
            accuracy,
        }
    }
}

/// Metrics for every architecture in the search space.
///
/// Tables produced by [`load_benchmark`] or [`generate_synthetic`] are
/// complete: one row per architecture index. Partially filled tables can
/// only arise through manual [`BenchmarkTable::insert_row`] use, where
/// lookups report the missing index.
#[derive(Clone, Debug)]
pub struct BenchmarkTable {
    devices: Vec<DeviceId>,
    rows: Vec<Option<MetricRow>>,
    meta: BTreeMap<String, String>,
}

impl BenchmarkTable {
    pub fn new(devices: Vec<DeviceId>) -> Self {
        BenchmarkTable {
            devices,
            rows: vec![None; SPACE_SIZE],
            meta: BTreeMap::new(),
        }
    }

    pub fn devices(&self) -> &[DeviceId] {
        &self.devices
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    /// Number of rows present.
    pub fn len(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|r| r.is_none())
    }

    /// Column position of `device`, or an error listing the known devices.
    pub fn device_column(&self, device: &DeviceId) -> Result<usize> {
        self.devices
            .iter()
            .position(|d| d == device)
            .ok_or_else(|| Error::UnknownDevice {
                device: device.name().to_string(),
                available: self
                    .devices
                    .iter()
                    .map(DeviceId::name)
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }

    pub fn insert_row(&mut self, index: ArchIndex, row: MetricRow) -> Result<()> {
        if row.costs.len() != self.devices.len() {
            return Err(Error::Validation(format!(
                "row {index} has {} costs for {} devices",
                row.costs.len(),
                self.devices.len()
            )));
        }
        if !row.similarity.is_finite() {
            return Err(Error::Validation(format!(
                "row {index} similarity is not finite"
            )));
        }
        if let Some(&bad) = row.costs.iter().find(|c| !c.is_finite() || **c <= 0.0) {
            return Err(Error::Validation(format!(
                "row {index} has non-positive cost {bad}"
            )));
        }
        if let Some(acc) = row.accuracy {
            if !acc.is_finite() || !(0.0..=100.0).contains(&acc) {
                return Err(Error::Validation(format!(
                    "row {index} accuracy {acc} outside [0, 100]"
                )));
            }
        }
        let slot = &mut self.rows[index.get()];
        if slot.is_some() {
            return Err(Error::Validation(format!("duplicate row for index {index}")));
        }
        *slot = Some(row);
        Ok(())
    }

    pub fn row(&self, index: ArchIndex) -> Result<&MetricRow> {
        self.rows[index.get()]
            .as_ref()
            .ok_or(Error::MissingArchitecture(index))
    }

    pub fn similarity(&self, index: ArchIndex) -> Result<f64> {
        Ok(self.row(index)?.similarity)
    }

    pub fn cost(&self, index: ArchIndex, device: &DeviceId) -> Result<f64> {
        let column = self.device_column(device)?;
        self.cost_by_column(index, column)
    }

    /// Cost lookup by pre-resolved column, for callers that resolve the
    /// device once per population.
    pub fn cost_by_column(&self, index: ArchIndex, column: usize) -> Result<f64> {
        debug_assert!(column < self.devices.len());
        Ok(self.row(index)?.costs[column])
    }

    /// Held-out accuracy, when the table carries it. Oracle and reporting
    /// use only; no objective computation reads this column.
    pub fn accuracy(&self, index: ArchIndex) -> Result<Option<f64>> {
        Ok(self.row(index)?.accuracy)
    }

    pub fn has_accuracy(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .next()
            .is_some_and(|row| row.accuracy.is_some())
    }

    /// Error unless every architecture index has a row.
    pub fn validate_complete(&self) -> Result<()> {
        let missing = self.rows.iter().filter(|r| r.is_none()).count();
        if missing == 0 {
            Ok(())
        } else {
            Err(Error::Incomplete { missing })
        }
    }
}

/// Load and fully validate a benchmark CSV (see the module docs for the
/// format). Completeness and cost positivity are checked here, so lookups
/// on the returned table cannot fail.
pub fn load_benchmark(path: impl AsRef<Path>) -> Result<BenchmarkTable> {
    let text = fs::read_to_string(&path)?;
    let mut table = parse_benchmark(&text)?;
    table.set_meta("source", path.as_ref().display().to_string());
    Ok(table)
}

fn parse_benchmark(text: &str) -> Result<BenchmarkTable> {
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let columns: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    if columns.len() < 4 || columns[0] != "index" || columns[1] != "genotype" || columns[2] != "similarity"
    {
        return Err(parse_err(
            1,
            "header must start with index,genotype,similarity and declare at least one cost column"
                .into(),
        ));
    }
    let mut devices = Vec::new();
    let mut has_accuracy = false;
    for (k, column) in columns.iter().enumerate().skip(3) {
        if let Some(device) = column.strip_prefix("cost_") {
            if has_accuracy {
                return Err(parse_err(1, "accuracy must be the last column".into()));
            }
            if device.is_empty() {
                return Err(parse_err(1, "empty device name in cost column".into()));
            }
            if devices.iter().any(|d: &DeviceId| d.name() == device) {
                return Err(parse_err(1, format!("duplicate device column {column:?}")));
            }
            devices.push(DeviceId::from(device));
        } else if *column == "accuracy" && k == columns.len() - 1 {
            has_accuracy = true;
        } else {
            return Err(parse_err(1, format!("unexpected column {column:?}")));
        }
    }
    if devices.is_empty() {
        return Err(parse_err(1, "at least one cost_<device> column required".into()));
    }

    let mut table = BenchmarkTable::new(devices);
    let expected_fields = columns.len();
    for (line_index, raw_line) in lines {
        let line_number = line_index + 1;
        let line = raw_line.trim_end_matches('\r');
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(parse_err(
                line_number,
                format!("expected {expected_fields} fields, found {}", fields.len()),
            ));
        }

        let index_value: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(line_number, format!("bad index {:?}", fields[0])))?;
        let index = ArchIndex::new(index_value)
            .map_err(|_| parse_err(line_number, format!("index {index_value} out of range")))?;
        let genotype: Genotype = fields[1]
            .parse()
            .map_err(|_| parse_err(line_number, format!("bad genotype {:?}", fields[1])))?;
        if genotype.index() != index {
            return Err(parse_err(
                line_number,
                format!("genotype {genotype} does not encode index {index}"),
            ));
        }

        let mut numbers = Vec::with_capacity(expected_fields - 2);
        for field in &fields[2..] {
            let value: f64 = field
                .parse()
                .map_err(|_| parse_err(line_number, format!("bad number {field:?}")))?;
            numbers.push(value);
        }
        let similarity = numbers[0];
        let accuracy = if table_has_accuracy_column(&numbers, table.devices().len()) {
            Some(numbers[numbers.len() - 1])
        } else {
            None
        };
        let costs = numbers[1..1 + table.devices().len()].to_vec();

        table
            .insert_row(index, MetricRow::new(similarity, costs, accuracy))
            .map_err(|e| parse_err(line_number, e.to_string()))?;
    }

    table.validate_complete()?;
    Ok(table)
}

fn table_has_accuracy_column(numbers: &[f64], device_count: usize) -> bool {
    numbers.len() == device_count + 2
}

/// Write a table in the documented CSV format, rows sorted by index.
pub fn save_benchmark(table: &BenchmarkTable, path: impl AsRef<Path>) -> Result<()> {
    table.validate_complete()?;
    fs::write(path, benchmark_to_csv(table)).map_err(Error::from)
}

/// Render a complete table as CSV text.
pub fn benchmark_to_csv(table: &BenchmarkTable) -> String {
    let has_accuracy = table.has_accuracy();
    let mut out = String::with_capacity(SPACE_SIZE * 48);
    out.push_str("index,genotype,similarity");
    for device in table.devices() {
        let _ = write!(out, ",cost_{device}");
    }
    if has_accuracy {
        out.push_str(",accuracy");
    }
    out.push('\n');
    for i in 0..SPACE_SIZE {
        let index = ArchIndex::new(i).expect("in range");
        let row = table.row(index).expect("complete table");
        let _ = write!(out, "{i},{},{}", Genotype::from_index(index), row.similarity);
        for cost in &row.costs {
            let _ = write!(out, ",{cost}");
        }
        if has_accuracy {
            let _ = write!(out, ",{}", row.accuracy.unwrap_or(0.0));
        }
        out.push('\n');
    }
    out
}

/// Parameters of the synthetic benchmark generator.
#[derive(Clone, Debug)]
pub struct SyntheticParams {
    pub devices: Vec<DeviceId>,
    /// Emit the oracle-only accuracy column.
    pub with_accuracy: bool,
    /// Standard deviation of the additive similarity noise.
    pub similarity_noise: f64,
    /// Relative standard deviation of the multiplicative cost noise.
    pub cost_noise: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            devices: vec![DeviceId::from("fpga"), DeviceId::from("edgegpu")],
            with_accuracy: true,
            similarity_noise: 0.05,
            cost_noise: 0.04,
        }
    }
}

// Per-op weights driving the synthetic metrics, indexed by op code
// (none, skip, conv-1x1, conv-3x3, pool).
const OP_CAPACITY: [f64; NUM_OPS] = [0.0, 0.1, 0.55, 1.0, 0.25];
const OP_COST: [f64; NUM_OPS] = [0.05, 0.12, 0.7, 1.5, 0.35];
// Similarity saturates at this capacity, so near-top scores are reachable
// at moderate cost while cost keeps growing: the regime where a plain
// two-objective search abandons the expensive half of the space.
const CAPACITY_KNEE: f64 = 2.5;
const FRONT_SIZE_RANGE: std::ops::RangeInclusive<usize> = 10..=60;
const MIN_CORRELATION: f64 = 0.3;
const MAX_ATTEMPTS: u64 = 64;

/// Deterministic synthetic benchmark covering the whole space.
///
/// Similarity and per-device cost are smooth functions of cell composition
/// plus seeded noise, positively correlated by construction. The generator
/// redraws (deterministically) until every device's exact two-objective
/// Pareto front has between 10 and 60 points and the similarity/cost
/// Pearson correlation exceeds 0.3.
pub fn generate_synthetic(seed: u64, params: &SyntheticParams) -> BenchmarkTable {
    assert!(
        !params.devices.is_empty(),
        "synthetic benchmark needs at least one device"
    );
    for attempt in 0..MAX_ATTEMPTS {
        let table = synthesize(seed, attempt, params);
        if meets_generator_guarantees(&table) {
            return table;
        }
    }
    panic!("synthetic generator failed to satisfy its guarantees in {MAX_ATTEMPTS} attempts");
}

fn synthesize(seed: u64, attempt: u64, params: &SyntheticParams) -> BenchmarkTable {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, attempt));
    let device_count = params.devices.len();

    // Device profiles: a global scale plus per-edge cost multipliers.
    let scales: Vec<f64> = (0..device_count)
        .map(|_| rng.random_range(0.7..1.4))
        .collect();
    let edge_weights: Vec<[f64; NUM_EDGES]> = (0..device_count)
        .map(|_| {
            let mut weights = [0.0; NUM_EDGES];
            for w in weights.iter_mut() {
                *w = rng.random_range(0.85..1.15);
            }
            weights
        })
        .collect();

    let mut table = BenchmarkTable::new(params.devices.clone());
    table.set_meta("generator", "synthetic");
    table.set_meta("seed", seed.to_string());
    table.set_meta("reference_model", "synthetic-reference");

    for i in 0..SPACE_SIZE {
        let index = ArchIndex::new(i).expect("in range");
        let genotype = Genotype::from_index(index);
        let capacity: f64 = genotype
            .edges()
            .iter()
            .map(|op| OP_CAPACITY[op.code() as usize])
            .sum();

        let saturated = capacity.min(CAPACITY_KNEE) / CAPACITY_KNEE;
        let similarity = (0.1 + 0.85 * saturated + params.similarity_noise * standard_normal(&mut rng))
            .clamp(0.01, 0.999);

        let mut costs = Vec::with_capacity(device_count);
        for d in 0..device_count {
            let base: f64 = genotype
                .edges()
                .iter()
                .enumerate()
                .map(|(e, op)| edge_weights[d][e] * OP_COST[op.code() as usize])
                .sum::<f64>()
                + 0.4;
            let noisy = base * scales[d] * (1.0 + params.cost_noise * standard_normal(&mut rng));
            costs.push(noisy.max(1e-3));
        }

        let accuracy = if params.with_accuracy {
            Some((12.0 + 80.0 * capacity / NUM_EDGES as f64 + 2.0 * standard_normal(&mut rng)).clamp(0.0, 100.0))
        } else {
            None
        };

        table
            .insert_row(index, MetricRow::new(similarity, costs, accuracy))
            .expect("generated row is valid");
    }
    table
}

fn mix_seed(seed: u64, attempt: u64) -> u64 {
    // splitmix64 step over (seed, attempt).
    let mut z = seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn meets_generator_guarantees(table: &BenchmarkTable) -> bool {
    let similarities: Vec<f64> = (0..SPACE_SIZE)
        .map(|i| table.similarity(ArchIndex::new(i).expect("in range")).expect("complete"))
        .collect();
    for device in table.devices() {
        let column = table.device_column(device).expect("own device");
        let costs: Vec<f64> = (0..SPACE_SIZE)
            .map(|i| {
                table
                    .cost_by_column(ArchIndex::new(i).expect("in range"), column)
                    .expect("complete")
            })
            .collect();
        let points: Vec<(f64, f64)> = similarities.iter().cloned().zip(costs.iter().cloned()).collect();
        if !FRONT_SIZE_RANGE.contains(&non_dominated_2d(&points).len()) {
            return false;
        }
        if pearson(&similarities, &costs) <= MIN_CORRELATION {
            return false;
        }
    }
    true
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        cov += (x - mean_x) * (y - mean_y);
        var_x += (x - mean_x) * (x - mean_x);
        var_y += (y - mean_y) * (y - mean_y);
    }
    cov / (var_x.sqrt() * var_y.sqrt())
}

/// Indices of the non-dominated points under (first coordinate maximized,
/// second minimized), in ascending input order. Duplicate points are all
/// kept: neither dominates the other.
pub fn non_dominated_2d(points: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .1
            .partial_cmp(&points[b].1)
            .expect("finite objective")
            .then(points[b].0.partial_cmp(&points[a].0).expect("finite objective"))
            .then(a.cmp(&b))
    });

    let mut front = Vec::new();
    let mut best_cheaper = f64::NEG_INFINITY;
    let mut group_start = 0;
    while group_start < order.len() {
        let group_cost = points[order[group_start]].1;
        let mut group_end = group_start;
        while group_end < order.len() && points[order[group_end]].1 == group_cost {
            group_end += 1;
        }
        // Sorted similarity-descending within the group, so the group
        // maximum is at group_start.
        let group_max = points[order[group_start]].0;
        if group_max > best_cheaper {
            for &i in &order[group_start..group_end] {
                if points[i].0 == group_max {
                    front.push(i);
                }
            }
        }
        best_cheaper = best_cheaper.max(group_max);
        group_start = group_end;
    }
    front.sort_unstable();
    front
}

/// Exact Pareto front of the full table for one device: the architecture
/// indices non-dominated under (similarity maximized, cost minimized),
/// ascending.
pub fn exact_pareto_front(table: &BenchmarkTable, device: &DeviceId) -> Result<Vec<ArchIndex>> {
    let column = table.device_column(device)?;
    let mut points = Vec::with_capacity(SPACE_SIZE);
    for i in 0..SPACE_SIZE {
        let index = ArchIndex::new(i).expect("in range");
        points.push((table.similarity(index)?, table.cost_by_column(index, column)?));
    }
    Ok(non_dominated_2d(&points)
        .into_iter()
        .map(|i| ArchIndex::new(i).expect("in range"))
        .collect())
}

/// Two-dimensional hypervolume under (similarity maximized, cost minimized):
/// the area of the union of the rectangles spanned by each point and the
/// reference point. Points that fail to dominate the reference point are
/// clipped out; an empty effective set yields 0.
pub fn hypervolume_2d(points: &[(f64, f64)], reference: (f64, f64)) -> f64 {
    let mut effective: Vec<(f64, f64)> = points
        .iter()
        .filter(|(similarity, cost)| *similarity > reference.0 && *cost < reference.1)
        .cloned()
        .collect();
    effective.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("finite objective")
            .then(b.0.partial_cmp(&a.0).expect("finite objective"))
    });

    let mut area = 0.0;
    let mut best_similarity = reference.0;
    for (similarity, cost) in effective {
        if similarity > best_similarity {
            area += (similarity - best_similarity) * (reference.1 - cost);
            best_similarity = similarity;
        }
    }
    area
}

/// Frozen per-table reference point for hypervolume scores:
/// `(min similarity - eps, max cost + eps)` with `eps` equal to 1e-6 of each
/// range over all rows.
pub fn reference_point(table: &BenchmarkTable, device: &DeviceId) -> Result<(f64, f64)> {
    let column = table.device_column(device)?;
    let mut min_similarity = f64::INFINITY;
    let mut max_cost = f64::NEG_INFINITY;
    let mut max_similarity = f64::NEG_INFINITY;
    let mut min_cost = f64::INFINITY;
    let mut any = false;
    for row in table.rows.iter().flatten() {
        any = true;
        min_similarity = min_similarity.min(row.similarity);
        max_similarity = max_similarity.max(row.similarity);
        min_cost = min_cost.min(row.costs[column]);
        max_cost = max_cost.max(row.costs[column]);
    }
    if !any {
        return Err(Error::Validation("reference point of an empty table".into()));
    }
    let eps_similarity = 1e-6 * (max_similarity - min_similarity);
    let eps_cost = 1e-6 * (max_cost - min_cost);
    Ok((min_similarity - eps_similarity, max_cost + eps_cost))
}
