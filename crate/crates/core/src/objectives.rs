//! The three search objectives: similarity-score lookup, per-device hardware
//! cost lookup, and the population-coupled hardware-cost diversity term,
//! plus a histogram mutual-information estimator for externally supplied
//! feature-map samples.

use rand::Rng;

use crate::benchmark::BenchmarkTable;
use crate::error::{Error, Result};
use crate::searchspace::Genotype;

/// Optimization direction of one objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// True when `a` is strictly better than `b` under this sense.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }
}

/// The three objective values of one evaluated architecture.
///
/// Senses are fixed: similarity is maximized, cost minimized, diversity
/// maximized. `diversity` is population-relative, so two vectors are only
/// comparable when evaluated against the same population.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveVector {
    /// Representation-similarity score, dimensionless.
    pub similarity: f64,
    /// Hardware cost in the device's native unit, strictly positive.
    pub cost: f64,
    /// Hardware cost diversity, squared-cost units, non-negative.
    pub diversity: f64,
}

impl ObjectiveVector {
    pub const SENSES: [Sense; 3] = [Sense::Maximize, Sense::Minimize, Sense::Maximize];

    pub fn values(&self) -> [f64; 3] {
        [self.similarity, self.cost, self.diversity]
    }
}

/// Name of a hardware-cost column of the benchmark table,
/// e.g. `"fpga"` or `"edgegpu"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeviceId(String);

impl DeviceId {
    pub fn new(name: impl Into<String>) -> Self {
        DeviceId(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for DeviceId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DeviceId {
    fn from(name: &str) -> Self {
        DeviceId(name.to_string())
    }
}

/// Per-layer activation samples of one model: `layers[i]` is an
/// `n_samples x n_features` matrix, with `n_samples` shared by all layers.
#[derive(Clone, Debug)]
pub struct FeatureSample {
    layers: Vec<Vec<Vec<f64>>>,
}

impl FeatureSample {
    pub fn new(layers: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::FeatureShape("at least one layer required".into()));
        }
        let n_samples = layers[0].len();
        if n_samples == 0 {
            return Err(Error::FeatureShape("layers must contain samples".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.len() != n_samples {
                return Err(Error::FeatureShape(format!(
                    "layer {i} has {} samples, expected {n_samples}",
                    layer.len()
                )));
            }
            let width = layer[0].len();
            if width == 0 {
                return Err(Error::FeatureShape(format!("layer {i} has zero features")));
            }
            for row in layer {
                if row.len() != width {
                    return Err(Error::FeatureShape(format!(
                        "layer {i} has ragged rows ({} vs {width})",
                        row.len()
                    )));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::FeatureShape(format!(
                        "layer {i} contains a non-finite activation"
                    )));
                }
            }
        }
        Ok(FeatureSample { layers })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn num_samples(&self) -> usize {
        self.layers[0].len()
    }
}

/// Precomputed similarity score of `genotype`, read from the table.
pub fn similarity_score(table: &BenchmarkTable, genotype: &Genotype) -> Result<f64> {
    table.similarity(genotype.index())
}

/// Stored hardware cost of `genotype` on `device`.
pub fn hardware_cost(table: &BenchmarkTable, genotype: &Genotype, device: &DeviceId) -> Result<f64> {
    table.cost(genotype.index(), device)
}

/// Hardware cost diversity of one individual: the sum of squared
/// differences between its cost and every population member's cost.
/// `population_costs` lists all N members, the individual's own entry
/// included (its term contributes zero).
pub fn cost_diversity(own_cost: f64, population_costs: &[f64]) -> Result<f64> {
    if population_costs.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    Ok(population_costs
        .iter()
        .map(|&other| (own_cost - other) * (own_cost - other))
        .sum())
}

/// Mean hardware cost diversity over the population.
pub fn population_diversity(population_costs: &[f64]) -> Result<f64> {
    if population_costs.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let total: f64 = population_costs
        .iter()
        .map(|&own| cost_diversity(own, population_costs).expect("nonempty"))
        .sum();
    Ok(total / population_costs.len() as f64)
}

/// Diversity term for every member of a cost list.
///
/// With `normalize` set, costs are first min-max scaled to `[0, 1]` so the
/// term is comparable across devices with different native units; by default
/// raw costs are used.
pub fn cost_diversities(population_costs: &[f64], normalize: bool) -> Result<Vec<f64>> {
    if population_costs.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let scaled;
    let costs = if normalize {
        let min = population_costs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = population_costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let range = max - min;
        scaled = if range > 0.0 {
            population_costs.iter().map(|&c| (c - min) / range).collect()
        } else {
            vec![0.0; population_costs.len()]
        };
        &scaled[..]
    } else {
        population_costs
    };
    costs
        .iter()
        .map(|&own| cost_diversity(own, costs))
        .collect()
}

/// Evaluate all three objectives for a population, in input order.
///
/// Phase 1 looks up similarity and cost per member; phase 2 computes each
/// member's diversity against the complete phase-1 cost list.
pub fn evaluate_population(
    population: &[Genotype],
    table: &BenchmarkTable,
    device: &DeviceId,
) -> Result<Vec<ObjectiveVector>> {
    evaluate_population_with(population, table, device, false)
}

/// [`evaluate_population`] with an explicit cost-normalization flag for the
/// diversity term.
pub fn evaluate_population_with(
    population: &[Genotype],
    table: &BenchmarkTable,
    device: &DeviceId,
    normalize_costs: bool,
) -> Result<Vec<ObjectiveVector>> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let column = table.device_column(device)?;

    let mut similarities = Vec::with_capacity(population.len());
    let mut costs = Vec::with_capacity(population.len());
    for (position, genotype) in population.iter().enumerate() {
        let index = genotype.index();
        similarities.push(table.similarity(index).map_err(|e| e.at_member(position))?);
        costs.push(
            table
                .cost_by_column(index, column)
                .map_err(|e| e.at_member(position))?,
        );
    }

    let diversities = cost_diversities(&costs, normalize_costs)?;
    Ok(similarities
        .into_iter()
        .zip(costs)
        .zip(diversities)
        .map(|((similarity, cost), diversity)| ObjectiveVector {
            similarity,
            cost,
            diversity,
        })
        .collect())
}

/// Layerwise mutual information between two feature samples, in nats.
///
/// Each layer is reduced to one value per sample (the mean activation),
/// quantized into `bins` equal-frequency bins, and the discrete mutual
/// information of the joint histogram is accumulated over layers. Tied
/// values always share a bin, so a constant-valued layer quantizes to a
/// single bin and contributes zero.
pub fn estimate_layerwise_mi(
    reference: &FeatureSample,
    candidate: &FeatureSample,
    bins: usize,
) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidBins(bins));
    }
    if reference.num_layers() != candidate.num_layers() {
        return Err(Error::FeatureShape(format!(
            "layer count mismatch: {} vs {}",
            reference.num_layers(),
            candidate.num_layers()
        )));
    }
    if reference.num_samples() != candidate.num_samples() {
        return Err(Error::FeatureShape(format!(
            "sample count mismatch: {} vs {}",
            reference.num_samples(),
            candidate.num_samples()
        )));
    }

    let mut total = 0.0;
    for (ref_layer, cand_layer) in reference.layers.iter().zip(&candidate.layers) {
        let x = equal_frequency_bins(&sample_means(ref_layer), bins);
        let y = equal_frequency_bins(&sample_means(cand_layer), bins);
        total += discrete_mi(&x, &y, bins).max(0.0);
    }
    Ok(total)
}

fn sample_means(layer: &[Vec<f64>]) -> Vec<f64> {
    layer
        .iter()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect()
}

/// Quantile-based equal-frequency binning. Boundaries are the values at the
/// sorted positions `k * n / bins`; a value's bin is the number of boundaries
/// at or below it, so ties never straddle a boundary.
fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite activations"));
    let boundaries: Vec<f64> = (1..bins).map(|k| sorted[k * n / bins]).collect();
    values
        .iter()
        .map(|&v| boundaries.partition_point(|&b| b <= v))
        .collect()
}

/// Plug-in mutual information of two discrete sequences, in nats.
fn discrete_mi(x: &[usize], y: &[usize], bins: usize) -> f64 {
    let n = x.len() as f64;
    let mut joint = vec![0usize; bins * bins];
    let mut marginal_x = vec![0usize; bins];
    let mut marginal_y = vec![0usize; bins];
    for (&a, &b) in x.iter().zip(y) {
        joint[a * bins + b] += 1;
        marginal_x[a] += 1;
        marginal_y[b] += 1;
    }
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let count = joint[a * bins + b];
            if count == 0 {
                continue;
            }
            let p_joint = count as f64 / n;
            let p_x = marginal_x[a] as f64 / n;
            let p_y = marginal_y[b] as f64 / n;
            mi += p_joint * (p_joint / (p_x * p_y)).ln();
        }
    }
    mi
}

/// Feature sample with one layer of standard-normal activations, for tests
/// and examples.
pub fn gaussian_feature_sample<R: Rng + ?Sized>(
    n_samples: usize,
    n_features: usize,
    rng: &mut R,
) -> FeatureSample {
    let layer: Vec<Vec<f64>> = (0..n_samples)
        .map(|_| (0..n_features).map(|_| standard_normal(rng)).collect())
        .collect();
    FeatureSample::new(vec![layer]).expect("generated sample is well formed")
}

/// Box-Muller standard normal draw.
pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
