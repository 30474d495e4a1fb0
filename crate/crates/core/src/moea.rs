//! NSGA-II core and the generation loop: dominance, fast non-dominated
//! sorting, crowding distance, binary tournament mating selection, elitist
//! environmental selection, and archive maintenance.
//!
//! Sorting and dominance operate on plain objective slices with explicit
//! senses, so they are usable for any objective count; the search loop
//! projects [`ObjectiveVector`]s through its configured [`ObjectiveMode`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::benchmark::{non_dominated_2d, BenchmarkTable};
use crate::error::{Error, Result};
use crate::objectives::{self, DeviceId, ObjectiveVector, Sense};
use crate::searchspace::{self, ArchIndex, Genotype, SPACE_SIZE};

/// One candidate architecture, with its evaluation and sorting state.
///
/// `rank` and `crowding` are assigned by sorting and are only meaningful
/// afterwards. The diversity objective is population-coupled, so the same
/// genotype may carry different objective vectors in different generations.
#[derive(Clone, Debug)]
pub struct Individual {
    pub genotype: Genotype,
    pub objectives: Option<ObjectiveVector>,
    pub rank: Option<usize>,
    pub crowding: Option<f64>,
}

impl Individual {
    pub fn new(genotype: Genotype) -> Self {
        Individual {
            genotype,
            objectives: None,
            rank: None,
            crowding: None,
        }
    }

    pub fn evaluated(genotype: Genotype, objectives: ObjectiveVector) -> Self {
        Individual {
            genotype,
            objectives: Some(objectives),
            rank: None,
            crowding: None,
        }
    }
}

/// A generation of individuals. Duplicates are permitted; deduplication
/// happens only in the archive.
#[derive(Clone, Debug)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, generation: usize) -> Self {
        Population {
            members,
            generation,
        }
    }

    /// True once every member has rank and crowding assigned.
    pub fn is_sorted(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.rank.is_some() && m.crowding.is_some())
    }
}

/// Which objectives drive dominance: the full three-objective problem, or
/// the two-objective ablation that drops the diversity term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveMode {
    ThreeObjective,
    TwoObjective,
}

impl ObjectiveMode {
    pub fn senses(self) -> &'static [Sense] {
        match self {
            ObjectiveMode::ThreeObjective => &ObjectiveVector::SENSES,
            ObjectiveMode::TwoObjective => &[Sense::Maximize, Sense::Minimize],
        }
    }

    pub fn project(self, objectives: &ObjectiveVector) -> Vec<f64> {
        match self {
            ObjectiveMode::ThreeObjective => objectives.values().to_vec(),
            ObjectiveMode::TwoObjective => vec![objectives.similarity, objectives.cost],
        }
    }
}

/// Search parameters. Defaults: population 20, 100 generations, mutation
/// rate 1/6, crossover probability 0.9, three objectives, raw costs.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n_pop: usize,
    pub n_gen: usize,
    pub device: DeviceId,
    pub mutation_rate: f64,
    pub crossover_prob: f64,
    pub objective_mode: ObjectiveMode,
    pub normalize_costs: bool,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(device: DeviceId) -> Self {
        SearchConfig {
            n_pop: 20,
            n_gen: 100,
            device,
            mutation_rate: 1.0 / 6.0,
            crossover_prob: 0.9,
            objective_mode: ObjectiveMode::ThreeObjective,
            normalize_costs: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pop < 2 || !self.n_pop.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "population size must be even and at least 2, got {}",
                self.n_pop
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::InvalidConfig(format!(
                "mutation rate {} outside [0, 1]",
                self.mutation_rate
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::InvalidConfig(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover_prob
            )));
        }
        Ok(())
    }
}

/// Archive entry: the lookup objectives of one evaluated architecture.
/// Similarity and cost are deterministic per genotype, so the first-seen
/// values are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchiveEntry {
    pub genotype: Genotype,
    pub similarity: f64,
    pub cost: f64,
}

/// Deduplicated record of every architecture that reached a population,
/// with its current non-dominated front over (similarity maximized, cost
/// minimized). The diversity term is population-relative and therefore
/// excluded from archive dominance.
#[derive(Clone, Debug, Default)]
pub struct ParetoArchive {
    entries: BTreeMap<ArchIndex, ArchiveEntry>,
    front: Vec<ArchIndex>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert every member of an evaluated population and refresh the front.
    /// Inserting the same population twice leaves the archive unchanged.
    pub fn update(&mut self, population: &Population) {
        for member in &population.members {
            let objectives = member
                .objectives
                .as_ref()
                .expect("archive update requires an evaluated population");
            self.entries
                .entry(member.genotype.index())
                .or_insert_with(|| ArchiveEntry {
                    genotype: member.genotype,
                    similarity: objectives.similarity,
                    cost: objectives.cost,
                });
        }
        self.recompute_front();
    }

    fn recompute_front(&mut self) {
        let keys: Vec<ArchIndex> = self.entries.keys().copied().collect();
        let points: Vec<(f64, f64)> = self
            .entries
            .values()
            .map(|e| (e.similarity, e.cost))
            .collect();
        self.front = non_dominated_2d(&points)
            .into_iter()
            .map(|i| keys[i])
            .collect();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, index: ArchIndex) -> bool {
        self.entries.contains_key(&index)
    }

    pub fn entries(&self) -> impl Iterator<Item = (ArchIndex, &ArchiveEntry)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn get(&self, index: ArchIndex) -> Option<&ArchiveEntry> {
        self.entries.get(&index)
    }

    /// Indices of the current non-dominated set, ascending.
    pub fn front(&self) -> &[ArchIndex] {
        &self.front
    }

    /// (similarity, cost) pairs of the current front.
    pub fn front_points(&self) -> Vec<(f64, f64)> {
        self.front
            .iter()
            .map(|i| {
                let e = &self.entries[i];
                (e.similarity, e.cost)
            })
            .collect()
    }
}

/// True iff `a` is no worse than `b` in every objective and strictly better
/// in at least one, respecting each objective's sense.
pub fn dominates(a: &[f64], b: &[f64], senses: &[Sense]) -> Result<bool> {
    if a.len() != senses.len() || b.len() != senses.len() {
        return Err(Error::DimensionMismatch {
            left: a.len().max(b.len()),
            right: senses.len(),
        });
    }
    Ok(dominates_unchecked(a, b, senses))
}

fn dominates_unchecked(a: &[f64], b: &[f64], senses: &[Sense]) -> bool {
    let mut strictly_better = false;
    for ((&x, &y), &sense) in a.iter().zip(b).zip(senses) {
        if sense.better(y, x) {
            return false;
        }
        if sense.better(x, y) {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Both dominance directions in one pass over the objectives.
fn dominance_pair(a: &[f64], b: &[f64], senses: &[Sense]) -> (bool, bool) {
    let mut a_better = false;
    let mut b_better = false;
    for ((&x, &y), &sense) in a.iter().zip(b).zip(senses) {
        if sense.better(x, y) {
            a_better = true;
            if b_better {
                return (false, false);
            }
        } else if sense.better(y, x) {
            b_better = true;
            if a_better {
                return (false, false);
            }
        }
    }
    (a_better && !b_better, b_better && !a_better)
}

/// Partition objective vectors into successive non-dominated fronts:
/// front 0 is the non-dominated set, front k the non-dominated set after
/// removing fronts `< k`. Matches the O(M·N^2) reference algorithm while
/// keeping only per-member domination counts, so memory stays O(N).
pub fn fast_nondominated_sort(vectors: &[Vec<f64>], senses: &[Sense]) -> Result<Vec<Vec<usize>>> {
    if vectors.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    for v in vectors {
        if v.len() != senses.len() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: senses.len(),
            });
        }
    }

    let n = vectors.len();
    let mut dominator_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (i_dominates, j_dominates) = dominance_pair(&vectors[i], &vectors[j], senses);
            if i_dominates {
                dominator_count[j] += 1;
            } else if j_dominates {
                dominator_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current = Vec::new();
    let mut remaining = Vec::with_capacity(n);
    for i in 0..n {
        if dominator_count[i] == 0 {
            current.push(i);
        } else {
            remaining.push(i);
        }
    }
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &remaining {
                if dominator_count[q] > 0 && dominates_unchecked(&vectors[p], &vectors[q], senses)
                {
                    dominator_count[q] -= 1;
                    if dominator_count[q] == 0 {
                        next.push(q);
                    }
                }
            }
        }
        next.sort_unstable();
        remaining.retain(|&q| dominator_count[q] > 0);
        fronts.push(std::mem::replace(&mut current, next));
    }
    Ok(fronts)
}

/// NSGA-II crowding distance within one front: per objective the two
/// extremes get +infinity and interior members accumulate
/// `(next - prev) / (max - min)`. A constant objective contributes nothing
/// to interior members. The result is direction-independent, but the senses
/// pin the expected dimension.
pub fn crowding_distance(front_vectors: &[Vec<f64>], senses: &[Sense]) -> Result<Vec<f64>> {
    if front_vectors.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    for v in front_vectors {
        if v.len() != senses.len() {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: senses.len(),
            });
        }
    }

    let n = front_vectors.len();
    if n <= 2 {
        return Ok(vec![f64::INFINITY; n]);
    }

    let mut distance = vec![0.0f64; n];
    for m in 0..senses.len() {
        let column: Vec<f64> = front_vectors.iter().map(|v| v[m]).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            column[a]
                .partial_cmp(&column[b])
                .expect("finite objective")
                .then(a.cmp(&b))
        });
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = column[order[n - 1]] - column[order[0]];
        if range > 0.0 {
            for k in 1..n - 1 {
                let i = order[k];
                if distance[i].is_finite() {
                    distance[i] += (column[order[k + 1]] - column[order[k - 1]]) / range;
                }
            }
        }
    }
    Ok(distance)
}

/// Assign ranks and crowding distances to every member of a population.
pub fn sort_population(population: &mut Population, mode: ObjectiveMode) -> Result<()> {
    let vectors: Vec<Vec<f64>> = population
        .members
        .iter()
        .map(|m| {
            mode.project(
                m.objectives
                    .as_ref()
                    .expect("sorting requires an evaluated population"),
            )
        })
        .collect();
    let fronts = fast_nondominated_sort(&vectors, mode.senses())?;
    for (rank, front) in fronts.iter().enumerate() {
        let front_vectors: Vec<Vec<f64>> = front.iter().map(|&i| vectors[i].clone()).collect();
        let distances = crowding_distance(&front_vectors, mode.senses())?;
        for (&member_index, distance) in front.iter().zip(distances) {
            population.members[member_index].rank = Some(rank);
            population.members[member_index].crowding = Some(distance);
        }
    }
    Ok(())
}

/// Binary tournament mating selection: draw two members uniformly at
/// random; lower rank wins, ties go to larger crowding distance, remaining
/// ties to a coin flip. The population must be sorted.
pub fn binary_tournament<'a, R: Rng + ?Sized>(
    population: &'a Population,
    rng: &mut R,
) -> Result<&'a Individual> {
    if population.members.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if !population.is_sorted() {
        return Err(Error::UnsortedPopulation);
    }
    let n = population.members.len();
    let a = &population.members[rng.random_range(0..n)];
    let b = &population.members[rng.random_range(0..n)];
    let (rank_a, rank_b) = (a.rank.expect("sorted"), b.rank.expect("sorted"));
    if rank_a != rank_b {
        return Ok(if rank_a < rank_b { a } else { b });
    }
    let (crowd_a, crowd_b) = (a.crowding.expect("sorted"), b.crowding.expect("sorted"));
    if crowd_a != crowd_b {
        return Ok(if crowd_a > crowd_b { a } else { b });
    }
    Ok(if rng.random_bool(0.5) { a } else { b })
}

/// Elitist environmental selection over parents and offspring: whole fronts
/// are kept in rank order; the splitting front is truncated by descending
/// crowding distance, ties broken by stable input order. The survivors keep
/// the ranks and crowding distances computed on the combined pool.
pub fn environmental_selection(
    combined: Vec<Individual>,
    n_pop: usize,
    mode: ObjectiveMode,
) -> Result<Vec<Individual>> {
    if combined.len() < n_pop {
        return Err(Error::InsufficientMembers {
            have: combined.len(),
            need: n_pop,
        });
    }
    let vectors: Vec<Vec<f64>> = combined
        .iter()
        .map(|m| {
            mode.project(
                m.objectives
                    .as_ref()
                    .expect("environmental selection requires evaluated members"),
            )
        })
        .collect();
    let fronts = fast_nondominated_sort(&vectors, mode.senses())?;

    let mut selected: Vec<Individual> = Vec::with_capacity(n_pop);
    for (rank, front) in fronts.iter().enumerate() {
        if selected.len() == n_pop {
            break;
        }
        let front_vectors: Vec<Vec<f64>> = front.iter().map(|&i| vectors[i].clone()).collect();
        let distances = crowding_distance(&front_vectors, mode.senses())?;

        let keep: Vec<usize> = if selected.len() + front.len() <= n_pop {
            (0..front.len()).collect()
        } else {
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&x, &y| {
                distances[y]
                    .partial_cmp(&distances[x])
                    .expect("crowding is never NaN")
                    .then(front[x].cmp(&front[y]))
            });
            order.truncate(n_pop - selected.len());
            order
        };
        for k in keep {
            let mut member = combined[front[k]].clone();
            member.rank = Some(rank);
            member.crowding = Some(distances[k]);
            selected.push(member);
        }
    }
    debug_assert_eq!(selected.len(), n_pop);
    Ok(selected)
}

/// Outcome of a search run: the final archive plus the run statistics the
/// manifest reports.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub archive: ParetoArchive,
    /// Population diversity of each generation, from raw device costs;
    /// entry 0 is the initial population, entry `n_gen` the final one.
    pub diversity_series: Vec<f64>,
    /// Number of distinct architectures whose objectives were looked up.
    pub distinct_evaluations: usize,
    pub generations: usize,
}

/// Run the full search: initialize a random population, then for each of
/// `n_gen + 1` generations evaluate all objectives against the current
/// population, update the archive, and (except after the last) produce the
/// next population with NSGA-II. Offspring and parents are re-scored
/// against the combined 2N cost list before environmental selection, so the
/// whole pool is compared on a common footing. Deterministic in
/// `config.seed`; distinct lookups never exceed `n_pop * (n_gen + 1)`.
pub fn run_search(config: &SearchConfig, table: &BenchmarkTable) -> Result<SearchResult> {
    config.validate()?;
    table.validate_complete()?;
    table.device_column(&config.device)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen = vec![false; SPACE_SIZE];
    let mut distinct_evaluations = 0usize;

    let initial: Vec<Individual> = (0..config.n_pop)
        .map(|_| Individual::new(searchspace::random_genotype(&mut rng)))
        .collect();
    let mut population = Population::new(initial, 0);

    let mut archive = ParetoArchive::new();
    let mut diversity_series = Vec::with_capacity(config.n_gen + 1);

    for generation in 0..=config.n_gen {
        // Objectives against the current N-member population; the diversity
        // term of earlier combined-pool scoring is superseded here.
        let genotypes: Vec<Genotype> = population.members.iter().map(|m| m.genotype).collect();
        let objectives = objectives::evaluate_population_with(
            &genotypes,
            table,
            &config.device,
            config.normalize_costs,
        )?;
        for (member, objective) in population.members.iter_mut().zip(&objectives) {
            member.objectives = Some(*objective);
            member.rank = None;
            member.crowding = None;
        }
        for genotype in &genotypes {
            let slot = &mut seen[genotype.index().get()];
            if !*slot {
                *slot = true;
                distinct_evaluations += 1;
            }
        }

        let costs: Vec<f64> = objectives.iter().map(|o| o.cost).collect();
        diversity_series.push(objectives::population_diversity(&costs)?);
        archive.update(&population);

        if generation == config.n_gen {
            break;
        }

        sort_population(&mut population, config.objective_mode)?;

        let mut offspring = Vec::with_capacity(config.n_pop);
        while offspring.len() < config.n_pop {
            let parent_a = binary_tournament(&population, &mut rng)?.genotype;
            let parent_b = binary_tournament(&population, &mut rng)?.genotype;
            let (child_a, child_b) = if rng.random_bool(config.crossover_prob) {
                searchspace::crossover(&parent_a, &parent_b, &mut rng)
            } else {
                (parent_a, parent_b)
            };
            offspring.push(searchspace::mutate(&child_a, config.mutation_rate, &mut rng)?);
            if offspring.len() < config.n_pop {
                offspring.push(searchspace::mutate(&child_b, config.mutation_rate, &mut rng)?);
            }
        }

        // Parents first, offspring after: the stable order used for
        // truncation tie-breaks.
        let combined_genotypes: Vec<Genotype> = population
            .members
            .iter()
            .map(|m| m.genotype)
            .chain(offspring)
            .collect();
        let combined_objectives = objectives::evaluate_population_with(
            &combined_genotypes,
            table,
            &config.device,
            config.normalize_costs,
        )?;
        for genotype in &combined_genotypes {
            let slot = &mut seen[genotype.index().get()];
            if !*slot {
                *slot = true;
                distinct_evaluations += 1;
            }
        }
        let combined: Vec<Individual> = combined_genotypes
            .into_iter()
            .zip(combined_objectives)
            .map(|(genotype, objective)| Individual::evaluated(genotype, objective))
            .collect();

        let survivors = environmental_selection(combined, config.n_pop, config.objective_mode)?;
        population = Population::new(survivors, generation + 1);
    }

    Ok(SearchResult {
        archive,
        diversity_series,
        distinct_evaluations,
        generations: config.n_gen,
    })
}
