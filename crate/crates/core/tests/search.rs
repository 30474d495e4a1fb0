//! End-to-end library tests: synthetic benchmark -> search -> archive,
//! including persistence through the CSV format.

use phdnas_core::{
    exact_pareto_front, generate_synthetic, hypervolume_2d, load_benchmark, reference_point,
    run_search, save_benchmark, DeviceId, ObjectiveMode, SearchConfig, SyntheticParams,
};

fn frozen() -> (phdnas_core::BenchmarkTable, DeviceId) {
    let table = generate_synthetic(1, &SyntheticParams::default());
    let device = table.devices()[0].clone();
    (table, device)
}

#[test]
fn search_archive_is_consistent_with_the_table() {
    let (table, device) = frozen();
    let mut config = SearchConfig::new(device.clone());
    config.n_gen = 30;
    config.seed = 9;
    let result = run_search(&config, &table).unwrap();

    assert!(result.distinct_evaluations <= config.n_pop * (config.n_gen + 1));
    assert_eq!(result.diversity_series.len(), config.n_gen + 1);
    assert!(result.archive.len() <= result.distinct_evaluations);

    // Every archive entry reproduces the table lookups for its genotype.
    for (index, entry) in result.archive.entries() {
        assert_eq!(entry.genotype.index(), index);
        assert_eq!(entry.similarity, table.similarity(index).unwrap());
        assert_eq!(entry.cost, table.cost(index, &device).unwrap());
    }

    // The archive front is internally non-dominated and cannot beat the
    // exact front's hypervolume.
    let points = result.archive.front_points();
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            let a_dominates = a.0 >= b.0 && a.1 <= b.1 && (a.0 > b.0 || a.1 < b.1);
            let b_dominates = b.0 >= a.0 && b.1 <= a.1 && (b.0 > a.0 || b.1 < a.1);
            assert!(!a_dominates && !b_dominates);
        }
    }
    let reference = reference_point(&table, &device).unwrap();
    let exact_points: Vec<(f64, f64)> = exact_pareto_front(&table, &device)
        .unwrap()
        .into_iter()
        .map(|i| (table.similarity(i).unwrap(), table.cost(i, &device).unwrap()))
        .collect();
    assert!(
        hypervolume_2d(&points, reference) <= hypervolume_2d(&exact_points, reference) + 1e-12
    );
}

#[test]
fn two_objective_mode_runs_the_same_machinery() {
    let (table, device) = frozen();
    let mut config = SearchConfig::new(device);
    config.n_gen = 15;
    config.seed = 3;
    config.objective_mode = ObjectiveMode::TwoObjective;
    let result = run_search(&config, &table).unwrap();
    assert!(!result.archive.is_empty());
    assert!(result.distinct_evaluations <= config.n_pop * (config.n_gen + 1));
}

#[test]
fn normalized_cost_diversity_is_a_config_flag() {
    let (table, device) = frozen();
    let mut config = SearchConfig::new(device);
    config.n_gen = 15;
    config.seed = 6;
    config.normalize_costs = true;
    let result = run_search(&config, &table).unwrap();
    assert!(result.distinct_evaluations <= config.n_pop * (config.n_gen + 1));
    assert_eq!(result.diversity_series.len(), config.n_gen + 1);
    // The reported series stays in raw cost units either way.
    assert!(result.diversity_series.iter().all(|&d| d.is_finite() && d >= 0.0));
}

#[test]
fn search_results_survive_csv_round_trip() {
    let (table, device) = frozen();
    let path = std::env::temp_dir().join(format!("phdnas-core-it-{}.csv", std::process::id()));
    save_benchmark(&table, &path).unwrap();
    let reloaded = load_benchmark(&path).unwrap();
    let _ = std::fs::remove_file(&path);

    let mut config = SearchConfig::new(device);
    config.n_gen = 10;
    config.seed = 4;
    let direct = run_search(&config, &table).unwrap();
    let via_disk = run_search(&config, &reloaded).unwrap();

    assert_eq!(direct.diversity_series, via_disk.diversity_series);
    assert_eq!(direct.archive.front(), via_disk.archive.front());
    assert_eq!(direct.distinct_evaluations, via_disk.distinct_evaluations);
}
