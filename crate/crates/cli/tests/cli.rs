//! End-to-end tests of the phdnas binary: flags, file outputs, exit codes.

mod common;

use common::*;

use phdnas_core::{load_benchmark, save_benchmark, SyntheticParams, SPACE_SIZE};

#[test]
fn gen_bench_is_loadable_and_deterministic() {
    let dir = TempDir::new("genbench");
    let path = generate_bench(&dir, 1);

    let table = load_benchmark(&path).unwrap();
    assert_eq!(table.len(), SPACE_SIZE);
    assert_eq!(table.devices().len(), 2);
    assert!(table.has_accuracy());

    let first = std::fs::read(&path).unwrap();
    let again = dir.file("again.csv");
    let output = phdnas(&["gen-bench", "--seed", "1", "--out", again.to_str().unwrap()]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(first, std::fs::read(&again).unwrap());

    let single = dir.file("single.csv");
    let output = phdnas(&[
        "gen-bench",
        "--devices",
        "fpga",
        "--out",
        single.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let table = load_benchmark(&single).unwrap();
    assert_eq!(table.devices().len(), 1);
}

#[test]
fn run_writes_archive_and_manifest() {
    let dir = TempDir::new("run");
    let bench = generate_bench(&dir, 1);
    let out = dir.file("out");
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--gen",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr_of(&output));

    let archive = std::fs::read_to_string(out.join("archive.csv")).unwrap();
    let mut lines = archive.lines();
    assert_eq!(lines.next(), Some("index,genotype,similarity,cost,on_front"));
    let mut front_rows = 0usize;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[1].len(), 6);
        fields[0].parse::<usize>().unwrap();
        fields[2].parse::<f64>().unwrap();
        fields[3].parse::<f64>().unwrap();
        match fields[4] {
            "true" => front_rows += 1,
            "false" => {}
            other => panic!("bad on_front value {other:?}"),
        }
    }
    assert!(front_rows >= 1);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let evaluations = manifest["distinct_evaluations"].as_u64().unwrap();
    assert!(evaluations <= 20 * 6);
    assert!(manifest["duration_seconds"].as_f64().unwrap() > 0.0);
    assert_eq!(manifest["population_diversity"].as_array().unwrap().len(), 6);
    assert_eq!(manifest["config"]["n_gen"].as_u64().unwrap(), 5);
    assert_eq!(
        manifest["archive_front"]["size"].as_u64().unwrap(),
        front_rows as u64
    );
}

#[test]
fn run_with_zero_generations_archives_at_most_pop() {
    let dir = TempDir::new("gen0");
    let bench = generate_bench(&dir, 1);
    let out = dir.file("out");
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--gen",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let archive = std::fs::read_to_string(out.join("archive.csv")).unwrap();
    assert!(archive.lines().count() - 1 <= 20);
}

#[test]
fn run_respects_objectives_flag() {
    let dir = TempDir::new("objflag");
    let bench = generate_bench(&dir, 1);
    for objectives in ["2", "3"] {
        let out = dir.file(objectives);
        let output = phdnas(&[
            "run",
            "--bench",
            bench.to_str().unwrap(),
            "--device",
            "fpga",
            "--gen",
            "3",
            "--objectives",
            objectives,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&output), 0);
    }
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--objectives",
        "4",
        "--out",
        dir.file("bad").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);

    // Odd population size violates the pairing requirement.
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--pop",
        "7",
        "--out",
        dir.file("odd").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("even"));
}

#[test]
fn gen_bench_reports_io_failure() {
    let dir = TempDir::new("genbench-io");
    // The output path is an existing directory: the write must fail.
    let output = phdnas(&["gen-bench", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn exit_codes_distinguish_io_and_domain_errors() {
    let dir = TempDir::new("exitcodes");

    // Missing file: I/O failure.
    let output = phdnas(&[
        "run",
        "--bench",
        dir.file("nope.csv").to_str().unwrap(),
        "--device",
        "fpga",
    ]);
    assert_eq!(exit_code(&output), 2);

    // Malformed content: load (domain) error.
    let bad = dir.file("bad.csv");
    std::fs::write(&bad, "index,genotype,similarity,cost_fpga\n0,000000,0.5,1.0\n").unwrap();
    let output = phdnas(&["run", "--bench", bad.to_str().unwrap(), "--device", "fpga"]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("incomplete"));

    // Unknown device: domain error.
    let bench = generate_bench(&dir, 1);
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "tpu_v9",
        "--out",
        dir.file("out").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("available"));
}

#[test]
fn oracle_reports_front_and_best_accuracy() {
    let dir = TempDir::new("oracle");
    let bench = generate_bench(&dir, 1);
    let front_csv = dir.file("front.csv");
    let output = phdnas(&[
        "oracle",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--out",
        front_csv.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let summary = stdout_of(&output);
    assert!(summary.contains("front_size="));
    assert!(summary.contains("hypervolume="));
    assert!(summary.contains("best_accuracy_index="));

    let front_size: usize = summary
        .lines()
        .find_map(|l| l.strip_prefix("front_size="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((10..=60).contains(&front_size), "front size {front_size}");
    let front = std::fs::read_to_string(&front_csv).unwrap();
    assert_eq!(front.lines().count() - 1, front_size);
    assert!(front.starts_with("index,genotype,similarity,cost,accuracy\n"));
}

#[test]
fn oracle_without_accuracy_column_omits_best_row() {
    let dir = TempDir::new("oracle-noacc");
    let params = SyntheticParams {
        with_accuracy: false,
        ..SyntheticParams::default()
    };
    let table = phdnas_core::generate_synthetic(2, &params);
    let bench = dir.file("noacc.csv");
    save_benchmark(&table, &bench).unwrap();

    let output = phdnas(&[
        "oracle",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--out",
        dir.file("front.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let summary = stdout_of(&output);
    assert!(summary.contains("front_size="));
    assert!(!summary.contains("best_accuracy"));
}

#[test]
fn oracle_hypervolume_bounds_search_hypervolume() {
    let dir = TempDir::new("oracle-bound");
    let bench = generate_bench(&dir, 1);

    let output = phdnas(&[
        "oracle",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--out",
        dir.file("front.csv").to_str().unwrap(),
    ]);
    let oracle_hv: f64 = stdout_of(&output)
        .lines()
        .find_map(|l| l.strip_prefix("hypervolume="))
        .unwrap()
        .parse()
        .unwrap();

    let out = dir.file("run");
    let output = phdnas(&[
        "run",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--gen",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let archive_hv = manifest["archive_front"]["hypervolume"].as_f64().unwrap();
    assert!(oracle_hv >= archive_hv - 1e-12);
}

#[test]
fn ablate_single_seed_emits_series_with_guard_verdict() {
    let dir = TempDir::new("ablate1");
    let bench = generate_bench(&dir, 1);
    let out = dir.file("out");
    let output = phdnas(&[
        "ablate",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr_of(&output));
    assert!(stdout_of(&output).contains("verdict: insufficient seeds"));

    let csv = std::fs::read_to_string(out.join("diversity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("generation,arm,seed,pop_diversity"));
    // 2 arms x 1 seed x (100 + 1) generations.
    assert_eq!(lines.count(), 2 * 101);
    // Canonical ordering: 2obj block precedes 3obj.
    let first_data = csv.lines().nth(1).unwrap();
    assert!(first_data.starts_with("0,2obj,0,"));
}

#[test]
fn ablate_validates_inputs_and_thread_env() {
    let dir = TempDir::new("ablate-bad");
    let bench = generate_bench(&dir, 1);
    let output = phdnas(&[
        "ablate",
        "--bench",
        bench.to_str().unwrap(),
        "--device",
        "fpga",
        "--seeds",
        "0",
    ]);
    assert_eq!(exit_code(&output), 1);

    let output = phdnas_with_env(
        &[
            "ablate",
            "--bench",
            bench.to_str().unwrap(),
            "--device",
            "fpga",
            "--seeds",
            "1",
            "--out",
            dir.file("out").to_str().unwrap(),
        ],
        "PHDNAS_THREADS",
        "abc",
    );
    assert_eq!(exit_code(&output), 1);
    assert!(stderr_of(&output).contains("PHDNAS_THREADS"));

    // A capped run still succeeds and produces the same series.
    let capped_out = dir.file("capped");
    let output = phdnas_with_env(
        &[
            "ablate",
            "--bench",
            bench.to_str().unwrap(),
            "--device",
            "fpga",
            "--seeds",
            "2",
            "--out",
            capped_out.to_str().unwrap(),
        ],
        "PHDNAS_THREADS",
        "1",
    );
    assert_eq!(exit_code(&output), 0);
    let wide_out = dir.file("wide");
    let output = phdnas_with_env(
        &[
            "ablate",
            "--bench",
            bench.to_str().unwrap(),
            "--device",
            "fpga",
            "--seeds",
            "2",
            "--out",
            wide_out.to_str().unwrap(),
        ],
        "PHDNAS_THREADS",
        "0",
    );
    assert_eq!(exit_code(&output), 0);
    assert_eq!(
        std::fs::read(capped_out.join("diversity.csv")).unwrap(),
        std::fs::read(wide_out.join("diversity.csv")).unwrap()
    );
}

#[test]
fn help_and_usage_errors() {
    let output = phdnas(&["--help"]);
    assert_eq!(exit_code(&output), 0);
    assert!(stdout_of(&output).contains("gen-bench"));

    // Unknown flag: configuration error, not clap's default exit 2.
    let output = phdnas(&["run", "--bogus"]);
    assert_eq!(exit_code(&output), 1);
}
