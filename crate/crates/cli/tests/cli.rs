use std::fs;
use std::path::Path;

use coalesce_cli::main_with;
use serde_json::Value;

fn run(args: &[&str]) -> (u8, String) {
    let mut buf = Vec::new();
    let mut argv = vec!["coalesce"];
    argv.extend_from_slice(args);
    let code = main_with(argv, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gap_pmf_csv_rows_match_the_library() {
    let (code, text) = run(&["gap-pmf", "--model", "ct-simple-walk", "--T", "1", "--gmax", "5"]);
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,mu,pmf,cumulative"));
    let law = coalesce_core::gaps::DiscreteGapLaw::new(&coalesce_core::kernels::DiscreteKernel::ct_simple_walk(1.0).unwrap());
    for (i, line) in lines.take(3).enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let g = i as i64 + 1;
        assert_eq!(f[0], g.to_string());
        assert_eq!(f[1], format!("{:.11e}", law.intensity(g).unwrap()));
    }
}

#[test]
fn parity_model_emits_even_gaps_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pmf");
    let (code, _) = run(&["gap-pmf", "--model", "parity-walk", "--T", "4", "--gmax", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let table = fs::read_to_string(out.join("gap_pmf.csv")).unwrap();
    let gs: Vec<i64> = table.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(gs, vec![2, 4, 6, 8, 10, 12]);
    let side = read_json(&out.join("gap_pmf.json"));
    assert_eq!(side["total_intensity"], side["telescoped_closed_form"]);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "gap-pmf");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn rayleigh_constants_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run(&["rayleigh", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("total 5.64189583548e-1"));
    let c = read_json(&dir.path().join("rayleigh.json"));
    assert!((c["four_minus_pi"].as_f64().unwrap() - (4.0 - std::f64::consts::PI)).abs() < 1e-11);
}

#[test]
fn joint_gap_mesh_layout() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run(&["joint-gap", "--grid-rows", "3", "--gmax", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    let mesh = fs::read_to_string(dir.path().join("joint_gap.dat")).unwrap();
    let blocks: Vec<&str> = mesh.split("\n\n").filter(|b| !b.trim().is_empty()).collect();
    assert_eq!(blocks.len(), 3);
    assert!(blocks.iter().all(|b| b.lines().count() == 3));
    let first: Vec<f64> = blocks[0].lines().next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.5);
    assert!(first[2] > 0.0);
    let side = read_json(&dir.path().join("joint_gap.json"));
    assert!((side["rho"].as_f64().unwrap() + 0.164948).abs() < 1e-5);
}

#[test]
fn warren_with_monte_carlo() {
    let (code, text) = run(&["warren", "--model", "parity-walk", "--T", "2", "--starts", "0,2", "--thresholds", "0,inf", "--mc", "20000", "--seed", "5"]);
    assert_eq!(code, 0);
    let det: f64 = text.lines().next().unwrap().split(' ').nth(1).unwrap().parse().unwrap();
    assert_eq!(det, 0.75);
    let z: f64 = text.lines().nth(1).unwrap().split(' ').next_back().unwrap().parse().unwrap();
    assert!(z.abs() < 4.0);
    let (code, _) = run(&["warren", "--model", "parity-walk", "--T", "2", "--starts", "0,2", "--thresholds", "0,1", "--mc", "10"]);
    assert_eq!(code, 2);
}

#[test]
fn intensity_full_and_half_line() {
    let (code, text) = run(&["intensity", "--walls", "0.5", "--survivors", "0,1", "--T", "1"]);
    assert_eq!(code, 0);
    assert!(text.starts_with("det "));
    let (code, _) = run(&["intensity", "--walls", "1", "--survivors", "0.5,2", "--T", "1", "--halfline"]);
    assert_eq!(code, 0);
    let (code, _) = run(&["intensity", "--walls", "-1", "--survivors", "0.5,2", "--T", "1", "--halfline"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["intensity", "--model", "ct-simple-walk", "--walls", "0.5", "--survivors", "0,2", "--T", "1"]);
    assert_eq!(code, 0);
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(run(&["gap-pmf", "--model", "ct-simple-walk", "--T=-1"]).0, 2);
    assert_eq!(run(&["gap-pmf", "--model", "parity-walk", "--T", "1.5"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"model":"CT_SIMPLE_WALK","horizon":1.0,"window_halfwidth":200,"replicates":20,"seed":42}"#).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["--threads", "1", "simulate", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap()]).0, 0);
    let ma = read_json(&a.join("manifest.json"));
    let mb = read_json(&b.join("manifest.json"));
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["seed"], 42);
    for f in ["gap_histogram.csv", "wall_gap_histogram.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }

    let no_seed = dir.path().join("noseed.json");
    fs::write(&no_seed, r#"{"model":"CT_SIMPLE_WALK","horizon":1.0,"window_halfwidth":200,"replicates":2}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", no_seed.to_str().unwrap(), "--out", a.to_str().unwrap()]).0, 2);
    let both = dir.path().join("both.json");
    fs::write(&both, r#"{"model":"PARITY_WALK","horizon":2,"window_halfwidth":200,"replicates":2,"seed":1,"initial_occupancy":"all_sites"}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", both.to_str().unwrap(), "--out", a.to_str().unwrap()]).0, 2);
}

#[test]
fn verify_oracle_suite_passes() {
    let (code, text) = run(&["verify", "--suite", "oracle"]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.contains(" PASS ")));
}

#[test]
fn verify_quadrature_reports_the_correlation_deviation() {
    let (code, text) = run(&["verify", "--suite", "quadrature"]);
    assert_eq!(code, 4, "{text}");
    let failing: Vec<&str> = text.lines().filter(|l| l.contains(" FAIL ")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("criterion  5"));
}
