use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use snirkit::netcore::io::{read_edge_list_file, write_edge_list};
use snirkit::netcore::GeneratorSpec;
use snirkit::simlab::{draw_dataset, TruthPlan};
use snirkit::FitConfig;
use tempfile::TempDir;

fn snirkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snirkit"))
        .args(args)
        .env_remove("SNIRKIT_THREADS")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// An SBM network with model responses written as `e.txt` and `y.csv`.
/// Returns the paths and the influential labels.
fn dataset(dir: &TempDir) -> (PathBuf, PathBuf, Vec<String>) {
    let d = draw_dataset(&GeneratorSpec::sbm(800, 0), &TruthPlan::standard(3), &FitConfig::default(), 9).unwrap();
    let edges = dir.path().join("e.txt");
    write_edge_list(&d.graph, fs::File::create(&edges).unwrap()).unwrap();
    let resp = dir.path().join("y.csv");
    let mut text = String::from("node,y\n");
    for (i, v) in d.y.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", d.graph.label(i)));
    }
    fs::write(&resp, text).unwrap();
    let labels = d.truth.s1.iter().map(|&j| d.graph.label(j).into_owned()).collect();
    (edges, resp, labels)
}

#[test]
fn fit_writes_report_and_table() {
    let dir = TempDir::new().unwrap();
    let (e, y, s1) = dataset(&dir);
    let out = dir.path().join("fit.json");
    let o = snirkit(&["fit", "--edges", p(&e), "--responses", p(&y), "--gamma", "0.6667", "--seed", "7", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.lines().next().unwrap().split_whitespace().eq(["node", "rho", "se", "t", "p"]));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let selected: Vec<String> = v["result"]["selected"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect();
    for j in &s1 {
        assert!(selected.contains(j), "{j} missing from {selected:?}");
    }
    assert_eq!(v["config"]["args"]["model"]["gamma"], 0.6667);
    assert_eq!(v["config"]["args"]["seed"], 7);
    assert_eq!(v["input"]["network"]["nodes"], 800);
}

#[test]
fn fit_report_goes_to_stdout_without_out() {
    let dir = TempDir::new().unwrap();
    let (e, y, _) = dataset(&dir);
    let o = snirkit(&["fit", "--edges", p(&e), "--responses", p(&y)]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["coef"].as_array().is_some_and(|c| !c.is_empty()));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rho"));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = snirkit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = snirkit(&["fit", "--edges", "x", "--responses", "y", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn conflicting_and_invalid_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let (e, y, _) = dataset(&dir);
    let o = snirkit(&["fit", "--edges", p(&e), "--responses", p(&y), "--gamma", "0.6", "--m", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let o = snirkit(&["fit", "--edges", p(&e), "--responses", p(&y), "--gamma", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_snirkit"))
        .args(["generate", "--preset", "er", "--n", "50"])
        .env("SNIRKIT_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_data_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let (e, _, _) = dataset(&dir);
    let missing = dir.path().join("nope.txt");
    let o = snirkit(&["centrality", "--edges", p(&missing)]);
    assert_eq!(o.status.code(), Some(2));
    let y = dir.path().join("partial.csv");
    fs::write(&y, "0,1.5\n").unwrap();
    let o = snirkit(&["fit", "--edges", p(&e), "--responses", p(&y)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--missing"));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "a b\nc d e\n").unwrap();
    let o = snirkit(&["centrality", "--edges", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn generate_round_trips() {
    let dir = TempDir::new().unwrap();
    for preset in ["er", "sbm", "powerlaw"] {
        let out = dir.path().join(format!("{preset}.txt"));
        let o = snirkit(&["generate", "--preset", preset, "--n", "300", "--seed", "4", "--out", p(&out)]);
        assert!(o.status.success());
        let spec = match preset {
            "er" => GeneratorSpec::er(300, 4),
            "sbm" => GeneratorSpec::sbm(300, 4),
            _ => GeneratorSpec::powerlaw(300, 4),
        };
        let g = spec.generate().unwrap();
        let loaded = read_edge_list_file(&out).unwrap().graph;
        assert_eq!(loaded.n(), g.n());
        let mut a: Vec<(usize, usize)> = g.edges().collect();
        let mut b: Vec<(usize, usize)> = loaded
            .edges()
            .map(|(i, j)| (loaded.label(i).parse().unwrap(), loaded.label(j).parse().unwrap()))
            .collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b, "{preset}");
    }
}

#[test]
fn randomized_commands_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = snirkit(&["simulate", "--preset", "sbm", "--n", "400", "--s1", "3", "--reps", "3", "--seed", seed, "--out", p(&out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = fs::read_to_string(&out).unwrap();
        // drop the timing column
        csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect::<Vec<_>>()
    };
    let a = run("a.csv", "5");
    let b = run("b.csv", "5");
    assert_eq!(a, b);
    assert_eq!(a[0], "N,TPR,FPR,CFP,Err");
    assert_eq!(a.len(), 2);
    let cfg: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.json")).unwrap()).unwrap();
    assert_eq!(cfg["studies"][0]["seed"], 5);
    assert_eq!(cfg["studies"][0]["truth"]["s1_size"], 3);
}

#[test]
fn simulate_accepts_several_sizes_and_a_config_file() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("study.toml");
    fs::write(
        &conf,
        "reps = 2\nseed = 3\n[generator]\nkind = \"er\"\nn = 300\n[truth]\ns1_size = 2\nmu = 5.0\nnoise_sd = 1.0\n",
    )
    .unwrap();
    let o = snirkit(&["simulate", "--config", p(&conf), "--n", "300", "500"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let ns: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["300", "500"]);
}

#[test]
fn centrality_compare_and_dynamic() {
    let dir = TempDir::new().unwrap();
    let (e, y, _) = dataset(&dir);
    let o = snirkit(&["centrality", "--edges", p(&e)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("node,in_degree,betweenness,harmonic"));
    assert_eq!(text.lines().count(), 801);

    let o = snirkit(&["compare", "--edges", p(&e), "--responses", p(&y), "--size", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for rule in ["snir", "in_degree", "response", "betweenness", "harmonic"] {
        let m = &v["methods"][rule];
        assert_eq!(m["selected"].as_array().unwrap().len(), 3, "{rule}");
        let d = m["delta_R"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&d));
    }

    let periods = dir.path().join("periods.csv");
    let g = read_edge_list_file(&e).unwrap().graph;
    let text: String = (0..g.n()).map(|i| format!("{},{}\n", g.label(i), 1 + i % 2)).collect();
    fs::write(&periods, text).unwrap();
    let o = snirkit(&["dynamic", "--edges", p(&e), "--responses", p(&y), "--periods", p(&periods)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["period1"].is_object() && v["period2"].is_object());
}

#[test]
fn sweep_writes_detection_curve() {
    let dir = TempDir::new().unwrap();
    let (e, y, _) = dataset(&dir);
    let out = dir.path().join("sweep.csv");
    let o = snirkit(&["sweep", "--edges", p(&e), "--responses", p(&y), "--reps", "4", "--seed", "2", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("coef,detection"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 12);
    assert!((rows[11].0 - 0.3).abs() < 1e-12);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.1)));
    assert!(dir.path().join("sweep.csv.json").exists());
}
