use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{load_covariates, load_network, load_periods, load_responses, Responses};
use crate::{
    CentralityCmd, Command, CompareCmd, DynamicCmd, FitCmd, GenerateCmd, ResponseArgs, SimulateCmd, SweepCmd,
};
use snirkit::baselines::compare_methods;
use snirkit::ext::{dynamic_fit, fit_with_covariates, PeriodSplit};
use snirkit::netcore::io::{write_edge_list, LoadedNetwork};
use snirkit::netcore::{betweenness, harmonic};
use snirkit::simlab::{run_study, snr_sweep, StudyConfig, SweepConfig, TruthPlan};
use snirkit::snir::screen_candidates;
use snirkit::{fit, DirectedGraph, FitConfig};

pub fn dispatch(cmd: &Command) -> CliResult<()> {
    match cmd {
        Command::Fit(c) => fit_cmd(c),
        Command::Simulate(c) => simulate_cmd(c),
        Command::Generate(c) => generate_cmd(c),
        Command::Centrality(c) => centrality_cmd(c),
        Command::Compare(c) => compare_cmd(c),
        Command::Sweep(c) => sweep_cmd(c),
        Command::Dynamic(c) => dynamic_cmd(c),
    }
}

/// Writer for `--out`, or stdout.
fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Serializes through `Value` so object keys come out sorted.
fn write_json<T: Serialize>(out: Option<&Path>, v: &T) -> CliResult<()> {
    let v = serde_json::to_value(v)?;
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &v)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Puts the resolved configuration next to a CSV output, or on stderr.
fn echo_config(out: Option<&Path>, config: &Value) -> CliResult<()> {
    match out {
        Some(p) => write_json(Some(&sidecar(p)), config),
        None => {
            eprintln!("{}", serde_json::to_string(config)?);
            Ok(())
        }
    }
}

fn network_stats(net: &LoadedNetwork) -> Value {
    json!({
        "nodes": net.graph.n(),
        "edges": net.graph.edge_count(),
        "duplicate_edges": net.duplicate_edges,
        "self_loops": net.self_loops,
        "header_skipped": net.header_skipped,
    })
}

fn read_inputs(edges: &Path, r: &ResponseArgs) -> CliResult<(LoadedNetwork, Responses)> {
    let net = load_network(edges)?;
    let y = load_responses(&r.responses, &net.graph, r.response_col.as_deref(), r.log, r.missing)?;
    info!("loaded {} nodes, {} edges", net.graph.n(), net.graph.edge_count());
    Ok((net, y))
}

fn input_stats(net: &LoadedNetwork, y: &Responses) -> Value {
    json!({
        "network": network_stats(net),
        "responses": { "filled": y.filled, "unknown_rows": y.unknown },
    })
}

fn coefficient_table(w: &mut dyn Write, g: &DirectedGraph, f: &snirkit::FitResult) -> io::Result<()> {
    let width = f.coef.iter().map(|c| g.label(c.node).len()).max().unwrap_or(4).max(4);
    writeln!(w, "{:<width$}  {:>10}  {:>10}  {:>8}  {:>10}", "node", "rho", "se", "t", "p")?;
    for c in &f.coef {
        writeln!(
            w,
            "{:<width$}  {:>10.4}  {:>10.4}  {:>8.2}  {:>10.3e}",
            g.label(c.node),
            c.rho,
            c.se,
            c.t,
            c.p
        )?;
    }
    writeln!(
        w,
        "selected {} of |M| = {} (K = {}); R2 = {:.4}, adj R2 = {:.4}, sigma2 = {:.4}",
        f.selected.len(),
        f.m_size,
        f.k,
        f.r2,
        f.adj_r2,
        f.sigma2
    )
}

fn fit_cmd(c: &FitCmd) -> CliResult<()> {
    let cfg = c.model.fit_config()?;
    let (net, resp) = read_inputs(&c.network.edges, &c.response)?;
    let g = &net.graph;
    let f = match &c.covariates {
        Some(p) => fit_with_covariates(g, &resp.values, &load_covariates(p, g)?, &cfg)?,
        None => fit(g, &resp.values, &cfg)?,
    };
    let report = json!({
        "config": { "command": "fit", "args": c, "fit": cfg },
        "input": input_stats(&net, &resp),
        "result": f.report(g),
    });
    if c.out.is_some() {
        coefficient_table(&mut io::stdout().lock(), g, &f)?;
    } else {
        coefficient_table(&mut io::stderr().lock(), g, &f)?;
    }
    write_json(c.out.as_deref(), &report)
}

fn read_study_config(path: &Path) -> CliResult<StudyConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    if is_toml {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

fn simulate_cmd(c: &SimulateCmd) -> CliResult<()> {
    let mut base = match &c.config {
        Some(p) => read_study_config(p)?,
        None => {
            let preset = c.preset.ok_or_else(|| CliError::Usage("--preset or --config is required".into()))?;
            let n = *c
                .n
                .first()
                .ok_or_else(|| CliError::Usage("--n is required without --config".into()))?;
            StudyConfig {
                generator: preset.spec(n, 0),
                truth: TruthPlan::standard(10),
                reps: 100,
                seed: 1,
                fit: FitConfig::default(),
            }
        }
    };
    if let Some(preset) = c.preset {
        base.generator = preset.spec(base.generator.n, base.generator.seed);
    }
    if c.model.gamma.is_some() || c.model.m.is_some() || c.model.k.is_some() {
        base.fit = c.model.fit_config()?;
    }
    if let Some(s1) = c.s1 {
        base.truth.s1_size = s1;
    }
    if let Some(reps) = c.reps {
        base.reps = reps;
    }
    if let Some(seed) = c.seed {
        base.seed = seed;
    }
    if base.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    if base.truth.s1_size == 0 {
        return Err(CliError::Usage("--s1 must be at least 1".into()));
    }
    let sizes = if c.n.is_empty() { vec![base.generator.n] } else { c.n.clone() };
    if sizes.contains(&0) {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let configs: Vec<StudyConfig> = sizes
        .iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.generator.n = n;
            cfg
        })
        .collect();
    echo_config(c.out.as_deref(), &json!({ "command": "simulate", "studies": configs }))?;
    let mut w = csv::Writer::from_writer(sink(c.out.as_deref())?);
    for cfg in &configs {
        info!("study N = {}", cfg.generator.n);
        let res = run_study(cfg)?;
        w.serialize(res.row())?;
        w.flush()?;
    }
    Ok(())
}

fn generate_cmd(c: &GenerateCmd) -> CliResult<()> {
    if c.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = c.preset.spec(c.n, c.seed);
    let g = spec.generate()?;
    let mut w = sink(c.out.as_deref())?;
    writeln!(w, "# snirkit generate {}", serde_json::to_string(&serde_json::to_value(&spec)?)?)?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CentralityRow<'a> {
    node: &'a str,
    in_degree: usize,
    betweenness: f64,
    harmonic: f64,
}

fn centrality_cmd(c: &CentralityCmd) -> CliResult<()> {
    let net = load_network(&c.network.edges)?;
    let g = &net.graph;
    let (bet, har) = rayon::join(|| betweenness(g), || harmonic(g));
    let mut w = csv::Writer::from_writer(sink(c.out.as_deref())?);
    for j in 0..g.n() {
        w.serialize(CentralityRow {
            node: &g.label(j),
            in_degree: g.in_degree_of(j),
            betweenness: bet[j],
            harmonic: har[j],
        })?;
    }
    w.flush()?;
    Ok(())
}

fn compare_cmd(c: &CompareCmd) -> CliResult<()> {
    let cfg = c.model.fit_config()?;
    if c.size == Some(0) {
        return Err(CliError::Usage("--size must be at least 1".into()));
    }
    let (net, resp) = read_inputs(&c.network.edges, &c.response)?;
    let g = &net.graph;
    let rep = compare_methods(g, &resp.values, c.size, &cfg)?;
    let mut err = io::stderr().lock();
    writeln!(err, "{:<12}  {:>8}  {:>8}", "method", "delta_R", "delta_F")?;
    for m in &rep.methods {
        writeln!(err, "{:<12}  {:>8.4}  {:>8.4}", m.kind.name(), m.delta_r, m.delta_f)?;
    }
    let report = json!({
        "config": { "command": "compare", "args": c, "fit": cfg },
        "input": input_stats(&net, &resp),
        "size": rep.size,
        "methods": rep.report(g),
    });
    write_json(c.out.as_deref(), &report)
}

fn sweep_cmd(c: &SweepCmd) -> CliResult<()> {
    let fit_cfg = c.model.fit_config()?;
    if c.reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    if !(c.sd > 0.0 && c.sd.is_finite()) {
        return Err(CliError::Usage(format!("--sd {} must be positive", c.sd)));
    }
    let (net, resp) = read_inputs(&c.network.edges, &c.response)?;
    let g = &net.graph;
    let base = fit(g, &resp.values, &fit_cfg)?;
    let cfg = SweepConfig {
        reps: c.reps,
        noise_sd: c.sd,
        seed: c.seed,
        fit: fit_cfg,
        ..SweepConfig::default()
    };
    echo_config(
        c.out.as_deref(),
        &json!({
            "command": "sweep",
            "args": c,
            "sweep": cfg,
            "input": input_stats(&net, &resp),
            "base_selected": base.selected.iter().map(|&j| g.label(j).into_owned()).collect::<Vec<_>>(),
        }),
    )?;
    let points = snr_sweep(g, &resp.values, &base, &cfg)?;
    let mut w = csv::Writer::from_writer(sink(c.out.as_deref())?);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

fn dynamic_cmd(c: &DynamicCmd) -> CliResult<()> {
    let cfg = c.model.fit_config()?;
    let (net, resp) = read_inputs(&c.network.edges, &c.response)?;
    let g = &net.graph;
    let periods = load_periods(&c.periods, g)?;
    let m = screen_candidates(g, &cfg.screen)?;
    let split = PeriodSplit::from_periods(&periods, &m)?;
    let d = dynamic_fit(g, &resp.values, &split, &cfg)?;
    let period = |f: &Option<snirkit::FitResult>| f.as_ref().map_or(Value::Null, |f| f.report(g));
    let report = json!({
        "config": { "command": "dynamic", "args": c, "fit": cfg },
        "input": input_stats(&net, &resp),
        "candidates": { "period1": split.m1.len(), "period2": split.m2.len() },
        "period1": period(&d.period1),
        "period2": period(&d.period2),
    });
    write_json(c.out.as_deref(), &report)
}
