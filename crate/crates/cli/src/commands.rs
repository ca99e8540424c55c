use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use bgp_sdn::experiment::{
    run_case_study, run_sweep, simulate_ensemble, write_case_study_csv, write_csv, write_json, CaseStudySpec,
    ConfigMap, DisconnectedPolicy, SweepSpec, Topology,
};
use bgp_sdn::graph::{reachable_count, read_edge_list, write_edge_list, Forwarding};
use bgp_sdn::sim::{derive_seed, simulate_batch, simulate_once, Announcer, CoveragePolicy, RunConfig, RunStats};
use bgp_sdn::{
    convergence_time_with, core_convergence_time_with, full_mesh_convergence_time, DegreeSpec, Error, Exact,
    ModelParams, Result, Tier, TopologySpec,
};
use serde_json::json;

use crate::{Cli, Command, Common, Format, TopologyKind};

const DEFAULT_RUNS: usize = 200;
const DEFAULT_SEED: u64 = 1;

fn load_config(common: &Common) -> Result<ConfigMap> {
    let mut cfg = match &common.config {
        Some(path) => ConfigMap::parse(&std::fs::read_to_string(path)?)?,
        None => ConfigMap::default(),
    };
    common.apply(&mut cfg);
    Ok(cfg)
}

/// Runs `write` against `--out` or standard output.
fn with_output(out: &Option<PathBuf>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_pairs(w: &mut dyn Write, format: Format, value: &serde_json::Value) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, value).map_err(io::Error::from)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "quantity,value")?;
            for (k, v) in value.as_object().expect("object") {
                if !v.is_object() && !v.is_array() {
                    writeln!(w, "{k},{}", v.to_string().trim_matches('"'))?;
                }
            }
        }
    }
    Ok(())
}

fn lambda(cfg: &ConfigMap) -> Result<f64> {
    cfg.parsed("lambda", 1.0)
}

pub fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let mut cfg = load_config(common)?;
    match &cli.command {
        Command::Analytic {
            topo,
            eval,
            mu_d,
            cv_d,
            exact,
        } => {
            topo.apply(&mut cfg);
            eval.apply(&mut cfg);
            let format = common.format.unwrap_or(Format::Json);
            let value = analytic(&cfg, topo.topology, *mu_d, *cv_d, *exact)?;
            with_output(&common.out, |w| write_pairs(w, format, &value))
        }
        Command::Simulate {
            topo,
            graph,
            announcer,
            trace,
        } => {
            topo.apply(&mut cfg);
            let format = common.format.unwrap_or(Format::Json);
            let stats = simulate(&cfg, graph.as_deref(), *announcer, trace.as_deref())?;
            let value = json!({
                "runs": stats.runs,
                "mean": stats.mean,
                "std_dev": stats.std_dev,
                "std_err": stats.std_err,
                "ci95_low": stats.ci95.0,
                "ci95_high": stats.ci95.1,
            });
            with_output(&common.out, |w| write_pairs(w, format, &value))
        }
        Command::Sweep {
            topo,
            eval,
            sweep,
            values,
        } => {
            topo.apply(&mut cfg);
            eval.apply(&mut cfg);
            if let Some(v) = sweep {
                let name = clap::ValueEnum::to_possible_value(v).expect("variant");
                cfg.set("sweep", name.get_name());
            }
            if let Some(v) = values {
                cfg.set("values", v.as_str());
            }
            let spec = SweepSpec::from_config(&cfg)?;
            let rows = run_sweep(&spec)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                log::warn!("{failed} of {} sweep points failed", rows.len());
            }
            let format = common.format.unwrap_or(Format::Csv);
            with_output(&common.out, |w| match format {
                Format::Csv => write_csv(&rows, w),
                Format::Json => write_json(&rows, w),
            })
        }
        Command::Core {
            n1,
            n2,
            p11,
            p12,
            lambda,
            p22_values,
            k1_values,
            eval,
        } => {
            crate::set(&mut cfg, "n1", *n1);
            crate::set(&mut cfg, "n2", *n2);
            crate::set(&mut cfg, "p11", *p11);
            crate::set(&mut cfg, "p12", *p12);
            crate::set(&mut cfg, "lambda", *lambda);
            crate::set(&mut cfg, "p22_values", p22_values.clone());
            crate::set(&mut cfg, "k1_values", k1_values.clone());
            eval.apply(&mut cfg);
            let spec = CaseStudySpec::from_config(&cfg)?;
            let report = run_case_study(&spec)?;
            for b in &report.best {
                match (b.baseline, b.k1) {
                    (Some(base), Some(k1)) => {
                        eprintln!(
                            "p22 = {}: smallest k1 beating the k1 = 1 baseline ({base:.4}) is {k1}",
                            b.p22
                        )
                    }
                    (Some(base), None) => {
                        eprintln!("p22 = {}: no k1 in the grid beats the baseline ({base:.4})", b.p22)
                    }
                    (None, _) => eprintln!("p22 = {}: baseline unavailable", b.p22),
                }
            }
            let format = common.format.unwrap_or(Format::Csv);
            with_output(&common.out, |w| match format {
                Format::Csv => write_case_study_csv(&report, w),
                Format::Json => {
                    serde_json::to_writer_pretty(&mut *w, &report).map_err(io::Error::from)?;
                    writeln!(w)?;
                    Ok(())
                }
            })
        }
        Command::ExportGraph { topo } => {
            topo.apply(&mut cfg);
            let graph = Topology::from_config(&cfg)?.sample_graph(cfg.parsed("seed", DEFAULT_SEED)?)?;
            with_output(&common.out, |w| write_edge_list(&graph, w))
        }
        Command::ImportGraph { path, announcer } => {
            let value = import(path, *announcer)?;
            let format = common.format.unwrap_or(Format::Json);
            with_output(&common.out, |w| write_pairs(w, format, &value))
        }
    }
}

fn analytic(
    cfg: &ConfigMap,
    kind: Option<TopologyKind>,
    mu_d: Option<f64>,
    cv_d: Option<f64>,
    exact: bool,
) -> Result<serde_json::Value> {
    let lambda = lambda(cfg)?;
    let eval = cfg.eval()?;
    let n = cfg.parsed("n", 300)?;
    let k = cfg.parsed("k", 1)?;
    if exact {
        if !matches!(kind, None | Some(TopologyKind::FullMesh)) {
            return Err(Error::Domain("--exact applies to the full mesh only".into()));
        }
        let rate = Exact::from_float(lambda).ok_or_else(|| Error::Domain("lambda is not finite".into()))?;
        let t = full_mesh_convergence_time(&ModelParams::new(n, k, rate)?)?.expected_time;
        return Ok(json!({
            "topology": "full-mesh",
            "n": n,
            "k": k,
            "expected_time_exact": t.to_string(),
            "expected_time": bgp_sdn::scalar::Field::to_f64_lossy(&t),
        }));
    }
    if let Some(TopologyKind::ConfigModel) = kind {
        let (mu_d, cv_d) = match (mu_d, cv_d) {
            (Some(m), Some(c)) => (m, c),
            _ => return Err(Error::Domain("config-model needs --mu-d and --cv-d".into())),
        };
        let spec = TopologySpec::ConfigModel {
            params: ModelParams::new(n, k, lambda)?,
            degrees: DegreeSpec::Moments { mu_d, cv_d },
        };
        let est = convergence_time_with(&spec, &eval)?;
        return Ok(json!({
            "topology": "config-model",
            "n": n,
            "k": k,
            "mu_d": mu_d,
            "cv_d": cv_d,
            "expected_time": est.expected_time,
        }));
    }
    let topo = Topology::from_config(cfg)?;
    topo.validate(lambda)?;
    if let Some(spec) = topo.tiered_spec(lambda) {
        let e = core_convergence_time_with(&spec, &eval)?;
        return Ok(json!({
            "topology": "tiered",
            "t_peering": e.t_peering,
            "t_x_tier1": e.t_x_tier1,
            "t_tier1": e.t_tier1,
            "t_tier1_tier2": e.t_tier1_tier2,
            "t_transit": e.t_transit,
            "t_total": e.t_total,
        }));
    }
    let realized = match topo {
        Topology::PowerLaw { .. } => {
            let graph = topo.sample_graph(cfg.parsed("seed", DEFAULT_SEED)?)?;
            Some(graph.degree_stats()?)
        }
        _ => None,
    };
    let t = topo.analytic(lambda, &eval, realized.as_ref())?;
    let mut value = json!({ "topology": topo, "expected_time": t });
    if let Some(stats) = realized {
        value["realized_mu_d"] = json!(stats.mu_d);
        value["realized_cv_d"] = json!(stats.cv_d);
    }
    Ok(value)
}

fn coverage(policy: DisconnectedPolicy) -> CoveragePolicy {
    match policy {
        DisconnectedPolicy::ReachableOnly => CoveragePolicy::ReachableOnly,
        DisconnectedPolicy::Regenerate { .. } => CoveragePolicy::Strict,
    }
}

fn simulate(
    cfg: &ConfigMap,
    graph: Option<&Path>,
    announcer: Option<usize>,
    trace: Option<&Path>,
) -> Result<RunStats<f64>> {
    let lambda = lambda(cfg)?;
    let runs = cfg.parsed("runs", DEFAULT_RUNS)?;
    let seed = cfg.parsed("seed", DEFAULT_SEED)?;
    let policy = cfg.policy()?;
    let Some(path) = graph else {
        if trace.is_some() || announcer.is_some() {
            return Err(Error::Domain("--trace and --announcer need --graph".into()));
        }
        let topo = Topology::from_config(cfg)?;
        return Ok(simulate_ensemble(&topo, lambda, runs, seed, policy)?.stats);
    };
    let graph = read_edge_list(BufReader::new(File::open(path)?))?;
    let run_cfg = RunConfig::new(graph, lambda, seed)
        .with_announcer(announcer.map_or(Announcer::Uniform, Announcer::Fixed))
        .with_coverage(coverage(policy));
    if let Some(trace_path) = trace {
        let first = RunConfig {
            rng_seed: derive_seed(seed, 0),
            ..run_cfg.clone()
        };
        let t = simulate_once(&first)?;
        let mut w = BufWriter::new(File::create(trace_path)?);
        t.write_lines(&mut w)?;
        w.flush()?;
    }
    simulate_batch(&run_cfg, runs)
}

fn import(path: &Path, announcer: Option<usize>) -> Result<serde_json::Value> {
    let graph = read_edge_list(BufReader::new(File::open(path)?))?;
    let forwarding = Forwarding::for_graph(&graph);
    let announcer = match announcer {
        Some(a) => a,
        None if graph.is_tiered() => (0..graph.node_count())
            .find(|&u| graph.tier(u) == Tier::Tier2)
            .ok_or_else(|| Error::Domain("tiered graph has no tier-2 node".into()))?,
        None => 0,
    };
    let stats = graph.degree_stats().ok();
    Ok(json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "tiered": graph.is_tiered(),
        "cluster_size": graph.cluster().len(),
        "mu_d": stats.map(|s| s.mu_d),
        "cv_d": stats.map(|s| s.cv_d),
        "announcer": announcer,
        "reachable": reachable_count(&graph, announcer, forwarding)?,
    }))
}
