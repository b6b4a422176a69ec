//! Acceptance criteria of the model and its experiment engine.
//!
//! Runs as a plain binary (`cargo test --test acceptance`) and prints one
//! `PASS`/`FAIL` line per criterion. Numeric arguments select criteria,
//! e.g. `cargo test --test acceptance -- 2 5`.
//!
//! The report is the result: the process exits successfully after printing
//! it, unless `ACCEPTANCE_STRICT=1` is set, in which case any failed
//! criterion makes it exit with failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use cluster_innovation::harness::{
    convergence_experiment, grid_experiment, gsa_experiment, optimize_experiment, ExperimentKind, ExperimentSpec,
    PresetScale,
};
use cluster_innovation::model::{run, Firm, ModelParams, ModelState};
use cluster_innovation::nsga2::{hypervolume_2d, optimize, Nsga2Config, Problem};
use cluster_innovation::rng::rng_from_seed;
use cluster_innovation::sampling::{saltelli_design, BaseSampler, Dimension, ParamSpace};
use cluster_innovation::sobol::{bootstrap_significance, SaltelliOutputs};
use cluster_innovation::stats::{mean, spearman};
use cluster_innovation::{FitnessLandscape, Genome, Indicator, Landscape};
use rand::Rng;
use serde_json::json;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Outcome of one criterion: pass flag and a short measurement summary.
type Outcome = (bool, String);

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn clusterinno(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_clusterinno"))
        .args(args)
        .status()
        .map(|s| s.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let small = |extra: serde_json::Value| {
        let mut v = extra;
        v["N_f"] = json!(4);
        v["S_0"] = json!(20);
        v["t_f"] = json!(20);
        v["p_E"] = json!(1e-3);
        v
    };
    let configs = [
        ("run", json!({})),
        ("convergence", small(json!({"n_points": 4, "replications": 5}))),
        ("gsa", small(json!({"n_base": 64, "n_boot": 50}))),
        ("grid", small(json!({"axes": [{"name": "d_E", "values": [1, 51, 101]}], "replications": 3}))),
        ("optimize", small(json!({"population": 8, "generations": 60}))),
    ];
    let mut identical = 0;
    for (sub, config) in &configs {
        let path = d.join(format!("{sub}.json"));
        fs::write(&path, config.to_string()).unwrap();
        let mut trees = Vec::new();
        for attempt in ["a", "b"] {
            let out = d.join(format!("{sub}_{attempt}"));
            let ok = clusterinno(&[
                sub,
                "--config",
                path.to_str().unwrap(),
                "--seed",
                "42",
                "--workers",
                "1",
                "--out",
                out.to_str().unwrap(),
            ]);
            if !ok {
                return (false, format!("`{sub}` failed"));
            }
            trees.push(tree(&out));
        }
        if trees[0] == trees[1] && !trees[0].is_empty() {
            identical += 1;
        }
    }
    let input = d.join("grid_a/summary.csv");
    let mut plots = Vec::new();
    for attempt in ["a", "b"] {
        let out = d.join(format!("plot_{attempt}"));
        clusterinno(&["plot", "--input", input.to_str().unwrap(), "--kind", "fitness_vs_dE", "--out", out.to_str().unwrap()]);
        plots.push(tree(&out));
    }
    let plot_same = plots[0] == plots[1] && !plots[0].is_empty();
    let total = configs.len() + 1;
    let same = identical + usize::from(plot_same);
    (same == total, format!("{same}/{total} subcommands byte-identical"))
}

fn landscape_oracle() -> Outcome {
    let landscape = Landscape::new(10, cluster_innovation::DEFAULT_LANDSCAPE_SEED).unwrap();
    let bound = 10.0 * landscape.weights().iter().sum::<f64>();
    let at_zero = landscape.fitness(&[0.0; 10]);
    let zero_ok = (at_zero - bound).abs() <= 1e-12 * bound;
    let mut rng = rng_from_seed(2);
    let (mut below, mut max_rel) = (0, 0.0f64);
    for _ in 0..1000 {
        let g: Vec<f64> = (0..10).map(|_| rng.random_range(-10.0..=10.0)).collect();
        let y = landscape.fitness(&g);
        if y < bound {
            below += 1;
        }
        let double = landscape.evaluate_double_sum(&g).unwrap();
        max_rel = max_rel.max((y - double).abs() / y.abs().max(double.abs()).max(f64::MIN_POSITIVE));
    }
    let ok = zero_ok && below == 1000 && max_rel <= 1e-9;
    (
        ok,
        format!("y(0) = bound: {zero_ok}, {below}/1000 strictly below, max relative gap {max_rel:.1e}"),
    )
}

fn degenerate_dynamics() -> Outcome {
    let mut constant = 0;
    for seed in 0..20 {
        let p = ModelParams {
            crossover_prob: 0.0,
            mutation_prob: 0.0,
            interaction_prob: 0.0,
            seed,
            ..ModelParams::default()
        };
        let r = run::<f64>(&p).unwrap();
        let flat = Indicator::ALL.iter().all(|&ind| {
            let s = r.column(ind);
            s[1..].iter().all(|&v| v == s[1])
        });
        constant += usize::from(flat);
    }
    (constant == 20, format!("{constant}/20 seeds with constant series"))
}

fn spatial_interaction() -> Outcome {
    let (p_e, d_e) = (0.01, 30.0);
    let params = ModelParams {
        interaction_prob: p_e,
        distance_decay: d_e,
        genome_size: 4,
        ..ModelParams::default()
    };
    let firm = |index: usize, size: usize, x: f64| Firm {
        index,
        location: (x, 50.0),
        employees: (0..size).map(|i| Genome(vec![(index * 100 + i) as f64; 4])).collect(),
        product: Genome(vec![0.0; 4]),
        product_fitness: 0.0,
    };
    let mut state = ModelState::from_firms(vec![firm(0, 10, 20.0), firm(1, 20, 20.0 + d_e)], 31);
    let ticks = 10_000;
    let (mut a, mut b) = (Vec::with_capacity(ticks), Vec::with_capacity(ticks));
    for _ in 0..ticks {
        let tally = state.inter_firm_exchange(&params);
        a.push(tally.between(0, 1) as f64);
        b.push(tally.between(1, 0) as f64);
    }
    let expected = 200.0 * p_e * (-1.0f64).exp();
    let mut ok = true;
    let mut notes = Vec::new();
    for counts in [&a, &b] {
        let m = mean(counts).unwrap();
        let sd = cluster_innovation::stats::sample_std(counts).unwrap();
        let z = (m - expected) / (sd / (ticks as f64).sqrt());
        ok &= z.abs() < 3.0;
        notes.push(format!("{m:.4} (z = {z:+.2})"));
    }
    (ok, format!("expected {expected:.4}, observed {}", notes.join(" and ")))
}

fn sobol_oracle() -> Outcome {
    let (a, b) = (7.0, 0.1);
    let v1 = 0.5 * (1.0f64 + b * PI.powi(4) / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = b * b * PI.powi(8) * (1.0 / 18.0 - 1.0 / 50.0);
    let v = v1 + v2 + v13;
    let analytic = [v1 / v, v2 / v, 0.0];
    let space = ParamSpace::new((1..=3).map(|i| Dimension::linear(&format!("x{i}"), -PI, PI)).collect()).unwrap();
    let n = 4096;
    let design = saltelli_design(&space, n, 11, BaseSampler::Sobol).unwrap();
    let y: Vec<f64> = design
        .rows
        .iter()
        .map(|x| x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin())
        .collect();
    let outputs = SaltelliOutputs::from_design_order(&y, n).unwrap();
    let boot = bootstrap_significance(&outputs, 500, 0.95, 3).unwrap();
    let mut ok = true;
    let mut found = Vec::new();
    for (e, s) in boot.indices.iter().zip(analytic) {
        ok &= (e.first_order - s).abs() <= 0.05;
        ok &= e.total_order >= e.first_order - 3.0 * e.first_half_width();
        found.push(format!("{:.4}", e.first_order));
    }
    (ok, format!("S = [{}] vs [0.3139, 0.4424, 0]", found.join(", ")))
}

fn gsa_ordering() -> Outcome {
    let ExperimentSpec::Gsa(mut config) = ExperimentSpec::preset(ExperimentKind::Gsa, PresetScale::Desk) else {
        unreachable!()
    };
    config.workers = workers();
    let r = gsa_experiment(&config).unwrap();
    let mut indices: Vec<(String, f64)> = r
        .indices
        .for_indicator(Indicator::BestFitness.name())
        .map(|row| (row.parameter.clone(), row.estimate.first_order))
        .collect();
    indices.sort_by(|x, y| y.1.total_cmp(&x.1));
    let ok = indices[0].0 == "p_M" && indices[0].1 > indices[1].1;
    let top: Vec<String> = indices.iter().take(3).map(|(n, s)| format!("{n} {s:.3}")).collect();
    (ok, format!("first-order indices of b, largest first: {}", top.join(", ")))
}

/// Two-sided p-value of a Spearman correlation over `n` points under the
/// t approximation.
fn spearman_p_value(rho: f64, n: usize) -> f64 {
    let df = n as f64 - 2.0;
    if rho.abs() >= 1.0 {
        return 0.0;
    }
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    2.0 * StudentsT::new(0.0, 1.0, df).unwrap().sf(t.abs())
}

fn distance_decay_direction() -> Outcome {
    let ExperimentSpec::Grid(mut config) = ExperimentSpec::preset(ExperimentKind::Grid, PresetScale::Desk) else {
        unreachable!()
    };
    config.workers = workers();
    let r = grid_experiment(&config).unwrap();
    let d_e: Vec<f64> = (0..11).map(|i| 1.0 + 10.0 * i as f64).collect();
    let series = |p_e: f64, ind: Indicator| -> Vec<f64> {
        d_e.iter()
            .map(|&d| r.points[r.find_point(&[p_e, d]).expect("grid point")].stats.get(ind).mean)
            .collect()
    };
    let rho_f = spearman(&d_e, &series(1e-4, Indicator::AvgFitness)).unwrap_or(f64::NAN);
    let rho_d = spearman(&d_e, &series(1e-4, Indicator::Diversity)).unwrap_or(f64::NAN);
    let rho_low = spearman(&d_e, &series(1e-7, Indicator::AvgFitness)).unwrap_or(0.0);
    let p_low = spearman_p_value(rho_low, d_e.len());
    let ok = rho_f > 0.8 && rho_d < -0.8 && p_low > 0.05;
    (
        ok,
        format!("p_E=1e-4: rho(f) = {rho_f:.3}, rho(d) = {rho_d:.3}; p_E=1e-7: rho(f) = {rho_low:.3}, p = {p_low:.3}"),
    )
}

struct Schaffer;

impl Problem for Schaffer {
    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64], _seed: u64) -> Result<Vec<f64>, String> {
        Ok(vec![x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)])
    }
}

fn schaffer_benchmark() -> Outcome {
    let optimum = 52.0 / 3.0 + 5.0;
    let space = ParamSpace::new(vec![Dimension::linear("x", -10.0, 10.0)]).unwrap();
    let config = Nsga2Config {
        population: 50,
        generations: 5000,
        seed: 1,
        ..Nsga2Config::default()
    };
    let archive = optimize(&Schaffer, &space, &config).unwrap();
    let points: Vec<&[f64]> = archive.entries.iter().map(|e| e.objectives.as_slice()).collect();
    let hv = hypervolume_2d(&points, [5.0, 5.0]);
    let gap = (optimum - hv) / optimum;
    (gap.abs() <= 0.02, format!("hypervolume {hv:.4} vs {optimum:.4} ({:.2}% short)", 100.0 * gap))
}

fn trade_off() -> Outcome {
    let ExperimentSpec::Optimize(mut config) = ExperimentSpec::preset(ExperimentKind::Optimize, PresetScale::Desk) else {
        unreachable!()
    };
    config.nsga.workers = workers();
    let r = optimize_experiment(&config).unwrap();
    let front = r.archive.non_dominated();
    let f: Vec<f64> = front.iter().map(|e| -e.objectives[0]).collect();
    let d: Vec<f64> = front.iter().map(|e| -e.objectives[1]).collect();
    let rho = spearman(&f, &d).unwrap_or(f64::NAN);
    let ok = front.len() >= 5 && rho < 0.0;
    (ok, format!("{} non-dominated points, rank correlation {rho:.3}", front.len()))
}

fn convergence_protocol() -> Outcome {
    let ExperimentSpec::Convergence(mut config) = ExperimentSpec::preset(ExperimentKind::Convergence, PresetScale::Desk)
    else {
        unreachable!()
    };
    config.workers = workers();
    let r = convergence_experiment(&config).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for ind in Indicator::ALL {
        let q = r.quartile(ind, "sharpe").expect("quartile row");
        ok &= q.count > 0;
        let q1 = q.quartiles.map_or(f64::NAN, |v| v[0]);
        if matches!(ind, Indicator::BestFitness | Indicator::AvgFitness | Indicator::Diversity) {
            ok &= q1 > 2.0;
        }
        notes.push(format!("{} {q1:.2} ({})", ind.name(), q.count));
    }
    (ok, format!("Sharpe first quartile (points): {}", notes.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("determinism of output trees", determinism),
        ("landscape oracle", landscape_oracle),
        ("degenerate dynamics", degenerate_dynamics),
        ("spatial-interaction calibration", spatial_interaction),
        ("Sobol oracle (Ishigami)", sobol_oracle),
        ("GSA ordering at desk scale", gsa_ordering),
        ("distance-decay direction", distance_decay_direction),
        ("NSGA2 Schaffer benchmark", schaffer_benchmark),
        ("fitness/diversity trade-off at desk scale", trade_off),
        ("convergence protocol at desk scale", convergence_protocol),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !selected.is_empty() && !selected.contains(&number) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (ok, detail) = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(outcome) => outcome,
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {number:>2}: {name}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if failed == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
