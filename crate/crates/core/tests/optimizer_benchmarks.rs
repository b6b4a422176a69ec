//! Optimizer behaviour on problems with known Pareto fronts.

use cluster_innovation::nsga2::{hypervolume_2d, optimize, optimize_with_observer, Nsga2Config, Problem};
use cluster_innovation::sampling::{Dimension, ParamSpace};

struct Schaffer;

impl Problem for Schaffer {
    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64], _seed: u64) -> Result<Vec<f64>, String> {
        Ok(vec![x[0] * x[0], (x[0] - 2.0) * (x[0] - 2.0)])
    }
}

/// Area between the front `f2 = (sqrt(f1) - 2)^2`, `f1` in [0, 4], and the
/// reference point (5, 5): the integral of `1 - f1 + 4 sqrt(f1)` over
/// [0, 4] plus the 1 x 5 strip beyond `f1 = 4`.
const SCHAFFER_HV: f64 = 52.0 / 3.0 + 5.0;

fn space() -> ParamSpace {
    ParamSpace::new(vec![Dimension::linear("x", -10.0, 10.0)]).unwrap()
}

#[test]
fn analytic_hypervolume() {
    let front: Vec<[f64; 2]> = (0..=20_000)
        .map(|i| {
            let x = 2.0 * i as f64 / 20_000.0;
            [x * x, (x - 2.0) * (x - 2.0)]
        })
        .collect();
    let hv = hypervolume_2d(&front, [5.0, 5.0]);
    assert!((hv - SCHAFFER_HV).abs() < 1e-3, "{hv}");
}

#[test]
fn schaffer_front_is_dense_and_near_optimal() {
    let config = Nsga2Config {
        population: 30,
        generations: 2000,
        seed: 11,
        ..Nsga2Config::default()
    };
    let archive = optimize(&Schaffer, &space(), &config).unwrap();
    let points: Vec<&[f64]> = archive.entries.iter().map(|e| e.objectives.as_slice()).collect();
    let hv = hypervolume_2d(&points, [5.0, 5.0]);
    assert!(hv > 0.97 * SCHAFFER_HV, "hypervolume {hv}");
    let mut xs: Vec<f64> = archive.entries.iter().map(|e| e.params[0]).collect();
    xs.sort_by(f64::total_cmp);
    assert!(xs[0] < 0.1 && xs[xs.len() - 1] > 1.9, "{xs:?}");
    assert!(xs.windows(2).all(|w| w[1] - w[0] < 0.3), "gaps in {xs:?}");
}

#[test]
fn best_hypervolume_is_monotone_over_iterations() {
    let config = Nsga2Config {
        population: 20,
        generations: 600,
        seed: 2,
        ..Nsga2Config::default()
    };
    let mut best = Vec::new();
    optimize_with_observer(&Schaffer, &space(), &config, |_, population| {
        let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
        let hv = hypervolume_2d(&points, [5.0, 5.0]);
        let previous = best.last().copied().unwrap_or(f64::NEG_INFINITY);
        best.push(hv.max(previous));
    })
    .unwrap();
    assert!(best.windows(2).all(|w| w[1] >= w[0]));
}

/// Both objectives share one optimum, so the front collapses to a point.
struct Aligned;

impl Problem for Aligned {
    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64], _seed: u64) -> Result<Vec<f64>, String> {
        let r: f64 = x.iter().map(|v| (v - 0.25) * (v - 0.25)).sum();
        Ok(vec![r, 2.0 * r])
    }
}

#[test]
fn shared_optimum_is_found() {
    let space = ParamSpace::new((0..3).map(|i| Dimension::linear(&format!("x{i}"), -1.0, 1.0)).collect()).unwrap();
    let config = Nsga2Config {
        population: 16,
        generations: 3000,
        seed: 4,
        ..Nsga2Config::default()
    };
    let archive = optimize(&Aligned, &space, &config).unwrap();
    let best = archive.non_dominated();
    assert!(best.iter().all(|e| e.objectives[0] < 1e-3), "{:?}", best[0].objectives);
}

/// Noisy version of Schaffer: the optimizer has to average samples.
struct NoisySchaffer;

impl Problem for NoisySchaffer {
    fn n_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64], seed: u64) -> Result<Vec<f64>, String> {
        let noise = (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        Ok(vec![x[0] * x[0] + noise, (x[0] - 2.0) * (x[0] - 2.0) - noise])
    }

    fn is_stochastic(&self) -> bool {
        true
    }
}

#[test]
fn noisy_problem_accumulates_samples() {
    let config = Nsga2Config {
        population: 20,
        generations: 1500,
        seed: 9,
        max_samples: 30,
        ..Nsga2Config::default()
    };
    let archive = optimize(&NoisySchaffer, &space(), &config).unwrap();
    let samples: usize = archive.entries.iter().map(|e| e.n_samples).sum();
    assert!(samples > archive.entries.len());
    assert!(archive.entries.iter().all(|e| (1..=30).contains(&e.n_samples)));
    let well_sampled: Vec<f64> = archive
        .entries
        .iter()
        .filter(|e| e.n_samples >= 5)
        .map(|e| e.params[0])
        .collect();
    assert!(!well_sampled.is_empty());
    assert!(well_sampled.iter().all(|x| (-0.5..=2.5).contains(x)), "{well_sampled:?}");
}
