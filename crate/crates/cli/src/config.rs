//! JSON experiment configuration.
//!
//! A configuration file is a single JSON object. Model parameters sit at the
//! top level under their usual symbols (`N_f`, `p_C`, `d_E`, ...) and set
//! the values shared by every run; each experiment kind adds its own keys.
//! Keys not listed for the kind are rejected, and every error names the key
//! it concerns. Missing keys keep the preset value.
//!
//! | kind        | extra keys |
//! |-------------|------------|
//! | all         | `experiment`, `seed`, `workers` |
//! | convergence | `n_points`, `replications`, `space` |
//! | gsa         | `n_base`, `n_boot`, `confidence`, `sampler`, `space` |
//! | grid        | `axes`, `replications` |
//! | optimize    | `population`, `generations`, `resample_prob`, `max_samples`, `crossover_prob`, `crossover_eta`, `mutation_eta`, `mutation_rate`, `fitness_threshold`, `diversity_threshold`, `min_samples`, `space` |
//!
//! `seed` is the experiment seed; it is also the run seed of `run` and of
//! every run of a `gsa` design without a `seed` dimension. `space` is a list
//! of `{"name", "lower", "upper", "scale"}` objects and `axes` a list of
//! `{"name", "values", "scale"}` objects, `scale` being `linear` (default)
//! or `log10`.

use std::path::Path;

use cluster_innovation::harness::{ExperimentKind, ExperimentSpec, PresetScale};
use cluster_innovation::model::KeyKind;
use cluster_innovation::sampling::{BaseSampler, Dimension, GridAxis, ParamSpace};
use cluster_innovation::{InteractionSampling, ModelParams};
use serde_json::{json, Map, Value};

use crate::error::CliError;

fn key_error(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {reason}"))
}

/// Keys accepted on top of the model parameters for `kind`.
pub fn kind_keys(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::Run => &[],
        ExperimentKind::Convergence => &["n_points", "replications", "space"],
        ExperimentKind::Gsa => &["n_base", "n_boot", "confidence", "sampler", "space"],
        ExperimentKind::Grid => &["axes", "replications"],
        ExperimentKind::Optimize => &[
            "population",
            "generations",
            "resample_prob",
            "max_samples",
            "crossover_prob",
            "crossover_eta",
            "mutation_eta",
            "mutation_rate",
            "fitness_threshold",
            "diversity_threshold",
            "min_samples",
            "space",
        ],
    }
}

fn as_count(key: &str, v: &Value) -> Result<usize, CliError> {
    if let Some(n) = v.as_u64() {
        return usize::try_from(n).map_err(|_| key_error(key, "too large"));
    }
    match v.as_f64() {
        Some(f) if f >= 0.0 && f.fract() == 0.0 && f <= u32::MAX as f64 => Ok(f as usize),
        _ => Err(key_error(key, format!("expected a non-negative integer, found {v}"))),
    }
}

fn as_seed(key: &str, v: &Value) -> Result<u64, CliError> {
    v.as_u64()
        .ok_or_else(|| key_error(key, format!("expected an unsigned 64-bit integer, found {v}")))
}

fn as_real(key: &str, v: &Value) -> Result<f64, CliError> {
    v.as_f64().ok_or_else(|| key_error(key, format!("expected a number, found {v}")))
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| key_error(key, format!("expected a string, found {v}")))
}

fn set_model_key(params: &mut ModelParams, key: &str, kind: KeyKind, v: &Value) -> Result<(), CliError> {
    match kind {
        KeyKind::Count => params
            .set_value(key, as_count(key, v)? as f64)
            .map_err(|e| key_error(key, e)),
        KeyKind::Real => params.set_value(key, as_real(key, v)?).map_err(|e| key_error(key, e)),
        KeyKind::Seed => {
            // `seed` is handled with the experiment seed.
            params.landscape_seed = as_seed(key, v)?;
            Ok(())
        }
        KeyKind::Choice => {
            let name = as_str(key, v)?;
            params.interaction_sampling = InteractionSampling::parse(name)
                .ok_or_else(|| key_error(key, format!("unknown value `{name}` (per_pair, per_pair_naive, binomial)")))?;
            Ok(())
        }
    }
}

fn parse_space(v: &Value) -> Result<ParamSpace, CliError> {
    let dims: Vec<Dimension> = serde_json::from_value(v.clone()).map_err(|e| key_error("space", e))?;
    ParamSpace::new(dims).map_err(|e| key_error("space", e))
}

fn parse_axes(v: &Value) -> Result<Vec<GridAxis>, CliError> {
    let axes: Vec<GridAxis> = serde_json::from_value(v.clone()).map_err(|e| key_error("axes", e))?;
    if axes.is_empty() {
        return Err(key_error("axes", "needs at least one axis"));
    }
    Ok(axes)
}

/// Resolves a configuration object for `kind` on top of the preset of
/// `kind` at `scale`, then validates the result.
pub fn resolve(kind: ExperimentKind, scale: PresetScale, value: &Value) -> Result<ExperimentSpec, CliError> {
    let map = value
        .as_object()
        .ok_or_else(|| CliError::Config("configuration must be a JSON object".into()))?;
    let mut spec = ExperimentSpec::preset(kind, scale);
    for (key, v) in map {
        let key = key.as_str();
        if key == "experiment" {
            let named = as_str(key, v)?;
            if named != kind.name() {
                return Err(key_error(key, format!("`{named}` does not match subcommand `{}`", kind.name())));
            }
        } else if key == "seed" {
            let seed = as_seed(key, v)?;
            spec.set_seed(seed);
            spec.base_mut().seed = seed;
        } else if key == "workers" {
            if kind == ExperimentKind::Run {
                return Err(key_error(key, "not used by `run`"));
            }
            spec.set_workers(as_count(key, v)?);
        } else if let Some(key_kind) = ModelParams::key_kind(key) {
            set_model_key(spec.base_mut(), key, key_kind, v)?;
        } else if kind_keys(kind).contains(&key) {
            set_kind_key(&mut spec, key, v)?;
        } else {
            return Err(key_error(key, format!("unknown key for `{}`", kind.name())));
        }
    }
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(spec)
}

fn set_kind_key(spec: &mut ExperimentSpec, key: &str, v: &Value) -> Result<(), CliError> {
    match spec {
        ExperimentSpec::Run(_) => unreachable!("run has no extra keys"),
        ExperimentSpec::Convergence(c) => match key {
            "n_points" => c.n_points = as_count(key, v)?,
            "replications" => c.n_reps = as_count(key, v)?,
            _ => c.space = parse_space(v)?,
        },
        ExperimentSpec::Gsa(c) => match key {
            "n_base" => c.n_base = as_count(key, v)?,
            "n_boot" => c.n_boot = as_count(key, v)?,
            "confidence" => c.confidence = as_real(key, v)?,
            "sampler" => {
                c.sampler = match as_str(key, v)? {
                    "sobol" => BaseSampler::Sobol,
                    "uniform" => BaseSampler::Uniform,
                    other => return Err(key_error(key, format!("unknown value `{other}` (sobol, uniform)"))),
                }
            }
            _ => c.space = parse_space(v)?,
        },
        ExperimentSpec::Grid(c) => match key {
            "replications" => c.n_reps = as_count(key, v)?,
            _ => c.axes = parse_axes(v)?,
        },
        ExperimentSpec::Optimize(c) => match key {
            "population" => c.nsga.population = as_count(key, v)?,
            "generations" => c.nsga.generations = as_count(key, v)?,
            "resample_prob" => c.nsga.resample_prob = as_real(key, v)?,
            "max_samples" => c.nsga.max_samples = as_count(key, v)?,
            "crossover_prob" => c.nsga.crossover_prob = as_real(key, v)?,
            "crossover_eta" => c.nsga.crossover_eta = as_real(key, v)?,
            "mutation_eta" => c.nsga.mutation_eta = as_real(key, v)?,
            "mutation_rate" => {
                c.nsga.mutation_rate = if v.is_null() { None } else { Some(as_real(key, v)?) }
            }
            "fitness_threshold" => c.thresholds.fitness = as_real(key, v)?,
            "diversity_threshold" => c.thresholds.diversity = as_real(key, v)?,
            "min_samples" => c.thresholds.min_samples = as_count(key, v)?,
            _ => c.space = parse_space(v)?,
        },
    }
    Ok(())
}

/// Reads and resolves a configuration file.
pub fn load(path: &Path, kind: ExperimentKind, scale: PresetScale) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{} is not valid JSON: {e}", path.display())))?;
    resolve(kind, scale, &value)
}

/// Every setting of a resolved experiment, in the file format accepted by
/// [`resolve`].
pub fn to_json(spec: &ExperimentSpec) -> Value {
    let base = spec.base();
    let mut map = Map::new();
    map.insert("experiment".into(), json!(spec.kind().name()));
    for (key, kind) in ModelParams::KEYS {
        let v = match kind {
            KeyKind::Count | KeyKind::Real => {
                let x = base.value(key).expect("numeric key");
                if kind == KeyKind::Count {
                    json!(x as u64)
                } else {
                    json!(x)
                }
            }
            KeyKind::Seed if key == "seed" => json!(spec.seed()),
            KeyKind::Seed => json!(base.landscape_seed),
            KeyKind::Choice => json!(base.interaction_sampling.name()),
        };
        map.insert(key.into(), v);
    }
    match spec {
        ExperimentSpec::Run(_) => {}
        ExperimentSpec::Convergence(c) => {
            map.insert("workers".into(), json!(c.workers));
            map.insert("n_points".into(), json!(c.n_points));
            map.insert("replications".into(), json!(c.n_reps));
            map.insert("space".into(), json!(c.space));
        }
        ExperimentSpec::Gsa(c) => {
            map.insert("workers".into(), json!(c.workers));
            map.insert("n_base".into(), json!(c.n_base));
            map.insert("n_boot".into(), json!(c.n_boot));
            map.insert("confidence".into(), json!(c.confidence));
            map.insert("sampler".into(), json!(c.sampler));
            map.insert("space".into(), json!(c.space));
        }
        ExperimentSpec::Grid(c) => {
            map.insert("workers".into(), json!(c.workers));
            map.insert("replications".into(), json!(c.n_reps));
            map.insert("axes".into(), json!(c.axes));
        }
        ExperimentSpec::Optimize(c) => {
            let n = &c.nsga;
            map.insert("workers".into(), json!(n.workers));
            map.insert("population".into(), json!(n.population));
            map.insert("generations".into(), json!(n.generations));
            map.insert("resample_prob".into(), json!(n.resample_prob));
            map.insert("max_samples".into(), json!(n.max_samples));
            map.insert("crossover_prob".into(), json!(n.crossover_prob));
            map.insert("crossover_eta".into(), json!(n.crossover_eta));
            map.insert("mutation_eta".into(), json!(n.mutation_eta));
            map.insert("mutation_rate".into(), json!(n.mutation_rate));
            map.insert("fitness_threshold".into(), json!(c.thresholds.fitness));
            map.insert("diversity_threshold".into(), json!(c.thresholds.diversity));
            map.insert("min_samples".into(), json!(c.thresholds.min_samples));
            map.insert("space".into(), json!(c.space));
        }
    }
    Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_spec(v: Value) -> Result<ExperimentSpec, CliError> {
        resolve(ExperimentKind::Run, PresetScale::Desk, &v)
    }

    fn message(r: Result<ExperimentSpec, CliError>) -> String {
        match r {
            Err(CliError::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_object_gives_defaults() {
        let ExperimentSpec::Run(p) = run_spec(json!({})).unwrap() else { panic!() };
        assert_eq!(p, ModelParams::default());
        assert_eq!((p.n_firms, p.largest_firm_size, p.genome_size, p.t_final), (10, 100, 10, 100));
    }

    #[test]
    fn range_errors_name_the_key() {
        assert!(message(run_spec(json!({"p_C": 1.5}))).contains("p_C"));
        let m = message(run_spec(json!({"d_E": 0})));
        assert!(m.contains("d_E") && m.contains("> 0"), "{m}");
        assert!(message(run_spec(json!({"N_f": 2.5}))).contains("N_f"));
        assert!(message(run_spec(json!({"seed": -1}))).contains("seed"));
        assert!(message(run_spec(json!({"interaction_sampling": "x"}))).contains("interaction_sampling"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(message(run_spec(json!({"p_X": 1}))).contains("p_X"));
        assert!(message(run_spec(json!({"n_base": 64}))).contains("n_base"));
        assert!(message(run_spec(json!({"workers": 2}))).contains("workers"));
        let m = message(resolve(ExperimentKind::Grid, PresetScale::Desk, &json!({"n_base": 64})));
        assert!(m.contains("n_base"));
        assert!(message(run_spec(json!({"experiment": "grid"}))).contains("experiment"));
        assert!(message(run_spec(json!([1, 2]))).contains("object"));
    }

    #[test]
    fn kind_keys_are_applied() {
        let spec = resolve(
            ExperimentKind::Grid,
            PresetScale::Desk,
            &json!({"axes": [{"name": "p_E", "values": [-6], "scale": "log10"}], "replications": 3, "seed": 9, "t_f": 20}),
        )
        .unwrap();
        let ExperimentSpec::Grid(g) = &spec else { panic!() };
        assert_eq!(g.n_reps, 3);
        assert_eq!(g.axes, vec![GridAxis::log10("p_E", &[-6.0])]);
        assert_eq!((g.seed, g.base.seed, g.base.t_final), (9, 9, 20));

        let spec = resolve(ExperimentKind::Optimize, PresetScale::Desk, &json!({"mutation_rate": 0.2, "population": 8})).unwrap();
        let ExperimentSpec::Optimize(o) = &spec else { panic!() };
        assert_eq!((o.nsga.mutation_rate, o.nsga.population), (Some(0.2), 8));
    }

    #[test]
    fn nested_errors_name_the_key() {
        let bad_space = json!({"space": [{"name": "p_C", "lower": 0.0, "upper": 3.0}]});
        assert!(message(resolve(ExperimentKind::Gsa, PresetScale::Desk, &bad_space)).contains("p_C"));
        let typo = json!({"space": [{"name": "p_C", "lower": 0.0, "uper": 1.0}]});
        assert!(message(resolve(ExperimentKind::Gsa, PresetScale::Desk, &typo)).contains("space"));
        let small = json!({"n_base": 8});
        assert!(message(resolve(ExperimentKind::Gsa, PresetScale::Desk, &small)).contains("n_base"));
        let axis = json!({"axes": [{"name": "d_E", "values": [0.0]}]});
        assert!(message(resolve(ExperimentKind::Grid, PresetScale::Desk, &axis)).contains("d_E"));
    }

    #[test]
    fn resolved_config_round_trips() {
        for kind in ExperimentKind::ALL {
            for scale in [PresetScale::Desk, PresetScale::Paper] {
                let mut spec = ExperimentSpec::preset(kind, scale);
                spec.set_seed(12_345_678_901_234_567_890);
                spec.base_mut().seed = 12_345_678_901_234_567_890;
                spec.base_mut().distance_decay = 1.0 / 3.0;
                let text = serde_json::to_string_pretty(&to_json(&spec)).unwrap();
                let back = resolve(kind, PresetScale::Desk, &serde_json::from_str(&text).unwrap()).unwrap();
                assert_eq!(back, spec, "{kind:?} {scale:?}");
            }
        }
    }
}
