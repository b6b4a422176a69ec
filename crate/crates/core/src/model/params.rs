use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::landscape::DEFAULT_LANDSCAPE_SEED;

/// How the inter-firm interaction step draws which employee pairs interact.
///
/// All variants give every ordered pair an independent Bernoulli trial with
/// the distance-decayed probability; they differ only in how those trials
/// are sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionSampling {
    /// Walks the ordered pairs of each firm pair with geometric gaps
    /// between successes.
    #[default]
    PerPair,
    /// One uniform draw per ordered employee pair.
    PerPairNaive,
    /// A binomial count per ordered firm pair, then that many distinct
    /// employee pairs chosen uniformly.
    Binomial,
}

impl InteractionSampling {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "per_pair" => Some(Self::PerPair),
            "per_pair_naive" => Some(Self::PerPairNaive),
            "binomial" => Some(Self::Binomial),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PerPair => "per_pair",
            Self::PerPairNaive => "per_pair_naive",
            Self::Binomial => "binomial",
        }
    }
}

/// Full parameterisation of one simulation run.
///
/// Configuration keys follow the model's usual symbols (`p_C`, `d_E`, ...);
/// see [`ModelParams::KEYS`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(rename = "N_f")]
    pub n_firms: usize,
    #[serde(rename = "S_0")]
    pub largest_firm_size: usize,
    #[serde(rename = "alpha_S")]
    pub size_hierarchy: f64,
    #[serde(rename = "G")]
    pub genome_size: usize,
    #[serde(rename = "t_f")]
    pub t_final: u32,
    #[serde(rename = "p_C")]
    pub crossover_prob: f64,
    #[serde(rename = "s_C")]
    pub crossover_share: f64,
    #[serde(rename = "p_M")]
    pub mutation_prob: f64,
    #[serde(rename = "x_M")]
    pub mutation_amplitude: f64,
    #[serde(rename = "s_P")]
    pub product_share: f64,
    #[serde(rename = "p_E")]
    pub interaction_prob: f64,
    #[serde(rename = "d_E")]
    pub distance_decay: f64,
    pub seed: u64,
    pub landscape_seed: u64,
    pub interaction_sampling: InteractionSampling,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n_firms: 10,
            largest_firm_size: 100,
            size_hierarchy: 0.1,
            genome_size: 10,
            t_final: 100,
            crossover_prob: 0.5,
            crossover_share: 0.5,
            mutation_prob: 0.01,
            mutation_amplitude: 1.0,
            product_share: 0.5,
            interaction_prob: 1e-5,
            distance_decay: 50.0,
            seed: 0,
            landscape_seed: DEFAULT_LANDSCAPE_SEED,
            interaction_sampling: InteractionSampling::PerPair,
        }
    }
}

/// Value kind of a configuration key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyKind {
    Count,
    Real,
    Seed,
    Choice,
}

impl ModelParams {
    /// Configuration keys with their value kinds, in serialization order.
    pub const KEYS: [(&'static str, KeyKind); 15] = [
        ("N_f", KeyKind::Count),
        ("S_0", KeyKind::Count),
        ("alpha_S", KeyKind::Real),
        ("G", KeyKind::Count),
        ("t_f", KeyKind::Count),
        ("p_C", KeyKind::Real),
        ("s_C", KeyKind::Real),
        ("p_M", KeyKind::Real),
        ("x_M", KeyKind::Real),
        ("s_P", KeyKind::Real),
        ("p_E", KeyKind::Real),
        ("d_E", KeyKind::Real),
        ("seed", KeyKind::Seed),
        ("landscape_seed", KeyKind::Seed),
        ("interaction_sampling", KeyKind::Choice),
    ];

    pub fn key_kind(key: &str) -> Option<KeyKind> {
        Self::KEYS.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
    }

    /// Checks every range constraint, naming the first offending key.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("N_f", self.n_firms),
            ("S_0", self.largest_firm_size),
            ("G", self.genome_size),
        ] {
            if value == 0 {
                return Err(Error::param(name, "must be at least 1"));
            }
        }
        if !(self.size_hierarchy.is_finite() && self.size_hierarchy >= 0.0) {
            return Err(Error::param("alpha_S", "must be a finite value >= 0"));
        }
        for (name, value) in [
            ("p_C", self.crossover_prob),
            ("s_C", self.crossover_share),
            ("p_M", self.mutation_prob),
            ("s_P", self.product_share),
            ("p_E", self.interaction_prob),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::param(name, format!("{value} is outside [0, 1]")));
            }
        }
        if !(self.mutation_amplitude.is_finite() && self.mutation_amplitude >= 0.0) {
            return Err(Error::param("x_M", "must be a finite value >= 0"));
        }
        if !(self.distance_decay.is_finite() && self.distance_decay > 0.0) {
            return Err(Error::param("d_E", format!("{} must be > 0", self.distance_decay)));
        }
        Ok(())
    }

    /// Sets a real-valued or count parameter by configuration key. Count
    /// keys accept only non-negative integral values. Seeds and choices are
    /// not settable here.
    pub fn set_value(&mut self, key: &str, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::param(key, format!("{v} is not a non-negative integer")))
            }
        };
        match key {
            "N_f" => self.n_firms = count(value)?,
            "S_0" => self.largest_firm_size = count(value)?,
            "G" => self.genome_size = count(value)?,
            "t_f" => self.t_final = count(value)? as u32,
            "alpha_S" => self.size_hierarchy = value,
            "p_C" => self.crossover_prob = value,
            "s_C" => self.crossover_share = value,
            "p_M" => self.mutation_prob = value,
            "x_M" => self.mutation_amplitude = value,
            "s_P" => self.product_share = value,
            "p_E" => self.interaction_prob = value,
            "d_E" => self.distance_decay = value,
            _ => return Err(Error::param(key, "not a numeric model parameter")),
        }
        Ok(())
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        Some(match key {
            "N_f" => self.n_firms as f64,
            "S_0" => self.largest_firm_size as f64,
            "G" => self.genome_size as f64,
            "t_f" => self.t_final as f64,
            "alpha_S" => self.size_hierarchy,
            "p_C" => self.crossover_prob,
            "s_C" => self.crossover_share,
            "p_M" => self.mutation_prob,
            "x_M" => self.mutation_amplitude,
            "s_P" => self.product_share,
            "p_E" => self.interaction_prob,
            "d_E" => self.distance_decay,
            _ => return None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Firm sizes `round(S_0 * k^-alpha)` for ranks `k = 1..=n_firms`, rounded
/// half to even and clamped below at 1.
pub fn rank_size_sizes(largest_firm_size: usize, size_hierarchy: f64, n_firms: usize) -> Vec<usize> {
    (1..=n_firms)
        .map(|k| {
            let s = largest_firm_size as f64 * (k as f64).powf(-size_hierarchy);
            (s.round_ties_even() as usize).max(1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = ModelParams::default();
        p.validate().unwrap();
        assert_eq!((p.n_firms, p.largest_firm_size, p.genome_size, p.t_final), (10, 100, 10, 100));
    }

    #[test]
    fn range_errors_name_the_key() {
        let p = ModelParams { crossover_prob: 1.5, ..ModelParams::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name, .. }) if name == "p_C"));
        let p = ModelParams { distance_decay: 0.0, ..ModelParams::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name, .. }) if name == "d_E"));
        let p = ModelParams { n_firms: 0, ..ModelParams::default() };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter { name, .. }) if name == "N_f"));
    }

    #[test]
    fn rank_size_examples() {
        assert_eq!(rank_size_sizes(100, 0.0, 10), vec![100; 10]);
        assert_eq!(rank_size_sizes(100, 1.0, 4), vec![100, 50, 33, 25]);
        assert_eq!(rank_size_sizes(1, 2.0, 3), vec![1, 1, 1]);
        // sum of round(100 k^-0.1), k = 1..10, computed independently
        assert_eq!(rank_size_sizes(100, 0.1, 10).iter().sum::<usize>(), 861);
    }

    #[test]
    fn rank_size_ties_round_to_even() {
        // 5 * 2^-1 = 2.5 -> 2, 5 * 3^-... stays monotone
        assert_eq!(rank_size_sizes(5, 1.0, 2), vec![5, 2]);
        assert_eq!(rank_size_sizes(7, 1.0, 2), vec![7, 4]);
    }

    #[test]
    fn set_and_read_by_key() {
        let mut p = ModelParams::default();
        for (key, kind) in ModelParams::KEYS {
            if kind == KeyKind::Real {
                p.set_value(key, 0.25).unwrap();
                assert_eq!(p.value(key), Some(0.25));
            }
        }
        p.set_value("N_f", 3.0).unwrap();
        assert_eq!(p.n_firms, 3);
        assert!(p.set_value("N_f", 2.5).is_err());
        assert!(p.set_value("seed", 1.0).is_err());
    }

    #[test]
    fn serialized_keys_match_key_table() {
        let v = serde_json::to_value(ModelParams::default()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = ModelParams::KEYS.iter().map(|(k, _)| *k).collect();
        let mut got = keys.clone();
        expected.sort_unstable();
        got.sort_unstable();
        assert_eq!(got, expected);
    }
}
