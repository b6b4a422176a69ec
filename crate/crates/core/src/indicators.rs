//! Macro indicators of the firm population at one tick.
//!
//! All functions are pure: they read product fitnesses and product genomes
//! and never touch a generator.

use serde::Serialize;

use crate::model::ModelState;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Indicator {
    BestFitness,
    AvgFitness,
    RelDiff,
    Entropy,
    Diversity,
}

impl Indicator {
    pub const ALL: [Indicator; 5] = [
        Indicator::BestFitness,
        Indicator::AvgFitness,
        Indicator::RelDiff,
        Indicator::Entropy,
        Indicator::Diversity,
    ];

    /// Column name used in every output table.
    pub fn name(self) -> &'static str {
        match self {
            Indicator::BestFitness => "best_fitness",
            Indicator::AvgFitness => "avg_fitness",
            Indicator::RelDiff => "rel_diff",
            Indicator::Entropy => "entropy",
            Indicator::Diversity => "diversity",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IndicatorVector<T> {
    pub best_fitness: T,
    pub avg_fitness: T,
    pub rel_diff: T,
    pub entropy: T,
    pub diversity: T,
}

impl<T: Scalar> IndicatorVector<T> {
    pub fn of_state(state: &ModelState<T>) -> Self {
        let fitnesses = state.product_fitnesses();
        let products: Vec<&[T]> = state.firms.iter().map(|f| &f.product[..]).collect();
        Self::from_products(&fitnesses, &products)
    }

    pub fn from_products(fitnesses: &[T], products: &[&[T]]) -> Self {
        IndicatorVector {
            best_fitness: best_fitness(fitnesses),
            avg_fitness: average_fitness(fitnesses),
            rel_diff: fitness_relative_difference(fitnesses),
            entropy: fitness_entropy(fitnesses),
            diversity: product_diversity(products),
        }
    }

    pub fn get(&self, indicator: Indicator) -> T {
        match indicator {
            Indicator::BestFitness => self.best_fitness,
            Indicator::AvgFitness => self.avg_fitness,
            Indicator::RelDiff => self.rel_diff,
            Indicator::Entropy => self.entropy,
            Indicator::Diversity => self.diversity,
        }
    }

    /// Values in [`Indicator::ALL`] order.
    pub fn to_array(&self) -> [T; 5] {
        Indicator::ALL.map(|i| self.get(i))
    }
}

fn min_max<T: Scalar>(values: &[T]) -> (T, T) {
    values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub fn best_fitness<T: Scalar>(fitnesses: &[T]) -> T {
    min_max(fitnesses).1
}

/// Arithmetic mean, kept inside `[min, max]` so that rounding never puts it
/// above the best fitness.
pub fn average_fitness<T: Scalar>(fitnesses: &[T]) -> T {
    let mean = fitnesses.iter().copied().sum::<T>() / T::of(fitnesses.len() as f64);
    let (lo, hi) = min_max(fitnesses);
    mean.max(lo).min(hi)
}

/// `(y_max - y_min) / max(|y_max|, |y_min|)`, 0 when every fitness is 0.
pub fn fitness_relative_difference<T: Scalar>(fitnesses: &[T]) -> T {
    let (lo, hi) = min_max(fitnesses);
    let scale = hi.abs().max(lo.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (hi - lo) / scale
    }
}

/// Normalized Shannon entropy of the min-shifted fitness shares
/// `w_k = (y_k - y_min) / sum_j (y_j - y_min)`. Equal fitnesses, and a
/// single firm, count as uniform (entropy 1).
pub fn fitness_entropy<T: Scalar>(fitnesses: &[T]) -> T {
    let n = fitnesses.len();
    if n < 2 {
        return T::one();
    }
    let (lo, _) = min_max(fitnesses);
    let total: T = fitnesses.iter().map(|&y| y - lo).sum();
    if total <= T::zero() {
        return T::one();
    }
    let h: T = fitnesses
        .iter()
        .map(|&y| {
            let w = (y - lo) / total;
            if w > T::zero() {
                -w * w.ln()
            } else {
                T::zero()
            }
        })
        .sum();
    (h / T::of(n as f64).ln()).max(T::zero()).min(T::one())
}

/// Cosine similarity, 0 when either vector has zero norm.
pub fn cosine_similarity<T: Scalar>(a: &[T], b: &[T]) -> T {
    let (mut dot, mut na, mut nb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        dot = dot + x * y;
        na = na + x * x;
        nb = nb + y * y;
    }
    if na == T::zero() || nb == T::zero() {
        return T::zero();
    }
    (dot / (na.sqrt() * nb.sqrt())).max(-T::one()).min(T::one())
}

/// `sum_{k != l} (1 - cos(p_k, p_l)) / (2 N (N - 1))` over ordered pairs.
/// Zero for fewer than two products.
pub fn product_diversity<T: Scalar>(products: &[&[T]]) -> T {
    let n = products.len();
    if n < 2 {
        return T::zero();
    }
    let mut total = T::zero();
    for k in 0..n {
        for l in 0..n {
            if k != l {
                total = total + (T::one() - cosine_similarity(products[k], products[l]));
            }
        }
    }
    total / T::of(2.0 * n as f64 * (n - 1) as f64)
}
