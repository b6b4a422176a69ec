use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Uniform};
use serde::Serialize;

use super::params::{rank_size_sizes, InteractionSampling, ModelParams};
use crate::error::{Error, Result};
use crate::landscape::{FitnessLandscape, Genome};
use crate::rng::{rng_from_seed, SimRng};
use crate::scalar::Scalar;

/// Side length of the square in which firms are placed.
pub const AREA_SIDE: f64 = 100.0;
/// Half-width of the interval initial genes are drawn from.
pub const INITIAL_GENE_BOUND: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Firm<T> {
    pub index: usize,
    pub location: (f64, f64),
    pub employees: Vec<Genome<T>>,
    pub product: Genome<T>,
    pub product_fitness: T,
}

impl<T> Firm<T> {
    pub fn size(&self) -> usize {
        self.employees.len()
    }

    pub fn distance_to(&self, other: &Firm<T>) -> f64 {
        let (dx, dy) = (self.location.0 - other.location.0, self.location.1 - other.location.1);
        dx.hypot(dy)
    }
}

/// Interactions drawn by one inter-firm exchange substep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionTally {
    n_firms: usize,
    /// Row-major `[recipient firm][donor firm]` interaction counts.
    counts: Vec<usize>,
    /// Number of genes overwritten.
    pub gene_writes: usize,
}

impl InteractionTally {
    fn new(n_firms: usize) -> Self {
        InteractionTally {
            n_firms,
            counts: vec![0; n_firms * n_firms],
            gene_writes: 0,
        }
    }

    /// Interactions in which an employee of `recipient` copied from an
    /// employee of `donor`.
    pub fn between(&self, recipient: usize, donor: usize) -> usize {
        self.counts[recipient * self.n_firms + donor]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Population of firms and employees at one time step, with its generator.
#[derive(Clone, Debug)]
pub struct ModelState<T> {
    pub time: u32,
    pub firms: Vec<Firm<T>>,
    rng: SimRng,
}

/// (recipient firm, recipient employee, donor firm, donor employee)
type PairEvent = (usize, usize, usize, usize);

/// Number of failures before the first success of Bernoulli trials with
/// success probability `p`, by inversion; `log_q` is `ln(1 - p)`. Exact for
/// any `p` in (0, 1], including values too small for the rejection sampler
/// of `rand_distr`.
fn geometric_gap<R: Rng>(rng: &mut R, log_q: f64) -> u64 {
    let u = 1.0 - rng.random::<f64>();
    (u.ln() / log_q).floor() as u64
}

impl<T: Scalar> ModelState<T> {
    /// Random initial state.
    ///
    /// Draw order from the run generator: for each firm in rank order, its
    /// two coordinates, then all its employee genomes gene by gene, then the
    /// index of the employee whose genome becomes the initial product.
    pub fn init<L: FitnessLandscape<T> + ?Sized>(params: &ModelParams, landscape: &L) -> Result<Self> {
        params.validate()?;
        if landscape.genome_size() != params.genome_size {
            return Err(Error::Dimension {
                expected: params.genome_size,
                actual: landscape.genome_size(),
            });
        }
        let mut rng = rng_from_seed(params.seed);
        let genes = Uniform::new_inclusive(T::of(-INITIAL_GENE_BOUND), T::of(INITIAL_GENE_BOUND))
            .expect("finite gene bounds");
        let sizes = rank_size_sizes(params.largest_firm_size, params.size_hierarchy, params.n_firms);
        let mut firms = Vec::with_capacity(sizes.len());
        for (index, &size) in sizes.iter().enumerate() {
            let location = (
                rng.random_range(0.0..=AREA_SIDE),
                rng.random_range(0.0..=AREA_SIDE),
            );
            let employees: Vec<Genome<T>> = (0..size)
                .map(|_| Genome((0..params.genome_size).map(|_| genes.sample(&mut rng)).collect()))
                .collect();
            let product = employees[rng.random_range(0..size)].clone();
            let product_fitness = landscape.fitness(&product);
            firms.push(Firm {
                index,
                location,
                employees,
                product,
                product_fitness,
            });
        }
        Ok(ModelState { time: 0, firms, rng })
    }

    /// State assembled from explicit firms, stepping from `time = 0` with a
    /// generator seeded by `seed`.
    pub fn from_firms(firms: Vec<Firm<T>>, seed: u64) -> Self {
        ModelState {
            time: 0,
            firms,
            rng: rng_from_seed(seed),
        }
    }

    pub fn n_employees(&self) -> usize {
        self.firms.iter().map(Firm::size).sum()
    }

    pub fn product_fitnesses(&self) -> Vec<T> {
        self.firms.iter().map(|f| f.product_fitness).collect()
    }

    /// Within-firm crossover. Each employee, with probability `p_C`, picks
    /// a different employee of its firm uniformly and copies each of its
    /// genes with probability `s_C`. Donor genes are read from the genomes
    /// as they were when the substep started. Returns the number of
    /// crossovers performed.
    pub fn intra_firm_exchange(&mut self, params: &ModelParams) -> usize {
        let mut crossovers = 0;
        if params.crossover_prob == 0.0 {
            return 0;
        }
        for firm in &mut self.firms {
            let size = firm.size();
            if size < 2 {
                continue;
            }
            let frozen = firm.employees.clone();
            for (i, genome) in firm.employees.iter_mut().enumerate() {
                if !self.rng.random_bool(params.crossover_prob) {
                    continue;
                }
                crossovers += 1;
                let mut donor = self.rng.random_range(0..size - 1);
                if donor >= i {
                    donor += 1;
                }
                for (gene, &donor_gene) in genome.iter_mut().zip(frozen[donor].iter()) {
                    if self.rng.random_bool(params.crossover_share) {
                        *gene = donor_gene;
                    }
                }
            }
        }
        crossovers
    }

    /// Adds, with probability `p_M` per gene, a uniform increment on
    /// `[-x_M/2, x_M/2]`. Genes are not clamped. Returns the number of
    /// mutated genes.
    pub fn mutate(&mut self, params: &ModelParams) -> usize {
        if params.mutation_prob == 0.0 {
            return 0;
        }
        let half = T::of(params.mutation_amplitude / 2.0);
        let increment = Uniform::new_inclusive(-half, half).expect("finite amplitude");
        let mut mutated = 0;
        for firm in &mut self.firms {
            for genome in &mut firm.employees {
                for gene in genome.iter_mut() {
                    if self.rng.random_bool(params.mutation_prob) {
                        *gene = *gene + increment.sample(&mut self.rng);
                        mutated += 1;
                    }
                }
            }
        }
        mutated
    }

    /// Sets each firm's product to its fittest employee genome (lowest index
    /// on ties), then overwrites the genomes of `round(s_P * S_k)` distinct,
    /// uniformly chosen employees with that product.
    pub fn select_products<L: FitnessLandscape<T> + ?Sized>(&mut self, params: &ModelParams, landscape: &L) {
        for firm in &mut self.firms {
            let mut best = 0;
            let mut best_fitness = landscape.fitness(&firm.employees[0]);
            for (i, genome) in firm.employees.iter().enumerate().skip(1) {
                let y = landscape.fitness(genome);
                if y > best_fitness {
                    best = i;
                    best_fitness = y;
                }
            }
            firm.product = firm.employees[best].clone();
            firm.product_fitness = best_fitness;

            let size = firm.size();
            let workers = ((params.product_share * size as f64).round_ties_even() as usize).min(size);
            if workers == 0 {
                continue;
            }
            for i in index::sample(&mut self.rng, size, workers) {
                firm.employees[i].clone_from(&firm.product);
            }
        }
    }

    /// Interaction probability `p_E * exp(-d / d_E)` between two firms.
    pub fn interaction_probability(&self, params: &ModelParams, a: usize, b: usize) -> f64 {
        let d = self.firms[a].distance_to(&self.firms[b]);
        params.interaction_prob * (-d / params.distance_decay).exp()
    }

    /// Informal exchange between firms.
    ///
    /// Every ordered pair (recipient, donor) of employees of distinct firms
    /// interacts independently with the firms' interaction probability; on
    /// interaction the recipient copies each donor gene with probability
    /// `s_C`. Donor genomes are read as they were when the substep started.
    /// A recipient with several donors applies them in lexicographic
    /// (donor firm, donor employee) order.
    pub fn inter_firm_exchange(&mut self, params: &ModelParams) -> InteractionTally {
        let n = self.firms.len();
        let mut tally = InteractionTally::new(n);
        if params.interaction_prob == 0.0 || n < 2 {
            return tally;
        }
        let events = match params.interaction_sampling {
            InteractionSampling::PerPair => self.draw_pairs_geometric(params),
            InteractionSampling::PerPairNaive => self.draw_pairs_naive(params),
            InteractionSampling::Binomial => self.draw_pairs_binomial(params),
        };
        if events.is_empty() {
            return tally;
        }
        let donors: Vec<Genome<T>> = events
            .iter()
            .map(|&(_, _, l, j)| self.firms[l].employees[j].clone())
            .collect();
        for (&(k, i, l, _), donor) in events.iter().zip(&donors) {
            tally.counts[k * n + l] += 1;
            let genome = &mut self.firms[k].employees[i];
            for (gene, &donor_gene) in genome.iter_mut().zip(donor.iter()) {
                if self.rng.random_bool(params.crossover_share) {
                    *gene = donor_gene;
                    tally.gene_writes += 1;
                }
            }
        }
        tally
    }

    fn firm_pairs(&self, params: &ModelParams) -> Vec<(usize, usize, f64)> {
        let n = self.firms.len();
        let mut pairs = Vec::with_capacity(n * (n - 1));
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    pairs.push((k, l, self.interaction_probability(params, k, l)));
                }
            }
        }
        pairs
    }

    fn draw_pairs_geometric(&mut self, params: &ModelParams) -> Vec<PairEvent> {
        let mut events = Vec::new();
        for (k, l, p) in self.firm_pairs(params) {
            if p <= 0.0 {
                continue;
            }
            let donors = self.firms[l].size() as u64;
            let total = self.firms[k].size() as u64 * donors;
            let log_q = (-p).ln_1p();
            let mut at = 0u64;
            loop {
                at = at.saturating_add(geometric_gap(&mut self.rng, log_q));
                if at >= total {
                    break;
                }
                events.push((k, (at / donors) as usize, l, (at % donors) as usize));
                at += 1;
            }
        }
        events.sort_unstable();
        events
    }

    fn draw_pairs_binomial(&mut self, params: &ModelParams) -> Vec<PairEvent> {
        let mut events = Vec::new();
        for (k, l, p) in self.firm_pairs(params) {
            if p <= 0.0 {
                continue;
            }
            let donors = self.firms[l].size();
            let total = self.firms[k].size() * donors;
            let count = Binomial::new(total as u64, p)
                .expect("probability in [0, 1]")
                .sample(&mut self.rng) as usize;
            if count == 0 {
                continue;
            }
            for at in index::sample(&mut self.rng, total, count) {
                events.push((k, at / donors, l, at % donors));
            }
        }
        events.sort_unstable();
        events
    }

    fn draw_pairs_naive(&mut self, params: &ModelParams) -> Vec<PairEvent> {
        let n = self.firms.len();
        let probs: Vec<f64> = (0..n * n)
            .map(|kl| {
                let (k, l) = (kl / n, kl % n);
                if k == l {
                    0.0
                } else {
                    self.interaction_probability(params, k, l)
                }
            })
            .collect();
        let mut events = Vec::new();
        for k in 0..n {
            for i in 0..self.firms[k].size() {
                for l in (0..n).filter(|&l| l != k) {
                    let p = probs[k * n + l];
                    for j in 0..self.firms[l].size() {
                        if self.rng.random_bool(p) {
                            events.push((k, i, l, j));
                        }
                    }
                }
            }
        }
        events
    }

    /// Advances one tick: within-firm exchange, mutation, product selection,
    /// inter-firm exchange.
    pub fn step<L: FitnessLandscape<T> + ?Sized>(
        &mut self,
        params: &ModelParams,
        landscape: &L,
    ) -> Result<InteractionTally> {
        if self.time >= params.t_final {
            return Err(Error::Finished {
                time: self.time,
                t_final: params.t_final,
            });
        }
        self.intra_firm_exchange(params);
        self.mutate(params);
        self.select_products(params, landscape);
        let tally = self.inter_firm_exchange(params);
        self.time += 1;
        Ok(tally)
    }

    /// Firm-level view of the state (locations, sizes, products, fitnesses).
    pub fn snapshot(&self) -> StateSnapshot<T> {
        StateSnapshot {
            time: self.time,
            firms: self
                .firms
                .iter()
                .map(|f| FirmSnapshot {
                    index: f.index,
                    location: [f.location.0, f.location.1],
                    size: f.size(),
                    product: f.product.clone(),
                    product_fitness: f.product_fitness,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateSnapshot<T> {
    pub time: u32,
    pub firms: Vec<FirmSnapshot<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirmSnapshot<T> {
    pub index: usize,
    pub location: [f64; 2],
    pub size: usize,
    pub product: Genome<T>,
    pub product_fitness: T,
}
