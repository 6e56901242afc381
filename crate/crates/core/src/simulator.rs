//! Monte Carlo simulation of the quantum communication stage under a
//! collective attack.
//!
//! Each iteration evolves the pure joint state of the transit qubit and Eve's
//! ancilla: Alice prepares `|a⟩ ⊗ |0⟩_E`, Eve applies `U_E`, Bob either measures
//! the transit qubit in Z (collapsing the joint state and resending `|r⟩`) or
//! reflects it, Eve applies `U_F`, and Alice measures in her preparation basis.
//! There are only twelve distinct branches (four preparations, each either
//! reflected or collapsed to one of two outcomes), so the branch states and
//! their Born-rule probabilities are evolved once per run and each iteration
//! samples through them.
//!
//! Randomness comes from ChaCha8. Iterations are split into fixed chunks of
//! [`CHUNK_ITERATIONS`]; chunk `n` uses `ChaCha8Rng::seed_from_u64(seed)` on
//! stream `n`, so results depend only on `(seed, iterations)` and not on the
//! worker count.

use std::ops::AddAssign;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::attack::CollectiveAttack;
use crate::error::{Error, Result};
use crate::keyrate::key_rate_bound;
use crate::linalg::{ComplexVector, C64};
use crate::stats::ChannelStatistics;

pub const CHUNK_ITERATIONS: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub iterations: u64,
    /// Probability Alice prepares in Z rather than X.
    pub prob_z_basis: f64,
    /// Probability Bob measures and resends rather than reflects.
    pub prob_measure_resend: f64,
    pub seed: u64,
    pub workers: usize,
}

impl ProtocolConfig {
    /// Unbiased basis and action choices, single worker.
    pub fn new(iterations: u64, seed: u64) -> Self {
        Self {
            iterations,
            prob_z_basis: 0.5,
            prob_measure_resend: 0.5,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "iterations must be positive".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be positive".into()));
        }
        for (name, p) in [
            ("prob_z_basis", self.prob_z_basis),
            ("prob_measure_resend", self.prob_measure_resend),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} must lie strictly inside (0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Event counts. Index 0 of the X-basis axes is `|+⟩`, index 1 is `|−⟩`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TallyCounts {
    /// `[sent i][Bob measured j][Alice measured k]`, Z preparation and measure-resend.
    pub z_counts: [[[u64; 2]; 2]; 2],
    /// `[sent][Alice measured]`, X preparation and reflect.
    pub x_reflect_counts: [[u64; 2]; 2],
    /// Z preparation with reflect, or X preparation with measure-resend.
    pub other_counts: u64,
    pub total: u64,
}

impl TallyCounts {
    pub fn cell_sum(&self) -> u64 {
        self.z_counts.iter().flatten().flatten().sum::<u64>()
            + self.x_reflect_counts.iter().flatten().sum::<u64>()
            + self.other_counts
    }
}

impl AddAssign<&TallyCounts> for TallyCounts {
    fn add_assign(&mut self, rhs: &TallyCounts) {
        for (a, b) in self
            .z_counts
            .iter_mut()
            .flatten()
            .flatten()
            .zip(rhs.z_counts.iter().flatten().flatten())
        {
            *a += b;
        }
        for (a, b) in self
            .x_reflect_counts
            .iter_mut()
            .flatten()
            .zip(rhs.x_reflect_counts.iter().flatten())
        {
            *a += b;
        }
        self.other_counts += rhs.other_counts;
        self.total += rhs.total;
    }
}

/// Sifted raw key bits: Alice's and Bob's bit from every Z-preparation,
/// measure-resend iteration, in iteration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawKeys {
    alice: Vec<bool>,
    bob: Vec<bool>,
}

impl RawKeys {
    pub fn new(alice: Vec<bool>, bob: Vec<bool>) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::DimensionMismatch(format!(
                "Alice's key has {} bits, Bob's {}",
                alice.len(),
                bob.len()
            )));
        }
        Ok(Self { alice, bob })
    }

    pub fn alice(&self) -> &[bool] {
        &self.alice
    }

    pub fn bob(&self) -> &[bool] {
        &self.bob
    }

    pub fn len(&self) -> usize {
        self.alice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty()
    }

    fn extend(&mut self, other: RawKeys) {
        self.alice.extend(other.alice);
        self.bob.extend(other.bob);
    }
}

/// Outcome probabilities of one preparation, evolved through both of Bob's actions.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PreparationBranches {
    /// Probability Bob's Z measurement yields `|1⟩`.
    pub bob_one: f64,
    /// `alice_second[r]`: probability Alice gets her second outcome (`|1⟩` or
    /// `|−⟩`) after Bob measured `r`.
    pub alice_second_after_measure: [f64; 2],
    pub alice_second_after_reflect: f64,
    /// Born-rule sums before normalization, for consistency checks.
    #[cfg_attr(not(test), allow(dead_code))]
    pub bob_total: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub alice_totals: [f64; 3],
}

/// Preparations in order `|0⟩, |1⟩, |+⟩, |−⟩`.
pub(crate) fn branch_table(attack: &CollectiveAttack) -> [PreparationBranches; 4] {
    let d = attack.ancilla_dim();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        ComplexVector::from_real(&[1.0, 0.0]),
        ComplexVector::from_real(&[0.0, 1.0]),
        ComplexVector::from_real(&[s, s]),
        ComplexVector::from_real(&[s, -s]),
    ];
    let ancilla_zero = ComplexVector::basis(d, 0);

    // Probabilities of Alice's two outcomes when measuring `psi` in the
    // basis she prepared in.
    let alice_measure = |psi: &ComplexVector, x_basis: bool| -> [f64; 2] {
        let c0 = attack.ancilla_component(psi, 0);
        let c1 = attack.ancilla_component(psi, 1);
        if x_basis {
            let h = C64::new(s, 0.0);
            [
                (&c0 + &c1).scale(h).norm_sqr(),
                (&c0 - &c1).scale(h).norm_sqr(),
            ]
        } else {
            [c0.norm_sqr(), c1.norm_sqr()]
        }
    };

    std::array::from_fn(|prep| {
        let x_basis = prep >= 2;
        let after_eve = attack.forward().apply(&kets[prep].tensor(&ancilla_zero));

        let comps = [
            attack.ancilla_component(&after_eve, 0),
            attack.ancilla_component(&after_eve, 1),
        ];
        let bob_probs = [comps[0].norm_sqr(), comps[1].norm_sqr()];
        let bob_total = bob_probs[0] + bob_probs[1];

        let mut alice_second_after_measure = [0.0; 2];
        let mut alice_totals = [1.0; 3];
        for r in 0..2 {
            if bob_probs[r] <= 0.0 {
                continue;
            }
            // Collapse onto Bob's outcome and resend |r⟩ with Eve's ancilla as left.
            let collapsed = comps[r].scale(C64::new(1.0 / bob_probs[r].sqrt(), 0.0));
            let resent = ComplexVector::basis(2, r).tensor(&collapsed);
            let back = attack.reverse().apply(&resent);
            let probs = alice_measure(&back, x_basis);
            alice_totals[r] = probs[0] + probs[1];
            alice_second_after_measure[r] = probs[1] / alice_totals[r];
        }

        let reflected = attack.reverse().apply(&after_eve);
        let probs = alice_measure(&reflected, x_basis);
        alice_totals[2] = probs[0] + probs[1];

        PreparationBranches {
            bob_one: bob_probs[1] / bob_total,
            alice_second_after_measure,
            alice_second_after_reflect: probs[1] / alice_totals[2],
            bob_total,
            alice_totals,
        }
    })
}

fn run_chunk(
    branches: &[PreparationBranches; 4],
    config: &ProtocolConfig,
    chunk: u64,
) -> (TallyCounts, RawKeys) {
    let start = chunk * CHUNK_ITERATIONS;
    let len = CHUNK_ITERATIONS.min(config.iterations - start);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(chunk);

    let mut tally = TallyCounts {
        total: len,
        ..TallyCounts::default()
    };
    let mut keys = RawKeys::default();
    for _ in 0..len {
        let z_basis = rng.random::<f64>() < config.prob_z_basis;
        let bit = usize::from(rng.random::<bool>());
        let prep = if z_basis { bit } else { 2 + bit };
        let measure = rng.random::<f64>() < config.prob_measure_resend;
        let branch = &branches[prep];

        if measure {
            let r = usize::from(rng.random::<f64>() < branch.bob_one);
            let k = usize::from(rng.random::<f64>() < branch.alice_second_after_measure[r]);
            if z_basis {
                tally.z_counts[bit][r][k] += 1;
                keys.alice.push(k == 1);
                keys.bob.push(r == 1);
            } else {
                tally.other_counts += 1;
            }
        } else {
            let k = usize::from(rng.random::<f64>() < branch.alice_second_after_reflect);
            if z_basis {
                tally.other_counts += 1;
            } else {
                tally.x_reflect_counts[bit][k] += 1;
            }
        }
    }
    (tally, keys)
}

/// Runs `config.iterations` protocol rounds against `attack`.
pub fn run_protocol(
    attack: &CollectiveAttack,
    config: &ProtocolConfig,
) -> Result<(TallyCounts, RawKeys)> {
    config.validate()?;
    let branches = branch_table(attack);
    let chunks = config.iterations.div_ceil(CHUNK_ITERATIONS);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let parts: Vec<(TallyCounts, RawKeys)> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|chunk| run_chunk(&branches, config, chunk))
            .collect()
    });

    let mut tally = TallyCounts::default();
    let mut keys = RawKeys::default();
    for (t, k) in parts {
        tally += &t;
        keys.extend(k);
    }
    Ok((tally, keys))
}

/// Binomial standard errors `sqrt(p(1-p)/n)` of each estimated statistic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatisticsErrors {
    pub z: [[[f64; 2]; 2]; 2],
    pub p_plus_minus: f64,
    pub p_minus_plus: f64,
}

impl StatisticsErrors {
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        for (n, e) in self.z.iter().flatten().flatten().enumerate() {
            out[n] = *e;
        }
        out[8] = self.p_plus_minus;
        out[9] = self.p_minus_plus;
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatisticsEstimate {
    pub stats: ChannelStatistics,
    pub errors: StatisticsErrors,
    /// Conditioning class sizes: Z-sent `|0⟩`, `|1⟩` with measure-resend.
    pub z_class_sizes: [u64; 2],
    /// Conditioning class sizes: X-sent `|+⟩`, `|−⟩` with reflect.
    pub x_class_sizes: [u64; 2],
}

impl StatisticsEstimate {
    /// Delta-method standard error of the key-rate bound, treating each
    /// conditioning class as an independent multinomial sample.
    pub fn rate_standard_error(&self) -> Result<f64> {
        let base = self.stats.to_array();
        let gradient = rate_gradient(&base)?;
        let mut variance = 0.0;
        for i in 0..2 {
            let n = self.z_class_sizes[i] as f64;
            let cell = |m: usize| 4 * i + m;
            let mean: f64 = (0..4).map(|m| gradient[cell(m)] * base[cell(m)]).sum();
            let second: f64 = (0..4)
                .map(|m| gradient[cell(m)].powi(2) * base[cell(m)])
                .sum();
            variance += (second - mean * mean) / n;
        }
        for (m, n) in [(8, self.x_class_sizes[0]), (9, self.x_class_sizes[1])] {
            variance += gradient[m].powi(2) * base[m] * (1.0 - base[m]) / n as f64;
        }
        Ok(variance.max(0.0).sqrt())
    }
}

fn rate_gradient(base: &[f64; 10]) -> Result<[f64; 10]> {
    let rate = |v: [f64; 10]| -> Result<f64> {
        Ok(key_rate_bound(&ChannelStatistics::from_array_raw(v))?.rate)
    };
    let mut gradient = [0.0; 10];
    for m in 0..10 {
        let p = base[m];
        if p <= 0.0 {
            continue;
        }
        let step = 1e-7f64.min(0.5 * p).min(0.5 * (1.0 - p)).max(1e-12);
        let mut up = *base;
        let mut down = *base;
        up[m] += step;
        down[m] -= step;
        gradient[m] = (rate(up)? - rate(down)?) / (2.0 * step);
    }
    Ok(gradient)
}

fn frequency(count: u64, n: u64) -> (f64, f64) {
    let p = count as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

/// Conditional relative frequencies of the ten statistics.
pub fn estimate_statistics(tally: &TallyCounts) -> Result<StatisticsEstimate> {
    let mut z = [[[0.0; 2]; 2]; 2];
    let mut z_err = [[[0.0; 2]; 2]; 2];
    let mut z_sizes = [0; 2];
    for i in 0..2 {
        let n: u64 = tally.z_counts[i].iter().flatten().sum();
        if n == 0 {
            return Err(Error::InsufficientData {
                class: format!("Alice sent |{i}> and Bob measured"),
            });
        }
        z_sizes[i] = n;
        for j in 0..2 {
            for k in 0..2 {
                (z[i][j][k], z_err[i][j][k]) = frequency(tally.z_counts[i][j][k], n);
            }
        }
    }

    let mut x = [0.0; 2];
    let mut x_err = [0.0; 2];
    let mut x_sizes = [0; 2];
    for (a, label) in ["+", "-"].into_iter().enumerate() {
        let n: u64 = tally.x_reflect_counts[a].iter().sum();
        if n == 0 {
            return Err(Error::InsufficientData {
                class: format!("Alice sent |{label}> and Bob reflected"),
            });
        }
        x_sizes[a] = n;
        // error: Alice measures the opposite sign
        (x[a], x_err[a]) = frequency(tally.x_reflect_counts[a][1 - a], n);
    }

    Ok(StatisticsEstimate {
        stats: ChannelStatistics::new(z, x[0], x[1])?,
        errors: StatisticsErrors {
            z: z_err,
            p_plus_minus: x_err[0],
            p_minus_plus: x_err[1],
        },
        z_class_sizes: z_sizes,
        x_class_sizes: x_sizes,
    })
}

/// Fraction of positions where Alice's and Bob's bits differ.
pub fn qber(keys: &RawKeys) -> Result<f64> {
    if keys.is_empty() {
        return Err(Error::EmptyKey);
    }
    let errors = keys
        .alice
        .iter()
        .zip(&keys.bob)
        .filter(|(a, b)| a != b)
        .count();
    Ok(errors as f64 / keys.len() as f64)
}

/// Applies one seeded random permutation to both keys.
pub fn permute_keys(keys: &RawKeys, seed: u64) -> Result<RawKeys> {
    if keys.is_empty() {
        return Err(Error::EmptyKey);
    }
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(RawKeys {
        alice: order.iter().map(|&n| keys.alice[n]).collect(),
        bob: order.iter().map(|&n| keys.bob[n]).collect(),
    })
}
