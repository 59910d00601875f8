//! Monte Carlo estimation of the distribution of `H` under fair input bits.
//!
//! # Random numbers
//!
//! Trials draw from SplitMix64:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output z ^ (z >> 31)
//! ```
//!
//! Trial `i` of a run seeded with `s` starts from the state
//! `mix(s, i) = fmix(s ^ fmix(i + 0x9E3779B97F4A7C15))`, where `fmix` is the
//! output function above. Fair input bits are taken from each output word
//! least significant bit first; biased bits compare a 53-bit uniform against
//! the bias.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::exact_stats::PmfTable;
use crate::generators::{absg_direct, bsg_direct, NULL, STEP};
use crate::seqcore::BitSeq;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn fmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Starting state of the substream for `trial`.
pub fn mix(seed: u64, trial: u64) -> u64 {
    fmix(seed ^ fmix(trial.wrapping_add(GOLDEN)))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        fmix(self.state)
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// What a trial runs on its input bits. All three count the same quantity:
/// the number of `∅` states, which is the number of output bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    StateOnly,
    Bsg,
    Absg,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::StateOnly => "state-only",
            GeneratorKind::Bsg => "bsg",
            GeneratorKind::Absg => "absg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub generator: GeneratorKind,
    /// Probability of a one bit; `0.5` for the fair model.
    pub p_one: f64,
}

impl SimConfig {
    pub fn new(n: usize, trials: u64, seed: u64) -> Result<Self> {
        let c = Self {
            n,
            trials,
            seed,
            generator: GeneratorKind::StateOnly,
            p_one: 0.5,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_generator(mut self, generator: GeneratorKind) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_bias(mut self, p_one: f64) -> Result<Self> {
        self.p_one = p_one;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.p_one > 0.0 && self.p_one < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "bit bias must lie in (0, 1), got {}",
                self.p_one
            )));
        }
        Ok(())
    }

    fn draw_bits(&self, rng: &mut SplitMix64, out: &mut Vec<u8>) {
        out.clear();
        if self.p_one == 0.5 {
            let mut word = 0u64;
            for i in 0..self.n {
                if i % 64 == 0 {
                    word = rng.next_u64();
                }
                out.push((word >> (i % 64) & 1) as u8);
            }
        } else {
            out.extend((0..self.n).map(|_| u8::from(rng.next_f64() < self.p_one)));
        }
    }

    fn trial(&self, index: u64, buf: &mut Vec<u8>) -> usize {
        let mut rng = SplitMix64::new(mix(self.seed, index));
        self.draw_bits(&mut rng, buf);
        match self.generator {
            GeneratorKind::StateOnly => {
                let mut y = NULL;
                let mut h = 0;
                for &b in buf.iter() {
                    y = STEP[usize::from(y)][usize::from(b)];
                    h += usize::from(y == NULL);
                }
                h
            }
            GeneratorKind::Bsg | GeneratorKind::Absg => {
                let x = BitSeq::from_vec_unchecked(buf.clone());
                if self.generator == GeneratorKind::Bsg {
                    bsg_direct(&x).len()
                } else {
                    absg_direct(&x).len()
                }
            }
        }
    }
}

/// Observed counts of `H = k` for `k = 0 ..= ⌊N/2⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalDist {
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: u64,
    pub counts: Vec<u64>,
}

impl EmpiricalDist {
    pub fn from_counts(n: usize, counts: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if counts.len() != n / 2 + 1 {
            return Err(Error::InvalidConfig(format!(
                "expected {} bins for N={n}, got {}",
                n / 2 + 1,
                counts.len()
            )));
        }
        let trials = counts.iter().sum();
        if trials == 0 {
            return Err(Error::InvalidConfig("no observations".into()));
        }
        Ok(Self { n, trials, counts })
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.counts.get(k).map_or(0.0, |&c| c as f64 / self.trials as f64)
    }

    pub fn mean(&self) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| k as f64 * c as f64)
            .sum::<f64>()
            / self.trials as f64
    }

    /// Population variance of the observed values.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| (k as f64 - m).powi(2) * c as f64)
            .sum::<f64>()
            / self.trials as f64
    }

    /// Mean output rate `H/N`.
    pub fn mean_rate(&self) -> f64 {
        self.mean() / self.n as f64
    }

    /// Standard error of [`mean_rate`](Self::mean_rate).
    pub fn rate_std_error(&self) -> f64 {
        (self.variance() / self.trials as f64).sqrt() / self.n as f64
    }

    /// Fraction of trials with `|H - center| > radius`.
    pub fn tail(&self, center: f64, radius: f64) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k as f64 - center).abs() > radius)
            .map(|(_, &c)| c)
            .sum::<u64>() as f64
            / self.trials as f64
    }
}

/// Builds a distribution from observed values of `H`.
pub fn tally<I: IntoIterator<Item = usize>>(n: usize, values: I) -> Result<EmpiricalDist> {
    let mut counts = vec![0u64; n / 2 + 1];
    for h in values {
        *counts.get_mut(h).ok_or_else(|| {
            Error::InvalidConfig(format!("H={h} is outside the support for N={n}"))
        })? += 1;
    }
    EmpiricalDist::from_counts(n, counts)
}

/// Runs `config.trials` independent trials in parallel.
///
/// The result depends only on the configuration, not on the thread count.
pub fn simulate(config: &SimConfig) -> Result<EmpiricalDist> {
    config.validate()?;
    let bins = config.n / 2 + 1;
    let counts = (0..config.trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; bins], Vec::with_capacity(config.n)),
            |(mut acc, mut buf), t| {
                acc[config.trial(t, &mut buf)] += 1;
                (acc, buf)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    EmpiricalDist::from_counts(config.n, counts)
}

/// Draws `trials` values of `H` directly from the exact law.
pub fn sample_exact(pmf: &PmfTable, trials: u64, seed: u64) -> Result<EmpiricalDist> {
    let cdf = pmf.cdf_f64();
    let mut rng = SplitMix64::new(seed);
    let last = cdf.len() - 1;
    tally(
        pmf.n(),
        (0..trials).map(|_| {
            let u = rng.next_f64();
            cdf.partition_point(|&c| c <= u).min(last)
        }),
    )
}

/// Pearson goodness-of-fit statistic after pooling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub bins: usize,
}

impl ChiSquare {
    /// Quantile of the reference chi-square law at `level`.
    pub fn critical_value(&self, level: f64) -> Result<f64> {
        let law = ChiSquared::new(self.dof as f64)
            .map_err(|e| Error::InvalidConfig(format!("chi-square law: {e}")))?;
        Ok(law.inverse_cdf(level))
    }

    pub fn passes(&self, level: f64) -> Result<bool> {
        Ok(self.statistic <= self.critical_value(level)?)
    }

    pub fn p_value(&self) -> Result<f64> {
        let law = ChiSquared::new(self.dof as f64)
            .map_err(|e| Error::InvalidConfig(format!("chi-square law: {e}")))?;
        Ok(law.sf(self.statistic))
    }
}

/// Minimum expected count per pooled bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// Compares observed counts with the exact law. Adjacent bins are merged,
/// in increasing `k`, until each holds an expected count of at least
/// [`MIN_EXPECTED`]; a short remainder joins the last pooled bin.
pub fn chi_square_gof(emp: &EmpiricalDist, exact: &PmfTable) -> Result<ChiSquare> {
    if emp.n != exact.n() {
        return Err(Error::IncompatibleLength {
            empirical: emp.n,
            exact: exact.n(),
        });
    }
    let total = emp.trials as f64;
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut e_acc, mut o_acc) = (0.0, 0.0);
    for (k, p) in exact.probs_f64().into_iter().enumerate() {
        e_acc += p * total;
        o_acc += emp.counts[k] as f64;
        if e_acc >= MIN_EXPECTED {
            pooled.push((e_acc, o_acc));
            e_acc = 0.0;
            o_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += e_acc;
                last.1 += o_acc;
            }
            None => pooled.push((e_acc, o_acc)),
        }
    }
    if pooled.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "only {} bin(s) after pooling; increase N or trials",
            pooled.len()
        )));
    }
    let statistic = pooled.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
    Ok(ChiSquare {
        statistic,
        dof: pooled.len() - 1,
        bins: pooled.len(),
    })
}
