//! Exact statistics of algorithm A under fair i.i.d. input bits.
//!
//! With `Y_0 = ∅`, the state marginals are `α_n = 1/3 + (2/3)(-1/2)^n` for
//! `∅` and `β_n = θ_n = (1 - α_n)/2` for each bit value. The number `H` of
//! `∅` symbols among `Y_1..Y_N` (the number of output bits) has
//!
//! ```text
//! Pr(H = 0)   = 2^(1-N)
//! Pr(H = k)   = C(N-k-1, k) 2^-(N-k-1) + C(N-k-1, k-1) 2^-(N-k),  0 < k < N/2
//! Pr(H = N/2) = 2^(-N/2),  N even
//! ```
//!
//! and is asymptotically normal with mean `N/3` and variance `2N/27`, because
//! `∅` is a recurrent event with first-occurrence law `f_n = 2^(1-n)`, `n ≥ 2`.
//!
//! Identities are evaluated in exact rational arithmetic; probabilities are
//! held as integer numerators over `2^N`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub type Rational = BigRational;

fn q(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^e` for a rational base.
fn pow(base: &Rational, e: u64) -> Rational {
    num_traits::pow(base.clone(), e as usize)
}

/// Nearest `f64` to a rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// Marginal distribution of `Y_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateDist {
    pub n: u64,
    /// `Pr(Y_n = ∅)`
    pub alpha: Rational,
    /// `Pr(Y_n = 0)`
    pub beta: Rational,
    /// `Pr(Y_n = 1)`
    pub theta: Rational,
}

impl StateDist {
    pub fn total(&self) -> Rational {
        &self.alpha + &self.beta + &self.theta
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [to_f64(&self.alpha), to_f64(&self.beta), to_f64(&self.theta)]
    }
}

/// Closed form, using the separate even/odd expressions.
pub fn state_dist_closed(n: u64) -> StateDist {
    if n == 0 {
        return StateDist {
            n,
            alpha: Rational::one(),
            beta: Rational::zero(),
            theta: Rational::zero(),
        };
    }
    let m = n / 2;
    let quarter_m = pow(&q(1, 4), m);
    let third = q(1, 3);
    let (alpha, bit) = if n.is_multiple_of(2) {
        (
            &third + q(2, 3) * &quarter_m,
            &third - q(1, 3) * &quarter_m,
        )
    } else {
        (
            &third - q(1, 3) * &quarter_m,
            &third + q(1, 6) * &quarter_m,
        )
    };
    StateDist {
        n,
        alpha,
        beta: bit.clone(),
        theta: bit,
    }
}

/// `α_n = 1/3 + (2/3)(-1/2)^n`.
pub fn alpha_unified(n: u64) -> Rational {
    q(1, 3) + q(2, 3) * pow(&q(-1, 2), n)
}

/// Transition matrix of the chain on `(∅, 0, 1)`, up to the factor `1/2`.
pub const TRANSITION: [[i64; 3]; 3] = [[0, 1, 1], [1, 1, 0], [1, 0, 1]];

/// Iterates `p_k = (1/2) A p_{k-1}` from `p_0 = (1, 0, 0)`.
pub fn state_dist_matrix(n: u64) -> StateDist {
    let half = q(1, 2);
    let mut p = [Rational::one(), Rational::zero(), Rational::zero()];
    for _ in 0..n {
        let next: [Rational; 3] = std::array::from_fn(|r| {
            let row = TRANSITION[r]
                .iter()
                .zip(&p)
                .filter(|(&a, _)| a != 0)
                .fold(Rational::zero(), |acc, (&a, v)| acc + q(a, 1) * v);
            row * &half
        });
        p = next;
    }
    let [alpha, beta, theta] = p;
    StateDist {
        n,
        alpha,
        beta,
        theta,
    }
}

/// `v / 2^n` rounded from the top 64 bits of `v`.
fn dyadic_to_f64(v: &BigUint, n: usize) -> f64 {
    let shift = v.bits().saturating_sub(64);
    let top = (v >> shift).to_u64().expect("at most 64 bits") as f64;
    let mut e = shift as i64 - n as i64;
    let mut x = top;
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        x *= 2f64.powi(step as i32);
        e -= step;
    }
    x
}

/// Exact distribution of `H` for input length `N`: `Pr(H = k) = numer[k] / 2^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmfTable {
    n: usize,
    numer: Vec<BigUint>,
}

impl PmfTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest `k` in the support, `⌊N/2⌋`.
    pub fn max_k(&self) -> usize {
        self.numer.len() - 1
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numer
    }

    fn denominator(&self) -> BigInt {
        BigInt::one() << self.n
    }

    pub fn prob(&self, k: usize) -> Rational {
        match self.numer.get(k) {
            Some(v) => BigRational::new(BigInt::from(v.clone()), self.denominator()),
            None => Rational::zero(),
        }
    }

    pub fn prob_f64(&self, k: usize) -> f64 {
        match self.numer.get(k) {
            Some(v) => dyadic_to_f64(v, self.n),
            None => 0.0,
        }
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        (0..self.numer.len()).map(|k| self.prob_f64(k)).collect()
    }

    /// `Σ_k Pr(H = k) == 1` in integer arithmetic.
    pub fn is_normalized(&self) -> bool {
        let total: BigUint = self.numer.iter().sum();
        total == BigUint::one() << self.n
    }

    pub fn mean_exact(&self) -> Rational {
        let s: BigUint = self
            .numer
            .iter()
            .enumerate()
            .map(|(k, v)| v * BigUint::from(k))
            .sum();
        BigRational::new(BigInt::from(s), self.denominator())
    }

    pub fn variance_exact(&self) -> Rational {
        let s2: BigUint = self
            .numer
            .iter()
            .enumerate()
            .map(|(k, v)| v * BigUint::from(k * k))
            .sum();
        let m = self.mean_exact();
        BigRational::new(BigInt::from(s2), self.denominator()) - &m * &m
    }

    /// Mean from the floating-point probabilities.
    pub fn mean(&self) -> f64 {
        self.probs_f64()
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Variance from the floating-point probabilities.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.probs_f64()
            .iter()
            .enumerate()
            .map(|(k, p)| (k as f64 - m).powi(2) * p)
            .sum()
    }

    pub fn gaussian_mean(&self) -> f64 {
        self.n as f64 / 3.0
    }

    pub fn gaussian_var(&self) -> f64 {
        2.0 * self.n as f64 / 27.0
    }

    /// `P(H ≤ k)` for every `k` in the support.
    pub fn cdf_f64(&self) -> Vec<f64> {
        self.probs_f64()
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// The distribution of `H` for input length `n`.
pub fn pmf_h(n: usize) -> Result<PmfTable> {
    if n == 0 {
        return Err(Error::InvalidConfig("N must be at least 1".into()));
    }
    let max_k = n / 2;
    let mut numer = Vec::with_capacity(max_k + 1);
    // 2^(1-N) * 2^N
    numer.push(BigUint::from(2u32));
    // c = C(N-k-1, k), advanced by
    // C(m-1, k+1) = C(m, k) (m-k)(m-k-1) / ((k+1) m)  with m = N-k-1
    let mut c = BigUint::one();
    let mut k = 1;
    while 2 * k < n {
        let prev = k - 1;
        let m = n - prev - 1;
        c = c * BigUint::from((m - prev) * (m - prev - 1)) / BigUint::from((prev + 1) * m);
        // C(N-k-1, k-1) = C(N-k-1, k) k / (N-2k)
        let d = &c * BigUint::from(k) / BigUint::from(n - 2 * k);
        numer.push((&c << (k + 1)) + (d << k));
        k += 1;
    }
    if n.is_multiple_of(2) {
        numer.push(BigUint::one() << max_k);
    }
    debug_assert_eq!(numer.len(), max_k + 1);
    Ok(PmfTable { n, numer })
}

/// `E[H] = N/3 - 2/9 + (2/9)(-1/2)^N`.
pub fn mean_h(n: u64) -> Rational {
    q(n as i64, 3) - q(2, 9) + q(2, 9) * pow(&q(-1, 2), n)
}

/// `Var(H) = 2N/27 + 2/81 + (4N/27 + 2/81)(-1/2)^N - (4/81)(1/4)^N`.
pub fn var_h(n: u64) -> Rational {
    let n_i = n as i64;
    q(2 * n_i, 27) + q(2, 81) + (q(4 * n_i, 27) + q(2, 81)) * pow(&q(-1, 2), n)
        - q(4, 81) * pow(&q(1, 4), n)
}

/// Expected output rate `E[H]/N`.
pub fn rate(n: u64) -> Rational {
    mean_h(n) / q(n as i64, 1)
}

/// [`mean_h`] in floating point, for large `N`.
pub fn mean_h_f64(n: u64) -> f64 {
    let n_f = n as f64;
    n_f / 3.0 - 2.0 / 9.0 + 2.0 / 9.0 * (-0.5f64).powf(n_f)
}

/// [`var_h`] in floating point, for large `N`.
pub fn var_h_f64(n: u64) -> f64 {
    let n_f = n as f64;
    2.0 * n_f / 27.0 + 2.0 / 81.0 + (4.0 * n_f / 27.0 + 2.0 / 81.0) * (-0.5f64).powf(n_f)
        - 4.0 / 81.0 * 0.25f64.powf(n_f)
}

/// [`rate`] in floating point, for large `N`.
pub fn rate_f64(n: u64) -> f64 {
    let n_f = n as f64;
    1.0 / 3.0 - 2.0 / (9.0 * n_f) + 2.0 / (9.0 * n_f) * (-0.5f64).powf(n_f)
}

/// Law of the recurrence time of `∅`: `f_1 = 0`, `f_n = 2^(1-n)` for `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceLaw {
    pub mu_t: f64,
    pub sigma2_t: f64,
}

impl RecurrenceLaw {
    pub fn f(&self, n: u64) -> Rational {
        if n <= 1 {
            Rational::zero()
        } else {
            pow(&q(1, 2), n - 1)
        }
    }

    pub fn f_f64(&self, n: u64) -> f64 {
        if n <= 1 {
            0.0
        } else {
            0.5f64.powi((n - 1) as i32)
        }
    }

    /// `(Σ f_n, Σ n f_n, Σ n² f_n - (Σ n f_n)²)` over `n ≤ n_max`.
    pub fn truncated_moments(&self, n_max: u64) -> (f64, f64, f64) {
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for n in 1..=n_max {
            let f = self.f_f64(n);
            let n = n as f64;
            s0 += f;
            s1 += n * f;
            s2 += n * n * f;
        }
        (s0, s1, s2 - s1 * s1)
    }
}

/// Moments from the geometric-series identities
/// `Σ i a^i = a/(1-a)²` and `Σ i² a^i = a(1+a)/(1-a)³` at `a = 1/2`.
pub fn recurrence_law() -> RecurrenceLaw {
    let a = q(1, 2);
    let one_minus = q(1, 1) - &a;
    let s1 = &a / pow(&one_minus, 2);
    let s2 = &a * (q(1, 1) + &a) / pow(&one_minus, 3);
    // Σ_{i≥2} i 2^-(i-1) = 2 Σ i a^i - 1 ;  Σ_{i≥2} i² 2^-(i-1) = 2 Σ i² a^i - 1
    let mu = q(2, 1) * s1 - q(1, 1);
    let second = q(2, 1) * s2 - q(1, 1);
    let sigma2 = second - &mu * &mu;
    RecurrenceLaw {
        mu_t: to_f64(&mu),
        sigma2_t: to_f64(&sigma2),
    }
}

/// Mean and variance of the limiting normal law, `(N/3, 2N/27)`.
pub fn gaussian_approx(n: usize) -> (f64, f64) {
    let n = n as f64;
    (n / 3.0, 2.0 * n / 27.0)
}

/// Standard normal upper tail `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Normal cdf through `erfc`, accurate in both tails.
pub fn gaussian_cdf(x: f64, mean: f64, variance: f64) -> Result<f64> {
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let z = (x - mean) / variance.sqrt();
    Ok(q_function(-z))
}

/// Probability of a unit bin `[a, b]` under `N(mean, variance)`, computed on
/// the tail side to keep relative precision.
fn bin_mass(a: f64, b: f64, mean: f64, sd: f64) -> f64 {
    let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
    if za >= 0.0 {
        q_function(za) - q_function(zb)
    } else if zb <= 0.0 {
        q_function(-zb) - q_function(-za)
    } else {
        1.0 - q_function(-za) - q_function(zb)
    }
}

/// The limiting normal law integrated over unit bins `[k - 1/2, k + 1/2]`
/// for `k = 0 ..= ⌊N/2⌋`, renormalized over those bins.
///
/// Returns `ln q̃_k`; bins whose mass underflows use the midpoint density.
pub fn binned_gaussian_ln(n: usize) -> Vec<f64> {
    let (mean, var) = gaussian_approx(n);
    let sd = var.sqrt();
    let ln_norm = -0.5 * (2.0 * std::f64::consts::PI * var).ln();
    let ln_mass: Vec<f64> = (0..=n / 2)
        .map(|k| {
            let k = k as f64;
            let m = bin_mass(k - 0.5, k + 0.5, mean, sd);
            if m > 1e-290 {
                m.ln()
            } else {
                ln_norm - 0.5 * ((k - mean) / sd).powi(2)
            }
        })
        .collect();
    let total: f64 = ln_mass.iter().map(|l| l.exp()).sum();
    let ln_total = total.ln();
    ln_mass.into_iter().map(|l| l - ln_total).collect()
}

pub fn binned_gaussian(n: usize) -> Vec<f64> {
    binned_gaussian_ln(n).into_iter().map(f64::exp).collect()
}

/// `D(p ‖ q̃)` in nats between the exact law of `H` and the binned normal law.
pub fn kl_exact_vs_gaussian(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidConfig("KL comparison needs N >= 2".into()));
    }
    let pmf = pmf_h(n)?;
    Ok(kl_divergence(&pmf.probs_f64(), &binned_gaussian_ln(n)))
}

/// `Σ p_k (ln p_k - ln q_k)`, skipping `p_k = 0`.
pub fn kl_divergence(p: &[f64], ln_q: &[f64]) -> f64 {
    p.iter()
        .zip(ln_q)
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &lq)| p * (p.ln() - lq))
        .sum()
}

/// `max_k |P(H ≤ k) - Q̃(k)|` where `Q̃` is the cdf of the binned normal law.
pub fn cdf_sup_distance(n: usize) -> Result<f64> {
    let pmf = pmf_h(n)?;
    let g = binned_gaussian(n);
    let mut gc = 0.0;
    Ok(pmf
        .cdf_f64()
        .into_iter()
        .zip(g)
        .map(|(pc, gq)| {
            gc += gq;
            (pc - gc).abs()
        })
        .fold(0.0, f64::max))
}

/// `Pr(|H - E[H]| > γ E[H])` from the exact distribution.
pub fn exact_tail(pmf: &PmfTable, gamma: f64) -> f64 {
    let mean = to_f64(&pmf.mean_exact());
    let probs = pmf.probs_f64();
    probs
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 - mean).abs() > gamma * mean)
        .map(|(_, p)| p)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationBound {
    pub n: usize,
    pub gamma: f64,
    /// `2 Q(√(3N/2) γ)`, the normal approximation of the two-sided tail.
    pub normal_tail: f64,
    /// `2 / (√(2π) γ √(3N/2)) · exp(-(3N/4) γ²)`
    pub envelope: f64,
}

pub fn concentration_bound(n: usize, gamma: f64) -> Result<ConcentrationBound> {
    if n == 0 || gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "need N >= 1 and gamma > 0, got N={n}, gamma={gamma}"
        )));
    }
    let x = (1.5 * n as f64).sqrt() * gamma;
    let envelope = 2.0 / ((2.0 * std::f64::consts::PI).sqrt() * x)
        * (-0.75 * n as f64 * gamma * gamma).exp();
    Ok(ConcentrationBound {
        n,
        gamma,
        normal_tail: 2.0 * q_function(x),
        envelope,
    })
}

/// Summary of the exact law against its normal limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianComparison {
    #[serde(rename = "N")]
    pub n: usize,
    pub mean: f64,
    pub var: f64,
    pub gaussian_mean: f64,
    pub gaussian_var: f64,
    pub kl: f64,
    pub cdf_sup_distance: f64,
}

pub fn compare_with_gaussian(n: usize) -> Result<GaussianComparison> {
    let pmf = pmf_h(n)?;
    let (gm, gv) = gaussian_approx(n);
    Ok(GaussianComparison {
        n,
        mean: to_f64(&pmf.mean_exact()),
        var: to_f64(&pmf.variance_exact()),
        gaussian_mean: gm,
        gaussian_var: gv,
        kl: kl_exact_vs_gaussian(n)?,
        cdf_sup_distance: cdf_sup_distance(n)?,
    })
}

/// `true` iff `r` has a power-of-two denominator.
pub fn is_dyadic(r: &Rational) -> bool {
    let d = r.denom();
    (d & (d - BigInt::one())).is_zero()
}
