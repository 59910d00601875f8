//! Shift classes of algorithm A on m-sequence inputs.
//!
//! For an m-sequence `x` of period `T = 2^L - 1`, each cyclic shift `(x, k)`
//! yields a state sequence with either `y_T = ∅` (class A, state period `T`)
//! or `y_T != ∅` (class B, state period `2T`). The class sizes `T_A`, `T_B`
//! equal the number of `∅` symbols per state period of any member, so they
//! fix the output periods, the average output period
//! `T_z = (T_A² + T_B²) / (T_A + T_B)`, and the bounds checked in
//! [`BoundChecks`].
//!
//! Exhaustive work runs on [`LaneBlock`], which advances 64 shifts at once
//! with the state held in two bit planes.

use std::collections::BTreeSet;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{run_b, run_c, NULL, STEP};
use crate::lfsr::{verify_maximal, LfsrConfig, MSequence, Polynomial};
use crate::seqcore::{least_period, linear_runs, BitSeq, StateSeq, StateSymbol};

/// Default register-length ceiling for exhaustive classification.
pub const DEFAULT_CLASS_CEILING: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ShiftClass {
    A,
    B,
}

/// State sequence `y_1 ..= y_steps` (dense indices) for input shift `k` of a
/// periodic `x`, starting from `y_0 = ∅`.
fn simulate_shift(x: &[u8], k: usize, steps: usize) -> Vec<u8> {
    let t = x.len();
    let mut y = NULL;
    let mut pos = k % t;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        y = STEP[usize::from(y)][usize::from(x[pos])];
        out.push(y);
        pos += 1;
        if pos == t {
            pos = 0;
        }
    }
    out
}

/// Recovers the shortest LFSR generating `s` (Berlekamp-Massey over GF(2)).
///
/// Returns the linear complexity and the polynomial in this crate's tap
/// convention.
fn berlekamp_massey(s: &[u8]) -> (usize, Vec<u32>) {
    let n = s.len();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let (mut l, mut m) = (0usize, 1usize);
    for i in 0..n {
        let d = (1..=l).fold(s[i], |acc, j| acc ^ (c[j] & s[i - j]));
        if d == 0 {
            m += 1;
        } else if 2 * l <= i {
            let prev = c.clone();
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            l = i + 1 - l;
            b = prev;
            m = 1;
        } else {
            for j in 0..=n - m {
                c[j + m] ^= b[j];
            }
            m += 1;
        }
    }
    // s[n] = sum c_j s[n - j]  <=>  s[n + l] = sum_{c_j = 1} s[n + l - j]
    let taps = (1..=l).filter(|&j| c[j] == 1).map(|j| (l - j) as u32).collect();
    (l, taps)
}

/// Confirms `x` is one period of a maximal-length sequence and returns its
/// feedback polynomial.
pub fn check_m_sequence(x: &BitSeq) -> Result<Polynomial> {
    let t = x.len();
    if t < 3 || !(t + 1).is_power_of_two() {
        return Err(Error::NotMSequence(format!(
            "length {t} is not of the form 2^L - 1 with L >= 2"
        )));
    }
    let l = (t + 1).trailing_zeros();
    let window: Vec<u8> = (0..2 * l as usize).map(|i| x.as_slice()[i % t]).collect();
    let (complexity, taps) = berlekamp_massey(&window);
    if complexity != l as usize {
        return Err(Error::NotMSequence(format!(
            "linear complexity {complexity} differs from {l}"
        )));
    }
    let poly = Polynomial::new(l, taps)?;
    if !verify_maximal(&poly) {
        return Err(Error::NotMSequence(format!("{poly} is not primitive")));
    }
    let seed = BitSeq::new(x.as_slice()[..l as usize].to_vec())?;
    let config = LfsrConfig::new(poly.clone(), seed)?;
    if config.generate(t) != *x {
        return Err(Error::NotMSequence(format!(
            "sequence does not follow the recurrence of {poly}"
        )));
    }
    Ok(poly)
}

/// Class of the shift `(x, k)`: runs algorithm A for `T` steps and tests `y_T`.
pub fn classify_shift(x_period: &BitSeq, k: usize) -> Result<ShiftClass> {
    check_m_sequence(x_period)?;
    let t = x_period.len();
    if k >= t {
        return Err(Error::InvalidConfig(format!("shift {k} outside [0, {t})")));
    }
    Ok(classify_unchecked(x_period.as_slice(), k))
}

fn classify_unchecked(x: &[u8], k: usize) -> ShiftClass {
    let y = simulate_shift(x, k, x.len());
    if y[x.len() - 1] == NULL {
        ShiftClass::A
    } else {
        ShiftClass::B
    }
}

/// Periodic input packed for 64-bit window reads.
struct PackedInput {
    words: Vec<u64>,
    period: usize,
}

impl PackedInput {
    fn new(x: &[u8]) -> Self {
        let t = x.len();
        // one period plus room for a 64-lane window at any start below t
        let len = t + 128;
        let mut words = vec![0u64; len.div_ceil(64) + 1];
        for i in 0..len {
            if x[i % t] == 1 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        PackedInput { words, period: t }
    }

    /// Bit `j` is `x[(start + j) mod T]`; requires `start < T`.
    #[inline]
    fn window(&self, start: usize) -> u64 {
        let (w, r) = (start / 64, start % 64);
        if r == 0 {
            self.words[w]
        } else {
            (self.words[w] >> r) | (self.words[w + 1] << (64 - r))
        }
    }
}

/// Algorithm A state for 64 lanes: `null` marks `∅`, `value` holds the bit
/// otherwise (and is kept 0 on `∅` lanes so planes compare exactly).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Planes {
    null: u64,
    value: u64,
}

impl Planes {
    const START: Planes = Planes {
        null: !0,
        value: 0,
    };

    #[inline]
    fn step(self, x: u64) -> Planes {
        let null = !self.null & !(x ^ self.value);
        let value = ((self.null & x) | (!self.null & self.value)) & !null;
        Planes { null, value }
    }

    /// Lanes where the two states differ.
    #[inline]
    fn differ(self, other: Planes) -> u64 {
        (self.null ^ other.null) | (self.value ^ other.value)
    }
}

/// 64 consecutive shifts `k0 .. k0 + 64` of one periodic input.
pub(crate) struct LaneBlock<'a> {
    input: &'a PackedInput,
    k0: usize,
    lanes: u64,
}

/// Per-block outcome; each mask has bit `j` for shift `k0 + j`.
#[derive(Debug, Clone, Copy, Default)]
struct BlockOutcome {
    class_a: u64,
    a_periodic: u64,
    b_double_periodic: u64,
    b_not_single_periodic: u64,
    b_end_null: u64,
    b_no_coincident_null: u64,
}

impl<'a> LaneBlock<'a> {
    fn new(input: &'a PackedInput, k0: usize) -> Self {
        let n = (input.period - k0).min(64);
        let lanes = if n == 64 { !0 } else { (1u64 << n) - 1 };
        LaneBlock { input, k0, lanes }
    }

    /// Input word at time `i` (1-based).
    #[inline]
    fn x(&self, i: usize) -> u64 {
        self.input.window((self.k0 + i - 1) % self.input.period)
    }

    fn run(&self, t: usize) -> Planes {
        (1..=t).fold(Planes::START, |s, i| s.step(self.x(i)))
    }

    fn classify(&self) -> u64 {
        self.run(self.input.period).null & self.lanes
    }

    /// Advances two copies from `early` and `late` for `T` steps over the
    /// same inputs (the input is `T`-periodic, so a copy started at time `mT`
    /// sees the bits of time `i` again). Returns the mask of lanes that ever
    /// differ, the mask of lanes where both were `∅` at the same step, and
    /// both end states.
    fn compare_period(&self, early: Planes, late: Planes) -> (u64, u64, Planes, Planes) {
        let (mut early, mut late) = (early, late);
        let (mut differ, mut both_null) = (0u64, 0u64);
        for i in 1..=self.input.period {
            let x = self.x(i);
            early = early.step(x);
            late = late.step(x);
            differ |= early.differ(late);
            both_null |= early.null & late.null;
        }
        (differ, both_null, early, late)
    }

    fn check_periodicity(&self) -> BlockOutcome {
        let at_t = self.run(self.input.period);
        let class_a = at_t.null & self.lanes;
        let class_b = !at_t.null & self.lanes;
        // y_{T+i} against y_i
        let (differ_1, both_null_1, _, at_2t) = self.compare_period(Planes::START, at_t);
        // y_{2T+i} against y_i, then y_{3T+i} against y_{T+i}
        let (differ_2, _, _, at_3t) = self.compare_period(Planes::START, at_2t);
        let (differ_3, _, _, _) = self.compare_period(at_t, at_3t);
        BlockOutcome {
            class_a,
            a_periodic: class_a & !differ_1,
            b_double_periodic: class_b & !(differ_2 | differ_3),
            b_not_single_periodic: class_b & differ_1,
            b_end_null: class_b & at_2t.null,
            b_no_coincident_null: class_b & !both_null_1,
        }
    }
}

fn lane_shifts(mask: u64, k0: usize) -> impl Iterator<Item = usize> {
    (0..64).filter(move |j| mask >> j & 1 == 1).map(move |j| k0 + j)
}

/// Class of every shift `0 .. T`, computed by direct simulation of each.
pub fn classify_all(x: &MSequence) -> Vec<ShiftClass> {
    let input = PackedInput::new(x.bits().as_slice());
    let t = x.period();
    let blocks: Vec<u64> = (0..t)
        .step_by(64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k0| LaneBlock::new(&input, k0).classify())
        .collect();
    (0..t)
        .map(|k| {
            if blocks[k / 64] >> (k % 64) & 1 == 1 {
                ShiftClass::A
            } else {
                ShiftClass::B
            }
        })
        .collect()
}

/// Least periods of the BSG and ABSG outputs over one state period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutputPeriods {
    /// Output bits per state period (`T_A` or `T_B`).
    pub length: usize,
    pub bsg: usize,
    pub absg: usize,
}

impl OutputPeriods {
    fn from_states(y: &[u8]) -> Self {
        let seq = StateSeq::new(y.iter().map(|&s| StateSymbol::from_index(s.into())).collect());
        let b = run_b(&seq).expect("algorithm A output");
        let c = run_c(&seq).expect("algorithm A output");
        let period = |z: &BitSeq| least_period(z.as_slice()).unwrap_or(0);
        OutputPeriods {
            length: b.len(),
            bsg: period(&b),
            absg: period(&c),
        }
    }

    pub fn has_subperiod(&self) -> bool {
        self.bsg < self.length || self.absg < self.length
    }
}

/// Exact fraction for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
    pub value: f64,
}

impl From<Ratio<u64>> for Fraction {
    fn from(r: Ratio<u64>) -> Self {
        Fraction {
            num: *r.numer(),
            den: *r.denom(),
            value: *r.numer() as f64 / *r.denom() as f64,
        }
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    /// `⌈2^L/6⌉ ≤ T_A ≤ 2^(L-1) - 1`
    pub t_a: bool,
    /// `2^(L-1) ≤ T_B ≤ 2^L - 1 - ⌈2^L/6⌉`
    pub t_b: bool,
    /// `T_z` inside [`expected_period_bounds`].
    pub t_z: bool,
    /// `9/18·2^L < T_z < 13/18·2^L`, evaluated for `L ≥ 10` only.
    pub t_z_large_l: Option<bool>,
}

impl BoundChecks {
    pub fn all(&self) -> bool {
        self.t_a && self.t_b && self.t_z && self.t_z_large_l.unwrap_or(true)
    }
}

/// `⌈2^L / 6⌉`
fn min_t_a(l: u32) -> u64 {
    (1u64 << l).div_ceil(6)
}

/// Lower and upper bound on `T_z` for degree `l`.
pub fn expected_period_bounds(l: u32) -> Result<(Ratio<u64>, Ratio<u64>)> {
    if !(2..=31).contains(&l) {
        return Err(Error::UnsupportedDegree(l));
    }
    let t = (1u64 << l) - 1;
    let half = 1u64 << (l - 1);
    let lower = Ratio::new((half - 1).pow(2) + half.pow(2), t);
    let low_a = min_t_a(l);
    let upper = Ratio::new(low_a.pow(2) + (t - low_a).pow(2), t);
    Ok((lower, upper))
}

/// The large-`L` approximation interval `(9/18·2^L, 13/18·2^L)`.
pub fn approx_period_interval(l: u32) -> (Ratio<u64>, Ratio<u64>) {
    let p = 1u64 << l;
    (Ratio::new(9 * p, 18), Ratio::new(13 * p, 18))
}

/// Average output period `(T_A² + T_B²) / (T_A + T_B)`.
pub fn average_period(t_a: u64, t_b: u64) -> Ratio<u64> {
    Ratio::new(t_a * t_a + t_b * t_b, t_a + t_b)
}

pub fn check_bounds(l: u32, t_a: u64, t_b: u64) -> BoundChecks {
    let t = (1u64 << l) - 1;
    let half = 1u64 << (l - 1);
    let low_a = min_t_a(l);
    let t_z = average_period(t_a, t_b);
    let (lo, hi) = expected_period_bounds(l).expect("degree already validated");
    let (alo, ahi) = approx_period_interval(l);
    BoundChecks {
        t_a: low_a <= t_a && t_a < half,
        t_b: half <= t_b && t_b + low_a <= t,
        t_z: lo <= t_z && t_z <= hi,
        t_z_large_l: (l >= 10).then(|| alo < t_z && t_z < ahi),
    }
}

/// Lower bound on `∅` symbols from the linear run count of `x`: every three
/// complete consecutive runs force at least one `∅`.
pub fn min_null_bound(x: &BitSeq) -> bool {
    let nulls = crate::generators::run_a(x).count(StateSymbol::Null);
    nulls >= linear_runs(x.as_slice()) / 3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    pub ceiling: u32,
    /// Classify every shift by simulation and check the predicted class sets
    /// against the result; otherwise derive the classes from one reference.
    pub exhaustive: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            ceiling: DEFAULT_CLASS_CEILING,
            exhaustive: true,
        }
    }
}

/// Shift-class structure of one primitive polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    #[serde(rename = "L")]
    pub degree: u32,
    #[serde(rename = "T")]
    pub period: usize,
    pub polynomial: String,
    pub taps: Vec<u32>,
    #[serde(rename = "T_A")]
    pub t_a: usize,
    #[serde(rename = "T_B")]
    pub t_b: usize,
    #[serde(rename = "T_z")]
    pub t_z: Fraction,
    pub class_a_shifts: Vec<usize>,
    pub class_b_shifts: Vec<usize>,
    /// Whether every shift was classified by its own simulation.
    pub exhaustive: bool,
    /// Class sets equal the `∅`-position prediction from a reference member
    /// of each class; `None` when not exhaustively checked.
    pub class_structure_verified: Option<bool>,
    pub bounds: BoundChecks,
    pub bounds_ok: bool,
    pub subperiod_found: bool,
    pub z_periods_a: Option<OutputPeriods>,
    pub z_periods_b: Option<OutputPeriods>,
}

impl ClassReport {
    pub const CSV_HEADER: [&'static str; 12] = [
        "L",
        "taps",
        "T",
        "T_A",
        "T_B",
        "T_z",
        "T_z_value",
        "bound_T_A",
        "bound_T_B",
        "bound_T_z",
        "bound_T_z_large_L",
        "subperiod_found",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.degree.to_string(),
            std::iter::once(self.degree)
                .chain(self.taps.iter().copied())
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
            self.period.to_string(),
            self.t_a.to_string(),
            self.t_b.to_string(),
            self.t_z.to_string(),
            format!("{}", self.t_z.value),
            self.bounds.t_a.to_string(),
            self.bounds.t_b.to_string(),
            self.bounds.t_z.to_string(),
            self.bounds
                .t_z_large_l
                .map(|b| b.to_string())
                .unwrap_or_default(),
            self.subperiod_found.to_string(),
        ]
    }

    /// Class sizes add up to the period and match the shift lists.
    pub fn is_consistent(&self) -> bool {
        self.t_a + self.t_b == self.period
            && self.class_a_shifts.len() == self.t_a
            && self.class_b_shifts.len() == self.t_b
    }
}

/// Shift set predicted from the reference shift `k_ref`: `(k_ref + j) mod T`
/// for every `j` in `0 .. span` with `y_j = ∅` (`y_0 = ∅` included).
fn predicted_class(y: &[u8], k_ref: usize, t: usize, span: usize) -> Vec<usize> {
    let mut set: BTreeSet<usize> = BTreeSet::new();
    set.insert(k_ref);
    for j in 1..span {
        if y[j - 1] == NULL {
            set.insert((k_ref + j) % t);
        }
    }
    set.into_iter().collect()
}

fn ensure_ceiling(config: &LfsrConfig, ceiling: u32) -> Result<()> {
    if config.degree() > ceiling {
        return Err(Error::DegreeTooLarge {
            degree: config.degree(),
            ceiling,
        });
    }
    Ok(())
}

pub fn full_report(config: &LfsrConfig) -> Result<ClassReport> {
    full_report_with(config, &ReportOptions::default())
}

pub fn full_report_with(config: &LfsrConfig, opts: &ReportOptions) -> Result<ClassReport> {
    ensure_ceiling(config, opts.ceiling)?;
    let m = MSequence::new(config.clone())?;
    let x = m.bits().as_slice();
    let t = m.period();
    let l = config.degree();

    let ref_trace = |k: usize| simulate_shift(x, k, 2 * t);
    let base = ref_trace(0);
    let base_class = if base[t - 1] == NULL {
        ShiftClass::A
    } else {
        ShiftClass::B
    };

    let (class_a, class_b, verified) = if opts.exhaustive {
        let classes = classify_all(&m);
        let pick = |c| (0..t).filter(|&k| classes[k] == c).collect::<Vec<_>>();
        let (a, b) = (pick(ShiftClass::A), pick(ShiftClass::B));
        let pred_a = a.first().map(|&k| predicted_class(&ref_trace(k), k, t, t));
        let pred_b = b.first().map(|&k| predicted_class(&ref_trace(k), k, t, 2 * t));
        let ok = pred_a.map_or(a.is_empty(), |p| p == a) && pred_b.map_or(b.is_empty(), |p| p == b);
        (a, b, Some(ok))
    } else {
        let span = match base_class {
            ShiftClass::A => t,
            ShiftClass::B => 2 * t,
        };
        let own = predicted_class(&base, 0, t, span);
        let own_set: BTreeSet<usize> = own.iter().copied().collect();
        let other: Vec<usize> = (0..t).filter(|k| !own_set.contains(k)).collect();
        match base_class {
            ShiftClass::A => (own, other, None),
            ShiftClass::B => (other, own, None),
        }
    };

    let z_a = class_a
        .first()
        .map(|&k| OutputPeriods::from_states(&ref_trace(k)[..t]));
    let z_b = class_b
        .first()
        .map(|&k| OutputPeriods::from_states(&ref_trace(k)));
    let count_nulls = |y: &[u8]| y.iter().filter(|&&s| s == NULL).count();
    let t_a = class_a.first().map_or(0, |&k| count_nulls(&ref_trace(k)[..t]));
    let t_b = class_b.first().map_or(0, |&k| count_nulls(&ref_trace(k)));

    let bounds = check_bounds(l, t_a as u64, t_b as u64);
    let subperiod_found = z_a.is_some_and(|z| z.has_subperiod()) || z_b.is_some_and(|z| z.has_subperiod());
    Ok(ClassReport {
        degree: l,
        period: t,
        polynomial: config.poly().to_string(),
        taps: config.poly().taps().to_vec(),
        t_a,
        t_b,
        t_z: average_period(t_a as u64, t_b as u64).into(),
        class_a_shifts: class_a,
        class_b_shifts: class_b,
        exhaustive: opts.exhaustive,
        class_structure_verified: verified,
        bounds_ok: bounds.all(),
        bounds,
        subperiod_found,
        z_periods_a: z_a,
        z_periods_b: z_b,
    })
}

/// Outcome of the per-shift periodicity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodicityCheck {
    pub shifts: usize,
    pub class_a: usize,
    pub class_b: usize,
    /// A members with `y_{1..T} = y_{T+1..2T}`.
    pub a_periodic: usize,
    /// B members with `y_{1..2T} = y_{2T+1..4T}`.
    pub b_double_periodic: usize,
    /// B members with `y_{1..T} != y_{T+1..2T}`.
    pub b_not_single_periodic: usize,
    /// B members with `y_{2T} = ∅`.
    pub b_end_null: usize,
    /// B members with no `i ≤ T` such that `y_i = y_{T+i} = ∅`.
    pub b_no_coincident_null: usize,
}

impl PeriodicityCheck {
    pub fn holds(&self) -> bool {
        self.class_a + self.class_b == self.shifts
            && self.a_periodic == self.class_a
            && self.b_double_periodic == self.class_b
            && self.b_not_single_periodic == self.class_b
            && self.b_end_null == self.class_b
            && self.b_no_coincident_null == self.class_b
    }
}

/// Simulates every shift for up to `4T` steps and checks the period of each
/// state sequence against its class.
pub fn verify_periodicity(config: &LfsrConfig) -> Result<PeriodicityCheck> {
    verify_periodicity_with(config, DEFAULT_CLASS_CEILING)
}

pub fn verify_periodicity_with(config: &LfsrConfig, ceiling: u32) -> Result<PeriodicityCheck> {
    ensure_ceiling(config, ceiling)?;
    let m = MSequence::new(config.clone())?;
    let input = PackedInput::new(m.bits().as_slice());
    let t = m.period();
    let outcomes: Vec<BlockOutcome> = (0..t)
        .step_by(64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k0| LaneBlock::new(&input, k0).check_periodicity())
        .collect();
    let count = |f: fn(&BlockOutcome) -> u64| -> usize {
        outcomes
            .iter()
            .enumerate()
            .map(|(b, o)| lane_shifts(f(o), b * 64).count())
            .sum()
    };
    let class_a = count(|o| o.class_a);
    Ok(PeriodicityCheck {
        shifts: t,
        class_a,
        class_b: t - class_a,
        a_periodic: count(|o| o.a_periodic),
        b_double_periodic: count(|o| o.b_double_periodic),
        b_not_single_periodic: count(|o| o.b_not_single_periodic),
        b_end_null: count(|o| o.b_end_null),
        b_no_coincident_null: count(|o| o.b_no_coincident_null),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::run_a;
    use crate::lfsr::{enumerate_primitive, primitive_table};

    fn canonical(p: &str) -> LfsrConfig {
        LfsrConfig::canonical(p.parse().unwrap()).unwrap()
    }

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    #[test]
    fn classify_shift_examples() {
        let x = bits("1001011");
        assert_eq!(classify_shift(&x, 0).unwrap(), ShiftClass::B);
        assert_eq!(classify_shift(&x, 1).unwrap(), ShiftClass::A);
        let a: Vec<usize> = (0..7)
            .filter(|&k| classify_shift(&x, k).unwrap() == ShiftClass::A)
            .collect();
        assert_eq!(a, vec![1, 3, 6]);
    }

    #[test]
    fn classify_shift_rejects_non_m_sequences() {
        assert!(matches!(classify_shift(&bits("1010101"), 0), Err(Error::NotMSequence(_))));
        assert!(matches!(classify_shift(&bits("100101"), 0), Err(Error::NotMSequence(_))));
        assert!(matches!(classify_shift(&bits("1111111"), 0), Err(Error::NotMSequence(_))));
        // period 15 from the non-primitive x^4+x^3+x^2+x+1 (cycle of length 5)
        let c = LfsrConfig::canonical("x^4+x^3+x^2+x+1".parse().unwrap()).unwrap();
        assert!(matches!(classify_shift(&c.generate(15), 0), Err(Error::NotMSequence(_))));
        assert!(classify_shift(&bits("1001011"), 7).is_err());
    }

    #[test]
    fn berlekamp_massey_recovers_table_polynomials() {
        for l in 2..=16 {
            let p = primitive_table(l).unwrap();
            let x = LfsrConfig::canonical(p.clone()).unwrap().generate(p.period());
            assert_eq!(check_m_sequence(&x).unwrap(), p);
        }
    }

    #[test]
    fn lane_classification_matches_scalar() {
        for l in 2..=10 {
            for p in enumerate_primitive(l).unwrap().into_iter().take(4) {
                let m = MSequence::new(LfsrConfig::canonical(p).unwrap()).unwrap();
                let lanes = classify_all(&m);
                for (k, c) in lanes.iter().enumerate() {
                    assert_eq!(*c, classify_unchecked(m.bits().as_slice(), k));
                }
            }
        }
    }

    #[test]
    fn degree_three_report() {
        let r = full_report(&canonical("x^3+x+1")).unwrap();
        assert_eq!((r.t_a, r.t_b), (3, 4));
        assert_eq!((r.t_z.num, r.t_z.den), (25, 7));
        assert_eq!(r.class_a_shifts, vec![1, 3, 6]);
        assert_eq!(r.class_b_shifts, vec![0, 2, 4, 5]);
        assert_eq!(r.class_structure_verified, Some(true));
        assert!(r.bounds_ok && r.is_consistent());
        assert_eq!(r.bounds.t_z_large_l, None);
        assert!(!r.subperiod_found);
    }

    #[test]
    fn fast_path_agrees_with_exhaustive() {
        for l in 3..=12 {
            let c = LfsrConfig::canonical(primitive_table(l).unwrap()).unwrap();
            let slow = full_report(&c).unwrap();
            let fast = full_report_with(&c, &ReportOptions { exhaustive: false, ..Default::default() }).unwrap();
            assert_eq!(fast.class_a_shifts, slow.class_a_shifts);
            assert_eq!((fast.t_a, fast.t_b), (slow.t_a, slow.t_b));
            assert_eq!(fast.class_structure_verified, None);
        }
    }

    #[test]
    fn ceiling_is_enforced() {
        let c = LfsrConfig::canonical(primitive_table(17).unwrap()).unwrap();
        assert!(matches!(full_report(&c), Err(Error::DegreeTooLarge { .. })));
        let c = LfsrConfig::canonical(primitive_table(5).unwrap()).unwrap();
        let opts = ReportOptions { ceiling: 4, exhaustive: true };
        assert!(matches!(full_report_with(&c, &opts), Err(Error::DegreeTooLarge { .. })));
    }

    #[test]
    fn non_primitive_report_is_rejected() {
        assert!(matches!(full_report(&canonical("x^4+x^2+1")), Err(Error::NotMSequence(_))));
    }

    #[test]
    fn periodicity_degree_three() {
        let c = verify_periodicity(&canonical("x^3+x+1")).unwrap();
        assert!(c.holds(), "{c:?}");
        assert_eq!((c.class_a, c.class_b), (3, 4));
    }

    /// Scalar reimplementation of the periodicity check, shift by shift.
    #[test]
    fn lane_periodicity_matches_scalar() {
        for l in 3..=9 {
            let cfg = LfsrConfig::canonical(primitive_table(l).unwrap()).unwrap();
            let lanes = verify_periodicity(&cfg).unwrap();
            let x = cfg.generate(cfg.period());
            let t = x.len();
            let (mut a, mut b) = (0, 0);
            for k in 0..t {
                let xk = x.shift(k).unwrap();
                let y = run_a(&xk.concat(&xk).concat(&xk).concat(&xk));
                let y = y.as_slice();
                if y[t - 1].is_null() {
                    assert_eq!(y[..t], y[t..2 * t]);
                    a += 1;
                } else {
                    assert_eq!(y[..2 * t], y[2 * t..]);
                    assert_ne!(y[..t], y[t..2 * t]);
                    assert!(y[2 * t - 1].is_null());
                    assert!((0..t).all(|i| !(y[i].is_null() && y[t + i].is_null())));
                    b += 1;
                }
            }
            assert_eq!((lanes.class_a, lanes.class_b), (a, b));
            assert!(lanes.holds());
        }
    }

    #[test]
    fn expected_period_bounds_examples() {
        let (lo, hi) = expected_period_bounds(3).unwrap();
        assert_eq!(lo, Ratio::new(25, 7));
        assert_eq!(hi, Ratio::new(29, 7));
        for l in 2..=31 {
            let (lo, hi) = expected_period_bounds(l).unwrap();
            assert!(lo <= hi);
        }
        let p = (1u64 << 20) as f64;
        let (lo, hi) = expected_period_bounds(20).unwrap();
        let norm = |r: Ratio<u64>| *r.numer() as f64 / *r.denom() as f64 / p;
        assert!((norm(lo) - 9.0 / 18.0).abs() < 1e-5);
        assert!((norm(hi) - 13.0 / 18.0).abs() < 1e-5);
        assert!(expected_period_bounds(1).is_err());
    }

    #[test]
    fn bounds_degree_three() {
        let b = check_bounds(3, 3, 4);
        assert!(b.t_a && b.t_b && b.t_z);
        assert!(!check_bounds(3, 1, 6).t_a);
        assert!(!check_bounds(3, 4, 3).t_b);
    }

    #[test]
    fn min_null_bound_examples() {
        assert!(min_null_bound(&bits("1001011")));
        assert!(min_null_bound(&bits("1111111")));
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let x = BitSeq::from_bools((0..10_000).map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state & 1 == 1
        }));
        assert!(min_null_bound(&x));
    }

    #[test]
    fn output_periods_match_class_sizes() {
        for l in 3..=12 {
            let r = full_report(&LfsrConfig::canonical(primitive_table(l).unwrap()).unwrap()).unwrap();
            let (za, zb) = (r.z_periods_a.unwrap(), r.z_periods_b.unwrap());
            assert_eq!(za.length, r.t_a);
            assert_eq!(zb.length, r.t_b);
            assert_eq!(r.t_a % za.bsg, 0);
            assert_eq!(r.t_b % zb.absg, 0);
        }
    }

    #[test]
    fn report_serializes_with_documented_names() {
        let r = full_report(&canonical("x^3+x+1")).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["T_A"], 3);
        assert_eq!(v["T_B"], 4);
        assert_eq!(v["T_z"]["num"], 25);
        assert_eq!(v["L"], 3);
        assert_eq!(r.csv_record().len(), ClassReport::CSV_HEADER.len());
        assert_eq!(r.csv_record()[1], "3,1,0");
    }
}
