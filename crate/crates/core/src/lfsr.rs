//! Fibonacci-form LFSRs over GF(2) and their maximal-length sequences.
//!
//! A feedback polynomial `x^L + Σ x^t` (taps `t < L`, constant term included)
//! drives the recurrence `s[n + L] = XOR_{t in taps} s[n + t]`, and the output
//! stream is `s[0], s[1], ...` with the initial state `s[0..L]`.
//!
//! Primitivity is decided by walking the state cycle, never by factoring.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seqcore::{cyclic_runs, BitSeq};

/// Default register-length ceiling for generation and primitivity checks.
pub const DEFAULT_MAX_DEGREE: u32 = 24;

/// A feedback polynomial: the leading degree plus the lower exponents present.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    degree: u32,
    /// Exponents below `degree`, strictly descending.
    taps: Vec<u32>,
}

impl Polynomial {
    pub fn new(degree: u32, taps: impl IntoIterator<Item = u32>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidPolynomial {
                token: degree.to_string(),
                reason: "degree must be at least 2".into(),
            });
        }
        if degree > 31 {
            return Err(Error::UnsupportedDegree(degree));
        }
        let mut taps: Vec<u32> = taps.into_iter().collect();
        if let Some(&t) = taps.iter().find(|&&t| t >= degree) {
            return Err(Error::InvalidPolynomial {
                token: t.to_string(),
                reason: format!("tap exponent must be below the degree {degree}"),
            });
        }
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        Ok(Polynomial { degree, taps })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn has_constant_term(&self) -> bool {
        self.taps.last() == Some(&0)
    }

    /// Bit `t` set for every tap exponent `t`.
    pub(crate) fn tap_mask(&self) -> u32 {
        self.taps.iter().fold(0, |m, &t| m | (1 << t))
    }

    /// The period of an m-sequence of this degree, `2^L - 1`.
    pub fn period(&self) -> usize {
        (1usize << self.degree) - 1
    }

    /// Tap-list text form, e.g. `3,1,0`.
    pub fn tap_list(&self) -> String {
        std::iter::once(self.degree)
            .chain(self.taps.iter().copied())
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn parse_exponent(term: &str) -> Result<u32> {
        let bad = |reason: &str| Error::InvalidPolynomial {
            token: term.to_string(),
            reason: reason.to_string(),
        };
        match term {
            "1" => Ok(0),
            "x" => Ok(1),
            t => {
                let e = t
                    .strip_prefix("x^")
                    .ok_or_else(|| bad("expected `1`, `x` or `x^k`"))?;
                e.parse::<u32>().map_err(|_| bad("exponent is not an integer"))
            }
        }
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Accepts `x^3+x+1` or the tap-list form `3,1,0` (degree first).
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::InvalidPolynomial {
                token: String::new(),
                reason: "empty polynomial".into(),
            });
        }
        let exponents: Vec<u32> = if s.contains('x') {
            s.split('+')
                .map(Polynomial::parse_exponent)
                .collect::<Result<_>>()?
        } else {
            s.split(',')
                .map(|t| {
                    t.parse::<u32>().map_err(|_| Error::InvalidPolynomial {
                        token: t.to_string(),
                        reason: "tap list entries must be nonnegative integers".into(),
                    })
                })
                .collect::<Result<_>>()?
        };
        let degree = *exponents.iter().max().expect("split yields at least one term");
        let mut seen = std::collections::HashSet::new();
        for &e in &exponents {
            if !seen.insert(e) {
                return Err(Error::InvalidPolynomial {
                    token: e.to_string(),
                    reason: "repeated exponent".into(),
                });
            }
        }
        Polynomial::new(degree, exponents.into_iter().filter(|&e| e != degree))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{}", self.degree)?;
        for &t in &self.taps {
            match t {
                0 => write!(f, "+1")?,
                1 => write!(f, "+x")?,
                t => write!(f, "+x^{t}")?,
            }
        }
        Ok(())
    }
}

/// A validated register configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LfsrConfig {
    poly: Polynomial,
    initial_state: BitSeq,
}

impl LfsrConfig {
    pub fn new(poly: Polynomial, initial_state: BitSeq) -> Result<Self> {
        Self::with_ceiling(poly, initial_state, DEFAULT_MAX_DEGREE)
    }

    pub fn with_ceiling(poly: Polynomial, initial_state: BitSeq, max_degree: u32) -> Result<Self> {
        let l = poly.degree();
        if l > max_degree {
            return Err(Error::DegreeTooLarge {
                degree: l,
                ceiling: max_degree,
            });
        }
        if !poly.has_constant_term() {
            return Err(Error::InvalidConfig(format!(
                "{poly} has no constant term"
            )));
        }
        if initial_state.len() != l as usize {
            return Err(Error::InvalidConfig(format!(
                "initial state has {} bits, register length is {l}",
                initial_state.len()
            )));
        }
        if initial_state.count(1) == 0 {
            return Err(Error::DegenerateState);
        }
        Ok(LfsrConfig {
            poly,
            initial_state,
        })
    }

    /// Register seeded with `1, 0, ..., 0`.
    pub fn canonical(poly: Polynomial) -> Result<Self> {
        let mut seed = vec![0u8; poly.degree() as usize];
        if let Some(first) = seed.first_mut() {
            *first = 1;
        }
        Self::new(poly, BitSeq::from_vec_unchecked(seed))
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn initial_state(&self) -> &BitSeq {
        &self.initial_state
    }

    pub fn period(&self) -> usize {
        self.poly.period()
    }

    fn packed_state(&self) -> u32 {
        self.initial_state
            .iter()
            .enumerate()
            .fold(0, |acc, (i, b)| acc | (u32::from(b) << i))
    }

    /// First `n` output bits.
    pub fn generate(&self, n: usize) -> BitSeq {
        let mut reg = Register::new(&self.poly, self.packed_state());
        BitSeq::from_vec_unchecked((0..n).map(|_| reg.next_bit()).collect())
    }
}

/// Fibonacci register; bit `i` of `state` holds `s[n + i]`.
#[derive(Debug, Clone, Copy)]
struct Register {
    state: u32,
    mask: u32,
    top: u32,
}

impl Register {
    fn new(poly: &Polynomial, state: u32) -> Self {
        Register {
            state,
            mask: poly.tap_mask(),
            top: poly.degree() - 1,
        }
    }

    #[inline]
    fn advance(&mut self) {
        let fb = (self.state & self.mask).count_ones() & 1;
        self.state = (self.state >> 1) | (fb << self.top);
    }

    #[inline]
    fn next_bit(&mut self) -> u8 {
        let out = (self.state & 1) as u8;
        self.advance();
        out
    }
}

/// Free-function form of [`LfsrConfig::generate`].
pub fn generate(config: &LfsrConfig, n: usize) -> BitSeq {
    config.generate(n)
}

/// True iff the state cycle through any nonzero state has length `2^L - 1`.
pub fn verify_maximal(poly: &Polynomial) -> bool {
    verify_maximal_with_ceiling(poly, DEFAULT_MAX_DEGREE)
}

pub fn verify_maximal_with_ceiling(poly: &Polynomial, max_degree: u32) -> bool {
    if poly.degree() > max_degree || !poly.has_constant_term() {
        // without the constant term the state map is not invertible
        return false;
    }
    let period = poly.period();
    let mut reg = Register::new(poly, 1);
    let mut steps = 0usize;
    loop {
        reg.advance();
        steps += 1;
        if reg.state == 1 {
            return steps == period;
        }
        if steps > period {
            return false;
        }
    }
}

/// Cyclic run count; an m-sequence period of degree `L` has `2^(L-1)` runs.
pub fn count_runs(s: &BitSeq) -> usize {
    cyclic_runs(s.as_slice())
}

/// One full period of a maximal-length sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSequence {
    period_bits: BitSeq,
    config: LfsrConfig,
}

impl MSequence {
    pub fn new(config: LfsrConfig) -> Result<Self> {
        if !verify_maximal(config.poly()) {
            return Err(Error::NotMSequence(format!(
                "{} is not primitive",
                config.poly()
            )));
        }
        let period_bits = config.generate(config.period());
        Ok(MSequence {
            period_bits,
            config,
        })
    }

    pub fn bits(&self) -> &BitSeq {
        &self.period_bits
    }

    pub fn config(&self) -> &LfsrConfig {
        &self.config
    }

    pub fn period(&self) -> usize {
        self.period_bits.len()
    }
}

/// One known primitive polynomial per degree, as tap lists `(L, taps...)`.
const PRIMITIVE_TABLE: &[&[u32]] = &[
    &[2, 1, 0],
    &[3, 1, 0],
    &[4, 1, 0],
    &[5, 2, 0],
    &[6, 1, 0],
    &[7, 1, 0],
    &[8, 4, 3, 2, 0],
    &[9, 4, 0],
    &[10, 3, 0],
    &[11, 2, 0],
    &[12, 6, 4, 1, 0],
    &[13, 4, 3, 1, 0],
    &[14, 10, 6, 1, 0],
    &[15, 1, 0],
    &[16, 12, 3, 1, 0],
    &[17, 3, 0],
    &[18, 7, 0],
    &[19, 5, 2, 1, 0],
    &[20, 3, 0],
    &[21, 2, 0],
    &[22, 1, 0],
    &[23, 5, 0],
    &[24, 7, 2, 1, 0],
];

/// Embedded primitive polynomial for degree `l` (`2 ≤ l ≤ 24`).
pub fn primitive_table(l: u32) -> Result<Polynomial> {
    let entry = PRIMITIVE_TABLE
        .iter()
        .find(|e| e[0] == l)
        .ok_or(Error::UnsupportedDegree(l))?;
    Polynomial::new(l, entry[1..].iter().copied())
}

/// Every primitive polynomial of degree `l`, found by enumerating tap sets
/// with a constant term and filtering with [`verify_maximal`].
///
/// Sorted by tap list. The search costs `2^(l-1)` cycle walks of up to
/// `2^l - 1` steps each.
pub fn enumerate_primitive(l: u32) -> Result<Vec<Polynomial>> {
    if !(2..=DEFAULT_MAX_DEGREE).contains(&l) {
        return Err(Error::UnsupportedDegree(l));
    }
    let middle = l - 1;
    let mut found: Vec<Polynomial> = (0u32..(1 << middle))
        .into_par_iter()
        .filter_map(|bits| {
            let taps = (1..l).filter(|t| bits >> (t - 1) & 1 == 1).chain([0]);
            let poly = Polynomial::new(l, taps).expect("exponents below degree");
            verify_maximal(&poly).then_some(poly)
        })
        .collect();
    found.sort();
    Ok(found)
}
