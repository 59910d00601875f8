//! Sequence primitives: binary sequences, three-valued state sequences, cyclic
//! shifts, symbol weights and least periods.
//!
//! Every "period" operation here treats the stored slice as exactly one period
//! of an infinite periodic sequence.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Rotate left by `k`: the result `r` satisfies `r[n] = s[(n + k) mod len]`.
pub fn shift<T: Clone>(s: &[T], k: usize) -> Result<Vec<T>> {
    if s.is_empty() {
        return Err(Error::EmptySequence);
    }
    let k = k % s.len();
    let mut out = Vec::with_capacity(s.len());
    out.extend_from_slice(&s[k..]);
    out.extend_from_slice(&s[..k]);
    Ok(out)
}

/// Number of positions holding `c`.
pub fn count_symbol<T: PartialEq>(s: &[T], c: &T) -> usize {
    s.iter().filter(|v| *v == c).count()
}

/// Smallest `p` dividing `s.len()` with `s[j] == s[(j + p) mod len]` for all `j`.
pub fn least_period<T: PartialEq>(s: &[T]) -> Result<usize> {
    let n = s.len();
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    for p in 1..n {
        // for a divisor p the cyclic condition reduces to the linear one
        if n.is_multiple_of(p) && s[..n - p] == s[p..] {
            return Ok(p);
        }
    }
    Ok(n)
}

/// Number of maximal equal-symbol blocks when `s` is read cyclically.
///
/// A constant sequence has one run.
pub fn cyclic_runs<T: PartialEq>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let changes = (0..n).filter(|&j| s[j] != s[(j + 1) % n]).count();
    changes.max(1)
}

/// Number of maximal equal-symbol blocks in the linear (non-wrapping) reading.
pub fn linear_runs<T: PartialEq>(s: &[T]) -> usize {
    if s.is_empty() {
        return 0;
    }
    1 + s.windows(2).filter(|w| w[0] != w[1]).count()
}

/// The internal state alphabet `{∅, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateSymbol {
    /// `∅`: a block just completed, one output bit is emitted.
    Null,
    Zero,
    One,
}

impl StateSymbol {
    pub const ALL: [StateSymbol; 3] = [StateSymbol::Null, StateSymbol::Zero, StateSymbol::One];

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            StateSymbol::Zero
        } else {
            StateSymbol::One
        }
    }

    pub fn as_bit(self) -> Option<u8> {
        match self {
            StateSymbol::Null => None,
            StateSymbol::Zero => Some(0),
            StateSymbol::One => Some(1),
        }
    }

    pub fn is_null(self) -> bool {
        self == StateSymbol::Null
    }

    /// Dense index: `∅ → 0`, `0 → 1`, `1 → 2`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    /// Text form used in state dumps; `∅` is rendered as `-`.
    pub fn to_char(self) -> char {
        match self {
            StateSymbol::Null => '-',
            StateSymbol::Zero => '0',
            StateSymbol::One => '1',
        }
    }
}

impl fmt::Display for StateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A finite binary sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSeq {
    bits: Vec<u8>,
}

impl BitSeq {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(b));
        }
        Ok(BitSeq { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitSeq {
            bits: bits.into_iter().map(u8::from).collect(),
        }
    }

    /// Caller guarantees every element is 0 or 1.
    pub(crate) fn from_vec_unchecked(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitSeq { bits }
    }

    pub fn empty() -> Self {
        BitSeq::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<u8> {
        self.bits.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn shift(&self, k: usize) -> Result<Self> {
        shift(&self.bits, k).map(BitSeq::from_vec_unchecked)
    }

    pub fn count(&self, bit: u8) -> usize {
        count_symbol(&self.bits, &bit)
    }

    pub fn least_period(&self) -> Result<usize> {
        least_period(&self.bits)
    }

    pub fn concat(&self, other: &BitSeq) -> BitSeq {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitSeq { bits }
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    /// Parses `0`/`1` characters; ASCII whitespace and `,` separators are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_ascii_whitespace() || c == ',' => {}
                c => {
                    return Err(Error::InvalidBitString(c.to_string()))
                }
            }
        }
        Ok(BitSeq { bits })
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl From<BitSeq> for Vec<u8> {
    fn from(s: BitSeq) -> Self {
        s.bits
    }
}

/// A state sequence `y_1 .. y_N` together with its initial condition `y_0`.
///
/// Sequences produced by [`crate::generators::run_a`] always start from
/// `y_0 = ∅`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSeq {
    initial: StateSymbol,
    symbols: Vec<StateSymbol>,
}

impl StateSeq {
    pub fn new(symbols: Vec<StateSymbol>) -> Self {
        StateSeq {
            initial: StateSymbol::Null,
            symbols,
        }
    }

    pub fn with_initial(initial: StateSymbol, symbols: Vec<StateSymbol>) -> Self {
        StateSeq { initial, symbols }
    }

    pub fn initial(&self) -> StateSymbol {
        self.initial
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn as_slice(&self) -> &[StateSymbol] {
        &self.symbols
    }

    /// 1-based access matching `y_i`; `at(0)` is the initial condition.
    pub fn at(&self, i: usize) -> Option<StateSymbol> {
        if i == 0 {
            Some(self.initial)
        } else {
            self.symbols.get(i - 1).copied()
        }
    }

    /// 1-based positions `i` with `y_i = ∅`.
    pub fn null_positions(&self) -> Vec<usize> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_null())
            .map(|(j, _)| j + 1)
            .collect()
    }

    pub fn count(&self, c: StateSymbol) -> usize {
        count_symbol(&self.symbols, &c)
    }

    pub fn shift(&self, k: usize) -> Result<Self> {
        Ok(StateSeq {
            initial: self.initial,
            symbols: shift(&self.symbols, k)?,
        })
    }

    pub fn least_period(&self) -> Result<usize> {
        least_period(&self.symbols)
    }
}

impl FromStr for StateSeq {
    type Err = Error;

    /// Parses `-`/`0`/`1`; `-` stands for `∅`.
    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .filter(|c| !c.is_ascii_whitespace())
            .map(|c| match c {
                '-' => Ok(StateSymbol::Null),
                '0' => Ok(StateSymbol::Zero),
                '1' => Ok(StateSymbol::One),
                c => Err(Error::InvalidStateSequence(format!("unknown symbol `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StateSeq::new(symbols))
    }
}

impl fmt::Display for StateSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    #[test]
    fn shift_examples() {
        let s = bits("1001011");
        assert_eq!(s.shift(0).unwrap(), s);
        assert_eq!(s.shift(2).unwrap(), bits("0101110"));
        assert_eq!(s.shift(7).unwrap(), s);
        assert_eq!(BitSeq::empty().shift(1), Err(Error::EmptySequence));
    }

    #[test]
    fn count_examples() {
        assert_eq!(bits("1001011").count(1), 4);
        assert_eq!(BitSeq::empty().count(0), 0);
        let y: StateSeq = "-0-".parse().unwrap();
        assert_eq!(y.count(StateSymbol::Null), 2);
    }

    #[test]
    fn least_period_examples() {
        assert_eq!(bits("1010").least_period().unwrap(), 2);
        assert_eq!(bits("1001011").least_period().unwrap(), 7);
        assert_eq!(bits("111").least_period().unwrap(), 1);
        assert_eq!(BitSeq::empty().least_period(), Err(Error::EmptySequence));
        // 4 is not a divisor of 6 even though a prefix repeats
        assert_eq!(least_period(&[1, 0, 0, 1, 1, 0]).unwrap(), 6);
    }

    #[test]
    fn runs() {
        assert_eq!(cyclic_runs(&[1, 0, 0, 1, 0, 1, 1]), 4);
        assert_eq!(cyclic_runs(&[1, 0]), 2);
        assert_eq!(cyclic_runs(&[1, 1, 1]), 1);
        assert_eq!(linear_runs(&[1, 0, 0, 1, 0, 1, 1]), 5);
        assert_eq!(linear_runs::<u8>(&[]), 0);
    }

    #[test]
    fn rejects_non_binary() {
        assert_eq!(BitSeq::new(vec![0, 2]), Err(Error::InvalidBit(2)));
        assert!("10x".parse::<BitSeq>().is_err());
    }

    #[test]
    fn state_seq_text_round_trip() {
        let y: StateSeq = "111-000".parse().unwrap();
        assert_eq!(y.to_string(), "111-000");
        assert_eq!(y.null_positions(), vec![4]);
        assert_eq!(y.at(0), Some(StateSymbol::Null));
        assert_eq!(y.at(4), Some(StateSymbol::Null));
    }

    proptest! {
        #[test]
        fn shifts_compose(v in prop::collection::vec(0u8..2, 1..64), a in 0usize..200, b in 0usize..200) {
            let once = shift(&shift(&v, a).unwrap(), b).unwrap();
            prop_assert_eq!(once, shift(&v, a + b).unwrap());
        }

        #[test]
        fn weight_is_shift_invariant(v in prop::collection::vec(0u8..2, 1..64), k in 0usize..100) {
            let s = shift(&v, k).unwrap();
            prop_assert_eq!(count_symbol(&s, &1), count_symbol(&v, &1));
        }

        #[test]
        fn least_period_divides_and_repeats(unit in prop::collection::vec(0u8..2, 1..12), reps in 1usize..6) {
            let v: Vec<u8> = unit.iter().copied().cycle().take(unit.len() * reps).collect();
            let p = least_period(&v).unwrap();
            prop_assert_eq!(v.len() % p, 0);
            prop_assert!(unit.len() % p == 0);
            prop_assert_eq!(shift(&v, p).unwrap(), v);
        }
    }
}
