//! The BSG/ABSG generators in both forms.
//!
//! The direct form parses the input into blocks `(a, b^i, a)` with `b = !a`
//! and emits one bit per completed block. The two-step form runs the
//! three-state machine `M` (algorithm A) and then applies an emission rule
//! (B for BSG, C for ABSG) at every `∅` state.
//!
//! | `y[i-1]` \ `x[i]` | 0 | 1 |
//! |-------------------|---|---|
//! | `∅`               | 0 | 1 |
//! | `0`               | ∅ | 0 |
//! | `1`               | 1 | ∅ |
//!
//! For a fixed input bit `M(., x)` is a bijection on `{∅, 0, 1}`, so every
//! input block acts on the state alphabet as an element of `S3`
//! ([`as_permutation`]).

use std::fmt;

use crate::error::{Error, Result};
use crate::seqcore::{BitSeq, StateSeq, StateSymbol};

/// Transition table indexed by `[state index][input bit]`, states as in
/// [`StateSymbol::index`].
pub(crate) const STEP: [[u8; 2]; 3] = [[1, 2], [0, 1], [2, 0]];

/// Dense index of `∅`.
pub(crate) const NULL: u8 = 0;

/// One transition `M(y_prev, x)`.
pub fn step(y_prev: StateSymbol, x: u8) -> StateSymbol {
    StateSymbol::from_index(STEP[y_prev.index()][usize::from(x & 1)] as usize)
}

/// Algorithm A from `y_0 = ∅`.
pub fn run_a(x: &BitSeq) -> StateSeq {
    let mut y = StateSymbol::Null;
    let symbols = x
        .iter()
        .map(|b| {
            y = step(y, b);
            y
        })
        .collect();
    StateSeq::new(symbols)
}

/// `M^j(y0, x)`: the state after feeding all of `x` starting from `y0`.
pub fn iterate_m(y0: StateSymbol, x: &[u8]) -> StateSymbol {
    x.iter().fold(y0, |y, &b| step(y, b))
}

/// Walks the `∅` positions of `y`, yielding `(y[i-2], y[i-1])` for each.
fn emissions(y: &StateSeq) -> Result<Vec<(StateSymbol, u8)>> {
    let mut out = Vec::with_capacity(y.len() / 2);
    for i in 1..=y.len() {
        if y.at(i) != Some(StateSymbol::Null) {
            continue;
        }
        let prev = y.at(i - 1).expect("i - 1 >= 0");
        let Some(prev_bit) = prev.as_bit() else {
            return Err(Error::InvalidStateSequence(format!(
                "consecutive ∅ at positions {} and {i}",
                i - 1
            )));
        };
        // i >= 2 here: i == 1 would need y_0 != ∅, which leaves y_{-1} undefined
        let before = if i >= 2 {
            y.at(i - 2).expect("in range")
        } else {
            return Err(Error::InvalidStateSequence(
                "∅ at position 1 has no predecessor pair".into(),
            ));
        };
        out.push((before, prev_bit));
    }
    Ok(out)
}

/// Emission rule B (BSG): `0` when `y[i-2] = ∅`, else `1`.
pub fn run_b(y: &StateSeq) -> Result<BitSeq> {
    Ok(BitSeq::from_vec_unchecked(
        emissions(y)?
            .into_iter()
            .map(|(before, _)| u8::from(!before.is_null()))
            .collect(),
    ))
}

/// Emission rule C (ABSG): `y[i-1]` when `y[i-2] = ∅`, else its complement.
pub fn run_c(y: &StateSeq) -> Result<BitSeq> {
    Ok(BitSeq::from_vec_unchecked(
        emissions(y)?
            .into_iter()
            .map(|(before, prev)| if before.is_null() { prev } else { prev ^ 1 })
            .collect(),
    ))
}

/// First two bits of every complete block `(a, b^i, a)` in order.
fn block_heads(x: &[u8]) -> Vec<(u8, u8)> {
    let mut heads = Vec::with_capacity(x.len() / 2);
    let mut p = 0;
    while p + 1 < x.len() {
        let a = x[p];
        let second = x[p + 1];
        let end = if second == a {
            p + 1
        } else {
            match x[p + 2..].iter().position(|&b| b == a) {
                Some(off) => p + 2 + off,
                // trailing incomplete block
                None => break,
            }
        };
        heads.push((a, second));
        p = end + 1;
    }
    heads
}

/// BSG by block partitioning: `0` for a block `(a, a)`, `1` otherwise.
pub fn bsg_direct(x: &BitSeq) -> BitSeq {
    BitSeq::from_vec_unchecked(
        block_heads(x.as_slice())
            .into_iter()
            .map(|(a, b)| a ^ b)
            .collect(),
    )
}

/// ABSG by block partitioning: the second bit of each block.
pub fn absg_direct(x: &BitSeq) -> BitSeq {
    BitSeq::from_vec_unchecked(
        block_heads(x.as_slice())
            .into_iter()
            .map(|(_, b)| b)
            .collect(),
    )
}

/// BSG as the composition B∘A.
pub fn bsg(x: &BitSeq) -> BitSeq {
    run_b(&run_a(x)).expect("algorithm A never emits consecutive ∅")
}

/// ABSG as the composition C∘A.
pub fn absg(x: &BitSeq) -> BitSeq {
    run_c(&run_a(x)).expect("algorithm A never emits consecutive ∅")
}

/// An ordered arrangement of the three state symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateTriple([StateSymbol; 3]);

impl StateTriple {
    pub fn new(entries: [StateSymbol; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for e in entries {
            seen[e.index()] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(StateTriple(entries))
        } else {
            Err(Error::InvalidConfig(format!(
                "{}{}{} is not an arrangement of ∅, 0, 1",
                entries[0], entries[1], entries[2]
            )))
        }
    }

    /// `(∅, 0, 1)`.
    pub fn reference() -> Self {
        StateTriple(StateSymbol::ALL)
    }

    /// All six arrangements.
    pub fn all() -> [StateTriple; 6] {
        Perm3::all().map(|p| StateTriple(p.image().map(|k| StateSymbol::from_index(usize::from(k)))))
    }

    pub fn entries(&self) -> [StateSymbol; 3] {
        self.0
    }
}

/// Componentwise `M^j`; stays an arrangement because each step is a bijection.
pub fn triple_map(s: &StateTriple, x: &[u8]) -> StateTriple {
    StateTriple(s.0.map(|e| iterate_m(e, x)))
}

/// An element of `S3`, stored as the images of `0, 1, 2`.
///
/// Acting on state symbols, index `k` stands for [`StateSymbol::from_index`]`(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm3 {
    image: [u8; 3],
}

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3 { image: [0, 1, 2] };

    pub fn new(image: [u8; 3]) -> Result<Self> {
        let mut sorted = image;
        sorted.sort_unstable();
        if sorted == [0, 1, 2] {
            Ok(Perm3 { image })
        } else {
            Err(Error::InvalidConfig(format!("{image:?} is not a permutation of 0..3")))
        }
    }

    pub fn all() -> [Perm3; 6] {
        [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]
        .map(|image| Perm3 { image })
    }

    pub fn image(&self) -> [u8; 3] {
        self.image
    }

    pub fn apply(&self, k: usize) -> usize {
        usize::from(self.image[k])
    }

    pub fn apply_symbol(&self, s: StateSymbol) -> StateSymbol {
        StateSymbol::from_index(self.apply(s.index()))
    }

    /// Entrywise action on a triple.
    pub fn act(&self, s: &StateTriple) -> StateTriple {
        StateTriple(s.0.map(|e| self.apply_symbol(e)))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm3) -> Perm3 {
        Perm3 {
            image: other.image.map(|k| self.image[usize::from(k)]),
        }
    }

    pub fn inverse(&self) -> Perm3 {
        let mut image = [0u8; 3];
        for (k, &v) in self.image.iter().enumerate() {
            image[usize::from(v)] = k as u8;
        }
        Perm3 { image }
    }

    pub fn is_even(&self) -> bool {
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| self.image[i] > self.image[j])
            .count();
        inversions % 2 == 0
    }

    pub fn order(&self) -> u32 {
        let mut p = *self;
        let mut n = 1;
        while p != Perm3::IDENTITY {
            p = p.compose(self);
            n += 1;
        }
        n
    }

    /// The same action read as a rearrangement of the positions of `s`:
    /// result position `i` receives the entry `s` holds at position `π(i)`.
    ///
    /// Conjugate to `self`, hence the same order and parity.
    pub fn on_positions(&self, s: &StateTriple) -> Perm3 {
        let moved = self.act(s);
        let mut image = [0u8; 3];
        for (i, e) in moved.0.iter().enumerate() {
            image[i] = s.0.iter().position(|v| v == e).expect("arrangement") as u8;
        }
        Perm3 { image }
    }
}

impl fmt::Display for Perm3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |k: u8| StateSymbol::from_index(usize::from(k));
        write!(
            f,
            "(∅→{}, 0→{}, 1→{})",
            s(self.image[0]),
            s(self.image[1]),
            s(self.image[2])
        )
    }
}

/// The element of `S3` that a fixed input block applies to the state alphabet.
///
/// Probed on the reference arrangement `(∅, 0, 1)` and checked against all six.
pub fn as_permutation(x: &[u8]) -> Perm3 {
    let probe = triple_map(&StateTriple::reference(), x);
    let perm = Perm3 {
        image: probe.0.map(|e| e.index() as u8),
    };
    for s in StateTriple::all() {
        assert_eq!(
            triple_map(&s, x),
            perm.act(&s),
            "input block does not act as a symbol permutation"
        );
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;
    use StateSymbol::{Null as E, One as I, Zero as O};

    /// Concatenation of the eleven blocks of the worked example.
    pub(crate) const TOY: &str = "101011001011100001001101001010010110";

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    fn ys(s: &str) -> StateSeq {
        s.parse().unwrap()
    }

    #[test]
    fn transition_table() {
        assert_eq!(step(E, 0), O);
        assert_eq!(step(E, 1), I);
        assert_eq!(step(O, 0), E);
        assert_eq!(step(O, 1), O);
        assert_eq!(step(I, 0), I);
        assert_eq!(step(I, 1), E);
    }

    #[test]
    fn run_a_examples() {
        assert_eq!(run_a(&bits("1001011")), ys("111-000"));
        assert!(run_a(&BitSeq::empty()).is_empty());
        assert_eq!(run_a(&bits("00")), ys("0-"));
    }

    #[test]
    fn toy_example_both_forms() {
        let x = bits(TOY);
        assert_eq!(x.len(), 36);
        assert_eq!(bsg_direct(&x).to_string(), "11101001111");
        assert_eq!(absg_direct(&x).to_string(), "01110011101");
        let y = run_a(&x);
        assert_eq!(run_b(&y).unwrap().to_string(), "11101001111");
        assert_eq!(run_c(&y).unwrap().to_string(), "01110011101");
    }

    #[test]
    fn emission_edge_cases() {
        assert!(run_b(&ys("0101")).unwrap().is_empty());
        assert!(run_c(&ys("0101")).unwrap().is_empty());
        let y = run_a(&bits("0000"));
        assert_eq!(y, ys("0-0-"));
        assert_eq!(run_b(&y).unwrap().to_string(), "00");
        assert_eq!(run_c(&y).unwrap().to_string(), "00");
    }

    #[test]
    fn malformed_state_sequences() {
        assert!(matches!(run_b(&ys("0--")), Err(Error::InvalidStateSequence(_))));
        assert!(matches!(run_c(&ys("-0")), Err(Error::InvalidStateSequence(_))));
    }

    #[test]
    fn direct_form_edge_cases() {
        assert_eq!(bsg_direct(&bits("00")).to_string(), "0");
        assert_eq!(absg_direct(&bits("00")).to_string(), "0");
        assert!(bsg_direct(&bits("1")).is_empty());
        assert!(absg_direct(&bits("0111")).is_empty());
        assert!(bsg_direct(&BitSeq::empty()).is_empty());
    }

    #[test]
    fn iterate_m_matches_two_step_table() {
        // rows ∅, 0, 1; columns 00, 01, 10, 11
        let table = [[E, O, I, E], [O, I, E, O], [I, E, O, I]];
        let cols: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];
        for (r, y) in [E, O, I].into_iter().enumerate() {
            for (c, x) in cols.iter().enumerate() {
                assert_eq!(iterate_m(y, x), table[r][c], "row {y} column {x:?}");
            }
        }
        assert_eq!(iterate_m(O, &[]), O);
    }

    #[test]
    fn triple_map_examples() {
        let s = StateTriple::reference();
        assert_eq!(triple_map(&s, &[1]).entries(), [I, O, E]);
        assert_eq!(triple_map(&s, &[1, 1]), s);
        for t in StateTriple::all() {
            assert_eq!(triple_map(&t, &[]), t);
        }
    }

    #[test]
    fn single_bits_are_transpositions() {
        for b in [0u8, 1] {
            let p = as_permutation(&[b]);
            assert!(!p.is_even());
            assert_eq!(p.order(), 2);
        }
        assert_eq!(as_permutation(&[1]).image(), [2, 1, 0]);
        assert_eq!(as_permutation(&[]), Perm3::IDENTITY);
    }

    #[test]
    fn perm3_group_laws() {
        let all = Perm3::all();
        let mut non_commuting = 0;
        for a in all {
            assert_eq!(a.compose(&a.inverse()), Perm3::IDENTITY);
            assert!(matches!(a.order(), 1..=3));
            assert_eq!(a.is_even(), a.order() != 2);
            for b in all {
                let ab = a.compose(&b);
                assert!(all.contains(&ab));
                assert_eq!(ab.is_even(), a.is_even() == b.is_even());
                if ab != b.compose(&a) {
                    non_commuting += 1;
                }
            }
        }
        assert!(non_commuting > 0);
        assert!(Perm3::new([0, 0, 1]).is_err());
        assert!(StateTriple::new([E, E, O]).is_err());
    }

    #[test]
    fn positional_view_is_conjugate() {
        for x in [&[0u8][..], &[1], &[0, 1], &[1, 1, 0]] {
            let p = as_permutation(x);
            for s in StateTriple::all() {
                let q = p.on_positions(&s);
                assert_eq!(q.order(), p.order());
                let moved = triple_map(&s, x).entries();
                for (i, m) in moved.iter().enumerate() {
                    assert_eq!(*m, s.entries()[q.apply(i)]);
                }
            }
        }
    }

    #[test]
    fn run_a_is_injective_up_to_length_12() {
        for n in 0..=12usize {
            let mut seen = HashSet::new();
            for v in 0u32..(1 << n) {
                let x = BitSeq::from_bools((0..n).map(|i| v >> i & 1 == 1));
                assert!(seen.insert(run_a(&x)), "collision at length {n}");
            }
        }
    }

    #[test]
    fn two_step_matches_direct_exhaustively_short() {
        for n in 0..=12usize {
            for v in 0u32..(1 << n) {
                let x = BitSeq::from_bools((0..n).map(|i| v >> i & 1 == 1));
                assert_eq!(bsg(&x), bsg_direct(&x));
                assert_eq!(absg(&x), absg_direct(&x));
            }
        }
    }

    fn bitvec(max: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..2, 0..max)
    }

    proptest! {
        #[test]
        fn two_step_matches_direct(x in bitvec(2000)) {
            let x = BitSeq::new(x).unwrap();
            prop_assert_eq!(bsg(&x), bsg_direct(&x));
            prop_assert_eq!(absg(&x), absg_direct(&x));
        }

        #[test]
        fn state_sequence_shape(x in bitvec(500)) {
            let y = run_a(&BitSeq::new(x).unwrap());
            prop_assert_ne!(y.at(1), Some(StateSymbol::Null));
            for w in y.as_slice().windows(2) {
                prop_assert!(!(w[0].is_null() && w[1].is_null()));
            }
        }

        #[test]
        fn step_is_injective_in_the_input(i in 0usize..3) {
            let y = StateSymbol::from_index(i);
            prop_assert_ne!(step(y, 0), step(y, 1));
        }

        #[test]
        fn shift_lemma(x in prop::collection::vec(0u8..2, 2..80), k in 1usize..80) {
            let k = 1 + k % (x.len() - 1);
            let whole = iterate_m(E, &x);
            let tail = iterate_m(E, &x[k..]);
            let head = iterate_m(E, &x[..k]);
            prop_assert_eq!(whole == tail, head == E);
        }

        #[test]
        fn parity_law(a in bitvec(64), b in bitvec(64)) {
            let pa = as_permutation(&a);
            let pb = as_permutation(&b);
            let joined: Vec<u8> = a.iter().chain(&b).copied().collect();
            let pj = as_permutation(&joined);
            prop_assert_eq!(pj, pb.compose(&pa));
            prop_assert_eq!(pj.is_even(), pa.is_even() == pb.is_even());
            prop_assert_eq!(pa.order() == 2, a.len() % 2 == 1);
        }
    }
}
