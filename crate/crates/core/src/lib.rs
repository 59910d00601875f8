//! Analysis toolkit for the bit-search generator (BSG) and its variant (ABSG).
//!
//! Both generators scan a binary input for blocks of the form `(a, b^i, a)` and
//! emit one bit per block. Internally each is modelled as a three-state machine
//! (`∅`, `0`, `1`) followed by an emission rule, which makes two kinds of
//! analysis tractable:
//!
//! * [`period_analysis`]: for m-sequence inputs, every cyclic shift falls into
//!   exactly one of two classes (state period `T` or `2T`), whose sizes fix
//!   the output periods and their bounds.
//! * [`exact_stats`]: for fair i.i.d. input, the number of emitted bits `H` in
//!   `N` steps has a closed-form distribution converging to a Gaussian with
//!   mean `N/3` and variance `2N/27`.
//!
//! [`montecarlo`] provides reproducible simulation against those closed forms.

pub mod error;
pub mod exact_stats;
pub mod generators;
pub mod lfsr;
pub mod montecarlo;
pub mod period_analysis;
pub mod seqcore;

pub use error::{Error, Result};
pub use generators::{Perm3, StateTriple};
pub use lfsr::{LfsrConfig, MSequence, Polynomial};
pub use seqcore::{BitSeq, StateSeq, StateSymbol};
