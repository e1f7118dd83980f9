//! Signed-binary output to standard binary output.
//!
//! The converter guesses each binary digit and keeps the carry
//! `e = 2^k·(value(ν↾k) − value(β↾k))`. Both tails lie in `[-2^-k, 2^-k]` and
//! `[0, 2^-k]`, so a run can only succeed while `e ∈ [-1, 2]`; runs leaving that range
//! die. Every infinite run therefore writes a representation of the same value.

use crate::error::{Error, Result};
use crate::transducer::{Fst, Transducer};

const CARRY_MIN: i8 = -1;
const CARRY_MAX: i8 = 2;
const BINARY: [i8; 2] = [0, 1];

/// Binary digits `b` a run with carry `e` may write after reading signed digit `s`,
/// with the new carry.
pub fn carry_steps(e: i8, s: i8) -> impl Iterator<Item = (i8, i8)> {
    BINARY.into_iter().filter_map(move |b| {
        let next = 2 * e + s - b;
        (CARRY_MIN..=CARRY_MAX).contains(&next).then_some((b, next))
    })
}

/// `inner` followed by the carry converter.
#[derive(Clone, Debug)]
pub struct SignedToBinary<T> {
    inner: T,
    input: Vec<i8>,
}

impl<T: Transducer> SignedToBinary<T> {
    pub fn new(inner: T) -> Self {
        let input = inner.input_alphabet().to_vec();
        Self { inner, input }
    }

    /// Keeps only the binary input digits of `inner`.
    pub fn binary_input(inner: T) -> Result<Self> {
        let input: Vec<i8> = BINARY
            .into_iter()
            .filter(|a| inner.input_alphabet().contains(a))
            .collect();
        if input.len() != 2 {
            return Err(Error::Unsupported(
                "inner transducer does not read binary digits".into(),
            ));
        }
        Ok(Self { inner, input })
    }

    pub fn inner(&self) -> &T {
        &self.inner
    }
}

impl<T: Transducer> Transducer for SignedToBinary<T> {
    type State = (T::State, i8);

    fn delay(&self) -> usize {
        self.inner.delay()
    }

    fn input_alphabet(&self) -> &[i8] {
        &self.input
    }

    fn output_alphabet(&self) -> &[i8] {
        &BINARY
    }

    fn initial_states(&self) -> Vec<Self::State> {
        self.inner
            .initial_states()
            .into_iter()
            .map(|s| (s, 0))
            .collect()
    }

    fn delay_successors(&self, s: &Self::State, a: i8) -> Result<Vec<Self::State>> {
        Ok(self
            .inner
            .delay_successors(&s.0, a)?
            .into_iter()
            .map(|t| (t, s.1))
            .collect())
    }

    fn successors(&self, s: &Self::State, a: i8) -> Result<Vec<(i8, Self::State)>> {
        let mut out = Vec::new();
        for (digit, t) in self.inner.successors(&s.0, a)? {
            for (b, e) in carry_steps(s.1, digit) {
                out.push((b, (t.clone(), e)));
            }
        }
        Ok(out)
    }

    fn state_bound(&self) -> Option<usize> {
        self.inner.state_bound().map(|n| n.saturating_mul(4))
    }
}

/// The four-state carry converter on its own, as an explicit transducer over signed
/// input. State `i` holds carry `i - 1`.
pub fn signed_output_to_binary_adapter() -> Fst {
    let transitions: Vec<(u32, i8, i8, u32)> = (CARRY_MIN..=CARRY_MAX)
        .flat_map(|e| {
            [-1i8, 0, 1].into_iter().flat_map(move |s| {
                carry_steps(e, s).map(move |(b, next)| ((e + 1) as u32, s, b, (next + 1) as u32))
            })
        })
        .collect();
    Fst::new(
        4,
        vec![-1, 0, 1],
        BINARY.to_vec(),
        vec![1],
        0,
        [],
        transitions,
    )
    .expect("converter is well formed")
}
