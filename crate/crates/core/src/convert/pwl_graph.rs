//! Graph automata of piecewise-linear functions with dyadic breakpoints.
//!
//! One deterministic branch per segment. A branch checks `x ∈ [x0, x1]` with two
//! comparators and the linear relation `A·y = B·x + C` with a bounded remainder.
//! Every live state of a branch is accepting.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::buchi::{graph_alphabet, pair_symbol, BuchiAutomaton};
use crate::digits::{dyadic_exponent, Rational};
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;

/// Comparator of the input against a dyadic bound `m/2^e`.
///
/// The scaled gap `2^k·2^e·(x↾k − bound)` (or its negation for an upper bound)
/// decides the comparison once it leaves a window of width `2^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Cmp {
    Ok,
    Open(i64),
}

#[derive(Clone, Copy, Debug)]
struct Bound {
    numer: i64,
    scale: i64,
    lower: bool,
}

impl Bound {
    fn new(value: &Rational, lower: bool) -> Result<Self> {
        let e = dyadic_exponent(value).ok_or(Error::NonDyadic)?;
        if e > 40 {
            return Err(Error::Unsupported(format!(
                "breakpoint {value} is too fine"
            )));
        }
        let numer = value.numer().to_i64().ok_or(Error::NonDyadic)?;
        Ok(Self {
            numer,
            scale: 1 << e,
            lower,
        })
    }

    fn start(&self) -> Option<Cmp> {
        let gap = if self.lower { -self.numer } else { self.numer };
        self.classify(gap)
    }

    fn classify(&self, gap: i64) -> Option<Cmp> {
        if self.lower {
            match gap {
                g if g >= 0 => Some(Cmp::Ok),
                g if g < -self.scale => None,
                g => Some(Cmp::Open(g)),
            }
        } else {
            match gap {
                g if g >= self.scale => Some(Cmp::Ok),
                g if g < 0 => None,
                g => Some(Cmp::Open(g)),
            }
        }
    }

    fn step(&self, c: Cmp, x: u8) -> Option<Cmp> {
        match c {
            Cmp::Ok => Some(Cmp::Ok),
            Cmp::Open(g) => {
                let bit = i64::from(x) * self.scale;
                self.classify(if self.lower { 2 * g + bit } else { 2 * g - bit })
            }
        }
    }
}

/// Integer relation `a·y = b·x + c` with `a > 0`, in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinearRelation {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl LinearRelation {
    /// The relation `y = slope·x + intercept`.
    pub fn new(slope: &Rational, intercept: &Rational) -> Result<Self> {
        let a = slope.denom() * intercept.denom();
        let b = slope.numer() * intercept.denom();
        let c = intercept.numer() * slope.denom();
        let g = a.gcd(&b).gcd(&c);
        let conv = |v: BigInt| {
            (v / &g)
                .to_i64()
                .filter(|v| v.abs() < 1 << 40)
                .ok_or_else(|| Error::Unsupported("segment coefficients too large".into()))
        };
        Ok(Self {
            a: conv(a)?,
            b: conv(b)?,
            c: conv(c)?,
        })
    }

    /// Remainders from which the relation can still hold.
    fn range(&self) -> (i64, i64) {
        (self.b.min(0) - self.a, self.b.max(0))
    }

    /// Bound asserted on every remainder state.
    pub fn remainder_bound(&self) -> i64 {
        self.a + self.b.abs() + self.c.abs()
    }

    fn step(&self, r: i64, x: u8, y: u8) -> Option<i64> {
        let next = 2 * r + self.a * i64::from(y) - self.b * i64::from(x);
        let (lo, hi) = self.range();
        (lo..=hi).contains(&next).then_some(next)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct BranchState {
    lo: Cmp,
    hi: Cmp,
    rem: i64,
}

/// Graph automaton accepting `α ⊕ β` iff `f(value α) = value β`.
///
/// Requires dyadic breakpoints; the state count is capped by `cap`.
pub fn pwl_to_buchi(f: &PwlFunction, cap: usize) -> Result<BuchiAutomaton> {
    if !f.has_dyadic_breakpoints() {
        return Err(Error::NonDyadic);
    }
    if f.min_value().is_negative() || f.max_value() > Rational::one() {
        return Err(Error::InvalidPwl("range is not inside [0, 1]".into()));
    }
    let mut transitions: Vec<(u32, usize, u32)> = Vec::new();
    let mut initial = Vec::new();
    let mut total = 0usize;
    for seg in f.segments() {
        let rel = LinearRelation::new(&seg.slope(), &seg.intercept())?;
        let lower = Bound::new(&seg.x0, true)?;
        let upper = Bound::new(&seg.x1, false)?;
        let (Some(lo), Some(hi)) = (lower.start(), upper.start()) else {
            continue;
        };
        let start = BranchState {
            lo,
            hi,
            rem: -rel.c,
        };
        let (lo_r, hi_r) = rel.range();
        if !(lo_r..=hi_r).contains(&start.rem) {
            continue;
        }
        let mut ids: HashMap<BranchState, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        ids.insert(start, total as u32);
        initial.push(total as u32);
        queue.push_back(start);
        let base = total;
        while let Some(s) = queue.pop_front() {
            if s.rem.abs() > rel.remainder_bound() {
                return Err(Error::Invariant(format!(
                    "remainder {} exceeds bound {}",
                    s.rem,
                    rel.remainder_bound()
                )));
            }
            let from = ids[&s];
            for x in 0..2u8 {
                let (Some(lo), Some(hi)) = (lower.step(s.lo, x), upper.step(s.hi, x)) else {
                    continue;
                };
                for y in 0..2u8 {
                    let Some(rem) = rel.step(s.rem, x, y) else {
                        continue;
                    };
                    let next = BranchState { lo, hi, rem };
                    let to = match ids.get(&next) {
                        Some(&id) => id,
                        None => {
                            let id = (base + ids.len()) as u32;
                            if base + ids.len() >= cap {
                                return Err(Error::StateCap {
                                    what: "piecewise-linear graph automaton",
                                    cap,
                                });
                            }
                            ids.insert(next, id);
                            queue.push_back(next);
                            id
                        }
                    };
                    transitions.push((from, pair_symbol(x, y), to));
                }
            }
        }
        total += ids.len();
    }
    BuchiAutomaton::new(
        total,
        graph_alphabet(),
        initial,
        (0..total as u32).collect(),
        transitions,
    )
    .map(|a| a.trimmed())
}
