//! Witness functions and hand-built machines used as fixtures and oracles.
//!
//! Every function here comes in two forms: an exact evaluator on rationals and a
//! streaming evaluator on finite binary words that counts its work in an abstract
//! cost model (one unit per digit read, per digit written, per table lookup).

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::buchi::{graph_alphabet, pair_symbol, BuchiAutomaton};
use crate::digits::{parse_rational, pow2, rat, BinaryWord, Rational};
use crate::error::{Error, Result};
use crate::pwl::{tooth, PwlFunction};
use crate::transducer::{DetFst, Fst};

/// Result of one streaming evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    /// Exact `f(value(σ))`.
    pub value: Rational,
    /// The first `precision` binary digits of `value`.
    pub digits: BinaryWord,
    pub steps: u64,
}

/// Work counter for one invocation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Steps(u64);

impl Steps {
    pub fn tick(&mut self) {
        self.0 += 1;
    }

    pub fn add(&mut self, n: u64) {
        self.0 += n;
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

/// A function on `[0,1]` evaluated exactly, both on rationals and on finite words.
pub trait StreamingEvaluator: Send + Sync {
    fn name(&self) -> String;

    fn eval(&self, x: &Rational) -> Rational;

    /// `f(value(σ))` with its first `precision` digits, counting steps.
    fn eval_word(&self, sigma: &BinaryWord, precision: usize) -> Evaluation;
}

/// The first `m` binary digits of `v ∈ [0, 1]`, truncated; `1` reads as `0.111…`.
pub fn truncated_digits(v: &Rational, m: usize) -> BinaryWord {
    let digits = if v.is_one() {
        vec![1; m]
    } else {
        let mut rest = v.clone();
        (0..m)
            .map(|_| {
                rest = &rest * rat(2, 1);
                if rest >= Rational::one() {
                    rest -= Rational::one();
                    1
                } else {
                    0
                }
            })
            .collect()
    };
    BinaryWord::new(digits).expect("binary digits")
}

fn finish(value: Rational, precision: usize, mut steps: Steps) -> Evaluation {
    steps.add(precision as u64);
    Evaluation {
        digits: truncated_digits(&value, precision),
        value,
        steps: steps.get(),
    }
}

/// The interval `J_n = (2^-n − 2^-2n, 2^-n + 2^-2n)`, `n ≥ 3`.
pub fn interval_j(n: u32) -> Result<(Rational, Rational)> {
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "interval index must be at least 3, got {n}"
        )));
    }
    let n = i64::from(n);
    Ok((pow2(-n) - pow2(-2 * n), pow2(-n) + pow2(-2 * n)))
}

/// Least `k` with `2^-k ≤ x`, for `x > 0`.
fn leading_position(x: &Rational) -> u32 {
    let mut k = 0;
    while &pow2(-i64::from(k)) > x {
        k += 1;
    }
    k
}

/// The `n ≥ 3` with `x ∈ (2^-n − w(n), 2^-n + w(n))`, if any.
fn bump_index(x: &Rational, width: impl Fn(u32) -> Rational) -> Option<u32> {
    if !x.is_positive() {
        return None;
    }
    let k = leading_position(x);
    [k, k.saturating_sub(1)].into_iter().find(|&n| {
        if n < 3 {
            return false;
        }
        let centre = pow2(-i64::from(n));
        let w = width(n);
        x > &(&centre - &w) && x < &(&centre + &w)
    })
}

/// Reads position `p` (1-based) of `sigma`, zero past the end.
fn read(sigma: &[u8], p: usize, steps: &mut Steps) -> u8 {
    steps.tick();
    sigma.get(p - 1).copied().unwrap_or(0)
}

/// First 1-based position holding a 1.
fn first_one(sigma: &[u8], steps: &mut Steps) -> Option<usize> {
    (1..=sigma.len()).find(|&p| read(sigma, p, steps) == 1)
}

/// `n` when `value(σ) ∈ [2^-n, 2^-n + 2^-2n)` for some `n > 2`.
fn delta_plus(sigma: &[u8], steps: &mut Steps) -> Option<usize> {
    let n = first_one(sigma, steps)?;
    if n <= 2 {
        return None;
    }
    ((n + 1)..=sigma.len().min(2 * n))
        .all(|j| read(sigma, j, steps) == 0)
        .then_some(n)
}

/// `n` when `value(σ) ∈ (2^-n − 2^-2n, 2^-n)` for some `n > 2`.
fn delta_minus(sigma: &[u8], steps: &mut Steps) -> Option<usize> {
    let n = first_one(sigma, steps)? - 1;
    if n < 3 || sigma.len() <= 2 * n {
        return None;
    }
    let block = ((n + 2)..=2 * n).all(|j| read(sigma, j, steps) == 1);
    (block && ((2 * n + 1)..=sigma.len()).any(|j| read(sigma, j, steps) == 1)).then_some(n)
}

/// `1^n` if `value(σ) ∈ J_n` for some `n > 2`, else `0`, with the step count.
pub fn delta_counted(sigma: &BinaryWord) -> (BinaryWord, u64) {
    let mut steps = Steps::default();
    let n = delta_plus(sigma, &mut steps).or_else(|| delta_minus(sigma, &mut steps));
    let out = match n {
        Some(n) => vec![1; n],
        None => vec![0],
    };
    steps.add(out.len() as u64);
    (BinaryWord::new(out).expect("binary"), steps.get())
}

pub fn delta(sigma: &BinaryWord) -> BinaryWord {
    delta_counted(sigma).0
}

/// Finite description of `r: ℕ → {0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportPredicate {
    /// `r(n) = 1` iff `n` is listed.
    Finite(BTreeSet<u32>),
    /// `r(n) = 1` iff `n` is not listed.
    Cofinite(BTreeSet<u32>),
}

impl SupportPredicate {
    pub fn finite(support: impl IntoIterator<Item = u32>) -> Self {
        Self::Finite(support.into_iter().collect())
    }

    /// `r ≡ 1`.
    pub fn everywhere() -> Self {
        Self::Cofinite(BTreeSet::new())
    }

    pub fn holds(&self, n: u32) -> bool {
        match self {
            Self::Finite(set) => set.contains(&n),
            Self::Cofinite(set) => !set.contains(&n),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

impl fmt::Display for SupportPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list =
            |set: &BTreeSet<u32>| set.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        match self {
            Self::Finite(set) => write!(f, "fz:{{{}}}", list(set)),
            Self::Cofinite(set) if set.is_empty() => write!(f, "fz-cofinite"),
            Self::Cofinite(set) => write!(f, "fz-cofinite:{{{}}}", list(set)),
        }
    }
}

/// The bump function with plateaus over the middle of each active `J_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fz {
    support: SupportPredicate,
}

pub fn f_z(support: SupportPredicate) -> Fz {
    Fz { support }
}

impl Fz {
    pub fn support(&self) -> &SupportPredicate {
        &self.support
    }

    fn value_on(&self, x: &Rational, n: u32) -> Rational {
        let n = i64::from(n);
        let centre = pow2(-n);
        let half_width = pow2(-2 * n - 1);
        if x <= &(&centre - &half_width) {
            x + pow2(-2 * n) - centre
        } else if x < &(&centre + &half_width) {
            half_width
        } else {
            -x + pow2(-2 * n) + centre
        }
    }
}

impl StreamingEvaluator for Fz {
    fn name(&self) -> String {
        self.support.to_string()
    }

    fn eval(&self, x: &Rational) -> Rational {
        match bump_index(x, |n| pow2(-2 * i64::from(n))) {
            Some(n) if self.support.holds(n) => self.value_on(x, n),
            _ => Rational::zero(),
        }
    }

    fn eval_word(&self, sigma: &BinaryWord, precision: usize) -> Evaluation {
        let (d, scanned) = delta_counted(sigma);
        let mut steps = Steps(scanned);
        let x = sigma.value();
        let value = if d.digits() == [0] {
            Rational::zero()
        } else {
            let n = d.len() as u32;
            // Deciding r(n) costs O(n); locating the subcase is one more pass.
            steps.add(u64::from(n));
            if self.support.holds(n) {
                steps.add(sigma.len() as u64);
                self.value_on(&x, n)
            } else {
                Rational::zero()
            }
        };
        finish(value, precision, steps)
    }
}

/// Piecewise-linear form of `f_z` with bumps for active `n` in `3..=cutoff`.
///
/// A cofinite predicate gives the truncation of `f_z` at `cutoff`.
pub fn f_z_pwl(support: &SupportPredicate, cutoff: u32) -> Result<PwlFunction> {
    if let SupportPredicate::Finite(set) = support {
        if let Some(&n) = set.iter().find(|&&n| n > cutoff) {
            return Err(Error::Unsupported(format!(
                "support element {n} exceeds cutoff {cutoff}"
            )));
        }
    }
    let mut points = vec![(Rational::zero(), Rational::zero())];
    for n in (3..=cutoff).rev().filter(|&n| support.holds(n)) {
        let n = i64::from(n);
        let centre = pow2(-n);
        let (w, h) = (pow2(-2 * n), pow2(-2 * n - 1));
        points.push((&centre - &w, Rational::zero()));
        points.push((&centre - &h, h.clone()));
        points.push((&centre + &h, h.clone()));
        points.push((&centre + &w, Rational::zero()));
    }
    points.push((Rational::one(), Rational::zero()));
    PwlFunction::new(points)
}

/// Bumps of height `2^-n²` on `J̃_n = (2^-n − 2^-n², 2^-n + 2^-n²)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FTilde;

pub fn f_tilde() -> FTilde {
    FTilde
}

fn tilde_width(n: u32) -> Rational {
    pow2(-i64::from(n) * i64::from(n))
}

impl FTilde {
    /// `n` with `value(σ) ∈ J̃_n`, comparing positions against a lazily generated
    /// `1^{n²}`.
    fn locate(sigma: &[u8], steps: &mut Steps) -> Option<usize> {
        let n = first_one(sigma, steps)?;
        // Upper half: positions n+1..=n² are zero.
        if n >= 3 {
            let square = n * n;
            let mut upper = true;
            for j in (n + 1)..=sigma.len().min(square) {
                steps.add(2);
                if read(sigma, j, steps) == 1 {
                    upper = false;
                    break;
                }
            }
            if upper {
                return Some(n);
            }
        }
        // Lower half: first one at m+1, then ones through m², then a later one.
        let m = n - 1;
        if m < 3 {
            return None;
        }
        let square = m * m;
        if sigma.len() <= square {
            return None;
        }
        for j in (m + 2)..=square {
            steps.add(1);
            if read(sigma, j, steps) == 0 {
                return None;
            }
        }
        ((square + 1)..=sigma.len())
            .any(|j| read(sigma, j, steps) == 1)
            .then_some(m)
    }
}

impl StreamingEvaluator for FTilde {
    fn name(&self) -> String {
        "ftilde".into()
    }

    fn eval(&self, x: &Rational) -> Rational {
        match bump_index(x, tilde_width) {
            Some(n) => {
                let centre = pow2(-i64::from(n));
                if x < &centre {
                    x + tilde_width(n) - centre
                } else {
                    -x + tilde_width(n) + centre
                }
            }
            None => Rational::zero(),
        }
    }

    fn eval_word(&self, sigma: &BinaryWord, precision: usize) -> Evaluation {
        let mut steps = Steps::default();
        let value = match Self::locate(sigma, &mut steps) {
            Some(_) => {
                // Digits of 2^-n² are generated as the output is written.
                steps.add(sigma.len() as u64);
                self.eval(&sigma.value())
            }
            None => Rational::zero(),
        };
        finish(value, precision, steps)
    }
}

/// The zigzag around `1/2` that a nondeterministic transducer computes and no
/// deterministic one does.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counterexample;

pub fn counterexample_fn() -> Counterexample {
    Counterexample
}

impl StreamingEvaluator for Counterexample {
    fn name(&self) -> String {
        "counterexample".into()
    }

    fn eval(&self, x: &Rational) -> Rational {
        if !x.is_positive() {
            return rat(1, 2);
        }
        // x ∈ (2^-n-1, 2^-n].
        let k = leading_position(x);
        let n = if pow2(-i64::from(k)) == *x {
            i64::from(k)
        } else {
            i64::from(k) - 1
        };
        let low = pow2(-n - 1);
        let eighth = pow2(-n - 3);
        let half = rat(1, 2);
        if x <= &(&low + &eighth) {
            x + half - low
        } else if x <= &(&low + rat(3, 1) * &eighth) {
            -x + half + low + pow2(-n - 2)
        } else {
            x + half - pow2(-n)
        }
    }

    fn eval_word(&self, sigma: &BinaryWord, precision: usize) -> Evaluation {
        let mut steps = Steps::default();
        if let Some(p) = first_one(sigma, &mut steps) {
            for j in (p + 1)..=(p + 2) {
                read(sigma, j, &mut steps);
            }
        }
        finish(self.eval(&sigma.value()), precision, steps)
    }
}

impl StreamingEvaluator for PwlFunction {
    fn name(&self) -> String {
        self.to_string()
    }

    fn eval(&self, x: &Rational) -> Rational {
        PwlFunction::eval(self, x).expect("argument inside [0, 1]")
    }

    fn eval_word(&self, sigma: &BinaryWord, precision: usize) -> Evaluation {
        let mut steps = Steps::default();
        steps.add(sigma.len() as u64 + self.points().len() as u64);
        finish(
            StreamingEvaluator::eval(self, &sigma.value()),
            precision,
            steps,
        )
    }
}

/// States of [`counterexample_transducer`].
mod cx {
    /// Before the first digit: the high run writes `1…`, the low run `0…`.
    pub const START_HIGH: u32 = 0;
    pub const START_LOW: u32 = 1;
    /// Inside the leading zeros.
    pub const ZEROS_HIGH: u32 = 2;
    pub const ZEROS_LOW: u32 = 3;
    /// Read the first one; the next digit decides which run survives.
    pub const FIRST_HIGH: u32 = 4;
    pub const FIRST_LOW: u32 = 5;
    /// Read the digit after the first one; the next digit picks the tail.
    pub const SECOND_HIGH: u32 = 6;
    pub const SECOND_LOW: u32 = 7;
    /// Tail: copy or complement the input.
    pub const COPY: u32 = 8;
    pub const FLIP: u32 = 9;
    pub const COUNT: usize = 10;
}

/// Delay-0 nondeterministic binary transducer for [`counterexample_fn`].
///
/// Writes `1000…` and `0111…` until the first input one at position `n`. The next
/// digit kills one run; the one after picks whether the tail from position `n + 3`
/// copies or complements the input.
pub fn counterexample_transducer() -> Fst {
    use cx::*;
    let transitions = vec![
        (START_HIGH, 0, 1, ZEROS_HIGH),
        (START_HIGH, 1, 1, FIRST_HIGH),
        (START_LOW, 0, 0, ZEROS_LOW),
        (START_LOW, 1, 0, FIRST_LOW),
        (ZEROS_HIGH, 0, 0, ZEROS_HIGH),
        (ZEROS_HIGH, 1, 0, FIRST_HIGH),
        (ZEROS_LOW, 0, 1, ZEROS_LOW),
        (ZEROS_LOW, 1, 1, FIRST_LOW),
        (FIRST_HIGH, 0, 0, SECOND_HIGH),
        (FIRST_LOW, 1, 1, SECOND_LOW),
        (SECOND_HIGH, 0, 0, COPY),
        (SECOND_HIGH, 1, 0, FLIP),
        (SECOND_LOW, 0, 1, FLIP),
        (SECOND_LOW, 1, 1, COPY),
        (COPY, 0, 0, COPY),
        (COPY, 1, 1, COPY),
        (FLIP, 0, 1, FLIP),
        (FLIP, 1, 0, FLIP),
    ];
    Fst::new(
        COUNT,
        vec![0, 1],
        vec![0, 1],
        vec![START_HIGH, START_LOW],
        0,
        [],
        transitions,
    )
    .expect("well formed")
}

/// Deliberately discontinuous transducer: repeats the first input digit forever, so
/// the two expansions of `1/2` give `0` and `1`.
pub fn first_digit_repeater() -> DetFst {
    let transitions = [
        (0, 0, 0, 1),
        (0, 1, 1, 2),
        (1, 0, 0, 1),
        (1, 1, 0, 1),
        (2, 0, 1, 2),
        (2, 1, 1, 2),
    ];
    DetFst::new(
        Fst::new(3, vec![0, 1], vec![0, 1], vec![0], 0, [], transitions).expect("well formed"),
    )
    .expect("deterministic")
}

/// Graph automaton of the step function `0` on `[0, 1/2)`, `1` on `[1/2, 1]`.
pub fn step_function_buchi() -> BuchiAutomaton {
    const START: u32 = 0;
    // x starts with 0 and y is 0 so far; x may still be 0.1111… = 1/2.
    const LOW_PENDING: u32 = 1;
    // x has a 0 after its first digit, so x < 1/2.
    const LOW: u32 = 2;
    // x = 0.0111… = 1/2 and y = 0.111… = 1.
    const HALF: u32 = 3;
    const HIGH: u32 = 4;
    let p = pair_symbol;
    let mut transitions = vec![
        (START, p(0, 0), LOW_PENDING),
        (START, p(0, 1), HALF),
        (START, p(1, 1), HIGH),
        (LOW_PENDING, p(1, 0), LOW_PENDING),
        (LOW_PENDING, p(0, 0), LOW),
        (HALF, p(1, 1), HALF),
    ];
    for x in 0..2 {
        transitions.push((LOW, p(x, 0), LOW));
        transitions.push((HIGH, p(x, 1), HIGH));
    }
    BuchiAutomaton::new(
        5,
        graph_alphabet(),
        vec![START],
        vec![LOW, HALF, HIGH],
        transitions,
    )
    .expect("well formed")
}

/// Graph automaton of the identity.
pub fn identity_buchi() -> BuchiAutomaton {
    const EQUAL: u32 = 0;
    // x went above y at a dyadic: x continues 0^ω, y continues 1^ω.
    const X_ABOVE: u32 = 1;
    const Y_ABOVE: u32 = 2;
    let p = pair_symbol;
    let transitions = vec![
        (EQUAL, p(0, 0), EQUAL),
        (EQUAL, p(1, 1), EQUAL),
        (EQUAL, p(1, 0), X_ABOVE),
        (EQUAL, p(0, 1), Y_ABOVE),
        (X_ABOVE, p(0, 1), X_ABOVE),
        (Y_ABOVE, p(1, 0), Y_ABOVE),
    ];
    BuchiAutomaton::new(3, graph_alphabet(), vec![EQUAL], vec![0, 1, 2], transitions)
        .expect("well formed")
}

/// A corpus entry that can be written as an artifact.
#[derive(Clone, Debug)]
pub enum CorpusItem {
    Pwl(PwlFunction),
    Buchi(BuchiAutomaton),
    Fst(Fst),
}

/// Largest bump index used when a finite `f_z` is built as a PWL function.
pub const FZ_CUTOFF: u32 = 16;

fn parse_index_set(s: &str) -> Result<BTreeSet<u32>> {
    let bad = || Error::Parse {
        what: "index set",
        input: s.into(),
    };
    let inner = s
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(bad)?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map_err(|_| bad()))
        .collect()
}

/// Parses `fz:{3,5}`, `fz-cofinite` or `fz-cofinite:{4}`.
pub fn parse_support(name: &str) -> Result<SupportPredicate> {
    if let Some(rest) = name.strip_prefix("fz:") {
        return Ok(SupportPredicate::Finite(parse_index_set(rest)?));
    }
    if name == "fz-cofinite" {
        return Ok(SupportPredicate::everywhere());
    }
    if let Some(rest) = name.strip_prefix("fz-cofinite:") {
        return Ok(SupportPredicate::Cofinite(parse_index_set(rest)?));
    }
    Err(Error::UnknownCorpus(name.into()))
}

fn parse_tooth(args: &str) -> Result<PwlFunction> {
    let parts: Vec<Rational> = args
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        [p, q, r] => tooth(p, q, r),
        _ => Err(Error::Parse {
            what: "tooth parameters p,q,r",
            input: args.into(),
        }),
    }
}

/// Names accepted by [`lookup`] and [`evaluator`].
pub const CORPUS_NAMES: &[&str] = &[
    "step",
    "identity",
    "counterexample",
    "counterexample-fst",
    "fz:{3,5}",
    "fz-cofinite",
    "ftilde",
    "tooth:p,q,r",
    "constant:c",
];

/// The artifact form of a named corpus entry.
pub fn lookup(name: &str) -> Result<CorpusItem> {
    match name {
        "step" => Ok(CorpusItem::Buchi(step_function_buchi())),
        "identity" => Ok(CorpusItem::Buchi(identity_buchi())),
        "counterexample" | "counterexample-fst" => Ok(CorpusItem::Fst(counterexample_transducer())),
        _ => {
            if let Some(args) = name.strip_prefix("tooth:") {
                return parse_tooth(args).map(CorpusItem::Pwl);
            }
            if let Some(c) = name.strip_prefix("constant:") {
                return Ok(CorpusItem::Pwl(PwlFunction::constant(parse_rational(c)?)));
            }
            match parse_support(name) {
                Ok(s @ SupportPredicate::Finite(_)) => f_z_pwl(&s, FZ_CUTOFF).map(CorpusItem::Pwl),
                Ok(_) => Err(Error::Unsupported(format!(
                    "{name} is not piecewise linear; use it as an evaluator"
                ))),
                Err(_) if name == "ftilde" => Err(Error::Unsupported(
                    "ftilde is not piecewise linear; use it as an evaluator".into(),
                )),
                Err(e) => Err(e),
            }
        }
    }
}

/// The exact evaluator of a named corpus function.
pub fn evaluator(name: &str) -> Result<Box<dyn StreamingEvaluator>> {
    match name {
        "counterexample" | "counterexample-fst" => Ok(Box::new(Counterexample)),
        "ftilde" => Ok(Box::new(FTilde)),
        "identity" => Ok(Box::new(PwlFunction::identity())),
        _ => {
            if let Ok(s) = parse_support(name) {
                return Ok(Box::new(f_z(s)));
            }
            match lookup(name)? {
                CorpusItem::Pwl(f) => Ok(Box::new(f)),
                _ => Err(Error::Unsupported(format!("{name} has no evaluator"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{binary_expansions, dyadic_grid};
    use crate::transducer::computes_on_grid;

    fn word(bits: &str) -> BinaryWord {
        bits.parse().unwrap()
    }

    #[test]
    fn j_intervals() {
        assert_eq!(interval_j(3).unwrap(), (rat(7, 64), rat(9, 64)));
        assert!(interval_j(2).is_err());
        for n in 3..=10 {
            let (a, b) = interval_j(n).unwrap();
            assert_eq!((&a + &b) / rat(2, 1), pow2(-i64::from(n)));
            let (c, _) = interval_j(n - 1).unwrap_or((rat(1, 1), rat(1, 1)));
            assert!(b <= c);
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(&word("001")), word("111"));
        assert_eq!(delta(&word("1")), word("0"));
        assert_eq!(delta(&word("")), word("0"));
        // 1/8 − 1/64 + 1/256 lies inside J_3 from below.
        assert_eq!(delta(&word("00011101")), word("111"));
        assert_eq!(delta(&word("000111")), word("0"));
    }

    #[test]
    fn delta_matches_interval_membership() {
        for len in 0..=12u32 {
            for bits in 0..(1u32 << len) {
                let digits: Vec<u8> = (0..len)
                    .map(|i| ((bits >> (len - 1 - i)) & 1) as u8)
                    .collect();
                let sigma = BinaryWord::new(digits).unwrap();
                let v = sigma.value();
                let expected = (3..=12).find(|&n| {
                    let (a, b) = interval_j(n).unwrap();
                    v > a && v < b
                });
                let got = delta(&sigma);
                match expected {
                    Some(n) => assert_eq!(got.len(), n as usize, "{sigma}"),
                    None => assert_eq!(got, word("0"), "{sigma}"),
                }
            }
        }
    }

    #[test]
    fn fz_cases() {
        let f = f_z(SupportPredicate::finite([3]));
        assert_eq!(f.eval(&rat(1, 8)), rat(1, 128));
        assert_eq!(f.eval(&rat(1, 2)), rat(0, 1));
        let rising = pow2(-3) - rat(3, 1) * pow2(-8);
        assert_eq!(f.eval(&rising), &rising + pow2(-6) - pow2(-3));
        assert_eq!(f.eval(&rising), rat(1, 256));
        assert_eq!(f.eval(&rat(1, 32)), rat(0, 1));
        let g = f_z(SupportPredicate::everywhere());
        assert_eq!(g.eval(&rat(1, 32)), pow2(-11));
    }

    #[test]
    fn fz_pwl_agrees_with_cases() {
        let s = SupportPredicate::finite([3, 5]);
        let f = f_z(s.clone());
        let p = f_z_pwl(&s, 8).unwrap();
        assert!(p.has_dyadic_breakpoints());
        for x in dyadic_grid(12) {
            assert_eq!(PwlFunction::eval(&p, &x).unwrap(), f.eval(&x), "{x}");
        }
        assert!(f_z_pwl(&SupportPredicate::finite([9]), 8).is_err());
    }

    #[test]
    fn ftilde_values() {
        let f = f_tilde();
        assert_eq!(f.eval(&pow2(-3)), pow2(-9));
        assert_eq!(f.eval(&pow2(-4)), pow2(-16));
        assert_eq!(f.eval(&rat(1, 2)), rat(0, 1));
        let w = word("00011111111");
        assert_eq!(f.eval_word(&w, 4).value, f.eval(&w.value()));
    }

    #[test]
    fn counterexample_values() {
        let f = counterexample_fn();
        assert_eq!(f.eval(&rat(0, 1)), rat(1, 2));
        assert_eq!(f.eval(&rat(1, 1)), rat(1, 2));
        for n in 1..=10i64 {
            let above = pow2(-n - 1) + pow2(-n - 3);
            let below = pow2(-n - 1) + rat(3, 1) * pow2(-n - 3);
            assert_eq!(f.eval(&above), rat(1, 2) + pow2(-n - 3));
            assert_eq!(f.eval(&below), rat(1, 2) - pow2(-n - 3));
        }
    }

    #[test]
    fn counterexample_transducer_computes() {
        let t = counterexample_transducer();
        let f = counterexample_fn();
        let check = computes_on_grid(&t, |x: &Rational| f.eval(x), 8, 10).unwrap();
        assert!(check.pass, "{check:?}");
        assert_eq!(check.max_live_runs, 2);
    }

    #[test]
    fn step_automaton() {
        let a = step_function_buchi();
        let one: crate::Lasso<u8> = "(1)".parse().unwrap();
        let zero: crate::Lasso<u8> = "(0)".parse().unwrap();
        for x in binary_expansions(&rat(1, 2)).unwrap() {
            assert!(a.accepts_graph(&x, &one).unwrap(), "{x}");
            assert!(!a.accepts_graph(&x, &zero).unwrap(), "{x}");
        }
        for x in dyadic_grid(4) {
            let y = if x >= rat(1, 2) { &one } else { &zero };
            for xr in binary_expansions(&x).unwrap() {
                assert!(a.accepts_graph(&xr, y).unwrap(), "{xr}");
            }
        }
    }

    #[test]
    fn identity_automaton() {
        let a = identity_buchi();
        for x in dyadic_grid(5) {
            for xr in binary_expansions(&x).unwrap() {
                for yr in binary_expansions(&x).unwrap() {
                    assert!(a.accepts_graph(&xr, &yr).unwrap());
                }
            }
        }
        let q = "01(0)".parse().unwrap();
        assert!(!a.accepts_graph(&"001(0)".parse().unwrap(), &q).unwrap());
    }

    #[test]
    fn names() {
        assert!(matches!(
            lookup("tooth:1/4,1/2,1/8").unwrap(),
            CorpusItem::Pwl(_)
        ));
        assert!(matches!(lookup("fz:{3,5}").unwrap(), CorpusItem::Pwl(_)));
        assert!(matches!(
            lookup("counterexample-fst").unwrap(),
            CorpusItem::Fst(_)
        ));
        assert!(matches!(lookup("step").unwrap(), CorpusItem::Buchi(_)));
        assert!(lookup("ftilde").is_err());
        assert!(matches!(lookup("nope"), Err(Error::UnknownCorpus(_))));
        assert_eq!(evaluator("fz-cofinite").unwrap().eval(&pow2(-4)), pow2(-9));
        assert_eq!(
            parse_support("fz-cofinite:{4}").unwrap().to_string(),
            "fz-cofinite:{4}"
        );
    }

    #[test]
    fn truncation() {
        assert_eq!(truncated_digits(&rat(1, 1), 3), word("111"));
        assert_eq!(truncated_digits(&rat(5, 16), 5), word("01010"));
        assert_eq!(truncated_digits(&rat(1, 3), 4), word("0101"));
    }
}
