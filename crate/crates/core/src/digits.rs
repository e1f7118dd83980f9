//! Binary and signed-binary words, ultimately periodic words, and their exact values.
//!
//! A word `σ` denotes `Σ σ(s)·2^(-s-1)`. Binary digits are `0`/`1`; signed digits add
//! `-1`, written `m` in text. Lassos are written `prefix(period)`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::ops::Deref;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always in lowest terms.
pub type Rational = BigRational;

/// `n/d` as a [`Rational`]. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// True iff the denominator is a power of two.
pub fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom();
    (d & (d - BigInt::one())).is_zero()
}

/// Exponent `e` with denominator `2^e`, if `q` is dyadic.
pub fn dyadic_exponent(q: &Rational) -> Option<u64> {
    is_dyadic(q).then(|| q.denom().bits() - 1)
}

/// Parses `p/q`, an integer, or a binary fraction `0.b1b2…`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse {
        what: "rational",
        input: s.to_string(),
    };
    let t = s.trim();
    if let Some(bits) = t.strip_prefix("0.") {
        if bits.is_empty() || !bits.chars().all(|c| c == '0' || c == '1') {
            return Err(bad());
        }
        let word: BinaryWord = bits.parse()?;
        return Ok(word.value());
    }
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

fn check_unit(q: &Rational) -> Result<()> {
    if q.is_negative() || q > &Rational::one() {
        Err(Error::OutOfUnitInterval {
            value: q.to_string(),
        })
    } else {
        Ok(())
    }
}

/// `Σ d_i 2^(-i-1)` over a finite digit sequence.
pub fn digits_value<I: IntoIterator<Item = i8>>(digits: I) -> Rational {
    let mut num = BigInt::zero();
    let mut len = 0u64;
    for d in digits {
        num = (num << 1u32) + BigInt::from(d);
        len += 1;
    }
    Rational::new(num, BigInt::one() << len)
}

/// A digit type usable in words and lassos.
pub trait Digit: Copy + Eq + Hash + fmt::Debug + Send + Sync + 'static {
    const ALPHABET: &'static str;
    fn signed(self) -> i8;
    fn to_char(self) -> char;
    fn from_char(c: char) -> Option<Self>;
    fn from_i8(d: i8) -> Option<Self>;
}

impl Digit for u8 {
    const ALPHABET: &'static str = "binary";
    fn signed(self) -> i8 {
        self as i8
    }
    fn to_char(self) -> char {
        if self == 0 {
            '0'
        } else {
            '1'
        }
    }
    fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        }
    }
    fn from_i8(d: i8) -> Option<Self> {
        matches!(d, 0 | 1).then_some(d as u8)
    }
}

impl Digit for i8 {
    const ALPHABET: &'static str = "signed";
    fn signed(self) -> i8 {
        self
    }
    fn to_char(self) -> char {
        match self {
            -1 => 'm',
            0 => '0',
            _ => '1',
        }
    }
    fn from_char(c: char) -> Option<Self> {
        match c {
            'm' => Some(-1),
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        }
    }
    fn from_i8(d: i8) -> Option<Self> {
        matches!(d, -1..=1).then_some(d)
    }
}

fn validate<D: Digit>(digits: &[D]) -> Result<()> {
    for &d in digits {
        if D::from_i8(d.signed()) != Some(d) {
            return Err(Error::InvalidDigit {
                digit: d.signed() as i64,
                alphabet: D::ALPHABET,
            });
        }
    }
    Ok(())
}

fn parse_digits<D: Digit>(s: &str) -> Result<Vec<D>> {
    s.chars()
        .map(|c| {
            D::from_char(c).ok_or_else(|| Error::Parse {
                what: D::ALPHABET,
                input: s.to_string(),
            })
        })
        .collect()
}

macro_rules! word_type {
    ($(#[$doc:meta])* $name:ident, $digit:ty) => {
        $(#[$doc])*
        #[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Vec<$digit>);

        impl $name {
            pub fn new(digits: Vec<$digit>) -> Result<Self> {
                validate(&digits)?;
                Ok(Self(digits))
            }

            pub fn empty() -> Self {
                Self(Vec::new())
            }

            pub fn digits(&self) -> &[$digit] {
                &self.0
            }

            pub fn into_digits(self) -> Vec<$digit> {
                self.0
            }

            pub fn value(&self) -> Rational {
                digits_value(self.0.iter().map(|d| d.signed()))
            }

            /// First `n` digits (or the whole word if shorter).
            pub fn truncate(&self, n: usize) -> Self {
                Self(self.0[..n.min(self.0.len())].to_vec())
            }

            pub fn push(&mut self, d: $digit) -> Result<()> {
                validate(&[d])?;
                self.0.push(d);
                Ok(())
            }
        }

        impl Deref for $name {
            type Target = [$digit];
            fn deref(&self) -> &[$digit] {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.iter().try_for_each(|d| write!(f, "{}", d.to_char()))
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                parse_digits(s).map(Self)
            }
        }

        impl TryFrom<Vec<$digit>> for $name {
            type Error = Error;
            fn try_from(v: Vec<$digit>) -> Result<Self> {
                Self::new(v)
            }
        }
    };
}

word_type!(
    /// Finite word over `{0, 1}`.
    BinaryWord,
    u8
);
word_type!(
    /// Finite word over `{-1, 0, 1}`.
    SignedWord,
    i8
);

impl From<&BinaryWord> for SignedWord {
    fn from(w: &BinaryWord) -> Self {
        SignedWord(w.iter().map(|&b| b as i8).collect())
    }
}

/// Ultimately periodic word `prefix · period^ω`.
///
/// Stored as given; [`Lasso::normalized`] rolls the period back into the prefix and
/// shortens the period to its primitive root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso<S> {
    prefix: Vec<S>,
    period: Vec<S>,
}

impl<S: Copy + Eq> Lasso<S> {
    pub fn new(prefix: Vec<S>, period: Vec<S>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(Self { prefix, period })
    }

    pub fn prefix(&self) -> &[S] {
        &self.prefix
    }

    pub fn period(&self) -> &[S] {
        &self.period
    }

    /// Symbol at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> S {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Infinite iterator over the word.
    pub fn iter(&self) -> impl Iterator<Item = S> + '_ {
        self.prefix
            .iter()
            .copied()
            .chain(self.period.iter().copied().cycle())
    }

    pub fn take(&self, n: usize) -> Vec<S> {
        self.iter().take(n).collect()
    }

    /// Same word with the prefix extended by `k` copies of the period.
    pub fn unrolled(&self, k: usize) -> Self {
        let mut prefix = self.prefix.clone();
        for _ in 0..k {
            prefix.extend_from_slice(&self.period);
        }
        Self {
            prefix,
            period: self.period.clone(),
        }
    }

    /// Same word with the period rotated by `r` positions into the prefix.
    pub fn rolled(&self, r: usize) -> Self {
        let r = r % self.period.len();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.period[..r]);
        let mut period = self.period[r..].to_vec();
        period.extend_from_slice(&self.period[..r]);
        Self { prefix, period }
    }

    /// Shortest prefix and primitive period denoting the same infinite word.
    pub fn normalized(&self) -> Self {
        let mut prefix = self.prefix.clone();
        let mut period = self.period.clone();
        let n = period.len();
        let root = (1..=n)
            .find(|&p| n % p == 0 && (p..n).all(|i| period[i] == period[i - p]))
            .unwrap_or(n);
        period.truncate(root);
        while let (Some(&a), Some(&b)) = (prefix.last(), period.last()) {
            if a != b {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Self { prefix, period }
    }

    /// True iff both lassos denote the same infinite word.
    pub fn same_word(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }

    pub fn map<T: Copy + Eq>(&self, f: impl Fn(S) -> T) -> Lasso<T> {
        Lasso {
            prefix: self.prefix.iter().map(|&s| f(s)).collect(),
            period: self.period.iter().map(|&s| f(s)).collect(),
        }
    }
}

impl<D: Digit> Lasso<D> {
    /// Validating constructor for digit lassos.
    pub fn from_digits(prefix: Vec<D>, period: Vec<D>) -> Result<Self> {
        validate(&prefix)?;
        validate(&period)?;
        Self::new(prefix, period)
    }

    /// Exact value `value(prefix) + 2^(-|prefix|)·value(period)/(1 - 2^(-|period|))`.
    pub fn value(&self) -> Rational {
        let head = digits_value(self.prefix.iter().map(|d| d.signed()));
        let mut num = BigInt::zero();
        for d in &self.period {
            num = (num << 1u32) + BigInt::from(d.signed());
        }
        let cycle = Rational::new(num, (BigInt::one() << self.period.len()) - BigInt::one());
        head + cycle * pow2(-(self.prefix.len() as i64))
    }
}

impl<D: Digit> fmt::Display for Lasso<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.prefix
            .iter()
            .try_for_each(|d| write!(f, "{}", d.to_char()))?;
        f.write_str("(")?;
        self.period
            .iter()
            .try_for_each(|d| write!(f, "{}", d.to_char()))?;
        f.write_str(")")
    }
}

impl<D: Digit> FromStr for Lasso<D> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "lasso",
            input: s.to_string(),
        };
        let s = s.trim();
        let (prefix, rest) = s.split_once('(').ok_or_else(bad)?;
        let period = rest.strip_suffix(')').ok_or_else(bad)?;
        Lasso::new(parse_digits(prefix)?, parse_digits(period)?)
    }
}

/// Binary lasso of a binary word followed by `0^ω`.
pub fn zero_tail(word: &BinaryWord) -> Lasso<u8> {
    Lasso {
        prefix: word.digits().to_vec(),
        period: vec![0],
    }
}

/// All minimal binary lassos with value `q`: two for dyadics in `(0,1)`, one otherwise.
/// The `0^ω`-tailed one (or `(1)` for the value 1) comes first.
pub fn binary_expansions(q: &Rational) -> Result<Vec<Lasso<u8>>> {
    check_unit(q)?;
    if q.is_one() {
        return Ok(vec![Lasso {
            prefix: vec![],
            period: vec![1],
        }]);
    }
    let d = q.denom().clone();
    let mut r = q.numer().clone();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    let mut digits = Vec::new();
    let start = loop {
        if let Some(&i) = seen.get(&r) {
            break i;
        }
        seen.insert(r.clone(), digits.len());
        r <<= 1u32;
        if r >= d {
            r -= &d;
            digits.push(1u8);
        } else {
            digits.push(0u8);
        }
    };
    let canonical = Lasso {
        prefix: digits[..start].to_vec(),
        period: digits[start..].to_vec(),
    };
    let mut out = vec![canonical.clone()];
    if canonical.period == [0] && !canonical.prefix.is_empty() {
        let mut prefix = canonical.prefix.clone();
        *prefix.last_mut().expect("nonempty") = 0;
        out.push(Lasso {
            prefix,
            period: vec![1],
        });
    }
    Ok(out)
}

/// The canonical expansion of `q` (see [`binary_expansions`]).
pub fn canonical_expansion(q: &Rational) -> Result<Lasso<u8>> {
    Ok(binary_expansions(q)?.swap_remove(0))
}

/// Binary word of the same length whose value is `max(value(η), 0)`.
pub fn dy(eta: &SignedWord) -> BinaryWord {
    let n = eta.len();
    let mut v = BigInt::zero();
    for &d in eta.iter() {
        v = (v << 1u32) + BigInt::from(d);
    }
    if !v.is_positive() {
        return BinaryWord(vec![0; n]);
    }
    let mut out = vec![0u8; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let bit = (&v >> (n - 1 - i)) & BigInt::one();
        *slot = u8::from(!bit.is_zero());
    }
    BinaryWord(out)
}

/// Wraps a signed digit source so that an input whose first nonzero digit is `-1`
/// reads as `0^ω`.
pub fn sanitize_signed<I: Iterator<Item = i8>>(inner: I) -> Sanitized<I> {
    Sanitized {
        inner,
        state: SanitizeState::Leading,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SanitizeState {
    Leading,
    Pass,
    Zero,
}

/// Iterator returned by [`sanitize_signed`].
#[derive(Clone, Debug)]
pub struct Sanitized<I> {
    inner: I,
    state: SanitizeState,
}

impl<I: Iterator<Item = i8>> Iterator for Sanitized<I> {
    type Item = i8;
    fn next(&mut self) -> Option<i8> {
        let d = self.inner.next()?;
        match self.state {
            SanitizeState::Pass => Some(d),
            SanitizeState::Zero => Some(0),
            SanitizeState::Leading => {
                match d {
                    1 => self.state = SanitizeState::Pass,
                    -1 => self.state = SanitizeState::Zero,
                    _ => {}
                }
                Some(d.max(0))
            }
        }
    }
}

/// Every dyadic `k/2^depth` in `[0,1]`, in increasing order.
pub fn dyadic_grid(depth: u32) -> Vec<Rational> {
    let den = 1i64 << depth;
    (0..=den).map(|k| rat(k, den)).collect()
}
