//! Exact piecewise-linear functions on `[0,1]`.
//!
//! These are the oracles every construction is checked against.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::digits::{format_rational, is_dyadic, parse_rational, rat, Rational};
use crate::error::{Error, Result};

/// Continuous piecewise-linear function given by its breakpoints.
///
/// Breakpoint abscissae are strictly increasing, start at 0 and end at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwlFunction {
    points: Vec<(Rational, Rational)>,
}

/// One linear segment `y = slope·x + intercept` on `[x0, x1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub x0: Rational,
    pub x1: Rational,
    pub y0: Rational,
    pub y1: Rational,
}

impl Segment {
    pub fn slope(&self) -> Rational {
        (&self.y1 - &self.y0) / (&self.x1 - &self.x0)
    }

    pub fn intercept(&self) -> Rational {
        &self.y0 - self.slope() * &self.x0
    }
}

impl PwlFunction {
    /// Builds from `(x, y)` pairs sorted by `x`. Repeated `x` with equal `y` collapse.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut clean: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for (x, y) in points {
            match clean.last() {
                Some((px, py)) if *px == x => {
                    if *py != y {
                        return Err(Error::InvalidPwl(format!(
                            "conflicting values at breakpoint {x}"
                        )));
                    }
                }
                Some((px, _)) if *px > x => {
                    return Err(Error::InvalidPwl("breakpoints not increasing".into()))
                }
                _ => clean.push((x, y)),
            }
        }
        if clean.len() < 2 {
            return Err(Error::InvalidPwl("need at least two breakpoints".into()));
        }
        if !clean[0].0.is_zero() || !clean[clean.len() - 1].0.is_one() {
            return Err(Error::InvalidPwl("domain must be [0, 1]".into()));
        }
        Ok(Self { points: clean })
    }

    pub fn identity() -> Self {
        Self {
            points: vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(1, 1))],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self {
            points: vec![(rat(0, 1), c.clone()), (rat(1, 1), c)],
        }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment {
            x0: w[0].0.clone(),
            x1: w[1].0.clone(),
            y0: w[0].1.clone(),
            y1: w[1].1.clone(),
        })
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::OutOfUnitInterval {
                value: x.to_string(),
            });
        }
        let i = self.points.partition_point(|(px, _)| px <= x);
        if i == self.points.len() {
            return Ok(self.points[i - 1].1.clone());
        }
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Pointwise `a·f + b` on the same breakpoints.
    pub fn affine(&self, a: &Rational, b: &Rational) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|(x, y)| (x.clone(), a * y + b))
                .collect(),
        }
    }

    fn combine(&self, other: &Self, op: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let mut xs: Vec<Rational> = self
            .points
            .iter()
            .chain(other.points.iter())
            .map(|(x, _)| x.clone())
            .collect();
        xs.sort();
        xs.dedup();
        Self {
            points: xs
                .into_iter()
                .map(|x| {
                    let y = op(
                        &self.eval(&x).expect("in domain"),
                        &other.eval(&x).expect("in domain"),
                    );
                    (x, y)
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// Breakpoints of both functions plus every exact crossing of `self` and `other`.
    fn crossing_grid(&self, other: &Self) -> Vec<Rational> {
        let diff = self.sub(other);
        let mut xs: Vec<Rational> = diff.points.iter().map(|(x, _)| x.clone()).collect();
        for seg in diff.segments() {
            if (seg.y0.is_positive() && seg.y1.is_negative())
                || (seg.y0.is_negative() && seg.y1.is_positive())
            {
                let t = &seg.y0 / (&seg.y0 - &seg.y1);
                xs.push(&seg.x0 + t * (&seg.x1 - &seg.x0));
            }
        }
        xs.sort();
        xs
    }

    fn lattice(&self, other: &Self, take_max: bool) -> Self {
        let points = self
            .crossing_grid(other)
            .into_iter()
            .map(|x| {
                let a = self.eval(&x).expect("in domain");
                let b = other.eval(&x).expect("in domain");
                let y = if (a >= b) == take_max { a } else { b };
                (x, y)
            })
            .collect();
        Self { points }.simplified()
    }

    /// Exact pointwise maximum.
    pub fn lattice_max(&self, other: &Self) -> Self {
        self.lattice(other, true)
    }

    /// Exact pointwise minimum.
    pub fn lattice_min(&self, other: &Self) -> Self {
        self.lattice(other, false)
    }

    /// `max(f, 0)`.
    pub fn pos_part(&self) -> Self {
        self.lattice_max(&Self::constant(rat(0, 1)))
    }

    /// `max(-f, 0)`.
    pub fn neg_part(&self) -> Self {
        self.affine(&rat(-1, 1), &rat(0, 1)).pos_part()
    }

    /// `|f| = f⁺ + f⁻`.
    pub fn modulus(&self) -> Self {
        self.pos_part().add(&self.neg_part()).simplified()
    }

    /// `max(f, g) = ½[f + g + mod(f − g)]`.
    pub fn max_via_modulus(&self, other: &Self) -> Self {
        let half = rat(1, 2);
        self.add(other)
            .add(&self.sub(other).modulus())
            .affine(&half, &rat(0, 1))
            .simplified()
    }

    /// `min(f, g) = ½[f + g − mod(f − g)]`.
    pub fn min_via_modulus(&self, other: &Self) -> Self {
        let half = rat(1, 2);
        self.add(other)
            .sub(&self.sub(other).modulus())
            .affine(&half, &rat(0, 1))
            .simplified()
    }

    /// Drops breakpoints interior to a straight run.
    pub fn simplified(&self) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (y1 - y0) * (&p.0 - x1) == (&p.1 - y1) * (x1 - x0) {
                    out.pop();
                }
            }
            out.push(p.clone());
        }
        Self { points: out }
    }

    /// Largest absolute slope over all segments.
    pub fn lipschitz_bound(&self) -> Rational {
        self.segments()
            .map(|s| s.slope().abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn has_dyadic_breakpoints(&self) -> bool {
        self.points
            .iter()
            .all(|(x, y)| is_dyadic(x) && is_dyadic(y))
    }

    pub fn min_value(&self) -> Rational {
        self.points
            .iter()
            .map(|(_, y)| y.clone())
            .min()
            .expect("nonempty")
    }

    pub fn max_value(&self) -> Rational {
        self.points
            .iter()
            .map(|(_, y)| y.clone())
            .max()
            .expect("nonempty")
    }

    /// `y ↦ y/8 + 5/16`, moving a `[0,1]`-valued function into `[5/16, 7/16]`.
    pub fn normalize_range(&self) -> Result<Self> {
        if self.min_value().is_negative() || self.max_value() > Rational::one() {
            return Err(Error::InvalidPwl("range is not inside [0, 1]".into()));
        }
        Ok(self.affine(&rat(1, 8), &rat(5, 16)))
    }
}

/// The range normalization `y ↦ y/8 + 5/16`.
pub fn normalize_value(y: &Rational) -> Rational {
    y / rat(8, 1) + rat(5, 16)
}

/// Inverse of [`normalize_value`].
pub fn denormalize_value(y: &Rational) -> Rational {
    (y - rat(5, 16)) * rat(8, 1)
}

/// Tooth of height `r` on `(p, q)`: zero outside, peak at the midpoint.
pub fn tooth(p: &Rational, q: &Rational, r: &Rational) -> Result<PwlFunction> {
    check_tooth(p, q, r)?;
    let zero = rat(0, 1);
    let mid = (p + q) / rat(2, 1);
    let mut pts = vec![(zero.clone(), zero.clone())];
    pts.push((p.clone(), zero.clone()));
    pts.push((mid, r.clone()));
    pts.push((q.clone(), zero.clone()));
    pts.push((rat(1, 1), zero));
    PwlFunction::new(pts)
}

/// The same tooth through `min(max(s·(id − p), 0), max(−s·(id − q), 0))`, `s = 2r/(q−p)`.
pub fn tooth_by_formula(p: &Rational, q: &Rational, r: &Rational) -> Result<PwlFunction> {
    check_tooth(p, q, r)?;
    let s = rat(2, 1) * r / (q - p);
    let id = PwlFunction::identity();
    let rising = id.affine(&s, &(-&s * p)).pos_part();
    let falling = id.affine(&-&s, &(&s * q)).pos_part();
    Ok(rising.lattice_min(&falling))
}

fn check_tooth(p: &Rational, q: &Rational, r: &Rational) -> Result<()> {
    if p.is_negative() || p >= q || q > &Rational::one() || !r.is_positive() {
        return Err(Error::InvalidPwl(format!(
            "tooth needs 0 <= p < q <= 1 and r > 0, got p={p}, q={q}, r={r}"
        )));
    }
    Ok(())
}

impl fmt::Display for PwlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .points
            .iter()
            .map(|(x, y)| format!("({x}, {y})"))
            .collect();
        write!(f, "pwl[{}]", parts.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct PwlJson {
    breakpoints: Vec<(String, String)>,
}

impl Serialize for PwlFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PwlJson {
            breakpoints: self
                .points
                .iter()
                .map(|(x, y)| (format_rational(x), format_rational(y)))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PwlFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PwlJson::deserialize(d)?;
        let points = raw
            .breakpoints
            .iter()
            .map(|(x, y)| Ok((parse_rational(x)?, parse_rational(y)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PwlFunction::new(points).map_err(D::Error::custom)
    }
}
