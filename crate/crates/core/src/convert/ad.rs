//! Deterministic signed-binary transducer simulating the twin pair of [`AHat`].
//!
//! After `n + D + 3` input digits `η` the state holds the last four bits `δ` of
//! `Dy(η)` (the binary word of the same length and value, clamped at zero), the twin
//! pair after `Dy(η)↾n+D`, the twin pair after `Dy(η·(-1))↾n+D`, and the offset `ι`
//! between the two right outputs in units of `2^-n`. The written output plus
//! `owed·2^-n` always equals the right output on `Dy(η)`; a nonzero debt is paid back
//! over the next few digits.

use crate::convert::ahat::{AHat, PairState, StepKind};
use crate::error::{Error, Result};
use crate::transducer::Transducer;

const SIGNED: [i8; 3] = [-1, 0, 1];

/// Run-phase state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdCore {
    pub delta: u8,
    pub iota: i8,
    pub plus: PairState,
    pub minus: PairState,
    pub owed: i8,
    /// The input read so far has positive value.
    pub nonzero: bool,
    /// The first nonzero input digit was `-1`; the input is read as `0^ω`.
    pub clamped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdState {
    /// Reading the first `D + 3` digits; `value` is the integer value of the digits.
    Delay {
        len: usize,
        value: i64,
        clamped: bool,
    },
    Run(AdCore),
}

/// Everything one run-phase step did, for the claim monitors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepDetail {
    /// Input digit after clamping.
    pub input: i8,
    pub output: i8,
    /// Step of the track that determined the output.
    pub kind: StepKind,
    /// Step of the minus track when it moved separately (input `0`).
    pub minus_kind: Option<StepKind>,
    pub iota_before: i8,
    pub iota_after: i8,
    pub owed_after: i8,
}

/// The deterministic transducer, delay `D + 3`.
#[derive(Clone, Debug)]
pub struct Ad {
    ahat: AHat,
}

impl Ad {
    pub fn new(ahat: AHat) -> Self {
        Self { ahat }
    }

    pub fn ahat(&self) -> &AHat {
        &self.ahat
    }

    fn inner_delay(&self) -> usize {
        self.ahat.delay()
    }

    /// First run-phase state from the integer value of the first `D + 4` digits.
    fn enter(&self, value: i64, clamped: bool) -> Result<AdCore> {
        let d = self.inner_delay();
        let v = value.max(0) as u64;
        let plus = self.ahat.start_pair((v >> 3) as u32)?;
        let shifted = (2 * v).saturating_sub(1);
        let minus = self.ahat.start_pair((shifted >> 4) as u32)?;
        debug_assert!(v < 1 << (d + 4));
        Ok(AdCore {
            delta: (v & 15) as u8,
            iota: 0,
            plus,
            minus,
            owed: 0,
            nonzero: v > 0,
            clamped,
        })
    }

    /// One run-phase step with its bookkeeping.
    pub fn step_detailed(&self, s: &AdCore, b: i8) -> Result<(StepDetail, AdCore)> {
        let mut next = *s;
        let mut b = if s.clamped { 0 } else { b };
        if b == -1 && !s.nonzero {
            next.clamped = true;
            b = 0;
        }
        let delta = s.delta;
        let (kind, minus_kind, x) = match b {
            1 => {
                let d = (delta << 1 | 1) & 15;
                let (k, p) = self.ahat.step_pair(s.plus, d >> 3)?;
                next.delta = d;
                next.plus = p;
                next.minus = p;
                next.iota = 0;
                next.nonzero = true;
                (k, None, 2 * i64::from(s.owed) + k.increment())
            }
            0 => {
                let d = (delta << 1) & 15;
                let (kp, pp) = self.ahat.step_pair(s.plus, d >> 3)?;
                let minus_bit = if !s.nonzero {
                    0
                } else if delta & 7 == 0 {
                    1
                } else {
                    (((2 * i32::from(d) - 1) >> 4) & 1) as u8
                };
                let (km, pm) = self.ahat.step_pair(s.minus, minus_bit)?;
                next.delta = d;
                next.plus = pp;
                next.minus = pm;
                let iota = 2 * i64::from(s.iota) + km.increment() - kp.increment();
                if iota.abs() > 3 {
                    return Err(Error::Invariant(format!(
                        "relative offset {iota} out of range"
                    )));
                }
                next.iota = iota as i8;
                (kp, Some(km), 2 * i64::from(s.owed) + kp.increment())
            }
            -1 => {
                let d = ((2 * i32::from(delta) - 1).rem_euclid(16)) as u8;
                let (k, p) = self.ahat.step_pair(s.minus, d >> 3)?;
                next.delta = d;
                next.plus = p;
                next.minus = p;
                next.iota = 0;
                (
                    k,
                    None,
                    2 * (i64::from(s.owed) + i64::from(s.iota)) + k.increment(),
                )
            }
            _ => return Err(Error::UnknownSymbol(b.to_string())),
        };
        let output = x.clamp(-1, 1);
        let owed = x - output;
        if owed.abs() > 3 {
            return Err(Error::Invariant(format!("output debt {owed} out of range")));
        }
        next.owed = owed as i8;
        let detail = StepDetail {
            input: b,
            output: output as i8,
            kind,
            minus_kind,
            iota_before: s.iota,
            iota_after: next.iota,
            owed_after: next.owed,
        };
        Ok((detail, next))
    }
}

impl Transducer for Ad {
    type State = AdState;

    fn delay(&self) -> usize {
        self.inner_delay() + 3
    }

    fn input_alphabet(&self) -> &[i8] {
        &SIGNED
    }

    fn output_alphabet(&self) -> &[i8] {
        &SIGNED
    }

    fn initial_states(&self) -> Vec<AdState> {
        vec![AdState::Delay {
            len: 0,
            value: 0,
            clamped: false,
        }]
    }

    fn delay_successors(&self, s: &AdState, a: i8) -> Result<Vec<AdState>> {
        if !SIGNED.contains(&a) {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        match *s {
            AdState::Delay {
                len,
                value,
                clamped,
            } if len < self.delay() => {
                let clamped = clamped || (value == 0 && a == -1);
                let value = if clamped { 0 } else { 2 * value + i64::from(a) };
                Ok(vec![AdState::Delay {
                    len: len + 1,
                    value,
                    clamped,
                }])
            }
            _ => Err(Error::Invariant(format!(
                "{s:?} is not a delay-phase state"
            ))),
        }
    }

    fn successors(&self, s: &AdState, a: i8) -> Result<Vec<(i8, AdState)>> {
        match *s {
            AdState::Delay { value, clamped, .. } => {
                let clamped = clamped || (value == 0 && a == -1);
                let value = if clamped { 0 } else { 2 * value + i64::from(a) };
                Ok(vec![(1, AdState::Run(self.enter(value, clamped)?))])
            }
            AdState::Run(core) => {
                let (detail, next) = self.step_detailed(&core, a)?;
                Ok(vec![(detail.output, AdState::Run(next))])
            }
        }
    }
}

/// Counts of claim violations seen over one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdMonitor {
    pub steps: usize,
    /// Debt outside `{-1, 0, 1}`.
    pub debt: usize,
    /// Relative offset outside `{-1, 0, 1}`.
    pub offset: usize,
    /// Three consecutive splits of the same side along a simulated run.
    pub triple_split: usize,
    /// Debt repayments with a digit of the wrong sign or longer than three digits.
    pub collapse: usize,
    pub collapse_episodes: usize,
    plus_streak: (Option<StepKind>, usize),
    minus_streak: (Option<StepKind>, usize),
    episode: Option<(i8, usize)>,
}

fn extend(streak: (Option<StepKind>, usize), k: StepKind) -> (Option<StepKind>, usize) {
    match (streak, k) {
        (_, StepKind::Continue) => (None, 0),
        ((Some(prev), n), k) if prev == k => (Some(k), n + 1),
        _ => (Some(k), 1),
    }
}

impl AdMonitor {
    pub fn observe(&mut self, d: &StepDetail) {
        self.steps += 1;
        if d.owed_after.abs() > 1 {
            self.debt += 1;
        }
        if d.iota_after.abs() > 1 {
            self.offset += 1;
        }
        let (plus, minus) = match (d.input, d.minus_kind) {
            (0, Some(mk)) => (
                extend(self.plus_streak, d.kind),
                extend(self.minus_streak, mk),
            ),
            (-1, _) => {
                let s = extend(self.minus_streak, d.kind);
                (s, s)
            }
            _ => {
                let s = extend(self.plus_streak, d.kind);
                (s, s)
            }
        };
        if plus.1 >= 3 || minus.1 >= 3 {
            self.triple_split += 1;
        }
        self.plus_streak = plus;
        self.minus_streak = minus;
        if d.input == -1 && d.iota_before != 0 && self.episode.is_none() {
            self.collapse_episodes += 1;
            self.episode = Some((d.iota_before.signum(), 0));
        }
        if let Some((sign, len)) = self.episode {
            let len = len + 1;
            if d.output != sign || len > 3 {
                self.collapse += 1;
            }
            self.episode = (d.owed_after != 0).then_some((sign, len));
        }
    }

    pub fn violations(&self) -> usize {
        self.debt + self.offset + self.triple_split + self.collapse
    }
}

/// Runs `t` over `input` (at least `D + 3` digits) and returns the output with the
/// monitor counts.
pub fn run_monitored(t: &Ad, input: &[i8]) -> Result<(Vec<i8>, AdMonitor)> {
    let mut state = t.initial_states().remove(0);
    let mut out = Vec::new();
    let mut monitor = AdMonitor::default();
    for (i, &a) in input.iter().enumerate() {
        if i < t.delay() {
            state = t.delay_successors(&state, a)?.remove(0);
            continue;
        }
        state = match state {
            AdState::Run(core) => {
                let (detail, next) = t.step_detailed(&core, a)?;
                monitor.observe(&detail);
                out.push(detail.output);
                AdState::Run(next)
            }
            delay => {
                let (b, next) = t.successors(&delay, a)?.remove(0);
                out.push(b);
                next
            }
        };
    }
    Ok((out, monitor))
}

/// The deterministic signed-binary transducer for the function computed by `ahat`.
pub fn ntrans_to_det_signed(ahat: &AHat) -> Ad {
    Ad::new(ahat.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::{determinize, DEFAULT_STATE_CAP};
    use crate::convert::ahat::{buchi_to_ntrans, NuConfig};
    use crate::convert::pwl_to_buchi;
    use crate::digits::{digits_value, rat, Lasso, Rational};
    use crate::pwl::PwlFunction;
    use crate::transducer::{computes_on_grid, eval_exact_rational, eval_stream};
    use num_traits::Signed;

    fn pipeline(f: &PwlFunction) -> Ad {
        let a = pwl_to_buchi(f, DEFAULT_STATE_CAP).unwrap();
        let d = determinize(&a, DEFAULT_STATE_CAP).unwrap().0;
        ntrans_to_det_signed(&buchi_to_ntrans(&d, None, 24, NuConfig::default()).unwrap())
    }

    fn normalized_identity() -> PwlFunction {
        PwlFunction::identity().normalize_range().unwrap()
    }

    #[test]
    fn zero_input_gives_five_sixteenths() {
        let t = pipeline(&normalized_identity());
        let out = eval_stream(&t, std::iter::repeat(0), 10).unwrap();
        let v = digits_value(out.iter().copied());
        assert!((v - rat(5, 16)).abs() <= rat(1, 1024));
    }

    #[test]
    fn exact_value_at_one_third() {
        let t = pipeline(&normalized_identity());
        let w: Lasso<i8> = Lasso::new(vec![], vec![0, 1]).unwrap();
        let out = eval_exact_rational(&t, &w).unwrap();
        assert_eq!(out.value, rat(17, 48));
    }

    #[test]
    fn signed_digits_agree_with_binary() {
        let t = pipeline(&normalized_identity());
        let n = 16;
        let a = eval_stream(&t, [1, -1].into_iter().chain(std::iter::repeat(0)), n).unwrap();
        let b = eval_stream(&t, [0, 1].into_iter().chain(std::iter::repeat(0)), n).unwrap();
        let (va, vb): (Rational, Rational) = (
            digits_value(a.iter().copied()),
            digits_value(b.iter().copied()),
        );
        assert!((va - vb).abs() <= rat(2, 1 << n));
    }

    #[test]
    fn grid_and_monitors() {
        let f = normalized_identity();
        let t = pipeline(&f);
        let check = computes_on_grid(&t, |x: &Rational| f.eval(x).unwrap(), 5, 8).unwrap();
        assert!(check.pass, "{check:?}");
        let input: Vec<i8> = [1, 0, -1, 0, 0, 0, 0, -1, 1, 1, -1, 0, 1, 0, 0, -1, -1, 0]
            .iter()
            .cycle()
            .take(t.delay() + 60)
            .copied()
            .collect();
        let (_, m) = run_monitored(&t, &input).unwrap();
        assert_eq!(m.violations(), 0, "{m:?}");
    }

    #[test]
    fn negative_inputs_read_as_zero() {
        let t = pipeline(&normalized_identity());
        let a = eval_stream(&t, [-1, 1].into_iter().chain(std::iter::repeat(1)), 12).unwrap();
        let b = eval_stream(&t, std::iter::repeat(0), 12).unwrap();
        assert_eq!(a, b);
    }
}
