//! Finite-state transducers with a fixed delay.
//!
//! A transducer reads one digit per step. During the first `delay` steps it follows
//! delay-phase transitions and writes nothing; afterwards every transition writes one
//! digit. A run with no enabled transition dies.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_traits::Signed;

use crate::digits::{digits_value, pow2, Lasso, Rational};
use crate::error::{Error, Result};

/// Common interface of explicit and lazily generated transducers.
pub trait Transducer {
    type State: Clone + Eq + Hash + Debug;

    fn delay(&self) -> usize;
    fn input_alphabet(&self) -> &[i8];
    fn output_alphabet(&self) -> &[i8];
    fn initial_states(&self) -> Vec<Self::State>;
    /// Successors while fewer than `delay` digits have been read.
    fn delay_successors(&self, s: &Self::State, a: i8) -> Result<Vec<Self::State>>;
    /// Output digit and successor once the delay has elapsed.
    fn successors(&self, s: &Self::State, a: i8) -> Result<Vec<(i8, Self::State)>>;
    /// Upper bound on reachable states, when known.
    fn state_bound(&self) -> Option<usize> {
        None
    }
}

/// Explicit nondeterministic transducer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fst {
    input_alphabet: Vec<i8>,
    output_alphabet: Vec<i8>,
    initial: Vec<u32>,
    delay: usize,
    delay_delta: Vec<Vec<Vec<u32>>>,
    delta: Vec<Vec<Vec<(i8, u32)>>>,
}

impl Fst {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        states: usize,
        input_alphabet: Vec<i8>,
        output_alphabet: Vec<i8>,
        initial: Vec<u32>,
        delay: usize,
        delay_transitions: impl IntoIterator<Item = (u32, i8, u32)>,
        transitions: impl IntoIterator<Item = (u32, i8, i8, u32)>,
    ) -> Result<Self> {
        if input_alphabet.is_empty() || output_alphabet.is_empty() {
            return Err(Error::InvalidTransducer(
                "alphabets must be nonempty".into(),
            ));
        }
        if let Some(d) = input_alphabet
            .iter()
            .chain(&output_alphabet)
            .find(|d| !(-1..=1).contains(*d))
        {
            return Err(Error::InvalidTransducer(format!(
                "digit {d} outside {{-1,0,1}}"
            )));
        }
        let check = |s: u32| -> Result<usize> {
            if (s as usize) < states {
                Ok(s as usize)
            } else {
                Err(Error::InvalidTransducer(format!("state {s} out of range")))
            }
        };
        let sym = |a: i8, alphabet: &[i8]| -> Result<usize> {
            alphabet
                .iter()
                .position(|&b| b == a)
                .ok_or_else(|| Error::UnknownSymbol(a.to_string()))
        };
        for &s in &initial {
            check(s)?;
        }
        let k = input_alphabet.len();
        let mut delay_delta = vec![vec![Vec::new(); k]; states];
        for (from, a, to) in delay_transitions {
            let i = sym(a, &input_alphabet)?;
            delay_delta[check(from)?][i].push(check(to)? as u32);
        }
        let mut delta = vec![vec![Vec::new(); k]; states];
        for (from, a, b, to) in transitions {
            let i = sym(a, &input_alphabet)?;
            sym(b, &output_alphabet)?;
            delta[check(from)?][i].push((b, check(to)? as u32));
        }
        for row in delay_delta.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        for row in delta.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        Ok(Self {
            input_alphabet,
            output_alphabet,
            initial,
            delay,
            delay_delta,
            delta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    fn index(&self, a: i8) -> Result<usize> {
        self.input_alphabet
            .iter()
            .position(|&b| b == a)
            .ok_or_else(|| Error::UnknownSymbol(a.to_string()))
    }

    pub fn delay_transitions(&self) -> impl Iterator<Item = (u32, i8, u32)> + '_ {
        self.delay_delta
            .iter()
            .enumerate()
            .flat_map(move |(s, row)| {
                row.iter().enumerate().flat_map(move |(i, ts)| {
                    ts.iter()
                        .map(move |&t| (s as u32, self.input_alphabet[i], t))
                })
            })
    }

    pub fn transitions(&self) -> impl Iterator<Item = (u32, i8, i8, u32)> + '_ {
        self.delta.iter().enumerate().flat_map(move |(s, row)| {
            row.iter().enumerate().flat_map(move |(i, ts)| {
                ts.iter()
                    .map(move |&(b, t)| (s as u32, self.input_alphabet[i], b, t))
            })
        })
    }

    pub fn is_binary(&self) -> bool {
        let binary = |alpha: &[i8]| alpha.iter().all(|&d| d == 0 || d == 1);
        binary(&self.input_alphabet) && binary(&self.output_alphabet)
    }
}

impl Transducer for Fst {
    type State = u32;

    fn delay(&self) -> usize {
        self.delay
    }

    fn input_alphabet(&self) -> &[i8] {
        &self.input_alphabet
    }

    fn output_alphabet(&self) -> &[i8] {
        &self.output_alphabet
    }

    fn initial_states(&self) -> Vec<u32> {
        self.initial.clone()
    }

    fn delay_successors(&self, s: &u32, a: i8) -> Result<Vec<u32>> {
        Ok(self.delay_delta[*s as usize][self.index(a)?].clone())
    }

    fn successors(&self, s: &u32, a: i8) -> Result<Vec<(i8, u32)>> {
        Ok(self.delta[*s as usize][self.index(a)?].clone())
    }

    fn state_bound(&self) -> Option<usize> {
        Some(self.num_states())
    }
}

/// Explicit deterministic transducer: one initial state and at most one successor per
/// state, input digit and phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetFst(Fst);

impl DetFst {
    pub fn new(fst: Fst) -> Result<Self> {
        if fst.initial.len() != 1 {
            return Err(Error::InvalidTransducer(
                "deterministic transducer needs exactly one initial state".into(),
            ));
        }
        for s in 0..fst.num_states() {
            for (i, &a) in fst.input_alphabet.iter().enumerate() {
                let n = fst.delay_delta[s][i].len().max(fst.delta[s][i].len());
                if n > 1 {
                    return Err(Error::NotDeterministic {
                        state: s.to_string(),
                        symbol: a,
                        successors: n,
                    });
                }
            }
        }
        Ok(Self(fst))
    }

    pub fn fst(&self) -> &Fst {
        &self.0
    }

    pub fn into_fst(self) -> Fst {
        self.0
    }
}

impl Transducer for DetFst {
    type State = u32;

    fn delay(&self) -> usize {
        self.0.delay()
    }

    fn input_alphabet(&self) -> &[i8] {
        self.0.input_alphabet()
    }

    fn output_alphabet(&self) -> &[i8] {
        self.0.output_alphabet()
    }

    fn initial_states(&self) -> Vec<u32> {
        self.0.initial_states()
    }

    fn delay_successors(&self, s: &u32, a: i8) -> Result<Vec<u32>> {
        self.0.delay_successors(s, a)
    }

    fn successors(&self, s: &u32, a: i8) -> Result<Vec<(i8, u32)>> {
        self.0.successors(s, a)
    }

    fn state_bound(&self) -> Option<usize> {
        self.0.state_bound()
    }
}

/// One live run: its current state and everything written so far.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run<S> {
    pub state: S,
    pub output: Vec<i8>,
}

/// All live runs after reading a finite input.
#[derive(Clone, Debug)]
pub struct RunSet<S> {
    runs: Vec<Run<S>>,
    read: usize,
}

impl<S: Clone + Eq + Hash> RunSet<S> {
    pub fn start<T: Transducer<State = S>>(t: &T) -> Self {
        Self {
            runs: t
                .initial_states()
                .into_iter()
                .map(|state| Run {
                    state,
                    output: Vec::new(),
                })
                .collect(),
            read: 0,
        }
    }

    pub fn runs(&self) -> &[Run<S>] {
        &self.runs
    }

    /// Input digits consumed.
    pub fn read(&self) -> usize {
        self.read
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn outputs(&self) -> impl Iterator<Item = &[i8]> {
        self.runs.iter().map(|r| r.output.as_slice())
    }
}

/// Extends every live run by one input digit, dropping runs that die. Runs are merged
/// only when both state and output coincide.
pub fn step_all<T: Transducer>(t: &T, rs: &RunSet<T::State>, a: i8) -> Result<RunSet<T::State>> {
    let mut seen: HashSet<Run<T::State>> = HashSet::new();
    let mut runs = Vec::new();
    let mut keep = |run: Run<T::State>| {
        if seen.insert(run.clone()) {
            runs.push(run);
        }
    };
    for run in &rs.runs {
        if rs.read < t.delay() {
            for state in t.delay_successors(&run.state, a)? {
                keep(Run {
                    state,
                    output: run.output.clone(),
                });
            }
        } else {
            for (b, state) in t.successors(&run.state, a)? {
                let mut output = run.output.clone();
                output.push(b);
                keep(Run { state, output });
            }
        }
    }
    Ok(RunSet {
        runs,
        read: rs.read + 1,
    })
}

/// Runs every path over a finite input.
pub fn run_word<T: Transducer>(t: &T, input: &[i8]) -> Result<RunSet<T::State>> {
    input
        .iter()
        .try_fold(RunSet::start(t), |rs, &a| step_all(t, &rs, a))
}

fn det_step<T: Transducer>(
    t: &T,
    s: &T::State,
    a: i8,
    read: usize,
) -> Result<(Option<i8>, T::State)> {
    if read < t.delay() {
        match t.delay_successors(s, a)?.as_slice() {
            [next] => Ok((None, next.clone())),
            other => Err(not_det(s, a, other.len())),
        }
    } else {
        match t.successors(s, a)?.as_slice() {
            [(b, next)] => Ok((Some(*b), next.clone())),
            other => Err(not_det(s, a, other.len())),
        }
    }
}

fn not_det<S: Debug>(s: &S, a: i8, n: usize) -> Error {
    Error::NotDeterministic {
        state: format!("{s:?}"),
        symbol: a,
        successors: n,
    }
}

fn single_initial<T: Transducer>(t: &T) -> Result<T::State> {
    match t.initial_states().as_slice() {
        [s] => Ok(s.clone()),
        other => Err(Error::InvalidTransducer(format!(
            "deterministic evaluation needs one initial state, found {}",
            other.len()
        ))),
    }
}

/// First `n` output digits of the unique run on `input`.
pub fn eval_stream<T: Transducer>(
    t: &T,
    input: impl IntoIterator<Item = i8>,
    n: usize,
) -> Result<Vec<i8>> {
    let mut state = single_initial(t)?;
    let mut out = Vec::with_capacity(n);
    let mut input = input.into_iter();
    let mut read = 0;
    while out.len() < n {
        let a = input
            .next()
            .ok_or_else(|| Error::InvalidTransducer(format!("input ended after {read} digits")))?;
        let (b, next) = det_step(t, &state, a, read)?;
        out.extend(b);
        state = next;
        read += 1;
    }
    Ok(out)
}

/// Result of [`eval_exact_rational`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactOutput {
    pub output: Lasso<i8>,
    pub value: Rational,
    /// Input digits read before the repeat was found.
    pub steps: usize,
}

/// Exact output of a deterministic transducer on `prefix · period^ω`.
///
/// Records the state at each period boundary once the prefix and the delay are
/// consumed; the first repeated state closes the output cycle.
pub fn eval_exact_rational<T: Transducer>(t: &T, w: &Lasso<i8>) -> Result<ExactOutput> {
    let d = t.delay();
    let pre = w.prefix().len();
    let per = w.period().len();
    let bound = d + pre + (t.state_bound().unwrap_or(1 << 20) + 1) * per;
    let start = {
        let s = d.max(pre);
        pre + (s - pre).div_ceil(per) * per
    };
    let mut state = single_initial(t)?;
    let mut out: Vec<i8> = Vec::new();
    let mut seen: HashMap<T::State, usize> = HashMap::new();
    let mut read = 0;
    loop {
        if read >= start && (read - pre) % per == 0 {
            if let Some(&first) = seen.get(&state) {
                let (a, b) = (first - d, read - d);
                let output = Lasso::new(out[..a].to_vec(), out[a..b].to_vec())?;
                let value = output.value();
                return Ok(ExactOutput {
                    output,
                    value,
                    steps: read,
                });
            }
            seen.insert(state.clone(), read);
        }
        if read > bound {
            return Err(Error::NoCycle { bound });
        }
        let (b, next) = det_step(t, &state, w.at(read), read)?;
        out.extend(b);
        state = next;
        read += 1;
    }
}

/// Outcome of [`computes_on_grid`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridCheck {
    pub pass: bool,
    pub max_deviation: Rational,
    pub worst_input: Option<Lasso<u8>>,
    pub dead_inputs: usize,
    pub max_live_runs: usize,
}

/// Checks a transducer against an oracle on every binary representation of every
/// dyadic `k/2^depth`: some run survives `n + delay` digits and every surviving
/// output of length `n` is within `2^-(n-1) + 2^-n` of the oracle.
pub fn computes_on_grid<T: Transducer>(
    t: &T,
    oracle: impl Fn(&Rational) -> Rational,
    depth: u32,
    n: usize,
) -> Result<GridCheck> {
    let tol = pow2(-(n as i64 - 1)) + pow2(-(n as i64));
    let mut check = GridCheck {
        pass: true,
        max_deviation: Rational::from_integer(0.into()),
        worst_input: None,
        dead_inputs: 0,
        max_live_runs: 0,
    };
    for x in crate::digits::dyadic_grid(depth) {
        let target = oracle(&x);
        for rep in crate::digits::binary_expansions(&x)? {
            let input: Vec<i8> = rep
                .take(n + t.delay())
                .into_iter()
                .map(|b| b as i8)
                .collect();
            let rs = run_word(t, &input)?;
            check.max_live_runs = check.max_live_runs.max(rs.len());
            if rs.is_empty() {
                check.pass = false;
                check.dead_inputs += 1;
                continue;
            }
            for out in rs.outputs() {
                let dev = (digits_value(out.iter().copied()) - &target).abs();
                if dev > check.max_deviation {
                    check.max_deviation = dev.clone();
                    check.worst_input = Some(rep.clone());
                }
                if dev > tol {
                    check.pass = false;
                }
            }
        }
    }
    Ok(check)
}

/// Builds the explicit reachable part of any transducer, up to `cap` states.
pub fn materialize<T: Transducer>(t: &T, cap: usize) -> Result<Fst> {
    let mut ids: HashMap<T::State, u32> = HashMap::new();
    let mut states: Vec<T::State> = Vec::new();
    let mut queue: VecDeque<(u32, usize)> = VecDeque::new();
    let mut expanded: HashSet<(u32, usize)> = HashSet::new();
    let d = t.delay();
    let mut intern = |s: T::State, states: &mut Vec<T::State>| -> Result<u32> {
        if let Some(&id) = ids.get(&s) {
            return Ok(id);
        }
        if states.len() >= cap {
            return Err(Error::StateCap {
                what: "transducer materialization",
                cap,
            });
        }
        let id = states.len() as u32;
        ids.insert(s.clone(), id);
        states.push(s);
        Ok(id)
    };
    let mut initial = Vec::new();
    for s in t.initial_states() {
        let id = intern(s, &mut states)?;
        initial.push(id);
        queue.push_back((id, 0));
    }
    let mut delay_transitions = Vec::new();
    let mut transitions = Vec::new();
    while let Some((id, phase)) = queue.pop_front() {
        if !expanded.insert((id, phase)) {
            continue;
        }
        let s = states[id as usize].clone();
        for &a in t.input_alphabet() {
            if phase < d {
                for next in t.delay_successors(&s, a)? {
                    let to = intern(next, &mut states)?;
                    delay_transitions.push((id, a, to));
                    queue.push_back((to, phase + 1));
                }
            } else {
                for (b, next) in t.successors(&s, a)? {
                    let to = intern(next, &mut states)?;
                    transitions.push((id, a, b, to));
                    queue.push_back((to, d));
                }
            }
        }
    }
    Fst::new(
        states.len(),
        t.input_alphabet().to_vec(),
        t.output_alphabet().to_vec(),
        initial,
        d,
        delay_transitions,
        transitions,
    )
}

/// Single-state transducer writing `0` forever.
pub fn constant_zero_writer(input_alphabet: Vec<i8>) -> DetFst {
    let transitions: Vec<_> = input_alphabet.iter().map(|&a| (0, a, 0, 0)).collect();
    DetFst::new(
        Fst::new(1, input_alphabet, vec![0, 1], vec![0], 0, [], transitions).expect("valid"),
    )
    .expect("deterministic")
}

/// Transducer copying its input after `delay` digits.
pub fn delayed_copier(delay: usize) -> DetFst {
    // States 0..delay hold the history as a binary number with a length marker.
    let mut ids: HashMap<Vec<i8>, u32> = HashMap::new();
    let mut order: Vec<Vec<i8>> = vec![vec![]];
    ids.insert(vec![], 0);
    let mut delay_transitions = Vec::new();
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let hist = order[i].clone();
        for a in [0i8, 1] {
            let mut next = hist.clone();
            next.push(a);
            let out = if hist.len() == delay {
                Some(next.remove(0))
            } else {
                None
            };
            let to = *ids.entry(next.clone()).or_insert_with(|| {
                order.push(next.clone());
                (order.len() - 1) as u32
            });
            match out {
                Some(b) => transitions.push((i as u32, a, b, to)),
                None => delay_transitions.push((i as u32, a, to)),
            }
        }
        i += 1;
    }
    DetFst::new(
        Fst::new(
            order.len(),
            vec![0, 1],
            vec![0, 1],
            vec![0],
            delay,
            delay_transitions,
            transitions,
        )
        .expect("valid"),
    )
    .expect("deterministic")
}
