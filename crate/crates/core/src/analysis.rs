//! Exact probes of computed functions: Lipschitz estimates, continuity moduli,
//! rational preservation, grid equivalence, a state-budget obstruction, and the
//! runtime monitors for the transducer constructions.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::Direction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::buchi::{pair_symbol, BuchiAutomaton};
use crate::convert::ad::{run_monitored, Ad, AdMonitor};
use crate::convert::ahat::AHat;
use crate::digits::{
    binary_expansions, canonical_expansion, digits_value, dyadic_grid, format_rational, pow2, rat,
    Lasso, Rational,
};
use crate::error::{Error, Result};
use crate::transducer::{eval_exact_rational, run_word, step_all, GridCheck, RunSet, Transducer};

/// Outcome of a grid comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridReport {
    pub depth: u32,
    /// Output digits compared, for stream-based checks.
    pub precision: Option<usize>,
    pub max_deviation: Rational,
    pub worst_point: Option<Rational>,
    pub pass: bool,
}

impl GridReport {
    pub fn from_check(depth: u32, precision: usize, check: &GridCheck) -> Self {
        Self {
            depth,
            precision: Some(precision),
            max_deviation: check.max_deviation.clone(),
            worst_point: check.worst_input.as_ref().map(Lasso::value),
            pass: check.pass,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "depth": self.depth,
            "precision": self.precision,
            "max_deviation": format_rational(&self.max_deviation),
            "worst_point": self.worst_point.as_ref().map(format_rational),
            "pass": self.pass,
        })
    }
}

/// Binary lasso of `x` as transducer input.
pub fn signed_input(x: &Lasso<u8>) -> Lasso<i8> {
    x.map(|b| b as i8)
}

/// Exact output value of a deterministic transducer on the canonical expansion of `x`.
pub fn exact_value<T: Transducer>(t: &T, x: &Rational) -> Result<Rational> {
    Ok(eval_exact_rational(t, &signed_input(&canonical_expansion(x)?))?.value)
}

/// Largest slope between neighbouring points of the dyadic grid of `depth`.
///
/// Nondecreasing in `depth`: a coarse slope is the average of the finer slopes under it.
pub fn lipschitz_estimate(
    e: impl Fn(&Rational) -> Result<Rational>,
    depth: u32,
) -> Result<Rational> {
    let values = dyadic_grid(depth)
        .iter()
        .map(&e)
        .collect::<Result<Vec<_>>>()?;
    let scale = pow2(i64::from(depth));
    Ok(values
        .windows(2)
        .map(|w| (&w[1] - &w[0]).abs() * &scale)
        .max()
        .unwrap_or_else(Rational::zero))
}

/// Output digits [`graph_lookup`] may write before its state set repeats.
const GRAPH_LOOKUP_LIMIT: usize = 1 << 16;

/// The output lasso accepted together with `x`, read off the graph automaton.
///
/// Works on the product of `a` with the positions of `x`: keeps only product nodes
/// from which an accepting cycle is reachable and picks the least digit that keeps one.
/// Returns `None` when no output is accepted with `x`.
pub fn graph_lookup(a: &BuchiAutomaton, x: &Lasso<u8>) -> Result<Option<Lasso<u8>>> {
    let pre = x.prefix().len();
    let len = pre + x.period().len();
    let next_pos = |p: usize| if p + 1 < len { p + 1 } else { pre };
    let n = a.num_states();
    let node = |q: u32, p: usize| q as usize * len + p;
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n * len, 0);
    for _ in 0..n * len {
        graph.add_node(());
    }
    let succ = |q: u32, p: usize, y: u8| {
        a.successors(q, pair_symbol(x.at(p), y))
            .iter()
            .map(move |&t| (t, next_pos(p)))
    };
    for q in 0..n as u32 {
        for p in 0..len {
            for y in 0..2 {
                for (t, p2) in succ(q, p, y) {
                    graph.add_edge(NodeIndex::new(node(q, p)), NodeIndex::new(node(t, p2)), ());
                }
            }
        }
    }
    let mut good = vec![false; n * len];
    let mut stack = Vec::new();
    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if cyclic && scc.iter().any(|v| a.is_accepting((v.index() / len) as u32)) {
            for v in scc {
                if !good[v.index()] {
                    good[v.index()] = true;
                    stack.push(v);
                }
            }
        }
    }
    while let Some(v) = stack.pop() {
        for u in graph.neighbors_directed(v, Direction::Incoming) {
            if !good[u.index()] {
                good[u.index()] = true;
                stack.push(u);
            }
        }
    }
    let mut current: BTreeSet<(u32, usize)> = a
        .initial()
        .iter()
        .map(|&q| (q, 0))
        .filter(|&(q, p)| good[node(q, p)])
        .collect();
    let mut seen: HashMap<BTreeSet<(u32, usize)>, usize> = HashMap::new();
    let mut digits: Vec<u8> = Vec::new();
    let mut pos = 0;
    loop {
        if current.is_empty() {
            return Ok(None);
        }
        if pos >= pre {
            if let Some(&start) = seen.get(&current) {
                let y = Lasso::new(digits[..start].to_vec(), digits[start..].to_vec())?;
                if !a.accepts_graph(x, &y)? {
                    return Err(Error::Invariant(format!(
                        "graph lookup produced {y} for {x}"
                    )));
                }
                return Ok(Some(y));
            }
            seen.insert(current.clone(), digits.len());
        }
        let (y, next) = (0..2u8)
            .map(|y| {
                let next: BTreeSet<(u32, usize)> = current
                    .iter()
                    .flat_map(|&(q, p)| succ(q, p, y))
                    .filter(|&(q, p)| good[node(q, p)])
                    .collect();
                (y, next)
            })
            .find(|(_, next)| !next.is_empty())
            .unwrap_or((0, BTreeSet::new()));
        digits.push(y);
        current = next;
        pos = next_pos(pos);
        if digits.len() > GRAPH_LOOKUP_LIMIT {
            return Err(Error::NoCycle {
                bound: GRAPH_LOOKUP_LIMIT,
            });
        }
    }
}

/// Outcome of [`modulus_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusReport {
    pub j0: usize,
    /// Least passing `j1`, if one exists within `bound`.
    pub j1: Option<usize>,
    pub bound: usize,
    /// Input pairs compared for the last `j1` tried.
    pub pairs: usize,
}

impl ModulusReport {
    pub fn pass(&self) -> bool {
        self.j1.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "j0": self.j0,
            "j1": self.j1,
            "bound": self.bound,
            "pairs": self.pairs,
            "pass": self.pass(),
        })
    }
}

/// Grid depth enumerated in full by [`modulus_probe`].
const MODULUS_FULL_DEPTH: usize = 10;
/// Extra pairs sampled per candidate `j1` past that depth.
const MODULUS_SAMPLES: usize = 256;
const MODULUS_SEED: u64 = 0x6d6f64;

/// Values of all surviving `len`-digit outputs on input `x`.
fn output_values<T: Transducer>(t: &T, x: &Lasso<u8>, len: usize) -> Result<Vec<Rational>> {
    let input: Vec<i8> = x
        .take(len + t.delay())
        .into_iter()
        .map(|b| b as i8)
        .collect();
    let rs = run_word(t, &input)?;
    Ok(rs
        .outputs()
        .map(|o| digits_value(o.iter().copied()))
        .collect())
}

/// Least `j1 ≤ j0 + D + 8` such that inputs whose values are within `2^-j1` of each
/// other give outputs within `2^-j0`, over every representation of neighbouring grid
/// points of depth `j1` (past depth 10, the depth-10 points plus a seeded sample).
/// Outputs are compared on their first `j0 + 3` digits.
pub fn modulus_probe<T: Transducer>(t: &T, j0: usize) -> Result<ModulusReport> {
    let bound = j0 + t.delay() + 8;
    let len = j0 + 3;
    let tol = pow2(-(j0 as i64));
    let mut rng = ChaCha8Rng::seed_from_u64(MODULUS_SEED);
    let mut pairs = 0;
    'candidates: for j1 in 0..=bound {
        let den = 1u64 << j1;
        let starts: Vec<u64> = if j1 <= MODULUS_FULL_DEPTH {
            (0..den).collect()
        } else {
            // Every coarse grid point keeps its two expansions under test.
            let stride = 1u64 << (j1 - MODULUS_FULL_DEPTH);
            (0..den)
                .step_by(stride as usize)
                .chain((0..MODULUS_SAMPLES).map(|_| rng.gen_range(0..den)))
                .collect()
        };
        pairs = 0;
        for k in starts {
            let x = Rational::new((k as i64).into(), (den as i64).into());
            let y = Rational::new((k as i64 + 1).into(), (den as i64).into());
            let mut values = Vec::new();
            for p in [&x, &y] {
                for rep in binary_expansions(p)? {
                    values.extend(output_values(t, &rep, len)?);
                }
            }
            pairs += 1;
            let (lo, hi) = (values.iter().min(), values.iter().max());
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if hi - lo > tol {
                    continue 'candidates;
                }
            }
        }
        return Ok(ModulusReport {
            j0,
            j1: Some(j1),
            bound,
            pairs,
        });
    }
    Ok(ModulusReport {
        j0,
        j1: None,
        bound,
        pairs,
    })
}

/// Outcome of [`rational_preservation_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalReport {
    pub inputs: usize,
    pub max_steps: usize,
    pub max_period: usize,
    pub failures: Vec<String>,
}

impl RationalReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "inputs": self.inputs,
            "max_steps": self.max_steps,
            "max_period": self.max_period,
            "failures": self.failures,
            "pass": self.pass(),
        })
    }
}

/// Rationals `p/q` in `[0, 1]` with `q ≤ max_den`, each once.
pub fn rationals_up_to(max_den: u32) -> Vec<Rational> {
    let mut xs: Vec<Rational> = (1..=i64::from(max_den))
        .flat_map(|q| (0..=q).map(move |p| rat(p, q)))
        .collect();
    xs.sort();
    xs.dedup();
    xs
}

/// Exact evaluation terminates with a lasso on every binary representation of every
/// rational with denominator at most `max_den`, and the output period is at most the
/// state bound times the input period.
pub fn rational_preservation_check<T: Transducer>(t: &T, max_den: u32) -> Result<RationalReport> {
    let mut report = RationalReport {
        inputs: 0,
        max_steps: 0,
        max_period: 0,
        failures: Vec::new(),
    };
    for x in rationals_up_to(max_den) {
        for rep in binary_expansions(&x)? {
            report.inputs += 1;
            match eval_exact_rational(t, &signed_input(&rep)) {
                Ok(out) => {
                    let period = out.output.period().len();
                    report.max_steps = report.max_steps.max(out.steps);
                    report.max_period = report.max_period.max(period);
                    if let Some(states) = t.state_bound() {
                        if period > states.saturating_mul(rep.period().len()) {
                            report
                                .failures
                                .push(format!("{rep}: period {period} exceeds the state bound"));
                        }
                    }
                }
                Err(e) => report.failures.push(format!("{rep}: {e}")),
            }
        }
    }
    Ok(report)
}

/// Compares two evaluators on every point of the dyadic grid of `depth`.
pub fn equivalence_on_grid(
    e1: impl Fn(&Rational) -> Result<Rational>,
    e2: impl Fn(&Rational) -> Result<Rational>,
    depth: u32,
    tol: &Rational,
) -> Result<GridReport> {
    let mut max_deviation = Rational::zero();
    let mut worst_point = None;
    for x in dyadic_grid(depth) {
        let dev = (e1(&x)? - e2(&x)?).abs();
        if worst_point.is_none() || dev > max_deviation {
            max_deviation = dev;
            worst_point = Some(x);
        }
    }
    Ok(GridReport {
        depth,
        precision: None,
        pass: &max_deviation <= tol,
        max_deviation,
        worst_point,
    })
}

/// Outcome of [`base_obstruction_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub budget: usize,
    /// Some `n` with `v2(den f(2^-n)) > n + budget`.
    pub witness: Option<u32>,
    pub searched_up_to: u32,
}

impl ObstructionReport {
    pub fn found(&self) -> bool {
        self.witness.is_some()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "budget": self.budget,
            "witness": self.witness,
            "searched_up_to": self.searched_up_to,
            "pass": self.found(),
        })
    }
}

/// Power of two in the reduced denominator of `q`.
pub fn denominator_two_adic(q: &Rational) -> u64 {
    q.denom().trailing_zeros().unwrap_or(0)
}

/// Looks for a proof that no deterministic signed-binary transducer with at most
/// `budget` states computes `e`.
///
/// On input `0^{n-1}10^ω` such a machine has written at most `n` digits when its state
/// stops depending on the input; from there the output on `0^ω` is a lasso with
/// prefix and period summing to at most `budget`. So `f(2^-n)` has a denominator whose
/// power of two is at most `n + budget`. A larger power for some `n ≤ 2·budget + 8`
/// rules the budget out.
pub fn base_obstruction_probe(
    e: impl Fn(&Rational) -> Result<Rational>,
    budget: usize,
) -> Result<ObstructionReport> {
    let searched_up_to = 2 * budget as u32 + 8;
    let mut witness = None;
    for n in 1..=searched_up_to {
        let v = e(&pow2(-i64::from(n)))?;
        if denominator_two_adic(&v) > u64::from(n) + budget as u64 {
            witness = Some(n);
            break;
        }
    }
    Ok(ObstructionReport {
        budget,
        witness,
        searched_up_to,
    })
}

/// Counts from the runtime monitors of the transducer constructions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    /// Prefixes checked on the nondeterministic transducer.
    pub prefixes: usize,
    /// Prefixes past the delay without exactly two live runs.
    pub live_runs: usize,
    /// Prefixes whose two outputs are not `τ·01^k` and `τ·10^k`.
    pub twin_shape: usize,
    /// Totals over every deterministic run.
    pub ad: AdMonitor,
    pub ad_runs: usize,
    pub relative_samples: usize,
    pub relative_position: usize,
}

impl InvariantReport {
    pub fn violations(&self) -> usize {
        self.live_runs + self.twin_shape + self.ad.violations() + self.relative_position
    }

    pub fn pass(&self) -> bool {
        self.violations() == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "prefixes": self.prefixes,
            "two_live_runs_violations": self.live_runs,
            "twin_shape_violations": self.twin_shape,
            "ad_runs": self.ad_runs,
            "ad_steps": self.ad.steps,
            "debt_violations": self.ad.debt,
            "offset_violations": self.ad.offset,
            "triple_split_violations": self.ad.triple_split,
            "collapse_violations": self.ad.collapse,
            "collapse_episodes": self.ad.collapse_episodes,
            "relative_samples": self.relative_samples,
            "relative_position_violations": self.relative_position,
            "pass": self.pass(),
        })
    }
}

/// Two equal-length outputs of the shape `τ·01^k` and `τ·10^k`, in either order.
pub fn is_twin_pair(a: &[i8], b: &[i8]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(p) = a.iter().zip(b).position(|(x, y)| x != y) else {
        return false;
    };
    let (low, high) = if a[p] < b[p] { (a, b) } else { (b, a) };
    low[p] == 0
        && high[p] == 1
        && low[p + 1..].iter().all(|&d| d == 1)
        && high[p + 1..].iter().all(|&d| d == 0)
}

fn check_runs<S: Clone + Eq + std::hash::Hash>(
    rs: &RunSet<S>,
    delay: usize,
    report: &mut InvariantReport,
) {
    if rs.read() <= delay {
        return;
    }
    report.prefixes += 1;
    let outs: Vec<&[i8]> = rs.outputs().collect();
    match outs.as_slice() {
        [a, b] => {
            if !is_twin_pair(a, b) {
                report.twin_shape += 1;
            }
        }
        _ => report.live_runs += 1,
    }
}

/// Follows every prefix of `input` on `ahat`, checking two live runs of twin shape.
pub fn monitor_ahat(ahat: &AHat, input: &[u8], report: &mut InvariantReport) -> Result<()> {
    let mut rs = RunSet::start(ahat);
    for &b in input {
        rs = step_all(ahat, &rs, b as i8)?;
        check_runs(&rs, ahat.delay(), report);
    }
    Ok(())
}

/// Right output of `ahat` after reading `bits`: the larger of the two live outputs.
fn right_output(ahat: &AHat, bits: &[u8]) -> Result<Option<Rational>> {
    let input: Vec<i8> = bits.iter().map(|&b| b as i8).collect();
    let rs = run_word(ahat, &input)?;
    Ok(rs.outputs().map(|o| digits_value(o.iter().copied())).max())
}

fn bits_of(value: u64, len: usize) -> Vec<u8> {
    (0..len)
        .map(|i| ((value >> (len - 1 - i)) & 1) as u8)
        .collect()
}

/// Samples window pairs `σ0, σ1` of length `n + D` whose values differ by at most
/// `2^-(n+D)` and checks that the right outputs differ by at most `2^-n`.
pub fn relative_position_probe(
    ahat: &AHat,
    samples: usize,
    max_n: usize,
    seed: u64,
    report: &mut InvariantReport,
) -> Result<()> {
    let d = ahat.delay();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let n = rng.gen_range(1..=max_n);
        let len = n + d;
        if len > 62 {
            continue;
        }
        let top = 1u64 << len;
        let v0 = rng.gen_range(0..top);
        let v1 = if v0 + 1 < top { v0 + 1 } else { v0 - 1 };
        let (Some(r0), Some(r1)) = (
            right_output(ahat, &bits_of(v0, len))?,
            right_output(ahat, &bits_of(v1, len))?,
        ) else {
            report.live_runs += 1;
            continue;
        };
        report.relative_samples += 1;
        if (r0 - r1).abs() > pow2(-(n as i64)) {
            report.relative_position += 1;
        }
    }
    Ok(())
}

/// Runs `ad` over `input`, adding its monitor counts to `report`.
pub fn monitor_ad(ad: &Ad, input: &[i8], report: &mut InvariantReport) -> Result<()> {
    let (_, m) = run_monitored(ad, input)?;
    report.ad_runs += 1;
    let total = &mut report.ad;
    total.steps += m.steps;
    total.debt += m.debt;
    total.offset += m.offset;
    total.triple_split += m.triple_split;
    total.collapse += m.collapse;
    total.collapse_episodes += m.collapse_episodes;
    Ok(())
}

/// Settings for [`check_invariants`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvariantConfig {
    /// Grid depth of the binary inputs.
    pub depth: u32,
    /// Output digits produced per input.
    pub length: usize,
    /// Random signed inputs for the deterministic transducer.
    pub signed_samples: usize,
    pub relative_samples: usize,
    pub seed: u64,
}

impl Default for InvariantConfig {
    fn default() -> Self {
        Self {
            depth: 6,
            length: 16,
            signed_samples: 200,
            relative_samples: 100,
            seed: 0x5eed,
        }
    }
}

/// Every monitor over every binary representation of the grid points, random signed
/// inputs, and sampled window pairs.
pub fn check_invariants(ad: &Ad, config: &InvariantConfig) -> Result<InvariantReport> {
    let ahat = ad.ahat();
    let mut report = InvariantReport::default();
    for x in dyadic_grid(config.depth) {
        for rep in binary_expansions(&x)? {
            let bits = rep.take(ad.delay() + config.length);
            monitor_ahat(ahat, &bits[..ahat.delay() + config.length], &mut report)?;
            let input: Vec<i8> = bits.iter().map(|&b| b as i8).collect();
            monitor_ad(ad, &input, &mut report)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.signed_samples {
        let mut input: Vec<i8> = (0..ad.delay() + config.length)
            .map(|_| rng.gen_range(-1..=1))
            .collect();
        // Keep the value nonnegative: the first nonzero digit is 1.
        if let Some(p) = input.iter().position(|&d| d != 0) {
            input[p] = 1;
        }
        monitor_ad(ad, &input, &mut report)?;
    }
    relative_position_probe(
        ahat,
        config.relative_samples,
        config.length,
        config.seed,
        &mut report,
    )?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::{Pipeline, PipelineConfig};
    use crate::corpus::{f_z, first_digit_repeater, StreamingEvaluator, SupportPredicate};
    use crate::pwl::{tooth, PwlFunction};
    use crate::transducer::constant_zero_writer;

    fn pwl_eval(f: &PwlFunction) -> impl Fn(&Rational) -> Result<Rational> + '_ {
        move |x| f.eval(x)
    }

    #[test]
    fn lipschitz_examples() {
        let id = PwlFunction::identity().normalize_range().unwrap();
        for depth in 1..=6 {
            assert_eq!(lipschitz_estimate(pwl_eval(&id), depth).unwrap(), rat(1, 8));
        }
        let t = tooth(&rat(0, 1), &rat(1, 2), &rat(1, 1)).unwrap();
        for depth in 2..=6 {
            assert_eq!(lipschitz_estimate(pwl_eval(&t), depth).unwrap(), rat(4, 1));
        }
        let c = PwlFunction::constant(rat(1, 3));
        assert_eq!(lipschitz_estimate(pwl_eval(&c), 5).unwrap(), rat(0, 1));
    }

    #[test]
    fn equivalence_examples() {
        let t = tooth(&rat(1, 4), &rat(1, 2), &rat(1, 8)).unwrap();
        let r = equivalence_on_grid(pwl_eval(&t), pwl_eval(&t), 6, &pow2(-8)).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_deviation, rat(0, 1));
        let shifted = |x: &Rational| Ok(t.eval(x)? + pow2(-4));
        let r = equivalence_on_grid(pwl_eval(&t), shifted, 6, &pow2(-8)).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_deviation, pow2(-4));
        assert_eq!(r.to_json()["max_deviation"], "1/16");
    }

    #[test]
    fn obstruction_examples() {
        let everywhere = f_z(SupportPredicate::everywhere());
        for m in 1..=16 {
            assert!(
                base_obstruction_probe(|x| Ok(everywhere.eval(x)), m)
                    .unwrap()
                    .found(),
                "{m}"
            );
        }
        let finite = f_z(SupportPredicate::finite([3, 5]));
        for m in 6..=16 {
            assert!(
                !base_obstruction_probe(|x| Ok(finite.eval(x)), m)
                    .unwrap()
                    .found(),
                "{m}"
            );
        }
        for m in 1..=16 {
            assert!(!base_obstruction_probe(|_| Ok(rat(1, 3)), m)
                .unwrap()
                .found());
        }
    }

    #[test]
    fn modulus_examples() {
        let c = constant_zero_writer(vec![0, 1]);
        assert_eq!(modulus_probe(&c, 5).unwrap().j1, Some(0));
        let broken = first_digit_repeater();
        let r = modulus_probe(&broken, 3).unwrap();
        assert_eq!(r.j1, None);
    }

    #[test]
    fn graph_lookup_reads_values() {
        use crate::convert::pwl_to_buchi;
        let f = tooth(&rat(1, 4), &rat(1, 2), &rat(1, 8)).unwrap();
        let a = pwl_to_buchi(&f, 1 << 16).unwrap();
        for x in rationals_up_to(12) {
            for rep in binary_expansions(&x).unwrap() {
                let y = graph_lookup(&a, &rep).unwrap().expect("in the domain");
                assert_eq!(y.value(), f.eval(&x).unwrap(), "{rep}");
            }
        }
        let step = crate::corpus::step_function_buchi();
        let y = graph_lookup(&step, &"0(1)".parse().unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(y.value(), rat(1, 1));
    }

    #[test]
    fn twin_shapes() {
        assert!(is_twin_pair(&[1, 0, 1, 1], &[1, 1, 0, 0]));
        assert!(is_twin_pair(&[0, 1], &[1, 0]));
        assert!(!is_twin_pair(&[0, 1], &[0, 1]));
        assert!(!is_twin_pair(&[0, 1, 0], &[1, 0, 0]));
    }

    #[test]
    fn constant_pipeline_invariants() {
        let p = Pipeline::build(
            &PwlFunction::constant(rat(1, 2)),
            &PipelineConfig::default(),
        )
        .unwrap();
        let report = check_invariants(&p.ad, &InvariantConfig::default()).unwrap();
        assert!(report.pass(), "{report:?}");
        assert!(report.prefixes > 0 && report.relative_samples > 0);
        let rr = rational_preservation_check(&p.ad, 12).unwrap();
        assert!(rr.pass(), "{rr:?}");
    }
}
