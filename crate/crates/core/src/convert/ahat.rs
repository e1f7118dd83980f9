//! Nondeterministic binary transducer from a deterministic graph automaton.
//!
//! The transducer keeps the set `X` of surviving labels of the pruned output tree, the
//! first two output bits `γ` of the guess made one step earlier, a side flag and the
//! last `D` input bits. At every step the next `D + 1` input bits (the window) are
//! scanned by a forest search rooted at `X` to find a deep node whose path repeats an
//! accepting label. Two twin runs are alive at all times: the left one writes
//! `τ·0·1…` and the right one `τ·1·0…`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::buchi::{level_step, pair_symbol, DetBuchi, StateSet, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::transducer::Transducer;

/// Shallowest tree depth, relative to the current level, of a candidate node.
pub const MIN_CANDIDATE_DEPTH: usize = 4;
/// Default number of equal accepting labels required along a candidate path.
pub const DEFAULT_CHAIN_LEN: usize = 2;
/// Largest supported delay; windows are packed into 32 bits and paths into 64.
pub const MAX_DELAY: usize = 30;

/// Tunables of the ν search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NuConfig {
    pub chain_len: usize,
    pub set_cap: usize,
}

impl Default for NuConfig {
    fn default() -> Self {
        Self {
            chain_len: DEFAULT_CHAIN_LEN,
            set_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// Reachable label sets of the pruned output tree and their successors per input bit.
#[derive(Clone, Debug)]
pub struct SetGraph {
    sets: Vec<StateSet>,
    next: Vec<[u32; 2]>,
}

impl SetGraph {
    /// Closure of `{initial}` under one-level steps with dead labels dropped.
    pub fn build(a: &DetBuchi, live: &[bool], cap: usize) -> Result<Self> {
        if !live[a.initial() as usize] {
            return Err(Error::InvalidAutomaton(
                "initial state accepts nothing".into(),
            ));
        }
        let mut ids: HashMap<StateSet, u32> = HashMap::new();
        let mut sets = vec![vec![a.initial()]];
        ids.insert(sets[0].clone(), 0);
        let mut next = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = [0u32; 2];
            for bit in 0..2u8 {
                let child = level_step(a, &sets[i], bit, Some(live));
                if child.is_empty() {
                    return Err(Error::InvalidAutomaton(
                        "output tree dies out: the automaton is not a total graph".into(),
                    ));
                }
                row[bit as usize] = match ids.get(&child) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= cap {
                            return Err(Error::StateCap {
                                what: "reachable label sets",
                                cap,
                            });
                        }
                        let id = sets.len() as u32;
                        ids.insert(child.clone(), id);
                        sets.push(child);
                        id
                    }
                };
            }
            next.push(row);
            i += 1;
        }
        Ok(Self { sets, next })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn set(&self, id: u32) -> &[u32] {
        &self.sets[id as usize]
    }

    pub fn next(&self, id: u32, bit: u8) -> u32 {
        self.next[id as usize][bit as usize]
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    label: u32,
    parent: u32,
    root: u32,
    path: u64,
}

/// Depth-first search over input windows, one forest level per window bit.
struct Forest<'a> {
    automaton: &'a DetBuchi,
    live: &'a [bool],
    chain_len: usize,
    levels: Vec<Vec<Node>>,
    depth: usize,
    scratch: Vec<Node>,
    counts: Vec<u32>,
}

impl<'a> Forest<'a> {
    fn new(automaton: &'a DetBuchi, live: &'a [bool], chain_len: usize, roots: &[u32]) -> Self {
        let level = roots
            .iter()
            .enumerate()
            .map(|(i, &label)| Node {
                label,
                parent: u32::MAX,
                root: i as u32,
                path: 0,
            })
            .collect();
        Self {
            automaton,
            live,
            chain_len,
            levels: vec![level],
            depth: 0,
            scratch: Vec::new(),
            counts: vec![0; automaton.num_states()],
        }
    }

    /// Pushes the level reached by reading input bit `x`.
    fn push(&mut self, x: u8) {
        let d = self.depth;
        if self.levels.len() == d + 1 {
            self.levels.push(Vec::new());
        }
        let (upper, lower) = self.levels.split_at_mut(d + 1);
        let top = &upper[d];
        self.scratch.clear();
        for (i, n) in top.iter().enumerate() {
            for y in 0..2u8 {
                let label = self.automaton.step(n.label, pair_symbol(x, y));
                self.counts[label as usize] += 1;
                self.scratch.push(Node {
                    label,
                    parent: i as u32,
                    root: n.root,
                    path: n.path << 1 | u64::from(y),
                });
            }
        }
        let kept = &mut lower[0];
        kept.clear();
        for c in &self.scratch {
            if self.counts[c.label as usize] == 1 && self.live[c.label as usize] {
                kept.push(*c);
            }
        }
        for c in &self.scratch {
            self.counts[c.label as usize] = 0;
        }
        self.depth += 1;
    }

    fn pop(&mut self) {
        self.depth -= 1;
    }

    /// First two output bits of the best candidate on the deepest level; ties go to
    /// the earlier root and then to the smaller output word.
    fn candidate(&self) -> Option<u8> {
        let d = self.depth;
        if d < MIN_CANDIDATE_DEPTH {
            return None;
        }
        self.levels[d]
            .iter()
            .enumerate()
            .filter(|(_, n)| self.automaton.is_accepting(n.label))
            .filter(|&(i, n)| self.chain_count(i, n.label) >= self.chain_len)
            .map(|(_, n)| (n.root, n.path))
            .min()
            .map(|(_, path)| ((path >> (d - 2)) & 3) as u8)
    }

    fn chain_count(&self, index: usize, label: u32) -> usize {
        let mut count = 0;
        let mut i = index;
        for k in (MIN_CANDIDATE_DEPTH..=self.depth).rev() {
            let n = &self.levels[k][i];
            if n.label == label {
                count += 1;
            }
            i = n.parent as usize;
        }
        count
    }

    /// Visits every window of `width` bits below the current level with the guess
    /// from the deepest level that has a candidate.
    fn scan(
        &mut self,
        width: usize,
        window: u32,
        best: Option<u8>,
        visit: &mut impl FnMut(u32, Option<u8>) -> bool,
    ) -> bool {
        let best = self.candidate().or(best);
        if self.depth == width {
            return visit(window, best);
        }
        for x in 0..2u8 {
            self.push(x);
            let go_on = self.scan(width, window << 1 | u32::from(x), best, visit);
            self.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Deepest first-candidate depth over all branches, or `None` when some branch
    /// reaches `limit` without a candidate.
    fn first_candidate_depth(&mut self, limit: usize) -> Option<usize> {
        if self.candidate().is_some() {
            return Some(self.depth);
        }
        if self.depth == limit {
            return None;
        }
        let mut worst = 0;
        for x in 0..2u8 {
            self.push(x);
            let d = self.first_candidate_depth(limit);
            self.pop();
            worst = worst.max(d?);
        }
        Some(worst)
    }
}

/// The guess function ν over reachable sets and windows of `D + 1` bits, evaluated on
/// demand and memoized.
pub struct NuTable {
    automaton: DetBuchi,
    live: Vec<bool>,
    delay: usize,
    chain_len: usize,
    sets: SetGraph,
    memo: Mutex<HashMap<(u32, u32), u8>>,
}

impl fmt::Debug for NuTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NuTable")
            .field("delay", &self.delay)
            .field("chain_len", &self.chain_len)
            .field("sets", &self.sets.len())
            .finish()
    }
}

impl NuTable {
    /// Validates that ν is defined on every reachable set and window at this delay
    /// and that every window read from the initial set guesses `01`.
    pub fn build(a: &DetBuchi, delay: usize, config: NuConfig) -> Result<Self> {
        check_graph(a)?;
        if delay + 1 < MIN_CANDIDATE_DEPTH || delay > MAX_DELAY {
            return Err(Error::NuUndefined { delay });
        }
        let live = a.live_states();
        let sets = SetGraph::build(a, &live, config.set_cap)?;
        let width = delay + 1;
        for id in 0..sets.len() as u32 {
            let mut forest = Forest::new(a, &live, config.chain_len, sets.set(id));
            if forest.first_candidate_depth(width).is_none() {
                return Err(Error::NuUndefined { delay });
            }
        }
        let mut forest = Forest::new(a, &live, config.chain_len, sets.set(0));
        let mut found = None;
        forest.scan(width, 0, None, &mut |_, g| {
            if g != Some(0b01) {
                found = g;
                false
            } else {
                true
            }
        });
        if let Some(found) = found {
            return Err(Error::RangeAssumption { found });
        }
        Ok(Self {
            automaton: a.clone(),
            live,
            delay,
            chain_len: config.chain_len,
            sets,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn window_len(&self) -> usize {
        self.delay + 1
    }

    pub fn sets(&self) -> &SetGraph {
        &self.sets
    }

    pub fn automaton(&self) -> &DetBuchi {
        &self.automaton
    }

    /// `γ'` for set `set` and a window whose oldest bit is the most significant.
    pub fn guess(&self, set: u32, window: u32) -> Result<u8> {
        let key = (set, window);
        if let Some(&g) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(g);
        }
        let mut forest = Forest::new(
            &self.automaton,
            &self.live,
            self.chain_len,
            self.sets.set(set),
        );
        let mut best = None;
        for k in (0..self.window_len()).rev() {
            forest.push((window >> k) as u8 & 1);
            best = forest.candidate().or(best);
        }
        let g = best.ok_or(Error::NuUndefined { delay: self.delay })?;
        self.memo.lock().expect("memo lock").insert(key, g);
        Ok(g)
    }
}

fn check_graph(a: &DetBuchi) -> Result<()> {
    if a.is_graph_automaton() {
        Ok(())
    } else {
        Err(Error::InvalidAutomaton("expected a graph automaton".into()))
    }
}

/// Least delay for which ν is defined on every reachable set and window, at most `cap`.
pub fn discover_delay(a: &DetBuchi, cap: usize, chain_len: usize) -> Result<usize> {
    check_graph(a)?;
    let live = a.live_states();
    let sets = SetGraph::build(a, &live, DEFAULT_STATE_CAP)?;
    let cap = cap.min(MAX_DELAY);
    let mut width = MIN_CANDIDATE_DEPTH;
    for id in 0..sets.len() {
        let mut forest = Forest::new(a, &live, chain_len, sets.set(id as u32));
        let d = forest
            .first_candidate_depth(cap + 1)
            .ok_or(Error::DelayCap { cap })?;
        width = width.max(d);
    }
    Ok(width - 1)
}

/// Left or right twin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// State of the transducer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AHatState {
    /// Reading the first `D` input bits.
    Start { len: usize, hist: u32 },
    Run {
        set: u32,
        gamma: u8,
        side: Side,
        hist: u32,
    },
}

/// Data shared by both live runs: the twins differ only in their side flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairState {
    pub set: u32,
    pub gamma: u8,
    pub hist: u32,
}

/// How a step changes the right output `out_R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Both twins continue: `out_R·0`.
    Continue,
    /// The right twin splits and the left dies: `out_R·1`.
    SplitRight,
    /// The left twin splits and the right dies: `out_L·1`.
    SplitLeft,
}

impl StepKind {
    /// Change of `value(out_R)` in units of the new last output position.
    pub fn increment(self) -> i64 {
        match self {
            Self::Continue => 0,
            Self::SplitRight => 1,
            Self::SplitLeft => -1,
        }
    }
}

fn is_split(gamma: u8) -> bool {
    gamma == 0b01 || gamma == 0b10
}

/// The nondeterministic transducer built on a [`NuTable`].
#[derive(Clone, Debug)]
pub struct AHat {
    table: Arc<NuTable>,
    input: [i8; 2],
}

impl AHat {
    pub fn new(table: NuTable) -> Self {
        Self {
            table: Arc::new(table),
            input: [0, 1],
        }
    }

    pub fn table(&self) -> &NuTable {
        &self.table
    }

    fn hist_mask(&self) -> u32 {
        (1u32 << self.table.delay) - 1
    }

    fn oldest(&self, window: u32) -> u8 {
        (window >> self.table.delay) as u8 & 1
    }

    /// The twin pair after the first output, from the first `D + 1` input bits.
    pub fn start_pair(&self, window: u32) -> Result<PairState> {
        Ok(PairState {
            set: self.table.sets.next(0, self.oldest(window)),
            gamma: self.table.guess(0, window)?,
            hist: window & self.hist_mask(),
        })
    }

    /// One step of the twin pair on input bit `bit`.
    pub fn step_pair(&self, p: PairState, bit: u8) -> Result<(StepKind, PairState)> {
        let window = p.hist << 1 | u32::from(bit);
        let gamma = self.table.guess(p.set, window)?;
        let next = PairState {
            set: self.table.sets.next(p.set, self.oldest(window)),
            gamma,
            hist: window & self.hist_mask(),
        };
        let kind = match (is_split(gamma), p.gamma & 1) {
            (false, _) => StepKind::Continue,
            (true, 0) => StepKind::SplitRight,
            (true, _) => StepKind::SplitLeft,
        };
        Ok((kind, next))
    }

    /// Binary window from the first `D + 1` bits of `bits`.
    pub fn window_of(&self, bits: &[u8]) -> u32 {
        bits.iter()
            .take(self.table.window_len())
            .fold(0, |w, &b| w << 1 | u32::from(b))
    }
}

fn run(p: PairState, side: Side) -> AHatState {
    AHatState::Run {
        set: p.set,
        gamma: p.gamma,
        side,
        hist: p.hist,
    }
}

impl Transducer for AHat {
    type State = AHatState;

    fn delay(&self) -> usize {
        self.table.delay
    }

    fn input_alphabet(&self) -> &[i8] {
        &self.input
    }

    fn output_alphabet(&self) -> &[i8] {
        &self.input
    }

    fn initial_states(&self) -> Vec<AHatState> {
        vec![AHatState::Start { len: 0, hist: 0 }]
    }

    fn delay_successors(&self, s: &AHatState, a: i8) -> Result<Vec<AHatState>> {
        let bit = binary(a)?;
        match *s {
            AHatState::Start { len, hist } if len < self.table.delay => {
                Ok(vec![AHatState::Start {
                    len: len + 1,
                    hist: hist << 1 | u32::from(bit),
                }])
            }
            _ => Err(Error::Invariant(format!(
                "{s:?} is not a delay-phase state"
            ))),
        }
    }

    fn successors(&self, s: &AHatState, a: i8) -> Result<Vec<(i8, AHatState)>> {
        let bit = binary(a)?;
        match *s {
            AHatState::Start { hist, .. } => {
                let p = self.start_pair(hist << 1 | u32::from(bit))?;
                Ok(vec![(0, run(p, Side::Left)), (1, run(p, Side::Right))])
            }
            AHatState::Run {
                set,
                gamma,
                side,
                hist,
            } => {
                let (kind, p) = self.step_pair(PairState { set, gamma, hist }, bit)?;
                Ok(match (side, kind) {
                    (Side::Left, StepKind::Continue) => vec![(1, run(p, Side::Left))],
                    (Side::Right, StepKind::Continue) => vec![(0, run(p, Side::Right))],
                    (Side::Left, StepKind::SplitLeft) | (Side::Right, StepKind::SplitRight) => {
                        vec![(0, run(p, Side::Left)), (1, run(p, Side::Right))]
                    }
                    _ => Vec::new(),
                })
            }
        }
    }

    fn state_bound(&self) -> Option<usize> {
        let hist = 1usize << self.table.delay;
        Some(2 * hist + self.table.sets.len() * 4 * 2 * hist)
    }
}

fn binary(a: i8) -> Result<u8> {
    match a {
        0 | 1 => Ok(a as u8),
        _ => Err(Error::UnknownSymbol(a.to_string())),
    }
}

/// Builds the transducer, discovering the least delay up to `delay_cap` unless one is
/// supplied.
pub fn buchi_to_ntrans(
    a: &DetBuchi,
    delay: Option<usize>,
    delay_cap: usize,
    config: NuConfig,
) -> Result<AHat> {
    let d = match delay {
        Some(d) => d,
        None => discover_delay(a, delay_cap, config.chain_len)?,
    };
    Ok(AHat::new(NuTable::build(a, d, config)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::{determinize, DEFAULT_STATE_CAP};
    use crate::convert::pwl_to_buchi;
    use crate::digits::{rat, Rational};
    use crate::pwl::PwlFunction;
    use crate::transducer::{computes_on_grid, run_word};

    fn det(f: &PwlFunction) -> DetBuchi {
        let a = pwl_to_buchi(f, DEFAULT_STATE_CAP).unwrap();
        determinize(&a, DEFAULT_STATE_CAP).unwrap().0
    }

    fn normalized_identity() -> PwlFunction {
        PwlFunction::identity().normalize_range().unwrap()
    }

    #[test]
    fn constant_delay_is_small() {
        let a = det(&PwlFunction::constant(rat(5, 16)));
        let d = discover_delay(&a, 24, DEFAULT_CHAIN_LEN).unwrap();
        assert!(d < 10, "{d}");
        assert!(NuTable::build(&a, d, NuConfig::default()).is_ok());
        assert!(NuTable::build(&a, d + 1, NuConfig::default()).is_ok());
    }

    #[test]
    fn delay_below_discovered_is_undefined() {
        let a = det(&normalized_identity());
        let d = discover_delay(&a, 24, DEFAULT_CHAIN_LEN).unwrap();
        if d > 3 {
            assert_eq!(
                NuTable::build(&a, d - 1, NuConfig::default()).unwrap_err(),
                Error::NuUndefined { delay: d - 1 }
            );
        }
    }

    #[test]
    fn identity_pipeline_on_grid() {
        let f = normalized_identity();
        let t = buchi_to_ntrans(&det(&f), None, 24, NuConfig::default()).unwrap();
        let check = computes_on_grid(&t, |x: &Rational| f.eval(x).unwrap(), 6, 8).unwrap();
        assert!(check.pass, "{check:?}");
        assert_eq!(check.max_live_runs, 2);
    }

    #[test]
    fn two_runs_with_twin_outputs() {
        let f = normalized_identity();
        let t = buchi_to_ntrans(&det(&f), None, 24, NuConfig::default()).unwrap();
        let input: Vec<i8> = [
            0, 1, 1, 0, 1, 0, 0, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 1, 0, 1,
        ]
        .iter()
        .cycle()
        .take(t.delay() + 20)
        .copied()
        .collect();
        for k in t.delay() + 1..input.len() {
            let rs = run_word(&t, &input[..k]).unwrap();
            assert_eq!(rs.len(), 2);
            let outs: Vec<&[i8]> = rs.outputs().collect();
            let (l, r) = (outs[0], outs[1]);
            let j = l.iter().zip(r).position(|(a, b)| a != b).unwrap();
            let (lo, hi) = if l[j] == 0 { (l, r) } else { (r, l) };
            assert!(lo[j + 1..].iter().all(|&b| b == 1));
            assert!(hi[j + 1..].iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn range_assumption_is_checked() {
        let a = det(&PwlFunction::constant(rat(3, 4)));
        let d = discover_delay(&a, 24, DEFAULT_CHAIN_LEN).unwrap();
        assert!(matches!(
            NuTable::build(&a, d, NuConfig::default()),
            Err(Error::RangeAssumption { .. })
        ));
    }
}
