//! Büchi automata on ultimately periodic words, determinization, and the pruned
//! output tree of a deterministic graph automaton.
//!
//! Graph automata read pairs `(x_i, y_i)` of input and output bits as one symbol of
//! the alphabet `["00", "01", "10", "11"]`, symbol index `2·x + y`.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::digits::{BinaryWord, Lasso};
use crate::error::{Error, Result};

/// Default cap on states produced by lazy constructions.
pub const DEFAULT_STATE_CAP: usize = 1 << 16;

/// Symbols of a graph automaton.
pub const GRAPH_ALPHABET: [&str; 4] = ["00", "01", "10", "11"];

/// Symbol index of the pair `(x, y)`.
pub fn pair_symbol(x: u8, y: u8) -> usize {
    usize::from(2 * x + y)
}

pub fn graph_alphabet() -> Vec<String> {
    GRAPH_ALPHABET.iter().map(|s| s.to_string()).collect()
}

/// Positionwise pairing of two binary lassos.
///
/// The prefix has the longer of the two prefix lengths and the period the least
/// common multiple of the two period lengths.
pub fn interleave(x: &Lasso<u8>, y: &Lasso<u8>) -> Lasso<(u8, u8)> {
    let pre = x.prefix().len().max(y.prefix().len());
    let per = lcm(x.period().len(), y.period().len());
    let pair = |i: usize| (x.at(i), y.at(i));
    Lasso::new(
        (0..pre).map(pair).collect(),
        (pre..pre + per).map(pair).collect(),
    )
    .expect("period nonempty")
}

/// Interleaved pair lasso as symbol indices of a graph automaton.
pub fn graph_word(x: &Lasso<u8>, y: &Lasso<u8>) -> Lasso<usize> {
    interleave(x, y).map(|(a, b)| pair_symbol(a, b))
}

fn lcm(a: usize, b: usize) -> usize {
    a / num_integer::gcd(a, b) * b
}

/// Nondeterministic Büchi automaton with integer states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Vec<String>,
    initial: Vec<u32>,
    accepting: Vec<bool>,
    delta: Vec<Vec<Vec<u32>>>,
}

impl BuchiAutomaton {
    /// Builds from a transition list `(from, symbol index, to)`.
    pub fn new(
        states: usize,
        alphabet: Vec<String>,
        initial: Vec<u32>,
        accepting: Vec<u32>,
        transitions: impl IntoIterator<Item = (u32, usize, u32)>,
    ) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidAutomaton("empty alphabet".into()));
        }
        let in_range = |s: u32| (s as usize) < states;
        if let Some(s) = initial.iter().chain(&accepting).find(|&&s| !in_range(s)) {
            return Err(Error::InvalidAutomaton(format!("state {s} out of range")));
        }
        let mut delta = vec![vec![Vec::new(); alphabet.len()]; states];
        for (from, sym, to) in transitions {
            if !in_range(from) || !in_range(to) {
                return Err(Error::InvalidAutomaton(format!(
                    "transition {from} -> {to} out of range"
                )));
            }
            let row: &mut Vec<u32> = delta[from as usize]
                .get_mut(sym)
                .ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?;
            row.push(to);
        }
        for row in delta.iter_mut().flatten() {
            row.sort_unstable();
            row.dedup();
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        let mut acc = vec![false; states];
        for s in accepting {
            acc[s as usize] = true;
        }
        Ok(Self {
            alphabet,
            initial,
            accepting: acc,
            delta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    pub fn accepting_states(&self) -> Vec<u32> {
        (0..self.num_states() as u32)
            .filter(|&s| self.is_accepting(s))
            .collect()
    }

    pub fn successors(&self, s: u32, sym: usize) -> &[u32] {
        &self.delta[s as usize][sym]
    }

    /// All transitions as `(from, symbol index, to)`.
    pub fn transitions(&self) -> impl Iterator<Item = (u32, usize, u32)> + '_ {
        self.delta.iter().enumerate().flat_map(|(s, row)| {
            row.iter()
                .enumerate()
                .flat_map(move |(a, ts)| ts.iter().map(move |&t| (s as u32, a, t)))
        })
    }

    pub fn is_graph_automaton(&self) -> bool {
        self.alphabet == graph_alphabet()
    }

    pub fn symbol_index(&self, name: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    fn check_word(&self, w: &Lasso<usize>) -> Result<()> {
        match w
            .prefix()
            .iter()
            .chain(w.period())
            .find(|&&a| a >= self.alphabet.len())
        {
            Some(a) => Err(Error::UnknownSymbol(a.to_string())),
            None => Ok(()),
        }
    }

    /// States reachable from the initial set after reading `word`.
    pub fn post(&self, word: &[usize]) -> Vec<u32> {
        word.iter().fold(self.initial.clone(), |set, &a| {
            let mut next: Vec<u32> = set
                .iter()
                .flat_map(|&s| self.successors(s, a).iter().copied())
                .collect();
            next.sort_unstable();
            next.dedup();
            next
        })
    }

    /// Exact Büchi acceptance of `prefix · period^ω`.
    ///
    /// After the prefix, searches the product of states with period positions for a
    /// reachable strongly connected component that has an internal edge and contains
    /// an accepting state.
    pub fn accepts_lasso(&self, w: &Lasso<usize>) -> Result<bool> {
        self.check_word(w)?;
        let start = self.post(w.prefix());
        if start.is_empty() {
            return Ok(false);
        }
        let period = w.period();
        let p = period.len();
        let mut graph: DiGraph<(u32, usize), ()> = DiGraph::new();
        let mut index: HashMap<(u32, usize), NodeIndex> = HashMap::new();
        let mut queue = VecDeque::new();
        for &s in &start {
            let n = graph.add_node((s, 0));
            index.insert((s, 0), n);
            queue.push_back((s, 0));
        }
        while let Some((s, i)) = queue.pop_front() {
            let from = index[&(s, i)];
            let j = (i + 1) % p;
            for &t in self.successors(s, period[i]) {
                let to = *index.entry((t, j)).or_insert_with(|| {
                    queue.push_back((t, j));
                    graph.add_node((t, j))
                });
                graph.add_edge(from, to, ());
            }
        }
        Ok(tarjan_scc(&graph).into_iter().any(|scc| {
            let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
            cyclic && scc.iter().any(|&n| self.is_accepting(graph[n].0))
        }))
    }

    /// Acceptance of the pair word `x ⊕ y` by a graph automaton.
    pub fn accepts_graph(&self, x: &Lasso<u8>, y: &Lasso<u8>) -> Result<bool> {
        self.accepts_lasso(&graph_word(x, y))
    }

    /// States from which some accepting cycle is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut graph: DiGraph<u32, ()> = DiGraph::with_capacity(n, 0);
        for s in 0..n as u32 {
            graph.add_node(s);
        }
        for (s, _, t) in self.transitions() {
            graph.update_edge(NodeIndex::new(s as usize), NodeIndex::new(t as usize), ());
        }
        let mut live = vec![false; n];
        let mut queue = VecDeque::new();
        for scc in tarjan_scc(&graph) {
            let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
            if cyclic && scc.iter().any(|&v| self.is_accepting(v.index() as u32)) {
                for v in scc {
                    live[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for u in graph.neighbors_directed(v, petgraph::Direction::Incoming) {
                if !live[u.index()] {
                    live[u.index()] = true;
                    queue.push_back(u);
                }
            }
        }
        live
    }

    /// Restriction to live states, renumbered.
    pub fn trimmed(&self) -> Self {
        let live = self.live_states();
        let mut map = vec![u32::MAX; self.num_states()];
        let mut count = 0u32;
        for (s, &l) in live.iter().enumerate() {
            if l {
                map[s] = count;
                count += 1;
            }
        }
        let keep = |s: u32| map[s as usize] != u32::MAX;
        Self::new(
            count as usize,
            self.alphabet.clone(),
            self.initial
                .iter()
                .copied()
                .filter(|&s| keep(s))
                .map(|s| map[s as usize])
                .collect(),
            self.accepting_states()
                .into_iter()
                .filter(|&s| keep(s))
                .map(|s| map[s as usize])
                .collect(),
            self.transitions()
                .filter(|&(s, _, t)| keep(s) && keep(t))
                .map(|(s, a, t)| (map[s as usize], a, map[t as usize]))
                .collect::<Vec<_>>(),
        )
        .expect("trimming preserves validity")
    }

    /// True iff no nonaccepting state can reach an accepting cycle.
    ///
    /// For such automata every infinite run through live states is accepting, so the
    /// plain subset construction is exact.
    pub fn is_safety_shaped(&self) -> bool {
        self.live_states()
            .iter()
            .enumerate()
            .all(|(s, &l)| !l || self.accepting[s])
    }
}

/// Sorted list of states, used as a macro-state.
pub type StateSet = Vec<u32>;

/// Visited-set normalization: states `(s, V)` with `V` the states seen strictly before
/// the current one. `(s, V)` is accepting iff `s` is accepting and `s ∈ V`.
pub fn normalize_repeat_accepting(a: &BuchiAutomaton, cap: usize) -> Result<BuchiAutomaton> {
    let mut ids: HashMap<(u32, StateSet), u32> = HashMap::new();
    let mut order: Vec<(u32, StateSet)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (u32, StateSet),
                      order: &mut Vec<(u32, StateSet)>,
                      queue: &mut VecDeque<u32>|
     -> Result<u32> {
        if let Some(&id) = ids.get(&key) {
            return Ok(id);
        }
        if order.len() >= cap {
            return Err(Error::StateCap {
                what: "visited-set normalization",
                cap,
            });
        }
        let id = order.len() as u32;
        ids.insert(key.clone(), id);
        order.push(key);
        queue.push_back(id);
        Ok(id)
    };
    let mut initial = Vec::new();
    for &s in a.initial() {
        initial.push(intern((s, Vec::new()), &mut order, &mut queue)?);
    }
    let mut transitions = Vec::new();
    while let Some(id) = queue.pop_front() {
        let (s, visited) = order[id as usize].clone();
        let mut next_visited = visited;
        if let Err(pos) = next_visited.binary_search(&s) {
            next_visited.insert(pos, s);
        }
        for sym in 0..a.alphabet().len() {
            for &t in a.successors(s, sym) {
                let to = intern((t, next_visited.clone()), &mut order, &mut queue)?;
                transitions.push((id, sym, to));
            }
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, (s, v))| a.is_accepting(*s) && v.binary_search(s).is_ok())
        .map(|(i, _)| i as u32)
        .collect();
    BuchiAutomaton::new(
        order.len(),
        a.alphabet().to_vec(),
        initial,
        accepting,
        transitions,
    )
}

/// Deterministic Büchi automaton with a total transition function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetBuchi {
    alphabet: Vec<String>,
    initial: u32,
    accepting: Vec<bool>,
    delta: Vec<Vec<u32>>,
}

impl DetBuchi {
    /// Builds from a table `delta[state][symbol]`.
    pub fn new(
        alphabet: Vec<String>,
        initial: u32,
        accepting: Vec<u32>,
        delta: Vec<Vec<u32>>,
    ) -> Result<Self> {
        let n = delta.len();
        if alphabet.is_empty() || initial as usize >= n {
            return Err(Error::InvalidAutomaton(
                "deterministic automaton needs an alphabet and a valid initial state".into(),
            ));
        }
        for (s, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::InvalidAutomaton(format!(
                    "state {s} has {} transitions, expected {}",
                    row.len(),
                    alphabet.len()
                )));
            }
            if let Some(t) = row.iter().find(|&&t| t as usize >= n) {
                return Err(Error::InvalidAutomaton(format!("target {t} out of range")));
            }
        }
        let mut acc = vec![false; n];
        for s in accepting {
            *acc.get_mut(s as usize).ok_or_else(|| {
                Error::InvalidAutomaton(format!("accepting state {s} out of range"))
            })? = true;
        }
        Ok(Self {
            alphabet,
            initial,
            accepting: acc,
            delta,
        })
    }

    /// Reads a nondeterministic automaton that happens to be deterministic and total.
    pub fn from_buchi(a: &BuchiAutomaton) -> Result<Self> {
        if a.initial().len() != 1 {
            return Err(Error::InvalidAutomaton(
                "need exactly one initial state".into(),
            ));
        }
        let delta = (0..a.num_states() as u32)
            .map(|s| {
                (0..a.alphabet().len())
                    .map(|sym| match a.successors(s, sym) {
                        [t] => Ok(*t),
                        ts => Err(Error::InvalidAutomaton(format!(
                            "state {s} has {} successors on symbol {sym}",
                            ts.len()
                        ))),
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<u32>>>>()?;
        Self::new(
            a.alphabet().to_vec(),
            a.initial()[0],
            a.accepting_states(),
            delta,
        )
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn is_accepting(&self, s: u32) -> bool {
        self.accepting[s as usize]
    }

    pub fn accepting_states(&self) -> Vec<u32> {
        (0..self.num_states() as u32)
            .filter(|&s| self.is_accepting(s))
            .collect()
    }

    pub fn step(&self, s: u32, sym: usize) -> u32 {
        self.delta[s as usize][sym]
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.delta
    }

    pub fn is_graph_automaton(&self) -> bool {
        self.alphabet == graph_alphabet()
    }

    pub fn run(&self, word: &[usize]) -> u32 {
        word.iter().fold(self.initial, |s, &a| self.step(s, a))
    }

    /// Exact acceptance of `prefix · period^ω` by following the unique run until its
    /// state at a period boundary repeats.
    pub fn accepts_lasso(&self, w: &Lasso<usize>) -> Result<bool> {
        if let Some(a) = w
            .prefix()
            .iter()
            .chain(w.period())
            .find(|&&a| a >= self.alphabet.len())
        {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        let mut s = self.run(w.prefix());
        let mut seen: HashMap<u32, usize> = HashMap::new();
        let mut trace: Vec<bool> = Vec::new();
        loop {
            if let Some(&at) = seen.get(&s) {
                return Ok(trace[at..].iter().any(|&acc| acc));
            }
            seen.insert(s, trace.len());
            let mut any = false;
            for &a in w.period() {
                any |= self.is_accepting(s);
                s = self.step(s, a);
            }
            trace.push(any);
        }
    }

    pub fn accepts_graph(&self, x: &Lasso<u8>, y: &Lasso<u8>) -> Result<bool> {
        self.accepts_lasso(&graph_word(x, y))
    }

    /// States from which an accepting cycle is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        self.to_buchi().live_states()
    }

    pub fn to_buchi(&self) -> BuchiAutomaton {
        BuchiAutomaton::new(
            self.num_states(),
            self.alphabet.clone(),
            vec![self.initial],
            self.accepting_states(),
            self.delta
                .iter()
                .enumerate()
                .flat_map(|(s, row)| row.iter().enumerate().map(move |(a, &t)| (s as u32, a, t)))
                .collect::<Vec<_>>(),
        )
        .expect("deterministic automaton is valid")
    }
}

/// Reachable subset construction. The empty set is the rejecting sink; a macro-state
/// is accepting iff it contains an accepting state.
pub fn determinize_subsets(a: &BuchiAutomaton, cap: usize) -> Result<DetBuchi> {
    let mut ids: HashMap<StateSet, u32> = HashMap::new();
    let mut order: Vec<StateSet> = Vec::new();
    let mut delta: Vec<Vec<u32>> = Vec::new();
    let start = a.initial().to_vec();
    ids.insert(start.clone(), 0);
    order.push(start);
    let mut next = 0;
    while next < order.len() {
        let set = order[next].clone();
        let mut row = Vec::with_capacity(a.alphabet().len());
        for sym in 0..a.alphabet().len() {
            let mut succ: StateSet = set
                .iter()
                .flat_map(|&s| a.successors(s, sym).iter().copied())
                .collect();
            succ.sort_unstable();
            succ.dedup();
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if order.len() >= cap {
                        return Err(Error::StateCap {
                            what: "subset construction",
                            cap,
                        });
                    }
                    let id = order.len() as u32;
                    ids.insert(succ.clone(), id);
                    order.push(succ);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
        next += 1;
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, set)| set.iter().any(|&s| a.is_accepting(s)))
        .map(|(i, _)| i as u32)
        .collect();
    DetBuchi::new(a.alphabet().to_vec(), 0, accepting, delta)
}

/// How [`determinize`] produced its result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminizeRoute {
    /// Live part is all accepting; subsets applied directly.
    SafetySubsets,
    /// Visited-set normalization followed by subsets.
    NormalizedSubsets,
}

impl DeterminizeRoute {
    pub fn name(self) -> &'static str {
        match self {
            Self::SafetySubsets => "safety-subsets",
            Self::NormalizedSubsets => "visited-set+subsets",
        }
    }
}

/// Determinizes a graph automaton of a continuous function.
///
/// Non-live states are removed first. When every remaining state is accepting the
/// subset construction is exact on its own; otherwise the visited-set normalization
/// runs first.
pub fn determinize(a: &BuchiAutomaton, cap: usize) -> Result<(DetBuchi, DeterminizeRoute)> {
    let trimmed = a.trimmed();
    if trimmed.is_safety_shaped() {
        Ok((
            determinize_subsets(&trimmed, cap)?,
            DeterminizeRoute::SafetySubsets,
        ))
    } else {
        let normalized = normalize_repeat_accepting(&trimmed, cap)?;
        Ok((
            determinize_subsets(&normalized.trimmed(), cap)?,
            DeterminizeRoute::NormalizedSubsets,
        ))
    }
}

/// Survivor labels one level down: children of every label under input bit `x`,
/// keeping labels that occur exactly once and, if `live` is given, are live.
pub fn level_step(a: &DetBuchi, labels: &[u32], x: u8, live: Option<&[bool]>) -> StateSet {
    let mut children: Vec<u32> = labels
        .iter()
        .flat_map(|&s| [a.step(s, pair_symbol(x, 0)), a.step(s, pair_symbol(x, 1))])
        .collect();
    children.sort_unstable();
    let mut out = Vec::with_capacity(children.len());
    let mut i = 0;
    while i < children.len() {
        let mut j = i + 1;
        while j < children.len() && children[j] == children[i] {
            j += 1;
        }
        let c = children[i];
        if j - i == 1 && live.map_or(true, |l| l[c as usize]) {
            out.push(c);
        }
        i = j;
    }
    out
}

/// Node of an [`OutputTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub output: BinaryWord,
    pub label: u32,
    pub parent: Option<usize>,
    pub extendible: bool,
}

/// Output prefixes still viable after reading an input prefix, with equal-label nodes
/// of equal length removed in pairs at every level.
#[derive(Clone, Debug)]
pub struct OutputTree {
    input: BinaryWord,
    nodes: Vec<TreeNode>,
    levels: Vec<Vec<usize>>,
}

impl OutputTree {
    pub fn input(&self) -> &BinaryWord {
        &self.input
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Node indices at output length `k`.
    pub fn level(&self, k: usize) -> &[usize] {
        &self.levels[k]
    }

    pub fn labels_at(&self, k: usize) -> Vec<u32> {
        self.levels[k]
            .iter()
            .map(|&i| self.nodes[i].label)
            .collect()
    }

    pub fn contains(&self, output: &[u8]) -> bool {
        output.len() <= self.depth()
            && self.levels[output.len()]
                .iter()
                .any(|&i| self.nodes[i].output.digits() == output)
    }

    /// Extendible nodes none of which is a prefix of another.
    pub fn incomparable_extendible(&self) -> Vec<usize> {
        let ext: Vec<usize> = (0..self.nodes.len())
            .filter(|&i| self.nodes[i].extendible)
            .collect();
        ext.iter()
            .copied()
            .filter(|&i| {
                !ext.iter().any(|&j| {
                    j != i && {
                        let (a, b) = (&self.nodes[i].output, &self.nodes[j].output);
                        b.len() > a.len() && b.digits().starts_with(a.digits())
                    }
                })
            })
            .collect()
    }
}

/// The pruned output tree of a deterministic graph automaton on input prefix `input`,
/// to output length `depth`.
pub fn output_tree(a: &DetBuchi, input: &BinaryWord, depth: usize) -> Result<OutputTree> {
    if depth > input.len() {
        return Err(Error::InvalidAutomaton(format!(
            "tree depth {depth} exceeds input length {}",
            input.len()
        )));
    }
    if !a.is_graph_automaton() {
        return Err(Error::InvalidAutomaton(
            "output trees need a graph automaton".into(),
        ));
    }
    let mut nodes = vec![TreeNode {
        output: BinaryWord::empty(),
        label: a.initial(),
        parent: None,
        extendible: false,
    }];
    let mut levels = vec![vec![0usize]];
    for k in 0..depth {
        let x = input[k];
        let mut candidates: Vec<TreeNode> = Vec::new();
        for &p in &levels[k] {
            for y in 0..2u8 {
                let mut output = nodes[p].output.clone();
                output.push(y).expect("binary digit");
                candidates.push(TreeNode {
                    output,
                    label: a.step(nodes[p].label, pair_symbol(x, y)),
                    parent: Some(p),
                    extendible: false,
                });
            }
        }
        let mut count: HashMap<u32, usize> = HashMap::new();
        for c in &candidates {
            *count.entry(c.label).or_default() += 1;
        }
        let mut level = Vec::new();
        for c in candidates.into_iter().filter(|c| count[&c.label] == 1) {
            level.push(nodes.len());
            nodes.push(c);
        }
        levels.push(level);
    }
    for &leaf in &levels[depth] {
        let mut cur = Some(leaf);
        while let Some(i) = cur {
            if nodes[i].extendible {
                break;
            }
            nodes[i].extendible = true;
            cur = nodes[i].parent;
        }
    }
    Ok(OutputTree {
        input: input.clone(),
        nodes,
        levels,
    })
}
