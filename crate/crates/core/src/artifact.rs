//! Versioned JSON artifacts and DOT export.
//!
//! An artifact file is `{"schema_version": 1, "kind", "payload", "provenance"}`.
//! Automata use `{"states", "alphabet", "initial", "accepting", "transitions"}` with
//! transitions `[from, symbol, to]`; transducers add `"delay"` and write transitions
//! as `[from, input, output, to]` with digits as integers. Machines too large to
//! store explicitly are stored as the recipe that rebuilds them from a deterministic
//! graph automaton.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::buchi::{BuchiAutomaton, DetBuchi};
use crate::convert::ad::{ntrans_to_det_signed, Ad};
use crate::convert::adapter::SignedToBinary;
use crate::convert::ahat::{buchi_to_ntrans, AHat, NuConfig};
use crate::convert::pipeline::Provenance;
use crate::error::{Error, Result};
use crate::pwl::PwlFunction;
use crate::transducer::{materialize, DetFst, Fst, Transducer};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pwl,
    Buchi,
    Detbuchi,
    Fst,
    Detfst,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pwl => "pwl",
            Self::Buchi => "buchi",
            Self::Detbuchi => "detbuchi",
            Self::Fst => "fst",
            Self::Detfst => "detfst",
        }
    }
}

/// Which construction a [`Recipe`] replays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "ahat")]
    AHat,
    #[serde(rename = "ad")]
    Ad,
    #[serde(rename = "ad+adapter")]
    AdBinary,
}

/// A converted transducer stored as its construction inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub stage: Stage,
    pub automaton: DetBuchi,
    /// Delay of the nondeterministic transducer.
    pub delay: usize,
    pub chain_len: usize,
}

impl Recipe {
    pub fn from_ahat(stage: Stage, ahat: &AHat) -> Self {
        let table = ahat.table();
        Self {
            stage,
            automaton: table.automaton().clone(),
            delay: table.delay(),
            chain_len: table.chain_len(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self.stage {
            Stage::Ad => Kind::Detfst,
            Stage::AHat | Stage::AdBinary => Kind::Fst,
        }
    }

    pub fn build(&self, set_cap: usize) -> Result<Machine> {
        let config = NuConfig {
            chain_len: self.chain_len,
            set_cap,
        };
        let ahat = buchi_to_ntrans(&self.automaton, Some(self.delay), self.delay, config)?;
        Ok(match self.stage {
            Stage::AHat => Machine::AHat(ahat),
            Stage::Ad => Machine::Ad(ntrans_to_det_signed(&ahat)),
            Stage::AdBinary => Machine::AdBinary(SignedToBinary::new(ntrans_to_det_signed(&ahat))),
        })
    }
}

/// Any transducer an artifact can hold.
#[derive(Clone, Debug)]
pub enum Machine {
    Explicit(Fst),
    AHat(AHat),
    Ad(Ad),
    AdBinary(SignedToBinary<Ad>),
}

/// Runs `$body` with `$t` bound to the transducer inside a [`Machine`].
#[macro_export]
macro_rules! with_machine {
    ($machine:expr, $t:ident => $body:expr) => {
        match $machine {
            $crate::artifact::Machine::Explicit($t) => $body,
            $crate::artifact::Machine::AHat($t) => $body,
            $crate::artifact::Machine::Ad($t) => $body,
            $crate::artifact::Machine::AdBinary($t) => $body,
        }
    };
}

impl Machine {
    pub fn is_deterministic(&self) -> bool {
        match self {
            Self::Explicit(f) => DetFst::new(f.clone()).is_ok(),
            Self::Ad(_) => true,
            Self::AHat(_) | Self::AdBinary(_) => false,
        }
    }

    /// The explicit reachable transducer, up to `cap` states.
    pub fn explicit(&self, cap: usize) -> Result<Fst> {
        match self {
            Self::Explicit(f) => Ok(f.clone()),
            m => with_machine!(m, t => materialize(t, cap)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Artifact {
    Pwl(PwlFunction),
    Buchi(BuchiAutomaton),
    DetBuchi(DetBuchi),
    Fst(Fst),
    DetFst(DetFst),
    Recipe(Recipe),
}

impl Artifact {
    pub fn kind(&self) -> Kind {
        match self {
            Self::Pwl(_) => Kind::Pwl,
            Self::Buchi(_) => Kind::Buchi,
            Self::DetBuchi(_) => Kind::Detbuchi,
            Self::Fst(_) => Kind::Fst,
            Self::DetFst(_) => Kind::Detfst,
            Self::Recipe(r) => r.kind(),
        }
    }

    /// The transducer held by a transducer artifact.
    pub fn machine(&self, set_cap: usize) -> Result<Machine> {
        match self {
            Self::Fst(f) => Ok(Machine::Explicit(f.clone())),
            Self::DetFst(f) => Ok(Machine::Explicit(f.fst().clone())),
            Self::Recipe(r) => r.build(set_cap),
            other => Err(Error::Artifact(format!(
                "{} artifact is not a transducer",
                other.kind().name()
            ))),
        }
    }
}

/// An artifact with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtifactFile {
    pub artifact: Artifact,
    pub provenance: Provenance,
}

impl ArtifactFile {
    pub fn new(artifact: Artifact, provenance: Provenance) -> Self {
        Self {
            artifact,
            provenance,
        }
    }

    pub fn to_json(&self) -> Value {
        let payload = match &self.artifact {
            Artifact::Pwl(f) => serde_json::to_value(f).expect("serializable"),
            Artifact::Buchi(a) => buchi_json(a),
            Artifact::DetBuchi(a) => det_buchi_json(a),
            Artifact::Fst(t) => fst_json(t),
            Artifact::DetFst(t) => fst_json(t.fst()),
            Artifact::Recipe(r) => json!({
                "construction": r.stage,
                "automaton": det_buchi_json(&r.automaton),
                "delay": r.delay,
                "chain_len": r.chain_len,
            }),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "kind": self.artifact.kind(),
            "payload": payload,
            "provenance": self.provenance,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let version = v["schema_version"]
            .as_u64()
            .ok_or_else(|| schema("missing schema_version"))?;
        if version != SCHEMA_VERSION {
            return Err(schema(format!("unsupported schema_version {version}")));
        }
        let kind: Kind = from_value(&v["kind"], "kind")?;
        let payload = &v["payload"];
        let provenance: Provenance = match v.get("provenance") {
            Some(p) if !p.is_null() => from_value(p, "provenance")?,
            _ => Provenance::default(),
        };
        let artifact = match kind {
            Kind::Pwl => Artifact::Pwl(from_value(payload, "pwl payload")?),
            Kind::Buchi => Artifact::Buchi(buchi_from_json(payload)?),
            Kind::Detbuchi => Artifact::DetBuchi(det_buchi_from_json(payload)?),
            Kind::Fst | Kind::Detfst if payload.get("construction").is_some() => {
                let r = Recipe {
                    stage: from_value(&payload["construction"], "construction")?,
                    automaton: det_buchi_from_json(&payload["automaton"])?,
                    delay: from_value(&payload["delay"], "delay")?,
                    chain_len: from_value(&payload["chain_len"], "chain_len")?,
                };
                if r.kind() != kind {
                    return Err(schema(format!(
                        "construction {:?} does not produce a {} artifact",
                        r.stage,
                        kind.name()
                    )));
                }
                Artifact::Recipe(r)
            }
            Kind::Fst => Artifact::Fst(fst_from_json(payload)?),
            Kind::Detfst => Artifact::DetFst(DetFst::new(fst_from_json(payload)?)?),
        };
        Ok(Self {
            artifact,
            provenance,
        })
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Artifact(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string_pretty())
            .map_err(|e| Error::Artifact(format!("cannot write {}: {e}", path.display())))
    }
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Artifact(msg.into())
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| schema(format!("bad {what}: {e}")))
}

#[derive(Serialize, Deserialize)]
struct AutomatonJson {
    states: usize,
    alphabet: Vec<String>,
    initial: Vec<u32>,
    accepting: Vec<u32>,
    transitions: Vec<(u32, String, u32)>,
}

#[derive(Serialize, Deserialize)]
struct TransducerJson {
    states: usize,
    input_alphabet: Vec<i8>,
    output_alphabet: Vec<i8>,
    initial: Vec<u32>,
    delay: usize,
    #[serde(default)]
    delay_transitions: Vec<(u32, i8, u32)>,
    transitions: Vec<(u32, i8, i8, u32)>,
}

fn buchi_json(a: &BuchiAutomaton) -> Value {
    let alphabet = a.alphabet();
    serde_json::to_value(AutomatonJson {
        states: a.num_states(),
        alphabet: alphabet.to_vec(),
        initial: a.initial().to_vec(),
        accepting: a.accepting_states(),
        transitions: a
            .transitions()
            .map(|(s, sym, t)| (s, alphabet[sym].clone(), t))
            .collect(),
    })
    .expect("serializable")
}

fn det_buchi_json(a: &DetBuchi) -> Value {
    buchi_json(&a.to_buchi())
}

fn buchi_from_json(v: &Value) -> Result<BuchiAutomaton> {
    let j: AutomatonJson = from_value(v, "automaton payload")?;
    let index: BTreeMap<&str, usize> = j
        .alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let transitions = j
        .transitions
        .iter()
        .map(|(s, sym, t)| {
            index
                .get(sym.as_str())
                .map(|&i| (*s, i, *t))
                .ok_or_else(|| Error::UnknownSymbol(sym.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    BuchiAutomaton::new(
        j.states,
        j.alphabet.clone(),
        j.initial,
        j.accepting,
        transitions,
    )
}

fn det_buchi_from_json(v: &Value) -> Result<DetBuchi> {
    DetBuchi::from_buchi(&buchi_from_json(v)?)
}

fn fst_json(t: &Fst) -> Value {
    serde_json::to_value(TransducerJson {
        states: t.num_states(),
        input_alphabet: t.input_alphabet().to_vec(),
        output_alphabet: t.output_alphabet().to_vec(),
        initial: t.initial().to_vec(),
        delay: t.delay(),
        delay_transitions: t.delay_transitions().collect(),
        transitions: t.transitions().collect(),
    })
    .expect("serializable")
}

fn fst_from_json(v: &Value) -> Result<Fst> {
    let j: TransducerJson = from_value(v, "transducer payload")?;
    Fst::new(
        j.states,
        j.input_alphabet,
        j.output_alphabet,
        j.initial,
        j.delay,
        j.delay_transitions,
        j.transitions,
    )
}

/// DOT digraph of an automaton: accepting states are double circles.
pub fn buchi_dot(a: &BuchiAutomaton) -> String {
    let mut edges: BTreeMap<(u32, u32), Vec<String>> = BTreeMap::new();
    for (s, sym, t) in a.transitions() {
        edges
            .entry((s, t))
            .or_default()
            .push(a.alphabet()[sym].clone());
    }
    let nodes = (0..a.num_states() as u32).map(|s| (s, a.is_accepting(s)));
    render_dot("buchi", nodes, a.initial(), edges)
}

/// DOT digraph of a transducer: edges are labelled `input/output`, delay-phase edges
/// `input/-`.
pub fn fst_dot(t: &Fst) -> String {
    let mut edges: BTreeMap<(u32, u32), Vec<String>> = BTreeMap::new();
    for (s, a, u) in t.delay_transitions() {
        edges.entry((s, u)).or_default().push(format!("{a}/-"));
    }
    for (s, a, b, u) in t.transitions() {
        edges.entry((s, u)).or_default().push(format!("{a}/{b}"));
    }
    let nodes = (0..t.num_states() as u32).map(|s| (s, false));
    render_dot("transducer", nodes, t.initial(), edges)
}

fn render_dot(
    name: &str,
    nodes: impl Iterator<Item = (u32, bool)>,
    initial: &[u32],
    edges: BTreeMap<(u32, u32), Vec<String>>,
) -> String {
    let mut out = format!("digraph {name} {{\n  rankdir=LR;\n  init [shape=point];\n");
    for (s, accepting) in nodes {
        let shape = if accepting { "doublecircle" } else { "circle" };
        writeln!(out, "  s{s} [shape={shape}];").expect("string write");
    }
    let mut initial = initial.to_vec();
    initial.sort_unstable();
    for s in initial {
        writeln!(out, "  init -> s{s};").expect("string write");
    }
    for ((s, t), mut labels) in edges {
        labels.sort();
        labels.dedup();
        writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", labels.join(",")).expect("string write");
    }
    out.push_str("}\n");
    out
}

/// DOT text of any machine artifact; lazily stored machines are materialized up to
/// `cap` states.
pub fn export_dot(artifact: &Artifact, cap: usize) -> Result<String> {
    match artifact {
        Artifact::Buchi(a) => Ok(buchi_dot(a)),
        Artifact::DetBuchi(a) => Ok(buchi_dot(&a.to_buchi())),
        Artifact::Fst(t) => Ok(fst_dot(t)),
        Artifact::DetFst(t) => Ok(fst_dot(t.fst())),
        Artifact::Recipe(r) => Ok(fst_dot(&r.build(cap)?.explicit(cap)?)),
        Artifact::Pwl(_) => Err(Error::Artifact(
            "a piecewise-linear function is not a machine".into(),
        )),
    }
}
