use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::{json, Value};

use regreal_core::analysis::{
    base_obstruction_probe, check_invariants, equivalence_on_grid, graph_lookup,
    lipschitz_estimate, modulus_probe, rational_preservation_check, InvariantConfig,
};
use regreal_core::artifact::{
    export_dot as dot_text, Artifact, ArtifactFile, Machine, Recipe, Stage,
};
use regreal_core::buchi::determinize;
use regreal_core::convert::ahat::{buchi_to_ntrans, NuConfig};
use regreal_core::convert::{ntrans_to_buchi, Normalization, Provenance, SignedToBinary};
use regreal_core::corpus::{self, truncated_digits, CorpusItem};
use regreal_core::digits::{canonical_expansion, format_rational, parse_rational, Digit};
use regreal_core::transducer::{eval_exact_rational, eval_stream, materialize, run_word};
use regreal_core::{with_machine, DetBuchi, Lasso, PwlFunction, Transducer};

use crate::source::{deterministic_machine, evaluator, read_artifact};
use crate::{BuildArgs, CheckArgs, ConvertArgs, EvalArgs, ExportDotArgs, Target};

const LEGAL_EDGES: &str = "pwl → buchi → detbuchi → fst → det-signed → binary, \
     detbuchi → det-signed, fst → buchi";

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn emit_artifact(file: &ArtifactFile, output: Option<&Path>) -> anyhow::Result<()> {
    emit(&file.to_string_pretty(), output)
}

pub fn build(args: &BuildArgs) -> anyhow::Result<()> {
    let file = if let Some(name) = &args.corpus {
        let artifact = match corpus::lookup(name)? {
            CorpusItem::Pwl(f) => Artifact::Pwl(f),
            CorpusItem::Buchi(a) => Artifact::Buchi(a),
            CorpusItem::Fst(t) => Artifact::Fst(t),
        };
        let mut provenance = Provenance::new("corpus");
        provenance.source = Some(name.clone());
        ArtifactFile::new(artifact, provenance)
    } else if let Some(path) = &args.pwl {
        let mut provenance = Provenance::new("pwl");
        provenance.source = Some(path.display().to_string());
        ArtifactFile::new(Artifact::Pwl(read_pwl_file(path)?), provenance)
    } else {
        unreachable!("clap requires --corpus or --pwl")
    };
    emit_artifact(&file, args.output.as_deref())
}

/// A bare `{"breakpoints": ...}` object or a full PWL artifact.
fn read_pwl_file(path: &Path) -> anyhow::Result<PwlFunction> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not valid JSON", path.display()))?;
    if value.get("schema_version").is_some() {
        return match ArtifactFile::from_json(&value)?.artifact {
            Artifact::Pwl(f) => Ok(f),
            other => bail!("expected a pwl artifact, found {}", other.kind().name()),
        };
    }
    serde_json::from_value(value)
        .with_context(|| format!("invalid PWL function in {}", path.display()))
}

pub fn convert(args: &ConvertArgs) -> anyhow::Result<()> {
    let input = read_artifact(&args.input)?;
    let out = convert_file(&input, args)?;
    emit_artifact(&out, args.output.as_deref())
}

fn nu_config(args: &ConvertArgs) -> NuConfig {
    NuConfig {
        chain_len: args.chain_len,
        set_cap: args.state_cap,
    }
}

fn ahat_recipe(
    input: &ArtifactFile,
    automaton: &DetBuchi,
    args: &ConvertArgs,
    stage: Stage,
) -> anyhow::Result<ArtifactFile> {
    let ahat = buchi_to_ntrans(automaton, args.delay, args.delay_cap, nu_config(args))?;
    let recipe = Recipe::from_ahat(stage, &ahat);
    let (construction, delay) = match stage {
        Stage::AHat => ("ahat", recipe.delay),
        _ => ("ad", recipe.delay + 3),
    };
    Ok(ArtifactFile::new(
        Artifact::Recipe(recipe),
        input.provenance.then(construction, Some(delay)),
    ))
}

fn convert_file(input: &ArtifactFile, args: &ConvertArgs) -> anyhow::Result<ArtifactFile> {
    let prov = &input.provenance;
    let cap = args.state_cap;
    match (&input.artifact, args.to) {
        (Artifact::Pwl(f), Target::Buchi) => {
            let mut provenance = prov.then("pwl-graph", None);
            let f = if args.normalize {
                if prov.normalization.is_some() {
                    bail!("the function is already normalized");
                }
                provenance.normalization = Some(Normalization::Range);
                f.normalize_range()?
            } else {
                f.clone()
            };
            let a = regreal_core::convert::pwl_to_buchi(&f, cap)?;
            Ok(ArtifactFile::new(Artifact::Buchi(a), provenance))
        }
        (Artifact::Buchi(a), Target::Detbuchi) => {
            let (det, route) = determinize(a, cap)?;
            Ok(ArtifactFile::new(
                Artifact::DetBuchi(det),
                prov.then(format!("determinize:{}", route.name()), None),
            ))
        }
        (Artifact::DetBuchi(a), Target::Fst) => ahat_recipe(input, a, args, Stage::AHat),
        (Artifact::DetBuchi(a), Target::DetSigned) => ahat_recipe(input, a, args, Stage::Ad),
        (Artifact::Recipe(r), Target::DetSigned) if r.stage == Stage::AHat => {
            let recipe = Recipe {
                stage: Stage::Ad,
                ..r.clone()
            };
            recipe.build(cap)?;
            Ok(ArtifactFile::new(
                Artifact::Recipe(recipe),
                prov.then("ad", Some(r.delay + 3)),
            ))
        }
        (Artifact::Recipe(r), Target::Binary) if r.stage == Stage::Ad => {
            let recipe = Recipe {
                stage: Stage::AdBinary,
                ..r.clone()
            };
            Ok(ArtifactFile::new(
                Artifact::Recipe(recipe),
                prov.then("ad+adapter", None),
            ))
        }
        (Artifact::DetFst(t), Target::Binary) => {
            let fst = materialize(&SignedToBinary::new(t.clone()), cap)?;
            Ok(ArtifactFile::new(
                Artifact::Fst(fst),
                prov.then("adapter", None),
            ))
        }
        (Artifact::Fst(_) | Artifact::DetFst(_) | Artifact::Recipe(_), Target::Buchi) => {
            let fst = input.artifact.machine(cap)?.explicit(cap)?;
            let a = ntrans_to_buchi(&fst)?;
            let mut provenance = prov.then("a0", None);
            provenance.output_shift += fst.delay() as u32;
            Ok(ArtifactFile::new(Artifact::Buchi(a), provenance))
        }
        (artifact, to) => bail!(
            "cannot convert a {} artifact to {}; legal conversions: {LEGAL_EDGES}",
            artifact.kind().name(),
            target_name(to)
        ),
    }
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Buchi => "buchi",
        Target::Detbuchi => "detbuchi",
        Target::Fst => "fst",
        Target::DetSigned => "det-signed",
        Target::Binary => "binary",
    }
}

fn digit_string<D: Digit>(digits: impl IntoIterator<Item = D>) -> String {
    digits.into_iter().map(Digit::to_char).collect()
}

pub fn eval(args: &EvalArgs) -> anyhow::Result<()> {
    let file = read_artifact(&args.artifact)?;
    let prov = &file.provenance;
    let input: Lasso<i8> = match (&args.x, &args.lasso) {
        (Some(x), _) => canonical_expansion(&parse_rational(x)?)?.map(|b| b as i8),
        (None, Some(l)) => l.parse()?,
        (None, None) => unreachable!("clap requires --x or --lasso"),
    };
    let transforms = prov.normalization.is_some() || prov.output_shift > 0;
    let line = match &file.artifact {
        Artifact::Pwl(f) => {
            let y = prov.user_value(&f.eval(&input.value())?);
            match args.digits {
                Some(n) => truncated_digits(&y, n).to_string(),
                None => format_rational(&y),
            }
        }
        Artifact::Buchi(_) | Artifact::DetBuchi(_) => {
            if !args.graph_lookup {
                bail!("evaluating a graph automaton needs --graph-lookup");
            }
            let a = match &file.artifact {
                Artifact::Buchi(a) => a.clone(),
                Artifact::DetBuchi(a) => a.to_buchi(),
                _ => unreachable!(),
            };
            if input
                .iter()
                .take(input.prefix().len() + input.period().len())
                .any(|d| d < 0)
            {
                bail!("graph automata read binary inputs");
            }
            let x = input.map(|d| d as u8);
            let y = graph_lookup(&a, &x)?
                .with_context(|| format!("no output is accepted with input {x}"))?;
            match args.digits {
                Some(n) => {
                    warn_raw(transforms);
                    digit_string(y.take(n))
                }
                None => format_rational(&prov.user_value(&y.value())),
            }
        }
        artifact => match args.digits {
            Some(n) => {
                warn_raw(transforms);
                let machine = artifact.machine(args.state_cap)?;
                digit_string(stream_digits(&machine, &input, n)?)
            }
            None => {
                let machine = deterministic_machine(artifact, args.state_cap)?;
                let out = with_machine!(&machine, t => eval_exact_rational(t, &input))?;
                format_rational(&prov.user_value(&out.value))
            }
        },
    };
    println!("{line}");
    Ok(())
}

fn warn_raw(transforms: bool) {
    if transforms {
        eprintln!("note: digits are the raw machine output; use --exact for the original range");
    }
}

/// The first `n` digits of the unique run, or of the first surviving run when the
/// machine is nondeterministic.
fn stream_digits(machine: &Machine, input: &Lasso<i8>, n: usize) -> anyhow::Result<Vec<i8>> {
    if machine.is_deterministic() {
        return Ok(with_machine!(machine, t => eval_stream(t, input.iter(), n))?);
    }
    with_machine!(machine, t => {
        let runs = run_word(t, &input.take(n + t.delay()))?;
        let first = runs.outputs().next().map(<[i8]>::to_vec);
        first.context("every run dies on this input")
    })
}

pub fn check(args: &CheckArgs) -> anyhow::Result<bool> {
    let cap = args.state_cap;
    let (name, report, pass) = if let Some(pair) = &args.equiv {
        let tol = parse_rational(&args.tol)?;
        let report = equivalence_on_grid(
            evaluator(&pair[0], cap)?,
            evaluator(&pair[1], cap)?,
            args.depth,
            &tol,
        )?;
        let mut json = report.to_json();
        json["tolerance"] = format_rational(&tol).into();
        ("equiv", json, report.pass)
    } else if let Some(a) = &args.invariants {
        let machine = read_artifact(Path::new(a))?.artifact.machine(cap)?;
        let ad = match machine {
            Machine::Ad(ad) => ad,
            Machine::AHat(ahat) => regreal_core::convert::ntrans_to_det_signed(&ahat),
            _ => bail!("the invariant monitors need an ahat or det-signed artifact"),
        };
        let config = InvariantConfig {
            depth: args.depth,
            ..InvariantConfig::default()
        };
        let report = check_invariants(&ad, &config)?;
        ("invariants", report.to_json(), report.pass())
    } else if let Some(f) = &args.obstruction {
        let report = base_obstruction_probe(evaluator(f, cap)?, args.budget)?;
        ("obstruction", report.to_json(), report.found())
    } else if let Some(f) = &args.lipschitz {
        let estimate = lipschitz_estimate(evaluator(f, cap)?, args.depth)?;
        let bound = args.bound.as_deref().map(parse_rational).transpose()?;
        let pass = bound.as_ref().map_or(true, |b| &estimate <= b);
        let json = json!({
            "depth": args.depth,
            "estimate": format_rational(&estimate),
            "bound": bound.as_ref().map(format_rational),
            "pass": pass,
        });
        ("lipschitz", json, pass)
    } else if let Some(a) = &args.modulus {
        let machine = read_artifact(Path::new(a))?.artifact.machine(cap)?;
        let report = with_machine!(&machine, t => modulus_probe(t, args.j0))?;
        ("modulus", report.to_json(), report.pass())
    } else if let Some(a) = &args.rational {
        let machine = deterministic_machine(&read_artifact(Path::new(a))?.artifact, cap)?;
        let report = with_machine!(&machine, t => rational_preservation_check(t, args.max_den))?;
        ("rational", report.to_json(), report.pass())
    } else {
        unreachable!("clap requires one check")
    };
    let mut report = report;
    report["check"] = name.into();
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(pass)
}

pub fn export_dot(args: &ExportDotArgs) -> anyhow::Result<()> {
    let file = read_artifact(&args.artifact)?;
    emit(
        &dot_text(&file.artifact, args.state_cap)?,
        args.output.as_deref(),
    )
}
