//! Turning artifact files and corpus names into exact evaluators.

use std::path::Path;

use anyhow::{bail, Context};
use regreal_core::analysis::{exact_value, graph_lookup};
use regreal_core::artifact::{Artifact, ArtifactFile, Machine};
use regreal_core::convert::Provenance;
use regreal_core::digits::canonical_expansion;
use regreal_core::{corpus, with_machine, BuchiAutomaton, Error, Rational};

/// An exact function on `[0, 1]` in the range of the original function.
pub type Evaluator = Box<dyn Fn(&Rational) -> regreal_core::Result<Rational>>;

pub fn read_artifact(path: &Path) -> anyhow::Result<ArtifactFile> {
    ArtifactFile::read(path).with_context(|| format!("loading {}", path.display()))
}

/// Existing paths are read as artifacts; anything else names a corpus function.
pub fn evaluator(arg: &str, state_cap: usize) -> anyhow::Result<Evaluator> {
    let path = Path::new(arg);
    if path.exists() {
        return artifact_evaluator(read_artifact(path)?, state_cap);
    }
    let f = corpus::evaluator(arg)
        .with_context(|| format!("{arg} is neither a file nor a corpus name"))?;
    Ok(Box::new(move |x| Ok(f.eval(x))))
}

pub fn artifact_evaluator(file: ArtifactFile, state_cap: usize) -> anyhow::Result<Evaluator> {
    let ArtifactFile {
        artifact,
        provenance,
    } = file;
    match artifact {
        Artifact::Pwl(f) => Ok(Box::new(move |x| Ok(provenance.user_value(&f.eval(x)?)))),
        Artifact::Buchi(a) => Ok(buchi_evaluator(a, provenance)),
        Artifact::DetBuchi(a) => Ok(buchi_evaluator(a.to_buchi(), provenance)),
        other => {
            let machine = deterministic_machine(&other, state_cap)?;
            Ok(Box::new(move |x| {
                let y = with_machine!(&machine, t => exact_value(t, x))?;
                Ok(provenance.user_value(&y))
            }))
        }
    }
}

fn buchi_evaluator(a: BuchiAutomaton, provenance: Provenance) -> Evaluator {
    Box::new(move |x| {
        let y = graph_lookup(&a, &canonical_expansion(x)?)?
            .ok_or_else(|| Error::Unsupported(format!("no output is accepted with x = {x}")))?;
        Ok(provenance.user_value(&y.value()))
    })
}

pub fn deterministic_machine(artifact: &Artifact, state_cap: usize) -> anyhow::Result<Machine> {
    let machine = artifact.machine(state_cap)?;
    if !machine.is_deterministic() {
        bail!(
            "{} artifact is not deterministic; convert it with --to det-signed first",
            artifact.kind().name()
        );
    }
    Ok(machine)
}
