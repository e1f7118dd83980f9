//! The full chain from a piecewise-linear function to a deterministic signed-binary
//! transducer, with the metadata needed to read results back in the original range.

use serde::{Deserialize, Serialize};

use crate::buchi::{determinize, BuchiAutomaton, DetBuchi, DeterminizeRoute, DEFAULT_STATE_CAP};
use crate::convert::ad::{ntrans_to_det_signed, Ad};
use crate::convert::ahat::{buchi_to_ntrans, AHat, NuConfig, DEFAULT_CHAIN_LEN};
use crate::convert::pwl_graph::pwl_to_buchi;
use crate::digits::{pow2, Rational};
use crate::error::Result;
use crate::pwl::{denormalize_value, PwlFunction};

/// Default cap on discovered delays.
pub const DEFAULT_DELAY_CAP: usize = 24;

/// Output transformation applied before conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// `y ↦ y/8 + 5/16`.
    #[serde(rename = "y/8+5/16")]
    Range,
}

/// Where an artifact came from and how to read its values.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default)]
    pub delay: Option<usize>,
    #[serde(default)]
    pub normalization: Option<Normalization>,
    /// The artifact computes `2^-output_shift·f`.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub output_shift: u32,
}

fn is_zero(v: &u32) -> bool {
    *v == 0
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Self {
            construction: construction.into(),
            ..Self::default()
        }
    }

    /// The same lineage after another construction step.
    pub fn then(&self, construction: impl Into<String>, delay: Option<usize>) -> Self {
        Self {
            construction: construction.into(),
            delay: delay.or(self.delay),
            ..self.clone()
        }
    }

    /// Maps a value computed by the artifact back to the original function's range.
    pub fn user_value(&self, y: &Rational) -> Rational {
        let y = y * pow2(i64::from(self.output_shift));
        match self.normalization {
            Some(Normalization::Range) => denormalize_value(&y),
            None => y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Fixed delay for the nondeterministic transducer; discovered when `None`.
    pub delay: Option<usize>,
    pub delay_cap: usize,
    pub state_cap: usize,
    pub normalize: bool,
    pub chain_len: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            delay: None,
            delay_cap: DEFAULT_DELAY_CAP,
            state_cap: DEFAULT_STATE_CAP,
            normalize: true,
            chain_len: DEFAULT_CHAIN_LEN,
        }
    }
}

impl PipelineConfig {
    pub fn nu(&self) -> NuConfig {
        NuConfig {
            chain_len: self.chain_len,
            set_cap: self.state_cap,
        }
    }
}

/// Every stage of the chain for one function.
#[derive(Clone, Debug)]
pub struct Pipeline {
    /// The function actually converted (normalized when requested).
    pub function: PwlFunction,
    pub normalization: Option<Normalization>,
    pub graph: BuchiAutomaton,
    pub det: DetBuchi,
    pub route: DeterminizeRoute,
    pub ahat: AHat,
    pub ad: Ad,
}

impl Pipeline {
    pub fn build(f: &PwlFunction, config: &PipelineConfig) -> Result<Self> {
        let (function, normalization) = if config.normalize {
            (f.normalize_range()?, Some(Normalization::Range))
        } else {
            (f.clone(), None)
        };
        let graph = pwl_to_buchi(&function, config.state_cap)?;
        let (det, route) = determinize(&graph, config.state_cap)?;
        let ahat = buchi_to_ntrans(&det, config.delay, config.delay_cap, config.nu())?;
        let ad = ntrans_to_det_signed(&ahat);
        Ok(Self {
            function,
            normalization,
            graph,
            det,
            route,
            ahat,
            ad,
        })
    }

    /// Delay of the nondeterministic transducer; the deterministic one adds three.
    pub fn delay(&self) -> usize {
        self.ahat.table().delay()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            construction: "ad".into(),
            source: None,
            delay: Some(self.delay() + 3),
            normalization: self.normalization,
            output_shift: 0,
        }
    }

    /// Maps a value of the converted machines back to the source function's range.
    pub fn user_value(&self, y: &Rational) -> Rational {
        self.provenance().user_value(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::rat;
    use crate::transducer::{eval_exact_rational, Transducer};

    #[test]
    fn identity_at_one_third() {
        let p = Pipeline::build(&PwlFunction::identity(), &PipelineConfig::default()).unwrap();
        assert_eq!(p.ad.delay(), p.delay() + 3);
        let x = "(01)".parse().unwrap();
        let out = eval_exact_rational(&p.ad, &x).unwrap();
        assert_eq!(out.value, rat(17, 48));
        assert_eq!(p.user_value(&out.value), rat(1, 3));
    }

    #[test]
    fn provenance_round_trip() {
        let p = Provenance {
            construction: "a0".into(),
            source: Some("counterexample".into()),
            delay: Some(3),
            normalization: Some(Normalization::Range),
            output_shift: 3,
        };
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["normalization"], "y/8+5/16");
        assert_eq!(serde_json::from_value::<Provenance>(json).unwrap(), p);
        assert_eq!(p.user_value(&rat(3, 64)), rat(1, 2));
    }
}
