//! Conversions between transducers, graph automata and piecewise-linear functions.

pub mod a0;
pub mod ad;
pub mod adapter;
pub mod ahat;
pub mod pipeline;
pub mod pwl_graph;

pub use a0::ntrans_to_buchi;
pub use ad::{ntrans_to_det_signed, Ad};
pub use adapter::{signed_output_to_binary_adapter, SignedToBinary};
pub use ahat::{buchi_to_ntrans, discover_delay, AHat, NuConfig, NuTable};
pub use pipeline::{Normalization, Pipeline, PipelineConfig, Provenance};
pub use pwl_graph::pwl_to_buchi;
