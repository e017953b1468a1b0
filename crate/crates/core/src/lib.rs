//! Batch feature extraction for multi-record time-series datasets.
//!
//! The crate is organized around three ideas:
//!
//! * A **dataset** ([`dataset::Dataset`]) holds N records of K samples per
//!   channel, plus scalar feature columns and named per-record segments.
//! * A **plugin catalog** ([`registry`]) declares every supported transform
//!   with its arity, parameter schema and segment capability; invocations
//!   are validated against a dataset before anything runs.
//! * A **pipeline** ([`pipeline::Pipeline`]) applies a list of validated
//!   invocations in order. Model-backed steps (norm curves, membership
//!   functions, principal components) fit once on reference data, store the
//!   fitted model under the step's output name and reuse it on later runs.
//!
//! All numerical kernels are deterministic: reruns and parallel transform
//! phases produce bitwise identical results.

pub mod dataset;
pub mod elementwise;
pub mod error;
pub mod filters;
pub mod models;
pub mod pipeline;
pub mod registry;
pub mod sf;
pub mod windows;

pub use dataset::{Channel, Dataset, FeatureColumn, SampleGrid, Segment};
pub use error::{Error, Result};
pub use models::{FittedModel, ModelStore};
pub use pipeline::{
    EngineConstants, ExecutionReport, Pipeline, PipelineError, StepReport,
};
pub use registry::{
    registry, registry_lookup, Invocation, ParamValue, PluginDescriptor, PluginKind,
};
