//! Pipeline configuration files: a TOML step list that compiles into a
//! [`Pipeline`].

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use tsforge_core::pipeline::EngineConstants;
use tsforge_core::{Invocation, ParamValue, Pipeline};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
pub struct PipelineConfig {
    pub format_version: u32,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default, rename = "step")]
    pub steps: Vec<StepConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct EngineSection {
    /// Forgetting factor of the running extremum filters; the
    /// TSFORGE_ENGINE_LAMBDA environment variable takes precedence.
    #[serde(default)]
    pub forgetting: Option<f64>,
    /// Breakpoints for the fixed membership design.
    #[serde(default)]
    pub fix_breakpoints: Option<Vec<f64>>,
    /// 1-based records used to fit norm curves; all records when omitted.
    #[serde(default)]
    pub reference_records: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct StepConfig {
    pub plugin: String,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub params: toml::Table,
    #[serde(default)]
    pub segment: Option<String>,
    #[serde(default)]
    pub output: Option<String>,
}

fn number(value: &toml::Value) -> Option<f64> {
    match value {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    }
}

/// Maps a TOML parameter value onto the engine's parameter type: integers
/// and floats stay scalar, strings are enum choices, arrays of 2 or 3
/// numbers become pairs/triples.
fn to_param(step: usize, name: &str, value: &toml::Value) -> Result<ParamValue> {
    match value {
        toml::Value::Integer(i) => Ok(ParamValue::Integer(*i)),
        toml::Value::Float(f) => Ok(ParamValue::Real(*f)),
        toml::Value::String(s) => Ok(ParamValue::Enum(s.clone())),
        toml::Value::Array(items) => {
            let numbers: Option<Vec<f64>> = items.iter().map(number).collect();
            match numbers.as_deref() {
                Some([a, b]) => Ok(ParamValue::RealPair([*a, *b])),
                Some([a, b, c]) => Ok(ParamValue::RealTriple([*a, *b, *c])),
                _ => bail!(
                    "step {step}: parameter `{name}` must be an array of 2 or 3 numbers"
                ),
            }
        }
        other => bail!(
            "step {step}: parameter `{name}` has unsupported type {}",
            other.type_str()
        ),
    }
}

/// Compiles a parsed configuration into an executable pipeline. Parameter
/// values are shape-converted here; full semantic validation happens against
/// the dataset.
pub fn to_pipeline(config: &PipelineConfig) -> Result<Pipeline> {
    if config.format_version != FORMAT_VERSION {
        bail!(
            "pipeline format_version {} is not supported (expected {FORMAT_VERSION})",
            config.format_version
        );
    }
    let mut steps = Vec::with_capacity(config.steps.len());
    for (i, step) in config.steps.iter().enumerate() {
        let mut inv = Invocation::new(&step.plugin, &[]);
        inv.inputs = step.inputs.clone();
        inv.segment = step.segment.clone();
        inv.output = step.output.clone();
        for (name, value) in &step.params {
            inv.params
                .insert(name.clone(), to_param(i + 1, name, value)?);
        }
        steps.push(inv);
    }
    let constants = EngineConstants::resolve(
        config.engine.forgetting,
        config.engine.fix_breakpoints.clone(),
    )
    .context("engine constants")?;
    Ok(Pipeline::new(steps)
        .with_reference_records(config.engine.reference_records.clone())
        .with_constants(constants))
}

pub fn load_pipeline(path: &Path) -> Result<Pipeline> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    let config: PipelineConfig = toml::from_str(&text)
        .with_context(|| format!("cannot parse `{}`", path.display()))?;
    to_pipeline(&config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Pipeline> {
        let config: PipelineConfig = toml::from_str(text).unwrap();
        to_pipeline(&config)
    }

    #[test]
    fn full_step_forms_parse() {
        let pipeline = parse(
            r#"
format_version = 1

[engine]
forgetting = 0.9
reference_records = [1, 2]

[[step]]
plugin = "IIR"
inputs = ["x"]
params = { a = 0.5 }

[[step]]
plugin = "Trend"
inputs = ["x"]
output = "trend-x"
[step.params]
smoothing = [0.1, 0.9]

[[step]]
plugin = "TS->DISCR SF"
inputs = ["x"]
segment = "mid"
[step.params]
terms = 3
design = "median"
"#,
        )
        .unwrap();
        assert_eq!(pipeline.steps.len(), 3);
        assert_eq!(pipeline.reference_records, vec![1, 2]);
        assert_eq!(pipeline.constants.forgetting, 0.9);
        assert_eq!(
            pipeline.steps[0].params["a"],
            ParamValue::Real(0.5)
        );
        assert_eq!(
            pipeline.steps[1].params["smoothing"],
            ParamValue::RealPair([0.1, 0.9])
        );
        assert_eq!(pipeline.steps[1].output.as_deref(), Some("trend-x"));
        assert_eq!(
            pipeline.steps[2].params["design"],
            ParamValue::Enum("median".into())
        );
        assert_eq!(pipeline.steps[2].segment.as_deref(), Some("mid"));
    }

    #[test]
    fn integer_array_becomes_triple() {
        let pipeline = parse(
            r#"
format_version = 1
[[step]]
plugin = "StdTS"
inputs = ["x"]
params = { smoothing = [0, 1, 0.5] }
"#,
        )
        .unwrap();
        assert_eq!(
            pipeline.steps[0].params["smoothing"],
            ParamValue::RealTriple([0.0, 1.0, 0.5])
        );
    }

    #[test]
    fn bad_array_length_cites_step_and_name() {
        let err = parse(
            r#"
format_version = 1
[[step]]
plugin = "Trend"
inputs = ["x"]
params = { smoothing = [0.1, 0.2, 0.3, 0.4] }
"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("step 1"), "{err}");
        assert!(err.contains("smoothing"), "{err}");
    }

    #[test]
    fn unsupported_version_rejected() {
        let err = parse("format_version = 2\n").unwrap_err().to_string();
        assert!(err.contains("format_version"), "{err}");
    }
}
