//! Plugin contracts and invocation validation.
//!
//! Every plugin is declared by a [`PluginDescriptor`]: its kind (single
//! feature vs. time series), input/output arities, segment capability and
//! parameter schema. The catalog is immutable after startup; validation is
//! pure and reentrant.

mod catalog;

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Segment};

/// Plugin ids as used in pipeline configurations and output naming.
pub mod ids {
    pub const COG: &str = "COG";
    pub const MAX: &str = "MAX";
    pub const MAPO: &str = "MAPO";
    pub const MEAN: &str = "MEAN";
    pub const MEAN_NAN: &str = "MEAN-NaN";
    pub const MEDIAN: &str = "MEDIAN";
    pub const MEDIAN_NAN: &str = "MEDIAN-NaN";
    pub const MIN: &str = "MIN";
    pub const MIPO: &str = "MIPO";
    pub const ND_ABS: &str = "ND Abs";
    pub const ND_DIR: &str = "ND Dir";
    pub const ND_SIGN: &str = "ND Sign";
    pub const ROM: &str = "ROM";
    pub const STD_SF: &str = "STD SF";
    pub const SUM: &str = "SUM";
    pub const TS_DISCR_SF: &str = "TS->DISCR SF";
    pub const TS_FUZZY_SF: &str = "TS->FUZZY SF";
    pub const TS_PC_SF: &str = "TS->PC SF";
    pub const TS_SF: &str = "TS->SF";

    pub const ABS: &str = "ABS";
    pub const FE_MED_AC: &str = "FE-MED-AC";
    pub const ACCELERATION: &str = "A";
    pub const ADDTS: &str = "ADDTS";
    pub const SIGNIN: &str = "SIGNIN";
    pub const ROOT: &str = "ROOT";
    pub const TREND: &str = "Trend";
    pub const DIFF: &str = "DIFF";
    pub const STDTS: &str = "StdTS";
    pub const FIL_MAX: &str = "Fil-MAX";
    pub const FIL_MIN: &str = "Fil-MIN";
    pub const FIL: &str = "FIL";
    pub const MORL: &str = "Morl";
    pub const IIR: &str = "IIR";
    pub const NABW: &str = "NABW";
    pub const JERK: &str = "J";
    pub const ZEROJUMP: &str = "ZEROJump";
    pub const LOG10: &str = "LOG10";
    pub const FE_MAX: &str = "FE-MAX";
    pub const FE_MEAN: &str = "FE-MEAN";
    pub const FE_MED: &str = "FE-MED";
    pub const FE_MIN: &str = "FE-MIN";
    pub const FE_ROM: &str = "FE-ROM";
    pub const MAXTS: &str = "MAXTS";
    pub const MEANTS: &str = "MEANTS";
    pub const MINTS: &str = "MINTS";
    pub const MULTTS: &str = "MULTTS";
    pub const CONST: &str = "CONST";
    pub const NDTS_ABS: &str = "NDTS ABS";
    pub const NDTS: &str = "NDTS";
    pub const NORM: &str = "NORM";
    pub const NORMMEAN: &str = "NORMMEAN";
    pub const RELRAT: &str = "RELRAT";
    pub const DETREND: &str = "DETREND";
    pub const SORT_TS: &str = "SORT TS";
    pub const SQR: &str = "SQR";
    pub const TS_DISCR_TS: &str = "TS->DISCR TS";
    pub const TS_PC_TS: &str = "TS->PC TS";
    pub const SHIFT: &str = "SHIFT";
    pub const REGION: &str = "REGION";
    pub const THRES: &str = "THRES";
    pub const VELOCITY: &str = "V";
    pub const VELOCITY_CAUSAL: &str = "V_kausal";
    pub const WAVEDEC: &str = "Wavedec";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PluginKind {
    /// Maps a time series (or segment) to one or more scalars per record.
    Sf,
    /// Maps one or more time series to one or more time series.
    Ts,
}

impl fmt::Display for PluginKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PluginKind::Sf => write!(f, "SF"),
            PluginKind::Ts => write!(f, "TS"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TsInputs {
    Exact(usize),
    /// Multi-series combiners accept any number of inputs >= 1.
    Unbounded,
}

impl fmt::Display for TsInputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TsInputs::Exact(n) => write!(f, "{n}"),
            TsInputs::Unbounded => write!(f, "Inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamKind {
    Real,
    PositiveReal,
    Integer,
    PositiveInteger,
    Enum,
    RealPair,
    RealTriple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamValue {
    Real(f64),
    Integer(i64),
    Enum(String),
    RealPair([f64; 2]),
    RealTriple([f64; 3]),
}

impl ParamValue {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            ParamValue::Real(v) => Some(*v),
            ParamValue::Integer(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            ParamValue::Integer(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_enum(&self) -> Option<&str> {
        match self {
            ParamValue::Enum(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<[f64; 2]> {
        match self {
            ParamValue::RealPair(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_triple(&self) -> Option<[f64; 3]> {
        match self {
            ParamValue::RealTriple(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Nonempty exactly when `kind == Enum`.
    pub enum_values: Vec<String>,
    pub default: Option<ParamValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluginDescriptor {
    pub id: String,
    pub display_name: String,
    pub kind: PluginKind,
    pub ts_inputs: TsInputs,
    pub ts_outputs: usize,
    pub sf_outputs: usize,
    pub segment_capable: bool,
    pub params: Vec<ParamSpec>,
}

impl PluginDescriptor {
    pub fn output_count(&self) -> usize {
        self.ts_outputs + self.sf_outputs
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// One plugin application: which plugin, on which channels, with which
/// parameters, optionally restricted to a named segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Invocation {
    pub plugin_id: String,
    pub inputs: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub segment: Option<String>,
    /// Output base name; defaults to `<ID>(<inputs joined by ','>)`.
    #[serde(default)]
    pub output: Option<String>,
}

impl Invocation {
    pub fn new(plugin_id: &str, inputs: &[&str]) -> Self {
        Self {
            plugin_id: plugin_id.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            params: BTreeMap::new(),
            segment: None,
            output: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: ParamValue) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_segment(mut self, name: &str) -> Self {
        self.segment = Some(name.to_string());
        self
    }

    pub fn with_output(mut self, name: &str) -> Self {
        self.output = Some(name.to_string());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    UnknownPlugin,
    Arity,
    UnknownInput,
    UnknownSegment,
    SegmentCapability,
    Parameter,
    Naming,
}

/// A validation finding. Validation collects all issues instead of failing
/// fast; an empty list means the invocation is executable.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn issue(kind: IssueKind, message: impl Into<String>) -> ValidationIssue {
    ValidationIssue {
        kind,
        message: message.into(),
    }
}

pub struct Registry {
    plugins: Vec<PluginDescriptor>,
}

impl Registry {
    pub fn get(&self, id: &str) -> Option<&PluginDescriptor> {
        self.plugins.iter().find(|p| p.id == id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PluginDescriptor> {
        self.plugins.iter()
    }

    pub fn len(&self) -> usize {
        self.plugins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plugins.is_empty()
    }
}

static REGISTRY: Lazy<Registry> = Lazy::new(|| Registry {
    plugins: catalog::build(),
});

/// The global plugin catalog.
pub fn registry() -> &'static Registry {
    &REGISTRY
}

/// Looks a plugin up by id.
pub fn registry_lookup(id: &str) -> crate::error::Result<&'static PluginDescriptor> {
    registry()
        .get(id)
        .ok_or_else(|| crate::error::Error::UnknownPlugin(id.to_string()))
}

/// Dataset shape information used by validation. A plain [`Dataset`] converts
/// into this; the pipeline dry-run folds predicted outputs into it so later
/// steps can reference earlier outputs.
#[derive(Debug, Clone)]
pub struct SchemaView {
    pub n_records: usize,
    pub k_count: usize,
    pub sample_rate: f64,
    pub channel_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub segments: Vec<(String, Segment)>,
}

impl From<&Dataset> for SchemaView {
    fn from(ds: &Dataset) -> Self {
        Self {
            n_records: ds.n_records(),
            k_count: ds.k_count(),
            sample_rate: ds.grid().sample_rate(),
            channel_names: ds.channels().iter().map(|c| c.name().to_string()).collect(),
            feature_names: ds.features().iter().map(|f| f.name().to_string()).collect(),
            segments: ds.segments().to_vec(),
        }
    }
}

impl SchemaView {
    pub fn has_name(&self, name: &str) -> bool {
        self.channel_names.iter().any(|n| n == name)
            || self.feature_names.iter().any(|n| n == name)
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }
}

/// What one output slot of a plugin produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSlot {
    Channel,
    Feature,
}

/// An invocation that passed validation: descriptor resolved, defaults
/// applied, output names fixed.
#[derive(Debug, Clone)]
pub struct ResolvedInvocation {
    pub descriptor: &'static PluginDescriptor,
    pub inputs: Vec<String>,
    pub params: BTreeMap<String, ParamValue>,
    pub segment: Option<String>,
    pub output_base: String,
    /// `(name, slot)` pairs in emission order.
    pub outputs: Vec<(String, OutputSlot)>,
}

impl ResolvedInvocation {
    pub fn param(&self, name: &str) -> &ParamValue {
        &self.params[name]
    }
}

/// Default output base name: `<ID>(<inputs joined by ','>)`.
pub fn default_output_base(plugin_id: &str, inputs: &[String]) -> String {
    format!("{}({})", plugin_id, inputs.join(","))
}

/// Output names for a descriptor: the base name itself for single-output
/// plugins, `base#i` (1-based) per slot otherwise.
pub fn output_names(descriptor: &PluginDescriptor, base: &str) -> Vec<(String, OutputSlot)> {
    let slot = match descriptor.kind {
        PluginKind::Sf => OutputSlot::Feature,
        PluginKind::Ts => OutputSlot::Channel,
    };
    let count = descriptor.output_count();
    if count == 1 {
        vec![(base.to_string(), slot)]
    } else {
        (1..=count).map(|i| (format!("{base}#{i}"), slot)).collect()
    }
}

/// Validates an invocation against a schema view, collecting all issues.
/// Returns the resolved plan when the issue list is empty.
pub fn validate_invocation_view(
    inv: &Invocation,
    view: &SchemaView,
) -> Result<ResolvedInvocation, Vec<ValidationIssue>> {
    let mut issues = Vec::new();

    let descriptor = match registry().get(&inv.plugin_id) {
        Some(d) => d,
        None => {
            return Err(vec![issue(
                IssueKind::UnknownPlugin,
                format!("unknown plugin `{}`", inv.plugin_id),
            )]);
        }
    };

    // Arity.
    match descriptor.ts_inputs {
        TsInputs::Exact(n) if inv.inputs.len() != n => {
            issues.push(issue(
                IssueKind::Arity,
                format!(
                    "plugin `{}` takes {} input(s), got {}",
                    descriptor.id,
                    n,
                    inv.inputs.len()
                ),
            ));
        }
        TsInputs::Unbounded if inv.inputs.is_empty() => {
            issues.push(issue(
                IssueKind::Arity,
                format!("plugin `{}` needs at least one input", descriptor.id),
            ));
        }
        _ => {}
    }

    // Input channels must exist.
    for name in &inv.inputs {
        if !view.channel_names.iter().any(|n| n == name) {
            issues.push(issue(
                IssueKind::UnknownInput,
                format!("unknown channel `{name}`"),
            ));
        }
    }

    // Segment rules.
    if let Some(seg) = &inv.segment {
        if !descriptor.segment_capable {
            issues.push(issue(
                IssueKind::SegmentCapability,
                format!("plugin `{}` does not accept segments", descriptor.id),
            ));
        } else if view.segment(seg).is_none() {
            issues.push(issue(
                IssueKind::UnknownSegment,
                format!("unknown segment `{seg}`"),
            ));
        }
    }

    // Parameters: unknown names, then type/range checks with defaults applied.
    let mut params = BTreeMap::new();
    for (name, value) in &inv.params {
        if descriptor.param(name).is_none() {
            issues.push(issue(
                IssueKind::Parameter,
                format!("plugin `{}` has no parameter `{name}`", descriptor.id),
            ));
        } else {
            params.insert(name.clone(), value.clone());
        }
    }
    for spec in &descriptor.params {
        match params.get(&spec.name) {
            None => match &spec.default {
                Some(d) => {
                    params.insert(spec.name.clone(), d.clone());
                }
                None => issues.push(issue(
                    IssueKind::Parameter,
                    format!("missing required parameter `{}`", spec.name),
                )),
            },
            Some(value) => {
                if let Err(msg) = check_param_kind(spec, value) {
                    issues.push(issue(
                        IssueKind::Parameter,
                        format!("parameter `{}`: {msg}", spec.name),
                    ));
                }
            }
        }
    }

    // Coerce integers handed to real-typed parameters so kernels can rely on
    // the declared kind.
    for spec in &descriptor.params {
        if matches!(spec.kind, ParamKind::Real | ParamKind::PositiveReal) {
            if let Some(ParamValue::Integer(v)) = params.get(&spec.name) {
                let v = *v as f64;
                params.insert(spec.name.clone(), ParamValue::Real(v));
            }
        }
    }

    if issues.is_empty() {
        validate_semantics(descriptor, &params, inv.segment.as_deref(), view, &mut issues);
    }

    // Output naming.
    let output_base = inv
        .output
        .clone()
        .unwrap_or_else(|| default_output_base(&descriptor.id, &inv.inputs));
    let outputs = output_names(descriptor, &output_base);
    for (name, _) in &outputs {
        if view.has_name(name) {
            issues.push(issue(
                IssueKind::Naming,
                format!("output name `{name}` already exists"),
            ));
        }
    }

    if issues.is_empty() {
        Ok(ResolvedInvocation {
            descriptor,
            inputs: inv.inputs.clone(),
            params,
            segment: inv.segment.clone(),
            output_base,
            outputs,
        })
    } else {
        Err(issues)
    }
}

/// Validates an invocation against a dataset. Empty issue list means valid.
pub fn validate_invocation(inv: &Invocation, dataset: &Dataset) -> Vec<ValidationIssue> {
    match validate_invocation_view(inv, &SchemaView::from(dataset)) {
        Ok(_) => Vec::new(),
        Err(issues) => issues,
    }
}

fn check_param_kind(spec: &ParamSpec, value: &ParamValue) -> Result<(), String> {
    match spec.kind {
        ParamKind::Real => value.as_real().map(|_| ()).ok_or("expected a real".into()),
        ParamKind::PositiveReal => match value.as_real() {
            Some(v) if v > 0.0 => Ok(()),
            Some(_) => Err("must be positive".into()),
            None => Err("expected a real".into()),
        },
        ParamKind::Integer => value
            .as_integer()
            .map(|_| ())
            .ok_or("expected an integer".into()),
        ParamKind::PositiveInteger => match value.as_integer() {
            Some(v) if v >= 1 => Ok(()),
            Some(_) => Err("must be at least 1".into()),
            None => Err("expected an integer".into()),
        },
        ParamKind::Enum => match value.as_enum() {
            Some(v) if spec.enum_values.iter().any(|e| e == v) => Ok(()),
            Some(v) => Err(format!(
                "`{v}` is not one of [{}]",
                spec.enum_values.join(", ")
            )),
            None => Err("expected an enum string".into()),
        },
        ParamKind::RealPair => value
            .as_pair()
            .map(|_| ())
            .ok_or("expected a pair of reals".into()),
        ParamKind::RealTriple => value
            .as_triple()
            .map(|_| ())
            .ok_or("expected a triple of reals".into()),
    }
}

fn smoothing_in_range(name: &str, vals: &[f64], issues: &mut Vec<ValidationIssue>) {
    for (i, v) in vals.iter().enumerate() {
        if !(0.0..1.0).contains(v) {
            issues.push(issue(
                IssueKind::Parameter,
                format!("parameter `{name}`[{i}]: value {v} outside [0,1)"),
            ));
        }
    }
}

/// Plugin-specific numeric ranges the schema kinds cannot express.
fn validate_semantics(
    descriptor: &PluginDescriptor,
    params: &BTreeMap<String, ParamValue>,
    segment: Option<&str>,
    view: &SchemaView,
    issues: &mut Vec<ValidationIssue>,
) {
    let k = view.k_count;
    let nyquist = view.sample_rate / 2.0;
    let param_issue = |issues: &mut Vec<ValidationIssue>, name: &str, msg: String| {
        issues.push(issue(
            IssueKind::Parameter,
            format!("parameter `{name}`: {msg}"),
        ));
    };

    match descriptor.id.as_str() {
        ids::IIR => {
            let a = params["a"].as_real().unwrap();
            if !(0.0..1.0).contains(&a) {
                param_issue(issues, "a", format!("value {a} outside [0,1)"));
            }
        }
        ids::TREND => {
            let [fast, slow] = params["smoothing"].as_pair().unwrap();
            smoothing_in_range("smoothing", &[fast, slow], issues);
            if !(slow > fast) {
                param_issue(
                    issues,
                    "smoothing",
                    format!("aSlow ({slow}) must be greater than aFast ({fast})"),
                );
            }
        }
        ids::STDTS | ids::NABW => {
            let [fast, slow, sigma] = params["smoothing"].as_triple().unwrap();
            smoothing_in_range("smoothing", &[fast, slow, sigma], issues);
            if !(slow > fast) {
                param_issue(
                    issues,
                    "smoothing",
                    format!("aSlow ({slow}) must be greater than aFast ({fast})"),
                );
            }
        }
        ids::FE_MAX | ids::FE_MIN | ids::FE_MEAN | ids::FE_MED | ids::FE_ROM | ids::FE_MED_AC => {
            let w = params["window"].as_integer().unwrap();
            if w < 1 || w as usize > k {
                param_issue(issues, "window", format!("length {w} outside [1,{k}]"));
            }
        }
        ids::FIL => {
            let order = params["order"].as_integer().unwrap();
            if !(1..=8).contains(&order) {
                param_issue(issues, "order", format!("order {order} outside [1,8]"));
            }
            let [f1, f2] = params["frequencies"].as_pair().unwrap();
            let kind = params["filter_type"].as_enum().unwrap();
            if !(f1 > 0.0 && f1 < nyquist) {
                param_issue(
                    issues,
                    "frequencies",
                    format!("f1 = {f1} must lie in (0, {nyquist})"),
                );
            }
            if kind == "bandpass" && !(f2 > f1 && f2 < nyquist) {
                param_issue(
                    issues,
                    "frequencies",
                    format!("bandpass needs f1 < f2 < {nyquist}, got ({f1}, {f2})"),
                );
            }
        }
        ids::MORL => {
            let fc = params["center_freq"].as_real().unwrap();
            if !(fc < nyquist) {
                param_issue(
                    issues,
                    "center_freq",
                    format!("{fc} must be below the Nyquist frequency {nyquist}"),
                );
            }
        }
        ids::TS_SF => {
            let n = params["sample_point"].as_integer().unwrap();
            if n < 1 || n as usize > k {
                param_issue(issues, "sample_point", format!("{n} outside [1,{k}]"));
            }
        }
        ids::SHIFT => {
            let d = params["shift"].as_integer().unwrap();
            if d.unsigned_abs() as usize >= k {
                param_issue(issues, "shift", format!("|{d}| must be below K = {k}"));
            }
        }
        ids::REGION => {
            let lo = params["lower"].as_real().unwrap();
            let hi = params["upper"].as_real().unwrap();
            if lo > hi {
                param_issue(issues, "lower", format!("lower {lo} exceeds upper {hi}"));
            }
        }
        ids::WAVEDEC => {
            let levels = params["levels"].as_integer().unwrap();
            if !(1..=4).contains(&levels) {
                param_issue(issues, "levels", format!("levels {levels} outside [1,4]"));
            } else if k < (1usize << levels) {
                param_issue(
                    issues,
                    "levels",
                    format!("record length {k} too short for {levels} level(s)"),
                );
            }
        }
        ids::TS_DISCR_SF | ids::TS_FUZZY_SF | ids::TS_DISCR_TS => {
            let m = params["terms"].as_integer().unwrap();
            if !(2..=5).contains(&m) {
                param_issue(issues, "terms", format!("term count {m} outside [2,5]"));
            }
        }
        ids::TS_PC_SF | ids::TS_PC_TS => {
            let s_d = params["components"].as_integer().unwrap();
            if !(1..=2).contains(&s_d) {
                param_issue(issues, "components", format!("count {s_d} outside [1,2]"));
            }
            if descriptor.id == ids::TS_PC_SF {
                if let Some(seg) = segment.and_then(|s| view.segment(s)) {
                    let lens: Vec<usize> =
                        (0..seg.n_records()).map(|r| seg.len_for(r)).collect();
                    if lens.windows(2).any(|w| w[0] != w[1]) {
                        issues.push(issue(
                            IssueKind::Parameter,
                            "segment windows must have equal length for principal-component \
                             extraction"
                                .to_string(),
                        ));
                    }
                }
            }
        }
        ids::VELOCITY | ids::VELOCITY_CAUSAL => {
            if k < 2 {
                issues.push(issue(
                    IssueKind::Parameter,
                    format!("record length {k} too short for a first derivative"),
                ));
            }
        }
        ids::ACCELERATION => {
            if k < 3 {
                issues.push(issue(
                    IssueKind::Parameter,
                    format!("record length {k} too short for a second derivative"),
                ));
            }
        }
        ids::JERK => {
            if k < 4 {
                issues.push(issue(
                    IssueKind::Parameter,
                    format!("record length {k} too short for a third derivative"),
                ));
            }
        }
        _ => {}
    }
}
