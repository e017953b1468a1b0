//! Ordered plugin application over a dataset.
//!
//! A [`Pipeline`] is a list of [`Invocation`]s executed strictly in order;
//! each step sees every output of the steps before it. Model-backed steps
//! (norm curves, membership functions, principal components) fit their model
//! once on the main thread, store it in a [`ModelStore`] under the step's
//! output base name, and reuse a stored model on later runs instead of
//! refitting. The per-record transform work runs on a thread pool; results
//! are assembled in record order so the outcome is bitwise independent of
//! the worker count.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::dataset::{slice_segment, Channel, Dataset, Segment};
use crate::elementwise::{
    binarize, combine, detrend, diff_pair, normalize, relative_ratio, shift, sort_values, unary,
    zero_jump, BinarizeMode, CombineOp, DetrendMethod, NormalizeKind, UnaryOp,
};
use crate::error::{Error, Result};
use crate::filters::butterworth::{ButterworthFilter, ButterworthSpec, FilterType, InitMode};
use crate::filters::morlet::{MorletKernel, MorletSpec};
use crate::filters::{iir_first_order, individual_norm_deviation, std_estimate, trend_estimate};
use crate::models::membership::{DesignMethod, MembershipModel};
use crate::models::norm::{DeviationKind, NormModel};
use crate::models::pca::{pca_transform_channels, PcaModel};
use crate::models::wavelet::{wavedec_bands, Boundary, WaveletFamily, WaveletSpec};
use crate::models::{FittedModel, ModelStore};
use crate::registry::{
    default_output_base, ids, output_names, registry, validate_invocation_view, Invocation,
    OutputSlot, ResolvedInvocation, SchemaView, ValidationIssue,
};
use crate::sf::{
    basic_sf, discretization_frequencies, norm_deviation_sf, pca_scores_sf, sample_at,
    BasicStatKind, DiscretizationMode, NormDeviationKind,
};
use crate::windows::{
    derivative, forgetting_envelope, window_stat, DerivativeKind, TimeUnit, WindowStatKind,
};

/// Built-in forgetting factor of the running extremum filters.
pub const DEFAULT_FORGETTING: f64 = 0.95;

/// Environment variable overriding the forgetting factor; takes precedence
/// over any configured value.
pub const FORGETTING_ENV_VAR: &str = "TSFORGE_ENGINE_LAMBDA";

/// Built-in breakpoints for the fixed membership design.
pub const DEFAULT_FIX_BREAKPOINTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Engine-level constants shared by all steps of a pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConstants {
    /// Forgetting factor of the running extremum filters, in [0, 1).
    pub forgetting: f64,
    /// Breakpoints for the fixed membership design; a step with m terms
    /// takes the first m entries.
    pub fix_breakpoints: Vec<f64>,
}

impl Default for EngineConstants {
    fn default() -> Self {
        Self {
            forgetting: DEFAULT_FORGETTING,
            fix_breakpoints: DEFAULT_FIX_BREAKPOINTS.to_vec(),
        }
    }
}

impl EngineConstants {
    /// Builds the constants from optional configured values. The forgetting
    /// factor resolves with precedence: environment variable, then the
    /// configured value, then the built-in default.
    pub fn resolve(forgetting: Option<f64>, fix_breakpoints: Option<Vec<f64>>) -> Result<Self> {
        let forgetting = match std::env::var(FORGETTING_ENV_VAR) {
            Ok(raw) => raw.trim().parse::<f64>().map_err(|_| Error::Parameter {
                name: FORGETTING_ENV_VAR.into(),
                message: format!("`{raw}` is not a real number"),
            })?,
            Err(_) => forgetting.unwrap_or(DEFAULT_FORGETTING),
        };
        if !(0.0..1.0).contains(&forgetting) {
            return Err(Error::Parameter {
                name: "forgetting".into(),
                message: format!("value {forgetting} outside [0,1)"),
            });
        }
        let fix_breakpoints = fix_breakpoints.unwrap_or_else(|| DEFAULT_FIX_BREAKPOINTS.to_vec());
        if fix_breakpoints.len() < 2 {
            return Err(Error::Parameter {
                name: "fix_breakpoints".into(),
                message: "need at least two breakpoints".into(),
            });
        }
        if fix_breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter {
                name: "fix_breakpoints".into(),
                message: "breakpoints must be strictly ascending".into(),
            });
        }
        Ok(Self {
            forgetting,
            fix_breakpoints,
        })
    }
}

/// An ordered list of plugin invocations plus the engine state they share.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub steps: Vec<Invocation>,
    /// 1-based indices of the records used to fit norm curves; all records
    /// when empty.
    pub reference_records: Vec<usize>,
    pub constants: EngineConstants,
}

impl Pipeline {
    pub fn new(steps: Vec<Invocation>) -> Self {
        Self {
            steps,
            reference_records: Vec::new(),
            constants: EngineConstants::default(),
        }
    }

    pub fn with_reference_records(mut self, records: Vec<usize>) -> Self {
        self.reference_records = records;
        self
    }

    pub fn with_constants(mut self, constants: EngineConstants) -> Self {
        self.constants = constants;
        self
    }
}

/// Why a pipeline run stopped. Step indices are 1-based.
#[derive(Debug)]
pub enum PipelineError {
    /// A step failed validation; nothing was executed.
    Validation {
        step: usize,
        issues: Vec<ValidationIssue>,
    },
    /// A step failed while computing. Step 0 marks setup failures that
    /// precede the first step.
    Runtime { step: usize, source: Error },
}

impl PipelineError {
    pub fn step(&self) -> usize {
        match self {
            PipelineError::Validation { step, .. } => *step,
            PipelineError::Runtime { step, .. } => *step,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Validation { step, issues } => {
                write!(f, "step {step} failed validation: ")?;
                for (i, issue) in issues.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{issue}")?;
                }
                Ok(())
            }
            PipelineError::Runtime { step, source } => {
                write!(f, "step {step} failed: {source}")
            }
        }
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            PipelineError::Validation { .. } => None,
            PipelineError::Runtime { source, .. } => Some(source),
        }
    }
}

/// What one executed step produced.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// 1-based position in the pipeline.
    pub step: usize,
    pub plugin_id: String,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct ExecutionReport {
    pub steps: Vec<StepReport>,
    pub models_fitted: usize,
    pub models_reused: usize,
}

impl ExecutionReport {
    /// All warnings across steps, prefixed with the step number.
    pub fn warnings(&self) -> Vec<String> {
        self.steps
            .iter()
            .flat_map(|s| {
                s.warnings
                    .iter()
                    .map(move |w| format!("step {}: {w}", s.step))
            })
            .collect()
    }
}

/// One predicted output of a dry run.
#[derive(Debug, Clone)]
pub struct PlanEntry {
    pub step: usize,
    pub plugin_id: String,
    pub output: String,
    pub slot: OutputSlot,
    pub segment: Option<String>,
}

impl Pipeline {
    /// Validates every step against the evolving schema without executing
    /// anything. Predicted outputs of a failed step still become visible to
    /// later steps so one mistake does not cascade into unknown-input noise.
    pub fn validate(&self, dataset: &Dataset) -> Vec<(usize, Vec<ValidationIssue>)> {
        let mut view = SchemaView::from(dataset);
        let mut findings = Vec::new();
        for (i, inv) in self.steps.iter().enumerate() {
            match validate_invocation_view(inv, &view) {
                Ok(resolved) => fold_outputs(&mut view, resolved.outputs.iter()),
                Err(issues) => {
                    if let Some(descriptor) = registry().get(&inv.plugin_id) {
                        let base = inv
                            .output
                            .clone()
                            .unwrap_or_else(|| default_output_base(&inv.plugin_id, &inv.inputs));
                        fold_outputs(&mut view, output_names(descriptor, &base).iter());
                    }
                    findings.push((i + 1, issues));
                }
            }
        }
        findings
    }

    /// Resolves the full execution plan without computing anything. Stops at
    /// the first invalid step.
    pub fn dry_run(&self, dataset: &Dataset) -> std::result::Result<Vec<PlanEntry>, PipelineError> {
        let mut view = SchemaView::from(dataset);
        let mut plan = Vec::new();
        for (i, inv) in self.steps.iter().enumerate() {
            let resolved = validate_invocation_view(inv, &view).map_err(|issues| {
                PipelineError::Validation {
                    step: i + 1,
                    issues,
                }
            })?;
            for (name, slot) in &resolved.outputs {
                plan.push(PlanEntry {
                    step: i + 1,
                    plugin_id: resolved.descriptor.id.clone(),
                    output: name.clone(),
                    slot: *slot,
                    segment: resolved.segment.clone(),
                });
            }
            fold_outputs(&mut view, resolved.outputs.iter());
        }
        Ok(plan)
    }

    /// Runs the pipeline over a dataset and returns the grown dataset plus a
    /// per-step report. `jobs` sizes the transform thread pool; 0 lets the
    /// pool pick. The input dataset is never modified; on error the caller's
    /// data is untouched and the error names the failing step.
    pub fn execute(
        &self,
        dataset: &Dataset,
        store: &mut ModelStore,
        jobs: usize,
    ) -> std::result::Result<(Dataset, ExecutionReport), PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| PipelineError::Runtime {
                step: 0,
                source: Error::Parameter {
                    name: "jobs".into(),
                    message: e.to_string(),
                },
            })?;

        let mut working = dataset.clone();
        let mut report = ExecutionReport::default();
        for (i, inv) in self.steps.iter().enumerate() {
            let step = i + 1;
            let view = SchemaView::from(&working);
            let resolved = validate_invocation_view(inv, &view)
                .map_err(|issues| PipelineError::Validation { step, issues })?;
            let started = Instant::now();
            let mut warnings = Vec::new();
            let runtime = |source| PipelineError::Runtime { step, source };
            let outputs = run_step(
                &resolved,
                &working,
                store,
                self,
                &pool,
                &mut warnings,
                &mut report,
            )
            .map_err(runtime)?;
            match outputs {
                StepOutputs::Features(columns) => {
                    for ((name, _), column) in resolved.outputs.iter().zip(columns) {
                        working.add_feature(name.clone(), column).map_err(runtime)?;
                    }
                }
                StepOutputs::Channels(channels) => {
                    for ((name, _), values) in resolved.outputs.iter().zip(channels) {
                        working.add_channel(name.clone(), values).map_err(runtime)?;
                    }
                }
            }
            report.steps.push(StepReport {
                step,
                plugin_id: resolved.descriptor.id.clone(),
                outputs: resolved.outputs.iter().map(|(n, _)| n.clone()).collect(),
                warnings,
                wall_time: started.elapsed(),
            });
        }
        Ok((working, report))
    }
}

fn fold_outputs<'a>(
    view: &mut SchemaView,
    outputs: impl Iterator<Item = &'a (String, OutputSlot)>,
) {
    for (name, slot) in outputs {
        match slot {
            OutputSlot::Channel => view.channel_names.push(name.clone()),
            OutputSlot::Feature => view.feature_names.push(name.clone()),
        }
    }
}

enum StepOutputs {
    /// One length-N column per output slot.
    Features(Vec<Vec<f64>>),
    /// One row-major N x K matrix per output slot.
    Channels(Vec<Vec<f64>>),
}

/// In-segment samples of one record, or the whole row without a segment.
fn record_slice<'a>(
    channel: &'a Channel,
    segment: Option<&Segment>,
    record: usize,
) -> Result<&'a [f64]> {
    match segment {
        Some(seg) => slice_segment(channel, seg, record),
        None => Ok(channel.row(record)),
    }
}

/// A record-level [`Error::Degenerate`] or [`Error::EmptyData`] downgrades
/// to NaN outputs plus a warning; everything else aborts the step.
fn is_record_degeneracy(e: &Error) -> bool {
    matches!(e, Error::Degenerate(_) | Error::EmptyData(_))
}

fn run_records<T: Send>(
    pool: &rayon::ThreadPool,
    n_records: usize,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Vec<Result<T>> {
    pool.install(|| (0..n_records).into_par_iter().map(f).collect())
}

/// Runs a per-record scalar kernel over all records and assembles feature
/// columns in record order.
fn per_record_features(
    pool: &rayon::ThreadPool,
    n_records: usize,
    n_outputs: usize,
    warnings: &mut Vec<String>,
    f: impl Fn(usize) -> Result<Vec<f64>> + Sync + Send,
) -> Result<StepOutputs> {
    let results = run_records(pool, n_records, f);
    let mut columns = vec![Vec::with_capacity(n_records); n_outputs];
    for (record, result) in results.into_iter().enumerate() {
        match result {
            Ok(values) => {
                debug_assert_eq!(values.len(), n_outputs);
                for (column, value) in columns.iter_mut().zip(values) {
                    column.push(value);
                }
            }
            Err(e) if is_record_degeneracy(&e) => {
                for column in columns.iter_mut() {
                    column.push(f64::NAN);
                }
                warnings.push(format!("record {}: {e}; emitting NaN", record + 1));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(StepOutputs::Features(columns))
}

/// Runs a per-record series kernel over all records and assembles row-major
/// channels in record order.
fn per_record_channels(
    pool: &rayon::ThreadPool,
    n_records: usize,
    n_outputs: usize,
    k_count: usize,
    warnings: &mut Vec<String>,
    f: impl Fn(usize) -> Result<Vec<Vec<f64>>> + Sync + Send,
) -> Result<StepOutputs> {
    let results = run_records(pool, n_records, f);
    let mut channels = vec![Vec::with_capacity(n_records * k_count); n_outputs];
    for (record, result) in results.into_iter().enumerate() {
        match result {
            Ok(rows) => {
                debug_assert_eq!(rows.len(), n_outputs);
                for (channel, row) in channels.iter_mut().zip(rows) {
                    debug_assert_eq!(row.len(), k_count);
                    channel.extend_from_slice(&row);
                }
            }
            Err(e) if is_record_degeneracy(&e) => {
                for channel in channels.iter_mut() {
                    channel.extend(std::iter::repeat(f64::NAN).take(k_count));
                }
                warnings.push(format!("record {}: {e}; emitting NaN", record + 1));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(StepOutputs::Channels(channels))
}

// Parameter readers; the invocation passed validation, so the kinds are
// certain.
fn p_real(res: &ResolvedInvocation, name: &str) -> f64 {
    res.param(name).as_real().expect("validated real parameter")
}

fn p_int(res: &ResolvedInvocation, name: &str) -> i64 {
    res.param(name)
        .as_integer()
        .expect("validated integer parameter")
}

fn p_enum<'a>(res: &'a ResolvedInvocation, name: &str) -> &'a str {
    res.param(name).as_enum().expect("validated enum parameter")
}

fn p_pair(res: &ResolvedInvocation, name: &str) -> [f64; 2] {
    res.param(name).as_pair().expect("validated pair parameter")
}

fn p_triple(res: &ResolvedInvocation, name: &str) -> [f64; 3] {
    res.param(name)
        .as_triple()
        .expect("validated triple parameter")
}

fn p_yes(res: &ResolvedInvocation, name: &str) -> bool {
    p_enum(res, name) == "yes"
}

fn parse_design(raw: &str) -> (DesignMethod, bool) {
    match raw {
        "median" => (DesignMethod::Median, false),
        "median-rounded" => (DesignMethod::Median, true),
        "equal" => (DesignMethod::EqualDistribution, false),
        "equal-rounded" => (DesignMethod::EqualDistribution, true),
        "cluster" => (DesignMethod::Clustering, false),
        "cluster-rounded" => (DesignMethod::Clustering, true),
        "fix" => (DesignMethod::Fix, false),
        other => unreachable!("design `{other}` passed validation"),
    }
}

/// Rows used to fit norm curves: the configured reference records, or all
/// records when none are configured.
fn reference_rows<'a>(channel: &'a Channel, reference: &[usize]) -> Result<Vec<&'a [f64]>> {
    let n = channel.n_records();
    if reference.is_empty() {
        return Ok((0..n).map(|r| channel.row(r)).collect());
    }
    let mut rows = Vec::with_capacity(reference.len());
    for &r in reference {
        if r < 1 || r > n {
            return Err(Error::IndexOutOfRange {
                what: "reference record",
                index: r,
                max: n,
            });
        }
        rows.push(channel.row(r - 1));
    }
    Ok(rows)
}

struct StepCtx<'a> {
    resolved: &'a ResolvedInvocation,
    dataset: &'a Dataset,
    pipeline: &'a Pipeline,
}

fn ensure_norm_model(
    ctx: &StepCtx,
    store: &mut ModelStore,
    input: &Channel,
    warnings: &mut Vec<String>,
    report: &mut ExecutionReport,
) -> Result<NormModel> {
    let key = &ctx.resolved.output_base;
    if let Some(found) = store.get(key) {
        report.models_reused += 1;
        return Ok(found.as_norm()?.clone());
    }
    let rows = reference_rows(input, &ctx.pipeline.reference_records)?;
    let model = NormModel::fit(&rows)?;
    let floored = model.floored_points();
    if floored > 0 {
        warnings.push(format!(
            "norm spread floored at {floored} of {} sample points",
            model.len()
        ));
    }
    store.insert(key.clone(), FittedModel::Norm(model.clone()));
    report.models_fitted += 1;
    Ok(model)
}

fn ensure_membership_model(
    ctx: &StepCtx,
    store: &mut ModelStore,
    input: &Channel,
    segment: Option<&Segment>,
    report: &mut ExecutionReport,
) -> Result<MembershipModel> {
    let key = &ctx.resolved.output_base;
    if let Some(found) = store.get(key) {
        report.models_reused += 1;
        return Ok(found.as_membership()?.clone());
    }
    let m = p_int(ctx.resolved, "terms") as usize;
    let (design, rounding) = parse_design(p_enum(ctx.resolved, "design"));
    let fix;
    let fix_params = if design == DesignMethod::Fix {
        let available = &ctx.pipeline.constants.fix_breakpoints;
        if available.len() < m {
            return Err(Error::Parameter {
                name: "fix_breakpoints".into(),
                message: format!(
                    "fixed design with {m} terms needs {m} breakpoints, engine provides {}",
                    available.len()
                ),
            });
        }
        fix = available[..m].to_vec();
        Some(fix.as_slice())
    } else {
        None
    };
    let mut training = Vec::with_capacity(ctx.dataset.n_records() * ctx.dataset.k_count());
    for r in 0..ctx.dataset.n_records() {
        training.extend_from_slice(record_slice(input, segment, r)?);
    }
    let model = MembershipModel::fit(&training, m, design, fix_params, rounding)?;
    store.insert(key.clone(), FittedModel::Membership(model.clone()));
    report.models_fitted += 1;
    Ok(model)
}

fn ensure_pca_model(
    ctx: &StepCtx,
    store: &mut ModelStore,
    rows: &[&[f64]],
    s_d: usize,
    normalize_rows: bool,
    report: &mut ExecutionReport,
) -> Result<PcaModel> {
    let key = &ctx.resolved.output_base;
    if let Some(found) = store.get(key) {
        report.models_reused += 1;
        return Ok(found.as_pca()?.clone());
    }
    let model = PcaModel::fit(rows, s_d, normalize_rows)?;
    store.insert(key.clone(), FittedModel::Pca(model.clone()));
    report.models_fitted += 1;
    Ok(model)
}

fn run_step(
    resolved: &ResolvedInvocation,
    dataset: &Dataset,
    store: &mut ModelStore,
    pipeline: &Pipeline,
    pool: &rayon::ThreadPool,
    warnings: &mut Vec<String>,
    report: &mut ExecutionReport,
) -> Result<StepOutputs> {
    let inputs: Vec<&Channel> = resolved
        .inputs
        .iter()
        .map(|name| dataset.channel(name))
        .collect::<Result<_>>()?;
    let segment = resolved
        .segment
        .as_deref()
        .map(|name| dataset.segment(name))
        .transpose()?;
    let n = dataset.n_records();
    let k = dataset.k_count();
    let sample_rate = dataset.grid().sample_rate();
    let ctx = StepCtx {
        resolved,
        dataset,
        pipeline,
    };

    let features =
        |warnings: &mut Vec<String>, n_outputs, f: &(dyn Fn(usize) -> Result<Vec<f64>> + Sync)| {
            per_record_features(pool, n, n_outputs, warnings, f)
        };
    let channels = |warnings: &mut Vec<String>,
                    n_outputs,
                    f: &(dyn Fn(usize) -> Result<Vec<Vec<f64>>> + Sync)| {
        per_record_channels(pool, n, n_outputs, k, warnings, f)
    };
    // Single-input convenience for the many 1 -> 1 series transforms.
    let series = |warnings: &mut Vec<String>, f: &(dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync)| {
        let input = inputs[0];
        per_record_channels(pool, n, 1, k, warnings, &|r| Ok(vec![f(input.row(r))?]))
    };
    let stat = |warnings: &mut Vec<String>, kind: BasicStatKind| {
        let input = inputs[0];
        per_record_features(pool, n, 1, warnings, &|r| {
            Ok(vec![basic_sf(record_slice(input, segment, r)?, kind)?])
        })
    };

    match resolved.descriptor.id.as_str() {
        // Scalar statistics.
        ids::COG => stat(warnings, BasicStatKind::Cog),
        ids::MAX => stat(warnings, BasicStatKind::Max),
        ids::MAPO => stat(warnings, BasicStatKind::Mapo),
        ids::MEAN => stat(warnings, BasicStatKind::Mean),
        ids::MEAN_NAN => stat(warnings, BasicStatKind::MeanNan),
        ids::MEDIAN => stat(warnings, BasicStatKind::Median),
        ids::MEDIAN_NAN => stat(warnings, BasicStatKind::MedianNan),
        ids::MIN => stat(warnings, BasicStatKind::Min),
        ids::MIPO => stat(warnings, BasicStatKind::Mipo),
        ids::ROM => stat(warnings, BasicStatKind::Rom),
        ids::STD_SF => stat(warnings, BasicStatKind::StdK),
        ids::SUM => stat(warnings, BasicStatKind::Sum),
        ids::TS_SF => {
            let point = p_int(resolved, "sample_point") as usize;
            let input = inputs[0];
            features(warnings, 1, &|r| Ok(vec![sample_at(input.row(r), point)?]))
        }

        // Scalar deviations from a fitted norm curve.
        ids::ND_ABS | ids::ND_DIR | ids::ND_SIGN => {
            let kind = match resolved.descriptor.id.as_str() {
                ids::ND_ABS => NormDeviationKind::Abs,
                ids::ND_DIR => NormDeviationKind::Dir,
                _ => NormDeviationKind::Sign,
            };
            let input = inputs[0];
            let model = ensure_norm_model(&ctx, store, input, warnings, report)?;
            features(warnings, 1, &|r| {
                let x = record_slice(input, segment, r)?;
                let (mu, sigma) = match segment {
                    Some(seg) => {
                        let (start, end) = seg.range(r);
                        (&model.mu()[start - 1..end], &model.sigma()[start - 1..end])
                    }
                    None => (model.mu(), model.sigma()),
                };
                Ok(vec![norm_deviation_sf(x, mu, sigma, kind)?])
            })
        }

        // Scalar term frequencies of a fitted discretization.
        ids::TS_DISCR_SF | ids::TS_FUZZY_SF => {
            let mode = if resolved.descriptor.id == ids::TS_DISCR_SF {
                DiscretizationMode::Crisp
            } else {
                DiscretizationMode::Fuzzy
            };
            let input = inputs[0];
            let model = ensure_membership_model(&ctx, store, input, segment, report)?;
            features(warnings, 5, &|r| {
                let x = record_slice(input, segment, r)?;
                Ok(discretization_frequencies(x, &model, mode)?.to_vec())
            })
        }

        // Scalar principal-component scores of whole records.
        ids::TS_PC_SF => {
            let s_d = p_int(resolved, "components") as usize;
            let normalize_rows = p_yes(resolved, "normalize");
            let input = inputs[0];
            let rows: Vec<&[f64]> = (0..n)
                .map(|r| record_slice(input, segment, r))
                .collect::<Result<_>>()?;
            let model = ensure_pca_model(&ctx, store, &rows, s_d, normalize_rows, report)?;
            features(warnings, 2, &|r| {
                let x = record_slice(input, segment, r)?;
                Ok(pca_scores_sf(x, &model, s_d)?.to_vec())
            })
        }

        // Elementwise series transforms.
        ids::ABS => series(warnings, &|x| unary(x, UnaryOp::Abs)),
        ids::SIGNIN => series(warnings, &|x| unary(x, UnaryOp::SignChange)),
        ids::ROOT => series(warnings, &|x| unary(x, UnaryOp::Sqrt)),
        ids::LOG10 => series(warnings, &|x| unary(x, UnaryOp::Log10)),
        ids::SQR => series(warnings, &|x| unary(x, UnaryOp::Sqr)),
        ids::CONST => {
            let gain = p_real(resolved, "gain");
            series(warnings, &move |x| unary(x, UnaryOp::ConstGain(gain)))
        }

        // Derivatives.
        ids::VELOCITY | ids::VELOCITY_CAUSAL | ids::ACCELERATION | ids::JERK => {
            let kind = match resolved.descriptor.id.as_str() {
                ids::VELOCITY => DerivativeKind::Velocity,
                ids::VELOCITY_CAUSAL => DerivativeKind::VelocityCausal,
                ids::ACCELERATION => DerivativeKind::Acceleration,
                _ => DerivativeKind::Jerk,
            };
            let unit = match p_enum(resolved, "time") {
                "per-second" => TimeUnit::PerSecond,
                _ => TimeUnit::Samples,
            };
            series(warnings, &move |x| derivative(x, kind, unit, sample_rate))
        }

        // Multi-series combiners.
        ids::ADDTS | ids::MAXTS | ids::MEANTS | ids::MINTS | ids::MULTTS => {
            let op = match resolved.descriptor.id.as_str() {
                ids::ADDTS => CombineOp::Add,
                ids::MAXTS => CombineOp::Max,
                ids::MEANTS => CombineOp::Mean,
                ids::MINTS => CombineOp::Min,
                _ => CombineOp::Mult,
            };
            channels(warnings, 1, &|r| {
                let rows: Vec<&[f64]> = inputs.iter().map(|c| c.row(r)).collect();
                Ok(vec![combine(&rows, op)?])
            })
        }
        ids::DIFF => channels(warnings, 1, &|r| {
            Ok(vec![diff_pair(inputs[0].row(r), inputs[1].row(r))?])
        }),
        ids::RELRAT => channels(warnings, 1, &|r| {
            Ok(vec![relative_ratio(inputs[0].row(r), inputs[1].row(r))?])
        }),

        // Recursive smoothing filters.
        ids::IIR => {
            let a = p_real(resolved, "a");
            series(warnings, &move |x| iir_first_order(x, a))
        }
        ids::TREND => {
            let [fast, slow] = p_pair(resolved, "smoothing");
            series(warnings, &move |x| trend_estimate(x, fast, slow))
        }
        ids::STDTS => {
            let [fast, slow, sigma] = p_triple(resolved, "smoothing");
            series(warnings, &move |x| std_estimate(x, fast, slow, sigma))
        }
        ids::NABW => {
            let [fast, slow, sigma] = p_triple(resolved, "smoothing");
            series(warnings, &move |x| {
                individual_norm_deviation(x, fast, slow, sigma)
            })
        }
        ids::FIL_MAX | ids::FIL_MIN => {
            let want_max = resolved.descriptor.id == ids::FIL_MAX;
            let lambda = pipeline.constants.forgetting;
            series(warnings, &move |x| {
                forgetting_envelope(x, lambda, want_max)
            })
        }

        // Frequency-selective filters.
        ids::FIL => {
            let [f1, f2] = p_pair(resolved, "frequencies");
            let filter_type = match p_enum(resolved, "filter_type") {
                "lowpass" => FilterType::Lowpass,
                "highpass" => FilterType::Highpass,
                _ => FilterType::Bandpass,
            };
            let init = match p_enum(resolved, "init") {
                "zero" => InitMode::Zero,
                _ => InitMode::SteadyState,
            };
            let spec = ButterworthSpec {
                filter_type,
                f1,
                f2: (filter_type == FilterType::Bandpass).then_some(f2),
                order: p_int(resolved, "order") as usize,
                init,
            };
            let filter = ButterworthFilter::design(&spec, sample_rate)?;
            series(warnings, &move |x| Ok(filter.apply(x, init)))
        }
        ids::MORL => {
            let spec = MorletSpec {
                center_freq: p_real(resolved, "center_freq"),
                eigen_freq: p_real(resolved, "eigen_freq"),
                causal: p_yes(resolved, "causal"),
            };
            let kernel = MorletKernel::design(&spec, sample_rate)?;
            series(warnings, &move |x| kernel.apply(x))
        }

        // Moving-window statistics.
        ids::FE_MAX | ids::FE_MEAN | ids::FE_MED | ids::FE_MIN | ids::FE_ROM | ids::FE_MED_AC => {
            let kind = match resolved.descriptor.id.as_str() {
                ids::FE_MAX => WindowStatKind::Max,
                ids::FE_MEAN => WindowStatKind::Mean,
                ids::FE_MED => WindowStatKind::Median,
                ids::FE_MIN => WindowStatKind::Min,
                ids::FE_ROM => WindowStatKind::Rom,
                _ => WindowStatKind::MedianAcausal,
            };
            let window = p_int(resolved, "window") as usize;
            series(warnings, &move |x| window_stat(x, window, kind))
        }

        // Whole-vector transforms.
        ids::ZEROJUMP => series(warnings, &|x| Ok(zero_jump(x))),
        ids::SORT_TS => series(warnings, &|x| Ok(sort_values(x))),
        ids::SHIFT => {
            let d = p_int(resolved, "shift");
            series(warnings, &move |x| shift(x, d))
        }
        ids::REGION => {
            let mode = BinarizeMode::Region {
                lower: p_real(resolved, "lower"),
                upper: p_real(resolved, "upper"),
            };
            series(warnings, &move |x| Ok(binarize(x, mode)))
        }
        ids::THRES => {
            let mode = BinarizeMode::Threshold(p_real(resolved, "threshold"));
            series(warnings, &move |x| Ok(binarize(x, mode)))
        }
        ids::NORM => {
            let kind = match p_enum(resolved, "kind") {
                "minmax" => NormalizeKind::MinMax,
                "zscore" => NormalizeKind::ZScore,
                "maxabs" => NormalizeKind::MaxAbs,
                _ => NormalizeKind::Mean,
            };
            series(warnings, &move |x| normalize(x, kind))
        }
        ids::NORMMEAN => series(warnings, &|x| normalize(x, NormalizeKind::Mean)),
        ids::DETREND => {
            let method = match p_enum(resolved, "method") {
                "constant" => DetrendMethod::Constant,
                _ => DetrendMethod::Linear,
            };
            series(warnings, &move |x| detrend(x, method))
        }

        // Series deviations from a fitted norm curve.
        ids::NDTS | ids::NDTS_ABS => {
            let kind = if resolved.descriptor.id == ids::NDTS {
                DeviationKind::Signed
            } else {
                DeviationKind::Abs
            };
            let input = inputs[0];
            let model = ensure_norm_model(&ctx, store, input, warnings, report)?;
            series(warnings, &move |x| model.deviation_series(x, kind))
        }

        // Series discretization; outside a segment window samples pass
        // through unchanged.
        ids::TS_DISCR_TS => {
            let input = inputs[0];
            let model = ensure_membership_model(&ctx, store, input, segment, report)?;
            channels(warnings, 1, &|r| {
                let row = input.row(r);
                match segment {
                    Some(seg) => {
                        let (start, end) = seg.range(r);
                        let mut out = row.to_vec();
                        let inside = model.discretize(&row[start - 1..end]);
                        out[start - 1..end].copy_from_slice(&inside);
                        Ok(vec![out])
                    }
                    None => Ok(vec![model.discretize(row)]),
                }
            })
        }

        // Principal-component series over parallel channels.
        ids::TS_PC_TS => {
            let s_d = p_int(resolved, "components") as usize;
            let normalize_rows = p_yes(resolved, "normalize");
            if p_yes(resolved, "shared") {
                // One model over every (record, sample) observation.
                let mut observations = Vec::with_capacity(n * k);
                for r in 0..n {
                    let rows: Vec<&[f64]> = inputs.iter().map(|c| c.row(r)).collect();
                    for t in 0..k {
                        observations.push(rows.iter().map(|row| row[t]).collect::<Vec<f64>>());
                    }
                }
                let refs: Vec<&[f64]> = observations.iter().map(|o| o.as_slice()).collect();
                let model = ensure_pca_model(&ctx, store, &refs, s_d, normalize_rows, report)?;
                channels(warnings, 2, &|r| {
                    let rows: Vec<&[f64]> = inputs.iter().map(|c| c.row(r)).collect();
                    let [first, second] = pca_transform_channels(&rows, &model)?;
                    Ok(vec![first, second])
                })
            } else {
                // Refit per record on its own K observations.
                channels(warnings, 2, &|r| {
                    let rows: Vec<&[f64]> = inputs.iter().map(|c| c.row(r)).collect();
                    let observations: Vec<Vec<f64>> = (0..k)
                        .map(|t| rows.iter().map(|row| row[t]).collect())
                        .collect();
                    let refs: Vec<&[f64]> = observations.iter().map(|o| o.as_slice()).collect();
                    let model = PcaModel::fit(&refs, s_d, normalize_rows)?;
                    let [first, second] = pca_transform_channels(&rows, &model)?;
                    Ok(vec![first, second])
                })
            }
        }

        // Multilevel wavelet band decomposition.
        ids::WAVEDEC => {
            let family = match p_enum(resolved, "wavelet") {
                "haar" => WaveletFamily::Haar,
                "db2" => WaveletFamily::Db2,
                _ => WaveletFamily::Db4,
            };
            let boundary = match p_enum(resolved, "boundary") {
                "periodic" => Boundary::Periodic,
                _ => Boundary::Symmetric,
            };
            let spec = WaveletSpec {
                family,
                levels: p_int(resolved, "levels") as usize,
                boundary,
            };
            channels(warnings, 5, &|r| {
                Ok(wavedec_bands(inputs[0].row(r), &spec)?.to_vec())
            })
        }

        other => Err(Error::UnknownPlugin(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SampleGrid;
    use crate::registry::ParamValue;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn grid(k: usize) -> SampleGrid {
        SampleGrid::new(k, 100.0).unwrap()
    }

    fn toy() -> Dataset {
        let mut ds = Dataset::new(grid(8), 3).unwrap();
        let x: Vec<f64> = (0..24).map(|v| (v as f64 * 0.7).sin() + 0.1 * v as f64).collect();
        let y: Vec<f64> = (0..24).map(|v| (v as f64 * 0.3).cos()).collect();
        ds.add_channel("x", x).unwrap();
        ds.add_channel("y", y).unwrap();
        ds.add_segment(
            "mid",
            Segment::new(vec![(2, 6), (3, 7), (1, 5)], 8).unwrap(),
        )
        .unwrap();
        ds
    }

    fn random_dataset(n: usize, k: usize, seed: u64) -> Dataset {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut ds = Dataset::new(grid(k), n).unwrap();
        let x: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-1.0..5.0)).collect();
        ds.add_channel("x", x).unwrap();
        ds.add_channel("y", y).unwrap();
        ds
    }

    fn run(pipeline: &Pipeline, ds: &Dataset, jobs: usize) -> (Dataset, ExecutionReport) {
        let mut store = ModelStore::new();
        pipeline.execute(ds, &mut store, jobs).unwrap()
    }

    #[test]
    fn constants_resolution_precedence() {
        // No env var: built-in default, then the configured value.
        std::env::remove_var(FORGETTING_ENV_VAR);
        assert_eq!(EngineConstants::resolve(None, None).unwrap().forgetting, DEFAULT_FORGETTING);
        assert_eq!(
            EngineConstants::resolve(Some(0.5), None).unwrap().forgetting,
            0.5
        );
        // Env var wins over the configured value.
        std::env::set_var(FORGETTING_ENV_VAR, "0.25");
        assert_eq!(
            EngineConstants::resolve(Some(0.5), None).unwrap().forgetting,
            0.25
        );
        std::env::set_var(FORGETTING_ENV_VAR, "not-a-number");
        assert!(EngineConstants::resolve(Some(0.5), None).is_err());
        std::env::remove_var(FORGETTING_ENV_VAR);
        // Range and breakpoint checks.
        assert!(EngineConstants::resolve(Some(1.0), None).is_err());
        assert!(EngineConstants::resolve(None, Some(vec![1.0])).is_err());
        assert!(EngineConstants::resolve(None, Some(vec![1.0, 1.0])).is_err());
    }

    #[test]
    fn sf_step_appends_feature_with_default_name() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![Invocation::new(ids::MAX, &["x"])]);
        let (out, report) = run(&pipeline, &ds, 1);
        let feature = out.feature("MAX(x)").unwrap();
        for r in 0..3 {
            let expected = basic_sf(out.channel("x").unwrap().row(r), BasicStatKind::Max).unwrap();
            assert_eq!(feature.values()[r].to_bits(), expected.to_bits());
        }
        assert_eq!(report.steps.len(), 1);
        assert_eq!(report.steps[0].outputs, vec!["MAX(x)".to_string()]);
    }

    #[test]
    fn ts_step_matches_kernel_bitwise() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::IIR, &["x"]).with_param("a", ParamValue::Real(0.8))
        ]);
        let (out, _) = run(&pipeline, &ds, 1);
        let produced = out.channel("IIR(x)").unwrap();
        for r in 0..3 {
            let expected = iir_first_order(ds.channel("x").unwrap().row(r), 0.8).unwrap();
            for (a, b) in produced.row(r).iter().zip(expected.iter()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn segmented_sf_uses_window_samples_only() {
        let ds = toy();
        let pipeline =
            Pipeline::new(vec![Invocation::new(ids::MEAN, &["x"]).with_segment("mid")]);
        let (out, _) = run(&pipeline, &ds, 1);
        let feature = out.feature("MEAN(x)").unwrap();
        let seg = ds.segment("mid").unwrap();
        for r in 0..3 {
            let window = slice_segment(ds.channel("x").unwrap(), seg, r).unwrap();
            let expected = basic_sf(window, BasicStatKind::Mean).unwrap();
            assert_eq!(feature.values()[r].to_bits(), expected.to_bits());
        }
    }

    #[test]
    fn multi_output_steps_emit_numbered_slots() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::WAVEDEC, &["x"])
                .with_param("levels", ParamValue::Integer(2)),
            Invocation::new(ids::TS_DISCR_SF, &["y"])
                .with_param("terms", ParamValue::Integer(3)),
        ]);
        let (out, _) = run(&pipeline, &ds, 1);
        for i in 1..=5 {
            assert!(out.has_channel(&format!("Wavedec(x)#{i}")));
            assert!(out.has_feature(&format!("TS->DISCR SF(y)#{i}")));
        }
        // Band sum reproduces the input.
        for r in 0..3 {
            let x = ds.channel("x").unwrap().row(r);
            for t in 0..8 {
                let sum: f64 = (1..=5)
                    .map(|i| {
                        out.channel(&format!("Wavedec(x)#{i}"))
                            .unwrap()
                            .row(r)[t]
                    })
                    .sum();
                assert!((sum - x[t]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn chained_steps_see_earlier_outputs() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::ABS, &["x"]),
            Invocation::new(ids::MEAN, &["ABS(x)"]),
        ]);
        let (out, _) = run(&pipeline, &ds, 1);
        assert!(out.has_feature("MEAN(ABS(x))"));
        let plan = pipeline.dry_run(&ds).unwrap();
        assert_eq!(plan.len(), 2);
        assert_eq!(plan[0].output, "ABS(x)");
        assert_eq!(plan[1].output, "MEAN(ABS(x))");
        assert_eq!(plan[1].slot, OutputSlot::Feature);
    }

    #[test]
    fn validation_failure_names_the_step() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::ABS, &["x"]),
            Invocation::new(ids::IIR, &["nope"]).with_param("a", ParamValue::Real(0.5)),
        ]);
        let mut store = ModelStore::new();
        match pipeline.execute(&ds, &mut store, 1) {
            Err(PipelineError::Validation { step, issues }) => {
                assert_eq!(step, 2);
                assert!(!issues.is_empty());
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_all_steps_without_cascade() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::IIR, &["x"]).with_param("a", ParamValue::Real(2.0)),
            // References the first step's output; must not be flagged even
            // though that step is invalid.
            Invocation::new(ids::MEAN, &["IIR(x)"]),
            Invocation::new(ids::DIFF, &["x"]),
        ]);
        let findings = pipeline.validate(&ds);
        let steps: Vec<usize> = findings.iter().map(|(s, _)| *s).collect();
        assert_eq!(steps, vec![1, 3]);
    }

    #[test]
    fn runtime_failure_names_step_and_preserves_input() {
        let mut ds = Dataset::new(grid(4), 1).unwrap();
        ds.add_channel("x", vec![1.0, -1.0, 4.0, 9.0]).unwrap();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::ABS, &["x"]),
            Invocation::new(ids::ROOT, &["x"]),
        ]);
        let before = ds.clone();
        let mut store = ModelStore::new();
        match pipeline.execute(&ds, &mut store, 1) {
            Err(PipelineError::Runtime { step, source }) => {
                assert_eq!(step, 2);
                assert!(matches!(source, Error::Domain { index: 2, .. }));
            }
            other => panic!("expected runtime failure, got {other:?}"),
        }
        assert_eq!(ds, before);
    }

    #[test]
    fn degenerate_records_become_nan_with_warning() {
        let mut ds = Dataset::new(grid(4), 3).unwrap();
        // Record 2 is all zero: no mass for a center of gravity and no
        // range to normalize by.
        ds.add_channel(
            "x",
            vec![
                1.0, 2.0, 3.0, 4.0, //
                0.0, 0.0, 0.0, 0.0, //
                2.0, 1.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::COG, &["x"]),
            Invocation::new(ids::NORM, &["x"]),
        ]);
        let (out, report) = run(&pipeline, &ds, 1);
        let cog = out.feature("COG(x)").unwrap().values();
        assert!(cog[0].is_finite());
        assert!(cog[1].is_nan());
        assert!(cog[2].is_finite());
        let norm = out.channel("NORM(x)").unwrap();
        assert!(norm.row(0).iter().all(|v| v.is_finite()));
        assert!(norm.row(1).iter().all(|v| v.is_nan()));
        for step in &report.steps {
            assert_eq!(step.warnings.len(), 1);
            assert!(step.warnings[0].contains("record 2"));
        }
    }

    #[test]
    fn parallel_execution_is_bitwise_reproducible() {
        let ds = random_dataset(12, 32, 7);
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::IIR, &["x"]).with_param("a", ParamValue::Real(0.9)),
            Invocation::new(ids::TREND, &["y"])
                .with_param("smoothing", ParamValue::RealPair([0.3, 0.9])),
            Invocation::new(ids::WAVEDEC, &["x"])
                .with_param("levels", ParamValue::Integer(3)),
            Invocation::new(ids::STD_SF, &["IIR(x)"]),
            Invocation::new(ids::MEDIAN, &["y"]),
            Invocation::new(ids::NDTS, &["x"]),
        ]);
        let (serial, _) = run(&pipeline, &ds, 1);
        let (parallel, _) = run(&pipeline, &ds, 4);
        assert_eq!(serial.channels().len(), parallel.channels().len());
        for (a, b) in serial.channels().iter().zip(parallel.channels().iter()) {
            assert_eq!(a.name(), b.name());
            for (x, y) in a.values().iter().zip(b.values().iter()) {
                assert_eq!(x.to_bits(), y.to_bits(), "channel {}", a.name());
            }
        }
        for (a, b) in serial.features().iter().zip(parallel.features().iter()) {
            assert_eq!(a.name(), b.name());
            for (x, y) in a.values().iter().zip(b.values().iter()) {
                assert_eq!(x.to_bits(), y.to_bits(), "feature {}", a.name());
            }
        }
    }

    #[test]
    fn model_store_reuse_skips_refit() {
        let ds = random_dataset(6, 16, 11);
        let pipeline = Pipeline::new(vec![Invocation::new(ids::NDTS, &["x"])]);
        let mut store = ModelStore::new();
        let (first, report) = pipeline.execute(&ds, &mut store, 1).unwrap();
        assert_eq!(report.models_fitted, 1);
        assert_eq!(report.models_reused, 0);
        assert!(store.get("NDTS(x)").is_some());

        // A second run with the preloaded store must reuse, not refit, and
        // reproduce the outputs bitwise.
        let (second, report) = pipeline.execute(&ds, &mut store, 1).unwrap();
        assert_eq!(report.models_fitted, 0);
        assert_eq!(report.models_reused, 1);
        let a = first.channel("NDTS(x)").unwrap().values();
        let b = second.channel("NDTS(x)").unwrap().values();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn wrong_model_kind_in_store_aborts() {
        let ds = random_dataset(6, 16, 13);
        let pipeline = Pipeline::new(vec![Invocation::new(ids::NDTS, &["x"])]);
        let mut store = ModelStore::new();
        let membership =
            MembershipModel::fit(&[0.0, 1.0, 2.0, 3.0], 2, DesignMethod::EqualDistribution, None, false)
                .unwrap();
        store.insert("NDTS(x)", FittedModel::Membership(membership));
        match pipeline.execute(&ds, &mut store, 1) {
            Err(PipelineError::Runtime { step: 1, source }) => {
                assert!(matches!(source, Error::Model(_)));
            }
            other => panic!("expected model-kind failure, got {other:?}"),
        }
    }

    #[test]
    fn reference_records_restrict_norm_fit() {
        let ds = random_dataset(5, 8, 17);
        let pipeline = Pipeline::new(vec![Invocation::new(ids::NDTS, &["x"])])
            .with_reference_records(vec![1, 3]);
        let mut store = ModelStore::new();
        pipeline.execute(&ds, &mut store, 1).unwrap();
        let stored = store.get("NDTS(x)").unwrap().as_norm().unwrap();
        let x = ds.channel("x").unwrap();
        let expected = NormModel::fit(&[x.row(0), x.row(2)]).unwrap();
        for (a, b) in stored.mu().iter().zip(expected.mu().iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // Out-of-range reference records abort the step that needs them.
        let bad = Pipeline::new(vec![Invocation::new(ids::NDTS, &["x"])])
            .with_reference_records(vec![9]);
        let mut store = ModelStore::new();
        assert!(matches!(
            bad.execute(&ds, &mut store, 1),
            Err(PipelineError::Runtime { step: 1, .. })
        ));
    }

    #[test]
    fn forgetting_constant_flows_into_envelopes() {
        let ds = toy();
        let constants = EngineConstants {
            forgetting: 0.5,
            ..EngineConstants::default()
        };
        let pipeline = Pipeline::new(vec![Invocation::new(ids::FIL_MAX, &["x"])])
            .with_constants(constants);
        let (out, _) = run(&pipeline, &ds, 1);
        let produced = out.channel("Fil-MAX(x)").unwrap();
        for r in 0..3 {
            let expected = forgetting_envelope(ds.channel("x").unwrap().row(r), 0.5, true).unwrap();
            for (a, b) in produced.row(r).iter().zip(expected.iter()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn fix_membership_design_uses_engine_breakpoints() {
        let ds = toy();
        let constants = EngineConstants {
            fix_breakpoints: vec![-10.0, 0.0, 10.0, 20.0, 30.0],
            ..EngineConstants::default()
        };
        let pipeline = Pipeline::new(vec![Invocation::new(ids::TS_DISCR_TS, &["x"])
            .with_param("terms", ParamValue::Integer(3))
            .with_param("design", ParamValue::Enum("fix".into()))])
        .with_constants(constants);
        let mut store = ModelStore::new();
        pipeline.execute(&ds, &mut store, 1).unwrap();
        let model = store
            .get("TS->DISCR TS(x)")
            .unwrap()
            .as_membership()
            .unwrap();
        assert_eq!(model.breakpoints(), &[-10.0, 0.0, 10.0]);
    }

    #[test]
    fn discretization_passes_through_outside_segment() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![Invocation::new(ids::TS_DISCR_TS, &["x"])
            .with_param("terms", ParamValue::Integer(2))
            .with_segment("mid")]);
        let (out, _) = run(&pipeline, &ds, 1);
        let produced = out.channel("TS->DISCR TS(x)").unwrap();
        let seg = ds.segment("mid").unwrap();
        let x = ds.channel("x").unwrap();
        for r in 0..3 {
            let (start, end) = seg.range(r);
            for t in 0..8 {
                let inside = t + 1 >= start && t + 1 <= end;
                if inside {
                    // Discretized samples take breakpoint values.
                    assert!(produced.row(r)[t].is_finite());
                } else {
                    assert_eq!(produced.row(r)[t].to_bits(), x.row(r)[t].to_bits());
                }
            }
        }
    }

    #[test]
    fn shared_component_series_stores_one_model() {
        let ds = random_dataset(4, 16, 23);
        let shared = Pipeline::new(vec![Invocation::new(ids::TS_PC_TS, &["x", "y"])
            .with_param("components", ParamValue::Integer(2))]);
        let mut store = ModelStore::new();
        let (out, report) = shared.execute(&ds, &mut store, 1).unwrap();
        assert_eq!(report.models_fitted, 1);
        assert!(out.has_channel("TS->PC TS(x,y)#1"));
        assert!(out.has_channel("TS->PC TS(x,y)#2"));

        let per_record = Pipeline::new(vec![Invocation::new(ids::TS_PC_TS, &["x", "y"])
            .with_param("components", ParamValue::Integer(2))
            .with_param("shared", ParamValue::Enum("no".into()))
            .with_output("pc-local")]);
        let mut store = ModelStore::new();
        let (_, report) = per_record.execute(&ds, &mut store, 1).unwrap();
        assert_eq!(report.models_fitted, 0);
        assert!(store.is_empty());
    }

    #[test]
    fn explicit_output_names_are_honored() {
        let ds = toy();
        let pipeline = Pipeline::new(vec![
            Invocation::new(ids::MEAN, &["x"])
                .with_segment("mid")
                .with_output("mid-mean"),
        ]);
        let (out, _) = run(&pipeline, &ds, 1);
        assert!(out.has_feature("mid-mean"));
    }
}
