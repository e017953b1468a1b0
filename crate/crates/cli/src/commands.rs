//! Subcommand implementations. Errors carry the exit-code class: validation
//! problems (bad configuration, bad arguments) exit 1, runtime problems
//! (I/O, numerical aborts) exit 2.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::Context;

use tsforge_core::filters::butterworth::{
    ButterworthFilter, ButterworthSpec, FilterType, InitMode,
};
use tsforge_core::pipeline::PipelineError;
use tsforge_core::registry::{registry, OutputSlot, TsInputs};
use tsforge_core::PluginKind;

use crate::csvio::format_value;
use crate::manifest::{load_project, save_outputs};
use crate::pipeline_config::load_pipeline;

/// Which exit code a failure maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    /// Exit 1: the inputs or configuration are wrong.
    Validation,
    /// Exit 2: the inputs were accepted but the work failed.
    Runtime,
}

#[derive(Debug)]
pub struct CmdError {
    pub class: FailureClass,
    pub message: String,
}

impl CmdError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            class: FailureClass::Validation,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            class: FailureClass::Runtime,
            message: message.into(),
        }
    }
}

pub type CmdResult = Result<(), CmdError>;

fn validation(err: anyhow::Error) -> CmdError {
    CmdError::validation(format!("{err:#}"))
}

fn runtime(err: anyhow::Error) -> CmdError {
    CmdError::runtime(format!("{err:#}"))
}

pub fn run(
    manifest_path: &Path,
    pipeline_path: &Path,
    out_dir: &Path,
    force: bool,
    jobs: usize,
) -> CmdResult {
    let project = load_project(manifest_path).map_err(validation)?;
    let pipeline = load_pipeline(pipeline_path).map_err(validation)?;
    if out_dir.exists() && !force {
        return Err(CmdError::validation(format!(
            "output directory `{}` exists; pass --force to write into it",
            out_dir.display()
        )));
    }

    let mut store = project.store.clone();
    let (result, report) = pipeline
        .execute(&project.dataset, &mut store, jobs)
        .map_err(|e| match e {
            PipelineError::Validation { .. } => CmdError::validation(e.to_string()),
            PipelineError::Runtime { .. } => CmdError::runtime(e.to_string()),
        })?;

    let saved = save_outputs(&project, &result, &store, out_dir).map_err(runtime)?;

    for step in &report.steps {
        println!(
            "step {}: {} -> {} [{:.1} ms]",
            step.step,
            step.plugin_id,
            step.outputs.join(", "),
            step.wall_time.as_secs_f64() * 1e3
        );
        for warning in &step.warnings {
            println!("  warning: {warning}");
        }
    }
    println!(
        "models: {} fitted, {} reused",
        report.models_fitted, report.models_reused
    );
    println!(
        "wrote {}, {} channel file(s) and {} to `{}`",
        saved.feature_file.file_name().unwrap().to_string_lossy(),
        saved.channel_files.len(),
        saved.manifest_file.file_name().unwrap().to_string_lossy(),
        out_dir.display()
    );
    Ok(())
}

pub fn check(manifest_path: &Path, pipeline_path: &Path) -> CmdResult {
    let project = load_project(manifest_path).map_err(validation)?;
    let pipeline = load_pipeline(pipeline_path).map_err(validation)?;
    let findings = pipeline.validate(&project.dataset);
    if !findings.is_empty() {
        let mut message = String::new();
        for (step, issues) in &findings {
            for issue in issues {
                let _ = writeln!(message, "step {step}: {issue}");
            }
        }
        return Err(CmdError::validation(message.trim_end().to_string()));
    }
    let plan = pipeline.dry_run(&project.dataset).map_err(|e| match e {
        PipelineError::Validation { .. } => CmdError::validation(e.to_string()),
        PipelineError::Runtime { .. } => CmdError::runtime(e.to_string()),
    })?;
    println!(
        "ok: {} step(s), {} output(s)",
        pipeline.steps.len(),
        plan.len()
    );
    for entry in &plan {
        let slot = match entry.slot {
            OutputSlot::Channel => "channel",
            OutputSlot::Feature => "feature",
        };
        let segment = entry
            .segment
            .as_deref()
            .map(|s| format!(" (segment `{s}`)"))
            .unwrap_or_default();
        println!(
            "step {}: {} -> {} [{slot}]{segment}",
            entry.step, entry.plugin_id, entry.output
        );
    }
    Ok(())
}

fn plugin_rows() -> Vec<[String; 6]> {
    registry()
        .iter()
        .map(|p| {
            let inputs = match p.ts_inputs {
                TsInputs::Exact(n) => n.to_string(),
                TsInputs::Unbounded => "Inf".to_string(),
            };
            let outputs = match p.kind {
                PluginKind::Sf => p.sf_outputs.to_string(),
                PluginKind::Ts => p.ts_outputs.to_string(),
            };
            let segments = if p.segment_capable { "yes" } else { "none" };
            let params: Vec<&str> = p.params.iter().map(|s| s.name.as_str()).collect();
            [
                p.id.clone(),
                p.kind.to_string(),
                inputs,
                outputs,
                segments.to_string(),
                params.join("; "),
            ]
        })
        .collect()
}

pub fn plugins(format: &str) -> CmdResult {
    let rows = plugin_rows();
    let header = ["id", "kind", "inputs", "outputs", "segments", "params"];
    match format {
        "csv" => {
            let mut writer = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(std::io::stdout());
            writer
                .write_record(header)
                .and_then(|_| rows.iter().try_for_each(|r| writer.write_record(r)))
                .and_then(|_| writer.flush().map_err(csv::Error::from))
                .map_err(|e| CmdError::runtime(e.to_string()))?;
        }
        "table" => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row.iter()) {
                    *w = (*w).max(cell.len());
                }
            }
            let print_row = |cells: &[&str]| {
                let line = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ");
                println!("{}", line.trim_end());
            };
            print_row(&header);
            for row in &rows {
                let cells: Vec<&str> = row.iter().map(|c| c.as_str()).collect();
                print_row(&cells);
            }
            println!("{} plugin(s)", rows.len());
        }
        other => {
            return Err(CmdError::validation(format!(
                "unknown format `{other}` (expected `table` or `csv`)"
            )));
        }
    }
    Ok(())
}

pub struct FilterResponseArgs<'a> {
    pub filter_type: &'a str,
    pub freq: f64,
    pub freq2: Option<f64>,
    pub order: usize,
    pub sample_rate: f64,
    pub points: usize,
    pub out: Option<&'a Path>,
}

/// Designs a Butterworth filter and emits its transfer-function
/// coefficients plus sampled magnitude response as CSV.
pub fn filter_response(args: &FilterResponseArgs) -> CmdResult {
    let filter_type = match args.filter_type {
        "lowpass" => FilterType::Lowpass,
        "highpass" => FilterType::Highpass,
        "bandpass" => FilterType::Bandpass,
        other => {
            return Err(CmdError::validation(format!(
                "unknown filter type `{other}` (expected lowpass, highpass or bandpass)"
            )));
        }
    };
    if filter_type == FilterType::Bandpass && args.freq2.is_none() {
        return Err(CmdError::validation(
            "bandpass filters need --freq2".to_string(),
        ));
    }
    if args.points == 0 {
        return Err(CmdError::validation("--points must be at least 1"));
    }
    let spec = ButterworthSpec {
        filter_type,
        f1: args.freq,
        f2: args.freq2,
        order: args.order,
        init: InitMode::SteadyState,
    };
    let filter = ButterworthFilter::design(&spec, args.sample_rate)
        .map_err(|e| CmdError::validation(e.to_string()))?;
    let (b, a) = filter.transfer_function();

    let mut text = String::from("kind,index,frequency,value\n");
    for (i, coef) in b.iter().enumerate() {
        let _ = writeln!(text, "b,{i},,{}", format_value(*coef));
    }
    for (i, coef) in a.iter().enumerate() {
        let _ = writeln!(text, "a,{i},,{}", format_value(*coef));
    }
    let nyquist = args.sample_rate / 2.0;
    for i in 0..=args.points {
        let f = nyquist * i as f64 / args.points as f64;
        let mag = filter.magnitude_at(f, args.sample_rate);
        let _ = writeln!(text, "magnitude,,{},{}", format_value(f), format_value(mag));
    }

    match args.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write `{}`", path.display()))
            .map_err(runtime)?,
        None => print!("{text}"),
    }
    Ok(())
}
