//! Project manifests: dataset layout on disk plus persisted fitted models.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use tsforge_core::models::FittedModel;
use tsforge_core::{Dataset, ModelStore, SampleGrid, Segment};

use crate::csvio;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub k_count: usize,
    pub sample_rate: f64,
}

/// Where a channel's values live. The short form is just a path; the
/// detailed form can skip a header row of sample indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSource {
    Path(PathBuf),
    Detailed {
        path: PathBuf,
        #[serde(default)]
        header: bool,
    },
}

impl ChannelSource {
    pub fn path(&self) -> &Path {
        match self {
            ChannelSource::Path(p) => p,
            ChannelSource::Detailed { path, .. } => path,
        }
    }

    pub fn header(&self) -> bool {
        match self {
            ChannelSource::Path(_) => false,
            ChannelSource::Detailed { header, .. } => *header,
        }
    }

    fn resolved(&self, base: &Path) -> ChannelSource {
        let resolved = base.join(self.path());
        match self {
            ChannelSource::Path(_) => ChannelSource::Path(resolved),
            ChannelSource::Detailed { header, .. } => ChannelSource::Detailed {
                path: resolved,
                header: *header,
            },
        }
    }
}

/// On-disk project description: sampling grid, channel CSV files, optional
/// feature table, segment windows and fitted-model blobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectManifest {
    pub format_version: u32,
    pub grid: GridSpec,
    #[serde(default)]
    pub channels: BTreeMap<String, ChannelSource>,
    #[serde(default)]
    pub features: Option<PathBuf>,
    /// Segment name -> one inclusive 1-based `[start, end]` pair per record.
    #[serde(default)]
    pub segments: BTreeMap<String, Vec<[usize; 2]>>,
    /// Fitted models keyed by the output base name of the step that made
    /// them; preloaded into the model store so reruns skip refitting.
    #[serde(default)]
    pub models: BTreeMap<String, FittedModel>,
}

/// A manifest loaded from disk with every referenced file ingested.
#[derive(Debug)]
pub struct LoadedProject {
    pub dataset: Dataset,
    pub store: ModelStore,
    /// The manifest with all paths resolved relative to its own location.
    pub manifest: ProjectManifest,
    /// Channels that came from the manifest (as opposed to pipeline
    /// outputs).
    pub input_channels: BTreeSet<String>,
}

pub fn load_project(manifest_path: &Path) -> Result<LoadedProject> {
    let text = fs::read_to_string(manifest_path)
        .with_context(|| format!("cannot read `{}`", manifest_path.display()))?;
    let mut manifest: ProjectManifest = toml::from_str(&text)
        .with_context(|| format!("cannot parse `{}`", manifest_path.display()))?;
    if manifest.format_version != FORMAT_VERSION {
        bail!(
            "`{}`: format_version {} is not supported (expected {FORMAT_VERSION})",
            manifest_path.display(),
            manifest.format_version
        );
    }
    if manifest.channels.is_empty() {
        bail!("`{}` defines no channels", manifest_path.display());
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    for source in manifest.channels.values_mut() {
        *source = source.resolved(base);
    }
    if let Some(f) = manifest.features.take() {
        manifest.features = Some(base.join(f));
    }

    let grid = SampleGrid::new(manifest.grid.k_count, manifest.grid.sample_rate)
        .context("invalid sampling grid")?;
    let k = manifest.grid.k_count;

    // Ingest channels in name order; the first file fixes the record count.
    let mut matrices: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    let mut n_records = None;
    for (name, source) in &manifest.channels {
        let rows = csvio::read_matrix(source.path(), k, source.header())?;
        match n_records {
            None => n_records = Some(rows.len()),
            Some(n) if n != rows.len() => bail!(
                "channel `{name}` (`{}`): expected {n} records, found {}",
                source.path().display(),
                rows.len()
            ),
            Some(_) => {}
        }
        matrices.push((name.clone(), rows));
    }
    let n_records = n_records.expect("at least one channel");

    let mut dataset = Dataset::new(grid, n_records).context("invalid dataset shape")?;
    for (name, rows) in &matrices {
        dataset
            .add_channel_rows(name.clone(), rows)
            .with_context(|| format!("channel `{name}`"))?;
    }

    for (name, ranges) in &manifest.segments {
        if ranges.len() != n_records {
            bail!(
                "segment `{name}`: expected {n_records} windows, found {}",
                ranges.len()
            );
        }
        let pairs: Vec<(usize, usize)> = ranges.iter().map(|[s, e]| (*s, *e)).collect();
        let segment = Segment::new(pairs, k).with_context(|| format!("segment `{name}`"))?;
        dataset
            .add_segment(name.clone(), segment)
            .with_context(|| format!("segment `{name}`"))?;
    }

    if let Some(feature_path) = &manifest.features {
        let (names, columns) = csvio::read_feature_table(feature_path)?;
        for (name, column) in names.into_iter().zip(columns) {
            if column.len() != n_records {
                bail!(
                    "feature `{name}` (`{}`): expected {n_records} rows, found {}",
                    feature_path.display(),
                    column.len()
                );
            }
            dataset
                .add_feature(name.clone(), column)
                .with_context(|| format!("feature `{name}`"))?;
        }
    }

    let mut store = ModelStore::new();
    for (key, model) in &manifest.models {
        store.insert(key.clone(), model.clone());
    }

    let input_channels = manifest.channels.keys().cloned().collect();
    Ok(LoadedProject {
        dataset,
        store,
        manifest,
        input_channels,
    })
}

/// Turns an output name into a distinct, filesystem-safe CSV file name.
fn channel_file_name(name: &str, taken: &mut BTreeSet<String>) -> String {
    let mut stem: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if stem.is_empty() {
        stem.push('c');
    }
    let mut candidate = format!("{stem}.csv");
    let mut suffix = 2;
    while !taken.insert(candidate.clone()) {
        candidate = format!("{stem}_{suffix}.csv");
        suffix += 1;
    }
    candidate
}

/// What a run left on disk.
pub struct SavedOutputs {
    pub feature_file: PathBuf,
    pub channel_files: Vec<(String, PathBuf)>,
    pub manifest_file: PathBuf,
}

/// Writes the run results: `features.csv` with every feature column, one
/// headerless CSV per generated channel, and a resolved manifest embedding
/// the fitted models so the run can be re-applied without refitting.
pub fn save_outputs(
    project: &LoadedProject,
    result: &Dataset,
    store: &ModelStore,
    out_dir: &Path,
) -> Result<SavedOutputs> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create `{}`", out_dir.display()))?;

    let feature_file = out_dir.join("features.csv");
    let names: Vec<String> = result.features().iter().map(|f| f.name().to_string()).collect();
    let columns: Vec<&[f64]> = result.features().iter().map(|f| f.values()).collect();
    csvio::write_feature_table(&feature_file, &names, &columns, result.n_records())?;

    let mut taken = BTreeSet::new();
    taken.insert("features.csv".to_string());
    taken.insert("manifest.toml".to_string());
    let mut channel_files = Vec::new();
    let mut resolved = project.manifest.clone();
    for channel in result.channels() {
        if project.input_channels.contains(channel.name()) {
            continue;
        }
        let file_name = channel_file_name(channel.name(), &mut taken);
        let path = out_dir.join(&file_name);
        csvio::write_matrix(&path, (0..result.n_records()).map(|r| channel.row(r)))?;
        resolved.channels.insert(
            channel.name().to_string(),
            ChannelSource::Path(PathBuf::from(file_name)),
        );
        channel_files.push((channel.name().to_string(), path));
    }

    resolved.features = Some(PathBuf::from("features.csv"));
    resolved.models = store
        .iter()
        .map(|(k, m)| (k.clone(), m.clone()))
        .collect();
    let manifest_file = out_dir.join("manifest.toml");
    let text = toml::to_string_pretty(&resolved).context("serializing resolved manifest")?;
    fs::write(&manifest_file, text)
        .with_context(|| format!("cannot write `{}`", manifest_file.display()))?;

    Ok(SavedOutputs {
        feature_file,
        channel_files,
        manifest_file,
    })
}
