//! Reading inputs, resolving defaults and writing outputs atomically.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{usage, CliError, DiagramArgs};
use crate::error::TdaError;
use crate::metric::{CsvOptions, PointCloud};
use crate::persistence::PersistenceDiagram;

pub const DIAGRAM_SUFFIX: &str = ".diagram.csv";
pub const BARCODE_SUFFIX: &str = ".barcode.csv";
pub const LANDSCAPE_SUFFIX: &str = ".landscape.json";
const CONFIG_SUFFIX: &str = ".run_config.json";

/// Configuration of one command with every default resolved. Fields a
/// command does not use are `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub metric: Option<String>,
    pub max_dimension: Option<usize>,
    pub max_scale: Option<f64>,
    pub cap: Option<f64>,
    pub homology_dimensions: Vec<usize>,
    pub method: Option<String>,
    pub p: Option<String>,
    pub alpha: Option<f64>,
    pub permutations: Option<String>,
    pub bootstrap_rounds: Option<usize>,
    pub seed: Option<u64>,
    pub grid_resolution: Option<usize>,
    pub output_dir: String,
}

impl RunConfig {
    pub fn new(command: &str, inputs: &[PathBuf], out: &Path) -> Self {
        Self {
            command: command.to_string(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            output_dir: out.display().to_string(),
            ..Self::default()
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}{CONFIG_SUFFIX}", self.command)
    }
}

/// Files produced by a command, written only once everything succeeded.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    /// Queues `contents` under `name` and returns the eventual path.
    pub fn add(&mut self, name: String, contents: String) -> PathBuf {
        let path = self.dir.join(&name);
        self.files.push((name, contents));
        path
    }

    /// Writes every queued file and the config echo.
    pub fn commit(mut self, config: &RunConfig) -> Result<(), CliError> {
        let echo = serde_json::to_string_pretty(config).map_err(TdaError::from)? + "\n";
        self.files.push((config.file_name(), echo));
        fs::create_dir_all(&self.dir)?;
        for (name, contents) in &self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
            tmp.write_all(contents.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        }
        Ok(())
    }
}

/// Attaches the offending path to a data error.
pub fn in_file(path: &Path, e: TdaError) -> CliError {
    CliError::InFile {
        path: path.display().to_string(),
        source: e,
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| in_file(path, TdaError::Io(e)))
}

pub fn read_cloud(path: &Path, options: &CsvOptions) -> Result<PointCloud, CliError> {
    let file = fs::File::open(path).map_err(|e| in_file(path, TdaError::Io(e)))?;
    PointCloud::read_csv(BufReader::new(file), options).map_err(|e| in_file(path, e))
}

/// File name with a known summary suffix (or the extension) removed.
pub fn stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    for suffix in [DIAGRAM_SUFFIX, BARCODE_SUFFIX, LANDSCAPE_SUFFIX] {
        if let Some(s) = name.strip_suffix(suffix) {
            return s.to_string();
        }
    }
    match name.rsplit_once('.') {
        Some((s, _)) if !s.is_empty() => s.to_string(),
        _ => name,
    }
}

fn sibling_persist_config(path: &Path) -> Option<RunConfig> {
    let dir = path.parent()?;
    let text = fs::read_to_string(dir.join(format!("persist{CONFIG_SUFFIX}"))).ok()?;
    serde_json::from_str(&text).ok()
}

/// Loads a diagram CSV. The cap is `--cap`, else the `max_scale` recorded
/// by `persist` in the same directory, else the largest finite value in
/// the file (1 if there is none). The diagram covers the dimensions in the
/// file plus those the recorded run computed, or those named by `--dim`.
pub fn load_diagram(path: &Path, args: &DiagramArgs) -> Result<PersistenceDiagram, CliError> {
    let text = read_text(path)?;
    let config = sibling_persist_config(path);
    let provisional = PersistenceDiagram::from_csv(&text, 1.0).map_err(|e| in_file(path, e))?;
    let cap = match (args.cap, config.as_ref().and_then(|c| c.max_scale)) {
        (Some(cap), _) => cap,
        (None, Some(recorded)) => recorded,
        (None, None) => {
            let largest = provisional
                .pairs()
                .iter()
                .flat_map(|p| [p.birth, p.death])
                .filter(|v| v.is_finite())
                .fold(0.0, f64::max);
            if largest > 0.0 {
                largest
            } else {
                1.0
            }
        }
    };
    let mut diagram = provisional
        .with_max_scale(cap)
        .map_err(|e| in_file(path, e))?;
    let extra: Vec<usize> = match config.and_then(|c| c.max_dimension) {
        Some(top) => (0..=top).collect(),
        None => args.dims.clone(),
    };
    for h in extra {
        diagram = diagram.with_dimension(h);
    }
    Ok(diagram)
}

/// Requested dimensions, or those covered by every diagram.
pub fn resolve_dims(
    requested: &[usize],
    diagrams: &[&PersistenceDiagram],
) -> Result<Vec<usize>, CliError> {
    if !requested.is_empty() {
        let set: BTreeSet<usize> = requested.iter().copied().collect();
        return Ok(set.into_iter().collect());
    }
    let mut common: Option<BTreeSet<usize>> = None;
    for d in diagrams {
        common = Some(match common {
            None => d.dimensions().clone(),
            Some(c) => c.intersection(d.dimensions()).copied().collect(),
        });
    }
    let dims: Vec<usize> = common.unwrap_or_default().into_iter().collect();
    if dims.is_empty() {
        return Err(usage(
            "no homology dimension is covered by every input; pass --dim",
        ));
    }
    Ok(dims)
}

/// Summary files of one group directory, sorted by file name.
pub struct GroupFiles {
    pub diagrams: Vec<PathBuf>,
    pub landscapes: Vec<PathBuf>,
}

pub fn list_group(dir: &Path) -> Result<GroupFiles, CliError> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| in_file(dir, TdaError::Io(e)))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    names.sort();
    let has = |p: &PathBuf, suffix: &str| p.to_string_lossy().ends_with(suffix);
    Ok(GroupFiles {
        diagrams: names
            .iter()
            .filter(|p| has(p, DIAGRAM_SUFFIX))
            .cloned()
            .collect(),
        landscapes: names
            .iter()
            .filter(|p| has(p, LANDSCAPE_SUFFIX))
            .cloned()
            .collect(),
    })
}

/// Shortest round-trip formatting, `inf` for infinity.
pub fn format_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}
