//! Run configuration: a flat `key = value` file plus command-line
//! overrides.
//!
//! ```text
//! # iris, unsupervised
//! data = iris.csv
//! class = class
//! mode = unsupervised
//! distance dims=sepal_length,sepal_width,petal_length,petal_width norm=none
//! prune = on
//! validation_fraction = 0.25
//! seed = 7
//! ```
//!
//! `distance` lines have their own syntax: `distance dims=<names>
//! weights=<reals> norm=<none|minmax|zscore>`, every part optional.
//! `compare <label> dims=...` lines, same syntax, name the distances
//! compared by the missing-information experiment. Relative paths are
//! resolved against the directory of the file that mentions them.

use std::fs;
use std::path::{Path, PathBuf};

use tic_core::eval::PruneMeasure;
use tic_core::{EvalMode, Normalization, SplitScore};

use crate::error::{Result, TicError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    SoybeanSmall,
    SoybeanLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// Encode nominal attributes when one of them enters the distance.
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DistanceLine {
    pub dims: Option<Vec<String>>,
    pub weights: Option<Vec<f64>>,
    pub norm: Normalization,
}

impl DistanceLine {
    pub fn parse(spec: &str) -> std::result::Result<Self, String> {
        let mut line = DistanceLine::default();
        for part in spec.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, found `{part}`"))?;
            match k {
                "dims" => line.dims = Some(split_list(v).map(str::to_string).collect()),
                "weights" => line.weights = Some(parse_reals(v)?),
                "norm" => {
                    line.norm = match v {
                        "none" => Normalization::None,
                        "minmax" => Normalization::MinMax,
                        "zscore" => Normalization::ZScore,
                        other => return Err(format!("unknown normalization `{other}`")),
                    }
                }
                other => return Err(format!("unknown distance field `{other}`")),
            }
        }
        if let (Some(d), Some(w)) = (&line.dims, &line.weights) {
            if d.len() != w.len() {
                return Err(format!("{} weights for {} dims", w.len(), d.len()));
            }
        }
        Ok(line)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(d) = &self.dims {
            out.push_str(&format!("dims={} ", d.join(",")));
        }
        if let Some(w) = &self.weights {
            out.push_str(&format!("weights={} ", w.iter().map(f64::to_string).collect::<Vec<_>>().join(",")));
        }
        let norm = match self.norm {
            Normalization::None => "none",
            Normalization::MinMax => "minmax",
            Normalization::ZScore => "zscore",
        };
        out.push_str("norm=");
        out.push_str(norm);
        out
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_reals(v: &str) -> std::result::Result<Vec<f64>, String> {
    split_list(v)
        .map(|s| s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("`{s}` is not a number")))
        .collect()
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected on or off, found `{other}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emit {
    pub text: bool,
    pub structured: bool,
}

impl Emit {
    pub fn parse(v: &str) -> std::result::Result<Self, String> {
        let mut e = Emit { text: false, structured: false };
        for part in split_list(v) {
            match part {
                "text" => e.text = true,
                "structured" | "json" => e.structured = true,
                other => return Err(format!("unknown output kind `{other}`")),
            }
        }
        if !(e.text || e.structured) {
            return Err("nothing to emit".into());
        }
        Ok(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub format: DataFormat,
    pub interpretations: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub class: Option<String>,
    pub key: Option<String>,
    pub ignore: Vec<String>,
    pub encode: Encoding,
    pub distance: DistanceLine,
    pub compare: Vec<(String, DistanceLine)>,
    pub mode: EvalMode,
    pub split_score: SplitScore,
    pub f_alpha: f64,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub max_literals: usize,
    pub test_attributes: Option<Vec<String>>,
    pub prune: bool,
    pub validation_fraction: f64,
    pub prune_ties: bool,
    pub prune_measure: PruneMeasure,
    pub stratified: bool,
    pub class_boundaries: Option<Vec<f64>>,
    pub seed: u64,
    pub k: usize,
    pub jobs: usize,
    pub levels: Vec<f64>,
    pub fractions: Vec<f64>,
    pub exempt_class: bool,
    pub emit: Emit,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            format: DataFormat::Csv,
            interpretations: None,
            mapping: None,
            templates: None,
            class: None,
            key: None,
            ignore: Vec::new(),
            encode: Encoding::Auto,
            distance: DistanceLine::default(),
            compare: Vec::new(),
            mode: EvalMode::Unsupervised,
            split_score: SplitScore::InterDistance,
            f_alpha: 0.01,
            min_leaf: 2,
            max_depth: None,
            max_literals: 2,
            test_attributes: None,
            prune: true,
            validation_fraction: 0.25,
            prune_ties: false,
            prune_measure: PruneMeasure::Auto,
            stratified: false,
            class_boundaries: None,
            seed: 0,
            k: 10,
            jobs: 1,
            levels: vec![1.0, 0.5, 0.25, 0.1],
            fractions: vec![0.15, 0.25, 0.35],
            exempt_class: false,
            emit: Emit { text: true, structured: false },
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| TicError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        let base = origin.parent().unwrap_or(Path::new(""));
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| TicError::Config { path: origin.to_path_buf(), line: i + 1, message };
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            if head == "distance" && !rest.trim_start().starts_with('=') {
                self.distance = DistanceLine::parse(rest).map_err(err)?;
            } else if head == "compare" {
                let rest = rest.trim();
                let (label, spec) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                if label.is_empty() {
                    return Err(err("compare needs a label".into()));
                }
                let spec = DistanceLine::parse(spec).map_err(err)?;
                self.compare.push((label.to_string(), spec));
            } else {
                let (k, v) =
                    line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
                self.set_relative(k.trim(), v.trim(), base).map_err(err)?;
            }
        }
        Ok(())
    }

    /// Applies one `key=value` override given on the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_relative(key, value, Path::new("")).map_err(|m| TicError::usage(format!("{key}: {m}")))
    }

    fn set_relative(&mut self, key: &str, v: &str, base: &Path) -> std::result::Result<(), String> {
        let path = |v: &str| base.join(v);
        let opt_list = |v: &str| {
            let items: Vec<String> = split_list(v).map(str::to_string).collect();
            (!items.is_empty()).then_some(items)
        };
        let num = |v: &str| v.parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
        let int = |v: &str| v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer"));
        match key {
            "data" => self.data = Some(path(v)),
            "format" => {
                self.format = match v {
                    "csv" => DataFormat::Csv,
                    "soybean-small" => DataFormat::SoybeanSmall,
                    "soybean-large" => DataFormat::SoybeanLarge,
                    other => return Err(format!("unknown data format `{other}`")),
                }
            }
            "interpretations" => self.interpretations = Some(path(v)),
            "mapping" => self.mapping = Some(path(v)),
            "templates" => self.templates = Some(path(v)),
            "class" => self.class = (!v.is_empty()).then(|| v.to_string()),
            "key" => self.key = (!v.is_empty()).then(|| v.to_string()),
            "ignore" => self.ignore = opt_list(v).unwrap_or_default(),
            "encode" => {
                self.encode = match v {
                    "auto" => Encoding::Auto,
                    "on" => Encoding::On,
                    "off" => Encoding::Off,
                    other => return Err(format!("expected auto, on or off, found `{other}`")),
                }
            }
            "distance" => self.distance = DistanceLine::parse(v)?,
            "mode" => {
                self.mode = match v {
                    "supervised" => EvalMode::Supervised,
                    "unsupervised" => EvalMode::Unsupervised,
                    other => return Err(format!("unknown mode `{other}`")),
                }
            }
            "split_score" => {
                self.split_score = match v {
                    "inter_distance" => SplitScore::InterDistance,
                    "weighted_between_ss" => SplitScore::WeightedBetweenSs,
                    other => return Err(format!("unknown split score `{other}`")),
                }
            }
            "f_alpha" => {
                let a = num(v)?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(format!("f_alpha {a} outside (0, 1]"));
                }
                self.f_alpha = a;
            }
            "min_leaf" => {
                self.min_leaf = int(v)?;
                if self.min_leaf == 0 {
                    return Err("min_leaf must be at least 1".into());
                }
            }
            "max_depth" => self.max_depth = if v == "none" { None } else { Some(int(v)?) },
            "max_literals" => self.max_literals = int(v)?,
            "test_attributes" => {
                self.test_attributes = match v {
                    "all" => None,
                    "none" => Some(Vec::new()),
                    _ => opt_list(v),
                }
            }
            "prune" => self.prune = parse_bool(v)?,
            "validation_fraction" => {
                let f = num(v)?;
                if !(f > 0.0 && f < 1.0) {
                    return Err(format!("validation fraction {f} outside (0, 1)"));
                }
                self.validation_fraction = f;
            }
            "prune_ties" => self.prune_ties = parse_bool(v)?,
            "prune_measure" => {
                self.prune_measure = match v {
                    "auto" => PruneMeasure::Auto,
                    "accuracy" => PruneMeasure::Accuracy,
                    "inverse_re" => PruneMeasure::InverseRelativeError,
                    other => return Err(format!("unknown pruning measure `{other}`")),
                }
            }
            "stratified" => self.stratified = parse_bool(v)?,
            "class_boundaries" => self.class_boundaries = if v == "none" { None } else { Some(parse_reals(v)?) },
            "seed" => self.seed = v.parse().map_err(|_| format!("`{v}` is not a valid seed"))?,
            "k" => self.k = int(v)?,
            "jobs" => {
                self.jobs = int(v)?;
                if self.jobs == 0 {
                    return Err("jobs must be at least 1".into());
                }
            }
            "levels" => {
                let l = parse_reals(v)?;
                if l.is_empty() || l.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err("levels must be probabilities in [0, 1]".into());
                }
                self.levels = l;
            }
            "fractions" => {
                let f = parse_reals(v)?;
                if f.is_empty() || f.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                    return Err("fractions must lie in (0, 1)".into());
                }
                self.fractions = f;
            }
            "exempt_class" => self.exempt_class = parse_bool(v)?,
            "emit" => self.emit = Emit::parse(v)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Resolved settings as `(key, value)` pairs in a fixed order, for
    /// report headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let p = |x: &Option<PathBuf>| x.as_ref().map_or("none".to_string(), |p| p.display().to_string());
        let o = |x: &Option<String>| x.clone().unwrap_or_else(|| "none".into());
        let list = |x: &[f64]| x.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let onoff = |b: bool| if b { "on" } else { "off" }.to_string();
        let mut out = vec![
            ("data".into(), p(&self.data)),
            (
                "format".into(),
                match self.format {
                    DataFormat::Csv => "csv",
                    DataFormat::SoybeanSmall => "soybean-small",
                    DataFormat::SoybeanLarge => "soybean-large",
                }
                .into(),
            ),
            ("interpretations".into(), p(&self.interpretations)),
            ("mapping".into(), p(&self.mapping)),
            ("templates".into(), p(&self.templates)),
            ("class".into(), o(&self.class)),
            ("key".into(), o(&self.key)),
            ("ignore".into(), self.ignore.join(",")),
            (
                "encode".into(),
                match self.encode {
                    Encoding::Auto => "auto",
                    Encoding::On => "on",
                    Encoding::Off => "off",
                }
                .into(),
            ),
            ("distance".into(), self.distance.render()),
        ];
        for (label, d) in &self.compare {
            out.push((format!("compare {label}"), d.render()));
        }
        out.extend([
            (
                "mode".into(),
                match self.mode {
                    EvalMode::Supervised => "supervised",
                    EvalMode::Unsupervised => "unsupervised",
                }
                .into(),
            ),
            (
                "split_score".into(),
                match self.split_score {
                    SplitScore::InterDistance => "inter_distance",
                    SplitScore::WeightedBetweenSs => "weighted_between_ss",
                }
                .into(),
            ),
            ("f_alpha".into(), self.f_alpha.to_string()),
            ("min_leaf".into(), self.min_leaf.to_string()),
            ("max_depth".into(), self.max_depth.map_or("none".into(), |d| d.to_string())),
            ("max_literals".into(), self.max_literals.to_string()),
            (
                "test_attributes".into(),
                match &self.test_attributes {
                    None => "all".into(),
                    Some(t) if t.is_empty() => "none".into(),
                    Some(t) => t.join(","),
                },
            ),
            ("prune".into(), onoff(self.prune)),
            ("validation_fraction".into(), self.validation_fraction.to_string()),
            ("prune_ties".into(), onoff(self.prune_ties)),
            (
                "prune_measure".into(),
                match self.prune_measure {
                    PruneMeasure::Auto => "auto",
                    PruneMeasure::Accuracy => "accuracy",
                    PruneMeasure::InverseRelativeError => "inverse_re",
                }
                .into(),
            ),
            ("stratified".into(), onoff(self.stratified)),
            ("class_boundaries".into(), self.class_boundaries.as_deref().map_or("none".into(), list)),
            ("seed".into(), self.seed.to_string()),
            ("k".into(), self.k.to_string()),
            ("levels".into(), list(&self.levels)),
            ("fractions".into(), list(&self.fractions)),
            ("exempt_class".into(), onoff(self.exempt_class)),
        ]);
        out
    }
}
