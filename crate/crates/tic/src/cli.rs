//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use tic_core::eval::{assign_leaf_labels, predict};
use tic_core::pruning::prune;
use tic_core::{AttributeKind, Cell, ClusteringTree, QualityMeasure};

use crate::config::{Emit, RunConfig};
use crate::error::{Result, TicError};
use crate::report;
use crate::run::{self, Prepared};
use crate::tabular::read_csv_with_schema;
use crate::treefile::{read_tree, tree_to_json};

#[derive(Parser, Debug)]
#[command(name = "tic", version, about = "Top-down induction of clustering trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow (and optionally prune) a tree on the whole dataset.
    Train(RunArgs),
    /// Sort examples into a saved tree and write its predictions.
    Predict(PredictArgs),
    /// Prune a saved tree against a validation table.
    Prune(PruneArgs),
    /// Cross-validate the configured learner.
    Xval(RunArgs),
    /// Run a named experiment: pruning_sweep, missing_info or multi_attribute.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Run configuration file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Data table (CSV, or a raw soybean file with --format).
    #[arg(long)]
    data: Option<PathBuf>,
    /// csv, soybean-small or soybean-large.
    #[arg(long)]
    format: Option<String>,
    /// Interpretations file (instead of --data).
    #[arg(long)]
    interpretations: Option<PathBuf>,
    /// Mapping sidecar lifting facts into attributes.
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Template file for literal tests.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Class attribute.
    #[arg(long)]
    class: Option<String>,
    /// supervised or unsupervised.
    #[arg(long)]
    mode: Option<String>,
    /// Distance, as in the config file: "dims=a,b weights=1,2 norm=zscore".
    #[arg(long)]
    distance: Option<String>,
    /// inter_distance or weighted_between_ss.
    #[arg(long)]
    split_score: Option<String>,
    /// Significance level of the F-test.
    #[arg(long)]
    f_alpha: Option<String>,
    /// Minimum examples in each child of a split
    #[arg(long)]
    min_leaf: Option<String>,
    /// Maximum depth, or "none".
    #[arg(long)]
    max_depth: Option<String>,
    /// Post-prune on a validation split: on or off.
    #[arg(long)]
    prune: Option<String>,
    /// Also prune when validation quality only ties.
    #[arg(long)]
    prune_ties: bool,
    /// Share of the learning set held out for pruning.
    #[arg(long)]
    validation_fraction: Option<String>,
    /// Seed for folds, validation splits and corruption
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads for folds.
    #[arg(long)]
    jobs: Option<String>,
    /// Number of folds; 0 means leave-one-out.
    #[arg(long)]
    k: Option<String>,
    /// Outputs to write: text, structured, or both comma-separated.
    #[arg(long)]
    emit: Option<String>,
    /// Output directory; without it the text report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Any config key as KEY=VALUE; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// pruning_sweep, missing_info or multi_attribute.
    name: String,
    /// Availability levels for missing_info, e.g. 1,0.5,0.25,0.1.
    #[arg(long)]
    levels: Option<String>,
    /// Validation fractions for pruning_sweep.
    #[arg(long)]
    fractions: Option<String>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Tree file written by `train`.
    #[arg(long)]
    tree: PathBuf,
    /// CSV table with the tree's attribute columns.
    #[arg(long)]
    data: PathBuf,
    /// Output directory for predictions.csv; stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PruneArgs {
    /// Tree file written by `train`.
    #[arg(long)]
    tree: PathBuf,
    /// Validation table (CSV) with the tree's columns.
    #[arg(long)]
    data: PathBuf,
    /// auto, accuracy or inverse_re.
    #[arg(long, default_value = "auto")]
    measure: String,
    /// Also prune when validation quality only ties.
    #[arg(long)]
    prune_ties: bool,
    /// Output directory for the pruned tree; stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        for kv in &self.set {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| TicError::usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags: [(&str, Option<String>); 19] = [
            ("data", path(&self.data)),
            ("format", self.format.clone()),
            ("interpretations", path(&self.interpretations)),
            ("mapping", path(&self.mapping)),
            ("templates", path(&self.templates)),
            ("class", self.class.clone()),
            ("mode", self.mode.clone()),
            ("distance", self.distance.clone()),
            ("split_score", self.split_score.clone()),
            ("f_alpha", self.f_alpha.clone()),
            ("min_leaf", self.min_leaf.clone()),
            ("max_depth", self.max_depth.clone()),
            ("prune", self.prune.clone()),
            ("prune_ties", self.prune_ties.then(|| "on".to_string())),
            ("validation_fraction", self.validation_fraction.clone()),
            ("seed", self.seed.clone()),
            ("jobs", self.jobs.clone()),
            ("k", self.k.clone()),
            ("emit", self.emit.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, &v)?;
            }
        }
        if self.data.is_some() && self.interpretations.is_none() {
            cfg.interpretations = None;
        }
        if self.interpretations.is_some() && self.data.is_none() {
            cfg.data = None;
        }
        Ok(cfg)
    }
}

/// Writes the outputs selected by `emit` as `<stem>.txt` / `<stem>.json`
/// under `out`, or prints them when there is no output directory.
fn emit(out: Option<&Path>, emit: Emit, stem: &str, text: &str, json: impl FnOnce() -> String) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| TicError::io(dir, e))?;
            if emit.text {
                let p = dir.join(format!("{stem}.txt"));
                fs::write(&p, text).map_err(|e| TicError::io(p, e))?;
            }
            if emit.structured {
                let p = dir.join(format!("{stem}.json"));
                fs::write(&p, json()).map_err(|e| TicError::io(p, e))?;
            }
        }
        None => {
            if emit.text {
                print!("{text}");
            }
            if emit.structured {
                print!("{}", json());
            }
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| TicError::io(dir, e))?;
    let p = dir.join(name);
    fs::write(&p, contents).map_err(|e| TicError::io(p, e))
}

fn cmd_train(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let prepared = run::prepare(&cfg)?;
    let trained = run::train(&prepared, cfg.mode, cfg.seed)?;
    let echo = cfg.echo();
    if let Some(dir) = &args.out {
        write_file(dir, "tree.json", &tree_to_json(&trained.tree))?;
    }
    eprintln!(
        "tic: {} nodes ({} before pruning), training RE {}",
        trained.tree.node_count(),
        trained.unpruned_nodes,
        trained.training.relative_error.map_or("-".into(), |r| format!("{r:.4}"))
    );
    let text = report::train_text(&trained, &echo);
    #[derive(serde::Serialize)]
    struct Summary<'a> {
        n_train: usize,
        n_valid: usize,
        unpruned_nodes: usize,
        nodes: usize,
        training: &'a tic_core::eval::TreeScores,
    }
    let summary = Summary {
        n_train: trained.n_train,
        n_valid: trained.n_valid,
        unpruned_nodes: trained.unpruned_nodes,
        nodes: trained.tree.node_count(),
        training: &trained.training,
    };
    emit(args.out.as_deref(), cfg.emit, "train", &text, || report::structured("train", &echo, &summary))
}

fn cmd_xval(args: &RunArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let p = run::prepare(&cfg)?;
    let r = run::crossvalidate(&p.ds, &p.ds, cfg.k, &p.eval, cfg.seed, cfg.mode, cfg.jobs)?;
    let echo = cfg.echo();
    emit(args.out.as_deref(), cfg.emit, "xval", &report::xval_text(&r, &echo), || report::structured("xval", &echo, &r))
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let mut cfg = args.run.resolve()?;
    if let Some(l) = &args.levels {
        cfg.set("levels", l)?;
    }
    if let Some(f) = &args.fractions {
        cfg.set("fractions", f)?;
    }
    let name = args.name.as_str();
    if !matches!(name, "pruning_sweep" | "missing_info" | "multi_attribute") {
        return Err(TicError::usage(format!(
            "unknown experiment `{name}` (expected pruning_sweep, missing_info or multi_attribute)"
        )));
    }
    let p: Prepared = run::prepare(&cfg)?;
    let echo = cfg.echo();
    let out = args.run.out.as_deref();
    match name {
        "pruning_sweep" => {
            let rows = run::pruning_sweep(&p, &cfg)?;
            emit(out, cfg.emit, name, &report::sweep_text(&rows, &echo), || report::structured(name, &echo, &rows))
        }
        "missing_info" => {
            let res = run::missing_info(&p, &cfg)?;
            emit(out, cfg.emit, name, &report::missing_info_text(&res, &echo), || report::structured(name, &echo, &res))
        }
        _ => {
            let r = run::crossvalidate(&p.ds, &p.ds, cfg.k, &p.eval, cfg.seed, cfg.mode, cfg.jobs)?;
            let text = report::multi_attribute_text(&r.attributes, &echo);
            emit(out, cfg.emit, name, &text, || report::structured(name, &echo, &r.attributes))
        }
    }
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let tree = read_tree(&args.tree)?;
    let ds = read_csv_with_schema(&args.data, tree.schema())?;
    let schema = tree.schema();
    let class = schema.class_index();
    let dims = tree.metric().dims().to_vec();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["example".to_string(), "leaf".to_string()];
    if let Some(c) = class {
        head.push(format!("predicted_{}", schema.attributes()[c].name));
    }
    head.extend(dims.iter().map(|&d| format!("prototype_{}", schema.attributes()[d].name)));
    let csv_err = |e: csv::Error| TicError::Internal(e.to_string());
    w.write_record(&head).map_err(csv_err)?;
    for e in ds.examples() {
        let (leaf, labels, proto) = predict(&tree, e);
        let mut row = vec![e.name().map_or_else(|| e.id().to_string(), str::to_string), leaf.to_string()];
        if let Some(c) = class {
            let a = &schema.attributes()[c];
            let cell = match (labels, &a.kind) {
                (Some(l), AttributeKind::Nominal(_)) => l.mode(c).map(Cell::Code),
                (Some(l), _) if a.is_categorical() => l.mode(c).map(|m| Cell::Number(m as f64)),
                (Some(l), _) => l.mean(c).map(Cell::Number),
                (None, _) => None,
            };
            row.push(cell.map_or_else(|| "?".to_string(), |c| a.display_value(c)));
        }
        row.extend(proto.coords().iter().map(|x| x.map_or_else(|| "?".to_string(), |v| v.to_string())));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| TicError::Internal(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|e| TicError::Internal(e.to_string()))?;
    match &args.out {
        Some(dir) => write_file(dir, "predictions.csv", &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_prune(args: &PruneArgs) -> Result<()> {
    let tree: ClusteringTree = read_tree(&args.tree)?;
    let ds = read_csv_with_schema(&args.data, tree.schema())?;
    let class = tree.schema().class_index();
    let labeled = tree.nodes().iter().all(|n| n.labels.is_some());
    let measure = match (args.measure.as_str(), class) {
        ("accuracy", Some(c)) => QualityMeasure::Accuracy { class_attr: c },
        ("accuracy", None) => return Err(TicError::usage("accuracy pruning needs a class attribute")),
        ("auto", Some(c)) if labeled => QualityMeasure::Accuracy { class_attr: c },
        ("auto" | "inverse_re", _) => QualityMeasure::InverseRelativeError,
        (other, _) => return Err(TicError::usage(format!("unknown pruning measure `{other}`"))),
    };
    let tree = if labeled || class.is_none() {
        tree
    } else {
        let ids: Vec<usize> = tree.root().cluster.clone();
        assign_leaf_labels(&tree, &ds, &ids).unwrap_or(tree)
    };
    let pruned = prune(&tree, &ds, &ds.ids(), measure, args.prune_ties)?;
    eprintln!("tic: {} -> {} nodes", tree.node_count(), pruned.node_count());
    match &args.out {
        Some(dir) => write_file(dir, "tree.json", &tree_to_json(&pruned)),
        None => {
            print!("{}", pruned.render());
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Xval(a) => cmd_xval(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Prune(a) => cmd_prune(a),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match std::panic::catch_unwind(|| dispatch(cli)) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("tic: {e}");
            e.exit_code()
        }
        Err(_) => 3,
    }
}
