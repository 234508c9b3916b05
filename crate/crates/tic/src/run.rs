//! From a [`RunConfig`] to trees and reports.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use tic_core::dataset::encode_nominals;
use tic_core::eval::{
    assign_leaf_labels, fold_assignment, missing_info_experiment_with, prune_quality, run_fold, score_tree,
    MissingInfoTable, PruneOptions, TreeScores,
};
use tic_core::induction::induce_tree;
use tic_core::pruning::{prune, split_learn_set, split_learn_set_stratified};
use tic_core::{AttributeKind, ClusteringTree, Dataset, DistanceSpec, EvalConfig, EvalMode, EvalReport, Role, Schema};

use crate::config::{DataFormat, DistanceLine, Encoding, RunConfig};
use crate::error::{Result, TicError};
use crate::interp::{read_interpretations, read_mapping};
use crate::tabular::{read_csv, CsvOptions};
use crate::templates::read_templates;
use crate::uci::{read_soybean, ClassColumn};

/// A loaded dataset with its configuration resolved against the schema.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub ds: Dataset,
    pub eval: EvalConfig,
    pub compare: Vec<(String, DistanceSpec)>,
}

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let ds = match (&cfg.data, &cfg.interpretations) {
        (Some(_), Some(_)) => return Err(TicError::usage("give either `data` or `interpretations`, not both")),
        (None, None) => return Err(TicError::usage("no data source: set `data` or `interpretations`")),
        (Some(path), None) => match cfg.format {
            DataFormat::Csv => {
                let opts = CsvOptions { class: cfg.class.clone(), key: cfg.key.clone(), ignore: cfg.ignore.clone() };
                return read_csv(path, &opts);
            }
            DataFormat::SoybeanSmall => read_soybean(path, ClassColumn::Last)?,
            DataFormat::SoybeanLarge => read_soybean(path, ClassColumn::First)?,
        },
        (None, Some(path)) => {
            let models = read_interpretations(path)?;
            let mapping = match &cfg.mapping {
                Some(m) => read_mapping(m)?,
                None => Default::default(),
            };
            mapping.lift(models).map_err(|e| TicError::data(path, e.to_string()))?
        }
    };
    let Some(class) = &cfg.class else { return Ok(ds) };
    let idx = ds
        .schema()
        .index_of(class)
        .ok_or_else(|| TicError::usage(format!("class attribute `{class}` not in the data")))?;
    let mut schema = ds.schema().clone();
    if let Some(old) = schema.class_index().filter(|&c| c != idx) {
        schema = schema.with_role(old, Role::Descriptive)?;
    }
    let schema = schema.with_role(idx, Role::Class)?;
    Ok(ds.with_schema(schema)?)
}

fn resolve(schema: &Schema, names: &[String], what: &str) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| schema.index_of(n).ok_or_else(|| TicError::usage(format!("{what} names unknown attribute `{n}`"))))
        .collect()
}

fn default_dims(schema: &Schema) -> Vec<usize> {
    let mut dims: Vec<usize> = schema
        .descriptive_indices()
        .into_iter()
        .filter(|&i| schema.attributes()[i].kind != AttributeKind::Ignored)
        .collect();
    dims.extend(schema.class_index());
    dims
}

fn resolve_distance(schema: &Schema, line: &DistanceLine) -> Result<DistanceSpec> {
    let dims = match &line.dims {
        Some(names) => resolve(schema, names, "distance")?,
        None => default_dims(schema),
    };
    if let Some(w) = line.weights.as_ref().filter(|w| w.len() != dims.len()) {
        return Err(TicError::usage(format!("{} distance weights for {} dimensions", w.len(), dims.len())));
    }
    Ok(DistanceSpec::new(dims, line.weights.clone(), line.norm)?)
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let raw = load_dataset(cfg)?;
    prepare_dataset(cfg, raw)
}

/// Resolves attribute names and encoding for an already loaded dataset.
pub fn prepare_dataset(cfg: &RunConfig, raw: Dataset) -> Result<Prepared> {
    let raw_spec = resolve_distance(raw.schema(), &cfg.distance)?;
    let mut all_dims = raw_spec.dims.clone();
    for (_, line) in &cfg.compare {
        all_dims.extend(resolve_distance(raw.schema(), line)?.dims);
    }
    let nominal_in_distance =
        all_dims.iter().any(|&d| matches!(raw.schema().attributes()[d].kind, AttributeKind::Nominal(_)));
    let encode = match cfg.encode {
        Encoding::On => true,
        Encoding::Off => false,
        Encoding::Auto => nominal_in_distance,
    };
    let ds = if encode { encode_nominals(&raw) } else { raw };
    let schema = ds.schema();
    let distance = resolve_distance(schema, &cfg.distance)?;
    let compare = cfg
        .compare
        .iter()
        .map(|(label, line)| Ok((label.clone(), resolve_distance(schema, line)?)))
        .collect::<Result<Vec<_>>>()?;
    let test_attributes = match &cfg.test_attributes {
        Some(names) => Some(resolve(schema, names, "test_attributes")?),
        None => None,
    };
    let templates = match &cfg.templates {
        Some(p) => read_templates(p)?,
        None => Default::default(),
    };
    let eval = EvalConfig {
        distance,
        split_score: cfg.split_score,
        f_alpha: cfg.f_alpha,
        min_leaf: cfg.min_leaf,
        max_depth: cfg.max_depth,
        max_literals: cfg.max_literals,
        templates,
        test_attributes,
        prune: cfg.prune.then_some(PruneOptions {
            validation_fraction: cfg.validation_fraction,
            allow_ties: cfg.prune_ties,
            stratified: cfg.stratified,
            measure: cfg.prune_measure,
        }),
        class_boundaries: cfg.class_boundaries.clone(),
    };
    Ok(Prepared { ds, eval, compare })
}

/// Runs `f(0..n)` on up to `jobs` threads; results come back in index
/// order whatever the scheduling.
pub fn run_indexed<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, n.max(1));
    if jobs == 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                slots.lock().expect("worker panicked")[i] = Some(out);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|x| x.expect("every index ran")).collect()
}

/// k-fold cross-validation with folds spread over `jobs` threads. `k = 0`
/// means leave-one-out.
pub fn crossvalidate(
    ds: &Dataset,
    truth: &Dataset,
    k: usize,
    config: &EvalConfig,
    seed: u64,
    mode: EvalMode,
    jobs: usize,
) -> Result<EvalReport> {
    let k = if k == 0 { ds.len() } else { k };
    if k < 2 || k > ds.len() {
        return Err(TicError::usage(format!("k = {k} is outside 2..={} (0 means leave-one-out)", ds.len())));
    }
    let fold_of = fold_assignment(truth, k, seed, mode == EvalMode::Supervised)?;
    let folds = run_indexed(k, jobs, |f| run_fold(ds, truth, config, mode, &fold_of, f, seed))
        .into_iter()
        .collect::<tic_core::Result<Vec<_>>>()?;
    Ok(EvalReport::aggregate(k, seed, mode, folds))
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub tree: ClusteringTree,
    pub n_train: usize,
    pub n_valid: usize,
    pub unpruned_nodes: usize,
    /// Scores on the training examples.
    pub training: TreeScores,
}

/// Grows (and, when configured, prunes) one tree on the whole dataset.
pub fn train(p: &Prepared, mode: EvalMode, seed: u64) -> Result<Trained> {
    let ds = &p.ds;
    let ids = ds.ids();
    let (train_ids, valid) = match &p.eval.prune {
        Some(o) => match ds.schema().class_index().filter(|_| o.stratified) {
            Some(c) => split_learn_set_stratified(ds, &ids, c, o.validation_fraction, seed)?,
            None => split_learn_set(&ids, o.validation_fraction, seed)?,
        },
        None => (ids, Vec::new()),
    };
    let metric = p.eval.distance_for(ds.schema(), mode)?.freeze(ds, &train_ids)?;
    let tree = induce_tree(ds, &train_ids, &p.eval.induce_config(metric, seed))?;
    let tree = assign_leaf_labels(&tree, ds, &train_ids)?;
    let unpruned_nodes = tree.node_count();
    let tree = match &p.eval.prune {
        Some(o) => prune(&tree, ds, &valid, prune_quality(ds.schema(), mode, o.measure), o.allow_ties)?,
        None => tree,
    };
    let training = score_tree(&tree, ds, ds, &train_ids, p.eval.class_boundaries.as_deref());
    Ok(Trained { tree, n_train: train_ids.len(), n_valid: valid.len(), unpruned_nodes, training })
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub validation_fraction: f64,
    pub report: EvalReport,
}

/// Cross-validates once per validation fraction, with pruning on.
pub fn pruning_sweep(p: &Prepared, cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    cfg.fractions
        .iter()
        .map(|&f| {
            let mut eval = p.eval.clone();
            let base = eval.prune.clone().unwrap_or(PruneOptions {
                validation_fraction: f,
                allow_ties: cfg.prune_ties,
                stratified: cfg.stratified,
                measure: cfg.prune_measure,
            });
            eval.prune = Some(PruneOptions { validation_fraction: f, ..base });
            let report = crossvalidate(&p.ds, &p.ds, cfg.k, &eval, cfg.seed, cfg.mode, cfg.jobs)?;
            Ok(SweepRow { validation_fraction: f, report })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MissingInfoResult {
    pub labels: Vec<String>,
    pub table: MissingInfoTable,
}

/// Missing-information grid over `cfg.levels` and the `compare` distances
/// (or the main distance alone when none are configured).
pub fn missing_info(p: &Prepared, cfg: &RunConfig) -> Result<MissingInfoResult> {
    let (labels, specs): (Vec<String>, Vec<DistanceSpec>) = if p.compare.is_empty() {
        (vec!["distance".to_string()], vec![p.eval.distance.clone()])
    } else {
        p.compare.iter().cloned().unzip()
    };
    let mut failure: Option<TicError> = None;
    let table =
        missing_info_experiment_with(&p.ds, &cfg.levels, &specs, &p.eval, cfg.seed, cfg.exempt_class, |c, t, e| {
            crossvalidate(c, t, cfg.k, e, cfg.seed, EvalMode::Supervised, cfg.jobs).map_err(|err| {
                let core = match &err {
                    TicError::Core(c) => c.clone(),
                    other => tic_core::Error::InvalidArgument(other.to_string()),
                };
                failure = Some(err);
                core
            })
        });
    match (table, failure) {
        (Ok(table), _) => Ok(MissingInfoResult { labels, table }),
        (Err(_), Some(err)) => Err(err),
        (Err(e), None) => Err(e.into()),
    }
}
