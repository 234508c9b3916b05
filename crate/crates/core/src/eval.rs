//! Turning clustering trees into predictors and measuring them: leaf
//! labeling, prediction, cross-validation, per-attribute accuracy and the
//! missing-information experiment.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Cell, Dataset, Example, Schema};
use crate::error::{Error, Result};
use crate::induction::{induce_tree, ClusteringTree, InduceConfig, NodeId, SplitScore};
use crate::logic::TemplateSet;
use crate::metrics::{relative_error, DistanceSpec, Prototype};
use crate::pruning::{prune, split_learn_set, split_learn_set_stratified, QualityMeasure};

/// Category index of a cell: nominal codes, or integral non-negative numbers
/// of encoded attributes.
pub fn category(cell: Cell) -> Option<u32> {
    match cell {
        Cell::Code(c) => Some(c),
        Cell::Number(x) if x >= 0.0 && libm::trunc(x) == x && x < u32::MAX as f64 => Some(x as u32),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AttributeLabel {
    /// Most frequent category; ties go to the lowest code.
    Mode {
        code: u32,
        support: usize,
    },
    Mean {
        value: f64,
        support: usize,
    },
    /// No labeled example anywhere on the path from the root.
    Unknown,
}

/// Per-attribute predictions attached to a node.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LeafLabels {
    pub attributes: Vec<AttributeLabel>,
    /// Index of the class attribute, when the schema has one.
    pub class_attr: Option<usize>,
    /// Attributes whose label was inherited from an ancestor because no
    /// labeled example reached this node.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub inherited: Vec<usize>,
}

impl LeafLabels {
    pub fn mode(&self, attr: usize) -> Option<u32> {
        match self.attributes.get(attr)? {
            AttributeLabel::Mode { code, .. } => Some(*code),
            _ => None,
        }
    }

    pub fn mean(&self, attr: usize) -> Option<f64> {
        match self.attributes.get(attr)? {
            AttributeLabel::Mean { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn majority_class(&self) -> Option<u32> {
        self.mode(self.class_attr?)
    }

    pub fn majority_class_label(&self, schema: &Schema) -> Option<String> {
        let c = self.class_attr?;
        let code = self.mode(c)?;
        let a = schema.get(c)?;
        Some(if a.is_numeric() {
            a.display_value(Cell::Number(code as f64))
        } else {
            a.display_value(Cell::Code(code))
        })
    }
}

fn label_attribute(ds: &Dataset, attr: usize, ids: impl Iterator<Item = usize>) -> AttributeLabel {
    let a = &ds.schema().attributes()[attr];
    if a.is_categorical() {
        let mut counts = vec![0usize; a.category_count().unwrap_or(0)];
        for i in ids {
            if let Some(c) = category(ds.value(i, attr)) {
                let c = c as usize;
                if c >= counts.len() {
                    counts.resize(c + 1, 0);
                }
                counts[c] += 1;
            }
        }
        let support: usize = counts.iter().sum();
        if support == 0 {
            return AttributeLabel::Unknown;
        }
        // first maximal code wins ties
        let (code, _) = counts.iter().enumerate().fold((0, 0), |best, (c, &n)| if n > best.1 { (c, n) } else { best });
        AttributeLabel::Mode { code: code as u32, support }
    } else if a.is_numeric() {
        let (sum, support) =
            ids.filter_map(|i| ds.value(i, attr).as_f64()).fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        if support == 0 {
            AttributeLabel::Unknown
        } else {
            AttributeLabel::Mean { value: sum / support as f64, support }
        }
    } else {
        AttributeLabel::Unknown
    }
}

/// Labels every node of the tree from the labeled examples in its cluster.
/// Attributes for which no labeled example reaches a node take the label of
/// the nearest ancestor that has one.
pub fn assign_leaf_labels(tree: &ClusteringTree, ds: &Dataset, labeled_ids: &[usize]) -> Result<ClusteringTree> {
    if labeled_ids.is_empty() {
        return Err(Error::NoLabeledExamples);
    }
    let mut labeled = vec![false; ds.len()];
    for &i in labeled_ids {
        if i < ds.len() {
            labeled[i] = true;
        }
    }
    let width = ds.schema().len();
    let class_attr = ds.schema().class_index();
    let mut out = tree.clone();
    let mut parent: Vec<Option<NodeId>> = vec![None; tree.node_count()];
    for (id, node) in tree.nodes().iter().enumerate() {
        for child in [node.yes, node.no].into_iter().flatten() {
            parent[child] = Some(id);
        }
    }
    // preorder: a parent is always labeled before its children
    for (id, &up) in parent.iter().enumerate() {
        let cluster = &tree.node(id).cluster;
        let mut attributes = Vec::with_capacity(width);
        let mut inherited = Vec::new();
        for attr in 0..width {
            let own = label_attribute(ds, attr, cluster.iter().copied().filter(|&i| labeled[i]));
            let label = match (own, up) {
                (AttributeLabel::Unknown, Some(p)) => {
                    let from = out.nodes()[p].labels.as_ref().map_or(AttributeLabel::Unknown, |l| l.attributes[attr]);
                    if from != AttributeLabel::Unknown {
                        inherited.push(attr);
                    }
                    from
                }
                (own, _) => own,
            };
            attributes.push(label);
        }
        out.nodes_mut()[id].labels = Some(LeafLabels { attributes, class_attr, inherited });
    }
    Ok(out)
}

/// Sorts `e` into the tree and returns the reached leaf with its labels and
/// prototype.
pub fn predict<'t>(tree: &'t ClusteringTree, e: &Example) -> (NodeId, Option<&'t LeafLabels>, &'t Prototype) {
    let id = tree.sort(e);
    let node = tree.node(id);
    (id, node.labels.as_ref(), &node.prototype)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EvalMode {
    /// Distance dimensions used as given; folds stratified by class.
    Supervised,
    /// The class attribute is removed from the distance; uniform folds.
    Unsupervised,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PruneMeasure {
    /// Inverse relative error in unsupervised mode, accuracy in supervised
    /// mode when the schema has a class.
    #[default]
    Auto,
    Accuracy,
    InverseRelativeError,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PruneOptions {
    pub validation_fraction: f64,
    pub allow_ties: bool,
    pub stratified: bool,
    pub measure: PruneMeasure,
}

impl Default for PruneOptions {
    fn default() -> Self {
        Self { validation_fraction: 0.25, allow_ties: false, stratified: false, measure: PruneMeasure::Auto }
    }
}

/// Everything needed to grow, prune and score one tree per fold.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub distance: DistanceSpec,
    pub split_score: SplitScore,
    pub f_alpha: f64,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub max_literals: usize,
    pub templates: TemplateSet,
    pub test_attributes: Option<Vec<usize>>,
    pub prune: Option<PruneOptions>,
    /// Upper class boundaries for scoring a numeric class as a classifier:
    /// predicted and actual values are both mapped to the index of the
    /// first boundary they do not exceed.
    pub class_boundaries: Option<Vec<f64>>,
}

impl EvalConfig {
    pub fn new(distance: DistanceSpec) -> Self {
        Self {
            distance,
            split_score: SplitScore::InterDistance,
            f_alpha: 0.01,
            min_leaf: 2,
            max_depth: None,
            max_literals: 2,
            templates: TemplateSet::default(),
            test_attributes: None,
            prune: None,
            class_boundaries: None,
        }
    }

    /// Distance dimensions for `mode`: unsupervised runs drop the class.
    pub fn distance_for(&self, schema: &Schema, mode: EvalMode) -> Result<DistanceSpec> {
        let class = schema.class_index();
        match mode {
            EvalMode::Supervised => Ok(self.distance.clone()),
            EvalMode::Unsupervised => {
                let (dims, weights): (Vec<usize>, Vec<f64>) = self
                    .distance
                    .dims
                    .iter()
                    .zip(&self.distance.weights)
                    .filter(|(d, _)| Some(**d) != class)
                    .map(|(d, w)| (*d, *w))
                    .unzip();
                DistanceSpec::new(dims, Some(weights), self.distance.norm)
            }
        }
    }

    pub fn induce_config(&self, metric: crate::metrics::Metric, seed: u64) -> InduceConfig {
        InduceConfig {
            split_score: self.split_score,
            f_alpha: self.f_alpha,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
            max_literals: self.max_literals,
            metric,
            templates: self.templates.clone(),
            test_attributes: self.test_attributes.clone(),
            seed,
        }
    }
}

/// Quality measure used to prune in `mode`: `Auto` picks accuracy for
/// supervised runs on data with a class, inverse relative error otherwise.
pub fn prune_quality(schema: &Schema, mode: EvalMode, measure: PruneMeasure) -> QualityMeasure {
    match (measure, schema.class_index()) {
        (PruneMeasure::Accuracy, Some(c)) => QualityMeasure::Accuracy { class_attr: c },
        (PruneMeasure::Auto, Some(c)) if mode == EvalMode::Supervised => QualityMeasure::Accuracy { class_attr: c },
        _ => QualityMeasure::InverseRelativeError,
    }
}

/// Mean over folds, with the number of folds it was taken over.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldMean {
    pub mean: f64,
    pub folds: usize,
}

impl FoldMean {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let (sum, folds) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (folds > 0).then(|| FoldMean { mean: sum / folds as f64, folds })
    }
}

/// Counts behind one row of a per-attribute accuracy table.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AttributeCounts {
    pub attr: usize,
    pub name: String,
    pub correct: usize,
    /// Correct predictions of the majority (root) value.
    pub default_correct: usize,
    /// Test examples with a known value for this attribute.
    pub total: usize,
}

impl AttributeCounts {
    pub fn accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.correct as f64 / self.total as f64)
    }

    pub fn default_accuracy(&self) -> Option<f64> {
        (self.total > 0).then(|| self.default_correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiAttributeTable {
    pub rows: Vec<AttributeCounts>,
}

impl MultiAttributeTable {
    /// Arithmetic mean of the per-attribute accuracies.
    pub fn mean_accuracy(&self) -> Option<f64> {
        FoldMean::of(self.rows.iter().filter_map(AttributeCounts::accuracy)).map(|m| m.mean)
    }

    pub fn mean_default(&self) -> Option<f64> {
        FoldMean::of(self.rows.iter().filter_map(AttributeCounts::default_accuracy)).map(|m| m.mean)
    }

    fn absorb(&mut self, other: &MultiAttributeTable) {
        if self.rows.is_empty() {
            self.rows = other.rows.clone();
            return;
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            a.correct += b.correct;
            a.default_correct += b.default_correct;
            a.total += b.total;
        }
    }
}

/// For every categorical descriptive attribute, how often the modal value
/// of the leaf a test example reaches equals the example's value (`truth`
/// supplies the actual values). The default column predicts the root's
/// modal value everywhere.
pub fn multi_attribute_report(tree: &ClusteringTree, ds: &Dataset, test_ids: &[usize]) -> MultiAttributeTable {
    multi_attribute_counts(tree, ds, ds, test_ids)
}

fn multi_attribute_counts(
    tree: &ClusteringTree,
    ds: &Dataset,
    truth: &Dataset,
    test_ids: &[usize],
) -> MultiAttributeTable {
    let schema = ds.schema();
    let attrs: Vec<usize> =
        schema.descriptive_indices().into_iter().filter(|&a| schema.attributes()[a].is_categorical()).collect();
    let root = tree.root().labels.as_ref();
    let leaves: Vec<Option<&LeafLabels>> =
        test_ids.iter().map(|&i| tree.node(tree.sort(ds.example(i))).labels.as_ref()).collect();
    let rows = attrs
        .into_iter()
        .map(|attr| {
            let mut row = AttributeCounts {
                attr,
                name: schema.attributes()[attr].name.clone(),
                correct: 0,
                default_correct: 0,
                total: 0,
            };
            let default = root.and_then(|l| l.mode(attr));
            for (&i, leaf) in test_ids.iter().zip(&leaves) {
                let Some(actual) = category(truth.value(i, attr)) else { continue };
                row.total += 1;
                if leaf.and_then(|l| l.mode(attr)) == Some(actual) {
                    row.correct += 1;
                }
                if default == Some(actual) {
                    row.default_correct += 1;
                }
            }
            row
        })
        .collect();
    MultiAttributeTable { rows }
}

/// Fold index of every example of `ds`. Supervised plans are stratified by
/// class; examples are dealt round-robin after a seeded shuffle.
pub fn fold_assignment(ds: &Dataset, k: usize, seed: u64, stratify: bool) -> Result<Vec<usize>> {
    let n = ds.len();
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(alloc::format!("fold count {k} outside 2..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order: Vec<usize> = match ds.schema().class_index().filter(|_| stratify) {
        Some(class) => {
            let mut groups: Vec<(Option<u32>, Vec<usize>)> = Vec::new();
            for i in 0..n {
                let c = category(ds.value(i, class));
                match groups.iter_mut().find(|(k, _)| *k == c) {
                    Some((_, g)) => g.push(i),
                    None => groups.push((c, vec![i])),
                }
            }
            groups.sort_by_key(|(k, _)| k.map_or(u64::MAX, u64::from));
            groups
                .into_iter()
                .flat_map(|(_, mut g)| {
                    g.shuffle(&mut rng);
                    g
                })
                .collect()
        }
        None => {
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut rng);
            ids
        }
    };
    let mut fold_of = vec![0; n];
    for (pos, i) in order.into_iter().enumerate() {
        fold_of[i] = pos % k;
    }
    Ok(fold_of)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeScores {
    pub accuracy: Option<f64>,
    pub relative_error: Option<f64>,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_valid: usize,
    pub n_test: usize,
    /// Scores of the tree as grown.
    pub unpruned: TreeScores,
    /// Scores after validation pruning, when pruning is enabled.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub pruned: Option<TreeScores>,
    pub attributes: MultiAttributeTable,
}

impl FoldResult {
    /// Scores of the tree the run actually delivers.
    pub fn final_scores(&self) -> &TreeScores {
        self.pruned.as_ref().unwrap_or(&self.unpruned)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub k: usize,
    pub seed: u64,
    pub mode: EvalMode,
    pub accuracy: Option<FoldMean>,
    pub relative_error: Option<FoldMean>,
    pub nodes: Option<FoldMean>,
    pub unpruned_accuracy: Option<FoldMean>,
    pub unpruned_nodes: Option<FoldMean>,
    /// Per-attribute accuracies pooled over all test folds.
    pub attributes: MultiAttributeTable,
    pub folds: Vec<FoldResult>,
}

impl EvalReport {
    /// Aggregates fold results; output does not depend on their order.
    pub fn aggregate(k: usize, seed: u64, mode: EvalMode, mut folds: Vec<FoldResult>) -> Self {
        folds.sort_by_key(|f| f.fold);
        let mut attributes = MultiAttributeTable { rows: Vec::new() };
        for f in &folds {
            attributes.absorb(&f.attributes);
        }
        EvalReport {
            k,
            seed,
            mode,
            accuracy: FoldMean::of(folds.iter().filter_map(|f| f.final_scores().accuracy)),
            relative_error: FoldMean::of(folds.iter().filter_map(|f| f.final_scores().relative_error)),
            nodes: FoldMean::of(folds.iter().map(|f| f.final_scores().nodes as f64)),
            unpruned_accuracy: FoldMean::of(folds.iter().filter_map(|f| f.unpruned.accuracy)),
            unpruned_nodes: FoldMean::of(folds.iter().map(|f| f.unpruned.nodes as f64)),
            attributes,
            folds,
        }
    }
}

/// Seed used for the validation split of one fold.
fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed ^ (fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn bucket(x: f64, boundaries: &[f64]) -> usize {
    boundaries.iter().position(|&b| x <= b).unwrap_or(boundaries.len())
}

/// Scores a labeled tree on `test_ids`. Class values come from `truth`.
pub fn score_tree(
    tree: &ClusteringTree,
    ds: &Dataset,
    truth: &Dataset,
    test_ids: &[usize],
    class_boundaries: Option<&[f64]>,
) -> TreeScores {
    let metric = tree.metric();
    let class = ds.schema().class_index();
    let leaves: Vec<NodeId> = test_ids.iter().map(|&i| tree.sort(ds.example(i))).collect();
    let accuracy = class.and_then(|c| {
        let mut correct = 0usize;
        let mut total = 0usize;
        for (&i, &leaf) in test_ids.iter().zip(&leaves) {
            let labels = tree.node(leaf).labels.as_ref();
            let hit = match class_boundaries {
                Some(bounds) => {
                    let Some(actual) = truth.value(i, c).as_f64() else { continue };
                    labels.and_then(|l| l.mean(c)).map(|p| bucket(p, bounds)) == Some(bucket(actual, bounds))
                }
                None => {
                    let Some(actual) = category(truth.value(i, c)) else { continue };
                    labels.and_then(|l| l.mode(c)) == Some(actual)
                }
            };
            total += 1;
            correct += usize::from(hit);
        }
        (total > 0).then(|| correct as f64 / total as f64)
    });
    let actuals: Vec<_> = test_ids.iter().map(|&i| metric.project(truth.example(i))).collect();
    let predictions: Vec<&Prototype> = leaves.iter().map(|&l| &tree.node(l).prototype).collect();
    let relative_error = if test_ids.is_empty() {
        None
    } else {
        relative_error(metric, &actuals, &predictions, &tree.root().prototype).ok()
    };
    TreeScores { accuracy, relative_error, nodes: tree.node_count() }
}

/// Runs one fold: grow on the learning part (minus a validation part when
/// pruning), label with the training examples, score on the test fold.
/// `truth` holds the values scored against (usually `ds` itself).
pub fn run_fold(
    ds: &Dataset,
    truth: &Dataset,
    config: &EvalConfig,
    mode: EvalMode,
    fold_of: &[usize],
    fold: usize,
    seed: u64,
) -> Result<FoldResult> {
    let test: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] == fold).collect();
    let learn: Vec<usize> = (0..ds.len()).filter(|&i| fold_of[i] != fold).collect();
    let fseed = fold_seed(seed, fold);
    let (train, valid) = match &config.prune {
        Some(p) => match ds.schema().class_index().filter(|_| p.stratified) {
            Some(c) => split_learn_set_stratified(ds, &learn, c, p.validation_fraction, fseed)?,
            None => split_learn_set(&learn, p.validation_fraction, fseed)?,
        },
        None => (learn, Vec::new()),
    };
    let metric = config.distance_for(ds.schema(), mode)?.freeze(ds, &train)?;
    let tree = induce_tree(ds, &train, &config.induce_config(metric, seed))?;
    let tree = assign_leaf_labels(&tree, ds, &train)?;
    let bounds = config.class_boundaries.as_deref();
    let unpruned = score_tree(&tree, ds, truth, &test, bounds);
    let (final_tree, pruned) = match &config.prune {
        Some(p) => {
            let measure = prune_quality(ds.schema(), mode, p.measure);
            let pruned_tree = prune(&tree, ds, &valid, measure, p.allow_ties)?;
            let scores = score_tree(&pruned_tree, ds, truth, &test, bounds);
            (pruned_tree, Some(scores))
        }
        None => (tree, None),
    };
    Ok(FoldResult {
        fold,
        n_train: train.len(),
        n_valid: valid.len(),
        n_test: test.len(),
        unpruned,
        pruned,
        attributes: multi_attribute_counts(&final_tree, ds, truth, &test),
    })
}

/// k-fold cross-validation; `k == ds.len()` is leave-one-out.
pub fn crossvalidate(ds: &Dataset, k: usize, config: &EvalConfig, seed: u64, mode: EvalMode) -> Result<EvalReport> {
    crossvalidate_against(ds, ds, k, config, seed, mode)
}

/// Cross-validation where the folds and the scored values come from
/// `truth` while learning sees `ds` (e.g. a corrupted copy).
pub fn crossvalidate_against(
    ds: &Dataset,
    truth: &Dataset,
    k: usize,
    config: &EvalConfig,
    seed: u64,
    mode: EvalMode,
) -> Result<EvalReport> {
    if ds.len() != truth.len() {
        return Err(Error::InvalidArgument("learning and truth datasets differ in size".into()));
    }
    let fold_of = fold_assignment(truth, k, seed, mode == EvalMode::Supervised)?;
    let folds = (0..k).map(|f| run_fold(ds, truth, config, mode, &fold_of, f, seed)).collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::aggregate(k, seed, mode, folds))
}

/// Independently removes each targeted cell: attribute `attr` of every
/// example is kept with probability `keep` and otherwise set missing.
pub fn corrupt_missing(ds: &Dataset, targets: &[(usize, f64)], seed: u64) -> Result<Dataset> {
    for &(attr, p) in targets {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(alloc::format!("keep probability {p} outside [0, 1]")));
        }
        if attr >= ds.schema().len() {
            return Err(Error::InvalidArgument(alloc::format!("attribute {attr} out of range")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drop = vec![vec![false; ds.schema().len()]; ds.len()];
    for row in drop.iter_mut() {
        for &(attr, p) in targets {
            let u: f64 = rng.gen();
            if u >= p {
                row[attr] = true;
            }
        }
    }
    ds.map_cells(|id, attr, cell| if drop[id][attr] { Cell::Missing } else { cell })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MissingInfoTable {
    pub levels: Vec<f64>,
    /// `cells[level][spec]`: mean test accuracy.
    pub cells: Vec<Vec<Option<FoldMean>>>,
}

/// For every availability level, corrupts the union of the specs'
/// dimensions (minus the class when `exempt_class`), cross-validates each
/// distance spec on the corrupted data and records accuracy against the
/// uncorrupted classes. Distances are used exactly as given.
pub fn missing_info_experiment(
    ds: &Dataset,
    levels: &[f64],
    specs: &[DistanceSpec],
    base: &EvalConfig,
    k: usize,
    seed: u64,
    exempt_class: bool,
) -> Result<MissingInfoTable> {
    missing_info_experiment_with(ds, levels, specs, base, seed, exempt_class, |corrupted, truth, cfg| {
        crossvalidate_against(corrupted, truth, k, cfg, seed, EvalMode::Supervised)
    })
}

/// [`missing_info_experiment`] with a caller-supplied cross-validation,
/// called as `xval(corrupted, truth, config)`.
pub fn missing_info_experiment_with(
    ds: &Dataset,
    levels: &[f64],
    specs: &[DistanceSpec],
    base: &EvalConfig,
    seed: u64,
    exempt_class: bool,
    mut xval: impl FnMut(&Dataset, &Dataset, &EvalConfig) -> Result<EvalReport>,
) -> Result<MissingInfoTable> {
    let class = ds.schema().class_index();
    let mut targets: Vec<usize> = Vec::new();
    for s in specs {
        for &d in &s.dims {
            if !targets.contains(&d) && !(exempt_class && Some(d) == class) {
                targets.push(d);
            }
        }
    }
    let mut cells = Vec::with_capacity(levels.len());
    for &level in levels {
        let plan: Vec<(usize, f64)> = targets.iter().map(|&d| (d, level)).collect();
        let corrupted = corrupt_missing(ds, &plan, seed)?;
        let mut row = Vec::with_capacity(specs.len());
        for s in specs {
            let cfg = EvalConfig { distance: s.clone(), ..base.clone() };
            row.push(xval(&corrupted, ds, &cfg)?.accuracy);
        }
        cells.push(row);
    }
    Ok(MissingInfoTable { levels: levels.to_vec(), cells })
}
