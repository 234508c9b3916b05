//! Top-down induction of clustering trees.
//!
//! At every node the candidate tests are scored by the distance between the
//! prototypes of the two subclusters they induce; the best one is installed
//! if the F-test says the dispersion drop is significant, otherwise the node
//! becomes a leaf.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{Dataset, Example, Schema};
use crate::error::{Error, Result};
use crate::eval::LeafLabels;
use crate::fdist;
use crate::logic::{generate_candidates, CandidateOptions, Literal, PathContext, TemplateSet, TestQuery};
use crate::metrics::{dispersion, Metric, Prototype, SplitStatistics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitScore {
    /// `d(p(C_L), p(C_R))`
    #[default]
    InterDistance,
    /// `n_L·n_R/n · d(p(C_L), p(C_R))²`, the between-cluster sum of squares
    WeightedBetweenSs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InduceConfig {
    pub split_score: SplitScore,
    /// Significance level of the F-test stopping criterion.
    pub f_alpha: f64,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Longest conjunction of literals placed in one node.
    pub max_literals: usize,
    pub metric: Metric,
    pub templates: TemplateSet,
    /// Attributes allowed in attribute tests; all descriptive attributes
    /// when `None`.
    pub test_attributes: Option<Vec<usize>>,
    pub seed: u64,
}

impl InduceConfig {
    pub fn new(metric: Metric) -> Self {
        Self {
            split_score: SplitScore::InterDistance,
            f_alpha: 0.01,
            min_leaf: 2,
            max_depth: None,
            max_literals: 2,
            metric,
            templates: TemplateSet::default(),
            test_attributes: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_alpha > 0.0 && self.f_alpha <= 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("f_alpha {} outside (0, 1]", self.f_alpha)));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidArgument("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Node {
    /// `None` for leaves.
    pub test: Option<TestQuery>,
    pub yes: Option<NodeId>,
    pub no: Option<NodeId>,
    pub depth: usize,
    /// Training example ids in this cluster.
    pub cluster: Vec<usize>,
    pub prototype: Prototype,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub stats: Option<SplitStatistics>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub labels: Option<LeafLabels>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.test.is_none()
    }
}

/// Binary clustering tree stored as an arena in preorder; node 0 is the
/// root and holds the whole training set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusteringTree {
    schema: Schema,
    metric: Metric,
    nodes: Vec<Node>,
}

impl ClusteringTree {
    pub fn from_parts(schema: Schema, metric: Metric, nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("tree has no nodes".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            let kids = [n.yes, n.no];
            let ok = match n.test {
                Some(_) => kids.iter().all(|k| k.is_some_and(|k| k > i && k < nodes.len())),
                None => kids.iter().all(Option::is_none),
            };
            if !ok {
                return Err(Error::InvalidArgument(alloc::format!("node {i} has inconsistent children")));
            }
        }
        Ok(Self { schema, metric, nodes })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [Node] {
        &mut self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| n.is_leaf()).map(|(i, _)| i)
    }

    /// Sorts an example to its leaf by replaying the node tests.
    pub fn sort(&self, e: &Example) -> NodeId {
        self.sort_until(e, |_| false)
    }

    /// Like [`sort`](Self::sort), but stops at the first node for which
    /// `cut` returns true, as if that node were a leaf.
    pub fn sort_until(&self, e: &Example, cut: impl Fn(NodeId) -> bool) -> NodeId {
        let mut id = Self::ROOT;
        let mut path: Vec<Literal> = Vec::new();
        loop {
            let node = &self.nodes[id];
            let Some(test) = node.test.as_ref().filter(|_| !cut(id)) else {
                return id;
            };
            if test.holds(e, &path) {
                if let TestQuery::Conjunction { literals, .. } = test {
                    path.extend(literals.iter().cloned());
                }
                id = node.yes.expect("internal node has a yes child");
            } else {
                id = node.no.expect("internal node has a no child");
            }
        }
    }

    /// Copy of the tree with every node in `collapsed` turned into a leaf and
    /// its descendants dropped. Node ids are renumbered in preorder.
    pub fn contract(&self, collapsed: &[bool]) -> ClusteringTree {
        let mut nodes = Vec::new();
        self.copy_subtree(Self::ROOT, collapsed, &mut nodes);
        ClusteringTree { schema: self.schema.clone(), metric: self.metric.clone(), nodes }
    }

    fn copy_subtree(&self, id: NodeId, collapsed: &[bool], out: &mut Vec<Node>) -> NodeId {
        let me = out.len();
        let mut node = self.nodes[id].clone();
        if collapsed.get(id).copied().unwrap_or(false) || node.is_leaf() {
            node.test = None;
            node.yes = None;
            node.no = None;
            node.stats = None;
            out.push(node);
            return me;
        }
        out.push(node);
        let yes = self.copy_subtree(self.nodes[id].yes.unwrap(), collapsed, out);
        let no = self.copy_subtree(self.nodes[id].no.unwrap(), collapsed, out);
        out[me].yes = Some(yes);
        out[me].no = Some(no);
        me
    }

    /// Indented yes/no rendering of the tree.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(Self::ROOT, "", &mut out);
        out
    }

    fn render_node(&self, id: NodeId, indent: &str, out: &mut String) {
        use core::fmt::Write;
        let node = &self.nodes[id];
        match &node.test {
            None => {
                let _ = write!(out, "[{} examples", node.cluster.len());
                if let Some(label) = node.labels.as_ref().and_then(|l| l.majority_class_label(&self.schema)) {
                    let _ = write!(out, ", class {label}");
                }
                out.push_str("]\n");
            }
            Some(test) => {
                let _ = writeln!(out, "{} ?  [{} examples]", test.display(&self.schema), node.cluster.len());
                let child_indent = alloc::format!("{indent}|       ");
                let _ = write!(out, "{indent}+--yes: ");
                self.render_node(node.yes.unwrap(), &child_indent, out);
                let last_indent = alloc::format!("{indent}        ");
                let _ = write!(out, "{indent}+--no:  ");
                self.render_node(node.no.unwrap(), &last_indent, out);
            }
        }
    }
}

/// Scores the split of a cluster into `left` and `right`.
pub fn score_split(
    metric: &Metric,
    ds: &Dataset,
    left: &[usize],
    right: &[usize],
    mode: SplitScore,
) -> Result<SplitStatistics> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::InvalidPartition("empty side"));
    }
    if left.iter().any(|i| right.contains(i)) {
        return Err(Error::InvalidPartition("sides overlap"));
    }
    let ids: Vec<usize> = left.iter().chain(right).copied().collect();
    let points: Vec<Vec<Option<f64>>> = ids.iter().map(|&i| metric.project(ds.example(i))).collect();
    let weights: Vec<f64> = ids.iter().map(|&i| ds.example(i).weight()).collect();
    let mut mask = vec![false; ids.len()];
    mask[..left.len()].iter_mut().for_each(|m| *m = true);
    let refs: Vec<&[Option<f64>]> = points.iter().map(Vec::as_slice).collect();
    full_statistics(metric, &refs, &weights, &mask, mode)
}

fn side_prototypes(dims: usize, points: &[&[Option<f64>]], weights: &[f64], mask: &[bool]) -> (Prototype, Prototype) {
    let mut sum = [vec![0.0; dims], vec![0.0; dims]];
    let mut wsum = [vec![0.0; dims], vec![0.0; dims]];
    let mut support = [vec![0usize; dims], vec![0usize; dims]];
    for ((p, &w), &yes) in points.iter().zip(weights).zip(mask) {
        let s = usize::from(!yes);
        for (k, v) in p.iter().enumerate() {
            if let Some(v) = v {
                sum[s][k] += w * v;
                wsum[s][k] += w;
                support[s][k] += 1;
            }
        }
    }
    let [sl, sr] = sum;
    let [wl, wr] = wsum;
    let [tl, tr] = support;
    let mean = |s: Vec<f64>, w: &[f64]| s.iter().zip(w).map(|(s, w)| (*w > 0.0).then(|| s / w)).collect();
    (Prototype { mean: mean(sl, &wl), support: tl }, Prototype { mean: mean(sr, &wr), support: tr })
}

/// Members on each side with any distance dimension defined. Members
/// without one carry no information about dispersion.
fn defined_counts(points: &[&[Option<f64>]], mask: &[bool]) -> (usize, usize) {
    let mut counts = (0, 0);
    for (p, &yes) in points.iter().zip(mask) {
        if p.iter().any(Option::is_some) {
            if yes {
                counts.0 += 1;
            } else {
                counts.1 += 1;
            }
        }
    }
    counts
}

fn split_score(mode: SplitScore, n_left: usize, n_right: usize, d2: f64) -> f64 {
    match mode {
        SplitScore::InterDistance => libm::sqrt(d2),
        SplitScore::WeightedBetweenSs => (n_left as f64) * (n_right as f64) / ((n_left + n_right) as f64) * d2,
    }
}

fn full_statistics(
    metric: &Metric,
    points: &[&[Option<f64>]],
    weights: &[f64],
    mask: &[bool],
    mode: SplitScore,
) -> Result<SplitStatistics> {
    let dims = metric.dims().len();
    let (proto_left, proto_right) = side_prototypes(dims, points, weights, mask);
    let d2 = metric.squared(proto_left.coords(), proto_right.coords()).ok_or(Error::DistanceUndefined)?;
    let whole = Prototype::of_points(dims, points.iter().copied().zip(weights.iter().copied()))?;
    let split = |want: bool| -> (Vec<&[Option<f64>]>, Vec<f64>) {
        points.iter().zip(weights).zip(mask).filter(|(_, &m)| m == want).map(|((p, w), _)| (*p, *w)).unzip()
    };
    let (lp, lw) = split(true);
    let (rp, rw) = split(false);
    let n = points.len();
    let (def_left, def_right) = defined_counts(points, mask);
    let n_defined = def_left + def_right;
    let ss = dispersion(metric, points, weights, &whole);
    let ss_left = dispersion(metric, &lp, &lw, &proto_left);
    let ss_right = dispersion(metric, &rp, &rw, &proto_right);
    let f = if n_defined >= 3 { f_statistic(ss, ss_left, ss_right, n_defined)? } else { 0.0 };
    Ok(SplitStatistics {
        n,
        n_left: lp.len(),
        n_right: rp.len(),
        n_defined,
        ss,
        ss_left,
        ss_right,
        f,
        proto_left,
        proto_right,
        inter_distance: libm::sqrt(d2),
        score: split_score(mode, def_left, def_right, d2),
    })
}

/// Evaluates every candidate on `cluster` and returns the highest-scoring
/// one, ties going to the earliest. Candidates leaving fewer than `min_leaf`
/// examples on a side, or whose side prototypes share no defined dimension,
/// are skipped.
pub fn best_split(
    ds: &Dataset,
    cluster: &[usize],
    candidates: &[TestQuery],
    path: &[Literal],
    metric: &Metric,
    mode: SplitScore,
    min_leaf: usize,
) -> Option<(TestQuery, SplitStatistics)> {
    let min_leaf = min_leaf.max(1);
    let points: Vec<Vec<Option<f64>>> = cluster.iter().map(|&i| metric.project(ds.example(i))).collect();
    let refs: Vec<&[Option<f64>]> = points.iter().map(Vec::as_slice).collect();
    let weights: Vec<f64> = cluster.iter().map(|&i| ds.example(i).weight()).collect();
    let dims = metric.dims().len();
    let mut best: Option<(usize, f64, Vec<bool>)> = None;
    let mut mask = vec![false; cluster.len()];
    for (ci, cand) in candidates.iter().enumerate() {
        let mut n_yes = 0;
        for (m, &i) in mask.iter_mut().zip(cluster) {
            *m = cand.holds(ds.example(i), path);
            n_yes += usize::from(*m);
        }
        let n_no = cluster.len() - n_yes;
        if n_yes < min_leaf || n_no < min_leaf {
            continue;
        }
        let (pl, pr) = side_prototypes(dims, &refs, &weights, &mask);
        let Some(d2) = metric.squared(pl.coords(), pr.coords()) else {
            continue;
        };
        let (def_yes, def_no) =
            if mode == SplitScore::WeightedBetweenSs { defined_counts(&refs, &mask) } else { (0, 0) };
        let score = split_score(mode, def_yes, def_no, d2);
        if best.as_ref().is_none_or(|(_, s, _)| score > *s) {
            best = Some((ci, score, mask.clone()));
        }
    }
    let (ci, _, mask) = best?;
    let stats = full_statistics(metric, &refs, &weights, &mask, mode).ok()?;
    Some((candidates[ci].clone(), stats))
}

/// `F = (SS/(n-1)) / ((SS_L+SS_R)/(n-2))`.
///
/// Returns `+inf` for a perfect split of a dispersed set, 0 when the set has
/// no dispersion, and 0 when the split does not reduce the dispersion
/// estimate (possible with missing-value rescaling).
pub fn f_statistic(ss: f64, ss_left: f64, ss_right: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewExamples(n));
    }
    let within = ss_left + ss_right;
    if ss <= 0.0 {
        return Ok(0.0);
    }
    if within <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if within > ss {
        return Ok(0.0);
    }
    Ok((ss / (n - 1) as f64) / (within / (n - 2) as f64))
}

/// Accepts a split when `f` exceeds the upper-`alpha` critical value of
/// F(n-1, n-2).
pub fn f_test_accept(f: f64, n: usize, alpha: f64) -> Result<bool> {
    if n < 3 {
        return Err(Error::TooFewExamples(n));
    }
    if f == f64::INFINITY {
        return Ok(true);
    }
    let crit = fdist::f_critical_value(alpha, (n - 1) as f64, (n - 2) as f64)?;
    Ok(f > crit)
}

/// Grows a clustering tree on `train_ids` of `ds`.
pub fn induce_tree(ds: &Dataset, train_ids: &[usize], config: &InduceConfig) -> Result<ClusteringTree> {
    config.validate()?;
    if train_ids.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if let Some(&bad) = train_ids.iter().find(|&&i| i >= ds.len()) {
        return Err(Error::InvalidArgument(alloc::format!("training id {bad} out of range")));
    }
    let test_attributes = config.test_attributes.clone().unwrap_or_else(|| ds.schema().descriptive_indices());
    let mut builder = Builder { ds, config, test_attributes, nodes: Vec::new() };
    builder.grow(train_ids.to_vec(), 0, &PathContext::default())?;
    Ok(ClusteringTree { schema: ds.schema().clone(), metric: config.metric.clone(), nodes: builder.nodes })
}

struct Builder<'a> {
    ds: &'a Dataset,
    config: &'a InduceConfig,
    test_attributes: Vec<usize>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, cluster: Vec<usize>, depth: usize, ctx: &PathContext) -> Result<NodeId> {
        let cfg = self.config;
        let prototype = crate::metrics::prototype(&cfg.metric, self.ds, &cluster)?;
        let id = self.nodes.len();
        self.nodes.push(Node { test: None, yes: None, no: None, depth, cluster, prototype, stats: None, labels: None });
        let Some((test, stats)) = self.choose(id, depth, ctx)? else {
            return Ok(id);
        };
        let cluster = &self.nodes[id].cluster;
        let (yes_ids, no_ids): (Vec<usize>, Vec<usize>) =
            cluster.iter().partition(|&&i| test.holds(self.ds.example(i), &ctx.literals));
        let yes_ctx = ctx.refined(&test);
        self.nodes[id].test = Some(test);
        self.nodes[id].stats = Some(stats);
        let yes = self.grow(yes_ids, depth + 1, &yes_ctx)?;
        let no = self.grow(no_ids, depth + 1, ctx)?;
        self.nodes[id].yes = Some(yes);
        self.nodes[id].no = Some(no);
        Ok(id)
    }

    fn choose(&self, id: NodeId, depth: usize, ctx: &PathContext) -> Result<Option<(TestQuery, SplitStatistics)>> {
        let cfg = self.config;
        let cluster = &self.nodes[id].cluster;
        let n = cluster.len();
        if n < 3 || n < 2 * cfg.min_leaf || cfg.max_depth.is_some_and(|d| depth >= d) {
            return Ok(None);
        }
        let opts = CandidateOptions { test_attributes: &self.test_attributes, max_literals: cfg.max_literals };
        let candidates = generate_candidates(ctx, &cfg.templates, self.ds, cluster, &opts);
        let Some((test, stats)) =
            best_split(self.ds, cluster, &candidates, &ctx.literals, &cfg.metric, cfg.split_score, cfg.min_leaf)
        else {
            return Ok(None);
        };
        if stats.n_defined < 3 || !f_test_accept(stats.f, stats.n_defined, cfg.f_alpha)? {
            return Ok(None);
        }
        Ok(Some((test, stats)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, Cell, Example, Schema};
    use crate::metrics::DistanceSpec;

    fn line(values: &[f64]) -> Dataset {
        let schema = Schema::new(vec![Attribute::numeric("x")]).unwrap();
        Dataset::new(schema, values.iter().map(|&v| Example::new(vec![Cell::Number(v)])).collect()).unwrap()
    }

    fn metric(ds: &Dataset) -> Metric {
        DistanceSpec::plain(vec![0]).unwrap().freeze(ds, &ds.ids()).unwrap()
    }

    #[test]
    fn score_split_fixture() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let s = score_split(&metric(&ds), &ds, &[0, 1], &[2, 3], SplitScore::InterDistance).unwrap();
        assert_eq!((s.ss, s.ss_left, s.ss_right, s.inter_distance), (68.0, 2.0, 2.0, 8.0));
        assert!((s.f - 34.0 / 3.0).abs() < 1e-12);
        let s = score_split(&metric(&ds), &ds, &[0], &[1, 2, 3], SplitScore::InterDistance).unwrap();
        assert!((s.inter_distance - 20.0 / 3.0).abs() < 1e-12);
        let w = score_split(&metric(&ds), &ds, &[0, 1], &[2, 3], SplitScore::WeightedBetweenSs).unwrap();
        assert_eq!(w.score, 64.0);
    }

    #[test]
    fn score_split_constant_sides_and_errors() {
        let ds = line(&[3.0, 3.0, 3.0]);
        let s = score_split(&metric(&ds), &ds, &[0], &[1, 2], SplitScore::InterDistance).unwrap();
        assert_eq!(s.inter_distance, 0.0);
        assert!(matches!(
            score_split(&metric(&ds), &ds, &[], &[0, 1, 2], SplitScore::InterDistance),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn best_split_picks_middle_threshold() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let cands = vec![TestQuery::le(0, 1.0), TestQuery::le(0, 5.0), TestQuery::le(0, 9.0)];
        let (t, s) = best_split(&ds, &ds.ids(), &cands, &[], &metric(&ds), SplitScore::InterDistance, 1).unwrap();
        assert_eq!(t, TestQuery::le(0, 5.0));
        assert_eq!(s.inter_distance, 8.0);
    }

    #[test]
    fn best_split_ties_and_empty_sides() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let m = metric(&ds);
        let none = vec![TestQuery::le(0, -1.0), TestQuery::le(0, 100.0)];
        assert!(best_split(&ds, &ds.ids(), &none, &[], &m, SplitScore::InterDistance, 1).is_none());
        let tied = vec![TestQuery::le(0, 4.0), TestQuery::le(0, 5.0)];
        let (t, _) = best_split(&ds, &ds.ids(), &tied, &[], &m, SplitScore::InterDistance, 1).unwrap();
        assert_eq!(t, TestQuery::le(0, 4.0));
    }

    #[test]
    fn f_statistic_cases() {
        assert!((f_statistic(68.0, 2.0, 2.0, 4).unwrap() - 11.333_333_333_333_334).abs() < 1e-9);
        assert_eq!(f_statistic(6.0, 2.0, 2.0, 4).unwrap(), 1.0);
        assert_eq!(f_statistic(64.0, 0.0, 0.0, 4).unwrap(), f64::INFINITY);
        assert_eq!(f_statistic(0.0, 0.0, 0.0, 4).unwrap(), 0.0);
        assert_eq!(f_statistic(5.0, 3.0, 3.0, 4).unwrap(), 0.0);
        assert_eq!(f_statistic(5.0, 1.0, 1.0, 2), Err(Error::TooFewExamples(2)));
    }

    #[test]
    fn f_test_decisions() {
        assert!(f_test_accept(f64::INFINITY, 4, 0.01).unwrap());
        for n in [3, 4, 10, 50, 300] {
            assert!(!f_test_accept(1.0, n, 0.01).unwrap());
        }
        assert!(!f_test_accept(34.0 / 3.0, 4, 0.01).unwrap());
        assert!(f_test_accept(34.0 / 3.0, 4, 0.25).unwrap());
        assert!(f_test_accept(1.0, 2, 0.01).is_err());
    }

    #[test]
    fn induce_single_example_is_leaf() {
        let ds = line(&[1.0]);
        let t = induce_tree(&ds, &[0], &InduceConfig::new(metric(&ds))).unwrap();
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn induce_fixture_alpha_controls_root() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let mut cfg = InduceConfig::new(metric(&ds));
        cfg.min_leaf = 1;
        let t = induce_tree(&ds, &ds.ids(), &cfg).unwrap();
        assert_eq!(t.node_count(), 1);
        cfg.f_alpha = 0.25;
        let t = induce_tree(&ds, &ds.ids(), &cfg).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.root().test, Some(TestQuery::le(0, 5.0)));
        assert_eq!(t.node(t.root().yes.unwrap()).cluster, vec![0, 1]);
        assert_eq!(t.node(t.root().no.unwrap()).cluster, vec![2, 3]);
    }

    #[test]
    fn default_min_leaf_also_splits_fixture() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let mut cfg = InduceConfig::new(metric(&ds));
        cfg.f_alpha = 0.25;
        assert_eq!(induce_tree(&ds, &ds.ids(), &cfg).unwrap().node_count(), 3);
    }

    #[test]
    fn config_validation() {
        let ds = line(&[0.0, 1.0]);
        let mut cfg = InduceConfig::new(metric(&ds));
        cfg.f_alpha = 0.0;
        assert!(induce_tree(&ds, &ds.ids(), &cfg).is_err());
        cfg.f_alpha = 0.5;
        cfg.min_leaf = 0;
        assert!(induce_tree(&ds, &ds.ids(), &cfg).is_err());
        cfg.min_leaf = 1;
        assert!(induce_tree(&ds, &[], &cfg).is_err());
    }

    #[test]
    fn contract_and_sort() {
        let ds = line(&[0.0, 2.0, 8.0, 10.0]);
        let mut cfg = InduceConfig::new(metric(&ds));
        cfg.f_alpha = 0.25;
        let t = induce_tree(&ds, &ds.ids(), &cfg).unwrap();
        assert_eq!(t.sort(ds.example(0)), t.root().yes.unwrap());
        assert_eq!(t.sort(ds.example(3)), t.root().no.unwrap());
        let c = t.contract(&[true, false, false]);
        assert_eq!(c.node_count(), 1);
        assert!(c.root().stats.is_none());
        assert_eq!(t.sort_until(ds.example(3), |id| id == 0), 0);
    }

    #[test]
    fn members_without_values_add_no_degrees_of_freedom() {
        let schema = Schema::new(vec![Attribute::numeric("x")]).unwrap();
        let cells =
            [Cell::Number(0.0), Cell::Number(2.0), Cell::Missing, Cell::Number(8.0), Cell::Number(10.0), Cell::Missing];
        let ds = Dataset::new(schema, cells.iter().map(|c| Example::new(vec![*c])).collect()).unwrap();
        let s = score_split(&metric(&ds), &ds, &[0, 1, 2], &[3, 4, 5], SplitScore::WeightedBetweenSs).unwrap();
        assert_eq!((s.n, s.n_defined), (6, 4));
        assert!((s.f - 34.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.score, 64.0);
    }
}
