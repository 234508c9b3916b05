//! Validation-set post-pruning.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::eval::category;
use crate::induction::{ClusteringTree, NodeId};
use crate::metrics::{relative_error, Prototype};

/// Added to the relative error before inverting it.
pub const RE_EPSILON: f64 = 1e-9;

/// Tree quality on held-out data; higher is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum QualityMeasure {
    /// Fraction of examples whose class equals the majority class of their
    /// leaf.
    Accuracy { class_attr: usize },
    /// `1 / (RE + ε)` with leaf prototypes as predictions and the root
    /// prototype as baseline.
    InverseRelativeError,
}

/// Uniform random split of `ids` into (train, validation), both sorted.
/// The validation side gets `round(n·fraction)` ids, clamped so that neither
/// side is empty.
pub fn split_learn_set(ids: &[usize], validation_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_valid = validation_size(ids.len(), validation_fraction)?;
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(finish_split(shuffled, n_valid))
}

/// Like [`split_learn_set`], but keeps class proportions on both sides.
pub fn split_learn_set_stratified(
    ds: &Dataset,
    ids: &[usize],
    class_attr: usize,
    validation_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let n_valid = validation_size(ids.len(), validation_fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: Vec<(Option<u32>, Vec<usize>)> = Vec::new();
    for &i in ids {
        let c = category(ds.value(i, class_attr));
        match groups.iter_mut().find(|(k, _)| *k == c) {
            Some((_, g)) => g.push(i),
            None => groups.push((c, vec![i])),
        }
    }
    groups.sort_by_key(|(k, _)| k.map_or(u64::MAX, u64::from));
    // rank every id by its relative position inside its shuffled class
    let mut ranked: Vec<(f64, usize, usize)> = Vec::with_capacity(ids.len());
    for (gi, (_, g)) in groups.iter_mut().enumerate() {
        g.shuffle(&mut rng);
        let len = g.len() as f64;
        ranked.extend(g.iter().enumerate().map(|(pos, &i)| ((pos as f64 + 0.5) / len, gi, i)));
    }
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(finish_split(ranked.into_iter().map(|(_, _, i)| i).collect(), n_valid))
}

fn validation_size(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("validation fraction {fraction} outside (0, 1)")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(alloc::format!("cannot split {n} examples into train and validation")));
    }
    let raw = libm::round(n as f64 * fraction) as usize;
    Ok(raw.clamp(1, n - 1))
}

fn finish_split(order: Vec<usize>, n_valid: usize) -> (Vec<usize>, Vec<usize>) {
    let mut valid = order[..n_valid].to_vec();
    let mut train = order[n_valid..].to_vec();
    valid.sort_unstable();
    train.sort_unstable();
    (train, valid)
}

pub fn tree_quality(tree: &ClusteringTree, ds: &Dataset, valid: &[usize], measure: QualityMeasure) -> Result<f64> {
    quality_with_cut(tree, ds, valid, measure, &[])
}

/// Quality of the tree in which every node flagged in `cut` acts as a leaf.
fn quality_with_cut(
    tree: &ClusteringTree,
    ds: &Dataset,
    valid: &[usize],
    measure: QualityMeasure,
    cut: &[bool],
) -> Result<f64> {
    if valid.is_empty() {
        return Err(Error::InvalidArgument("empty validation set".into()));
    }
    let is_cut = |id: NodeId| cut.get(id).copied().unwrap_or(false);
    match measure {
        QualityMeasure::Accuracy { class_attr } => {
            let mut correct = 0usize;
            let mut total = 0usize;
            for &i in valid {
                let e = ds.example(i);
                let Some(actual) = category(e.value(class_attr)) else { continue };
                let leaf = tree.node(tree.sort_until(e, is_cut));
                let labels = leaf.labels.as_ref().ok_or_else(|| {
                    Error::UnlabeledTree(tree.schema().get(class_attr).map(|a| a.name.clone()).unwrap_or_default())
                })?;
                total += 1;
                if labels.mode(class_attr) == Some(actual) {
                    correct += 1;
                }
            }
            Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
        }
        QualityMeasure::InverseRelativeError => {
            let metric = tree.metric();
            let actuals: Vec<_> = valid.iter().map(|&i| metric.project(ds.example(i))).collect();
            let predictions: Vec<&Prototype> =
                valid.iter().map(|&i| &tree.node(tree.sort_until(ds.example(i), is_cut)).prototype).collect();
            match relative_error(metric, &actuals, &predictions, &tree.root().prototype) {
                Ok(re) => Ok(1.0 / (re + RE_EPSILON)),
                Err(Error::RelativeErrorUndefined) => Ok(0.0),
                Err(e) => Err(e),
            }
        }
    }
}

/// Bottom-up validation pruning, repeated until no collapse applies. A node
/// is collapsed when the tree with that node as a leaf scores strictly
/// better on `valid` (or at least as well, with `allow_ties`). Returns a
/// pruned copy.
pub fn prune(
    tree: &ClusteringTree,
    ds: &Dataset,
    valid: &[usize],
    measure: QualityMeasure,
    allow_ties: bool,
) -> Result<ClusteringTree> {
    let n = tree.node_count();
    let mut parent = vec![None; n];
    for (id, node) in tree.nodes().iter().enumerate() {
        for child in [node.yes, node.no].into_iter().flatten() {
            parent[child] = Some(id);
        }
    }
    let mut collapsed = vec![false; n];
    let hidden = |collapsed: &[bool], mut id: NodeId| -> bool {
        while let Some(p) = parent[id] {
            if collapsed[p] {
                return true;
            }
            id = p;
        }
        false
    };
    loop {
        let mut changed = false;
        // preorder arena: reverse order visits children before parents
        for id in (0..n).rev() {
            if tree.node(id).is_leaf() || collapsed[id] || hidden(&collapsed, id) {
                continue;
            }
            let q = quality_with_cut(tree, ds, valid, measure, &collapsed)?;
            collapsed[id] = true;
            let q_pruned = quality_with_cut(tree, ds, valid, measure, &collapsed)?;
            let better = if allow_ties { q_pruned >= q } else { q_pruned > q };
            if better {
                changed = true;
            } else {
                collapsed[id] = false;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(tree.contract(&collapsed))
}
