//! Tree files: a JSON document tagged `"format": "tic-tree/1"` holding the
//! schema, the frozen metric and the node arena in preorder. Each node
//! records its test, children, depth, training cluster, prototype, split
//! statistics and labels.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tic_core::ClusteringTree;

use crate::error::{Result, TicError};

pub const TREE_FORMAT: &str = "tic-tree/1";

#[derive(Serialize, Deserialize)]
struct TreeDocument {
    format: String,
    tree: ClusteringTree,
}

pub fn tree_to_json(tree: &ClusteringTree) -> String {
    let doc = TreeDocument { format: TREE_FORMAT.to_string(), tree: tree.clone() };
    let mut s = serde_json::to_string_pretty(&doc).expect("trees serialize");
    s.push('\n');
    s
}

pub fn tree_from_json(text: &str, origin: &Path) -> Result<ClusteringTree> {
    let doc: TreeDocument =
        serde_json::from_str(text).map_err(|e| TicError::data(origin, format!("not a tree file: {e}")))?;
    if doc.format != TREE_FORMAT {
        return Err(TicError::data(origin, format!("unsupported tree format `{}`", doc.format)));
    }
    let t = doc.tree;
    ClusteringTree::from_parts(t.schema().clone(), t.metric().clone(), t.nodes().to_vec())
        .map_err(|e| TicError::data(origin, e.to_string()))
}

pub fn write_tree(path: &Path, tree: &ClusteringTree) -> Result<()> {
    fs::write(path, tree_to_json(tree)).map_err(|e| TicError::io(path, e))
}

pub fn read_tree(path: &Path) -> Result<ClusteringTree> {
    let text = fs::read_to_string(path).map_err(|e| TicError::io(path, e))?;
    tree_from_json(&text, path)
}
