//! Top-down induction of clustering trees.
//!
//! A clustering tree is a binary decision tree whose nodes and leaves each
//! stand for a cluster of examples. Splits are chosen by the distance between
//! the prototypes of the two candidate subclusters, growth stops when an
//! F-test on the dispersion reduction fails, and trees are post-pruned on a
//! validation set.
//!
//! The crate is `no_std` (it needs `alloc`). Parsing, file formats and the
//! command-line front end live in the `tic` crate.

#![no_std]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod eval;
pub mod fdist;
pub mod induction;
pub mod logic;
pub mod metrics;
pub mod pruning;

pub use dataset::{Attribute, AttributeKind, Cell, Constant, Dataset, Example, FactMapping, GroundFact, Role, Schema};
pub use error::{Error, Result};
pub use eval::{EvalConfig, EvalMode, EvalReport, LeafLabels};
pub use induction::{ClusteringTree, InduceConfig, Node, NodeId, SplitScore};
pub use logic::{AttrTest, Binding, Literal, TemplateSet, Term, TestQuery};
pub use metrics::{DistanceSpec, Metric, Normalization, Prototype, SplitStatistics};
pub use pruning::QualityMeasure;
