//! Typed example collections.
//!
//! An [`Example`] carries one [`Cell`] per schema attribute plus an optional
//! interpretation: a set of ground facts describing the example as a small
//! relational database. Propositional tables leave the fact set empty;
//! relational data may leave the attribute vector empty, or lift selected
//! facts into attributes through a [`FactMapping`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
    Ignored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Role {
    Descriptive,
    Class,
    Key,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
    pub role: Role,
    /// Original nominal values of an attribute that has been encoded as
    /// numbers. Code `i` stands for `labels[i]`.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub labels: Option<Vec<String>>,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self { name: name.into(), kind: AttributeKind::Numeric, role: Role::Descriptive, labels: None }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: AttributeKind::Nominal(values.into_iter().map(Into::into).collect()),
            role: Role::Descriptive,
            labels: None,
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric)
    }

    /// Nominal attributes and numeric attributes that were encoded from
    /// nominal ones. Labels for these are modal values rather than means.
    pub fn is_categorical(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal(_)) || self.labels.is_some()
    }

    /// Number of categories, for categorical attributes.
    pub fn category_count(&self) -> Option<usize> {
        match (&self.kind, &self.labels) {
            (AttributeKind::Nominal(v), _) => Some(v.len()),
            (_, Some(l)) => Some(l.len()),
            _ => None,
        }
    }

    /// Human-readable rendering of a cell of this attribute.
    pub fn display_value(&self, cell: Cell) -> String {
        match cell {
            Cell::Missing => "?".to_string(),
            Cell::Code(c) => match &self.kind {
                AttributeKind::Nominal(v) => v.get(c as usize).cloned().unwrap_or_else(|| format!("#{c}")),
                _ => format!("#{c}"),
            },
            Cell::Number(x) => match &self.labels {
                Some(l) if x >= 0.0 && libm::trunc(x) == x && (x as usize) < l.len() => l[x as usize].clone(),
                _ => format!("{x}"),
            },
        }
    }
}

/// Ordered, validated attribute list.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<Attribute>", into = "Vec<Attribute>"))]
pub struct Schema {
    attrs: Vec<Attribute>,
}

impl Schema {
    pub fn new(attrs: Vec<Attribute>) -> Result<Self> {
        for (i, a) in attrs.iter().enumerate() {
            if a.name.is_empty() {
                return Err(Error::Schema(format!("attribute {i} has an empty name")));
            }
            if attrs[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::Schema(format!("duplicate attribute name `{}`", a.name)));
            }
            if let AttributeKind::Nominal(values) = &a.kind {
                if values.is_empty() {
                    return Err(Error::Schema(format!("nominal attribute `{}` has no values", a.name)));
                }
                for (j, v) in values.iter().enumerate() {
                    if values[..j].contains(v) {
                        return Err(Error::Schema(format!("attribute `{}` lists value `{v}` twice", a.name)));
                    }
                }
            }
        }
        if attrs.iter().filter(|a| a.role == Role::Class).count() > 1 {
            return Err(Error::Schema("more than one class attribute".to_string()));
        }
        Ok(Self { attrs })
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attrs
    }

    pub fn get(&self, index: usize) -> Option<&Attribute> {
        self.attrs.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a.name == name)
    }

    pub fn class_index(&self) -> Option<usize> {
        self.attrs.iter().position(|a| a.role == Role::Class)
    }

    /// Attributes usable as node tests: descriptive and not ignored.
    pub fn descriptive_indices(&self) -> Vec<usize> {
        self.attrs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Descriptive && a.kind != AttributeKind::Ignored)
            .map(|(i, _)| i)
            .collect()
    }

    /// Numeric attributes other than the class and keys.
    pub fn numeric_descriptive_indices(&self) -> Vec<usize> {
        self.attrs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.role == Role::Descriptive && a.is_numeric())
            .map(|(i, _)| i)
            .collect()
    }

    /// Returns a copy of the schema with the role of `index` replaced. Any
    /// previous class attribute becomes descriptive when `role` is `Class`.
    pub fn with_role(&self, index: usize, role: Role) -> Result<Self> {
        let mut attrs = self.attrs.clone();
        if index >= attrs.len() {
            return Err(Error::InvalidArgument(format!("attribute index {index} out of range")));
        }
        if role == Role::Class {
            for a in attrs.iter_mut().filter(|a| a.role == Role::Class) {
                a.role = Role::Descriptive;
            }
        }
        attrs[index].role = role;
        Schema::new(attrs)
    }
}

impl TryFrom<Vec<Attribute>> for Schema {
    type Error = Error;
    fn try_from(attrs: Vec<Attribute>) -> Result<Self> {
        Schema::new(attrs)
    }
}

impl From<Schema> for Vec<Attribute> {
    fn from(s: Schema) -> Self {
        s.attrs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Cell {
    #[default]
    Missing,
    Number(f64),
    Code(u32),
}

impl Cell {
    pub fn is_missing(self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Numeric view of the cell; nominal codes are read as their index.
    pub fn as_f64(self) -> Option<f64> {
        match self {
            Cell::Missing => None,
            Cell::Number(x) => Some(x),
            Cell::Code(c) => Some(c as f64),
        }
    }
}

/// Constant appearing in a ground fact.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(untagged))]
pub enum Constant {
    Number(f64),
    Symbol(String),
}

impl Constant {
    pub fn symbol(s: impl Into<String>) -> Self {
        Constant::Symbol(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Constant::Number(x) => Some(*x),
            Constant::Symbol(_) => None,
        }
    }
}

impl PartialEq for Constant {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Constant {}

impl PartialOrd for Constant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numbers sort before symbols; numbers by value, symbols lexicographically.
impl Ord for Constant {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Constant::Number(a), Constant::Number(b)) => a.total_cmp(b),
            (Constant::Number(_), Constant::Symbol(_)) => Ordering::Less,
            (Constant::Symbol(_), Constant::Number(_)) => Ordering::Greater,
            (Constant::Symbol(a), Constant::Symbol(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Number(x) => write!(f, "{x}"),
            Constant::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundFact {
    pub functor: String,
    pub args: Vec<Constant>,
}

impl GroundFact {
    pub fn new(functor: impl Into<String>, args: Vec<Constant>) -> Self {
        Self { functor: functor.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for GroundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.functor)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// One unit of clustering. Immutable once placed in a [`Dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    id: usize,
    name: Option<String>,
    values: Vec<Cell>,
    facts: Vec<GroundFact>,
    weight: f64,
}

impl Example {
    pub fn new(values: Vec<Cell>) -> Self {
        Self { id: 0, name: None, values, facts: Vec::new(), weight: 1.0 }
    }

    pub fn with_facts(mut self, facts: Vec<GroundFact>) -> Self {
        self.facts = facts;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn values(&self) -> &[Cell] {
        &self.values
    }

    pub fn value(&self, attr: usize) -> Cell {
        self.values.get(attr).copied().unwrap_or(Cell::Missing)
    }

    pub fn facts(&self) -> &[GroundFact] {
        &self.facts
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    schema: Schema,
    examples: Vec<Example>,
}

impl Dataset {
    /// Validates every example against the schema and renumbers ids `0..n`.
    pub fn new(schema: Schema, mut examples: Vec<Example>) -> Result<Self> {
        for (i, e) in examples.iter_mut().enumerate() {
            if e.values.len() != schema.len() {
                return Err(Error::Example {
                    example: i,
                    message: format!("has {} values, schema has {}", e.values.len(), schema.len()),
                });
            }
            if !e.weight.is_finite() || e.weight <= 0.0 {
                return Err(Error::Example { example: i, message: format!("weight {} is not positive", e.weight) });
            }
            for (a, cell) in schema.attributes().iter().zip(&e.values) {
                match (cell, &a.kind) {
                    (Cell::Missing, _) => {}
                    (Cell::Code(c), AttributeKind::Nominal(values)) if (*c as usize) < values.len() => {}
                    (Cell::Code(c), _) => {
                        return Err(Error::Example {
                            example: i,
                            message: format!("code {c} is not valid for attribute `{}`", a.name),
                        })
                    }
                    (Cell::Number(x), _) if !x.is_finite() => {
                        return Err(Error::Example {
                            example: i,
                            message: format!("non-finite value for attribute `{}`", a.name),
                        })
                    }
                    (Cell::Number(_), AttributeKind::Nominal(_)) => {
                        return Err(Error::Example {
                            example: i,
                            message: format!("number given for nominal attribute `{}`", a.name),
                        })
                    }
                    (Cell::Number(_), _) => {}
                }
            }
            e.id = i;
        }
        Ok(Self { schema, examples })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn example(&self, id: usize) -> &Example {
        &self.examples[id]
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn ids(&self) -> Vec<usize> {
        (0..self.examples.len()).collect()
    }

    pub fn value(&self, id: usize, attr: usize) -> Cell {
        self.examples[id].value(attr)
    }

    /// Same examples under a different (compatible) schema.
    pub fn with_schema(&self, schema: Schema) -> Result<Self> {
        Dataset::new(schema, self.examples.clone())
    }

    /// Builds a new dataset by rewriting cells. Facts, names and weights are
    /// carried over untouched.
    pub fn map_cells(&self, mut f: impl FnMut(usize, usize, Cell) -> Cell) -> Result<Self> {
        let examples = self
            .examples
            .iter()
            .map(|e| {
                let values = e.values.iter().enumerate().map(|(a, &c)| f(e.id, a, c)).collect();
                Example { values, ..e.clone() }
            })
            .collect();
        Dataset::new(self.schema.clone(), examples)
    }
}

/// Replaces every nominal attribute by a numeric one holding its value code.
/// The original values are kept in [`Attribute::labels`] so reports can print
/// them. Missing cells stay missing; numeric attributes are untouched.
pub fn encode_nominals(ds: &Dataset) -> Dataset {
    let attrs = ds
        .schema
        .attributes()
        .iter()
        .map(|a| match &a.kind {
            AttributeKind::Nominal(values) => Attribute {
                name: a.name.clone(),
                kind: AttributeKind::Numeric,
                role: a.role,
                labels: Some(values.clone()),
            },
            _ => a.clone(),
        })
        .collect();
    let schema = Schema { attrs };
    let examples = ds
        .examples
        .iter()
        .map(|e| {
            let values = e
                .values
                .iter()
                .map(|&c| match c {
                    Cell::Code(k) => Cell::Number(k as f64),
                    other => other,
                })
                .collect();
            Example { values, ..e.clone() }
        })
        .collect();
    Dataset { schema, examples }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappedKind {
    Numeric,
    Nominal,
}

/// Declares that the last argument of `functor/arity` facts becomes the
/// value of attribute `name`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedAttribute {
    pub name: String,
    pub functor: String,
    pub arity: usize,
    pub kind: MappedKind,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FactMapping {
    pub attributes: Vec<MappedAttribute>,
}

impl FactMapping {
    /// Builds a dataset from named interpretations, lifting mapped facts
    /// into attribute cells. Facts are kept verbatim on each example.
    pub fn lift(&self, interpretations: Vec<(String, Vec<GroundFact>)>) -> Result<Dataset> {
        for m in &self.attributes {
            if m.arity == 0 {
                return Err(Error::Schema(format!("mapping for `{}` needs arity >= 1", m.name)));
            }
        }
        // nominal value lists in first-occurrence order
        let mut nominal_values: Vec<Vec<String>> = alloc::vec![Vec::new(); self.attributes.len()];
        let mut raw: Vec<Vec<Option<Constant>>> = Vec::with_capacity(interpretations.len());
        for (block, (name, facts)) in interpretations.iter().enumerate() {
            let mut row = alloc::vec![None; self.attributes.len()];
            for (k, m) in self.attributes.iter().enumerate() {
                let mut hits = facts.iter().filter(|f| f.functor == m.functor && f.arity() == m.arity);
                let Some(fact) = hits.next() else { continue };
                if hits.next().is_some() {
                    return Err(Error::Example {
                        example: block,
                        message: format!("model `{name}` has several {}/{} facts", m.functor, m.arity),
                    });
                }
                let value = fact.args[m.arity - 1].clone();
                match m.kind {
                    MappedKind::Numeric if value.as_f64().is_none() => {
                        return Err(Error::Example {
                            example: block,
                            message: format!("model `{name}`: `{fact}` is not numeric"),
                        })
                    }
                    MappedKind::Nominal => {
                        let s = value.to_string();
                        if !nominal_values[k].contains(&s) {
                            nominal_values[k].push(s);
                        }
                    }
                    MappedKind::Numeric => {}
                }
                row[k] = Some(value);
            }
            raw.push(row);
        }
        let attrs = self
            .attributes
            .iter()
            .zip(&nominal_values)
            .map(|(m, values)| {
                let kind = match m.kind {
                    MappedKind::Numeric => AttributeKind::Numeric,
                    // an attribute never observed still needs a non-empty value list
                    MappedKind::Nominal if values.is_empty() => AttributeKind::Nominal(alloc::vec!["?".to_string()]),
                    MappedKind::Nominal => AttributeKind::Nominal(values.clone()),
                };
                Attribute { name: m.name.clone(), kind, role: m.role, labels: None }
            })
            .collect();
        let schema = Schema::new(attrs)?;
        let examples = interpretations
            .into_iter()
            .zip(raw)
            .map(|((name, facts), row)| {
                let values = row
                    .into_iter()
                    .enumerate()
                    .map(|(k, v)| match (v, self.attributes[k].kind) {
                        (None, _) => Cell::Missing,
                        (Some(c), MappedKind::Numeric) => Cell::Number(c.as_f64().unwrap_or(f64::NAN)),
                        (Some(c), MappedKind::Nominal) => {
                            let s = c.to_string();
                            Cell::Code(nominal_values[k].iter().position(|v| *v == s).unwrap_or(0) as u32)
                        }
                    })
                    .collect();
                Example::new(values).with_facts(facts).with_name(name)
            })
            .collect();
        Dataset::new(schema, examples)
    }
}
