//! CSV tables with a header row.
//!
//! Column kinds are inferred: a column whose non-missing cells all parse as
//! finite numbers is numeric, anything else is nominal with its distinct
//! values in sorted order. Empty cells and `?` are missing.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use tic_core::{Attribute, AttributeKind, Cell, Dataset, Example, Role, Schema};

use crate::error::{Result, TicError};

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Column holding the class.
    pub class: Option<String>,
    /// Column naming the examples; not used as an attribute.
    pub key: Option<String>,
    /// Columns dropped from learning.
    pub ignore: Vec<String>,
}

fn is_missing(s: &str) -> bool {
    s.is_empty() || s == "?"
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn read_records(reader: impl Read, origin: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| TicError::data(origin, format!("bad header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(TicError::data(origin, "missing header row"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| TicError::data(origin, format!("row {}: {e}", i + 2)))?;
        if rec.len() != header.len() {
            return Err(TicError::data(
                origin,
                format!("row {}: {} fields, header has {}", i + 2, rec.len(), header.len()),
            ));
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

pub fn read_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| TicError::io(path, e))?;
    read_csv_from(file, path, opts)
}

pub fn read_csv_from(reader: impl Read, origin: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let (header, rows) = read_records(reader, origin)?;
    for name in opts.class.iter().chain(&opts.key).chain(&opts.ignore) {
        if !header.contains(name) {
            return Err(TicError::data(origin, format!("no column named `{name}`")));
        }
    }
    let mut attrs = Vec::with_capacity(header.len());
    for (col, name) in header.iter().enumerate() {
        let role = if opts.class.as_ref() == Some(name) {
            Role::Class
        } else if opts.key.as_ref() == Some(name) {
            Role::Key
        } else {
            Role::Descriptive
        };
        let kind = if role == Role::Key || opts.ignore.contains(name) {
            AttributeKind::Ignored
        } else {
            let cells: Vec<&str> = rows.iter().map(|r| r[col].as_str()).filter(|s| !is_missing(s)).collect();
            if cells.iter().all(|s| parse_number(s).is_some()) {
                AttributeKind::Numeric
            } else {
                let mut values: Vec<String> = cells.iter().map(|s| s.to_string()).collect();
                values.sort();
                values.dedup();
                AttributeKind::Nominal(values)
            }
        };
        attrs.push(Attribute { name: name.clone(), kind, role, labels: None });
    }
    let schema = Schema::new(attrs).map_err(|e| TicError::data(origin, e.to_string()))?;
    let key_col = opts.key.as_ref().and_then(|k| header.iter().position(|h| h == k));
    build(schema, rows, key_col, origin)
}

/// Reads a table against an existing schema, matching columns by name. The
/// class column may be absent; every other attribute must be present.
pub fn read_csv_with_schema(path: &Path, schema: &Schema) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| TicError::io(path, e))?;
    read_csv_with_schema_from(file, path, schema)
}

pub fn read_csv_with_schema_from(reader: impl Read, origin: &Path, schema: &Schema) -> Result<Dataset> {
    let (header, rows) = read_records(reader, origin)?;
    let mut columns = Vec::with_capacity(schema.len());
    for a in schema.attributes() {
        let col = header.iter().position(|h| *h == a.name);
        if col.is_none() && a.role == Role::Descriptive && a.kind != AttributeKind::Ignored {
            return Err(TicError::data(origin, format!("no column named `{}`", a.name)));
        }
        columns.push(col);
    }
    let key_col = schema.attributes().iter().zip(&columns).find(|(a, _)| a.role == Role::Key).and_then(|(_, c)| *c);
    let reordered: Vec<Vec<String>> = rows
        .into_iter()
        .map(|r| columns.iter().map(|c| c.map_or_else(String::new, |c| r[c].clone())).collect())
        .collect();
    let key_pos = key_col.and_then(|k| columns.iter().position(|c| *c == Some(k)));
    let named: Vec<(Option<String>, Vec<String>)> =
        reordered.into_iter().map(|r| (key_pos.map(|k| r[k].clone()), r)).collect();
    let examples = named
        .into_iter()
        .enumerate()
        .map(|(i, (name, r))| {
            let values = schema
                .attributes()
                .iter()
                .zip(&r)
                .map(|(a, s)| parse_cell(a, s).ok_or_else(|| bad_cell(origin, i, a, s)))
                .collect::<Result<Vec<_>>>()?;
            let e = Example::new(values);
            Ok(match name {
                Some(n) => e.with_name(n),
                None => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(schema.clone(), examples).map_err(|e| TicError::data(origin, e.to_string()))
}

fn bad_cell(origin: &Path, row: usize, a: &Attribute, s: &str) -> TicError {
    TicError::data(origin, format!("row {}: `{s}` is not a valid value of `{}`", row + 2, a.name))
}

fn parse_cell(a: &Attribute, s: &str) -> Option<Cell> {
    if is_missing(s) {
        return Some(Cell::Missing);
    }
    match &a.kind {
        AttributeKind::Ignored => Some(Cell::Missing),
        AttributeKind::Nominal(values) => values.iter().position(|v| v == s).map(|c| Cell::Code(c as u32)),
        AttributeKind::Numeric => match &a.labels {
            Some(labels) => match labels.iter().position(|v| v == s) {
                Some(c) => Some(Cell::Number(c as f64)),
                None => parse_number(s).map(Cell::Number),
            },
            None => parse_number(s).map(Cell::Number),
        },
    }
}

fn build(schema: Schema, rows: Vec<Vec<String>>, key_col: Option<usize>, origin: &Path) -> Result<Dataset> {
    let examples = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let values = schema
                .attributes()
                .iter()
                .zip(&r)
                .map(|(a, s)| parse_cell(a, s).ok_or_else(|| bad_cell(origin, i, a, s)))
                .collect::<Result<Vec<_>>>()?;
            let e = Example::new(values);
            Ok(match key_col {
                Some(k) => e.with_name(r[k].clone()),
                None => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(schema, examples).map_err(|e| TicError::data(origin, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, opts: &CsvOptions) -> Result<Dataset> {
        read_csv_from(text.as_bytes(), Path::new("t.csv"), opts)
    }

    #[test]
    fn infers_kinds_and_missing() {
        let opts = CsvOptions { class: Some("c".into()), ..Default::default() };
        let ds = parse("x,c\n1.5,b\n?,a\n,b\n", &opts).unwrap();
        let s = ds.schema();
        assert!(s.attributes()[0].is_numeric());
        assert_eq!(s.attributes()[1].kind, AttributeKind::Nominal(vec!["a".into(), "b".into()]));
        assert_eq!(s.class_index(), Some(1));
        assert_eq!(ds.value(0, 0), Cell::Number(1.5));
        assert!(ds.value(1, 0).is_missing() && ds.value(2, 0).is_missing());
        assert_eq!(ds.value(0, 1), Cell::Code(1));
    }

    #[test]
    fn rejects_ragged_rows_and_unknown_columns() {
        assert!(matches!(parse("x,y\n1\n", &CsvOptions::default()), Err(TicError::Data { .. })));
        let opts = CsvOptions { class: Some("nope".into()), ..Default::default() };
        assert!(matches!(parse("x\n1\n", &opts), Err(TicError::Data { .. })));
    }

    #[test]
    fn key_column_names_examples() {
        let opts = CsvOptions { key: Some("id".into()), ..Default::default() };
        let ds = parse("id,x\nm1,3\nm2,4\n", &opts).unwrap();
        assert_eq!(ds.example(1).name(), Some("m2"));
        assert!(ds.value(0, 0).is_missing());
    }

    #[test]
    fn reads_against_encoded_schema() {
        let opts = CsvOptions { class: Some("c".into()), ..Default::default() };
        let ds = tic_core::dataset::encode_nominals(&parse("x,c\n1,lo\n2,hi\n", &opts).unwrap());
        let again = read_csv_with_schema_from("x\n5\n".as_bytes(), Path::new("p.csv"), ds.schema()).unwrap();
        assert_eq!(again.value(0, 0), Cell::Number(5.0));
        assert!(again.value(0, 1).is_missing());
        let labeled = read_csv_with_schema_from("c,x\nlo,1\n".as_bytes(), Path::new("p.csv"), ds.schema()).unwrap();
        assert_eq!(labeled.value(0, 1), Cell::Number(1.0));
        assert!(read_csv_with_schema_from("c\nlo\n".as_bytes(), Path::new("p.csv"), ds.schema()).is_err());
    }
}
