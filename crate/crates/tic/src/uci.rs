//! Readers for the raw UCI soybean files.
//!
//! `soybean-small.data` lists 35 attribute codes followed by the class
//! (`D1`..`D4`); `soybean-large.data` puts the class first. `?` marks a
//! missing value. Attribute values are small integer codes, declared as
//! nominal attributes whose value lists are the codes in numeric order, so
//! that encoding them keeps the original numbers.

use std::fs;
use std::path::Path;

use tic_core::{Attribute, Cell, Dataset, Example, Role, Schema};

use crate::error::{Result, TicError};

pub const SOYBEAN_ATTRIBUTES: [&str; 35] = [
    "date",
    "plant_stand",
    "precip",
    "temp",
    "hail",
    "crop_hist",
    "area_damaged",
    "severity",
    "seed_tmt",
    "germination",
    "plant_growth",
    "leaves",
    "leafspots_halo",
    "leafspots_marg",
    "leafspot_size",
    "leaf_shread",
    "leaf_malf",
    "leaf_mild",
    "stem",
    "lodging",
    "stem_cankers",
    "canker_lesion",
    "fruiting_bodies",
    "external_decay",
    "mycelium",
    "int_discolor",
    "sclerotia",
    "fruit_pods",
    "fruit_spots",
    "seed",
    "mold_growth",
    "seed_discolor",
    "seed_size",
    "shriveling",
    "roots",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassColumn {
    First,
    Last,
}

pub fn read_soybean(path: &Path, class_at: ClassColumn) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| TicError::io(path, e))?;
    parse_soybean(&text, path, class_at)
}

pub fn parse_soybean(text: &str, path: &Path, class_at: ClassColumn) -> Result<Dataset> {
    let n_attr = SOYBEAN_ATTRIBUTES.len();
    let mut rows: Vec<(String, Vec<Option<u32>>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n_attr + 1 {
            return Err(TicError::data(
                path,
                format!("line {}: {} fields, expected {}", i + 1, fields.len(), n_attr + 1),
            ));
        }
        let (class, values) = match class_at {
            ClassColumn::First => (fields[0], &fields[1..]),
            ClassColumn::Last => (fields[n_attr], &fields[..n_attr]),
        };
        let values = values
            .iter()
            .map(|v| match *v {
                "?" => Ok(None),
                v => v
                    .parse::<u32>()
                    .map(Some)
                    .map_err(|_| TicError::data(path, format!("line {}: `{v}` is not an attribute code", i + 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((class.to_string(), values));
    }
    if rows.is_empty() {
        return Err(TicError::data(path, "no examples"));
    }
    let mut classes: Vec<String> = rows.iter().map(|(c, _)| c.clone()).collect();
    classes.sort();
    classes.dedup();
    let mut attrs: Vec<Attribute> = (0..n_attr)
        .map(|k| {
            let max = rows.iter().filter_map(|(_, v)| v[k]).max().unwrap_or(0);
            Attribute::nominal(SOYBEAN_ATTRIBUTES[k], (0..=max).map(|c| c.to_string()))
        })
        .collect();
    attrs.push(Attribute::nominal("class", classes.clone()).with_role(Role::Class));
    let schema = Schema::new(attrs).map_err(|e| TicError::data(path, e.to_string()))?;
    let examples = rows
        .into_iter()
        .map(|(class, values)| {
            let mut cells: Vec<Cell> = values.into_iter().map(|v| v.map_or(Cell::Missing, Cell::Code)).collect();
            cells.push(Cell::Code(classes.iter().position(|c| *c == class).unwrap_or(0) as u32));
            Example::new(cells)
        })
        .collect();
    Dataset::new(schema, examples).map_err(|e| TicError::data(path, e.to_string()))
}
