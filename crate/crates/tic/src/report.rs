//! Text tables and JSON documents for runs and experiments.

use std::fmt::Write;

use serde::Serialize;
use tic_core::eval::{FoldMean, MultiAttributeTable};
use tic_core::EvalReport;

use crate::run::{MissingInfoResult, SweepRow, Trained};

pub const REPORT_FORMAT: &str = "tic-report/1";

fn pct(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{:.1}%", 100.0 * v))
}

fn real(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.4}"))
}

fn mean(m: Option<FoldMean>, as_pct: bool) -> String {
    match m {
        Some(m) if as_pct => format!("{} over {} folds", pct(Some(m.mean)), m.folds),
        Some(m) => format!("{:.4} over {} folds", m.mean, m.folds),
        None => "-".into(),
    }
}

fn header(out: &mut String, title: &str, echo: &[(String, String)]) {
    let _ = writeln!(out, "# {title}");
    for (k, v) in echo {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push('\n');
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    format: &'static str,
    kind: &'a str,
    config: serde_json::Map<String, serde_json::Value>,
    result: &'a T,
}

/// JSON document with the config echo and the result.
pub fn structured<T: Serialize>(kind: &str, echo: &[(String, String)], result: &T) -> String {
    let config = echo.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
    let doc = Document { format: REPORT_FORMAT, kind, config, result };
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

pub fn train_text(t: &Trained, echo: &[(String, String)]) -> String {
    let mut out = String::new();
    header(&mut out, "tic train", echo);
    let _ = writeln!(out, "training examples    {}", t.n_train);
    let _ = writeln!(out, "validation examples  {}", t.n_valid);
    let _ = writeln!(out, "nodes before pruning {}", t.unpruned_nodes);
    let _ = writeln!(out, "nodes                {}", t.tree.node_count());
    let _ = writeln!(out, "leaves               {}", t.tree.leaves().count());
    let _ = writeln!(out, "training accuracy    {}", pct(t.training.accuracy));
    let _ = writeln!(out, "training RE          {}", real(t.training.relative_error));
    out.push('\n');
    out.push_str(&t.tree.render());
    out
}

pub fn xval_text(r: &EvalReport, echo: &[(String, String)]) -> String {
    let mut out = String::new();
    header(&mut out, "tic xval", echo);
    let _ = writeln!(out, "accuracy            {}", mean(r.accuracy, true));
    let _ = writeln!(out, "relative error      {}", mean(r.relative_error, false));
    let _ = writeln!(out, "nodes               {}", mean(r.nodes, false));
    let _ = writeln!(out, "unpruned accuracy   {}", mean(r.unpruned_accuracy, true));
    let _ = writeln!(out, "unpruned nodes      {}", mean(r.unpruned_nodes, false));
    out.push('\n');
    let _ = writeln!(
        out,
        "{:>5} {:>6} {:>6} {:>5} {:>9} {:>8} {:>6}",
        "fold", "train", "valid", "test", "accuracy", "RE", "nodes"
    );
    for f in &r.folds {
        let s = f.final_scores();
        let _ = writeln!(
            out,
            "{:>5} {:>6} {:>6} {:>5} {:>9} {:>8} {:>6}",
            f.fold,
            f.n_train,
            f.n_valid,
            f.n_test,
            pct(s.accuracy),
            real(s.relative_error),
            s.nodes
        );
    }
    out
}

pub fn multi_attribute_text(table: &MultiAttributeTable, echo: &[(String, String)]) -> String {
    let mut out = String::new();
    header(&mut out, "tic experiment multi_attribute", echo);
    let width = table.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(9);
    let _ = writeln!(out, "{:<width$} {:>9} {:>9} {:>6}", "attribute", "accuracy", "default", "tested");
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{:<width$} {:>9} {:>9} {:>6}",
            r.name,
            pct(r.accuracy()),
            pct(r.default_accuracy()),
            r.total
        );
    }
    let _ = writeln!(out, "{:<width$} {:>9} {:>9}", "mean", pct(table.mean_accuracy()), pct(table.mean_default()));
    let beats = table.rows.iter().filter(|r| r.accuracy() >= r.default_accuracy()).count();
    let _ = writeln!(out, "\n{beats} of {} attributes at or above default", table.rows.len());
    out
}

pub fn sweep_text(rows: &[SweepRow], echo: &[(String, String)]) -> String {
    let mut out = String::new();
    header(&mut out, "tic experiment pruning_sweep", echo);
    let _ = writeln!(
        out,
        "{:>9} {:>10} {:>10} {:>10} {:>10}",
        "fraction", "acc before", "acc after", "nodes bef", "nodes aft"
    );
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{:>9} {:>10} {:>10} {:>10} {:>10}",
            format!("{:.2}", row.validation_fraction),
            pct(r.unpruned_accuracy.map(|m| m.mean)),
            pct(r.accuracy.map(|m| m.mean)),
            real(r.unpruned_nodes.map(|m| m.mean)),
            real(r.nodes.map(|m| m.mean)),
        );
    }
    out
}

pub fn missing_info_text(res: &MissingInfoResult, echo: &[(String, String)]) -> String {
    let mut out = String::new();
    header(&mut out, "tic experiment missing_info", echo);
    let _ = write!(out, "{:>9}", "available");
    for l in &res.labels {
        let _ = write!(out, " {l:>12}");
    }
    out.push('\n');
    for (level, row) in res.table.levels.iter().zip(&res.table.cells) {
        let _ = write!(out, "{:>9}", format!("{:.0}%", 100.0 * level));
        for cell in row {
            let _ = write!(out, " {:>12}", pct(cell.map(|m| m.mean)));
        }
        out.push('\n');
    }
    out
}
