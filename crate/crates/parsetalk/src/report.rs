//! Tabular and plottable renderings of a [`MetricsTable`].

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::harness::{Check, MetricsTable};

pub const CSV_HEADER: [&str; 9] = [
    "sentence_id",
    "tokens",
    "system",
    "syntax_checks",
    "concept_checks",
    "backtracks",
    "skipped",
    "complete",
    "wall_ms",
];

pub const CSV_FILE: &str = "metrics.csv";
pub const PLOTDATA_FILE: &str = "plotdata.json";

/// One row per cell; every field of an absent cell after `system` is empty.
pub fn write_csv<W: Write>(table: &MetricsTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for c in &table.cells {
        let mut row = vec![
            c.sentence_id.to_string(),
            c.tokens.to_string(),
            c.system.id().to_string(),
        ];
        match &c.record {
            Some(m) => row.extend([
                m.syntax_checks.to_string(),
                m.concept_checks.to_string(),
                m.backtrack_events.to_string(),
                m.skipped_tokens.to_string(),
                m.complete.to_string(),
                m.wall_time_ms.map(|w| w.to_string()).unwrap_or_default(),
            ]),
            None => row.extend(std::iter::repeat_n(String::new(), 6)),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub check: &'static str,
    pub system: &'static str,
    pub x: Vec<usize>,
    /// `null` where the system produced no result.
    pub y: Vec<Option<u64>>,
}

/// One series per system and check type, x = sentence id, y = call count.
pub fn plotdata(table: &MetricsTable) -> Vec<Series> {
    let ids = table.sentence_ids();
    let mut out = Vec::new();
    for check in Check::ALL {
        for &system in &table.systems {
            out.push(Series {
                check: check.id(),
                system: system.id(),
                x: ids.clone(),
                y: ids
                    .iter()
                    .map(|&id| table.cell(id, system)?.record.as_ref().map(|m| check.of(m)))
                    .collect(),
            });
        }
    }
    out
}

/// Writes `metrics.csv` and `plotdata.json` into `dir`, creating it.
pub fn write_reports(table: &MetricsTable, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut csv_bytes = Vec::new();
    write_csv(table, &mut csv_bytes).map_err(io::Error::other)?;
    fs::write(dir.join(CSV_FILE), csv_bytes)?;
    let json = serde_json::to_string_pretty(&plotdata(table)).map_err(io::Error::other)?;
    fs::write(dir.join(PLOTDATA_FILE), json + "\n")
}
