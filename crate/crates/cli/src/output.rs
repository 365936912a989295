//! Report emission: one pretty-printed JSON document per run, or a CSV
//! table for the scan-family commands, optionally copied to a file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;

/// The single document every subcommand produces.  Apart from
/// `wall_ms`, identical arguments and seed yield identical bytes.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Value,
    pub pass: bool,
    pub wall_ms: f64,
}

/// Rows for the fixed-header CSV rendering of a report.
pub struct CsvTable {
    pub rows: Vec<[String; 5]>,
}

pub const CSV_HEADER: &str = "case,member_id,radius,min_ReD,angle";

/// Quote a field if it holds a comma or quote (member ids often do).
fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn render_csv(table: &CsvTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn emit(
    report: &Report,
    table: Option<CsvTable>,
    want_csv: bool,
    copy_to: Option<&Path>,
) -> Result<()> {
    let document = if want_csv {
        match table {
            Some(t) => render_csv(&t),
            None => bail!("this command has no CSV rendering; drop --csv"),
        }
    } else {
        let mut s = serde_json::to_string_pretty(report)?;
        s.push('\n');
        s
    };
    print!("{document}");
    if let Some(path) = copy_to {
        std::fs::write(path, &document)
            .with_context(|| format!("writing report copy to {}", path.display()))?;
    }
    Ok(())
}
