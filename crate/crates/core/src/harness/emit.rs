use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Datum, ExperimentReport, HarnessError, Result, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(HarnessError::Config(format!(
                "unknown format `{other}`, expected csv|json"
            ))),
        }
    }
}

pub fn table_to_csv(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(ToString::to_string))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv_table(name: &str, text: &str) -> Result<Table> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut table = Table {
        name: name.to_string(),
        columns,
        rows: Vec::new(),
    };
    for rec in r.records() {
        table.rows.push(rec?.iter().map(Datum::parse).collect());
    }
    Ok(table)
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::write(&path, bytes).map_err(|source| HarnessError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes the report under `dir` and returns the files created.
///
/// CSV writes one `<study>_<table>.csv` per table plus
/// `<study>_provenance.json`; JSON writes the whole report as
/// `<study>.json`. Belief heatmaps always go to `<study>_heatmaps.json`.
pub fn emit(report: &ExperimentReport, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    let stem = report.study.replace(' ', "_");
    let mut files = Vec::new();
    match format {
        OutputFormat::Csv => {
            for t in &report.tables {
                let p = dir.join(format!("{stem}_{}.csv", t.name));
                files.push(write(p, table_to_csv(t)?.as_bytes())?);
            }
            let p = dir.join(format!("{stem}_provenance.json"));
            files.push(write(p, &serde_json::to_vec_pretty(&report.provenance)?)?);
        }
        OutputFormat::Json => {
            let p = dir.join(format!("{stem}.json"));
            files.push(write(p, &serde_json::to_vec_pretty(report)?)?);
        }
    }
    if !report.heatmaps.is_empty() {
        let p = dir.join(format!("{stem}_heatmaps.json"));
        files.push(write(p, &serde_json::to_vec_pretty(&report.heatmaps)?)?);
    }
    Ok(files)
}
