use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::BeliefSnapshot;

use super::ExperimentConfig;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Datum {
    Int(i64),
    Real(f64),
    Text(String),
    Missing,
}

impl Datum {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Datum::Int(i) => Some(*i as f64),
            Datum::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Inverse of `Display`: integers, then reals, then empty, then text.
    pub fn parse(s: &str) -> Datum {
        if s.is_empty() {
            Datum::Missing
        } else if let Ok(i) = s.parse::<i64>() {
            Datum::Int(i)
        } else if let Ok(r) = s.parse::<f64>() {
            Datum::Real(r)
        } else {
            Datum::Text(s.to_string())
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Int(i) => write!(f, "{i}"),
            Datum::Real(r) => write!(f, "{r}"),
            Datum::Text(s) => f.write_str(s),
            Datum::Missing => Ok(()),
        }
    }
}

impl From<f64> for Datum {
    fn from(v: f64) -> Self {
        Datum::Real(v)
    }
}

impl From<usize> for Datum {
    fn from(v: usize) -> Self {
        Datum::Int(v as i64)
    }
}

impl From<u32> for Datum {
    fn from(v: u32) -> Self {
        Datum::Int(i64::from(v))
    }
}

impl From<u64> for Datum {
    fn from(v: u64) -> Self {
        Datum::Int(v as i64)
    }
}

impl From<bool> for Datum {
    fn from(v: bool) -> Self {
        Datum::Int(i64::from(v))
    }
}

impl From<&str> for Datum {
    fn from(v: &str) -> Self {
        Datum::Text(v.to_string())
    }
}

impl From<String> for Datum {
    fn from(v: String) -> Self {
        Datum::Text(v)
    }
}

impl<T: Into<Datum>> From<Option<T>> for Datum {
    fn from(v: Option<T>) -> Self {
        v.map_or(Datum::Missing, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Datum>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// # Panics
    /// If the row width differs from the column count.
    pub fn push(&mut self, row: Vec<Datum>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; non-numeric cells are skipped.
    pub fn numbers(&self, column: &str) -> Vec<f64> {
        let Some(c) = self.column_index(column) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[c].as_f64()).collect()
    }

    /// First row whose `key` column displays as `value`.
    pub fn find(&self, key: &str, value: &str) -> Option<&[Datum]> {
        let c = self.column_index(key)?;
        self.rows.iter().find(|r| r[c].to_string() == value).map(Vec::as_slice)
    }

    pub fn value(&self, key: &str, value: &str, column: &str) -> Option<f64> {
        let c = self.column_index(column)?;
        self.find(key, value)?[c].as_f64()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlCurve {
    pub label: String,
    /// Mean KL per episode, episode 1 first.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub label: String,
    pub snapshot: BeliefSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminationStats {
    pub label: String,
    pub per_seed: Vec<Option<u32>>,
    pub min: Option<u32>,
    pub max: Option<u32>,
    pub avg: Option<f64>,
}

impl TerminationStats {
    pub fn from_episodes(label: &str, per_seed: Vec<Option<u32>>) -> Self {
        let done: Vec<u32> = per_seed.iter().flatten().copied().collect();
        Self {
            label: label.to_string(),
            min: done.iter().copied().min(),
            max: done.iter().copied().max(),
            avg: (!done.is_empty()).then(|| done.iter().map(|&e| f64::from(e)).sum::<f64>() / done.len() as f64),
            per_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub environment: String,
    pub version: String,
}

impl Provenance {
    pub fn new(config: &ExperimentConfig, environment: &str) -> Self {
        Self {
            config: config.clone(),
            config_hash: config.hash(),
            environment: environment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub study: String,
    pub provenance: Provenance,
    pub tables: Vec<Table>,
    pub kl_curves: Vec<KlCurve>,
    pub heatmaps: Vec<Heatmap>,
    pub terminations: Vec<TerminationStats>,
}

impl ExperimentReport {
    pub fn new(study: &str, provenance: Provenance) -> Self {
        Self {
            study: study.to_string(),
            provenance,
            tables: Vec::new(),
            kl_curves: Vec::new(),
            heatmaps: Vec::new(),
            terminations: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_display_parse_round_trip() {
        for d in [
            Datum::Int(-3),
            Datum::Real(0.125),
            Datum::Real(1e-7),
            Datum::Text("adaptive@15".into()),
            Datum::Missing,
        ] {
            let s = d.to_string();
            assert_eq!(Datum::parse(&s).to_string(), s);
        }
        assert_eq!(Datum::parse("2"), Datum::Int(2));
    }

    #[test]
    fn termination_stats() {
        let s = TerminationStats::from_episodes("u", vec![Some(40), None, Some(50)]);
        assert_eq!((s.min, s.max, s.avg), (Some(40), Some(50), Some(45.0)));
        let none = TerminationStats::from_episodes("u", vec![None]);
        assert_eq!(none.avg, None);
    }

    #[test]
    fn table_lookup() {
        let mut t = Table::new("x", &["planner", "distance"]);
        t.push(vec!["pks".into(), 3.5.into()]);
        assert_eq!(t.value("planner", "pks", "distance"), Some(3.5));
        assert_eq!(t.numbers("distance"), vec![3.5]);
        assert!(t.find("planner", "ltos").is_none());
    }
}
