//! CSV rows and the versioned JSON report.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::hunt::{HuntOutcome, HuntReport};
use super::pipeline::PipelineReport;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "report_v1";
pub const CSV_HEADER: [&str; 5] = ["t", "Sn", "delta_h_Sn", "sign", "flags"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hunt,
    Pipeline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub kind: ExperimentKind,
    pub version: String,
    pub config: ExperimentConfig,
    pub hunt: Option<HuntReport>,
    pub pipeline: Option<PipelineReport>,
}

impl ExperimentReport {
    pub fn hunt(config: &ExperimentConfig, report: HuntReport) -> Self {
        Self::new(ExperimentKind::Hunt, config, Some(report), None)
    }

    pub fn pipeline(config: &ExperimentConfig, report: PipelineReport) -> Self {
        Self::new(ExperimentKind::Pipeline, config, None, Some(report))
    }

    fn new(
        kind: ExperimentKind,
        config: &ExperimentConfig,
        hunt: Option<HuntReport>,
        pipeline: Option<PipelineReport>,
    ) -> Self {
        ExperimentReport {
            schema: REPORT_SCHEMA.into(),
            kind,
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            hunt,
            pipeline,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: ExperimentReport = serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::InvalidConfig(format!("unknown report schema {}", r.schema)));
        }
        Ok(r)
    }
}

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t: f64,
    #[serde(rename = "Sn")]
    pub sn: f64,
    pub delta_h_sn: f64,
    pub sign: i8,
    /// '|'-separated markers: refined, best_pos, best_neg, mean_value_violation
    pub flags: String,
}

/// Rows of a hunt: the main grid, then the refinement sub-grids.
pub fn hunt_rows(outcome: &HuntOutcome) -> Vec<CsvRow> {
    let rep = &outcome.report;
    let best = |sign: i8| rep.by_sign.iter().find(|b| b.sign == sign).map(|b| b.best_t);
    let (pos, neg) = (best(1), best(-1));
    let mut marked = (false, false);
    let mut out = Vec::with_capacity(outcome.rows.len() + outcome.refined.len());
    for (refined, row) in outcome.rows.iter().map(|r| (false, r)).chain(outcome.refined.iter().map(|r| (true, r))) {
        let mut flags = Vec::new();
        if refined {
            flags.push("refined");
        }
        // first occurrence of the best ordinate carries the marker
        if Some(row.t) == pos && !marked.0 && row.delta == rep.by_sign[0].best_value {
            flags.push("best_pos");
            marked.0 = true;
        }
        if Some(row.t) == neg && !marked.1 && -row.delta == rep.by_sign[1].best_value {
            flags.push("best_neg");
            marked.1 = true;
        }
        if !row.mean_value_holds(row.est_error) {
            flags.push("mean_value_violation");
        }
        out.push(CsvRow { t: row.t, sn: row.sn, delta_h_sn: row.delta, sign: rep.sign, flags: flags.join("|") });
    }
    out
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(CSV_HEADER).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            r.sn.to_string(),
            r.delta_h_sn.to_string(),
            r.sign.to_string(),
            r.flags.clone(),
        ])
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let header = r.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidConfig(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| Error::InvalidConfig(e.to_string()));
        out.push(CsvRow {
            t: num(0)?,
            sn: num(1)?,
            delta_h_sn: num(2)?,
            sign: rec[3].parse().map_err(|e: std::num::ParseIntError| Error::InvalidConfig(e.to_string()))?,
            flags: rec[4].to_string(),
        });
    }
    Ok(out)
}

/// Paths written by `emit_outputs`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub report: PathBuf,
}

/// Writes `rows.csv` and `report.json` into `dir`.
pub fn emit_outputs(dir: &Path, report: &ExperimentReport, rows: &[CsvRow]) -> Result<OutputPaths> {
    fs::create_dir_all(dir)?;
    let paths = OutputPaths { csv: dir.join("rows.csv"), report: dir.join("report.json") };
    write_csv(&paths.csv, rows)?;
    fs::write(&paths.report, report.to_json()? + "\n")?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_csv(&p, &[]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "t,Sn,delta_h_Sn,sign,flags\n");
        assert!(read_csv(&p).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let rows = vec![
            CsvRow { t: 15.848931924611133, sn: -0.1, delta_h_sn: 1e-17, sign: -1, flags: "refined|best_neg".into() },
            CsvRow { t: 16.0, sn: 0.3333333333333333, delta_h_sn: 0.0, sign: 1, flags: String::new() },
        ];
        write_csv(&p, &rows).unwrap();
        assert_eq!(read_csv(&p).unwrap(), rows);
    }
}
