//! Versioned JSON, CSV tables and plot descriptions for experiment results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::footprint::FootprintReport;
use super::long_tail::LongTailReport;
use super::sweep::SweepReport;
use crate::error::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub format: String,
    pub version: u32,
    pub result: T,
}

pub fn envelope<T>(format: &str, result: T) -> Envelope<T> {
    Envelope { format: format.into(), version: REPORT_VERSION, result }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// `linear` or `log2`.
    pub x_scale: String,
    pub series: Vec<Series>,
}

pub fn footprint_csv(report: &FootprintReport) -> String {
    let mut out = String::from("method,footprint,mean_auc,evaluated\n");
    for r in &report.rows {
        let _ = writeln!(out, "{},{},{:.6},{}", r.method, r.footprint, r.mean_auc, r.evaluated);
    }
    out
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("method,mean_auc,std_auc,users\n");
    for r in &report.rows {
        let _ = writeln!(out, "\"{}\",{:.6},{:.6},{}", r.method, r.mean_auc, r.std_auc, r.users);
    }
    out
}

pub fn footprint_cdf_csv(report: &LongTailReport) -> String {
    let mut out = String::from("population,footprint,cumulative_fraction\n");
    for (name, cdf) in [("all", &report.footprint_cdf_all), ("event", &report.footprint_cdf_event)] {
        for (size, frac) in cdf {
            let _ = writeln!(out, "{name},{size},{frac:.6}");
        }
    }
    out
}

pub fn footprint_chart(report: &FootprintReport) -> Chart {
    Chart {
        title: "Mean AUC by reduced footprint size".into(),
        x_label: "footprint size".into(),
        y_label: "mean AUC".into(),
        x_scale: "log2".into(),
        series: report
            .methods()
            .into_iter()
            .map(|m| {
                let curve = report.curve(m);
                Series {
                    label: m.to_string(),
                    x: curve.iter().map(|(f, _)| *f as f64).collect(),
                    y: curve.iter().map(|(_, a)| *a).collect(),
                }
            })
            .collect(),
    }
}

pub fn footprint_cdf_chart(report: &LongTailReport) -> Chart {
    let series = |label: &str, cdf: &[(usize, f64)]| Series {
        label: label.into(),
        x: cdf.iter().map(|(s, _)| *s as f64).collect(),
        y: cdf.iter().map(|(_, f)| *f).collect(),
    };
    Chart {
        title: "Footprint size distribution".into(),
        x_label: "footprint size".into(),
        y_label: "cumulative fraction of artists".into(),
        x_scale: "linear".into(),
        series: vec![
            series("all artists", &report.footprint_cdf_all),
            series("event artists", &report.footprint_cdf_event),
        ],
    }
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, format: &str, result: &T) -> Result<()> {
    write(path, &(serde_json::to_string_pretty(&envelope(format, result))? + "\n"))
}

/// Writes `<stem>.json`, `<stem>.csv` and `<stem>.plot.json` into `dir`.
pub fn write_footprint(dir: &Path, stem: &str, report: &FootprintReport) -> Result<()> {
    write_json(&dir.join(format!("{stem}.json")), "footprint-experiment", report)?;
    write(&dir.join(format!("{stem}.csv")), &footprint_csv(report))?;
    write_json(&dir.join(format!("{stem}.plot.json")), "plot", &vec![footprint_chart(report)])
}

pub fn write_long_tail(dir: &Path, stem: &str, report: &LongTailReport) -> Result<()> {
    write_json(&dir.join(format!("{stem}.json")), "long-tail", report)?;
    write(&dir.join(format!("{stem}.csv")), &footprint_cdf_csv(report))?;
    write_json(&dir.join(format!("{stem}.plot.json")), "plot", &vec![footprint_cdf_chart(report)])
}

pub fn write_sweep(dir: &Path, stem: &str, report: &SweepReport) -> Result<()> {
    write_json(&dir.join(format!("{stem}.json")), "fusion-sweep", report)?;
    write(&dir.join(format!("{stem}.csv")), &sweep_csv(report))
}
