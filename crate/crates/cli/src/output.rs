//! Run artifacts: measurement CSV, JSON report, manifest and plot script.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

/// One CSV row, `t,quantity,a,b,p,value,flag`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub t: f64,
    pub quantity: String,
    pub a: f64,
    pub b: u32,
    pub p: f64,
    pub value: f64,
    pub flag: &'static str,
}

pub const CSV_HEADER: &str = "t,quantity,a,b,p,value,flag";

/// Shortest decimal that round-trips; `Debug` switches to exponent notation
/// for very small and very large magnitudes.
fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

pub fn csv(rows: &[Measurement]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", num(r.t), r.quantity, num(r.a), r.b, num(r.p), num(r.value), r.flag);
    }
    s
}

/// A slope fit against a predicted exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRecord {
    pub spec: String,
    pub window: (f64, f64),
    pub slope: f64,
    pub r2: f64,
    pub predicted: f64,
    pub pass: bool,
    pub anchor: &'static str,
}

/// A scalar measurement compared with a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub pass: bool,
    pub anchor: &'static str,
}

impl CheckRecord {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64, anchor: &'static str) -> Self {
        Self { name: name.into(), value, threshold, relation: "<=", pass: value <= threshold, anchor }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64, anchor: &'static str) -> Self {
        Self { name: name.into(), value, threshold, relation: ">=", pass: value >= threshold, anchor }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    pub pass: bool,
    pub fits: Vec<FitRecord>,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.into(), ..Default::default() }
    }

    /// Sets `pass` from the individual records; an empty report fails.
    pub fn finish(mut self) -> Self {
        let n = self.fits.len() + self.checks.len();
        self.pass = n > 0 && self.fits.iter().all(|f| f.pass) && self.checks.iter().all(|c| c.pass);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: &'static str,
    pub threads: usize,
    pub wall_seconds: f64,
    pub exit_code: i32,
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Log-log plot of every (quantity, a, b, p) series in measurements.csv."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "measurements.csv"
series = defaultdict(list)
with open(path) as f:
    for row in csv.DictReader(f):
        t, v = float(row["t"]), float(row["value"])
        if t > 0 and v > 0:
            series[(row["quantity"], row["a"], row["b"], row["p"])].append((t, v))

fig, ax = plt.subplots()
for (q, a, b, p), pts in sorted(series.items()):
    pts.sort()
    ax.loglog([x for x, _ in pts], [y for _, y in pts], marker=".", label=f"{q} a={a} b={b} p={p}")
ax.set_xlabel("t")
ax.set_ylabel("value")
ax.legend(fontsize="small")
fig.savefig("measurements.png", dpi=150)
"#;

/// Writes `measurements.csv`, `report.json` and `plot.py` into `dir`.
pub fn write_artifacts(dir: &Path, rows: &[Measurement], report: &Report) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("measurements.csv"), csv(rows))?;
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(report)?)?;
    fs::write(dir.join("plot.py"), PLOT_SCRIPT)?;
    Ok(())
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(manifest)?)
}
