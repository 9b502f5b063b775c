//! Fixed-format CSV tables and the JSON manifest written next to them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::audit::ScalingReport;
use crate::config::ExperimentConfig;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::experiments::{AcReport, ConservationReport, NormRow, SigmaLimitReport, VBoundReport};

/// Seventeen significant digits, so every `f64` round-trips.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::LengthMismatch {
                expected: self.columns.len(),
                actual: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonPolicy {
    /// The `ε` in every `1/2 + ε` and `−1/2 + ε` modulation exponent.
    pub exponent: f64,
    /// Exponent of the local step rule.
    pub local_step_exponent: String,
}

impl EpsilonPolicy {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            exponent: cfg.eps_exponent,
            local_step_exponent: "-4/3-0.01".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub experiment: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    /// SHA-256 of the canonical config text, framed as a git blob.
    pub config_hash: String,
    pub epsilon_policy: EpsilonPolicy,
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

/// Hex SHA-256 of `"blob <len>\0" + text`.
pub fn content_hash(text: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", text.len()).as_bytes());
    h.update(text.as_bytes());
    hex::encode(h.finalize())
}

impl Manifest {
    pub fn new(
        experiment: &str,
        cfg: &ExperimentConfig,
        outputs: &[&str],
        summary: &impl Serialize,
    ) -> Result<Self> {
        Ok(Self {
            experiment: experiment.to_string(),
            seed: cfg.seed,
            config: cfg.resolved(),
            config_hash: content_hash(&cfg.canonical_text()),
            epsilon_policy: EpsilonPolicy::from_config(cfg),
            outputs: outputs.iter().map(|o| o.to_string()).collect(),
            summary: serde_json::to_value(summary)?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes each `(file name, contents)` pair and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, files: &[(&str, String)], manifest: &Manifest) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    fs::write(dir.join("manifest.json"), manifest.to_json()?)?;
    Ok(())
}

/// Columns `t, x, re_u, im_u, v` over the recorded frames.
pub fn trajectory_table(traj: &Trajectory) -> Result<Table> {
    let mut t = Table::new(&["t", "x", "re_u", "im_u", "v"]);
    let xs = traj.u.grid().points();
    for (j, (u, v)) in traj.u.frames().iter().zip(traj.v.frames()).enumerate() {
        let time = traj.u.lattice().time(j);
        for ((x, a), b) in xs.iter().zip(u.samples()).zip(v.samples()) {
            t.push(vec![
                time.into(),
                (*x).into(),
                a.re.into(),
                a.im.into(),
                b.re.into(),
            ])?;
        }
    }
    Ok(t)
}

pub fn conservation_table(r: &ConservationReport) -> Result<Table> {
    let mut t = Table::new(&["step", "t", "mass_drift", "v_imag_defect"]);
    for s in &r.samples {
        t.push(vec![
            s.step.into(),
            s.time.into(),
            s.mass_drift.into(),
            s.v_imag_defect.into(),
        ])?;
    }
    Ok(t)
}

pub fn ac_table(r: &AcReport) -> Result<Table> {
    let mut t = Table::new(&[
        "N",
        "delta",
        "s",
        "energy_initial",
        "delta_e_endpoint",
        "delta_e_quadrature",
        "relative_mismatch",
    ]);
    for row in &r.rows {
        t.push(vec![
            row.n.into(),
            r.delta.into(),
            r.s.into(),
            row.energy_initial.into(),
            row.delta_endpoint.into(),
            row.delta_quadrature.into(),
            row.relative_mismatch.into(),
        ])?;
    }
    Ok(t)
}

pub fn sigma_table(r: &SigmaLimitReport) -> Result<Table> {
    let mut t = Table::new(&["sigma", "error", "ratio"]);
    for row in &r.rows {
        t.push(vec![row.sigma.into(), row.error.into(), row.ratio.into()])?;
    }
    Ok(t)
}

pub fn v_bound_table(r: &VBoundReport) -> Result<Table> {
    let mut t = Table::new(&["step", "t", "v_norm", "modulus_sq_norm"]);
    for s in &r.samples {
        t.push(vec![
            s.step.into(),
            s.time.into(),
            s.v_norm.into(),
            s.modulus_sq_norm.into(),
        ])?;
    }
    Ok(t)
}

/// Columns `norm_kind, s, b, dispersion, window_T, value`.
pub fn norms_table(rows: &[NormRow]) -> Result<Table> {
    let mut t = Table::new(&["norm_kind", "s", "b", "dispersion", "window_T", "value"]);
    for r in rows {
        t.push(vec![
            r.kind.as_str().into(),
            r.s.into(),
            r.b.into(),
            r.dispersion.map_or(Cell::Empty, |d| d.name().into()),
            r.window.into(),
            r.value.into(),
        ])?;
    }
    Ok(t)
}

pub fn audit_table(r: &ScalingReport) -> Result<Table> {
    let mut t = Table::new(&["family", "k", "s", "N", "lhs", "rhs1", "rhs2", "ratio"]);
    for (j, &n) in r.ns.iter().enumerate() {
        t.push(vec![
            r.family.id().into(),
            r.k_exact.as_str().into(),
            r.s_exact.as_str().into(),
            (n as usize).into(),
            r.lhs[j].into(),
            r.rhs1[j].into(),
            r.rhs2[j].into(),
            (r.lhs[j] / (r.rhs1[j] * r.rhs2[j])).into(),
        ])?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.1), "-1.0000000000000001e-1");
        let x = std::f64::consts::PI * 1e-7;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn table_rejects_ragged_rows() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0.into(), Cell::Empty]).unwrap();
        assert!(t.push(vec![1.0.into()]).is_err());
        assert_eq!(t.to_csv(), "a,b\n1.0000000000000000e0,\n");
    }

    #[test]
    fn hash_matches_git_blob_framing() {
        // `printf 'hello\n' | git hash-object --stdin` under SHA-256 object format
        assert_eq!(
            content_hash("hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }

    #[test]
    fn manifest_embeds_config_and_policy() {
        let cfg = ExperimentConfig::parse("seed = 9\neps.exponent = 0.02\n").unwrap();
        let m = Manifest::new(
            "simulate",
            &cfg,
            &["report.csv"],
            &serde_json::json!({"x": 1}),
        )
        .unwrap();
        let json = m.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["seed"], 9);
        assert_eq!(v["config"]["seed"], "9");
        assert_eq!(v["epsilon_policy"]["exponent"], 0.02);
        assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
        assert_eq!(
            json,
            Manifest::new(
                "simulate",
                &cfg,
                &["report.csv"],
                &serde_json::json!({"x": 1})
            )
            .unwrap()
            .to_json()
            .unwrap()
        );
    }
}
