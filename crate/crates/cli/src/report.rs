//! Result documents written by `solve` and `oracle` and read by `verify`.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use gencol::{Configuration, DualPotentials, SolveReport, SparsePlan};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iter: u64,
    pub objective: f64,
    pub omega_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub beta: f64,
    pub rule: String,
    pub max_iter: u64,
    pub tol: Option<f64>,
    pub init: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    /// `gencol` or `oracle`.
    pub solver: String,
    pub objective: f64,
    /// `[indices, mass]` pairs in lexicographic order.
    pub plan: Vec<(Vec<usize>, f64)>,
    #[serde(default)]
    pub potentials: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectory: Vec<TrajectoryPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunSettings>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical invocations.
    #[serde(default)]
    pub timestamp: u64,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

pub fn plan_entries(plan: &SparsePlan<f64>) -> Vec<(Vec<usize>, f64)> {
    plan.iter().map(|(r, m)| (r.indices().to_vec(), m)).collect()
}

impl ResultFile {
    pub fn from_report(report: &SolveReport<f64>, settings: RunSettings) -> Self {
        ResultFile {
            solver: "gencol".into(),
            objective: report.objective,
            plan: plan_entries(&report.final_plan),
            potentials: report.final_potentials.axes().to_vec(),
            trajectory: report
                .objective_trajectory
                .iter()
                .zip(&report.active_set_sizes)
                .map(|(&(iter, objective), &omega_size)| TrajectoryPoint {
                    iter,
                    objective,
                    omega_size,
                })
                .collect(),
            termination: Some(report.termination.name().into()),
            certificate: Some(report.certificate.name().into()),
            seed: Some(report.rng_seed),
            config: Some(settings),
            timestamp: now(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input {
            file: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
        })
    }

    pub fn sparse_plan(&self) -> gencol::Result<SparsePlan<f64>> {
        SparsePlan::new(
            self.plan
                .iter()
                .map(|(r, m)| (Configuration::from(r.clone()), *m)),
        )
    }

    pub fn dual_potentials(&self) -> Option<DualPotentials<f64>> {
        (!self.potentials.is_empty()).then(|| DualPotentials::new(self.potentials.clone()))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_default();
    s.push('\n');
    s
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut s = String::from("iter,objective,omega_size\n");
    for p in points {
        s.push_str(&format!("{},{},{}\n", p.iter, p.objective, p.omega_size));
    }
    s
}
