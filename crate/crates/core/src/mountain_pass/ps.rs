//! Boundedness check for Palais–Smale candidates:
//! `‖u_n‖^p <= (c + 1 + ‖u_n‖) / (1/p - 1/θ)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{ComplexField, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsEntry {
    pub index: usize,
    pub level: f64,
    pub norm: f64,
    /// `‖u_n‖^p`.
    pub lhs: f64,
    /// `(c + 1 + ‖u_n‖) / (1/p - 1/θ)`.
    pub rhs: f64,
    pub slack: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsReport {
    pub entries: Vec<PsEntry>,
    pub violations: usize,
    pub min_slack: f64,
}

impl PsReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub fn ps_diagnostics(iterates: &[(ComplexField, f64)], problem: &Problem) -> Result<PsReport> {
    let (p, theta) = (problem.pp.p, problem.pp.theta);
    let gap = 1.0 / p - 1.0 / theta;
    let mut entries = Vec::with_capacity(iterates.len());
    for (index, (u, level)) in iterates.iter().enumerate() {
        let norm = problem.norm(u)?;
        let lhs = norm.powf(p);
        let rhs = (level + 1.0 + norm) / gap;
        let slack = rhs - lhs;
        entries.push(PsEntry {
            index,
            level: *level,
            norm,
            lhs,
            rhs,
            slack,
            violated: slack < 0.0,
        });
    }
    Ok(PsReport {
        violations: entries.iter().filter(|e| e.violated).count(),
        min_slack: entries.iter().map(|e| e.slack).fold(f64::INFINITY, f64::min),
        entries,
    })
}
