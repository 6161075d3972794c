//! Magnetic potential `A`, electric potential `V` and critical weight `K`.

use serde::{Deserialize, Serialize};

use super::complex_field::VectorSample;
use super::grid::Grid;
use super::params::{validate_tau, ProblemParams};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MagneticPreset {
    Zero,
    /// A constant vector (pure gauge).
    Constant { a: Vec<f64> },
    /// Symmetric gauge of a uniform field `b` along x3: `A = (b/2)(-x2, x1, 0)`.
    Symmetric { b: f64 },
}

impl MagneticPreset {
    /// `A(0)`, padded to three components.
    pub fn at_origin(&self) -> [f64; 3] {
        match self {
            MagneticPreset::Constant { a } => {
                let mut out = [0.0; 3];
                for (o, v) in out.iter_mut().zip(a) {
                    *o = *v;
                }
                out
            }
            _ => [0.0; 3],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MagneticPreset::Zero | MagneticPreset::Constant { .. })
    }

    pub fn sample(&self, grid: &Grid) -> Result<VectorSample> {
        if grid.is_radial() && !matches!(self, MagneticPreset::Zero) {
            return Err(invalid(
                "radial grids carry no vector potential; use a Cartesian grid or apply the gauge \
                 reduction for constant A",
            ));
        }
        match self {
            MagneticPreset::Zero => Ok(VectorSample::zeros(grid)),
            MagneticPreset::Constant { a } => {
                if a.len() != grid.axes() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.axes(),
                        got: a.len(),
                    });
                }
                let c = self.at_origin();
                VectorSample::from_fn(grid, move |_| c)
            }
            MagneticPreset::Symmetric { b } => {
                if grid.axes() < 2 {
                    return Err(invalid("the symmetric gauge needs at least two dimensions"));
                }
                let b = *b;
                VectorSample::from_fn(grid, move |x| [-0.5 * b * x[1], 0.5 * b * x[0], 0.0])
            }
        }
    }
}

/// Piecewise-linear radial profile, constant beyond its last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialTable {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.len() != self.values.len() {
            return Err(invalid("radial table needs matching, nonempty radii and values"));
        }
        if self.radii[0] != 0.0 || self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("radial table radii must start at 0 and increase"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("radial table values must be finite"));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        let j = self.radii.partition_point(|&x| x <= r);
        if j >= self.radii.len() {
            return *self.values.last().unwrap();
        }
        let (r0, r1) = (self.radii[j - 1], self.radii[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElectricPreset {
    Constant { v0: f64 },
    /// `V = v0 + ω²|x|²`.
    Harmonic { v0: f64, omega: f64 },
    Tabulated { table: RadialTable },
}

impl ElectricPreset {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ElectricPreset::Constant { v0 } => *v0,
            ElectricPreset::Harmonic { v0, omega } => v0 + omega * omega * r * r,
            ElectricPreset::Tabulated { table } => table.eval(r),
        }
    }

    /// The declared infimum `V_0`.
    pub fn v0(&self) -> f64 {
        match self {
            ElectricPreset::Constant { v0 } | ElectricPreset::Harmonic { v0, .. } => *v0,
            ElectricPreset::Tabulated { table } => {
                table.values.iter().copied().fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CriticalWeightPreset {
    /// `K ≡ k_sup`.
    Flat { k_sup: f64 },
    /// `K = k_sup / (1 + κ|x|^τ)`, flat of order `τ` at the origin.
    PowerDip { k_sup: f64, kappa: f64 },
    /// Radial table; `K(0)` is its first value.
    Tabulated { table: RadialTable },
}

impl CriticalWeightPreset {
    pub fn k_sup(&self) -> f64 {
        match self {
            CriticalWeightPreset::Flat { k_sup } | CriticalWeightPreset::PowerDip { k_sup, .. } => {
                *k_sup
            }
            CriticalWeightPreset::Tabulated { table } => table.values[0],
        }
    }

    pub fn eval(&self, r: f64, tau: f64) -> f64 {
        match self {
            CriticalWeightPreset::Flat { k_sup } => *k_sup,
            CriticalWeightPreset::PowerDip { k_sup, kappa } => k_sup / (1.0 + kappa * r.powf(tau)),
            CriticalWeightPreset::Tabulated { table } => table.eval(r),
        }
    }
}

/// Configuration of the three potentials and the (K) parameters `τ`, `δ_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub magnetic: MagneticPreset,
    pub electric: ElectricPreset,
    pub critical: CriticalWeightPreset,
    pub tau: f64,
    pub delta_k: f64,
}

impl PotentialSpec {
    /// Checks (V), (K) and the τ window without sampling.
    pub fn validate(&self, pp: &ProblemParams) -> Result<()> {
        if let ElectricPreset::Tabulated { table } = &self.electric {
            table.validate()?;
        }
        if let CriticalWeightPreset::Tabulated { table } = &self.critical {
            table.validate()?;
        }
        let v0 = self.electric.v0();
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::Hypothesis {
                hypothesis: "(V)",
                detail: format!("V_0 = {v0} must be positive"),
            });
        }
        if let ElectricPreset::Harmonic { omega, .. } = &self.electric {
            if !omega.is_finite() {
                return Err(invalid("harmonic frequency must be finite"));
            }
        }
        let k_sup = self.critical.k_sup();
        if !(k_sup > 0.0 && k_sup.is_finite()) {
            return Err(Error::Hypothesis {
                hypothesis: "(K)",
                detail: format!("K(0) = {k_sup} must be positive"),
            });
        }
        if let CriticalWeightPreset::PowerDip { kappa, .. } = &self.critical {
            if !(*kappa >= 0.0 && kappa.is_finite()) {
                return Err(Error::Hypothesis {
                    hypothesis: "(K)",
                    detail: format!("kappa = {kappa} must be nonnegative so that K <= K(0)"),
                });
            }
        }
        if !(self.delta_k > 0.0) {
            return Err(Error::Hypothesis {
                hypothesis: "(K)",
                detail: format!("delta_K = {} must be positive", self.delta_k),
            });
        }
        let finite = match &self.magnetic {
            MagneticPreset::Zero => true,
            MagneticPreset::Constant { a } => a.iter().all(|x| x.is_finite()),
            MagneticPreset::Symmetric { b } => b.is_finite(),
        };
        if !finite {
            return Err(invalid("magnetic potential must be finite"));
        }
        validate_tau(self.tau, pp.p, pp.n_math)
    }

    pub fn sample(&self, grid: &Grid, pp: &ProblemParams) -> Result<PotentialSet> {
        self.validate(pp)?;
        let a = self.magnetic.sample(grid)?;
        self.sample_with(grid, a)
    }

    /// Samples `V` and `K` and pairs them with an explicitly given `A`.
    pub fn sample_with(&self, grid: &Grid, a: VectorSample) -> Result<PotentialSet> {
        let v = (0..grid.len()).map(|i| self.electric.eval(grid.radius(i))).collect();
        let k = (0..grid.len())
            .map(|i| self.critical.eval(grid.radius(i), self.tau))
            .collect();
        PotentialSet::new(
            *grid,
            a,
            v,
            self.electric.v0(),
            k,
            self.critical.k_sup(),
            self.tau,
            self.delta_k,
        )
    }
}

/// Sampled potentials together with their hypothesis parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSet {
    pub grid: Grid,
    pub a: VectorSample,
    pub v: Vec<f64>,
    pub v0: f64,
    pub k: Vec<f64>,
    pub k_sup: f64,
    pub tau: f64,
    pub delta_k: f64,
}

impl PotentialSet {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid,
        a: VectorSample,
        v: Vec<f64>,
        v0: f64,
        k: Vec<f64>,
        k_sup: f64,
        tau: f64,
        delta_k: f64,
    ) -> Result<Self> {
        if a.axes() != grid.axes() || a.len() != grid.len() {
            return Err(invalid("vector potential does not match the grid"));
        }
        for s in [&v, &k] {
            if s.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: s.len(),
                });
            }
        }
        if !(v0 > 0.0) {
            return Err(Error::Hypothesis {
                hypothesis: "(V)",
                detail: format!("V_0 = {v0} must be positive"),
            });
        }
        if let Some(node) = v.iter().position(|&x| !(x >= v0)) {
            return Err(Error::Hypothesis {
                hypothesis: "(V)",
                detail: format!("V = {} at node {node} is below V_0 = {v0}", v[node]),
            });
        }
        if !(k_sup > 0.0) {
            return Err(Error::Hypothesis {
                hypothesis: "(K)",
                detail: format!("K(0) = {k_sup} must be positive"),
            });
        }
        if let Some(node) = k.iter().position(|&x| !(0.0..=k_sup).contains(&x)) {
            return Err(Error::Hypothesis {
                hypothesis: "(K)",
                detail: format!("K = {} at node {node} is outside [0, K(0)] = [0, {k_sup}]", k[node]),
            });
        }
        Ok(PotentialSet {
            grid,
            a,
            v,
            v0,
            k,
            k_sup,
            tau,
            delta_k,
        })
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid != *grid {
            return Err(invalid("potentials were sampled on a different grid"));
        }
        Ok(())
    }

    /// The same `V`, `K` with vector potential `A + ∇φ`.
    pub fn with_magnetic(&self, a: VectorSample) -> Result<PotentialSet> {
        Self::new(
            self.grid,
            a,
            self.v.clone(),
            self.v0,
            self.k.clone(),
            self.k_sup,
            self.tau,
            self.delta_k,
        )
    }
}
