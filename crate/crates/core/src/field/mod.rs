//! Discretised complex fields, potentials, nonlinearities and the energy functional
//! `J_A(u) = (1/p)‖u‖^p - (1/p*)∫K|u|^{p*} - (1/p)∫F(x,|u|^p)`.
//!
//! Two geometries are supported: tensor grids on `[-L, L]^d` (d = 1, 2, 3) and radial grids
//! in R^N. The exponent dimension `N` of [`ProblemParams`] is independent of the grid; radial
//! grids carry the `|S^{N-1}| r^{N-1}` weight of that dimension.

pub mod checks;
pub mod complex_field;
pub mod energy;
pub mod grid;
pub mod nonlinearity;
pub mod params;
pub mod potentials;

pub use checks::{
    diamagnetic_check, gauge_transform, hypothesis_report, product_rule_residual, tail_mass,
    GaugeOutcome, HypothesisCheck, HypothesisReport,
};
pub use complex_field::{ComplexField, VectorSample};
pub use energy::{
    discrete_gradient, energy, energy_norm, gateaux, magnetic_gradient, EnergyBreakdown,
    MagneticGradient, Problem,
};
pub use grid::{Geometry, Grid};
pub use nonlinearity::{NonlinearityModel, NonlinearitySpec, WeightProfile};
pub use params::{tau_window, validate_tau, ProblemParams};
pub use potentials::{
    CriticalWeightPreset, ElectricPreset, MagneticPreset, PotentialSet, PotentialSpec, RadialTable,
};
