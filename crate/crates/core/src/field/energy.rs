//! The magnetic gradient, the energy functional, its Gateaux derivative and the discrete
//! gradient.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complex_field::{ComplexField, VectorSample};
use super::grid::Grid;
use super::nonlinearity::NonlinearityModel;
use super::params::ProblemParams;
use super::potentials::PotentialSet;
use crate::error::{invalid, Error, Result};
use crate::par;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `m^e`, extended by 0 at `m = 0` whatever the sign of `e`.
#[inline]
pub(crate) fn pow0(m: f64, e: f64) -> f64 {
    if m == 0.0 {
        0.0
    } else {
        m.powf(e)
    }
}

/// `D^j_A u = ∂_j u + i A_j u`, one vector per difference axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticGradient {
    pub axes: Vec<Vec<Complex64>>,
}

impl MagneticGradient {
    /// `|∇_A u|` at a node.
    pub fn norm_at(&self, idx: usize) -> f64 {
        self.axes
            .iter()
            .map(|c| c[idx].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn magnetic_gradient(u: &ComplexField, a: &VectorSample) -> Result<MagneticGradient> {
    let grid = u.grid();
    if a.axes() != grid.axes() || a.len() != grid.len() {
        return Err(invalid("vector potential does not match the field's grid"));
    }
    let vals = u.values();
    let axes = (0..grid.axes())
        .map(|j| {
            let aj = a.component(j);
            par::map(grid.len(), |i| grid.diff(vals, i, j) + I * aj[i] * vals[i])
        })
        .collect();
    Ok(MagneticGradient { axes })
}

/// Parts of `J_A(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `∫ |∇_A u|^p`.
    pub magnetic_kinetic: f64,
    /// `∫ V |u|^p`.
    pub electric: f64,
    /// `∫ K |u|^{p*}`.
    pub critical: f64,
    /// `∫ F(x, |u|^p)`.
    pub subcritical: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn from_parts(kinetic: f64, electric: f64, critical: f64, subcritical: f64, p: f64, ps: f64) -> Self {
        EnergyBreakdown {
            magnetic_kinetic: kinetic,
            electric,
            critical,
            subcritical,
            total: kinetic / p + electric / p - critical / ps - subcritical / p,
        }
    }

    /// `‖u‖^p`.
    pub fn norm_pow(&self) -> f64 {
        self.magnetic_kinetic + self.electric
    }
}

/// Potentials, nonlinearity and exponents on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub pots: PotentialSet,
    pub nl: NonlinearityModel,
    pub pp: ProblemParams,
}

impl Problem {
    pub fn new(pots: PotentialSet, nl: NonlinearityModel, pp: ProblemParams) -> Result<Self> {
        if pots.grid != nl.grid {
            return Err(invalid("potentials and nonlinearity live on different grids"));
        }
        pp.validate()?;
        Ok(Problem { pots, nl, pp })
    }

    pub fn grid(&self) -> &Grid {
        &self.pots.grid
    }

    pub fn energy(&self, u: &ComplexField) -> Result<EnergyBreakdown> {
        energy(u, &self.pots, &self.nl, &self.pp)
    }

    pub fn gateaux(&self, u: &ComplexField, v: &ComplexField) -> Result<f64> {
        gateaux(u, v, &self.pots, &self.nl, &self.pp)
    }

    pub fn gradient(&self, u: &ComplexField) -> Result<ComplexField> {
        discrete_gradient(u, &self.pots, &self.nl, &self.pp)
    }

    pub fn norm(&self, u: &ComplexField) -> Result<f64> {
        energy_norm(u, &self.pots, &self.pp)
    }
}

fn check_shapes(u: &ComplexField, pots: &PotentialSet, nl: &NonlinearityModel) -> Result<()> {
    pots.check_grid(u.grid())?;
    if nl.grid != *u.grid() {
        return Err(invalid("nonlinearity was sampled on a different grid"));
    }
    Ok(())
}

fn locate_non_finite<F>(n: usize, op: &'static str, term: F) -> Error
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let node = par::position(n, |i| !term(i).is_finite()).unwrap_or(0);
    Error::NonFinite { op, node }
}

/// Trapezoidal sums of the four energy integrands.
pub fn energy(
    u: &ComplexField,
    pots: &PotentialSet,
    nl: &NonlinearityModel,
    pp: &ProblemParams,
) -> Result<EnergyBreakdown> {
    check_shapes(u, pots, nl)?;
    let grid = u.grid();
    let du = magnetic_gradient(u, &pots.a)?;
    let (p, ps) = (pp.p, pp.p_star());
    let vals = u.values();
    let terms = |i: usize| -> [f64; 4] {
        let w = grid.weight(i);
        let m = vals[i].norm();
        let mp = m.powf(p);
        [
            w * du.norm_at(i).powf(p),
            w * pots.v[i] * mp,
            w * pots.k[i] * m.powf(ps),
            w * nl.big_f(i, mp),
        ]
    };
    let sums = par::reduce(grid.len(), [0.0; 4], terms, |a, b| {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
    });
    for (k, s) in sums.iter().enumerate() {
        if !s.is_finite() {
            return Err(locate_non_finite(grid.len(), "energy", |i| terms(i)[k]));
        }
    }
    Ok(EnergyBreakdown::from_parts(sums[0], sums[1], sums[2], sums[3], p, ps))
}

/// `‖u‖_{A,p,V} = (∫ |∇_A u|^p + V|u|^p)^{1/p}`.
pub fn energy_norm(u: &ComplexField, pots: &PotentialSet, pp: &ProblemParams) -> Result<f64> {
    pots.check_grid(u.grid())?;
    let grid = u.grid();
    let du = magnetic_gradient(u, &pots.a)?;
    let vals = u.values();
    let p = pp.p;
    let total = par::sum(grid.len(), |i| {
        grid.weight(i) * (du.norm_at(i).powf(p) + pots.v[i] * vals[i].norm().powf(p))
    });
    if !total.is_finite() {
        return Err(locate_non_finite(grid.len(), "energy_norm", |i| {
            du.norm_at(i).powf(p) + pots.v[i] * vals[i].norm().powf(p)
        }));
    }
    Ok(total.powf(1.0 / p))
}

/// Pointwise factor `V|u|^{p-2} - K|u|^{p*-2} - f(x,|u|^p)|u|^{p-2}` multiplying `u`.
fn potential_factor(
    i: usize,
    m: f64,
    pots: &PotentialSet,
    nl: &NonlinearityModel,
    p: f64,
    ps: f64,
) -> f64 {
    pots.v[i] * pow0(m, p - 2.0) - pots.k[i] * pow0(m, ps - 2.0) - nl.f_factor(i, m)
}

/// `⟨J'_A(u), v⟩ = Re ∫ |∇_A u|^{p-2} ∇_A u · conj(∇_A v) + (V|u|^{p-2} - K|u|^{p*-2}
/// - f(x,|u|^p)|u|^{p-2}) u conj(v)`.
pub fn gateaux(
    u: &ComplexField,
    v: &ComplexField,
    pots: &PotentialSet,
    nl: &NonlinearityModel,
    pp: &ProblemParams,
) -> Result<f64> {
    check_shapes(u, pots, nl)?;
    u.check_same_grid(v)?;
    let grid = u.grid();
    let du = magnetic_gradient(u, &pots.a)?;
    let dv = magnetic_gradient(v, &pots.a)?;
    let (p, ps) = (pp.p, pp.p_star());
    let (uv, vv) = (u.values(), v.values());
    let term = |i: usize| {
        let g = pow0(du.norm_at(i), p - 2.0);
        let kinetic: f64 = du
            .axes
            .iter()
            .zip(&dv.axes)
            .map(|(a, b)| (a[i] * b[i].conj()).re)
            .sum();
        let local = potential_factor(i, uv[i].norm(), pots, nl, p, ps) * (uv[i] * vv[i].conj()).re;
        grid.weight(i) * (g * kinetic + local)
    };
    let total = par::sum(grid.len(), term);
    if !total.is_finite() {
        return Err(locate_non_finite(grid.len(), "gateaux", term));
    }
    Ok(total)
}

/// The field `g` with `Re Σ g_i conj(v_i) h^d = ⟨J'_A(u), v⟩` for every `v` vanishing on the
/// boundary; `g = 0` at boundary nodes.
pub fn discrete_gradient(
    u: &ComplexField,
    pots: &PotentialSet,
    nl: &NonlinearityModel,
    pp: &ProblemParams,
) -> Result<ComplexField> {
    check_shapes(u, pots, nl)?;
    let grid = *u.grid();
    let du = magnetic_gradient(u, &pots.a)?;
    let (p, ps) = (pp.p, pp.p_star());
    let vals = u.values();
    // weighted fluxes w |∇_A u|^{p-2} D^j_A u
    let fluxes: Vec<Vec<Complex64>> = (0..grid.axes())
        .map(|j| {
            par::map(grid.len(), |i| {
                du.axes[j][i] * (grid.weight(i) * pow0(du.norm_at(i), p - 2.0))
            })
        })
        .collect();
    let scale = 1.0 / grid.cell_measure();
    let g = par::map(grid.len(), |i| {
        if grid.is_boundary(i) {
            return Complex64::default();
        }
        let mut acc = vals[i] * (grid.weight(i) * potential_factor(i, vals[i].norm(), pots, nl, p, ps));
        for (j, flux) in fluxes.iter().enumerate() {
            acc += grid.diff_adjoint(flux, i, j) - I * pots.a.component(j)[i] * flux[i];
        }
        acc * scale
    });
    if let Some(node) = g.iter().position(|z| !z.is_finite()) {
        return Err(Error::NonFinite {
            op: "discrete_gradient",
            node,
        });
    }
    ComplexField::new(grid, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::nonlinearity::NonlinearitySpec;
    use crate::field::potentials::{CriticalWeightPreset, ElectricPreset, MagneticPreset, PotentialSpec};

    fn problem(grid: Grid, magnetic: MagneticPreset) -> Problem {
        let pp = ProblemParams::new(2.0, 4, 3.0, 3.5, 3.0, 1.0).unwrap();
        let spec = PotentialSpec {
            magnetic,
            electric: ElectricPreset::Constant { v0: 1.0 },
            critical: CriticalWeightPreset::Flat { k_sup: 1.0 },
            tau: 3.0,
            delta_k: 1.0,
        };
        let pots = spec.sample(&grid, &pp).unwrap();
        let nl = NonlinearitySpec::default().build(&grid, &pp).unwrap();
        Problem::new(pots, nl, pp).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = Grid::cartesian(2, 3.0, 17).unwrap();
        let prob = problem(g, MagneticPreset::Zero);
        let zero = ComplexField::zeros(g);
        let e = prob.energy(&zero).unwrap();
        assert_eq!(e.total, 0.0);
        assert!(prob.gradient(&zero).unwrap().is_zero());
        assert_eq!(prob.norm(&zero).unwrap(), 0.0);
    }

    #[test]
    fn breakdown_identity() {
        let g = Grid::cartesian(1, 5.0, 41).unwrap();
        let prob = problem(g, MagneticPreset::Constant { a: vec![0.3] });
        let u = ComplexField::from_fn(g, |x| Complex64::new((-x[0] * x[0]).exp(), 0.2 * x[0])).unwrap();
        let e = prob.energy(&u).unwrap();
        let total = e.magnetic_kinetic / 2.0 + e.electric / 2.0 - e.critical / 4.0 - e.subcritical / 2.0;
        assert_eq!(e.total, total);
    }

    #[test]
    fn plane_wave_cancellation() {
        let omega = 0.7;
        let mut errs = Vec::new();
        for n in [101, 201] {
            let g = Grid::cartesian(1, 2.0, n).unwrap();
            let u = ComplexField::from_indexed(g, |i| Complex64::from_polar(1.0, omega * g.point(i)[0]))
                .unwrap();
            let a = MagneticPreset::Constant { a: vec![-omega] }.sample(&g).unwrap();
            let du = magnetic_gradient(&u, &a).unwrap();
            // interior nodes away from the Dirichlet jump
            let err = (3..n - 3).map(|i| du.axes[0][i].norm()).fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[0] < 0.05);
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }

    #[test]
    fn radial_and_cartesian_norms_agree_for_radial_field() {
        // ∫_{R^2} |∇u|^2 + |u|^2 for a Gaussian, computed both ways
        let radial = Grid::radial(2, 6.0, 601).unwrap();
        let cart = Grid::cartesian(2, 6.0, 241).unwrap();
        let f = |x: [f64; 3]| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0);
        let pp = ProblemParams::new(1.5, 2, 2.0, 5.0, 3.0, 1.0).unwrap();
        let a_r = VectorSample::zeros(&radial);
        let a_c = VectorSample::zeros(&cart);
        let set = |g: Grid, a: VectorSample| {
            PotentialSet::new(g, a, vec![1.0; g.len()], 1.0, vec![1.0; g.len()], 1.0, 1.0, 1.0).unwrap()
        };
        let ur = ComplexField::from_fn(radial, f).unwrap();
        let uc = ComplexField::from_fn(cart, f).unwrap();
        let nr = energy_norm(&ur, &set(radial, a_r), &pp).unwrap();
        let nc = energy_norm(&uc, &set(cart, a_c), &pp).unwrap();
        assert!((nr / nc - 1.0).abs() < 2e-3, "{nr} vs {nc}");
    }
}
