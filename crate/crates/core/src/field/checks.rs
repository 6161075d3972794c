//! Pointwise structural checks: diamagnetic inequality, product rule, gauge covariance,
//! hypothesis verification and tail masses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complex_field::{ComplexField, VectorSample};
use super::energy::{magnetic_gradient, Problem};
use super::grid::Grid;
use crate::error::{invalid, Error, Result};
use crate::par;

/// Largest `|∇|u|| - |∇_A u|` over non-boundary nodes; positive values are violations.
pub fn diamagnetic_check(u: &ComplexField, a: &VectorSample) -> Result<f64> {
    let grid = u.grid();
    let du = magnetic_gradient(u, a)?;
    let modulus = u.modulus();
    Ok(par::max(grid.len(), |i| {
        if grid.is_boundary(i) {
            return f64::NEG_INFINITY;
        }
        let grad_mod = (0..grid.axes())
            .map(|j| grid.diff(&modulus, i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        grad_mod - du.norm_at(i)
    }))
}

/// Nodes whose centered stencils stay off the Dirichlet layer.
fn centered_node(grid: &Grid, i: usize) -> bool {
    let last = grid.points_per_axis() - 1;
    (0..grid.axes()).all(|j| {
        let k = grid.axis_index(i, j);
        (grid.is_radial() || k >= 2) && k + 2 <= last
    })
}

/// Largest node residual of `conj(∇_A(uη)) = conj(u)∇η + η conj(∇_A u)` over nodes whose
/// centered stencils stay off the Dirichlet layer.
pub fn product_rule_residual(u: &ComplexField, eta: &[f64], a: &VectorSample) -> Result<f64> {
    let grid = *u.grid();
    if eta.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: eta.len(),
        });
    }
    let vals = u.values();
    let prod: Vec<Complex64> = (0..grid.len()).map(|i| vals[i] * eta[i]).collect();
    let du = magnetic_gradient(u, a)?;
    let dprod = (0..grid.axes())
        .map(|j| {
            let aj = a.component(j);
            (0..grid.len())
                .map(|i| grid.diff(&prod, i, j) + Complex64::i() * aj[i] * prod[i])
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>();
    Ok(par::max(grid.len(), |i| {
        if !centered_node(&grid, i) {
            return 0.0;
        }
        (0..grid.axes())
            .map(|j| {
                let lhs = dprod[j][i].conj();
                let rhs = vals[i].conj() * grid.diff(eta, i, j) + du.axes[j][i].conj() * eta[i];
                (lhs - rhs).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeOutcome {
    /// `e^{-iφ} u`.
    pub u: ComplexField,
    /// The problem with `A + ∇φ`.
    pub problem: Problem,
    /// `|J_{A+∇φ}(e^{-iφ}u) - J_A(u)|`.
    pub energy_residual: f64,
    /// `max_i ||u'_i| - |u_i||`.
    pub modulus_defect: f64,
}

/// Applies `A ↦ A + ∇φ`, `u ↦ e^{-iφ} u` (∇φ by the same centered differences as ∇u).
pub fn gauge_transform(u: &ComplexField, problem: &Problem, phi: &[f64]) -> Result<GaugeOutcome> {
    let grid = *u.grid();
    problem.pots.check_grid(&grid)?;
    if phi.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: phi.len(),
        });
    }
    let grad_phi = VectorSample::gradient_of(&grid, phi)?;
    let a = problem.pots.a.add(&grad_phi)?;
    let pots = problem.pots.with_magnetic(a)?;
    let vals = u.values();
    let u2 = ComplexField::from_indexed(grid, |i| vals[i] * Complex64::from_polar(1.0, -phi[i]))?;
    let modulus_defect = par::max(grid.len(), |i| (u2.values()[i].norm() - vals[i].norm()).abs()).max(0.0);
    let transformed = Problem::new(pots, problem.nl.clone(), problem.pp)?;
    let before = problem.energy(u)?.total;
    let after = transformed.energy(&u2)?.total;
    Ok(GaugeOutcome {
        u: u2,
        problem: transformed,
        energy_residual: (after - before).abs(),
        modulus_defect,
    })
}

/// `(R, fraction of Σ w|u|^s outside B_R)` for each radius.
pub fn tail_mass(u: &ComplexField, radii: &[f64], exponent: f64) -> Result<Vec<(f64, f64)>> {
    let grid = u.grid();
    if radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("tail-mass radii must be nondecreasing"));
    }
    let vals = u.values();
    let mass = |i: usize| grid.weight(i) * vals[i].norm().powf(exponent);
    let total = par::sum(grid.len(), mass);
    radii
        .iter()
        .map(|&r| {
            if total == 0.0 {
                return Ok((r, 0.0));
            }
            let outside = par::sum(grid.len(), |i| if grid.radius(i) > r { mass(i) } else { 0.0 });
            Ok((r, (outside / total).clamp(0.0, 1.0)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub hypothesis: String,
    pub passed: bool,
    /// Worst sampled slack (negative = violated).
    pub worst_slack: f64,
    pub worst_node: usize,
    pub worst_t: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
    /// Fitted flatness constant `C` in `|K(x) - K(0)| <= C|x|^τ` on `B_{δ_K}`.
    pub k_flatness_constant: f64,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.hypothesis == name)
    }
}

struct Worst {
    slack: f64,
    node: usize,
    t: f64,
}

impl Worst {
    fn new() -> Self {
        Worst {
            slack: f64::INFINITY,
            node: 0,
            t: 0.0,
        }
    }

    fn see(&mut self, slack: f64, node: usize, t: f64) {
        if slack < self.slack || slack.is_nan() {
            *self = Worst { slack, node, t };
        }
    }

    fn check(self, name: &str, tol: f64, note: &str) -> HypothesisCheck {
        HypothesisCheck {
            hypothesis: name.to_string(),
            passed: self.slack >= -tol,
            worst_slack: self.slack,
            worst_node: self.node,
            worst_t: self.t,
            note: note.to_string(),
        }
    }
}

/// Samples (f_0)–(f_3), (V) and (K) on every `node_stride`-th node and `t_points` values of
/// `t = |u|^p` in `[0, t_max]`.
pub fn hypothesis_report(
    problem: &Problem,
    node_stride: usize,
    t_max: f64,
    t_points: usize,
) -> Result<HypothesisReport> {
    if node_stride == 0 || t_points < 2 || !(t_max > 0.0) {
        return Err(invalid("hypothesis sampling needs a positive stride, t_max and >= 2 t points"));
    }
    let (nl, pots, pp) = (&problem.nl, &problem.pots, &problem.pp);
    let grid = *problem.grid();
    let nodes: Vec<usize> = (0..grid.len()).step_by(node_stride).collect();
    let ts: Vec<f64> = (0..t_points).map(|j| t_max * j as f64 / (t_points - 1) as f64).collect();
    let rel = |x: f64| 1e-12 * x.abs().max(1.0);
    let beta = (pp.k - pp.p) / pp.p;

    let mut f0 = Worst::new();
    let mut f1 = Worst::new();
    let mut f2 = Worst::new();
    let mut f3 = Worst::new();
    for &i in &nodes {
        f0.see(-nl.f(i, 0.0).abs(), i, 0.0);
        for &t in &ts {
            let f = nl.f(i, t);
            let big_f = nl.big_f(i, t);
            f0.see(f, i, t);
            f1.see(nl.h1[i] + nl.h2[i] * t.powf(beta) - f + rel(f), i, t);
            if t > 0.0 {
                let lower = pp.theta / pp.p * big_f;
                // 0 < (θ/p)F <= f t
                f2.see((f * t - lower + rel(f * t)).min(lower), i, t);
                f3.see(big_f - pp.lambda * t.powf(pp.q / pp.p) + rel(big_f), i, t);
            }
        }
    }
    let mut v = Worst::new();
    for i in 0..grid.len() {
        v.see(pots.v[i] - pots.v0, i, 0.0);
    }

    // (K): 0 <= K <= K(0) and flatness of order τ on B_{δ_K}
    let mut k_bounds = Worst::new();
    for i in 0..grid.len() {
        k_bounds.see(pots.k[i].min(pots.k_sup - pots.k[i]), i, 0.0);
    }
    let ball: Vec<(f64, f64)> = (0..grid.len())
        .map(|i| (grid.radius(i), (pots.k[i] - pots.k_sup).abs()))
        .filter(|&(r, _)| r > 0.0 && r < pots.delta_k)
        .collect();
    let flat_c = ball
        .iter()
        .map(|&(r, d)| d / r.powf(pots.tau))
        .fold(0.0, f64::max);
    // local order of vanishing from the inner half of the ball
    let inner: Vec<(f64, f64)> = ball
        .iter()
        .copied()
        .filter(|&(r, d)| r < 0.5 * pots.delta_k && d > 1e-14 * pots.k_sup)
        .collect();
    let order = if inner.len() >= 2 {
        let xs: Vec<f64> = inner.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = inner.iter().map(|p| p.1.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    let flat_ok = flat_c.is_finite() && order >= pots.tau * 0.95;
    let k_check = HypothesisCheck {
        hypothesis: "(K)".into(),
        passed: k_bounds.slack >= 0.0 && flat_ok,
        worst_slack: if flat_ok { k_bounds.slack } else { order - pots.tau },
        worst_node: k_bounds.node,
        worst_t: 0.0,
        note: format!(
            "flatness |K - K(0)| <= C|x|^tau with C = {flat_c:.6e}; local vanishing order {order:.4}"
        ),
    };

    let truncation = "sampled on the truncated box; global summability of h1, h2 is not verified";
    Ok(HypothesisReport {
        checks: vec![
            f0.check("(f_0)", 0.0, "f >= 0 and f(x, 0) = 0"),
            f1.check("(f_1)", 0.0, truncation),
            f2.check("(f_2)", 0.0, "0 < (theta/p) F <= f t for t > 0"),
            f3.check("(f_3)", 0.0, "F >= lambda t^{q/p}"),
            v.check("(V)", 0.0, "V >= V_0 > 0"),
            k_check,
        ],
        k_flatness_constant: flat_c,
    })
}
