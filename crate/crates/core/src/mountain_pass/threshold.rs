//! The compactness threshold `c_P`, the test functions `u_ε = e^{iθ} w_ε` and the ε-sweep
//! comparing `max_t J_A(t u_ε)` with `c_P`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tmax::{fit_ray, RayProfile};
use crate::error::{invalid, Error, Result};
use crate::field::{ComplexField, NonlinearitySpec, PotentialSet, Problem, ProblemParams};
use crate::ineq::tmax_closed_form;
use crate::instanton::{sobolev_constant, Bump, InstantonSpec};
use crate::quadrature::QuadLevel;

/// Default bound `c` on `|A(x) - A(0)|²` inside `B(0, δ_A)`.
pub const C_SMALL: f64 = 0.25;

/// `c_P = S^{N/p} / (N K_sup^{N/p*})`.
pub fn threshold_cp(s_est: f64, k_sup: f64, pp: &ProblemParams) -> Result<f64> {
    if !(s_est > 0.0 && s_est.is_finite()) {
        return Err(invalid(format!("S = {s_est} must be positive")));
    }
    if !(k_sup > 0.0 && k_sup.is_finite()) {
        return Err(invalid(format!("K_sup = {k_sup} must be positive")));
    }
    let n = pp.n();
    Ok(s_est.powf(n / pp.p) / (n * k_sup.powf(n / pp.p_star())))
}

fn nearest_node(pots: &PotentialSet, center: &[f64]) -> usize {
    let grid = &pots.grid;
    let dist = |i: usize| {
        grid.point(i)
            .iter()
            .take(grid.axes())
            .zip(center.iter().chain(std::iter::repeat(&0.0)))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    };
    (0..grid.len())
        .min_by(|&i, &j| dist(i).total_cmp(&dist(j)))
        .unwrap_or(0)
}

/// `δ_A`: distance from `center` to the nearest node where `|A(x) - A(x0)|² >= c_small`,
/// or infinity when there is none. Radial grids carry no vector potential.
pub fn magnetic_radius(pots: &PotentialSet, center: &[f64], c_small: f64) -> f64 {
    let grid = &pots.grid;
    if grid.is_radial() {
        return f64::INFINITY;
    }
    let a0 = pots.a.at(nearest_node(pots, center));
    let spec_radius = |i: usize| {
        grid.point(i)
            .iter()
            .take(grid.axes())
            .zip(center.iter().chain(std::iter::repeat(&0.0)))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    (0..grid.len())
        .filter(|&i| {
            let a = pots.a.at(i);
            (0..3).map(|j| (a[j] - a0[j]).powi(2)).sum::<f64>() >= c_small
        })
        .map(spec_radius)
        .fold(f64::INFINITY, f64::min)
}

/// Checks `δ_ψ < min(δ_A, δ_K)` and that the support of the bump fits inside the grid.
pub fn check_cutoff(pots: &PotentialSet, spec: &InstantonSpec, c_small: f64) -> Result<f64> {
    let grid = &pots.grid;
    let delta_a = magnetic_radius(pots, &spec.center, c_small);
    if !(delta_a > grid.spacing()) {
        return Err(Error::RoughPotential(format!(
            "|A(x) - A(0)|^2 reaches {c_small} within delta_A = {delta_a}, not above the grid spacing {}",
            grid.spacing()
        )));
    }
    if !(spec.delta_psi < delta_a) {
        return Err(Error::Hypothesis {
            hypothesis: "(A)",
            detail: format!("delta_psi = {} must be below delta_A = {delta_a}", spec.delta_psi),
        });
    }
    if !(spec.delta_psi < pots.delta_k) {
        return Err(Error::Hypothesis {
            hypothesis: "(K)",
            detail: format!("delta_psi = {} must be below delta_K = {}", spec.delta_psi, pots.delta_k),
        });
    }
    let reach = spec.delta_psi + spec.center.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(reach < grid.half_width()) {
        return Err(invalid(format!(
            "the bump support (radius {reach}) does not fit inside the grid (half width {})",
            grid.half_width()
        )));
    }
    Ok(delta_a)
}

/// `u_ε(x) = e^{iθ(x)} w_ε(x)` with `θ(x) = -A(x0)·(x - x0)`; `w_ε` is normalised in the
/// continuum `L^{p*}` norm.
pub fn build_test_function(
    eps: f64,
    pots: &PotentialSet,
    spec: &InstantonSpec,
    level: QuadLevel,
) -> Result<ComplexField> {
    build_with(eps, pots, spec, level, C_SMALL)
}

fn build_with(
    eps: f64,
    pots: &PotentialSet,
    spec: &InstantonSpec,
    level: QuadLevel,
    c_small: f64,
) -> Result<ComplexField> {
    check_cutoff(pots, spec, c_small)?;
    let spec = spec.with_epsilon(eps)?;
    let bump = Bump::new(&spec, level)?;
    let grid = pots.grid;
    if grid.is_radial() {
        return ComplexField::from_indexed(grid, |i| Complex64::new(bump.value(grid.radius(i)), 0.0));
    }
    let a0 = pots.a.at(nearest_node(pots, &spec.center));
    let center = spec.center.clone();
    ComplexField::from_fn(grid, |x| {
        let d = |j: usize| x[j] - center.get(j).copied().unwrap_or(0.0);
        let theta: f64 = -(0..grid.axes()).map(|j| a0[j] * d(j)).sum::<f64>();
        let w = bump.value(spec.radius(&x[..grid.axes()]));
        Complex64::from_polar(w, theta)
    })
}

/// How `λ` is chosen along the ε-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaPolicy {
    /// Fixed `λ` where (f_3) allows any `λ > 0`, otherwise `λ = ε^{-σ}` at the midpoint of the
    /// admissible σ-window.
    #[default]
    Auto,
    /// Always the configured `λ`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaChoice {
    pub lambda: f64,
    pub sigma: Option<f64>,
    pub window: Option<(f64, f64)>,
}

/// Admissible `σ` for `λ = ε^{-σ}`, or `None` when any fixed `λ > 0` works
/// (`1 < p <= 2` and `N >= p²`).
pub fn sigma_window(pp: &ProblemParams) -> Result<Option<(f64, f64)>> {
    let (p, n, q) = (pp.p, pp.n(), pp.q);
    if p <= 2.0 && n >= p * p {
        return Ok(None);
    }
    let nu = p.min(2.0);
    let gain = n - (n - p) / p * q;
    let (lo, hi) = if n >= p * p {
        (gain - 2.0, gain)
    } else {
        let crit = n * (p - 1.0) / (n - p);
        let base = nu * (n - p) / (p * (p - 1.0));
        if ((q - crit) / crit).abs() < 1e-12 {
            (n / p - base, n / p)
        } else if q < crit {
            let r = (n - p) / (p - 1.0);
            (r * (q - nu) / p, r * q / p)
        } else {
            (gain - base, gain)
        }
    };
    let lo = lo.max(0.0);
    if !(hi > lo) {
        return Err(Error::Hypothesis {
            hypothesis: "(f_3)",
            detail: format!("empty sigma window ({lo}, {hi}) for p = {p}, N = {n}, q = {q}"),
        });
    }
    Ok(Some((lo, hi)))
}

pub fn lambda_for(eps: f64, pp: &ProblemParams, policy: LambdaPolicy) -> Result<LambdaChoice> {
    let fixed = LambdaChoice {
        lambda: pp.lambda,
        sigma: None,
        window: None,
    };
    if policy == LambdaPolicy::Fixed {
        return Ok(fixed);
    }
    match sigma_window(pp)? {
        None => {
            if !(pp.lambda > 0.0) {
                return Err(Error::Hypothesis {
                    hypothesis: "(f_3)",
                    detail: format!("lambda = {} must be positive", pp.lambda),
                });
            }
            Ok(fixed)
        }
        Some((lo, hi)) => {
            let sigma = 0.5 * (lo + hi);
            Ok(LambdaChoice {
                lambda: eps.powf(-sigma),
                sigma: Some(sigma),
                window: Some((lo, hi)),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub lambda_policy: LambdaPolicy,
    pub level: QuadLevel,
    pub c_small: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            lambda_policy: LambdaPolicy::Auto,
            level: QuadLevel::default(),
            c_small: C_SMALL,
        }
    }
}

/// One ε of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEvidence {
    pub epsilon: f64,
    pub lambda: f64,
    pub sigma: Option<f64>,
    pub t_star: f64,
    /// `max_t J_A(t u_ε)`.
    pub ray_max: f64,
    /// `c_P - ray_max`.
    pub margin: f64,
    /// Ray maximum with the subcritical term dropped.
    pub critical_only_max: f64,
    /// `‖u_ε‖^p` on the grid.
    pub norm_pow: f64,
    /// `∫ K |u_ε|^{p*}` on the grid.
    pub critical_pow: f64,
    pub stationarity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub s_est: f64,
    pub k_sup: f64,
    pub c_p: f64,
    /// Smallest recorded ray maximum.
    pub c_a_est: f64,
    /// `c_P - c_A_est`.
    pub margin: f64,
    pub epsilon_evidence: Vec<EpsilonEvidence>,
    /// `c_P - ray_max` at the smallest ε.
    pub margin_at_smallest: f64,
    pub delta_a: f64,
    /// Smallest ε over the grid spacing.
    pub resolution: f64,
}

impl ThresholdReport {
    pub fn c_a_positive(&self) -> bool {
        self.c_a_est > 0.0
    }

    /// Positive margin at the smallest ε and a positive `c_A` estimate.
    pub fn certified(&self) -> bool {
        self.margin_at_smallest > 0.0 && self.c_a_positive()
    }
}

/// For each ε: build `u_ε`, pick `λ`, maximise along the ray and compare with `c_P`.
pub fn certify_ca_below_cp(
    eps_list: &[f64],
    pots: &PotentialSet,
    nl: &NonlinearitySpec,
    pp: &ProblemParams,
    spec: &InstantonSpec,
    opts: &CertifyOptions,
) -> Result<ThresholdReport> {
    if eps_list.is_empty() {
        return Err(invalid("the epsilon list is empty"));
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(invalid(format!("epsilon = {e} must lie in (0, 1)")));
    }
    if spec.p != pp.p || spec.n != pp.n_math {
        return Err(invalid("instanton (p, N) differ from the problem parameters"));
    }
    let delta_a = check_cutoff(pots, spec, opts.c_small)?;
    let s_est = sobolev_constant(pp.p, pp.n_math, opts.level)?;
    let c_p = threshold_cp(s_est, pots.k_sup, pp)?;
    let mut evidence = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let choice = lambda_for(eps, pp, opts.lambda_policy)?;
        let pp_eps = pp.with_lambda(choice.lambda)?;
        let model = nl.build(&pots.grid, &pp_eps)?;
        let problem = Problem::new(pots.clone(), model, pp_eps)?;
        let u = build_with(eps, pots, spec, opts.level, opts.c_small)?;
        let ray = RayProfile::new(&u, &problem)?;
        let fit = fit_ray(&ray, &u, &problem)?;
        let (_, critical_only_max) = tmax_closed_form(ray.norm_pow, ray.critical, pp.p, pp.n())?;
        evidence.push(EpsilonEvidence {
            epsilon: eps,
            lambda: choice.lambda,
            sigma: choice.sigma,
            t_star: fit.t_star,
            ray_max: fit.value_at_max,
            margin: c_p - fit.value_at_max,
            critical_only_max,
            norm_pow: ray.norm_pow,
            critical_pow: ray.critical,
            stationarity_residual: fit.stationarity_residual,
        });
    }
    let c_a_est = evidence.iter().map(|e| e.ray_max).fold(f64::INFINITY, f64::min);
    let smallest = evidence
        .iter()
        .min_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .expect("nonempty sweep");
    let eps_min = smallest.epsilon;
    Ok(ThresholdReport {
        s_est,
        k_sup: pots.k_sup,
        c_p,
        c_a_est,
        margin: c_p - c_a_est,
        margin_at_smallest: smallest.margin,
        epsilon_evidence: evidence,
        delta_a,
        resolution: eps_min / pots.grid.spacing(),
    })
}

/// The f = 0 ray through `u_ε`: fitted maximum against the closed form and `c_P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureCriticalReport {
    pub epsilon: f64,
    pub ray_max: f64,
    pub closed_form_max: f64,
    pub c_p: f64,
    /// `|ray_max - c_P| / c_P`.
    pub relative_gap: f64,
}

/// Requires a problem with `f ≡ 0`; `K` and `V` are whatever `problem` carries.
pub fn pure_critical_run(
    eps: f64,
    problem: &Problem,
    spec: &InstantonSpec,
    level: QuadLevel,
) -> Result<PureCriticalReport> {
    if !problem.nl.is_zero() {
        return Err(invalid("the pure critical run needs f = 0"));
    }
    let pp = &problem.pp;
    let s_est = sobolev_constant(pp.p, pp.n_math, level)?;
    let c_p = threshold_cp(s_est, problem.pots.k_sup, pp)?;
    let u = build_test_function(eps, &problem.pots, spec, level)?;
    let ray = RayProfile::new(&u, problem)?;
    let fit = fit_ray(&ray, &u, problem)?;
    let (_, closed_form_max) = tmax_closed_form(ray.norm_pow, ray.critical, pp.p, pp.n())?;
    Ok(PureCriticalReport {
        epsilon: eps,
        ray_max: fit.value_at_max,
        closed_form_max,
        c_p,
        relative_gap: ((fit.value_at_max - c_p) / c_p).abs(),
    })
}
