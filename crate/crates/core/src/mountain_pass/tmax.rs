//! Maximisation of `φ(t) = J_A(t u)` along a ray.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, Problem};
use crate::par;

/// Scan range for the bracket search.
pub const T_MIN: f64 = 1e-6;
pub const T_MAX: f64 = 1e6;
/// Scan points per decade.
const SCAN_PER_DECADE: usize = 8;
/// Relative root tolerance of the final bisection on `φ'`.
pub const ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TMaxResult {
    pub t_star: f64,
    pub value_at_max: f64,
    /// Scan bracket `(B1, B2)` containing `t_star`.
    pub bracket: (f64, f64),
    /// `|⟨J'_A(t_star u), u⟩|`, evaluated with the full Gateaux derivative.
    pub stationarity_residual: f64,
}

/// The ray `t ↦ J_A(t u)` with its `t`-independent integrals cached.
///
/// `φ(t) = t^p a/p - t^{p*} b/p* - (1/p) Σ w_i F(x_i, t^p s_i)` with `a = ‖u‖^p`,
/// `b = ∫K|u|^{p*}` and `s_i = |u_i|^p`.
#[derive(Debug, Clone)]
pub struct RayProfile<'a> {
    problem: &'a Problem,
    pub norm_pow: f64,
    pub critical: f64,
    /// `(node, quadrature weight, |u|^p)` over the support of `u`.
    support: Vec<(usize, f64, f64)>,
}

impl<'a> RayProfile<'a> {
    pub fn new(u: &ComplexField, problem: &'a Problem) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::DegenerateRay("the zero field spans no ray".into()));
        }
        let e = problem.energy(u)?;
        let grid = u.grid();
        let p = problem.pp.p;
        let support = if problem.nl.is_zero() {
            Vec::new()
        } else {
            u.values()
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 0.0)
                .map(|(i, z)| (i, grid.weight(i), z.norm().powf(p)))
                .collect()
        };
        Ok(RayProfile {
            problem,
            norm_pow: e.norm_pow(),
            critical: e.critical,
            support,
        })
    }

    fn subcritical(&self, t: f64) -> f64 {
        let tp = t.powf(self.problem.pp.p);
        let nl = &self.problem.nl;
        let s = &self.support;
        par::sum(s.len(), |j| s[j].1 * nl.big_f(s[j].0, tp * s[j].2))
    }

    /// `Σ w_i f(x_i, t^p s_i) s_i`.
    fn subcritical_derivative(&self, t: f64) -> f64 {
        let tp = t.powf(self.problem.pp.p);
        let nl = &self.problem.nl;
        let s = &self.support;
        par::sum(s.len(), |j| s[j].1 * nl.f(s[j].0, tp * s[j].2) * s[j].2)
    }

    pub fn phi(&self, t: f64) -> f64 {
        let (p, ps) = (self.problem.pp.p, self.problem.pp.p_star());
        t.powf(p) * self.norm_pow / p - t.powf(ps) * self.critical / ps - self.subcritical(t) / p
    }

    /// `φ'(t) = ⟨J'_A(t u), u⟩`.
    pub fn dphi(&self, t: f64) -> f64 {
        let (p, ps) = (self.problem.pp.p, self.problem.pp.p_star());
        t.powf(p - 1.0) * (self.norm_pow - self.subcritical_derivative(t))
            - t.powf(ps - 1.0) * self.critical
    }

    /// Magnitude of the terms in `φ'(t)`, used to scale the root tolerance.
    pub fn scale(&self, t: f64) -> f64 {
        (t.powf(self.problem.pp.p - 1.0) * self.norm_pow).max(f64::MIN_POSITIVE)
    }
}

fn scan_grid() -> Vec<f64> {
    let decades = (T_MAX / T_MIN).log10().round() as usize;
    let n = decades * SCAN_PER_DECADE;
    (0..=n)
        .map(|k| T_MIN * 10f64.powf(k as f64 / SCAN_PER_DECADE as f64))
        .collect()
}

/// Golden-section search for a maximiser of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_width: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > rel_width * b {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a, b)
}

/// Bisection for the sign change of `df` from `+` at `a` to `-` at `b`.
fn bisect<F: Fn(f64) -> f64>(df: F, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if df(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let (fa, fb) = (df(a).abs(), df(b).abs());
    if fa <= fb {
        a
    } else {
        b
    }
}

/// Maximises `φ(t) = J_A(t u)` over `t ∈ [1e-6, 1e6]`: geometric scan, golden-section search
/// around the best scan point, then bisection on `⟨J'_A(t u), u⟩`.
pub fn fit_tmax(u: &ComplexField, problem: &Problem) -> Result<TMaxResult> {
    let ray = RayProfile::new(u, problem)?;
    fit_ray(&ray, u, problem)
}

pub fn fit_ray(ray: &RayProfile<'_>, u: &ComplexField, problem: &Problem) -> Result<TMaxResult> {
    let ts = scan_grid();
    let dphi: Vec<f64> = ts.iter().map(|&t| ray.dphi(t)).collect();
    if let Some(k) = dphi.iter().position(|d| d.is_nan()) {
        return Err(Error::NonFinite {
            op: "fit_tmax",
            node: k,
        });
    }
    // every + to - sign change of φ' brackets a local maximum
    let candidates: Vec<usize> = (0..ts.len() - 1)
        .filter(|&k| dphi[k] > 0.0 && dphi[k + 1] <= 0.0)
        .collect();
    if candidates.is_empty() {
        return Err(Error::DegenerateRay(format!(
            "no sign change of <J'(tu), u> in [{T_MIN:e}, {T_MAX:e}]"
        )));
    }
    let mut best: Option<(f64, f64, (f64, f64))> = None;
    for &k in &candidates {
        let lo = if k == 0 { ts[0] } else { ts[k - 1] };
        let hi = ts[(k + 2).min(ts.len() - 1)];
        let (ga, gb) = golden_max(|t| ray.phi(t), lo, hi, 1e-6);
        let (a, b) = if ray.dphi(ga) > 0.0 && ray.dphi(gb) <= 0.0 {
            (ga, gb)
        } else {
            (ts[k], ts[k + 1])
        };
        let t = bisect(|t| ray.dphi(t), a, b);
        let v = ray.phi(t);
        if best.is_none_or(|(_, bv, _)| v > bv) {
            best = Some((t, v, (lo, hi)));
        }
    }
    let (t_star, value_at_max, bracket) = best.expect("at least one candidate");
    let stationarity_residual = problem.gateaux(&u.scale(t_star), u)?.abs();
    if !(stationarity_residual.is_finite() && value_at_max.is_finite()) {
        return Err(Error::NonFinite {
            op: "fit_tmax",
            node: 0,
        });
    }
    Ok(TMaxResult {
        t_star,
        value_at_max,
        bracket,
        stationarity_residual,
    })
}

/// Largest excess `φ(t) - value_at_max` over `points` log-spaced `t` in `[1e-6, 1e6]`.
pub fn audit_ray(ray: &RayProfile<'_>, fit: &TMaxResult, points: usize) -> f64 {
    let n = points.max(2);
    let span = (T_MAX / T_MIN).ln();
    (0..n)
        .map(|k| ray.phi(T_MIN * (span * k as f64 / (n - 1) as f64).exp()) - fit.value_at_max)
        .fold(f64::NEG_INFINITY, f64::max)
}
