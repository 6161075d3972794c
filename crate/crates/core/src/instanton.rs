//! Talenti instantons, the C¹ cutoff, normalised bumps and their radial norms.
//!
//! `U(r) = c_{p,N} (1 + r^{p'})^{-(N-p)/p}` with `p' = p/(p-1)`, and
//! `U_ε(x) = ε^{-(N-p)/p} U((x - x0)/ε)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{covering_radius, radial_power_integral, QuadLevel, RadialQuadrature};

/// Innermost panel edge, relative to ε.
const R_MIN_FACTOR: f64 = 1e-3;
/// Largest tolerated relative change of S under one quadrature refinement.
pub const REFINEMENT_TOL: f64 = 1e-10;

fn check_pn(p: f64, n: usize) -> Result<()> {
    let nf = n as f64;
    if !(p > 1.0 && p < nf && p.is_finite()) {
        return Err(invalid(format!("need 1 < p < N, got p = {p}, N = {n}")));
    }
    Ok(())
}

pub fn critical_exponent(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf * p / (nf - p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstantonSpec {
    pub epsilon: f64,
    pub center: Vec<f64>,
    pub p: f64,
    pub n: usize,
    pub delta_psi: f64,
}

impl InstantonSpec {
    pub fn new(epsilon: f64, center: Vec<f64>, p: f64, n: usize, delta_psi: f64) -> Result<Self> {
        check_pn(p, n)?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid(format!("epsilon = {epsilon} must be positive")));
        }
        if !(delta_psi > 0.0 && delta_psi.is_finite()) {
            return Err(invalid(format!("delta_psi = {delta_psi} must be positive")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(invalid("instanton center must be finite"));
        }
        Ok(InstantonSpec {
            epsilon,
            center,
            p,
            n,
            delta_psi,
        })
    }

    /// Centered at the origin of an `n`-dimensional space.
    pub fn centered(epsilon: f64, p: f64, n: usize, delta_psi: f64) -> Result<Self> {
        Self::new(epsilon, vec![0.0; n], p, n, delta_psi)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.center.clone(), self.p, self.n, self.delta_psi)
    }

    pub fn p_star(&self) -> f64 {
        critical_exponent(self.p, self.n)
    }

    /// `|x - x0|`, using the leading coordinates of `x` when it has fewer than `N` entries.
    pub fn radius(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.center.iter().chain(std::iter::repeat(&0.0)))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `c_{p,N} = (N^{1/p} ((N-p)/(p-1))^{(p-1)/p})^{(N-p)/p}`.
pub fn talenti_constant(p: f64, n: usize) -> Result<f64> {
    check_pn(p, n)?;
    let nf = n as f64;
    let inner = nf.powf(1.0 / p) * ((nf - p) / (p - 1.0)).powf((p - 1.0) / p);
    Ok(inner.powf((nf - p) / p))
}

/// Radial profile of the unscaled instanton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Talenti {
    pub p: f64,
    pub n: f64,
    pub c: f64,
}

impl Talenti {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        Ok(Talenti {
            p,
            n: n as f64,
            c: talenti_constant(p, n)?,
        })
    }

    fn conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.c * (1.0 + r.powf(self.conj())).powf(-(self.n - self.p) / self.p)
    }

    /// `U'(r) = -c (N-p)/(p-1) r^{1/(p-1)} (1 + r^{p'})^{-N/p}`.
    pub fn derivative(&self, r: f64) -> f64 {
        let (p, n) = (self.p, self.n);
        -self.c * (n - p) / (p - 1.0)
            * r.powf(1.0 / (p - 1.0))
            * (1.0 + r.powf(self.conj())).powf(-n / p)
    }

    /// Algebraic decay rate of `U`.
    pub fn decay(&self) -> f64 {
        (self.n - self.p) / (self.p - 1.0)
    }

    /// Algebraic decay rate of `U'`.
    pub fn derivative_decay(&self) -> f64 {
        (self.n - 1.0) / (self.p - 1.0)
    }

    /// `U_ε(r)`.
    pub fn scaled(&self, r: f64, eps: f64) -> f64 {
        eps.powf(-(self.n - self.p) / self.p) * self.value(r / eps)
    }

    /// `U_ε'(r)`.
    pub fn scaled_derivative(&self, r: f64, eps: f64) -> f64 {
        eps.powf(-(self.n - self.p) / self.p - 1.0) * self.derivative(r / eps)
    }
}

pub fn instanton_value(x: &[f64], spec: &InstantonSpec) -> f64 {
    let u = Talenti::new(spec.p, spec.n).expect("validated spec");
    u.scaled(spec.radius(x), spec.epsilon)
}

/// Smoothstep cutoff: 1 on `[0, δ/2]`, 0 on `[δ, ∞)`, `1 - t²(3 - 2t)` with `t = 2r/δ - 1` between.
pub fn cutoff_radial(r: f64, delta: f64) -> f64 {
    let t = (2.0 * r / delta - 1.0).clamp(0.0, 1.0);
    1.0 - t * t * (3.0 - 2.0 * t)
}

pub fn cutoff_derivative(r: f64, delta: f64) -> f64 {
    let t = 2.0 * r / delta - 1.0;
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        -6.0 * t * (1.0 - t) * 2.0 / delta
    }
}

pub fn cutoff_value(x: &[f64], spec: &InstantonSpec) -> f64 {
    cutoff_radial(spec.radius(x), spec.delta_psi)
}

/// `ψ U_ε` and its radial derivative, before normalisation.
#[derive(Debug, Clone, Copy)]
pub struct CutInstanton {
    pub talenti: Talenti,
    pub eps: f64,
    pub delta: f64,
}

impl CutInstanton {
    pub fn new(spec: &InstantonSpec) -> Result<Self> {
        Ok(CutInstanton {
            talenti: Talenti::new(spec.p, spec.n)?,
            eps: spec.epsilon,
            delta: spec.delta_psi,
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        if r >= self.delta {
            return 0.0;
        }
        cutoff_radial(r, self.delta) * self.talenti.scaled(r, self.eps)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        if r >= self.delta {
            return 0.0;
        }
        let u = self.talenti.scaled(r, self.eps);
        let du = self.talenti.scaled_derivative(r, self.eps);
        cutoff_derivative(r, self.delta) * u + cutoff_radial(r, self.delta) * du
    }

    /// Quadrature on `[0, δ]` with panel edges at ε, δ/2 and δ.
    pub fn quadrature(&self, level: QuadLevel) -> Result<RadialQuadrature> {
        let r_min = (R_MIN_FACTOR * self.eps).min(0.25 * self.delta);
        RadialQuadrature::log_panels(
            r_min,
            self.delta,
            &[self.eps, 0.5 * self.delta],
            level,
            None,
        )
    }

    /// `∫ |ψU_ε|^q`.
    pub fn power_integral(&self, q: f64, level: QuadLevel) -> Result<f64> {
        let quad = self.quadrature(level)?;
        radial_power_integral(|r| self.value(r), q, self.talenti.n as usize, &quad)
    }

    /// `∫ |∇(ψU_ε)|^q`.
    pub fn gradient_power_integral(&self, q: f64, level: QuadLevel) -> Result<f64> {
        let quad = self.quadrature(level)?;
        radial_power_integral(|r| self.derivative(r), q, self.talenti.n as usize, &quad)
    }
}

/// `‖ψU_ε‖_{p*}`, the normaliser of the bump `w_ε`.
pub fn bump_normalizer(spec: &InstantonSpec, level: QuadLevel) -> Result<f64> {
    let cut = CutInstanton::new(spec)?;
    let ps = spec.p_star();
    Ok(cut.power_integral(ps, level)?.powf(1.0 / ps))
}

/// `w_ε(x) = ψ(x) U_ε(x) / normalizer`.
pub fn bump_value(x: &[f64], spec: &InstantonSpec, normalizer: f64) -> Result<f64> {
    if !(normalizer > 0.0 && normalizer.is_finite()) {
        return Err(invalid(format!("bump normalizer {normalizer} must be positive")));
    }
    let r = spec.radius(x);
    Ok(CutInstanton::new(spec)?.value(r) / normalizer)
}

/// The normalised bump `w_ε` as a radial profile.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub cut: CutInstanton,
    pub normalizer: f64,
}

impl Bump {
    pub fn new(spec: &InstantonSpec, level: QuadLevel) -> Result<Self> {
        Ok(Bump {
            cut: CutInstanton::new(spec)?,
            normalizer: bump_normalizer(spec, level)?,
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.cut.value(r) / self.normalizer
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.cut.derivative(r) / self.normalizer
    }

    /// `‖w_ε‖_q^q`.
    pub fn norm_pow(&self, q: f64, level: QuadLevel) -> Result<f64> {
        Ok(self.cut.power_integral(q, level)? / self.normalizer.powf(q))
    }

    /// `‖∇w_ε‖_q^q`.
    pub fn gradient_norm_pow(&self, q: f64, level: QuadLevel) -> Result<f64> {
        Ok(self.cut.gradient_power_integral(q, level)? / self.normalizer.powf(q))
    }
}

/// `∫_{R^N} |g(|x|)|^q` for a profile on the ε-scale with algebraic decay `decay`; the
/// truncation radius is grown until the analytic tail bound is negligible.
pub fn whole_space_integral<G>(
    g: G,
    q: f64,
    n: usize,
    decay: f64,
    eps: f64,
    level: QuadLevel,
) -> Result<f64>
where
    G: Fn(f64) -> f64 + Sync + Send,
{
    let r_min = R_MIN_FACTOR * eps;
    let core = RadialQuadrature::log_panels(r_min, 10.0 * eps, &[eps], level, None)?;
    let reference = radial_power_integral(&g, q, n, &core)?;
    let r_max = covering_radius(&g, q, n, decay, 10.0 * eps, reference)?;
    let quad = RadialQuadrature::log_panels(r_min, r_max.max(10.0 * eps), &[eps], level, Some(decay))?;
    radial_power_integral(g, q, n, &quad)
}

/// `‖U_ε‖_q^q` over R^N.
pub fn instanton_power_integral(p: f64, n: usize, eps: f64, q: f64, level: QuadLevel) -> Result<f64> {
    let u = Talenti::new(p, n)?;
    whole_space_integral(|r| u.scaled(r, eps), q, n, u.decay(), eps, level)
}

/// `‖∇U_ε‖_q^q` over R^N.
pub fn instanton_gradient_power_integral(
    p: f64,
    n: usize,
    eps: f64,
    q: f64,
    level: QuadLevel,
) -> Result<f64> {
    let u = Talenti::new(p, n)?;
    whole_space_integral(
        |r| u.scaled_derivative(r, eps),
        q,
        n,
        u.derivative_decay(),
        eps,
        level,
    )
}

/// Quadrature evidence for the Sobolev constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevEstimate {
    /// `S = ‖∇U‖_p^p / ‖U‖_{p*}^p`.
    pub s: f64,
    /// `‖∇U‖_p^p`.
    pub gradient_pow: f64,
    /// `‖U‖_{p*}^{p*}`.
    pub critical_pow: f64,
    /// Relative change of `S` between `level` and its refinement.
    pub refinement_change: f64,
}

impl SobolevEstimate {
    /// `S^{N/p}`.
    pub fn s_pow(&self, p: f64, n: usize) -> f64 {
        self.s.powf(n as f64 / p)
    }
}

fn sobolev_at(p: f64, n: usize, level: QuadLevel) -> Result<(f64, f64, f64)> {
    let ps = critical_exponent(p, n);
    let grad = instanton_gradient_power_integral(p, n, 1.0, p, level)?;
    let crit = instanton_power_integral(p, n, 1.0, ps, level)?;
    Ok((grad / crit.powf(p / ps), grad, crit))
}

/// Sobolev constant from the exact instanton and its analytic derivative, evaluated at `level`
/// and at the refined level; fails if the two differ by more than [`REFINEMENT_TOL`].
pub fn sobolev_estimate(p: f64, n: usize, level: QuadLevel) -> Result<SobolevEstimate> {
    check_pn(p, n)?;
    let (s0, _, _) = sobolev_at(p, n, level)?;
    let (s, gradient_pow, critical_pow) = sobolev_at(p, n, level.refined())?;
    let refinement_change = ((s - s0) / s).abs();
    if refinement_change > REFINEMENT_TOL {
        return Err(Error::Quadrature(format!(
            "Sobolev constant changed by {refinement_change:e} under refinement"
        )));
    }
    Ok(SobolevEstimate {
        s,
        gradient_pow,
        critical_pow,
        refinement_change,
    })
}

pub fn sobolev_constant(p: f64, n: usize, level: QuadLevel) -> Result<f64> {
    Ok(sobolev_estimate(p, n, level)?.s)
}

/// Radial residual `-Δ_p U_ε - U_ε^{p*-1}` at `r`, with
/// `Δ_p U = r^{1-N} (r^{N-1} |U'|^{p-2} U')'`; the outer derivative is a centered difference
/// of the analytic flux with step `1e-4 r`.
pub fn critical_residual(r: f64, spec: &InstantonSpec) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("radius {r} must be positive")));
    }
    let u = Talenti::new(spec.p, spec.n)?;
    let (p, n, eps) = (spec.p, u.n, spec.epsilon);
    let flux = |s: f64| {
        let d = u.scaled_derivative(s, eps);
        s.powf(n - 1.0) * d.abs().powf(p - 2.0) * d
    };
    let h = 1e-4 * r;
    let div = (flux(r + h) - flux(r - h)) / (2.0 * h) * r.powf(1.0 - n);
    Ok(-div - u.scaled(r, eps).powf(spec.p_star() - 1.0))
}
