//! Complex N-vector arithmetic and inequality oracles with explicit constants.
//!
//! Every check returns an [`IneqReport`] rather than a bare boolean so that sweeps can track
//! the worst slack. Comparisons use [`ABS_TOL`] scaled by `max(|lhs|, |rhs|, 1)`.

pub mod sweep;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Comparison tolerance on unit-scale operands.
pub const ABS_TOL: f64 = 1e-12;

/// A finite vector in C^N, N >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("CVec needs at least one component"));
        }
        if let Some(k) = components.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                op: "CVec::new",
                node: k,
            });
        }
        Ok(CVec(components))
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    /// Euclidean norm in C^N ≅ R^{2N}.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|z|^{exponent} z`, with the value at `z = 0` taken as 0.
    pub fn power_scaled(&self, exponent: f64) -> CVec {
        let r = self.norm();
        if r == 0.0 {
            return CVec(vec![Complex64::new(0.0, 0.0); self.dim()]);
        }
        let s = r.powf(exponent);
        CVec(self.0.iter().map(|z| z * s).collect())
    }

    pub fn sub(&self, other: &CVec) -> Result<CVec> {
        check_dims(self, other)?;
        Ok(CVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }
}

fn check_dims(u: &CVec, v: &CVec) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    Ok(())
}

fn require_p(p: f64, min: f64, strict: bool) -> Result<()> {
    let ok = if strict { p > min } else { p >= min };
    if !ok || !p.is_finite() {
        let rel = if strict { ">" } else { ">=" };
        return Err(invalid(format!("exponent p = {p} must be {rel} {min}")));
    }
    Ok(())
}

/// Outcome of one inequality evaluation `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub holds: bool,
    pub slack: f64,
}

impl IneqReport {
    pub fn new(lhs: f64, rhs: f64, constant_used: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        IneqReport {
            lhs,
            rhs,
            constant_used,
            holds: lhs <= rhs + ABS_TOL * scale,
            slack: rhs - lhs,
        }
    }

    /// `(lhs - rhs) / max(|lhs|, |rhs|, 1)`; positive values beyond [`ABS_TOL`] are violations.
    pub fn scaled_violation(&self) -> f64 {
        (self.lhs - self.rhs) / self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }
}

/// `⟨u, v⟩ = Σ u_k conj(v_k)`.
pub fn inner(u: &CVec, v: &CVec) -> Result<Complex64> {
    check_dims(u, v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b.conj()).sum())
}

/// `Re⟨|a|^{p-2} a - |b|^{p-2} b, a - b⟩`, nonnegative and zero only for `a = b`.
pub fn monotone_form(a: &CVec, b: &CVec, p: f64) -> Result<f64> {
    require_p(p, 1.0, true)?;
    check_dims(a, b)?;
    let fa = a.power_scaled(p - 2.0);
    let fb = b.power_scaled(p - 2.0);
    let flux = fa.sub(&fb)?;
    let diff = a.sub(b)?;
    Ok(inner(&flux, &diff)?.re)
}

/// Constant of the complex Simon inequality: `2^{2-p}` for `p >= 2`, `(p-1)^{-p/2}` below.
pub fn simon_constant(p: f64) -> f64 {
    if p >= 2.0 {
        2f64.powf(2.0 - p)
    } else {
        (p - 1.0).powf(-p / 2.0)
    }
}

/// Complex Simon inequality with `M = monotone_form(a, b, p)`:
///
/// * `p >= 2`: `2^{2-p} |a-b|^p <= M`,
/// * `1 < p < 2`: `|a-b|^p <= (p-1)^{-p/2} M^{p/2} (|a|^p + |b|^p)^{(2-p)/2}`.
///
/// For `p >= 2` the constant sits on the left; with `2^{2-p}` multiplying `M` instead the
/// inequality fails already at `p = 3`, `a = 1`, `b = -1`.
pub fn simon_check(a: &CVec, b: &CVec, p: f64) -> Result<IneqReport> {
    let m = monotone_form(a, b, p)?;
    let dist = a.sub(b)?.norm().powf(p);
    let c = simon_constant(p);
    let report = if p >= 2.0 {
        IneqReport::new(c * dist, m, c)
    } else {
        let mass = a.norm().powf(p) + b.norm().powf(p);
        let rhs = c * m.max(0.0).powf(p / 2.0) * mass.powf((2.0 - p) / 2.0);
        IneqReport::new(dist, rhs, c)
    };
    Ok(report)
}

/// Lindqvist's formula (VI) for `p >= 2`:
/// `||b|^{p-2}b - |a|^{p-2}a| <= (p-1)(|a|^{(p-2)/2} + |b|^{(p-2)/2}) ||b|^{(p-2)/2}b - |a|^{(p-2)/2}a|`.
pub fn vi_check(a: &CVec, b: &CVec, p: f64) -> Result<IneqReport> {
    require_p(p, 2.0, false)?;
    check_dims(a, b)?;
    let half = (p - 2.0) / 2.0;
    let lhs = b.power_scaled(p - 2.0).sub(&a.power_scaled(p - 2.0))?.norm();
    let weight = a.norm().powf(half) + b.norm().powf(half);
    let rhs = (p - 1.0) * weight * b.power_scaled(half).sub(&a.power_scaled(half))?.norm();
    Ok(IneqReport::new(lhs, rhs, p - 1.0))
}

/// `(x+y)^γ <= α^γ x^γ + β^γ y^γ` for `1/α + 1/β = 1`.
pub fn weighted_power_bound(x: f64, y: f64, gamma: f64, alpha: f64, beta: f64) -> Result<IneqReport> {
    if x < 0.0 || y < 0.0 || gamma < 0.0 {
        return Err(invalid("x, y and gamma must be nonnegative"));
    }
    if alpha <= 1.0 || beta <= 1.0 {
        return Err(invalid(format!(
            "alpha = {alpha} and beta = {beta} must both exceed 1"
        )));
    }
    if (1.0 / alpha + 1.0 / beta - 1.0).abs() > 1e-12 {
        return Err(invalid(format!(
            "1/alpha + 1/beta = {} must equal 1",
            1.0 / alpha + 1.0 / beta
        )));
    }
    let lhs = (x + y).powf(gamma);
    let rhs = alpha.powf(gamma) * x.powf(gamma) + beta.powf(gamma) * y.powf(gamma);
    Ok(IneqReport::new(lhs, rhs, alpha.max(beta)))
}

/// `C̄(α^γ + β^γ)` with `C̄ = max{2^{γ-1}, 1}`; never smaller than `(α+β)^γ`.
pub fn split_power(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let c = 2f64.powf(gamma - 1.0).max(1.0);
    c * (alpha.powf(gamma) + beta.powf(gamma))
}

/// `(a+b)^r <= a^r + r (a+b)^{r-1} b` for `a, b > 0`, `r >= 1`.
pub fn convexity_tail_bound(a: f64, b: f64, r: f64) -> Result<IneqReport> {
    if a <= 0.0 || b <= 0.0 {
        return Err(invalid("a and b must be positive"));
    }
    if r < 1.0 {
        return Err(invalid(format!("r = {r} must be >= 1")));
    }
    let lhs = (a + b).powf(r);
    let rhs = a.powf(r) + r * (a + b).powf(r - 1.0) * b;
    Ok(IneqReport::new(lhs, rhs, r))
}

/// Maximiser and maximum of `φ(t) = t^p D1/p - t^{p*} D2/p*` over `t >= 0`.
///
/// Returns `(t_star, value)` with `t_star = (D1/D2)^{1/(p*-p)}` and
/// `value = (1/N) (D1 / D2^{(N-p)/N})^{N/p}`.
pub fn tmax_closed_form(d1: f64, d2: f64, p: f64, n: f64) -> Result<(f64, f64)> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(invalid(format!("D1 = {d1} and D2 = {d2} must be positive")));
    }
    if !(p > 1.0 && p < n) {
        return Err(invalid(format!("need 1 < p < N, got p = {p}, N = {n}")));
    }
    let p_star = n * p / (n - p);
    let t_star = (d1 / d2).powf(1.0 / (p_star - p));
    let value = (d1 / d2.powf((n - p) / n)).powf(n / p) / n;
    Ok((t_star, value))
}

/// `φ(t) = t^p D1/p - t^{p*} D2/p*`.
pub fn critical_ray_value(t: f64, d1: f64, d2: f64, p: f64, n: f64) -> f64 {
    let p_star = n * p / (n - p);
    t.powf(p) * d1 / p - t.powf(p_star) * d2 / p_star
}
