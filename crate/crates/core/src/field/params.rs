//! Exponents of the problem and their admissibility.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// `p`, the exponent dimension `N`, and the nonlinearity exponents `θ`, `k`, `q`, `λ`.
///
/// `n_math` enters `p* = Np/(N-p)` and all rate formulas; it is independent of the grid
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    pub p: f64,
    pub n_math: usize,
    pub theta: f64,
    pub k: f64,
    pub q: f64,
    pub lambda: f64,
}

fn hypothesis(name: &'static str, detail: String) -> Error {
    Error::Hypothesis {
        hypothesis: name,
        detail,
    }
}

impl ProblemParams {
    pub fn new(p: f64, n_math: usize, theta: f64, k: f64, q: f64, lambda: f64) -> Result<Self> {
        let pp = ProblemParams {
            p,
            n_math,
            theta,
            k,
            q,
            lambda,
        };
        pp.validate()?;
        Ok(pp)
    }

    pub fn n(&self) -> f64 {
        self.n_math as f64
    }

    pub fn p_star(&self) -> f64 {
        self.n() * self.p / (self.n() - self.p)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.p, self.n_math, self.theta, self.k, self.q, lambda)
    }

    /// Checks `1 < p < N`, `p < k < p*` (f_1), `p < θ < p*` (f_2), `q ∈ (p, k)` (f_3).
    pub fn validate(&self) -> Result<()> {
        let (p, n) = (self.p, self.n());
        for (name, v) in [
            ("p", p),
            ("theta", self.theta),
            ("k", self.k),
            ("q", self.q),
            ("lambda", self.lambda),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{name} = {v} must be finite")));
            }
        }
        if !(p > 1.0 && p < n) {
            return Err(invalid(format!("need 1 < p < N, got p = {p}, N = {}", self.n_math)));
        }
        let ps = self.p_star();
        if !(p < self.k && self.k < ps) {
            return Err(hypothesis(
                "(f_1)",
                format!("k = {} must lie in (p, p*) = ({p}, {ps})", self.k),
            ));
        }
        if !(p < self.theta && self.theta < ps) {
            return Err(hypothesis(
                "(f_2)",
                format!("theta = {} must lie in (p, p*) = ({p}, {ps})", self.theta),
            ));
        }
        if !(p < self.q && self.q < self.k) {
            return Err(hypothesis(
                "(f_3)",
                format!("q must lie in (p,k) = ({p}, {}), got q = {}", self.k, self.q),
            ));
        }
        if self.lambda < 0.0 {
            return Err(hypothesis(
                "(f_3)",
                format!("lambda = {} must be nonnegative for a nonnegative f", self.lambda),
            ));
        }
        Ok(())
    }
}

/// Open interval admissible for the flatness exponent `τ` of `K`:
/// `(p, N/(p-1))` when `N > p²`, `((N-p)/(p-1), N/(p-1))` otherwise.
pub fn tau_window(p: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let hi = nf / (p - 1.0);
    let lo = if nf > p * p { p } else { (nf - p) / (p - 1.0) };
    (lo, hi)
}

pub fn validate_tau(tau: f64, p: f64, n: usize) -> Result<()> {
    let (lo, hi) = tau_window(p, n);
    if !(tau > lo && tau < hi) {
        return Err(hypothesis(
            "(K)",
            format!("tau = {tau} must lie in the window ({lo}, {hi}) for p = {p}, N = {n}"),
        ));
    }
    Ok(())
}
