//! Composite Gauss–Legendre quadrature on log-spaced radial panels.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::par;

/// Panel density and Gauss–Legendre order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadLevel {
    pub panels_per_decade: usize,
    pub order: usize,
}

impl Default for QuadLevel {
    fn default() -> Self {
        QuadLevel {
            panels_per_decade: 8,
            order: 12,
        }
    }
}

impl QuadLevel {
    /// The same order with twice as many panels.
    pub fn refined(self) -> Self {
        QuadLevel {
            panels_per_decade: 2 * self.panels_per_decade,
            order: self.order,
        }
    }
}

/// Nodes and weights for `∫_0^{r_max} g(r) dr`.
///
/// `tail_exponent`, when present, is an algebraic decay rate `d` of the profile beyond
/// `r_max` (`|f(r)| <= |f(r_max)| (r/r_max)^{-d}`), used for the analytic tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    tail_exponent: Option<f64>,
}

impl RadialQuadrature {
    pub fn new(
        nodes: Vec<f64>,
        weights: Vec<f64>,
        r_max: f64,
        tail_exponent: Option<f64>,
    ) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        if nodes.is_empty() {
            return Err(invalid("quadrature needs at least one node"));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) || nodes[0] <= 0.0 {
            return Err(invalid("quadrature nodes must be positive and strictly increasing"));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(invalid("quadrature weights must be positive"));
        }
        if *nodes.last().unwrap() > r_max {
            return Err(invalid("quadrature nodes exceed r_max"));
        }
        Ok(RadialQuadrature {
            nodes,
            weights,
            r_max,
            tail_exponent,
        })
    }

    /// One panel on `[0, r_min]`, then log-spaced panels up to `r_max`, with every breakpoint
    /// inside `(r_min, r_max)` used as a panel edge.
    pub fn log_panels(
        r_min: f64,
        r_max: f64,
        breakpoints: &[f64],
        level: QuadLevel,
        tail_exponent: Option<f64>,
    ) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(invalid(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
        }
        let order = NonZeroUsize::new(level.order)
            .ok_or_else(|| invalid("quadrature order must be positive"))?;
        if level.panels_per_decade == 0 {
            return Err(invalid("panels_per_decade must be positive"));
        }
        let rule = GaussLegendre::new(order);
        let mut edges = vec![r_min];
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > r_min && b < r_max)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.push(r_max);
        let mut lo = r_min;
        for &hi in &cuts {
            let decades = (hi / lo).log10();
            let panels = ((decades * level.panels_per_decade as f64).ceil() as usize).max(1);
            for k in 1..=panels {
                edges.push(lo * (hi / lo).powf(k as f64 / panels as f64));
            }
            *edges.last_mut().unwrap() = hi;
            lo = hi;
        }
        let mut nodes = Vec::with_capacity(edges.len() * level.order);
        let mut weights = Vec::with_capacity(edges.len() * level.order);
        let mut push_panel = |a: f64, b: f64| {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            for &(x, w) in rule.as_node_weight_pairs() {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        };
        push_panel(0.0, r_min);
        for w in edges.windows(2) {
            push_panel(w[0], w[1]);
        }
        Self::new(nodes, weights, r_max, tail_exponent)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    /// `∫_0^{r_max} g(r) dr`.
    pub fn integrate<G>(&self, g: G) -> f64
    where
        G: Fn(f64) -> f64 + Sync + Send,
    {
        par::sum(self.nodes.len(), |i| self.weights[i] * g(self.nodes[i]))
    }
}

/// Surface area of the unit sphere in R^n.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => std::f64::consts::TAU,
        _ => std::f64::consts::TAU / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

/// Relative size of the tail allowed beyond `r_max`.
pub const TAIL_TOL: f64 = 1e-12;

/// `∫_{R^n} |f(|x|)|^q dx` for a radial profile `f`, with the analytic tail bound checked.
pub fn radial_power_integral<F>(profile: F, q: f64, n: usize, quad: &RadialQuadrature) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if q < 1.0 || !q.is_finite() {
        return Err(invalid(format!("norm exponent q = {q} must be >= 1")));
    }
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let nf = n as f64;
    let omega = sphere_area(n);
    let integral = omega * quad.integrate(|r| profile(r).abs().powf(q) * r.powf(nf - 1.0));
    if !integral.is_finite() {
        return Err(Error::Quadrature(format!("non-finite radial integral {integral}")));
    }
    if let Some(decay) = quad.tail_exponent {
        let rate = q * decay;
        if rate <= nf {
            return Err(Error::NonIntegrable { rate, dim: nf });
        }
        let r = quad.r_max;
        let tail = omega * profile(r).abs().powf(q) * r.powf(nf) / (rate - nf);
        if tail > TAIL_TOL * integral {
            return Err(Error::Quadrature(format!(
                "tail bound {tail:e} beyond r_max = {r:e} exceeds {TAIL_TOL:e} of the integral {integral:e}"
            )));
        }
    }
    Ok(integral)
}

/// `‖f‖_q = (ω_{n-1} ∫ |f(r)|^q r^{n-1} dr)^{1/q}`.
pub fn radial_norm<F>(profile: F, q: f64, n: usize, quad: &RadialQuadrature) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    Ok(radial_power_integral(profile, q, n, quad)?.powf(1.0 / q))
}

/// Tail bound for a profile with algebraic decay `decay` truncated at `r`.
pub fn tail_bound<F>(profile: F, q: f64, n: usize, decay: f64, r: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let nf = n as f64;
    let rate = q * decay;
    if rate <= nf {
        return Err(Error::NonIntegrable { rate, dim: nf });
    }
    Ok(sphere_area(n) * profile(r).abs().powf(q) * r.powf(nf) / (rate - nf))
}

/// Smallest `r_max = start · 10^k` whose tail bound is below [`TAIL_TOL`] times `reference`.
pub fn covering_radius<F>(
    profile: F,
    q: f64,
    n: usize,
    decay: f64,
    start: f64,
    reference: f64,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut r = start;
    for _ in 0..400 {
        if tail_bound(&profile, q, n, decay, r)? <= TAIL_TOL * reference {
            return Ok(r);
        }
        r *= 10.0;
        if !r.is_finite() {
            break;
        }
    }
    Err(Error::Quadrature(format!(
        "no truncation radius found for decay {decay} at q = {q} in dimension {n}"
    )))
}
