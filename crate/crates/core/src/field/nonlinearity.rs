//! Subcritical nonlinearities `f(x, t)` and their primitives `F(x, t) = ∫_0^t f(x, s) ds`.
//!
//! `t` stands for `|u|^p`. The built-in family is `f = λ(q/p) w(x) t^{(q-p)/p}`, for which
//! `F = λ w t^{q/p}`.

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::params::ProblemParams;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightProfile {
    Constant { value: f64 },
    /// `exp(-|x|²/width²)`.
    Gaussian { width: f64 },
}

impl Default for WeightProfile {
    fn default() -> Self {
        WeightProfile::Constant { value: 1.0 }
    }
}

impl WeightProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            WeightProfile::Constant { value } => *value,
            WeightProfile::Gaussian { width } => (-(r / width).powi(2)).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            WeightProfile::Constant { value } => *value > 0.0 && value.is_finite(),
            WeightProfile::Gaussian { width } => *width > 0.0 && width.is_finite(),
        };
        if !ok {
            return Err(invalid(format!("weight profile {self:?} must be positive and finite")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NonlinearitySpec {
    /// `f = λ(q/p) w(x) t^{(q-p)/p}`.
    PowerWeighted {
        #[serde(default)]
        weight: WeightProfile,
    },
    /// `f = w(x) g(t)`, with `g` piecewise linear through the knots `(t_j, g_j)`, `t_0 = 0`,
    /// `g_0 = 0`, and continued by `g_last (t/t_last)^{(q-p)/p}` past the last knot.
    Tabulated {
        #[serde(default)]
        weight: WeightProfile,
        t: Vec<f64>,
        g: Vec<f64>,
    },
    /// `f ≡ 0`.
    Zero,
}

impl Default for NonlinearitySpec {
    fn default() -> Self {
        NonlinearitySpec::PowerWeighted {
            weight: WeightProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Profile {
    Power,
    Table { t: Vec<f64>, g: Vec<f64>, prim: Vec<f64> },
    Zero,
}

/// A nonlinearity sampled on a grid, with the (f_1) weights `h1`, `h2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearityModel {
    pub grid: Grid,
    pub lambda: f64,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub weight: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    profile: Profile,
}

impl NonlinearitySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NonlinearitySpec::PowerWeighted { weight } => weight.validate(),
            NonlinearitySpec::Tabulated { weight, t, g } => {
                weight.validate()?;
                if t.len() < 2 || t.len() != g.len() {
                    return Err(invalid("tabulated nonlinearity needs at least two matching knots"));
                }
                if t[0] != 0.0 || g[0] != 0.0 {
                    return Err(crate::Error::Hypothesis {
                        hypothesis: "(f_0)",
                        detail: "tabulated nonlinearity must start at t = 0 with g = 0".into(),
                    });
                }
                if t.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("tabulated knots must increase"));
                }
                if g.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                    return Err(crate::Error::Hypothesis {
                        hypothesis: "(f_0)",
                        detail: "tabulated nonlinearity must be nonnegative".into(),
                    });
                }
                if *g.last().unwrap() <= 0.0 {
                    return Err(crate::Error::Hypothesis {
                        hypothesis: "(f_2)",
                        detail: "tabulated nonlinearity must be positive at its last knot".into(),
                    });
                }
                Ok(())
            }
            NonlinearitySpec::Zero => Ok(()),
        }
    }

    pub fn build(&self, grid: &Grid, pp: &ProblemParams) -> Result<NonlinearityModel> {
        self.validate()?;
        let (weight_profile, profile) = match self {
            NonlinearitySpec::PowerWeighted { weight } => (weight.clone(), Profile::Power),
            NonlinearitySpec::Tabulated { weight, t, g } => {
                let mut prim = vec![0.0; t.len()];
                for j in 1..t.len() {
                    prim[j] = prim[j - 1] + 0.5 * (t[j] - t[j - 1]) * (g[j] + g[j - 1]);
                }
                (
                    weight.clone(),
                    Profile::Table {
                        t: t.clone(),
                        g: g.clone(),
                        prim,
                    },
                )
            }
            NonlinearitySpec::Zero => (WeightProfile::default(), Profile::Zero),
        };
        let weight: Vec<f64> = (0..grid.len())
            .map(|i| weight_profile.eval(grid.radius(i)))
            .collect();
        let mut model = NonlinearityModel {
            grid: *grid,
            lambda: pp.lambda,
            p: pp.p,
            q: pp.q,
            k: pp.k,
            h1: Vec::new(),
            h2: Vec::new(),
            weight,
            profile,
        };
        let c = model.growth_constant();
        model.h1 = model.weight.iter().map(|w| c * w).collect();
        model.h2 = model.h1.clone();
        Ok(model)
    }
}

impl NonlinearityModel {
    fn alpha(&self) -> f64 {
        (self.q - self.p) / self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.profile, Profile::Zero)
    }

    pub fn is_power(&self) -> bool {
        matches!(self.profile, Profile::Power)
    }

    /// `g(t)` with `f(x, t) = w(x) g(t)`.
    fn g(&self, t: f64) -> f64 {
        match &self.profile {
            Profile::Power => self.lambda * self.q / self.p * t.powf(self.alpha()),
            Profile::Zero => 0.0,
            Profile::Table { t: ts, g, .. } => {
                let last = ts.len() - 1;
                if t >= ts[last] {
                    return g[last] * (t / ts[last]).powf(self.alpha());
                }
                let j = ts.partition_point(|&x| x <= t).max(1);
                g[j - 1] + (g[j] - g[j - 1]) * (t - ts[j - 1]) / (ts[j] - ts[j - 1])
            }
        }
    }

    /// `G(t) = ∫_0^t g`.
    fn big_g(&self, t: f64) -> f64 {
        match &self.profile {
            Profile::Power => self.lambda * t.powf(self.q / self.p),
            Profile::Zero => 0.0,
            Profile::Table { t: ts, g, prim } => {
                let last = ts.len() - 1;
                if t >= ts[last] {
                    let a1 = self.alpha() + 1.0;
                    return prim[last] + g[last] * ts[last] / a1 * ((t / ts[last]).powf(a1) - 1.0);
                }
                let j = ts.partition_point(|&x| x <= t).max(1);
                prim[j - 1] + 0.5 * (t - ts[j - 1]) * (g[j - 1] + self.g(t))
            }
        }
    }

    pub fn f(&self, node: usize, t: f64) -> f64 {
        self.weight[node] * self.g(t)
    }

    pub fn big_f(&self, node: usize, t: f64) -> f64 {
        self.weight[node] * self.big_g(t)
    }

    /// `f(x, |u|^p) |u|^{p-2}` at modulus `m = |u|`, taken as 0 at `m = 0`.
    pub fn f_factor(&self, node: usize, m: f64) -> f64 {
        if m == 0.0 {
            return 0.0;
        }
        match self.profile {
            Profile::Power => self.weight[node] * self.lambda * self.q / self.p * m.powf(self.q - 2.0),
            Profile::Zero => 0.0,
            Profile::Table { .. } => self.f(node, m.powf(self.p)) * m.powf(self.p - 2.0),
        }
    }

    pub fn h3(&self, node: usize) -> f64 {
        self.h1[node] + self.h2[node]
    }

    /// `sup_t g(t) / (1 + t^{(k-p)/p})`, so that `f <= h1 + h2 t^{(k-p)/p}` with `h1 = h2 = C w`.
    fn growth_constant(&self) -> f64 {
        let beta = (self.k - self.p) / self.p;
        match &self.profile {
            Profile::Power => self.lambda * self.q / self.p,
            Profile::Zero => 0.0,
            Profile::Table { t: ts, .. } => {
                let t_last = *ts.last().unwrap();
                let mut samples: Vec<f64> = Vec::new();
                for w in ts.windows(2) {
                    samples.extend((0..=16).map(|s| w[0] + (w[1] - w[0]) * s as f64 / 16.0));
                }
                samples.extend((1..=600).map(|s| t_last * 10f64.powf(s as f64 / 100.0)));
                let sup = samples
                    .into_iter()
                    .map(|t| self.g(t) / (1.0 + t.powf(beta)))
                    .fold(0.0, f64::max);
                sup * (1.0 + 1e-9)
            }
        }
    }
}
