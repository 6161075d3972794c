//! Small-ε rates of the bump norms and least-squares power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instanton::{critical_exponent, sobolev_constant, Bump, InstantonSpec};
use crate::quadrature::QuadLevel;

/// Relative distance from the borderline exponent treated as equal to it.
const CASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub epsilons: Vec<f64>,
    pub values: Vec<f64>,
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln(value)` against `ln(ε)`.
///
/// With `log_corrected`, each value is first divided by `|ln ε|`.
pub fn fit_power_law(epsilons: &[f64], values: &[f64], log_corrected: bool) -> Result<RateFit> {
    if epsilons.len() != values.len() {
        return Err(invalid(format!(
            "{} epsilons but {} values",
            epsilons.len(),
            values.len()
        )));
    }
    if epsilons.len() < 2 {
        return Err(invalid("a rate fit needs at least two points"));
    }
    if epsilons.iter().chain(values).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("rate fits need positive finite epsilons and values"));
    }
    let xs: Vec<f64> = epsilons.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = epsilons
        .iter()
        .zip(values)
        .map(|(e, v)| {
            if log_corrected {
                (v / e.ln().abs()).ln()
            } else {
                v.ln()
            }
        })
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("epsilons must not all coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        epsilons: epsilons.to_vec(),
        values: values.to_vec(),
        exponent: slope,
        log_prefactor: intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateCase {
    /// `q > N(p-1)/(N-p)`: `ε^{N - (N-p)q/p}`.
    Above,
    /// `q = N(p-1)/(N-p)`: `ε^{N/p} |ln ε|`.
    Borderline,
    /// `q < N(p-1)/(N-p)`: `ε^{(N-p)q/(p(p-1))}`.
    Below,
}

/// `N(p-1)/(N-p)`.
pub fn borderline_exponent(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    nf * (p - 1.0) / (nf - p)
}

/// Predicted small-ε exponent of `‖w_ε‖_q^q` and which case produced it.
pub fn predicted_exponent(q: f64, p: f64, n: usize) -> (f64, RateCase) {
    let nf = n as f64;
    let crit = borderline_exponent(p, n);
    if ((q - crit) / crit).abs() <= CASE_TOL {
        ((nf - p) * q / (p * (p - 1.0)), RateCase::Borderline)
    } else if q > crit {
        (nf - (nf - p) * q / p, RateCase::Above)
    } else {
        ((nf - p) * q / (p * (p - 1.0)), RateCase::Below)
    }
}

/// Predicted exponent of `‖∇w_ε‖_p^p - S`.
pub fn gradient_excess_exponent(p: f64, n: usize) -> f64 {
    (n as f64 - p) / (p - 1.0)
}

/// The default sweep: 8 values geometric from 1e-1 to 1e-3.
pub fn default_epsilons() -> Vec<f64> {
    geometric(1e-1, 1e-3, 8)
}

pub fn geometric(first: f64, last: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![first];
    }
    (0..count)
        .map(|i| first * (last / first).powf(i as f64 / (count - 1) as f64))
        .collect()
}

fn check_sweep(eps_list: &[f64]) -> Result<()> {
    if eps_list.len() < 5 {
        return Err(invalid(format!(
            "a rate sweep needs at least 5 epsilons, got {}",
            eps_list.len()
        )));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(invalid("sweep epsilons must lie in (0, 1)"));
    }
    let (lo, hi) = eps_list
        .iter()
        .fold((f64::INFINITY, 0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(invalid("sweep epsilons must span at least two decades"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub q: f64,
    pub predicted: f64,
    pub case: RateCase,
    pub fit: RateFit,
}

impl RateReport {
    pub fn relative_error(&self) -> f64 {
        ((self.fit.exponent - self.predicted) / self.predicted).abs()
    }
}

/// Fits the exponent of `‖w_ε‖_q^q` over `eps_list`; the borderline case is fitted with
/// `|ln ε|` divided out.
pub fn bump_norm_rates(
    q: f64,
    p: f64,
    n: usize,
    eps_list: &[f64],
    delta_psi: f64,
    level: QuadLevel,
) -> Result<RateReport> {
    check_sweep(eps_list)?;
    if q < 1.0 {
        return Err(invalid(format!("norm exponent q = {q} must be >= 1")));
    }
    let (predicted, case) = predicted_exponent(q, p, n);
    let values = eps_list
        .iter()
        .map(|&eps| {
            let spec = InstantonSpec::centered(eps, p, n, delta_psi)?;
            Bump::new(&spec, level)?.norm_pow(q, level)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_power_law(eps_list, &values, case == RateCase::Borderline)?;
    Ok(RateReport {
        q,
        predicted,
        case,
        fit,
    })
}

/// Fits the exponent of `‖∇w_ε‖_p^p - S` over `eps_list`.
pub fn gradient_excess_rates(
    p: f64,
    n: usize,
    eps_list: &[f64],
    delta_psi: f64,
    level: QuadLevel,
) -> Result<RateReport> {
    check_sweep(eps_list)?;
    let s = sobolev_constant(p, n, level)?;
    let values = eps_list
        .iter()
        .map(|&eps| {
            let spec = InstantonSpec::centered(eps, p, n, delta_psi)?;
            Ok(Bump::new(&spec, level)?.gradient_norm_pow(p, level)? - s)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = fit_power_law(eps_list, &values, false)?;
    Ok(RateReport {
        q: p,
        predicted: gradient_excess_exponent(p, n),
        case: RateCase::Below,
        fit,
    })
}

/// The sweep exponents `p`, `(p + p*)/2` and `N(p-1)/(N-p)`, skipping values below 1 and
/// duplicates (for `N = p²` the borderline exponent is `p`).
pub fn standard_q_values(p: f64, n: usize) -> Vec<f64> {
    let ps = critical_exponent(p, n);
    let mut out: Vec<f64> = Vec::new();
    for q in [p, 0.5 * (p + ps), borderline_exponent(p, n)] {
        if q >= 1.0 && out.iter().all(|&o| ((o - q) / q).abs() > CASE_TOL) {
            out.push(q);
        }
    }
    out
}
