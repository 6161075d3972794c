//! Seeded property sweeps over the inequality oracles.
//!
//! Trials are split into fixed chunks; chunk `c` draws from a ChaCha8 stream selected by `c`,
//! so a sweep is reproducible for a given seed regardless of how chunks are scheduled.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    convexity_tail_bound, critical_ray_value, monotone_form, simon_check, tmax_closed_form,
    vi_check, weighted_power_bound, CVec, IneqReport, ABS_TOL,
};
use crate::error::{invalid, Result};
use crate::par;

const TRIALS_PER_CHUNK: usize = 1024;
const DISC_RADIUS: f64 = 10.0;
const HEAVY_TAIL_PROB: f64 = 0.25;
const HEAVY_TAIL_DECADES: f64 = 5.0;
const MAX_DIM: usize = 3;
const TMAX_AUDIT_POINTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// `monotone_form >= 0`, strictly positive on distinct pairs.
    Monotone,
    Simon,
    Vi,
    /// `p` is the power `γ`.
    WeightedPower,
    /// `p` is the exponent `r`.
    ConvexityTail,
    /// Closed-form ray maximum dominates `φ` on an audit grid; `N`, `D1`, `D2` are sampled.
    Tmax,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Monotone,
        Check::Simon,
        Check::Vi,
        Check::WeightedPower,
        Check::ConvexityTail,
        Check::Tmax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Monotone => "monotone",
            Check::Simon => "simon",
            Check::Vi => "vi",
            Check::WeightedPower => "weighted-power",
            Check::ConvexityTail => "convexity-tail",
            Check::Tmax => "tmax",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| invalid(format!("unknown inequality check '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub check: Check,
    pub p: f64,
    pub trials: usize,
    pub violations: usize,
    /// Largest `(lhs - rhs) / max(|lhs|, |rhs|, 1)`; negative when every trial had slack.
    pub max_violation: f64,
    /// Largest `|lhs - rhs| / max(|lhs|, |rhs|, 1)`; measures equality cases.
    pub max_gap: f64,
}

impl SweepResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    violations: usize,
    max_violation: f64,
    max_gap: f64,
}

impl Tally {
    const EMPTY: Tally = Tally {
        violations: 0,
        max_violation: f64::NEG_INFINITY,
        max_gap: 0.0,
    };

    fn record(&mut self, report: &IneqReport, extra_violation: bool) {
        let v = report.scaled_violation();
        if !report.holds || extra_violation {
            self.violations += 1;
        }
        self.max_violation = self.max_violation.max(v);
        self.max_gap = self.max_gap.max(v.abs());
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            violations: self.violations + other.violations,
            max_violation: self.max_violation.max(other.max_violation),
            max_gap: self.max_gap.max(other.max_gap),
        }
    }
}

/// A complex scalar uniform in the disc of radius 10.
fn disc_sample(rng: &mut ChaCha8Rng) -> Complex64 {
    let r = DISC_RADIUS * rng.gen::<f64>().sqrt();
    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r, phi)
}

/// A random vector in C^d, d uniform in 1..=3; with probability 1/4 it is rescaled by
/// `10^U(0,5)` to reach moduli up to about 10^6.
pub fn sample_pair(rng: &mut ChaCha8Rng) -> (CVec, CVec) {
    let dim = rng.gen_range(1..=MAX_DIM);
    let draw = |rng: &mut ChaCha8Rng| {
        let scale = if rng.gen::<f64>() < HEAVY_TAIL_PROB {
            10f64.powf(HEAVY_TAIL_DECADES * rng.gen::<f64>())
        } else {
            1.0
        };
        let zs = (0..dim).map(|_| disc_sample(rng) * scale).collect();
        CVec::new(zs).expect("finite samples")
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

fn trial(check: Check, p: f64, rng: &mut ChaCha8Rng, tally: &mut Tally) -> Result<()> {
    match check {
        Check::Monotone => {
            let (a, b) = sample_pair(rng);
            let m = monotone_form(&a, &b, p)?;
            let distinct = a != b;
            tally.record(&IneqReport::new(0.0, m, 0.0), distinct && m <= 0.0);
        }
        Check::Simon => {
            let (a, b) = sample_pair(rng);
            tally.record(&simon_check(&a, &b, p)?, false);
        }
        Check::Vi => {
            let (a, b) = sample_pair(rng);
            tally.record(&vi_check(&a, &b, p)?, false);
        }
        Check::WeightedPower => {
            let x = DISC_RADIUS * rng.gen::<f64>();
            let y = DISC_RADIUS * rng.gen::<f64>();
            let alpha = 1.0 + 10f64.powf(rng.gen_range(-3.0..2.0));
            let beta = alpha / (alpha - 1.0);
            tally.record(&weighted_power_bound(x, y, p, alpha, beta)?, false);
        }
        Check::ConvexityTail => {
            let a = 10f64.powf(rng.gen_range(-3.0..1.0));
            let b = 10f64.powf(rng.gen_range(-3.0..1.0));
            tally.record(&convexity_tail_bound(a, b, p)?, false);
        }
        Check::Tmax => {
            let n = p + rng.gen_range(0.2..5.0);
            let d1 = 10f64.powf(rng.gen_range(-1.0..1.0));
            let d2 = 10f64.powf(rng.gen_range(-1.0..1.0));
            let (t_star, value) = tmax_closed_form(d1, d2, p, n)?;
            // log-spaced audit grid over six decades around the maximiser
            let worst = (0..TMAX_AUDIT_POINTS)
                .map(|i| {
                    let s = -3.0 + 6.0 * i as f64 / (TMAX_AUDIT_POINTS - 1) as f64;
                    critical_ray_value(t_star * 10f64.powf(s), d1, d2, p, n)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            tally.record(&IneqReport::new(worst, value, 1.0), false);
        }
    }
    Ok(())
}

fn validate(check: Check, p: f64) -> Result<()> {
    let ok = match check {
        Check::Monotone | Check::Simon | Check::Tmax => p > 1.0,
        Check::Vi => p >= 2.0,
        Check::WeightedPower => p >= 0.0,
        Check::ConvexityTail => p >= 1.0,
    };
    if !ok || !p.is_finite() {
        return Err(invalid(format!("exponent {p} is outside the domain of check '{check}'")));
    }
    Ok(())
}

/// Runs `trials` seeded random trials of `check` at exponent `p`.
pub fn sweep(check: Check, p: f64, trials: usize, seed: u64) -> Result<SweepResult> {
    validate(check, p)?;
    let chunks = trials.div_ceil(TRIALS_PER_CHUNK);
    let partial = par::map(chunks, |c| -> Result<Tally> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let lo = c * TRIALS_PER_CHUNK;
        let hi = (lo + TRIALS_PER_CHUNK).min(trials);
        let mut tally = Tally::EMPTY;
        for _ in lo..hi {
            trial(check, p, &mut rng, &mut tally)?;
        }
        Ok(tally)
    });
    let mut total = Tally::EMPTY;
    for t in partial {
        total = total.merge(t?);
    }
    Ok(SweepResult {
        check,
        p,
        trials,
        violations: total.violations,
        max_violation: if trials == 0 { 0.0 } else { total.max_violation },
        max_gap: total.max_gap,
    })
}

/// True when a p = 2 Simon sweep shows equality to the comparison tolerance.
pub fn is_equality_case(result: &SweepResult) -> bool {
    result.max_gap < ABS_TOL
}
