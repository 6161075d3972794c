//! Sampled verification of the mountain-pass geometry: `J(0) = 0`, a positive floor on a
//! small sphere, and a point beyond the sphere with negative energy.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::{ComplexField, Grid, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub radius: f64,
    /// `min J` over the sampled directions scaled to `‖u‖ = radius`.
    pub alpha: f64,
    pub directions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapePoint {
    pub t: f64,
    pub energy: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    /// `J(0)`.
    pub energy_at_zero: f64,
    pub spheres: Vec<SphereSample>,
    /// Largest sampled radius with `α(R) > 0`.
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    /// Smallest `t` on the grid with `J(t v0) < 0` and `‖t v0‖ > R`.
    pub escape: Option<EscapePoint>,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        self.energy_at_zero == 0.0 && self.radius.is_some() && self.escape.is_some()
    }
}

/// A random field: a few complex Gaussian bumps, plus node noise when `rough`.
pub fn random_direction(grid: &Grid, rng: &mut ChaCha8Rng, rough: bool) -> Result<ComplexField> {
    let l = grid.half_width();
    let bumps: Vec<([f64; 3], f64, Complex64)> = (0..3)
        .map(|_| {
            let mut c = [0.0; 3];
            if !grid.is_radial() {
                for cj in c.iter_mut().take(grid.axes()) {
                    *cj = rng.gen_range(-0.5..0.5) * l;
                }
            }
            let width = rng.gen_range(0.1..0.4) * l;
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (c, width, amp)
        })
        .collect();
    let noise: Vec<Complex64> = (0..grid.len())
        .map(|_| {
            if rough {
                Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))
            } else {
                Complex64::default()
            }
        })
        .collect();
    ComplexField::from_indexed(*grid, |i| {
        let x = grid.point(i);
        let mut z = noise[i];
        for (c, w, a) in &bumps {
            let r2: f64 = if grid.is_radial() {
                grid.radius(i).powi(2)
            } else {
                (0..grid.axes()).map(|j| (x[j] - c[j]).powi(2)).sum()
            };
            z += a * (-r2 / (w * w)).exp();
        }
        z
    })
}

/// Samples `J` on spheres `‖u‖ = R` along `v0` and `directions` seeded random fields, and
/// along the ray `t v0` on `t_grid`.
pub fn verify_geometry(
    v0: &ComplexField,
    radii: &[f64],
    t_grid: &[f64],
    problem: &Problem,
    directions: usize,
    seed: u64,
) -> Result<GeometryReport> {
    if v0.is_zero() {
        return Err(invalid("v0 must be nonzero"));
    }
    let grid = *problem.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![v0.clone()];
    for k in 0..directions {
        dirs.push(random_direction(&grid, &mut rng, k % 2 == 1)?);
    }
    let mut unit = Vec::with_capacity(dirs.len());
    for d in dirs.into_iter().filter(|d| !d.is_zero()) {
        let n = problem.norm(&d)?;
        if n > 0.0 {
            unit.push(d.scale(1.0 / n));
        }
    }
    let energy_at_zero = problem.energy(&ComplexField::zeros(grid))?.total;
    let mut spheres = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("sphere radius {r} must be positive")));
        }
        let mut alpha = f64::INFINITY;
        for d in &unit {
            alpha = alpha.min(problem.energy(&d.scale(r))?.total);
        }
        spheres.push(SphereSample {
            radius: r,
            alpha,
            directions: unit.len(),
        });
    }
    let best = spheres
        .iter()
        .filter(|s| s.alpha > 0.0)
        .max_by(|a, b| a.radius.total_cmp(&b.radius));
    let (radius, alpha) = (best.map(|s| s.radius), best.map(|s| s.alpha));
    let v0_norm = problem.norm(v0)?;
    let mut ts: Vec<f64> = t_grid.to_vec();
    ts.sort_by(f64::total_cmp);
    let mut escape = None;
    for t in ts.into_iter().filter(|&t| t > 0.0) {
        let norm = t * v0_norm;
        if norm <= radius.unwrap_or(0.0) {
            continue;
        }
        let energy = problem.energy(&v0.scale(t))?.total;
        if energy < 0.0 {
            escape = Some(EscapePoint { t, energy, norm });
            break;
        }
    }
    Ok(GeometryReport {
        energy_at_zero,
        spheres,
        radius,
        alpha,
        escape,
    })
}
