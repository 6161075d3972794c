//! Structured grids on a truncated box or a truncated radial interval.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::sphere_area;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Geometry {
    /// Tensor grid on `[-L, L]^dim`, `dim` in 1..=3.
    Cartesian { dim: usize },
    /// Radially symmetric fields in R^{n_math}, sampled at `r_i = i h` on `[0, L]`.
    Radial { n_math: usize },
}

/// Nodes are stored with axis 0 varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    geometry: Geometry,
    half_width: f64,
    points: usize,
    spacing: f64,
}

impl Grid {
    /// `h = 2L/(points - 1)`.
    pub fn cartesian(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("grid dimension {dim} must be 1, 2 or 3")));
        }
        Self::build(Geometry::Cartesian { dim }, half_width, points)
    }

    /// `h = L/(points - 1)`; node 0 sits at the origin.
    pub fn radial(n_math: usize, radius: f64, points: usize) -> Result<Self> {
        if n_math < 2 {
            return Err(invalid(format!("radial grids need N >= 2, got {n_math}")));
        }
        Self::build(Geometry::Radial { n_math }, radius, points)
    }

    pub fn new(geometry: Geometry, half_width: f64, points: usize) -> Result<Self> {
        match geometry {
            Geometry::Cartesian { dim } => Self::cartesian(dim, half_width, points),
            Geometry::Radial { n_math } => Self::radial(n_math, half_width, points),
        }
    }

    fn build(geometry: Geometry, half_width: f64, points: usize) -> Result<Self> {
        if points < 3 {
            return Err(invalid(format!("need at least 3 points per axis, got {points}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(format!("box half-width {half_width} must be positive")));
        }
        let span = match geometry {
            Geometry::Cartesian { .. } => 2.0 * half_width,
            Geometry::Radial { .. } => half_width,
        };
        let grid = Grid {
            geometry,
            half_width,
            points,
            spacing: span / (points - 1) as f64,
        };
        if grid.len_checked().is_none() {
            return Err(invalid("grid has too many nodes"));
        }
        Ok(grid)
    }

    fn len_checked(&self) -> Option<usize> {
        (0..self.axes()).try_fold(1usize, |acc, _| acc.checked_mul(self.points))
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.geometry, Geometry::Radial { .. })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of difference axes: the box dimension, or 1 for radial grids.
    pub fn axes(&self) -> usize {
        match self.geometry {
            Geometry::Cartesian { dim } => dim,
            Geometry::Radial { .. } => 1,
        }
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.axes() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `h^d`, the scale relating the discrete gradient to the dual of the energy.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.powi(self.axes() as i32)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow(axis as u32)
    }

    /// Index along `axis` of node `idx`.
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.stride(axis)) % self.points
    }

    pub fn coord(&self, idx: usize, axis: usize) -> f64 {
        let i = self.axis_index(idx, axis) as f64;
        match self.geometry {
            Geometry::Cartesian { .. } => -self.half_width + i * self.spacing,
            Geometry::Radial { .. } => i * self.spacing,
        }
    }

    /// Cartesian coordinates padded with zeros; for radial grids `(r, 0, 0)`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (axis, xa) in x.iter_mut().enumerate().take(self.axes()) {
            *xa = self.coord(idx, axis);
        }
        x
    }

    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.point(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Dirichlet nodes: the faces of the box, or `r = L`.
    pub fn is_boundary(&self, idx: usize) -> bool {
        match self.geometry {
            Geometry::Cartesian { .. } => (0..self.axes()).any(|a| {
                let i = self.axis_index(idx, a);
                i == 0 || i == self.points - 1
            }),
            Geometry::Radial { .. } => idx == self.points - 1,
        }
    }

    /// Trapezoidal weight of node `idx`; radial weights carry `|S^{N-1}| r^{N-1}`.
    pub fn weight(&self, idx: usize) -> f64 {
        let end_factor = |i: usize| if i == 0 || i == self.points - 1 { 0.5 } else { 1.0 };
        match self.geometry {
            Geometry::Cartesian { dim } => (0..dim)
                .map(|a| end_factor(self.axis_index(idx, a)) * self.spacing)
                .product(),
            Geometry::Radial { n_math } => {
                let r = self.coord(idx, 0);
                end_factor(idx) * self.spacing * sphere_area(n_math) * r.powi(n_math as i32 - 1)
            }
        }
    }

    /// The grid with spacing halved over the same box.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.geometry, self.half_width, 2 * (self.points - 1) + 1)
    }

    /// Difference of `values` along `axis` at `idx`: centered inside, one-sided at the ends;
    /// zero at the origin of a radial grid.
    pub fn diff<T>(&self, values: &[T], idx: usize, axis: usize) -> T
    where
        T: Copy + Default + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let i = self.axis_index(idx, axis);
        let s = self.stride(axis);
        let h = self.spacing;
        let last = self.points - 1;
        if i == 0 {
            if self.is_radial() {
                T::default()
            } else {
                (values[idx + s] - values[idx]) * (1.0 / h)
            }
        } else if i == last {
            (values[idx] - values[idx - s]) * (1.0 / h)
        } else {
            (values[idx + s] - values[idx - s]) * (0.5 / h)
        }
    }

    /// Transpose of [`Grid::diff`] along `axis`, evaluated at `idx`: `(Dᵀy)_idx = Σ_i D_{i,idx} y_i`.
    pub fn diff_adjoint<T>(&self, y: &[T], idx: usize, axis: usize) -> T
    where
        T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let k = self.axis_index(idx, axis);
        let s = self.stride(axis);
        let h = self.spacing;
        let last = self.points - 1;
        let interior = |i: usize| i >= 1 && i < last;
        let mut acc = T::default();
        // centered rows i = k - 1 and i = k + 1
        if k >= 1 && interior(k - 1) {
            acc = acc + y[idx - s] * (0.5 / h);
        }
        if interior(k + 1) {
            acc = acc - y[idx + s] * (0.5 / h);
        }
        // one-sided row 0
        if !self.is_radial() {
            if k == 0 {
                acc = acc - y[idx] * (1.0 / h);
            } else if k == 1 {
                acc = acc + y[idx - s] * (1.0 / h);
            }
        }
        // one-sided row `last`
        if k == last {
            acc = acc + y[idx] * (1.0 / h);
        } else if k + 1 == last {
            acc = acc - y[idx + s] * (1.0 / h);
        }
        acc
    }
}
