//! Complex fields and real sampled functions on a [`Grid`].

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{invalid, Error, Result};
use crate::par;

/// Complex node values with zero Dirichlet data.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Rejects wrong lengths, non-finite values and nonzero boundary values.
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(node) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite {
                op: "ComplexField::new",
                node,
            });
        }
        if let Some(node) = (0..grid.len()).find(|&i| grid.is_boundary(i) && values[i] != Complex64::default()) {
            return Err(invalid(format!("boundary node {node} carries a nonzero value")));
        }
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        ComplexField {
            grid,
            values: vec![Complex64::default(); grid.len()],
        }
    }

    /// Samples `f` at every node; boundary nodes are set to zero.
    pub fn from_fn<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn([f64; 3]) -> Complex64 + Sync + Send,
    {
        let values = par::map(grid.len(), |i| {
            if grid.is_boundary(i) {
                Complex64::default()
            } else {
                f(grid.point(i))
            }
        });
        Self::new(grid, values)
    }

    /// Real samples; boundary nodes are set to zero.
    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Self::from_indexed(grid, |i| Complex64::new(values[i], 0.0))
    }

    /// Samples `f(node index)`; boundary nodes are set to zero.
    pub fn from_indexed<F>(grid: Grid, f: F) -> Result<Self>
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let values = par::map(grid.len(), |i| {
            if grid.is_boundary(i) {
                Complex64::default()
            } else {
                f(i)
            }
        });
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::default())
    }

    pub fn check_same_grid(&self, other: &ComplexField) -> Result<()> {
        if self.grid != other.grid {
            return Err(invalid("fields live on different grids"));
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> ComplexField {
        self.map(|z| z * c)
    }

    pub fn scale_complex(&self, c: Complex64) -> ComplexField {
        self.map(|z| z * c)
    }

    fn map<F: Fn(Complex64) -> Complex64 + Sync + Send>(&self, f: F) -> ComplexField {
        ComplexField {
            grid: self.grid,
            values: par::map(self.len(), |i| f(self.values[i])),
        }
    }

    /// `self + a · other`.
    pub fn axpy(&self, a: f64, other: &ComplexField) -> Result<ComplexField> {
        self.check_same_grid(other)?;
        Ok(ComplexField {
            grid: self.grid,
            values: par::map(self.len(), |i| self.values[i] + other.values[i] * a),
        })
    }

    /// `(1 - s) self + s other`.
    pub fn lerp(&self, other: &ComplexField, s: f64) -> Result<ComplexField> {
        self.check_same_grid(other)?;
        Ok(ComplexField {
            grid: self.grid,
            values: par::map(self.len(), |i| self.values[i] * (1.0 - s) + other.values[i] * s),
        })
    }

    /// `Re Σ_i self_i conj(other_i)`, unweighted.
    pub fn dot_re(&self, other: &ComplexField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(par::sum(self.len(), |i| {
            let (a, b) = (self.values[i], other.values[i]);
            a.re * b.re + a.im * b.im
        }))
    }

    /// `(Σ |u_i|²)^{1/2}`, unweighted.
    pub fn euclidean_norm(&self) -> f64 {
        par::sum(self.len(), |i| self.values[i].norm_sqr()).sqrt()
    }

    /// `(h^d Σ |u_i|²)^{1/2}`.
    pub fn grid_l2_norm(&self) -> f64 {
        (self.grid.cell_measure() * par::sum(self.len(), |i| self.values[i].norm_sqr())).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        par::max(self.len(), |i| self.values[i].norm()).max(0.0)
    }

    pub fn modulus(&self) -> Vec<f64> {
        par::map(self.len(), |i| self.values[i].norm())
    }

    /// Max-norm distance to `other`.
    pub fn max_distance(&self, other: &ComplexField) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(par::max(self.len(), |i| (self.values[i] - other.values[i]).norm()).max(0.0))
    }
}

/// A real vector field sampled on a grid, one component per difference axis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSample {
    components: Vec<Vec<f64>>,
}

impl VectorSample {
    pub fn zeros(grid: &Grid) -> Self {
        VectorSample {
            components: vec![vec![0.0; grid.len()]; grid.axes()],
        }
    }

    pub fn new(grid: &Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.axes() {
            return Err(Error::DimensionMismatch {
                expected: grid.axes(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    expected: grid.len(),
                    got: c.len(),
                });
            }
            if let Some(node) = c.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    op: "VectorSample::new",
                    node,
                });
            }
        }
        Ok(VectorSample { components })
    }

    /// Samples `f(x)`; only the first `grid.axes()` entries of the result are used.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync + Send,
    {
        let samples = par::map(grid.len(), |i| f(grid.point(i)));
        let components = (0..grid.axes())
            .map(|a| samples.iter().map(|s| s[a]).collect())
            .collect();
        Self::new(grid, components)
    }

    /// Centered-difference gradient of a sampled scalar.
    pub fn gradient_of(grid: &Grid, phi: &[f64]) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: phi.len(),
            });
        }
        let components = (0..grid.axes())
            .map(|a| par::map(grid.len(), |i| grid.diff(phi, i, a)))
            .collect();
        Self::new(grid, components)
    }

    pub fn axes(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.components[axis]
    }

    pub fn at(&self, idx: usize) -> [f64; 3] {
        let mut a = [0.0; 3];
        for (axis, c) in self.components.iter().enumerate() {
            a[axis] = c[idx];
        }
        a
    }

    pub fn add(&self, other: &VectorSample) -> Result<VectorSample> {
        if self.axes() != other.axes() {
            return Err(Error::DimensionMismatch {
                expected: self.axes(),
                got: other.axes(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(VectorSample { components })
    }

    pub(crate) fn len(&self) -> usize {
        self.components.first().map_or(0, Vec::len)
    }
}
