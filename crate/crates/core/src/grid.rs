//! Scalar and vector fields sampled on uniform periodic tensor grids over the
//! unit cell [-1/2, 1/2]^d.
//!
//! Opposite faces are identified, so an axis of resolution `n` stores exactly
//! `n` samples. Samples sit either at the grid nodes or at the cell centers;
//! the latter is the natural home of elementwise fluxes.

use serde::{Deserialize, Serialize};

use crate::error::{HomogError, Result};
use crate::mat::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridOffset {
    Nodes,
    Centers,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicGridField {
    pub dim: usize,
    pub n: usize,
    pub components: usize,
    pub offset: GridOffset,
    /// Component-major storage: `values[c * n^dim + index]`.
    pub values: Vec<f64>,
}

impl PeriodicGridField {
    pub fn zeros(dim: usize, n: usize, components: usize, offset: GridOffset) -> Self {
        assert!(dim == 1 || dim == 2, "only d in {{1, 2}} is supported");
        assert!(n >= 2);
        PeriodicGridField {
            dim,
            n,
            components,
            offset,
            values: vec![0.0; components * n.pow(dim as u32)],
        }
    }

    /// Scalar field from a pointwise closure evaluated at the sample points.
    pub fn from_fn(dim: usize, n: usize, offset: GridOffset, f: impl Fn(&Vec2) -> f64) -> Self {
        let mut out = Self::zeros(dim, n, 1, offset);
        for idx in 0..out.points() {
            let x = out.coord(idx);
            out.values[idx] = f(&x);
        }
        out
    }

    pub fn from_fn_vector(
        dim: usize,
        n: usize,
        offset: GridOffset,
        f: impl Fn(&Vec2) -> Vec2,
    ) -> Self {
        let mut out = Self::zeros(dim, n, dim, offset);
        for idx in 0..out.points() {
            let x = out.coord(idx);
            let v = f(&x);
            for c in 0..dim {
                out.values[c * out.points() + idx] = v[c];
            }
        }
        out
    }

    /// Number of sample points per component.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && (self.dim == 1 || j < self.n));
        if self.dim == 1 {
            i
        } else {
            i + self.n * j
        }
    }

    pub fn multi_index(&self, idx: usize) -> (usize, usize) {
        if self.dim == 1 {
            (idx, 0)
        } else {
            (idx % self.n, idx / self.n)
        }
    }

    /// Coordinate of a sample point inside [-1/2, 1/2)^d.
    pub fn coord(&self, idx: usize) -> Vec2 {
        let h = self.spacing();
        let shift = match self.offset {
            GridOffset::Nodes => 0.0,
            GridOffset::Centers => 0.5,
        };
        let (i, j) = self.multi_index(idx);
        let mut x = [0.0; 2];
        x[0] = -0.5 + (i as f64 + shift) * h;
        if self.dim == 2 {
            x[1] = -0.5 + (j as f64 + shift) * h;
        }
        x
    }

    pub fn value(&self, comp: usize, idx: usize) -> f64 {
        self.values[comp * self.points() + idx]
    }

    pub fn set(&mut self, comp: usize, idx: usize, v: f64) {
        let np = self.points();
        self.values[comp * np + idx] = v;
    }

    pub fn component(&self, comp: usize) -> &[f64] {
        let np = self.points();
        &self.values[comp * np..(comp + 1) * np]
    }

    pub fn component_mut(&mut self, comp: usize) -> &mut [f64] {
        let np = self.points();
        &mut self.values[comp * np..(comp + 1) * np]
    }

    /// Cell average of one component (equal-weight periodic rule, which is the
    /// trapezoidal rule on a periodic grid).
    pub fn mean(&self, comp: usize) -> f64 {
        let np = self.points();
        self.component(comp).iter().sum::<f64>() / np as f64
    }

    pub fn project_mean_zero(&mut self) {
        for c in 0..self.components {
            let m = self.mean(c);
            for v in self.component_mut(c) {
                *v -= m;
            }
        }
    }

    /// L2(cell) norm over all components (the cell has unit volume).
    pub fn l2_norm(&self) -> f64 {
        let np = self.points() as f64;
        (self.values.iter().map(|v| v * v).sum::<f64>() / np).sqrt()
    }

    pub fn scale_values(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn axpy(&mut self, alpha: f64, other: &PeriodicGridField) {
        assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    /// Centered-difference gradient of one component, sampled on the same grid.
    pub fn gradient(&self, comp: usize) -> PeriodicGridField {
        let mut out = Self::zeros(self.dim, self.n, self.dim, self.offset);
        let n = self.n;
        let inv2h = 0.5 / self.spacing();
        let np = self.points();
        for idx in 0..np {
            let (i, j) = self.multi_index(idx);
            let ip = (i + 1) % n;
            let im = (i + n - 1) % n;
            let dx = if self.dim == 1 {
                self.value(comp, ip) - self.value(comp, im)
            } else {
                self.value(comp, self.index(ip, j)) - self.value(comp, self.index(im, j))
            };
            out.values[idx] = dx * inv2h;
            if self.dim == 2 {
                let jp = (j + 1) % n;
                let jm = (j + n - 1) % n;
                let dy = self.value(comp, self.index(i, jp)) - self.value(comp, self.index(i, jm));
                out.values[np + idx] = dy * inv2h;
            }
        }
        out
    }

    /// Centered-difference divergence of a vector field, on the same grid.
    pub fn divergence(&self) -> Result<PeriodicGridField> {
        if self.components != self.dim {
            return Err(HomogError::InvalidArgument(format!(
                "divergence needs a d-vector field, got {} components in d = {}",
                self.components, self.dim
            )));
        }
        let mut out = Self::zeros(self.dim, self.n, 1, self.offset);
        for axis in 0..self.dim {
            let g = self.gradient(axis);
            for idx in 0..self.points() {
                out.values[idx] += g.value(axis, idx);
            }
        }
        Ok(out)
    }

    /// H1(cell) norm: L2 of values plus L2 of centered-difference gradients.
    pub fn h1_norm(&self) -> f64 {
        let mut sq = self.l2_norm().powi(2);
        for c in 0..self.components {
            sq += self.gradient(c).l2_norm().powi(2);
        }
        sq.sqrt()
    }

    /// Periodic multilinear interpolation of one component at an arbitrary
    /// point (coordinates wrap modulo the unit cell).
    pub fn interpolate(&self, comp: usize, p: &Vec2) -> f64 {
        let n = self.n;
        let shift = match self.offset {
            GridOffset::Nodes => 0.0,
            GridOffset::Centers => 0.5,
        };
        let mut i0 = [0usize; 2];
        let mut frac = [0.0; 2];
        for ax in 0..self.dim {
            // continuous sample index along the axis
            let t = (p[ax] + 0.5) * n as f64 - shift;
            let f = t.floor();
            let mut base = (f as i64).rem_euclid(n as i64) as usize;
            if base >= n {
                base -= n;
            }
            i0[ax] = base;
            frac[ax] = t - f;
        }
        let vals = self.component(comp);
        if self.dim == 1 {
            let a = vals[i0[0]];
            let b = vals[(i0[0] + 1) % n];
            a + frac[0] * (b - a)
        } else {
            let (i, j) = (i0[0], i0[1]);
            let (ip, jp) = ((i + 1) % n, (j + 1) % n);
            let v00 = vals[self.index(i, j)];
            let v10 = vals[self.index(ip, j)];
            let v01 = vals[self.index(i, jp)];
            let v11 = vals[self.index(ip, jp)];
            let (fx, fy) = (frac[0], frac[1]);
            v00 * (1.0 - fx) * (1.0 - fy)
                + v10 * fx * (1.0 - fy)
                + v01 * (1.0 - fx) * fy
                + v11 * fx * fy
        }
    }

    /// Interpolate all components at once.
    pub fn interpolate_vector(&self, p: &Vec2) -> Vec2 {
        let mut out = [0.0; 2];
        for c in 0..self.components.min(2) {
            out[c] = self.interpolate(c, p);
        }
        out
    }
}

/// Skew-symmetric matrix of periodic grid fields, stored by its strictly
/// upper-triangular entries so antisymmetry is a property of the
/// representation rather than of floating point arithmetic.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkewFieldMat {
    pub dim: usize,
    pub n: usize,
    pub offset: GridOffset,
    /// Upper-triangle entries in row-major order; empty when d = 1.
    pub upper: Vec<PeriodicGridField>,
}

impl SkewFieldMat {
    pub fn zeros(dim: usize, n: usize, offset: GridOffset) -> Self {
        let count = dim * (dim - 1) / 2;
        SkewFieldMat {
            dim,
            n,
            offset,
            upper: (0..count)
                .map(|_| PeriodicGridField::zeros(dim, n, 1, offset))
                .collect(),
        }
    }

    /// Entry (r, c) at a sample index; diagonal entries are identically zero.
    pub fn entry(&self, r: usize, c: usize, idx: usize) -> f64 {
        if r == c {
            0.0
        } else if r < c {
            self.upper[0].value(0, idx)
        } else {
            -self.upper[0].value(0, idx)
        }
    }

    /// Row-wise centered-difference divergence: (div G)_c = D_r G_{rc}.
    pub fn divergence(&self) -> PeriodicGridField {
        let mut out = PeriodicGridField::zeros(self.dim, self.n, self.dim, self.offset);
        if self.dim == 1 {
            return out;
        }
        let np = out.points();
        // d = 2: G_{01} = s, div G = (D_1(-s)... ) columnwise:
        // (div G)_0 = D_0 G_00 + D_1 G_10 = -D_1 s, (div G)_1 = D_0 s.
        let s = &self.upper[0];
        let g = s.gradient(0);
        for idx in 0..np {
            out.values[idx] = -g.value(1, idx);
            out.values[np + idx] = g.value(0, idx);
        }
        out
    }

    pub fn l2_norm(&self) -> f64 {
        // Frobenius over entries: upper and lower contribute equally.
        let sq: f64 = self.upper.iter().map(|f| 2.0 * f.l2_norm().powi(2)).sum();
        sq.sqrt()
    }

    pub fn h1_norm(&self) -> f64 {
        let sq: f64 = self.upper.iter().map(|f| 2.0 * f.h1_norm().powi(2)).sum();
        sq.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn mean_of_trig_mode_vanishes() {
        let f = PeriodicGridField::from_fn(1, 64, GridOffset::Nodes, |x| (TAU * x[0]).cos());
        assert!(f.mean(0).abs() < 1e-14);
    }

    #[test]
    fn gradient_of_smooth_mode_is_second_order() {
        let mut errs = Vec::new();
        for n in [32usize, 64] {
            let f = PeriodicGridField::from_fn(2, n, GridOffset::Nodes, |x| (TAU * x[0]).sin());
            let g = f.gradient(0);
            let mut worst: f64 = 0.0;
            for idx in 0..g.points() {
                let x = g.coord(idx);
                worst = worst.max((g.value(0, idx) - TAU * (TAU * x[0]).cos()).abs());
            }
            errs.push(worst);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.9, "observed order {order}");
    }

    #[test]
    fn interpolation_reproduces_samples_and_wraps() {
        let f = PeriodicGridField::from_fn(2, 16, GridOffset::Centers, |x| {
            (TAU * x[0]).cos() * (TAU * x[1]).sin()
        });
        for idx in [0usize, 5, 100, 255] {
            let x = f.coord(idx);
            assert!((f.interpolate(0, &x) - f.value(0, idx)).abs() < 1e-14);
            let shifted = [x[0] + 3.0, x[1] - 2.0];
            assert!((f.interpolate(0, &shifted) - f.value(0, idx)).abs() < 1e-12);
        }
    }

    #[test]
    fn skew_matrix_is_antisymmetric_by_representation() {
        let mut g = SkewFieldMat::zeros(2, 8, GridOffset::Nodes);
        g.upper[0] = PeriodicGridField::from_fn(2, 8, GridOffset::Nodes, |x| x[0] + 2.0 * x[1]);
        for idx in 0..64 {
            assert_eq!(g.entry(0, 1, idx), -g.entry(1, 0, idx));
            assert_eq!(g.entry(0, 0, idx), 0.0);
        }
    }
}
