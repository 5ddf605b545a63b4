//! Small dense d x d matrices and vectors for d in {1, 2}.
//!
//! Coefficient matrices, homogenized tensors and flux algebra all live in at
//! most two dimensions here, so a fixed 2x2 backing store with an explicit
//! `dim` is simpler and faster than a generic linear-algebra dependency.

use serde::{Deserialize, Serialize};

/// Point / vector in at most two dimensions; entry 1 is ignored when d = 1.
pub type Vec2 = [f64; 2];

pub fn dot(dim: usize, a: &Vec2, b: &Vec2) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        s += a[i] * b[i];
    }
    s
}

pub fn norm(dim: usize, a: &Vec2) -> f64 {
    dot(dim, a, a).sqrt()
}

pub fn scale(dim: usize, a: &Vec2, s: f64) -> Vec2 {
    let mut out = [0.0; 2];
    for i in 0..dim {
        out[i] = a[i] * s;
    }
    out
}

/// Canonical basis vector e_j (0-based axis index).
pub fn basis(j: usize) -> Vec2 {
    let mut e = [0.0; 2];
    e[j] = 1.0;
    e
}

/// Dense d x d matrix, d in {1, 2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallMat {
    pub dim: usize,
    a: [[f64; 2]; 2],
}

impl SmallMat {
    pub fn zero(dim: usize) -> Self {
        SmallMat { dim, a: [[0.0; 2]; 2] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.a[i][i] = c;
        }
        m
    }

    pub fn from_rows(dim: usize, rows: [[f64; 2]; 2]) -> Self {
        SmallMat { dim, a: rows }
    }

    pub fn diag(dim: usize, d0: f64, d1: f64) -> Self {
        let mut m = Self::zero(dim);
        m.a[0][0] = d0;
        if dim > 1 {
            m.a[1][1] = d1;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r][c] = v;
    }

    pub fn add_assign(&mut self, other: &SmallMat) {
        for r in 0..self.dim {
            for c in 0..self.dim {
                self.a[r][c] += other.a[r][c];
            }
        }
    }

    pub fn sub(&self, other: &SmallMat) -> SmallMat {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.a[r][c] -= other.a[r][c];
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> SmallMat {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.a[r][c] *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> SmallMat {
        let mut out = Self::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.a[r][c] = self.a[c][r];
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let mut out = [0.0; 2];
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[r] += self.a[r][c] * v[c];
            }
        }
        out
    }

    /// Column j as a vector.
    pub fn col(&self, j: usize) -> Vec2 {
        let mut out = [0.0; 2];
        for r in 0..self.dim {
            out[r] = self.a[r][j];
        }
        out
    }

    pub fn set_col(&mut self, j: usize, v: &Vec2) {
        for r in 0..self.dim {
            self.a[r][j] = v[r];
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                s += self.a[r][c] * self.a[r][c];
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                m = m.max(self.a[r][c].abs());
            }
        }
        m
    }

    /// Smallest eigenvalue of the symmetric part (A + A^T)/2.
    pub fn sym_min_eigenvalue(&self) -> f64 {
        if self.dim == 1 {
            return self.a[0][0];
        }
        let s00 = self.a[0][0];
        let s11 = self.a[1][1];
        let s01 = 0.5 * (self.a[0][1] + self.a[1][0]);
        let mean = 0.5 * (s00 + s11);
        let disc = (0.5 * (s00 - s11)).hypot(s01);
        mean - disc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_min_eigenvalue_matches_hand_computation() {
        let m = SmallMat::from_rows(2, [[3.0, 1.0], [1.0, 3.0]]);
        assert!((m.sym_min_eigenvalue() - 2.0).abs() < 1e-14);
        // skew part must not shift the quadratic form
        let sk = SmallMat::from_rows(2, [[3.0, 1.5], [-1.5, 3.0]]);
        assert!((sk.sym_min_eigenvalue() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn mul_vec_respects_dim() {
        let m = SmallMat::from_rows(1, [[4.0, 7.0], [9.0, 9.0]]);
        let v = m.mul_vec(&[2.0, 5.0]);
        assert_eq!(v, [8.0, 0.0]);
    }
}
