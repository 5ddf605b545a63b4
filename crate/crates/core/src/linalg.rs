//! Sparse matrices and the Krylov solvers used by the cell and domain
//! problems.
//!
//! All Neumann/periodic systems here are singular on a small known kernel
//! (constants, plus the per-axis alternating modes for the wide-stencil
//! Laplacian), so the solvers accept a projection that is applied to the
//! right-hand side and to the running residual.

use crate::error::{HomogError, Result};

#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<u32>,
    pub data: Vec<f64>,
}

impl Csr {
    /// Build from unsorted (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut trips: Vec<(u32, u32, f64)>) -> Self {
        trips.sort_unstable_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0usize; n + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut data: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in trips {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        Csr { n, indptr, indices, data }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for r in 0..self.n {
            let mut s = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.data[k] * x[self.indices[k] as usize];
            }
            y[r] = s;
        }
    }

    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for r in 0..self.n {
            let mut row = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                row += self.data[k] * y[self.indices[k] as usize];
            }
            s += x[r] * row;
        }
        s
    }

    /// Extract (sub, diag, super) bands; panics if an entry lies off them.
    pub fn to_tridiagonal(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.n;
        let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for r in 0..n {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let c = self.indices[k] as usize;
                match c as i64 - r as i64 {
                    -1 => sub[r] = self.data[k],
                    0 => diag[r] = self.data[k],
                    1 => sup[r] = self.data[k],
                    _ => panic!("matrix is not tridiagonal"),
                }
            }
        }
        (sub, diag, sup)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

pub type Projector<'a> = &'a dyn Fn(&mut [f64]);

fn diverged(iters: usize, rel: f64, rtol: f64, history: &[f64]) -> HomogError {
    let tail: Vec<f64> = history.iter().rev().take(6).rev().copied().collect();
    HomogError::SolverDiverged {
        iterations: iters,
        residual: rel,
        target: rtol,
        history: tail,
    }
}

/// Conjugate gradients for symmetric positive semidefinite systems, run on
/// the complement of the kernel selected by `project`.
pub fn cg(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
    project: Projector,
) -> Result<SolveStats> {
    let n = a.n;
    let mut rhs = b.to_vec();
    project(&mut rhs);
    let bnorm = norm(&rhs).max(f64::MIN_POSITIVE);

    let mut r = rhs.clone();
    let mut tmp = vec![0.0; n];
    if norm(x) > 0.0 {
        project(x);
        a.matvec(x, &mut tmp);
        for i in 0..n {
            r[i] -= tmp[i];
        }
        project(&mut r);
    }
    let mut p = r.clone();
    let mut rsq = dot(&r, &r);
    let mut history = Vec::new();
    for it in 0..max_iter {
        let rel = rsq.sqrt() / bnorm;
        if rel <= rtol {
            return Ok(SolveStats { iterations: it, relative_residual: rel });
        }
        a.matvec(&p, &mut tmp);
        let alpha = rsq / dot(&p, &tmp);
        if !alpha.is_finite() {
            return Err(diverged(it, rel, rtol, &history));
        }
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * tmp[i];
        }
        project(&mut r);
        let rsq_new = dot(&r, &r);
        history.push(rsq_new.sqrt() / bnorm);
        let beta = rsq_new / rsq;
        rsq = rsq_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    let rel = rsq.sqrt() / bnorm;
    if rel <= rtol {
        Ok(SolveStats { iterations: max_iter, relative_residual: rel })
    } else {
        Err(diverged(max_iter, rel, rtol, &history))
    }
}

/// Stabilized bi-conjugate gradients for nonsymmetric systems.
pub fn bicgstab(
    a: &Csr,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
    project: Projector,
) -> Result<SolveStats> {
    let n = a.n;
    let mut rhs = b.to_vec();
    project(&mut rhs);
    let bnorm = norm(&rhs).max(f64::MIN_POSITIVE);

    let mut r = rhs.clone();
    let mut tmp = vec![0.0; n];
    if norm(x) > 0.0 {
        project(x);
        a.matvec(x, &mut tmp);
        for i in 0..n {
            r[i] -= tmp[i];
        }
        project(&mut r);
    }
    let r0 = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut history = Vec::new();
    for it in 0..max_iter {
        let rel = norm(&r) / bnorm;
        history.push(rel);
        if rel <= rtol {
            return Ok(SolveStats { iterations: it, relative_residual: rel });
        }
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < f64::MIN_POSITIVE {
            return Err(diverged(it, rel, rtol, &history));
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        a.matvec(&p, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        a.matvec(&s, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        project(&mut r);
        if !(alpha.is_finite() && omega.is_finite()) {
            return Err(diverged(it, norm(&r) / bnorm, rtol, &history));
        }
    }
    let rel = norm(&r) / bnorm;
    if rel <= rtol {
        Ok(SolveStats { iterations: max_iter, relative_residual: rel })
    } else {
        Err(diverged(max_iter, rel, rtol, &history))
    }
}

/// Thomas algorithm for a nonsingular tridiagonal system.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Remove the mean from a vector (projection onto the complement of
/// constants in the Euclidean inner product).
pub fn project_mean_zero(v: &mut [f64]) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    for x in v {
        *x -= m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d_dirichlet(n: usize) -> Csr {
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i as u32, i as u32, 2.0));
            if i > 0 {
                trips.push((i as u32, (i - 1) as u32, -1.0));
            }
            if i + 1 < n {
                trips.push((i as u32, (i + 1) as u32, -1.0));
            }
        }
        Csr::from_triplets(n, trips)
    }

    #[test]
    fn cg_solves_spd_system() {
        let a = laplacian_1d_dirichlet(50);
        let xref: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut b = vec![0.0; 50];
        a.matvec(&xref, &mut b);
        let mut x = vec![0.0; 50];
        cg(&a, &b, &mut x, 1e-12, 1000, &|_v: &mut [f64]| {}).unwrap();
        for (xi, ri) in x.iter().zip(&xref) {
            assert!((xi - ri).abs() < 1e-9);
        }
    }

    #[test]
    fn bicgstab_solves_nonsymmetric_system() {
        let n = 40;
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i as u32, i as u32, 3.0));
            if i > 0 {
                trips.push((i as u32, (i - 1) as u32, -1.4));
            }
            if i + 1 < n {
                trips.push((i as u32, (i + 1) as u32, -0.6));
            }
        }
        let a = Csr::from_triplets(n, trips);
        let xref: Vec<f64> = (0..n).map(|i| ((i * i) % 7) as f64 - 3.0).collect();
        let mut b = vec![0.0; n];
        a.matvec(&xref, &mut b);
        let mut x = vec![0.0; n];
        bicgstab(&a, &b, &mut x, 1e-12, 2000, &|_v: &mut [f64]| {}).unwrap();
        for (xi, ri) in x.iter().zip(&xref) {
            assert!((xi - ri).abs() < 1e-8);
        }
    }

    #[test]
    fn thomas_matches_dense_solution() {
        let a = laplacian_1d_dirichlet(20);
        let (sub, diag, sup) = a.to_tridiagonal();
        let xref: Vec<f64> = (0..20).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let mut b = vec![0.0; 20];
        a.matvec(&xref, &mut b);
        let x = solve_tridiagonal(&sub, &diag, &sup, &b);
        for (xi, ri) in x.iter().zip(&xref) {
            assert!((xi - ri).abs() < 1e-12);
        }
    }

    #[test]
    fn cg_reports_nonconvergence() {
        let a = laplacian_1d_dirichlet(400);
        let b = vec![1.0; 400];
        let mut x = vec![0.0; 400];
        let err = cg(&a, &b, &mut x, 1e-14, 3, &|_v: &mut [f64]| {}).unwrap_err();
        match err {
            HomogError::SolverDiverged { iterations, history, .. } => {
                assert_eq!(iterations, 3);
                assert!(!history.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
