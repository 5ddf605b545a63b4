//! Two-scale coefficient families a(y, z) and the scale coupling delta(eps).
//!
//! Every admissible family is elliptic and bounded with one constant mu
//! (mu |xi|^2 <= a xi . xi and a xi . eta <= |xi||eta| / mu) and Lipschitz in
//! the slow variable y; the dependence on the fast variable z is smooth so
//! the cell solvers converge at their nominal order. The catalog is
//! code-defined and selected by name.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{HomogError, Result};
use crate::mat::{basis, dot, norm, SmallMat, Vec2};

/// Wrap a coordinate into [-1/2, 1/2].
fn wrap(t: f64) -> f64 {
    t - t.round()
}

/// Periodic triangle wave with values in [-1, 1] and Lipschitz constant 4.
fn triangle(t: f64) -> f64 {
    1.0 - 4.0 * wrap(t).abs()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
enum CoefKind {
    /// a = c I
    Constant { c: f64 },
    /// d = 1: a = (2 + cos 2 pi y)(2 + cos 2 pi z)
    Trig1d,
    /// d = 1: a = 3 + cos 2 pi y + cos 2 pi z (correctors genuinely depend on y)
    Nonsep1d,
    /// d = 1: a = (2 + triangle(y))(2 + cos 2 pi z), Lipschitz but not C^1 in y
    Tri1d,
    /// d = 2: a = (2 + cos 2 pi z_1) I, no slow variable
    Laminate2d,
    /// d = 2: a = (2 + cos 2 pi y_2)(2 + cos 2 pi z_1) I
    YmodLaminate2d,
    /// d = 2: a = (2 + amp sin 2 pi y_1 sin 2 pi y_2)(2 + amp sin 2 pi z_1 sin 2 pi z_2) I
    Checkerboard2d { amp: f64 },
    /// d = 2: symmetric part as YmodLaminate2d, plus the skew part
    /// s sin(2 pi y_1) J with J = [[0, 1], [-1, 0]]
    Skew2d { skew: f64 },
}

/// A two-scale matrix coefficient a(y, z) with its structural constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientField {
    pub name: String,
    pub dim: usize,
    /// Ellipticity/boundedness constant mu.
    pub mu: f64,
    /// Lipschitz constant in y (Frobenius norm per unit y-distance).
    pub lipschitz_y: f64,
    pub symmetric: bool,
    kind: CoefKind,
}

impl CoefficientField {
    /// Evaluate a(y, z); both arguments wrap periodically, so the call is a
    /// pure function of the wrapped coordinates.
    pub fn evaluate(&self, y: &Vec2, z: &Vec2) -> SmallMat {
        let yw = [wrap(y[0]), wrap(y[1])];
        let zw = [wrap(z[0]), wrap(z[1])];
        match &self.kind {
            CoefKind::Constant { c } => SmallMat::scaled_identity(self.dim, *c),
            CoefKind::Trig1d => SmallMat::scaled_identity(
                1,
                (2.0 + (TAU * yw[0]).cos()) * (2.0 + (TAU * zw[0]).cos()),
            ),
            CoefKind::Nonsep1d => SmallMat::scaled_identity(
                1,
                3.0 + (TAU * yw[0]).cos() + (TAU * zw[0]).cos(),
            ),
            CoefKind::Tri1d => SmallMat::scaled_identity(
                1,
                (2.0 + triangle(yw[0])) * (2.0 + (TAU * zw[0]).cos()),
            ),
            CoefKind::Laminate2d => {
                SmallMat::scaled_identity(2, 2.0 + (TAU * zw[0]).cos())
            }
            CoefKind::YmodLaminate2d => SmallMat::scaled_identity(
                2,
                (2.0 + (TAU * yw[1]).cos()) * (2.0 + (TAU * zw[0]).cos()),
            ),
            CoefKind::Checkerboard2d { amp } => SmallMat::scaled_identity(
                2,
                (2.0 + amp * (TAU * yw[0]).sin() * (TAU * yw[1]).sin())
                    * (2.0 + amp * (TAU * zw[0]).sin() * (TAU * zw[1]).sin()),
            ),
            CoefKind::Skew2d { skew } => {
                let alpha = (2.0 + (TAU * yw[1]).cos()) * (2.0 + (TAU * zw[0]).cos());
                let s = skew * (TAU * yw[0]).sin();
                SmallMat::from_rows(2, [[alpha, s], [-s, alpha]])
            }
        }
    }

    /// Evaluate the transposed matrix a^T(y, z).
    pub fn evaluate_transposed(&self, y: &Vec2, z: &Vec2) -> SmallMat {
        self.evaluate(y, z).transpose()
    }

    /// True when the coefficient has no dependence on the slow variable.
    pub fn is_y_independent(&self) -> bool {
        matches!(self.kind, CoefKind::Constant { .. } | CoefKind::Laminate2d)
    }
}

/// Catalog lookup. `params` supplies per-family knobs (all optional).
pub fn catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<CoefficientField> {
    let get = |key: &str, default: f64| params.get(key).copied().unwrap_or(default);
    let field = match name {
        "constant" => {
            let c = get("c", 2.0);
            if c <= 0.0 {
                return Err(HomogError::Config("constant coefficient must be positive".into()));
            }
            let dim = get("dim", 1.0) as usize;
            CoefficientField {
                name: name.into(),
                dim,
                mu: c.min(1.0 / c),
                lipschitz_y: 0.0,
                symmetric: true,
                kind: CoefKind::Constant { c },
            }
        }
        "trig1d" => CoefficientField {
            name: name.into(),
            dim: 1,
            mu: 1.0 / 9.0,
            lipschitz_y: 6.0 * std::f64::consts::PI,
            symmetric: true,
            kind: CoefKind::Trig1d,
        },
        "nonsep1d" => CoefficientField {
            name: name.into(),
            dim: 1,
            mu: 0.2,
            lipschitz_y: TAU,
            symmetric: true,
            kind: CoefKind::Nonsep1d,
        },
        "tri1d" => CoefficientField {
            name: name.into(),
            dim: 1,
            mu: 1.0 / 9.0,
            lipschitz_y: 12.0,
            symmetric: true,
            kind: CoefKind::Tri1d,
        },
        "laminate2d" => CoefficientField {
            name: name.into(),
            dim: 2,
            mu: 1.0 / 3.0,
            lipschitz_y: 0.0,
            symmetric: true,
            kind: CoefKind::Laminate2d,
        },
        "ymod_laminate2d" => CoefficientField {
            name: name.into(),
            dim: 2,
            mu: 1.0 / 9.0,
            // |d a / d y_2| <= 2 pi * 3, times sqrt(2) for the Frobenius norm
            // of a scalar multiple of I.
            lipschitz_y: TAU * 3.0 * std::f64::consts::SQRT_2,
            symmetric: true,
            kind: CoefKind::YmodLaminate2d,
        },
        "checkerboard2d" => {
            let amp = get("amp", 0.8);
            if !(0.0..2.0).contains(&amp) {
                return Err(HomogError::Config("checkerboard amplitude must lie in [0, 2)".into()));
            }
            let lo = (2.0 - amp) * (2.0 - amp);
            let hi = (2.0 + amp) * (2.0 + amp);
            CoefficientField {
                name: name.into(),
                dim: 2,
                mu: lo.min(1.0 / hi),
                lipschitz_y: amp * TAU * std::f64::consts::SQRT_2 * (2.0 + amp) * std::f64::consts::SQRT_2,
                symmetric: true,
                kind: CoefKind::Checkerboard2d { amp },
            }
        }
        "skew2d" => {
            let skew = get("skew", 0.5);
            let hi = 9.0 + skew.abs() * std::f64::consts::SQRT_2;
            CoefficientField {
                name: name.into(),
                dim: 2,
                mu: (1.0 / hi).min(1.0),
                lipschitz_y: TAU * 3.0 * std::f64::consts::SQRT_2 + skew.abs() * TAU * std::f64::consts::SQRT_2,
                symmetric: false,
                kind: CoefKind::Skew2d { skew },
            }
        }
        other => {
            return Err(HomogError::Config(format!(
                "unknown coefficient '{other}' (catalog: constant, trig1d, nonsep1d, tri1d, laminate2d, ymod_laminate2d, checkerboard2d, skew2d)"
            )))
        }
    };
    Ok(field)
}

pub fn catalog_names() -> &'static [&'static str] {
    &[
        "constant",
        "trig1d",
        "nonsep1d",
        "tri1d",
        "laminate2d",
        "ymod_laminate2d",
        "checkerboard2d",
        "skew2d",
    ]
}

/// A sampled witness of a violated structural hypothesis.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisViolation {
    pub kind: String,
    pub y: Vec2,
    pub z: Vec2,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesesReport {
    /// Smallest sampled Rayleigh quotient a xi . xi / |xi|^2.
    pub mu_observed: f64,
    /// Largest sampled |a xi . eta| / (|xi||eta|); must stay below 1/mu.
    pub bound_observed: f64,
    /// Largest sampled |a(y,z) - a(y',z)|_F / |y - y'|.
    pub cl_observed: f64,
    pub pass: bool,
    pub violations: Vec<HypothesisViolation>,
}

const HYP_SLACK: f64 = 1e-12;

/// Monte-Carlo check of ellipticity, boundedness and y-Lipschitz continuity
/// against the declared constants. Violations are reported with a witness
/// point; the check never aborts.
pub fn verify_hypotheses(field: &CoefficientField, n_samples: usize, seed: u64) -> HypothesesReport {
    assert!(n_samples >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = field.dim;
    let mut mu_obs = f64::INFINITY;
    let mut bound_obs: f64 = 0.0;
    let mut cl_obs: f64 = 0.0;
    let mut violations = Vec::new();

    let mut sample_vec = |rng: &mut ChaCha8Rng| -> Vec2 {
        let mut v = [0.0; 2];
        loop {
            for x in v.iter_mut().take(d) {
                *x = rng.gen_range(-1.0..1.0);
            }
            if norm(d, &v) > 1e-3 {
                return v;
            }
        }
    };

    for _ in 0..n_samples {
        let y = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let yp = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let z = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let xi = sample_vec(&mut rng);
        let eta = sample_vec(&mut rng);

        let a = field.evaluate(&y, &z);
        let axi = a.mul_vec(&xi);
        let rayleigh = dot(d, &axi, &xi) / dot(d, &xi, &xi);
        mu_obs = mu_obs.min(rayleigh);
        if rayleigh < field.mu - HYP_SLACK {
            violations.push(HypothesisViolation {
                kind: "ellipticity".into(),
                y,
                z,
                observed: rayleigh,
                bound: field.mu,
            });
        }

        let pairing = dot(d, &axi, &eta).abs() / (norm(d, &xi) * norm(d, &eta));
        bound_obs = bound_obs.max(pairing);
        if pairing > 1.0 / field.mu + HYP_SLACK {
            violations.push(HypothesisViolation {
                kind: "boundedness".into(),
                y,
                z,
                observed: pairing,
                bound: 1.0 / field.mu,
            });
        }

        let dy = norm(d, &[y[0] - yp[0], y[1] - yp[1]]);
        if dy > 1e-9 {
            let diff = a.sub(&field.evaluate(&yp, &z)).frobenius_norm() / dy;
            cl_obs = cl_obs.max(diff);
            if diff > field.lipschitz_y + HYP_SLACK {
                violations.push(HypothesisViolation {
                    kind: "lipschitz_y".into(),
                    y,
                    z,
                    observed: diff,
                    bound: field.lipschitz_y,
                });
            }
        }
    }

    HypothesesReport {
        mu_observed: mu_obs,
        bound_observed: bound_obs,
        cl_observed: cl_obs,
        pass: violations.is_empty(),
        violations,
    }
}

/// The law delta = delta(eps) together with the sweep's epsilon list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleCoupling {
    /// Power law delta = eps^gamma when set; otherwise `deltas` is explicit.
    pub gamma: Option<f64>,
    pub epsilons: Vec<f64>,
    pub deltas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScaleEntry {
    pub epsilon: f64,
    pub delta: f64,
    /// tau = max(eps, delta / eps), the governing small parameter.
    pub tau: f64,
}

impl ScaleCoupling {
    pub fn power_law(gamma: f64, epsilons: Vec<f64>) -> Self {
        ScaleCoupling { gamma: Some(gamma), epsilons, deltas: None }
    }

    pub fn table(epsilons: Vec<f64>, deltas: Vec<f64>) -> Self {
        ScaleCoupling { gamma: None, epsilons, deltas: Some(deltas) }
    }

    pub fn delta(&self, epsilon: f64) -> f64 {
        match (self.gamma, &self.deltas) {
            (Some(g), _) => epsilon.powf(g),
            (None, Some(ds)) => {
                let k = self
                    .epsilons
                    .iter()
                    .position(|e| *e == epsilon)
                    .expect("epsilon not in the coupling table");
                ds[k]
            }
            (None, None) => unreachable!("coupling carries neither a law nor a table"),
        }
    }

    pub fn entries(&self) -> Vec<ScaleEntry> {
        self.epsilons
            .iter()
            .map(|&epsilon| {
                let delta = self.delta(epsilon);
                ScaleEntry { epsilon, delta, tau: epsilon.max(delta / epsilon) }
            })
            .collect()
    }

    /// Structural requirements: positive decreasing epsilons, and the ratio
    /// delta/eps must decrease along the sweep (delta(eps)/eps -> 0).
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(HomogError::Config("epsilon list is empty".into()));
        }
        if self.epsilons.iter().any(|e| *e <= 0.0) {
            return Err(HomogError::Config("epsilons must be positive".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HomogError::Config("epsilon list must be strictly decreasing".into()));
        }
        if let Some(g) = self.gamma {
            if g <= 1.0 {
                return Err(HomogError::Config(format!(
                    "gamma = {g} does not satisfy gamma > 1, so delta/eps does not vanish"
                )));
            }
        }
        if let Some(ds) = &self.deltas {
            if ds.len() != self.epsilons.len() {
                return Err(HomogError::Config("delta table length mismatch".into()));
            }
        }
        let entries = self.entries();
        let ratios: Vec<f64> = entries.iter().map(|e| e.delta / e.epsilon).collect();
        if ratios.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HomogError::Config(
                "delta/eps does not decrease along the sweep".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    #[test]
    fn constant_field_evaluates_everywhere() {
        let mut p = no_params();
        p.insert("c".into(), 2.0);
        p.insert("dim".into(), 2.0);
        let f = catalog("constant", &p).unwrap();
        let a = f.evaluate(&[0.37, -1.2], &[5.5, 0.0]);
        assert_eq!(a, SmallMat::scaled_identity(2, 2.0));
    }

    #[test]
    fn trig1d_direct_substitution() {
        let f = catalog("trig1d", &no_params()).unwrap();
        let a = f.evaluate(&[0.0, 0.0], &[0.0, 0.0]);
        assert!((a.get(0, 0) - 9.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_is_periodic_and_pure() {
        let f = catalog("checkerboard2d", &no_params()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let y = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let z = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let a = f.evaluate(&y, &z);
            let b = f.evaluate(&[y[0] + 1.0, y[1]], &[z[0], z[1] - 2.0]);
            // integer shifts wrap to bit-identical coordinates
            assert_eq!(a, b);
            assert_eq!(a, f.evaluate(&y, &z));
        }
    }

    #[test]
    fn shipped_constants_pass_hypotheses() {
        for name in catalog_names() {
            let f = catalog(name, &no_params()).unwrap();
            let rep = verify_hypotheses(&f, 3000, 42);
            assert!(rep.pass, "{name}: {:?}", rep.violations.first());
        }
    }

    #[test]
    fn overdeclared_mu_fails_with_witness() {
        let mut p = no_params();
        p.insert("c".into(), 2.0);
        let mut f = catalog("constant", &p).unwrap();
        f.mu = 3.0;
        let rep = verify_hypotheses(&f, 200, 1);
        assert!(!rep.pass);
        assert_eq!(rep.violations[0].kind, "ellipticity");
        assert!((rep.mu_observed - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trig1d_extremal_mu_is_one_ninth() {
        // min eigenvalue 1 (both cosines at -1), max 9: mu = 1/9 works.
        let f = catalog("trig1d", &no_params()).unwrap();
        let rep = verify_hypotheses(&f, 20000, 3);
        assert!(rep.pass);
        assert!(rep.mu_observed >= 1.0 - 1e-12);
        assert!(rep.bound_observed <= 9.0 + 1e-12);
    }

    #[test]
    fn coupling_validation() {
        let good = ScaleCoupling::power_law(2.0, vec![0.25, 0.125, 0.0625]);
        good.validate().unwrap();
        let bad_gamma = ScaleCoupling::power_law(0.5, vec![0.25, 0.125]);
        assert!(bad_gamma.validate().is_err());
        let not_decreasing = ScaleCoupling::power_law(2.0, vec![0.125, 0.25]);
        assert!(not_decreasing.validate().is_err());
        let entry = good.entries()[1];
        assert!((entry.delta - 0.125f64.powi(2)).abs() < 1e-18);
        assert!((entry.tau - 0.125).abs() < 1e-18);
    }
}
