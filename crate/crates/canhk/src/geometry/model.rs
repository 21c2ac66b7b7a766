//! Point models of Kähler manifolds: a Hermitian metric and a curvature
//! tensor with validated symmetries at a single point.
//!
//! The built-in models carry constant holomorphic sectional curvature `c`,
//! with curvature built from the ansatz
//!
//! ```text
//! R_{a bbar i jbar} = (c/2) (h_{a bbar} h_{i jbar} + h_{a jbar} h_{i bbar}).
//! ```

use crate::linalg::{eigh, CMat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Flat,
    /// Projective space scale, `c > 0`.
    Cpn,
    /// Hyperbolic scale, `c < 0`.
    Chn,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Flat => write!(f, "flat"),
            ModelKind::Cpn => write!(f, "cpn"),
            ModelKind::Chn => write!(f, "chn"),
        }
    }
}

/// All-covariant curvature coefficients `R_{a bbar i jbar}`, stored dense.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvTensor {
    pub n: usize,
    data: Vec<Complex64>,
}

impl CurvTensor {
    pub fn zeros(n: usize) -> Self {
        CurvTensor { n, data: vec![Complex64::new(0.0, 0.0); n * n * n * n] }
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, i: usize, j: usize) -> usize {
        ((a * self.n + b) * self.n + i) * self.n + j
    }

    pub fn get(&self, a: usize, b: usize, i: usize, j: usize) -> Complex64 {
        self.data[self.idx(a, b, i, j)]
    }

    pub fn set(&mut self, a: usize, b: usize, i: usize, j: usize, v: Complex64) {
        let k = self.idx(a, b, i, j);
        self.data[k] = v;
    }

    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A Kähler model at a point: complex dimension, Hermitian metric on the
/// holomorphic tangent fiber, and curvature with the Kähler symmetries.
/// The optional `r20` slot holds a would-be torsion-type component so the
/// rejection path for non-(1,1) curvature is exercisable; it is zero for
/// every built-in model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KahlerModel {
    pub kind: ModelKind,
    pub n: usize,
    pub c: f64,
    #[serde(with = "cmat_serde")]
    pub h: CMat,
    pub curv: CurvTensor,
    pub r20_norm: f64,
}

mod cmat_serde {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: serde::Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.rows * m.cols + 2))?;
        seq.serialize_element(&(m.rows as f64))?;
        seq.serialize_element(&(m.cols as f64))?;
        for j in 0..m.cols {
            for i in 0..m.rows {
                seq.serialize_element(&m[(i, j)].re)?;
                seq.serialize_element(&m[(i, j)].im)?;
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let v: Vec<f64> = serde::Deserialize::deserialize(d)?;
        if v.len() < 2 {
            return Err(serde::de::Error::custom("matrix payload too short"));
        }
        let rows = v[0] as usize;
        let cols = v[1] as usize;
        if v.len() != 2 + 2 * rows * cols {
            return Err(serde::de::Error::custom("matrix payload size mismatch"));
        }
        let mut m = CMat::zeros(rows, cols);
        let mut k = 2;
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = Complex64::new(v[k], v[k + 1]);
                k += 2;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelValidation {
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

#[derive(Debug)]
pub enum GeometryError {
    InvalidDimension(usize),
    InvalidScale { kind: ModelKind, c: f64 },
    ValidationFailed(ModelValidation),
}

impl std::fmt::Display for GeometryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometryError::InvalidDimension(n) => write!(f, "fiber dimension {n} not supported"),
            GeometryError::InvalidScale { kind, c } => {
                write!(f, "scale c = {c} invalid for model {kind}")
            }
            GeometryError::ValidationFailed(v) => {
                let failing: Vec<&str> = v
                    .checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| c.name.as_str())
                    .collect();
                write!(f, "model validation failed: {}", failing.join(", "))
            }
        }
    }
}

impl std::error::Error for GeometryError {}

fn constant_curvature(n: usize, c: f64, h: &CMat) -> CurvTensor {
    let mut r = CurvTensor::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let v = (h[(a, b)] * h[(i, j)] + h[(a, j)] * h[(i, b)]) * (c / 2.0);
                    r.set(a, b, i, j, v);
                }
            }
        }
    }
    r
}

fn build(kind: ModelKind, n: usize, c: f64) -> Result<KahlerModel, GeometryError> {
    if n < 1 || n > 4 {
        return Err(GeometryError::InvalidDimension(n));
    }
    // Unit metric at the model point; charts carry the position dependence.
    let scale = match kind {
        ModelKind::Flat => 1.0,
        ModelKind::Cpn | ModelKind::Chn => 2.0 / c.abs(),
    };
    let h = CMat::identity(n).scale(Complex64::new(scale, 0.0));
    let curv = match kind {
        ModelKind::Flat => CurvTensor::zeros(n),
        _ => constant_curvature(n, c, &h),
    };
    let model = KahlerModel { kind, n, c, h, curv, r20_norm: 0.0 };
    let v = validate(&model);
    if !v.pass {
        return Err(GeometryError::ValidationFailed(v));
    }
    Ok(model)
}

/// Flat model: zero curvature, unit metric.
pub fn flat(n: usize) -> Result<KahlerModel, GeometryError> {
    build(ModelKind::Flat, n, 0.0)
}

/// Constant positive holomorphic sectional curvature `c > 0`.
pub fn cpn(n: usize, c: f64) -> Result<KahlerModel, GeometryError> {
    if !(c > 0.0) {
        return Err(GeometryError::InvalidScale { kind: ModelKind::Cpn, c });
    }
    build(ModelKind::Cpn, n, c)
}

/// Constant negative holomorphic sectional curvature `c < 0`.
pub fn chn(n: usize, c: f64) -> Result<KahlerModel, GeometryError> {
    if !(c < 0.0) {
        return Err(GeometryError::InvalidScale { kind: ModelKind::Chn, c });
    }
    build(ModelKind::Chn, n, c)
}

/// Runs the full identity suite on a model.
pub fn validate(model: &KahlerModel) -> ModelValidation {
    let n = model.n;
    let mut checks = Vec::new();
    let tol = 1e-12 * (1.0 + model.curv.norm_max());

    // Metric: Hermitian and positive definite.
    let mut herm: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            herm = herm.max((model.h[(i, j)] - model.h[(j, i)].conj()).norm());
        }
    }
    checks.push(IdentityCheck {
        name: "metric_hermitian".into(),
        residual: herm,
        pass: herm < 1e-12,
    });
    let (w, _) = eigh(&model.h);
    let min_eig = w.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.push(IdentityCheck {
        name: "metric_positive_definite".into(),
        residual: (-min_eig).max(0.0),
        pass: min_eig > 1e-12,
    });

    // Curvature symmetries.
    let mut sym_unbarred: f64 = 0.0;
    let mut sym_barred: f64 = 0.0;
    let mut reality: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let r = model.curv.get(a, b, i, j);
                    sym_unbarred = sym_unbarred.max((r - model.curv.get(i, b, a, j)).norm());
                    sym_barred = sym_barred.max((r - model.curv.get(a, j, i, b)).norm());
                    reality = reality.max((r.conj() - model.curv.get(b, a, j, i)).norm());
                }
            }
        }
    }
    checks.push(IdentityCheck {
        name: "curvature_pair_symmetry_unbarred".into(),
        residual: sym_unbarred,
        pass: sym_unbarred < tol,
    });
    checks.push(IdentityCheck {
        name: "curvature_pair_symmetry_barred".into(),
        residual: sym_barred,
        pass: sym_barred < tol,
    });
    checks.push(IdentityCheck {
        name: "curvature_reality".into(),
        residual: reality,
        pass: reality < tol,
    });
    // In the Kähler setting the first Bianchi identity is exactly the full
    // symmetry in the unbarred and barred slots, checked above; record the
    // combined residual under its own name.
    let bianchi = sym_unbarred.max(sym_barred);
    checks.push(IdentityCheck { name: "first_bianchi".into(), residual: bianchi, pass: bianchi < tol });
    checks.push(IdentityCheck {
        name: "no_two_zero_component".into(),
        residual: model.r20_norm,
        pass: model.r20_norm < 1e-14,
    });

    let pass = checks.iter().all(|c| c.pass);
    ModelValidation { checks, pass }
}

/// Ricci tensor `Ric_{i jbar} = h^{b abar} R_{a bbar i jbar}` (first pair
/// contracted with the inverse metric).
pub fn ricci(model: &KahlerModel) -> CMat {
    let n = model.n;
    let hinv = model.h.inverse().expect("metric is invertible");
    CMat::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += hinv[(b, a)].conj() * model.curv.get(a, b, i, j);
            }
        }
        acc
    })
}

/// Holomorphic sectional curvature of a tangent vector:
/// `R(v, vbar, v, vbar) / |v|_h^4`.
pub fn holomorphic_sectional(model: &KahlerModel, v: &[Complex64]) -> f64 {
    let n = model.n;
    let mut num = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            for i in 0..n {
                for j in 0..n {
                    num += model.curv.get(a, b, i, j) * v[a] * v[b].conj() * v[i] * v[j].conj();
                }
            }
        }
    }
    let mut nv = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            nv += model.h[(a, b)] * v[a] * v[b].conj();
        }
    }
    num.re / (nv.re * nv.re)
}

/// Curvature acting on the cotangent fiber, `Rop[b][a][i][j]` being the
/// coefficient of the endomorphism-valued (1,1)-form:
/// `Rop^b_{a i jbar} = -h^{b cbar} R_{a cbar i jbar}`.
///
/// The raised index pairs with the barred slot of the stored inverse, so
/// the matrix inverse enters transposed.
pub fn curvature_operator(model: &KahlerModel) -> Vec<Complex64> {
    let n = model.n;
    let hinv = model.h.inverse().expect("metric is invertible");
    let mut rop = vec![Complex64::new(0.0, 0.0); n * n * n * n];
    for b in 0..n {
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for cs in 0..n {
                        acc += hinv[(cs, b)] * model.curv.get(a, cs, i, j);
                    }
                    rop[((b * n + a) * n + i) * n + j] = -acc;
                }
            }
        }
    }
    rop
}

#[inline]
pub fn rop_get(rop: &[Complex64], n: usize, b: usize, a: usize, i: usize, j: usize) -> Complex64 {
    rop[((b * n + a) * n + i) * n + j]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_model_has_zero_curvature() {
        let m = flat(2).unwrap();
        assert_eq!(m.curv.norm_max(), 0.0);
        assert!(validate(&m).pass);
    }

    #[test]
    fn sectional_curvature_is_constant() {
        let m = cpn(1, 2.0).unwrap();
        let v = vec![Complex64::new(0.7, -0.3)];
        assert!((holomorphic_sectional(&m, &v) - 2.0).abs() < 1e-12);
        let m = cpn(2, 1.5).unwrap();
        for v in [
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.9)],
        ] {
            assert!((holomorphic_sectional(&m, &v) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn einstein_factor() {
        // Ricci = (n+1) c / 2 * h for the constant-curvature ansatz.
        for (n, c) in [(1usize, 2.0), (2, 1.0), (3, 0.5)] {
            let m = cpn(n, c).unwrap();
            let ric = ricci(&m);
            let expect = m.h.scale(Complex64::new((n as f64 + 1.0) * c / 2.0, 0.0));
            assert!((&ric - &expect).norm_max() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn chn_validates() {
        let m = chn(1, -2.0).unwrap();
        assert!(validate(&m).pass);
        let v = vec![Complex64::new(1.0, 0.0)];
        assert!((holomorphic_sectional(&m, &v) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn corrupted_pair_symmetry_fails_named_identity() {
        let mut m = cpn(2, 1.0).unwrap();
        let v = m.curv.get(0, 0, 1, 1);
        m.curv.set(0, 0, 1, 1, v + Complex64::new(0.1, 0.0));
        let report = validate(&m);
        assert!(!report.pass);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "curvature_pair_symmetry_unbarred" && !c.pass));
    }

    #[test]
    fn invalid_scales_rejected() {
        assert!(cpn(1, -1.0).is_err());
        assert!(chn(1, 1.0).is_err());
        assert!(flat(0).is_err());
    }

    #[test]
    fn model_json_roundtrip() {
        let m = cpn(2, 2.0).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let m2: KahlerModel = serde_json::from_str(&s).unwrap();
        assert!((&m.h - &m2.h).norm_max() < 1e-15);
        assert!((m.curv.get(0, 1, 1, 0) - m2.curv.get(0, 1, 1, 0)).norm() < 1e-15);
    }
}
