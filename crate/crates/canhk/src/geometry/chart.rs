//! Affine-chart data for the built-in models: metric, Christoffel symbols
//! and curvature as closed-form functions of the chart point.
//!
//! The flat chart is global; the projective and hyperbolic charts are the
//! standard affine ones, with domain `||z|| < margin` for the hyperbolic
//! case.

use super::model::{KahlerModel, ModelKind};
use crate::linalg::CMat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the total space over a chart: base coordinates plus a
/// holomorphic tangent vector as the fiber coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberPoint {
    pub z: Vec<Complex64>,
    pub xi: Vec<Complex64>,
}

impl FiberPoint {
    pub fn new(z: Vec<Complex64>, xi: Vec<Complex64>) -> Self {
        assert_eq!(z.len(), xi.len());
        FiberPoint { z, xi }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    /// Fiber rotation in the total-space structure: the fiber coordinate
    /// transforms with the conjugate phase.
    pub fn rotate_fiber(&self, theta: f64) -> FiberPoint {
        let ph = Complex64::from_polar(1.0, -theta);
        FiberPoint { z: self.z.clone(), xi: self.xi.iter().map(|x| x * ph).collect() }
    }

    pub fn scale_fiber(&self, t: f64) -> FiberPoint {
        FiberPoint { z: self.z.clone(), xi: self.xi.iter().map(|x| x * t).collect() }
    }
}

/// Chart-level model data; all evaluators are closed-form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartModel {
    pub kind: ModelKind,
    pub n: usize,
    pub c: f64,
}

impl ChartModel {
    pub fn from_model(m: &KahlerModel) -> Self {
        ChartModel { kind: m.kind, n: m.n, c: m.c }
    }

    fn norm2(z: &[Complex64]) -> f64 {
        z.iter().map(|w| w.norm_sqr()).sum()
    }

    /// Chart domain test with a safety margin for finite differencing.
    pub fn in_domain(&self, z: &[Complex64], margin: f64) -> bool {
        match self.kind {
            ModelKind::Flat | ModelKind::Cpn => true,
            ModelKind::Chn => Self::norm2(z).sqrt() + margin < 1.0,
        }
    }

    /// Hermitian metric at a chart point.
    pub fn metric_at(&self, z: &[Complex64]) -> CMat {
        let n = self.n;
        assert_eq!(z.len(), n);
        match self.kind {
            ModelKind::Flat => CMat::identity(n),
            ModelKind::Cpn => {
                let lam = 2.0 / self.c;
                let d = 1.0 + Self::norm2(z);
                CMat::from_fn(n, n, |a, b| {
                    let kron = if a == b { Complex64::new(d, 0.0) } else { Complex64::new(0.0, 0.0) };
                    (kron - z[a].conj() * z[b]) * (lam / (d * d))
                })
            }
            ModelKind::Chn => {
                let lam = 2.0 / (-self.c);
                let d = 1.0 - Self::norm2(z);
                assert!(d > 0.0, "point outside the hyperbolic chart");
                CMat::from_fn(n, n, |a, b| {
                    let kron = if a == b { Complex64::new(d, 0.0) } else { Complex64::new(0.0, 0.0) };
                    (kron + z[a].conj() * z[b]) * (lam / (d * d))
                })
            }
        }
    }

    /// Christoffel symbols `Gamma^a_{i b}`, symmetric in `(i, b)`; the
    /// chart connection identity `Gamma = h^{-1} dh` is validated by finite
    /// differences in the tests.
    pub fn christoffel_at(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(z.len(), n);
        let mut g = vec![Complex64::new(0.0, 0.0); n * n * n];
        match self.kind {
            ModelKind::Flat => {}
            ModelKind::Cpn => {
                let d = 1.0 + Self::norm2(z);
                for a in 0..n {
                    for i in 0..n {
                        for b in 0..n {
                            let mut v = Complex64::new(0.0, 0.0);
                            if a == i {
                                v += z[b].conj();
                            }
                            if a == b {
                                v += z[i].conj();
                            }
                            g[(a * n + i) * n + b] = -v / d;
                        }
                    }
                }
            }
            ModelKind::Chn => {
                let d = 1.0 - Self::norm2(z);
                for a in 0..n {
                    for i in 0..n {
                        for b in 0..n {
                            let mut v = Complex64::new(0.0, 0.0);
                            if a == i {
                                v += z[b].conj();
                            }
                            if a == b {
                                v += z[i].conj();
                            }
                            g[(a * n + i) * n + b] = v / d;
                        }
                    }
                }
            }
        }
        g
    }

    /// All-covariant curvature at a chart point, from the constant
    /// holomorphic-sectional-curvature ansatz with the local metric.
    pub fn curvature_at(&self, z: &[Complex64]) -> super::model::CurvTensor {
        let n = self.n;
        let h = self.metric_at(z);
        let mut r = super::model::CurvTensor::zeros(n);
        if self.kind == ModelKind::Flat {
            return r;
        }
        for a in 0..n {
            for b in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let v = (h[(a, b)] * h[(i, j)] + h[(a, j)] * h[(i, b)]) * (self.c / 2.0);
                        r.set(a, b, i, j, v);
                    }
                }
            }
        }
        r
    }

    /// Curvature acting on the cotangent fiber at a chart point, indexed as
    /// in [`super::model::curvature_operator`].
    pub fn curvature_operator_at(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let h = self.metric_at(z);
        let hinv = h.inverse().expect("chart metric is invertible");
        let r = self.curvature_at(z);
        let mut rop = vec![Complex64::new(0.0, 0.0); n * n * n * n];
        for b in 0..n {
            for a in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for cs in 0..n {
                            acc += hinv[(cs, b)] * r.get(a, cs, i, j);
                        }
                        rop[((b * n + a) * n + i) * n + j] = -acc;
                    }
                }
            }
        }
        rop
    }

    /// `Gamma^a_{i b} xi^b`, the vertical-frame correction matrix, indexed
    /// `(a, i)`.
    pub fn gamma_xi(&self, pt: &FiberPoint) -> CMat {
        let n = self.n;
        let g = self.christoffel_at(&pt.z);
        CMat::from_fn(n, n, |a, i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..n {
                acc += g[(a * n + i) * n + b] * pt.xi[b];
            }
            acc
        })
    }

    /// Fiber norm squared `t = |xi|_h^2` at the point.
    pub fn fiber_norm2(&self, pt: &FiberPoint) -> f64 {
        let h = self.metric_at(&pt.z);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..self.n {
            for b in 0..self.n {
                acc += h[(a, b)] * pt.xi[a] * pt.xi[b].conj();
            }
        }
        acc.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::{cpn, rop_get};

    fn fd_dh(chart: &ChartModel, z: &[Complex64], dir: usize, step: f64) -> CMat {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[dir] += Complex64::new(step, 0.0);
        zm[dir] -= Complex64::new(step, 0.0);
        let hp = chart.metric_at(&zp);
        let hm = chart.metric_at(&zm);
        let re = (&hp - &hm).scale(Complex64::new(0.5 / step, 0.0));
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[dir] += Complex64::new(0.0, step);
        zm[dir] -= Complex64::new(0.0, step);
        let hp = chart.metric_at(&zp);
        let hm = chart.metric_at(&zm);
        let im = (&hp - &hm).scale(Complex64::new(0.5 / step, 0.0));
        // Holomorphic derivative: d/dz = (d/dx - i d/dy)/2.
        &re.scale(Complex64::new(0.5, 0.0)) + &im.scale(Complex64::new(0.0, -0.5))
    }

    fn christoffel_fd_residual(chart: &ChartModel, z: &[Complex64], step: f64) -> f64 {
        let n = chart.n;
        let h = chart.metric_at(z);
        let hinv = h.inverse().unwrap();
        let g = chart.christoffel_at(z);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let dh = fd_dh(chart, z, i, step);
            // Gamma^a_{i b} = h^{a cbar} d_i h_{b cbar}
            for a in 0..n {
                for b in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for cs in 0..n {
                        acc += hinv[(cs, a)] * dh[(b, cs)];
                    }
                    worst = worst.max((acc - g[(a * n + i) * n + b]).norm());
                }
            }
        }
        worst
    }

    #[test]
    fn christoffel_matches_metric_derivative() {
        let pts = [
            vec![Complex64::new(0.1, -0.2)],
            vec![Complex64::new(-0.3, 0.15)],
        ];
        for kind_c in [(ModelKind::Cpn, 2.0), (ModelKind::Chn, -2.0)] {
            let chart = ChartModel { kind: kind_c.0, n: 1, c: kind_c.1 };
            for z in &pts {
                let r1 = christoffel_fd_residual(&chart, z, 1e-3);
                let r2 = christoffel_fd_residual(&chart, z, 5e-4);
                assert!(r1 < 1e-4, "{kind_c:?}: residual {r1}");
                // Second order: quartering under halving.
                assert!(r2 < r1 / 3.0 || r2 < 1e-10, "{kind_c:?}: {r1} -> {r2}");
            }
        }
        let chart = ChartModel { kind: ModelKind::Cpn, n: 2, c: 1.0 };
        let z = vec![Complex64::new(0.1, 0.05), Complex64::new(-0.2, 0.1)];
        assert!(christoffel_fd_residual(&chart, &z, 1e-3) < 1e-4);
    }

    #[test]
    fn christoffel_symmetric_lower_indices() {
        let chart = ChartModel { kind: ModelKind::Cpn, n: 2, c: 2.0 };
        let z = vec![Complex64::new(0.2, -0.1), Complex64::new(0.05, 0.3)];
        let g = chart.christoffel_at(&z);
        let n = 2;
        for a in 0..n {
            for i in 0..n {
                for b in 0..n {
                    let d = (g[(a * n + i) * n + b] - g[(a * n + b) * n + i]).norm();
                    assert!(d < 1e-15, "torsion-freeness of the chart connection");
                }
            }
        }
    }

    #[test]
    fn chart_curvature_matches_finite_difference_of_connection() {
        // d/dzbar_j Gamma^b_{i a} should reproduce the curvature operator.
        let chart = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
        let z = vec![Complex64::new(0.0, 0.0)];
        let rop = chart.curvature_operator_at(&z);
        let fd = |step: f64| -> f64 {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[0] += Complex64::new(step, 0.0);
            zm[0] -= Complex64::new(step, 0.0);
            let gp = chart.christoffel_at(&zp);
            let gm = chart.christoffel_at(&zm);
            let d_re = (gp[0] - gm[0]) / (2.0 * step);
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[0] += Complex64::new(0.0, step);
            zm[0] -= Complex64::new(0.0, step);
            let gp = chart.christoffel_at(&zp);
            let gm = chart.christoffel_at(&zm);
            let d_im = (gp[0] - gm[0]) / (2.0 * step);
            // Antiholomorphic derivative: (d/dx + i d/dy)/2.
            let dbar = (d_re + Complex64::new(0.0, 1.0) * d_im) * 0.5;
            (dbar - rop_get(&rop, 1, 0, 0, 0, 0)).norm()
        };
        let r1 = fd(1e-3);
        let r2 = fd(5e-4);
        assert!(r1 < 1e-5, "residual {r1}");
        assert!(r2 < r1 / 3.0 || r2 < 1e-12);
    }

    #[test]
    fn chart_origin_matches_point_model() {
        let model = cpn(2, 2.0).unwrap();
        let chart = ChartModel::from_model(&model);
        let z = vec![Complex64::new(0.0, 0.0); 2];
        let h = chart.metric_at(&z);
        assert!((&h - &model.h).norm_max() < 1e-15);
        let r = chart.curvature_at(&z);
        assert!((r.get(0, 1, 1, 0) - model.curv.get(0, 1, 1, 0)).norm() < 1e-15);
    }

    #[test]
    fn hyperbolic_domain() {
        let chart = ChartModel { kind: ModelKind::Chn, n: 1, c: -2.0 };
        assert!(chart.in_domain(&[Complex64::new(0.5, 0.0)], 0.1));
        assert!(!chart.in_domain(&[Complex64::new(0.95, 0.0)], 0.1));
    }
}
