//! Closed-form reference metric on the total space over the projective
//! line, used only by tests as an external ground truth for the
//! metric-level checks.
//!
//! The metric is the classical one with fiberwise Kähler potential: in
//! holomorphic coordinates `(z, w)` of the cotangent total space, the
//! potential is the base potential plus a radial profile `U(s)`,
//! `s = |w|^2 / h(z)`, whose derivative solves the fiberwise
//! Monge-Ampère constancy condition:
//!
//! ```text
//! U'(s) = (sqrt(1 + 2 c s) - 1) / (c s),   U'(0) = 1.
//! ```
//!
//! On the conjugate-tangent total space the holomorphic coordinates of the
//! main structure are `(z, w = h(z) conj(xi))`; composing with a radial
//! fiber reparametrization `xi -> rho(t) xi`, `t = h |xi|^2`, transports
//! the metric into the normalized gauge. The profile `rho` is pinned by
//! the normalization condition; see `rho_profile`.

use crate::geometry::chart::{ChartModel, FiberPoint};
use crate::linalg::CMat;
use num_complex::Complex64;

/// Radial derivative of the fiberwise potential.
fn u_prime(c: f64, s: f64) -> f64 {
    if s.abs() < 1e-12 {
        // Series fallback near the origin: 1 - c s / 2 + c^2 s^2 / 2 - ...
        return 1.0 - c * s / 2.0 + c * c * s * s / 2.0;
    }
    ((1.0 + 2.0 * c * s).sqrt() - 1.0) / (c * s)
}

/// Second radial derivative, by differentiating the closed form.
fn u_double_prime(c: f64, s: f64) -> f64 {
    if s.abs() < 1e-8 {
        return -c / 2.0 + c * c * s - 1.25 * c * c * c * s * s;
    }
    let root = (1.0 + 2.0 * c * s).sqrt();
    (c * s / root - (root - 1.0)) / (c * s * s)
}

/// Hessian metric of the potential `K0(z) + U(s)` in the holomorphic
/// coordinates `(z, w)`, as the 2x2 complex matrix `g_{alpha betabar}`.
/// Specific to the one-dimensional base.
fn potential_metric(chart: &ChartModel, z: Complex64, w: Complex64) -> CMat {
    let c = chart.c;
    let h = chart.metric_at(&[z])[(0, 0)].re;
    // psi = log h; for this chart dpsi/dz equals the Christoffel symbol.
    let gamma = chart.christoffel_at(&[z])[0];
    let s = w.norm_sqr() / h;
    let up = u_prime(c, s);
    let upp = u_double_prime(c, s);
    // Derivatives of s: ds/dw = wbar / h, ds/dz = -s * dpsi/dz.
    let mut g = CMat::zeros(2, 2);
    // g_{z zbar} = h + (U'' s + U') s |dpsi|^2 + c U' s h
    // using ddbar(log h) = -c h for the constant-curvature chart.
    let gzz = h + (upp * s + up) * s * gamma.norm_sqr() + c * up * s * h;
    g[(0, 0)] = Complex64::new(gzz, 0.0);
    // g_{z wbar} = -(U'' s + U') w dpsi/dz / h * ... = -(U'' s + U') (w/h) dpsi
    let gzw = -(upp * s + up) * (w / h) * gamma;
    g[(0, 1)] = gzw;
    g[(1, 0)] = gzw.conj();
    // g_{w wbar} = (U' + s U'') / h
    g[(1, 1)] = Complex64::new((up + s * upp) / h, 0.0);
    g
}

/// Determinant of the potential metric; constant in the fiber exactly when
/// the radial profile solves the Monge-Ampère condition. Exposed for the
/// oracle's internal self-test.
pub fn monge_ampere_det(chart: &ChartModel, z: Complex64, w: Complex64) -> f64 {
    let g = potential_metric(chart, z, w);
    (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]).re
}

/// The normalizing fiber reparametrization `rho(t)`, with derivative.
/// Valid for `2 c t < 1`.
fn rho_profile(c: f64, t: f64) -> (f64, f64) {
    let d = 1.0 - 2.0 * c * t;
    assert!(d > 0.0, "point outside the normalized gauge domain");
    let rho = d.powf(-0.5);
    let drho = c * d.powf(-1.5);
    (rho, drho)
}

/// Real 4x4 metric matrix (on `du, dv, dx, dy` tangent components) of the
/// reference metric at a point of the conjugate-tangent total space.
pub fn calabi_metric(chart: &ChartModel, pt: &FiberPoint) -> CMat {
    assert_eq!(chart.n, 1, "the reference metric is implemented over a one-dimensional base");
    let z = pt.z[0];
    let xi = pt.xi[0];
    let c = chart.c;
    let h = chart.metric_at(&pt.z)[(0, 0)].re;
    let t = h * xi.norm_sqr();
    let (rho, drho) = rho_profile(c, t);

    // Composite map: (z, xi) -> (z, xi' = rho’(t) xi) -> (z, w = h conj(xi')).
    // Differential in complexified coordinates; entries of the Jacobian of
    // xi' over (xi, xibar, z, zbar):
    let dxp_dxi = Complex64::new(rho + drho * t, 0.0);
    let dxp_dxibar = drho * h * xi * xi;
    // dt/dz = |xi|^2 dh/dz = t * dpsi; dpsi = Gamma for this chart.
    let gamma = chart.christoffel_at(&pt.z)[0];
    let dxp_dz = drho * t * gamma * xi;
    let dxp_dzbar = drho * t * gamma.conj() * xi;

    let xi_p = xi * rho;
    // w = h(z) conj(xi'):
    let dh_dz = gamma * h;
    let w = h * xi_p.conj();
    let dw_dxi = h * dxp_dxibar.conj();
    let dw_dxibar = h * dxp_dxi.conj();
    let dw_dz = dh_dz * xi_p.conj() + h * dxp_dzbar.conj();
    let dw_dzbar = dh_dz.conj() * xi_p.conj() + h * dxp_dz.conj();

    let g_hol = potential_metric(chart, z, w);

    // Pull back the Hermitian metric: for the map F with components
    // (z, w(z, zbar, xi, xibar)), the real metric is
    // 2 Re sum g_{alpha betabar} dF^alpha ox conj(dF^beta).
    // Complexified differentials of the two target coordinates over the
    // source basis (dxi, dxibar, dz, dzbar):
    let rows = [
        // dz-target
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        // dw-target
        [dw_dxi, dw_dxibar, dw_dz, dw_dzbar],
    ];
    // Sesquilinear form on source complexified coefficients.
    let mut q = CMat::zeros(4, 4);
    for alpha in 0..2 {
        for beta in 0..2 {
            let coeff = g_hol[(alpha, beta)];
            for a in 0..4 {
                for b in 0..4 {
                    q[(a, b)] += coeff * rows[alpha][a] * rows[beta][b].conj();
                }
            }
        }
    }
    // q(u, v) = sum q_ab c_a(u) conj(c_b(v)) over complexified components of
    // real tangent vectors; the real metric is 2 Re q(u, v). Real tangent
    // basis: du, dv, dx, dy with complexified components (dxi = du + i dv
    // etc): vector d/du has dxi-component 1, dxibar 1... work through the
    // dual pairing: a real vector with components (p,q,r,s) has
    // xi-component p + i q and z-component r + i s; its coefficient against
    // dxi is p + iq, against dxibar is p - iq.
    let comp = |k: usize| -> [Complex64; 4] {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        match k {
            0 => [one, one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], // d/du
            1 => [i, -i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],    // d/dv
            2 => [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), one, one], // d/dx
            _ => [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), i, -i],    // d/dy
        }
    };
    let mut g_real = CMat::zeros(4, 4);
    for u in 0..4 {
        for v in 0..4 {
            let cu = comp(u);
            let cv = comp(v);
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    acc += q[(a, b)] * cu[a] * cv[b].conj();
                }
            }
            g_real[(u, v)] = Complex64::new(2.0 * acc.re, 0.0);
        }
    }
    g_real
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::ModelKind;

    #[test]
    fn monge_ampere_determinant_is_fiberwise_constant() {
        let chart = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
        let z = Complex64::new(0.2, -0.1);
        let d0 = monge_ampere_det(&chart, z, Complex64::new(0.0, 0.0));
        for w in [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4), Complex64::new(0.6, -0.5)] {
            let d = monge_ampere_det(&chart, z, w);
            assert!((d - d0).abs() < 1e-10 * d0.abs(), "w = {w}: {d} vs {d0}");
        }
    }

    #[test]
    fn metric_is_symmetric_positive() {
        let chart = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
        let pt = FiberPoint::new(vec![Complex64::new(0.1, 0.2)], vec![Complex64::new(0.25, -0.15)]);
        let g = calabi_metric(&chart, &pt);
        assert!((&g - &g.transpose()).norm_max() < 1e-12);
        let (w, _) = crate::linalg::eigh(&g);
        assert!(w.iter().all(|&x| x > 0.0), "eigenvalues {w:?}");
    }

    #[test]
    fn restricts_to_base_metric_on_zero_section() {
        let chart = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
        let z = Complex64::new(0.15, -0.05);
        let pt = FiberPoint::new(vec![z], vec![Complex64::new(0.0, 0.0)]);
        let g = calabi_metric(&chart, &pt);
        let h = chart.metric_at(&[z])[(0, 0)].re;
        // Horizontal block: 2 h on dx, dy.
        assert!((g[(2, 2)].re - 2.0 * h).abs() < 1e-12);
        assert!((g[(3, 3)].re - 2.0 * h).abs() < 1e-12);
        assert!(g[(2, 3)].norm() < 1e-12);
        // Vertical block: the fiber metric matches h as well.
        assert!((g[(0, 0)].re - 2.0 * h).abs() < 1e-12);
    }
}
