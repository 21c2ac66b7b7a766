use canhk::fgen;
use canhk::geometry::a_op::{a_module_at, Slot};
use canhk::geometry::chart::{ChartModel, FiberPoint};
use canhk::geometry::model::ModelKind;
use canhk::linalg::CMat;
use num_complex::Complex64;

fn m0(chart: &ChartModel, pt: &FiberPoint, terms: usize) -> CMat {
    let n = chart.n;
    let a = a_module_at(chart, pt, Slot::A);
    let s = fgen::coefficients(terms);
    let f = &a.poly_no_const(&s.coeffs_f64(terms)) + &CMat::identity(2 * n);
    let mut t = CMat::identity(2 * n);
    for i in n..2 * n {
        t[(i, i)] = Complex64::new(-1.0, 0.0);
    }
    &f * &t
}

fn main() {
    let cp1 = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
    // L(xi) = (M0^T)^{-1} (xi, -xibar), unbarred part; prediction tau/Phi(t).
    println!("t | measured l(t) | 1/Phi(t) | diff");
    for k in 1..8 {
        let xi = Complex64::new(0.08 * k as f64, 0.05 * k as f64);
        let z = Complex64::new(0.1, -0.2);
        let pt = FiberPoint::new(vec![z], vec![xi]);
        let h = cp1.metric_at(&pt.z)[(0, 0)].re;
        let t = h * xi.norm_sqr();
        let m = m0(&cp1, &pt, 20);
        let minvt = m.transpose().inverse().unwrap();
        let l = minvt.matvec(&[xi, -xi.conj()]);
        let ell = l[0] / xi;
        let x = (2.0 * cp1.c * t).sqrt();
        let phi = x / x.tanh();
        println!("{t:.4} | ({:.6},{:.2e}) | {:.6} | {:.2e}", ell.re, ell.im, 1.0/phi, (ell - Complex64::new(1.0/phi,0.0)).norm());
        // also check the barred component consistency: l[1] =? conj(l[0])-pattern * xibar
        let ellb = l[1] / xi.conj();
        assert!((ellb - ell.conj()).norm() < 1e-10, "barred mismatch");
    }
}
