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

fn l_map(chart: &ChartModel, pt: &FiberPoint) -> (Vec<Complex64>, f64) {
    let n = chart.n;
    let m = m0(chart, pt, 20);
    let minvt = m.transpose().inverse().unwrap();
    let mut input = Vec::new();
    for x in &pt.xi { input.push(*x); }
    for x in &pt.xi { input.push(-x.conj()); }
    let w = minvt.matvec(&input);
    // radial defect: distance of unbarred part from the xi line
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for a in 0..n {
        num += w[a] * pt.xi[a].conj();
        den += pt.xi[a].norm_sqr();
    }
    let lam = num / den;
    let mut defect = 0.0f64;
    for a in 0..n {
        defect = defect.max((w[a] - lam * pt.xi[a]).norm());
    }
    (w, defect)
}

fn main() {
    let chart = ChartModel { kind: ModelKind::Cpn, n: 2, c: 1.0 };
    let xi = vec![Complex64::new(0.4, 0.1), Complex64::new(-0.2, 0.3)];
    for zval in [0.0, 0.15] {
        let z = vec![Complex64::new(zval, -zval * 0.5), Complex64::new(0.05 * zval, 0.0)];
        let pt = FiberPoint::new(z, xi.clone());
        let (_, defect) = l_map(&chart, &pt);
        println!("z-scale {zval}: radial defect {defect:.3e}");
    }
}
