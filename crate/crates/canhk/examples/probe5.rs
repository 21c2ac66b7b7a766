use canhk::geometry::a_op::{a_module_at, Slot};
use canhk::geometry::chart::{ChartModel, FiberPoint};
use canhk::geometry::model::ModelKind;
use num_complex::Complex64;

fn main() {
    // Check: A(xi)^T applied to the pattern (xi, xibar) equals mu(t) * pattern,
    // with mu(t) = 2c t / 3, for CP^1, CP^2, CH^1 at generic chart points.
    for (kind, n, c) in [
        (ModelKind::Cpn, 1usize, 2.0),
        (ModelKind::Cpn, 2, 1.0),
        (ModelKind::Chn, 1, -2.0),
        (ModelKind::Chn, 2, -1.5),
    ] {
        let chart = ChartModel { kind, n, c };
        let z: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.1 + 0.05 * i as f64, -0.12)).collect();
        let xi: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.3 - 0.1 * i as f64, 0.2 + 0.07 * i as f64)).collect();
        let pt = FiberPoint::new(z, xi.clone());
        let t = chart.fiber_norm2(&pt);
        let a = a_module_at(&chart, &pt, Slot::A).transpose();
        let mut pattern = Vec::new();
        for x in &xi { pattern.push(*x); }
        for x in &xi { pattern.push(x.conj()); }
        let out = a.matvec(&pattern);
        let mu = 2.0 * c * t / 3.0;
        let mut worst = 0.0f64;
        for (o, p) in out.iter().zip(pattern.iter()) {
            worst = worst.max((o - p * mu).norm());
        }
        println!("{kind:?} n={n}: eigen-defect {worst:.3e} (t={t:.3}, mu={mu:.4})");
    }
}
