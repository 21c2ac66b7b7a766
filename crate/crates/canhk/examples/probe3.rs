use canhk::fgen::{self, Variant};
use canhk::geometry::a_op::{a_module_at, Slot};
use canhk::geometry::chart::{ChartModel, FiberPoint};
use canhk::geometry::model::ModelKind;
use canhk::linalg::CMat;
use num_complex::Complex64;

// Build M0 = F * diag(1,-1) at a point.
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

fn build_j(chart: &ChartModel, pt: &FiberPoint, terms: usize, cand: usize) -> CMat {
    let n = chart.n;
    let m = m0(chart, pt, terms);
    let base = match cand / 2 {
        0 => m.clone(),
        1 => m.inverse().unwrap(),
        2 => m.transpose(),
        _ => m.transpose().inverse().unwrap(),
    };
    let sign = if cand % 2 == 0 { 1.0 } else { -1.0 };
    let hv = base.scale(Complex64::new(0.0, sign)); // hor->vert block = ± i * base
    let vh = hv.inverse().unwrap().scale(Complex64::new(-1.0, 0.0));
    let mut j_lc = CMat::zeros(4 * n, 4 * n);
    for i in 0..2 * n {
        for k in 0..2 * n {
            j_lc[(i, 2 * n + k)] = hv[(i, k)];
            j_lc[(2 * n + i, k)] = vh[(i, k)];
        }
    }
    // coordinate-frame correction
    let gx = chart.gamma_xi(pt);
    let mut s = CMat::identity(4 * n);
    let mut s_inv = CMat::identity(4 * n);
    for i in 0..n {
        for a in 0..n {
            s[(2 * n + i, a)] = gx[(a, i)];
            s[(3 * n + i, n + a)] = gx[(a, i)].conj();
            s_inv[(2 * n + i, a)] = -gx[(a, i)];
            s_inv[(3 * n + i, n + a)] = -gx[(a, i)].conj();
        }
    }
    &(&s * &j_lc) * &s_inv
}

fn norm_residual(chart: &ChartModel, pt: &FiberPoint, jc: &CMat) -> f64 {
    let n = chart.n;
    // tangent action = transpose; phi = -i(xi d/dxi - conj); contract.
    // work complexified: phi components in (d/dxi, d/dxibar, d/dz, d/dzbar):
    let mut phi = vec![Complex64::new(0.0, 0.0); 4 * n];
    for a in 0..n {
        phi[a] = Complex64::new(0.0, -1.0) * pt.xi[a];
        phi[n + a] = Complex64::new(0.0, 1.0) * pt.xi[a].conj();
    }
    let jt = jc.transpose();
    let w = jt.matvec(&phi);
    let mut worst = 0.0f64;
    for a in 0..n {
        let d = w[2 * n + a] - pt.xi[a];
        let db = w[3 * n + a] - pt.xi[a].conj();
        worst = worst.max(d.norm()).max(db.norm());
    }
    worst
}

fn nij(chart: &ChartModel, pt: &FiberPoint, terms: usize, cand: usize, step: f64) -> f64 {
    let n = chart.n;
    let dim = 4 * n;
    let disp = |coord: usize, d: f64| {
        let mut p = pt.clone();
        if coord < n { p.xi[coord] += Complex64::new(d, 0.0); }
        else if coord < 2 * n { p.xi[coord - n] += Complex64::new(0.0, d); }
        else if coord < 3 * n { p.z[coord - 2 * n] += Complex64::new(d, 0.0); }
        else { p.z[coord - 3 * n] += Complex64::new(0.0, d); }
        p
    };
    let j0 = canhk::hstruct::field::realify(&build_j(chart, pt, terms, cand), n).0.transpose();
    let mut dj = Vec::new();
    for l in 0..dim {
        let jp = canhk::hstruct::field::realify(&build_j(chart, &disp(l, step), terms, cand), n).0.transpose();
        let jm = canhk::hstruct::field::realify(&build_j(chart, &disp(l, -step), terms, cand), n).0.transpose();
        dj.push((&jp - &jm).scale(Complex64::new(0.5 / step, 0.0)));
    }
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..dim {
                    acc += j0[(l, i)] * dj[l][(k, j)];
                    acc -= j0[(l, j)] * dj[l][(k, i)];
                    acc -= j0[(k, l)] * (dj[i][(l, j)] - dj[j][(l, i)]);
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    worst
}

fn main() {
    let flat = ChartModel { kind: ModelKind::Flat, n: 1, c: 0.0 };
    let cp1 = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
    let pt = FiberPoint::new(vec![Complex64::new(0.15, -0.1)], vec![Complex64::new(0.35, 0.2)]);
    let _ = Variant::OnePlusF;
    println!("cand | flat-norm | cp1-norm | nij(h) | nij(h/2)");
    for cand in 0..8 {
        let fj = build_j(&flat, &pt, 14, cand);
        let fn_ = norm_residual(&flat, &pt, &fj);
        let cj = build_j(&cp1, &pt, 14, cand);
        let cn = norm_residual(&cp1, &pt, &cj);
        let nh = nij(&cp1, &pt, 14, cand, 0.02);
        let nh2 = nij(&cp1, &pt, 14, cand, 0.01);
        println!("{cand}: {fn_:.2e} | {cn:.2e} | {nh:.2e} | {nh2:.2e}");
    }
}
