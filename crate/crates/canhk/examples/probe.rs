use canhk::fgen::Variant;
use canhk::geometry::a_op::Slot;
use canhk::geometry::chart::{ChartModel, FiberPoint};
use canhk::geometry::model::ModelKind;
use canhk::hstruct::checks::*;
use canhk::hstruct::field::StructureField;
use num_complex::Complex64;

fn main() {
    let chart = ChartModel { kind: ModelKind::Cpn, n: 1, c: 2.0 };
    let pt = FiberPoint::new(vec![Complex64::new(0.15, -0.1)], vec![Complex64::new(0.35, 0.2)]);
    for (v, s) in [
        (Variant::OnePlusF, Slot::A),
        (Variant::OnePlusF, Slot::B),
        (Variant::F, Slot::A),
        (Variant::F, Slot::B),
    ] {
        let f = StructureField::new(chart, v, s, 16);
        print!("variant {v} slot {s}: ");
        match normalization_residual(&f, &pt) {
            Ok(r) => print!("norm {r:.3e}  "),
            Err(e) => print!("norm ERR({e})  "),
        }
        match f.triple(&pt) {
            Ok(t) => print!("quat {:.3e}  real-defect {:.3e}  ", t.algebra_residual(), t.reality_defect),
            Err(e) => print!("quat ERR({e})  "),
        }
        for which in [StructureChoice::MainI, StructureChoice::ComplementaryJ] {
            match nijenhuis_convergence(&f, &pt, 0.02, which) {
                Ok(p) => print!("nij{which:?} c={:.2e} f={:.2e} ord={:.2} ext={:.2e}  ", p.coarse, p.fine, p.order, p.extrapolated),
                Err(e) => print!("nij{which:?} ERR({e})  "),
            }
        }
        println!();
    }
    // equivariance on CP1
    let f = StructureField::new(chart, Variant::OnePlusF, Slot::A, 16);
    match equivariance_residual(&f, &pt, std::f64::consts::FRAC_PI_3) {
        Ok(r) => println!("equivariance(1pf,A): {r:.3e}"),
        Err(e) => println!("equivariance ERR: {e}"),
    }
}
