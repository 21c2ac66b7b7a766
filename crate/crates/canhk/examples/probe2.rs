use canhk::geometry::a_op::{a_module_from_rop, Slot};
use canhk::geometry::model::{cpn, curvature_operator};
use canhk::weil::{anticommutator_sigma_matrix, d2_from_curvature};
use num_complex::Complex64;

fn main() {
    let m = cpn(2, 2.0).unwrap();
    let d2 = d2_from_curvature(&m).unwrap();
    let a_weil = anticommutator_sigma_matrix(&d2);
    let xi = vec![Complex64::new(0.3, -0.2), Complex64::new(-0.1, 0.4)];
    let a_w = a_weil.eval(&xi);
    let rop = curvature_operator(&m);
    let a_geo = a_module_from_rop(&rop, 2, &xi, Slot::A);
    println!("weil A evaluated:");
    for i in 0..4 {
        for j in 0..4 {
            print!("({:+.4},{:+.4}) ", a_w[(i, j)].re, a_w[(i, j)].im);
        }
        println!();
    }
    println!("geometry a_module:");
    for i in 0..4 {
        for j in 0..4 {
            print!("({:+.4},{:+.4}) ", a_geo[(i, j)].re, a_geo[(i, j)].im);
        }
        println!();
    }
    println!("difference: {:.3e}", (&a_w - &a_geo).norm_max());
    let diff_t = (&a_w - &a_geo.transpose()).norm_max();
    println!("difference vs transpose: {diff_t:.3e}");
    // also compare block-transpose patterns
    let mut swapped = a_geo.clone();
    for i in 0..2 {
        for j in 0..2 {
            swapped[(i, j)] = a_geo[(j, i)];
            swapped[(2 + i, 2 + j)] = a_geo[(2 + j, 2 + i)];
            swapped[(2 + i, j)] = a_geo[(j, 2 + i)];
            swapped[(i, 2 + j)] = a_geo[(2 + j, i)];
        }
    }
    println!("difference vs full transpose-reindex: {:.3e}", (&a_w - &swapped).norm_max());
}
