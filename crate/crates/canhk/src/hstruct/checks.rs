//! Field-level residual checks: normalization, integrability by finite
//! differences, metric-level two-forms and their closedness.

use super::field::{rotation_coeff_matrix, rotation_vector, tautological_vector, FieldError, QuatTriple, StructureField};
use crate::geometry::chart::FiberPoint;
use crate::linalg::CMat;
use num_complex::Complex64;

/// Which almost complex structure a finite-difference check targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureChoice {
    MainI,
    ComplementaryJ,
}

/// Norm of `j(phi) - tau` at a point, in the model metric.
///
/// `phi` is the rotation generator, a vertical vector; applying the real
/// operator recovered from the triple and projecting to the base must
/// reproduce the fiber coordinate read as a tangent vector.
pub fn normalization_residual(field: &StructureField, pt: &FiberPoint) -> Result<f64, FieldError> {
    let n = field.dim();
    let j_real = field.j_real(pt)?;
    let j_tan = j_real.transpose();
    let phi = rotation_vector(pt);
    let phi_c: Vec<Complex64> = phi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let w = j_tan.matvec(&phi_c);
    let tau = tautological_vector(pt);
    // Horizontal block, complexified: X^i = x-component + i * y-component.
    let h = field.chart.metric_at(&pt.z);
    let mut diff = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let xi_c = Complex64::new(w[2 * n + i].re - tau[2 * n + i], w[3 * n + i].re - tau[3 * n + i]);
        diff[i] = xi_c;
    }
    let mut norm2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            norm2 += (h[(a, b)] * diff[a] * diff[b].conj()).re;
        }
    }
    Ok(norm2.max(0.0).sqrt())
}

/// Real tangent-side matrix of the chosen structure at a point.
fn tangent_matrix(
    field: &StructureField,
    pt: &FiberPoint,
    which: StructureChoice,
) -> Result<CMat, FieldError> {
    let m = match which {
        StructureChoice::MainI => field.i_real(pt)?,
        StructureChoice::ComplementaryJ => field.j_real(pt)?,
    };
    Ok(m.transpose())
}

fn displace(pt: &FiberPoint, coord: usize, n: usize, delta: f64) -> FiberPoint {
    let mut p = pt.clone();
    if coord < n {
        p.xi[coord] += Complex64::new(delta, 0.0);
    } else if coord < 2 * n {
        p.xi[coord - n] += Complex64::new(0.0, delta);
    } else if coord < 3 * n {
        p.z[coord - 2 * n] += Complex64::new(delta, 0.0);
    } else {
        p.z[coord - 3 * n] += Complex64::new(0.0, delta);
    }
    p
}

/// Central-difference Nijenhuis tensor norm of the chosen structure.
///
/// For an integrable structure the residual is pure differencing error and
/// decays at second order in the step.
pub fn nijenhuis_residual(
    field: &StructureField,
    pt: &FiberPoint,
    step: f64,
    which: StructureChoice,
) -> Result<f64, FieldError> {
    let n = field.dim();
    let dim = 4 * n;
    if !field.chart.in_domain(&pt.z, 2.0 * step) {
        return Err(FieldError::OutsideChart);
    }
    let j0 = tangent_matrix(field, pt, which)?;
    let mut dj = Vec::with_capacity(dim);
    for l in 0..dim {
        let jp = tangent_matrix(field, &displace(pt, l, n, step), which)?;
        let jm = tangent_matrix(field, &displace(pt, l, n, -step), which)?;
        dj.push((&jp - &jm).scale(Complex64::new(0.5 / step, 0.0)));
    }
    let mut worst: f64 = 0.0;
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
    Ok(worst)
}

/// Residuals at `step` and `step/2` plus the measured order and the
/// Richardson-extrapolated value.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ConvergenceProbe {
    pub coarse: f64,
    pub fine: f64,
    pub order: f64,
    pub extrapolated: f64,
}

pub fn nijenhuis_convergence(
    field: &StructureField,
    pt: &FiberPoint,
    step: f64,
    which: StructureChoice,
) -> Result<ConvergenceProbe, FieldError> {
    let coarse = nijenhuis_residual(field, pt, step, which)?;
    let fine = nijenhuis_residual(field, pt, step / 2.0, which)?;
    let order = if fine > 0.0 && coarse > 0.0 { (coarse / fine).log2() } else { f64::INFINITY };
    let extrapolated = ((4.0 * fine - coarse) / 3.0).abs();
    Ok(ConvergenceProbe { coarse, fine, order, extrapolated })
}

#[derive(Debug)]
pub enum FormError {
    NotAntisymmetric { defect: f64 },
    Field(FieldError),
}

impl std::fmt::Display for FormError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormError::NotAntisymmetric { defect } => {
                write!(f, "form is not antisymmetric (defect {defect:.3e}); metric is not hyper-hermitian for this triple")
            }
            FormError::Field(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for FormError {}

impl From<FieldError> for FormError {
    fn from(e: FieldError) -> Self {
        FormError::Field(e)
    }
}

/// The complex two-form `Omega(u, v) = h(u, j v)` built from a Riemannian
/// metric and the triple, as a matrix over real tangent components.
/// `h` here is the sesquilinear pairing of the main structure,
/// `g - i g(I ., .)`. Antisymmetry is asserted; its failure means the
/// metric is not hyper-hermitian for the triple.
pub fn omega_from(g: &CMat, triple: &QuatTriple, tol: f64) -> Result<CMat, FormError> {
    let dim = g.rows;
    let i_tan = triple.i_mat.transpose();
    let j_tan = triple.j_mat.transpose();
    let mut omega = CMat::zeros(dim, dim);
    // h(e_u, j e_v) = g(e_u, J e_v) - i g(I e_u, J e_v)
    for u in 0..dim {
        for v in 0..dim {
            let mut g_u_jv = Complex64::new(0.0, 0.0);
            let mut g_iu_jv = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                let jv_k = j_tan[(k, v)];
                g_u_jv += g[(u, k)] * jv_k;
            }
            for k in 0..dim {
                for l in 0..dim {
                    g_iu_jv += i_tan[(k, u)] * g[(k, l)] * j_tan[(l, v)];
                }
            }
            omega[(u, v)] = g_u_jv - Complex64::new(0.0, 1.0) * g_iu_jv;
        }
    }
    let defect = (&omega + &omega.transpose()).norm_max();
    if defect > tol * (1.0 + omega.norm_max()) {
        return Err(FormError::NotAntisymmetric { defect });
    }
    Ok(omega)
}

/// Positivity of the metric reconstructed from the form and the
/// complementary structure: the symmetric part of `-Re Omega(., J .)` must
/// be positive definite.
pub fn positivity_holds(omega: &CMat, triple: &QuatTriple, tol: f64) -> bool {
    let dim = omega.rows;
    let j_tan = triple.j_mat.transpose();
    let mut s = CMat::zeros(dim, dim);
    for u in 0..dim {
        for v in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += omega[(u, k)] * j_tan[(k, v)];
            }
            s[(u, v)] = Complex64::new(-acc.re, 0.0);
        }
    }
    let sym = CMat::from_fn(dim, dim, |i, j| (s[(i, j)] + s[(j, i)]) * 0.5);
    let (w, _) = crate::linalg::eigh(&sym);
    w.iter().all(|&x| x > tol)
}

/// Central-difference exterior derivative norm of a two-form field.
pub fn closedness_residual(
    form_at: &dyn Fn(&FiberPoint) -> Result<CMat, FormError>,
    pt: &FiberPoint,
    n: usize,
    step: f64,
) -> Result<f64, FormError> {
    let dim = 4 * n;
    let mut dw = Vec::with_capacity(dim);
    for l in 0..dim {
        let wp = form_at(&displace(pt, l, n, step))?;
        let wm = form_at(&displace(pt, l, n, -step))?;
        dw.push((&wp - &wm).scale(Complex64::new(0.5 / step, 0.0)));
    }
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in (j + 1)..dim {
                let v = dw[i][(j, k)] - dw[j][(i, k)] + dw[k][(i, j)];
                worst = worst.max(v.norm());
            }
        }
    }
    Ok(worst)
}

/// Equivariance of the field under fiber rotation: conjugating the
/// rotated-point operator back must land on the `(J, K)`-plane rotation of
/// the original pair.
pub fn equivariance_residual(
    field: &StructureField,
    pt: &FiberPoint,
    theta: f64,
) -> Result<f64, FieldError> {
    let n = field.dim();
    let j0 = field.j_complex(pt)?;
    let k0 = field.k_complex(pt)?;
    let j_rot = field.j_complex(&pt.rotate_fiber(theta))?;
    let q = rotation_coeff_matrix(n, theta);
    let q_inv = rotation_coeff_matrix(n, -theta);
    let lhs = &(&q * &j_rot) * &q_inv;
    let rhs = &j0.scale(Complex64::new(theta.cos(), 0.0))
        + &k0.scale(Complex64::new(theta.sin(), 0.0));
    Ok((&lhs - &rhs).norm_max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgen::Variant;
    use crate::geometry::a_op::Slot;
    use crate::geometry::chart::ChartModel;
    use crate::geometry::model::ModelKind;

    fn flat_field() -> StructureField {
        StructureField::new(ChartModel { kind: ModelKind::Flat, n: 1, c: 0.0 }, Variant::OnePlusF, Slot::A, 8)
    }

    fn pt1() -> FiberPoint {
        FiberPoint::new(vec![Complex64::new(0.3, 0.1)], vec![Complex64::new(0.5, -0.2)])
    }

    #[test]
    fn flat_normalization_exact() {
        let f = flat_field();
        let r = normalization_residual(&f, &pt1()).unwrap();
        assert!(r < 1e-14, "flat normalization residual {r:.3e}");
    }

    #[test]
    fn flat_nijenhuis_vanishes() {
        let f = flat_field();
        for which in [StructureChoice::MainI, StructureChoice::ComplementaryJ] {
            let r = nijenhuis_residual(&f, &pt1(), 0.05, which).unwrap();
            assert!(r < 1e-13, "{which:?}: {r:.3e}");
        }
    }

    #[test]
    fn flat_equivariance() {
        let f = flat_field();
        let r = equivariance_residual(&f, &pt1(), std::f64::consts::FRAC_PI_3).unwrap();
        assert!(r < 1e-12, "equivariance residual {r:.3e}");
    }

    #[test]
    fn flat_omega_is_standard_constant_form() {
        let f = flat_field();
        let t = f.triple(&pt1()).unwrap();
        let g = CMat::identity(4).scale(Complex64::new(2.0, 0.0));
        let omega = omega_from(&g, &t, 1e-10).unwrap();
        // Constant across points.
        let t2 = f.triple(&FiberPoint::new(vec![Complex64::new(-0.4, 0.2)], vec![Complex64::new(0.1, 0.6)])).unwrap();
        let omega2 = omega_from(&g, &t2, 1e-10).unwrap();
        assert!((&omega - &omega2).norm_max() < 1e-12);
        assert!(positivity_holds(&omega, &t, 1e-10));
    }

    #[test]
    fn omega_rejects_non_hermitian_metric() {
        let f = flat_field();
        let t = f.triple(&pt1()).unwrap();
        let mut g = CMat::identity(4);
        g[(0, 0)] = Complex64::new(3.0, 0.0); // breaks hyper-hermitian symmetry
        assert!(matches!(omega_from(&g, &t, 1e-10), Err(FormError::NotAntisymmetric { .. })));
    }

    #[test]
    fn synthetic_differential_matches_hand_value() {
        // The two-form (coordinate u) dv ^ dx has exterior derivative
        // du ^ dv ^ dx with unit coefficient.
        let n = 1usize;
        let field = |pt: &FiberPoint| -> Result<CMat, FormError> {
            let mut w = CMat::zeros(4, 4);
            let u = pt.xi[0].re;
            w[(1, 2)] = Complex64::new(u, 0.0);
            w[(2, 1)] = Complex64::new(-u, 0.0);
            Ok(w)
        };
        let pt = pt1();
        let r = closedness_residual(&field, &pt, n, 1e-3).unwrap();
        assert!((r - 1.0).abs() < 1e-8, "got {r}");
    }

    #[test]
    fn constant_form_is_closed() {
        let n = 1usize;
        let field = |_: &FiberPoint| -> Result<CMat, FormError> {
            let mut w = CMat::zeros(4, 4);
            w[(0, 2)] = Complex64::new(1.0, 0.0);
            w[(2, 0)] = Complex64::new(-1.0, 0.0);
            Ok(w)
        };
        let r = closedness_residual(&field, &pt1(), n, 1e-3).unwrap();
        assert!(r < 1e-12);
    }
}
