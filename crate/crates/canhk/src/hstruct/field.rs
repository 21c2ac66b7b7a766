//! The structure triple as a field over a chart.
//!
//! At a fiber point the evaluator assembles the complementary-structure
//! operator `J` on the complexified cotangent space from the series applied
//! to the module-level curvature operator, produces `K` by a quarter-turn
//! fiber rotation (the operator has weight one, so rotating the fiber
//! sweeps the `(J, K)`-plane), and closes the triple with `I = -K J`.
//!
//! Basis bookkeeping, complexified coframe, order `4n`:
//! `dxi^a` (0..n), `dxibar^a` (n..2n), `dz^i` (2n..3n), `dzbar^i` (3n..4n).
//! The vertical covectors are the connection-corrected ones when expressed
//! in coordinates. Real coframe order: `du, dv, dx, dy` blockwise.

use crate::fgen::{self, SeriesF, Variant};
use crate::geometry::a_op::{a_module_at, Slot};
use crate::geometry::chart::{ChartModel, FiberPoint};
use crate::linalg::CMat;
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug)]
pub enum FieldError {
    /// The series block is singular or near-singular at the point.
    SingularBlock { cond: f64 },
    /// Point outside the chart (or too close to its edge for the margin).
    OutsideChart,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldError::SingularBlock { cond } => {
                write!(f, "series block singular at this point (cond ~ {cond:.3e})")
            }
            FieldError::OutsideChart => write!(f, "point outside the chart domain"),
        }
    }
}

impl std::error::Error for FieldError {}

/// The endomorphism triple at a point, as real matrices on the real
/// cotangent space, plus diagnostics.
#[derive(Debug, Clone)]
pub struct QuatTriple {
    pub i_mat: CMat,
    pub j_mat: CMat,
    pub k_mat: CMat,
    /// Condition estimate of the series block that was inverted.
    pub block_cond: f64,
    /// Largest imaginary residue left by realification; all three matrices
    /// are real up to round-off.
    pub reality_defect: f64,
}

impl QuatTriple {
    /// Largest deviation from the quaternion relations
    /// `I^2 = J^2 = K^2 = IJK = -1`, `IJ = -JI`.
    pub fn algebra_residual(&self) -> f64 {
        let n4 = self.i_mat.rows;
        let id = CMat::identity(n4);
        let mut worst: f64 = 0.0;
        for m in [&self.i_mat, &self.j_mat, &self.k_mat] {
            worst = worst.max((&(m * m) + &id).norm_max());
        }
        let ij = &self.i_mat * &self.j_mat;
        let ji = &self.j_mat * &self.i_mat;
        worst = worst.max((&ij + &ji).norm_max());
        let ijk = &ij * &self.k_mat;
        worst = worst.max((&ijk + &id).norm_max());
        worst
    }
}

/// Field evaluator: chart data plus the series configuration.
#[derive(Debug, Clone)]
pub struct StructureField {
    pub chart: ChartModel,
    pub variant: Variant,
    pub slot: Slot,
    pub terms: usize,
    series: SeriesF,
    /// Condition-number ceiling above which a point is flagged excluded.
    pub cond_limit: f64,
}

impl StructureField {
    pub fn new(chart: ChartModel, variant: Variant, slot: Slot, terms: usize) -> Self {
        let series = fgen::coefficients(terms.max(1));
        StructureField { chart, variant, slot, terms, series, cond_limit: 1e8 }
    }

    pub fn dim(&self) -> usize {
        self.chart.n
    }

    /// The series block `phi(A)` at a point, on the complexified cotangent
    /// fiber of the base.
    pub fn phi_block(&self, pt: &FiberPoint) -> CMat {
        let a = a_module_at(&self.chart, pt, self.slot);
        let coeffs = self.series.coeffs_f64(self.terms);
        let fa = a.poly_no_const(&coeffs);
        match self.variant {
            Variant::F => fa,
            Variant::OnePlusF => &fa + &CMat::identity(2 * self.chart.n),
        }
    }

    /// The vertical-to-horizontal block of the operator on forms, in the
    /// connection frames: `i` times the evaluated even-part columns. The
    /// barred columns are the reality images of the unbarred ones.
    pub fn r_j_block(&self, pt: &FiberPoint) -> CMat {
        let n = self.chart.n;
        let f = self.phi_block(pt);
        let mut m = CMat::zeros(2 * n, 2 * n);
        for a in 0..n {
            let v = f.col(a);
            for i in 0..2 * n {
                m[(i, a)] = v[i];
            }
            // Reality: column for the barred generator is minus the
            // block-swapped conjugate.
            for i in 0..n {
                m[(i, n + a)] = -v[n + i].conj();
                m[(n + i, n + a)] = -v[i].conj();
            }
        }
        m.scale(Complex64::new(0.0, 1.0))
    }

    /// `J` on the complexified cotangent space in coordinate frames.
    pub fn j_complex(&self, pt: &FiberPoint) -> Result<CMat, FieldError> {
        let n = self.chart.n;
        if !self.chart.in_domain(&pt.z, 0.0) {
            return Err(FieldError::OutsideChart);
        }
        let r_j = self.r_j_block(pt);
        let cond = r_j.cond_one();
        if !cond.is_finite() || cond > self.cond_limit {
            return Err(FieldError::SingularBlock { cond });
        }
        let r_j_inv = r_j.inverse().map_err(|_| FieldError::SingularBlock { cond })?;
        // Connection-frame J: horizontal -> vertical by r_j, vertical ->
        // horizontal by -r_j^{-1}. The placement is pinned by the
        // normalization identity: contracting the image of a horizontal
        // covector with the rotation generator must reproduce the
        // fiberwise-linear evaluation, which is exactly the algebra-side
        // statement that sigma inverts the even part on the generators.
        let mut j_lc = CMat::zeros(4 * n, 4 * n);
        for i in 0..2 * n {
            for k in 0..2 * n {
                j_lc[(i, 2 * n + k)] = r_j[(i, k)];
                j_lc[(2 * n + i, k)] = -r_j_inv[(i, k)];
            }
        }
        // Change to coordinate frames: the vertical covectors acquire a
        // connection correction proportional to Gamma xi.
        let gx = self.chart.gamma_xi(pt);
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
        Ok(&(&s * &j_lc) * &s_inv)
    }

    /// The quarter-turn partner: evaluate `J` at the fiber-rotated point
    /// and conjugate back by the rotation.
    pub fn k_complex(&self, pt: &FiberPoint) -> Result<CMat, FieldError> {
        let theta = FRAC_PI_2;
        let j_rot = self.j_complex(&pt.rotate_fiber(theta))?;
        let q = rotation_coeff_matrix(self.chart.n, theta);
        let q_inv = rotation_coeff_matrix(self.chart.n, -theta);
        Ok(&(&q * &j_rot) * &q_inv)
    }

    /// Full triple at a point, realified.
    pub fn triple(&self, pt: &FiberPoint) -> Result<QuatTriple, FieldError> {
        let n = self.chart.n;
        let j_c = self.j_complex(pt)?;
        let k_c = self.k_complex(pt)?;
        let i_c = (&k_c * &j_c).scale(Complex64::new(-1.0, 0.0));
        let r_j = self.r_j_block(pt);
        let (j_mat, d1) = realify(&j_c, n);
        let (k_mat, d2) = realify(&k_c, n);
        let (i_mat, d3) = realify(&i_c, n);
        Ok(QuatTriple {
            i_mat,
            j_mat,
            k_mat,
            block_cond: r_j.cond_one(),
            reality_defect: d1.max(d2).max(d3),
        })
    }

    /// `J` as a real matrix on real cotangent coefficients.
    pub fn j_real(&self, pt: &FiberPoint) -> Result<CMat, FieldError> {
        Ok(realify(&self.j_complex(pt)?, self.chart.n).0)
    }

    /// `I` as a real matrix.
    pub fn i_real(&self, pt: &FiberPoint) -> Result<CMat, FieldError> {
        let j_c = self.j_complex(pt)?;
        let k_c = self.k_complex(pt)?;
        let i_c = (&k_c * &j_c).scale(Complex64::new(-1.0, 0.0));
        Ok(realify(&i_c, self.chart.n).0)
    }
}

/// Coefficient action on the complexified coordinate coframe of the fiber
/// rotation by `theta`: vertical unbarred covectors scale by `e^{-i theta}`,
/// barred by the conjugate, horizontal ones are fixed.
pub fn rotation_coeff_matrix(n: usize, theta: f64) -> CMat {
    let mut q = CMat::identity(4 * n);
    let ph = Complex64::from_polar(1.0, -theta);
    for a in 0..n {
        q[(a, a)] = ph;
        q[(n + a, n + a)] = ph.conj();
    }
    q
}

/// Converts a complexified cotangent operator (in the `dxi, dxibar, dz,
/// dzbar` coefficient basis) to the real matrix acting on `du, dv, dx, dy`
/// coefficients. Returns the matrix and the largest imaginary residue.
pub fn realify(jc: &CMat, n: usize) -> (CMat, f64) {
    let n4 = 4 * n;
    assert_eq!(jc.rows, n4);
    let mut out = CMat::zeros(n4, n4);
    let mut defect: f64 = 0.0;
    for k in 0..n4 {
        // Real basis covector k -> complex coefficient column.
        let mut c = vec![Complex64::new(0.0, 0.0); n4];
        let (pair, is_first) = real_to_complex_slot(k, n);
        let half = Complex64::new(0.5, 0.0);
        let half_i = Complex64::new(0.0, 0.5);
        if is_first {
            // du or dx: c[unbarred] = 1/2, c[barred] = 1/2
            c[pair.0] = half;
            c[pair.1] = half;
        } else {
            // dv or dy: c[unbarred] = -i/2, c[barred] = +i/2
            c[pair.0] = -half_i;
            c[pair.1] = half_i;
        }
        let img = jc.matvec(&c);
        // Back to real components.
        for a in 0..n4 {
            let (p, first) = real_to_complex_slot(a, n);
            let val = if first {
                img[p.0] + img[p.1]
            } else {
                Complex64::new(0.0, 1.0) * (img[p.0] - img[p.1])
            };
            defect = defect.max(val.im.abs());
            out[(a, k)] = Complex64::new(val.re, 0.0);
        }
    }
    (out, defect)
}

/// Maps a real coframe index to its (unbarred, barred) complex slots and
/// whether it is the real (first) member of the pair.
fn real_to_complex_slot(k: usize, n: usize) -> ((usize, usize), bool) {
    if k < n {
        ((k, n + k), true) // du^k
    } else if k < 2 * n {
        ((k - n, k), false) // dv^{k-n}
    } else if k < 3 * n {
        ((k, n + k), true) // dx^{k-2n}
    } else {
        ((k - n, k), false) // dy^{k-3n}
    }
}

/// The rotation generator as a real tangent vector at the point:
/// `sum_a (v^a d/du^a - u^a d/dv^a)` in real components.
pub fn rotation_vector(pt: &FiberPoint) -> Vec<f64> {
    let n = pt.dim();
    let mut v = vec![0.0; 4 * n];
    for a in 0..n {
        v[a] = pt.xi[a].im;
        v[n + a] = -pt.xi[a].re;
    }
    v
}

/// The tautological vertical value as a real tangent vector downstairs:
/// the fiber coordinate read as a tangent vector at the base point, in the
/// horizontal slots.
pub fn tautological_vector(pt: &FiberPoint) -> Vec<f64> {
    let n = pt.dim();
    let mut v = vec![0.0; 4 * n];
    for a in 0..n {
        v[2 * n + a] = pt.xi[a].re;
        v[3 * n + a] = pt.xi[a].im;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::{flat, ModelKind};

    fn flat_field(variant: Variant) -> StructureField {
        let chart = ChartModel { kind: ModelKind::Flat, n: 1, c: 0.0 };
        StructureField::new(chart, variant, Slot::A, 8)
    }

    fn pt1() -> FiberPoint {
        FiberPoint::new(vec![Complex64::new(0.1, -0.2)], vec![Complex64::new(0.4, 0.3)])
    }

    #[test]
    fn flat_block_is_constant() {
        let f = flat_field(Variant::OnePlusF);
        let r = f.r_j_block(&pt1());
        // i on the unbarred block, -i on the barred one.
        let mut expect = CMat::zeros(2, 2);
        expect[(0, 0)] = Complex64::new(0.0, 1.0);
        expect[(1, 1)] = Complex64::new(0.0, -1.0);
        assert!((&r - &expect).norm_max() < 1e-14);
        let _ = flat(1).unwrap();
    }

    #[test]
    fn flat_f_variant_is_singular() {
        let f = flat_field(Variant::F);
        assert!(matches!(f.j_complex(&pt1()), Err(FieldError::SingularBlock { .. })));
    }

    #[test]
    fn flat_triple_satisfies_quaternion_algebra() {
        let f = flat_field(Variant::OnePlusF);
        let t = f.triple(&pt1()).unwrap();
        assert!(t.algebra_residual() < 1e-13, "residual {}", t.algebra_residual());
        assert!(t.reality_defect < 1e-14);
    }

    #[test]
    fn realify_roundtrip_on_rotation() {
        // The rotation coefficient matrix realifies to an honest rotation.
        let q = rotation_coeff_matrix(1, 0.7);
        let (r, defect) = realify(&q, 1);
        assert!(defect < 1e-15);
        // Orthogonal on the vertical block, identity on horizontal.
        let rt = r.transpose();
        assert!((&(&rt * &r) - &CMat::identity(4)).norm_max() < 1e-14);
    }

    #[test]
    fn j_real_squares_to_minus_one() {
        let f = flat_field(Variant::OnePlusF);
        let j = f.j_real(&pt1()).unwrap();
        assert!((&(&j * &j) + &CMat::identity(4)).norm_max() < 1e-13);
    }
}
