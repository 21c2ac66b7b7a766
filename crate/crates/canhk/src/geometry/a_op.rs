//! The curvature operator `A` of the fiberwise construction.
//!
//! With `Rop^b_{a i jbar}` the curvature acting on the cotangent fiber and
//! `xi` the fiber vector, two contractions are in play:
//!
//! * [`a_operator`] — the endomorphism of the cotangent fiber obtained by
//!   pairing the two form slots with the fiber vector and its conjugate.
//!   It preserves types, commutes with the complex structure and is
//!   self-adjoint for the built-in models.
//! * [`a_module`] — the operator the fiberwise algebra actually produces,
//!   acting on the full `2n`-dimensional complexified cotangent fiber.
//!   Besides the type-preserving block it carries a conjugate-mixing block
//!   whose presence is exactly what makes the structure normalized.
//!
//! The contraction order is not pinned a priori; [`Slot`] selects which
//! pairing is used and the structure-level tests discriminate empirically.

use super::chart::{ChartModel, FiberPoint};
use super::model::{rop_get, KahlerModel};
use crate::linalg::CMat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Contraction convention: which slots pair with the fiber vector and
/// which with its conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// Holomorphic slots pair with `xi`, antiholomorphic with `conj(xi)`.
    A,
    /// The conjugate-swapped pairing; kept as the empirical negative
    /// control.
    B,
}

impl std::fmt::Display for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Slot::A => write!(f, "a"),
            Slot::B => write!(f, "b"),
        }
    }
}

fn xi_slot(xi: &[Complex64], idx: usize, slot: Slot) -> Complex64 {
    match slot {
        Slot::A => xi[idx],
        Slot::B => xi[idx].conj(),
    }
}

fn xi_conj_slot(xi: &[Complex64], idx: usize, slot: Slot) -> Complex64 {
    match slot {
        Slot::A => xi[idx].conj(),
        Slot::B => xi[idx],
    }
}

/// Type-preserving contraction on the holomorphic cotangent fiber:
/// `A(xi)^b_a = -(1/3) Rop^b_{a i jbar} <slot(i), xi> <slot(jbar), conj(xi)>`.
pub fn a_operator_from_rop(rop: &[Complex64], n: usize, xi: &[Complex64], slot: Slot) -> CMat {
    CMat::from_fn(n, n, |b, a| {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += rop_get(rop, n, b, a, i, j) * xi_slot(xi, i, slot) * xi_conj_slot(xi, j, slot);
            }
        }
        acc * (-1.0 / 3.0)
    })
}

/// [`a_operator_from_rop`] for a point model.
pub fn a_operator(model: &KahlerModel, xi: &[Complex64], slot: Slot) -> CMat {
    let rop = super::model::curvature_operator(model);
    a_operator_from_rop(&rop, model.n, xi, slot)
}

/// The type-preserving operator on the full complexified fiber
/// `(dz, dzbar)`: block diagonal with conjugate blocks. Off-diagonal blocks
/// are assembled from the would-be non-(1,1) curvature slots and vanish for
/// validated models; keeping them makes the commutation check with the
/// complex structure a real assertion.
pub fn a_operator_full(model: &KahlerModel, xi: &[Complex64], slot: Slot) -> CMat {
    let n = model.n;
    let blk = a_operator(model, xi, slot);
    let mut out = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = blk[(i, j)];
            out[(n + i, n + j)] = blk[(i, j)].conj();
        }
    }
    out
}

/// Complex structure on the complexified cotangent fiber in the
/// `(dz, dzbar)` basis: `+i` on the holomorphic half, `-i` on the other.
pub fn complex_structure_matrix(n: usize) -> CMat {
    CMat::from_fn(2 * n, 2 * n, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i < n {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        }
    })
}

/// The module-level operator on the full complexified cotangent fiber.
///
/// Columns `0..n` give the image of the holomorphic basis covectors:
/// the type-preserving part pairs the curvature output slot with `xi` and
/// the antiholomorphic form slot with `conj(xi)`, and the mixing part pairs
/// the output slot and the holomorphic form slot both with `xi`. Columns
/// `n..2n` are determined by reality. Slot `B` swaps which values feed the
/// paired slots.
pub fn a_module_from_rop(rop: &[Complex64], n: usize, xi: &[Complex64], slot: Slot) -> CMat {
    let third = -1.0 / 3.0;
    // p[i][a]: coefficient of dz^i in the image of dz^a.
    let mut p = CMat::zeros(n, n);
    // m[j][a]: coefficient of dzbar^j in the image of dz^a.
    let mut m = CMat::zeros(n, n);
    for a in 0..n {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..n {
                for j in 0..n {
                    acc += rop_get(rop, n, b, a, i, j)
                        * xi_slot(xi, b, slot)
                        * xi_conj_slot(xi, j, slot);
                }
            }
            p[(i, a)] = acc * third;
        }
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..n {
                for i in 0..n {
                    acc += rop_get(rop, n, b, a, i, j) * xi_slot(xi, b, slot) * xi_slot(xi, i, slot);
                }
            }
            m[(j, a)] = acc * third;
        }
    }
    let mut out = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for a in 0..n {
            out[(i, a)] = p[(i, a)];
            out[(n + i, a)] = m[(i, a)];
            out[(n + i, n + a)] = p[(i, a)].conj();
            out[(i, n + a)] = m[(i, a)].conj();
        }
    }
    out
}

/// [`a_module_from_rop`] at a chart point.
pub fn a_module_at(chart: &ChartModel, pt: &FiberPoint, slot: Slot) -> CMat {
    let rop = chart.curvature_operator_at(&pt.z);
    a_module_from_rop(&rop, chart.n, &pt.xi, slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::model::{chn, cpn, flat};
    use rand::SeedableRng;

    fn seeded_xi(n: usize, seed: u64) -> Vec<Complex64> {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
            .collect()
    }

    #[test]
    fn zero_fiber_gives_zero() {
        let m = cpn(2, 1.0).unwrap();
        let xi = vec![Complex64::new(0.0, 0.0); 2];
        assert_eq!(a_operator(&m, &xi, Slot::A).norm_max(), 0.0);
    }

    #[test]
    fn flat_model_gives_zero() {
        let m = flat(2).unwrap();
        let xi = seeded_xi(2, 1);
        assert_eq!(a_operator(&m, &xi, Slot::A).norm_max(), 0.0);
        assert_eq!(a_module_from_rop(&crate::geometry::model::curvature_operator(&m), 2, &xi, Slot::A).norm_max(), 0.0);
    }

    #[test]
    fn scalar_value_on_dim_one() {
        // On the one-dimensional fiber the operator is the scalar
        // c/3 * |xi|_h^2; cross-checked against a brute-force loop.
        let c = 2.0;
        let m = cpn(1, c).unwrap();
        let xi = vec![Complex64::new(0.3, -0.4)];
        let t = (m.h[(0, 0)] * xi[0] * xi[0].conj()).re;
        let a = a_operator(&m, &xi, Slot::A);
        assert!((a[(0, 0)] - Complex64::new(c / 3.0 * t, 0.0)).norm() < 1e-14);

        // Brute-force oracle: independent loop over all slots.
        let mut acc = Complex64::new(0.0, 0.0);
        let hinv = m.h.inverse().unwrap();
        for b in 0..1 {
            for cs in 0..1 {
                for i in 0..1 {
                    for j in 0..1 {
                        acc += -hinv[(b, cs)]
                            * m.curv.get(0, cs, i, j)
                            * xi[i]
                            * xi[j].conj()
                            * (-1.0 / 3.0);
                    }
                }
            }
        }
        assert!((a[(0, 0)] - acc).norm() < 1e-15);
    }

    #[test]
    fn commutes_with_complex_structure() {
        for model in [cpn(2, 1.0).unwrap(), chn(2, -1.5).unwrap()] {
            for seed in 0..100u64 {
                let xi = seeded_xi(2, seed);
                let a = a_operator_full(&model, &xi, Slot::A);
                let i_mat = complex_structure_matrix(2);
                let comm = &(&a * &i_mat) - &(&i_mat * &a);
                assert!(comm.norm_max() < 1e-12);
            }
        }
    }

    #[test]
    fn self_adjoint_for_builtin_models() {
        // h-self-adjointness: h A = (h A)^* with the metric lowering.
        for model in [cpn(2, 1.0).unwrap(), chn(2, -2.0).unwrap()] {
            for seed in 0..20u64 {
                let xi = seeded_xi(2, seed);
                let a = a_operator(&model, &xi, Slot::A);
                let ha = &model.h * &a;
                assert!((&ha - &ha.adjoint()).norm_max() < 1e-12, "seed {seed}");
            }
        }
    }

    #[test]
    fn quadratic_homogeneity() {
        let m = cpn(2, 2.0).unwrap();
        let xi = seeded_xi(2, 3);
        let a1 = a_operator(&m, &xi, Slot::A);
        let xi2: Vec<Complex64> = xi.iter().map(|x| x * 1.75).collect();
        let a2 = a_operator(&m, &xi2, Slot::A);
        let scaled = a1.scale(Complex64::new(1.75 * 1.75, 0.0));
        assert!((&a2 - &scaled).norm_max() < 1e-12);
    }

    #[test]
    fn phase_invariance_of_type_preserving_part() {
        let m = cpn(2, 2.0).unwrap();
        let xi = seeded_xi(2, 4);
        let a1 = a_operator(&m, &xi, Slot::A);
        let ph = Complex64::from_polar(1.0, 0.83);
        let xi2: Vec<Complex64> = xi.iter().map(|x| x * ph).collect();
        let a2 = a_operator(&m, &xi2, Slot::A);
        assert!((&a1 - &a2).norm_max() < 1e-12);
    }

    #[test]
    fn module_operator_reality_structure() {
        let m = cpn(2, 1.0).unwrap();
        let rop = crate::geometry::model::curvature_operator(&m);
        let xi = seeded_xi(2, 5);
        let a = a_module_from_rop(&rop, 2, &xi, Slot::A);
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - a[(2 + i, 2 + j)].conj()).norm() < 1e-15);
                assert!((a[(2 + i, j)] - a[(i, 2 + j)].conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn slots_differ_on_mixing_block() {
        let m = cpn(1, 2.0).unwrap();
        let rop = crate::geometry::model::curvature_operator(&m);
        let xi = vec![Complex64::new(0.5, 0.2)];
        let a = a_module_from_rop(&rop, 1, &xi, Slot::A);
        let b = a_module_from_rop(&rop, 1, &xi, Slot::B);
        // Same diagonal block, conjugated mixing block.
        assert!((a[(0, 0)] - b[(0, 0)]).norm() < 1e-15);
        assert!((a[(1, 0)] - b[(1, 0)].conj()).norm() < 1e-15);
        assert!((a[(1, 0)] - b[(1, 0)]).norm() > 1e-3);
    }
}
