//! Materialized graded pieces of the Weil algebra and the boundary-rule
//! rank checks.
//!
//! A piece is cut out by a Hodge bidegree `(p, q)` together with an
//! augmentation bidegree `(m, n)`. Writing `a, b` for the symmetric degrees
//! and `alpha, beta` for the exterior ones (unbarred/barred), the cut
//! solves to `alpha = q - n + m`, `beta = p - m + n`, `a = m - alpha`,
//! `b = n - beta`; the piece is empty unless all four are admissible.
//! In particular a piece can be nonzero only when `p >= m - n` and
//! `q >= n - m`, which is the support rule the tests assert.

use super::derivation::GradedDerivation;
use super::element::{Monomial, WeilElement};
use crate::linalg::{eigh, CMat};
use num_complex::Complex64;
use serde::Serialize;

/// Identifies one graded piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PieceId {
    pub hodge_p: i32,
    pub hodge_q: i32,
    pub aug_m: u32,
    pub aug_n: u32,
}

/// Enumerates the monomial basis of a graded piece; empty when the piece
/// vanishes.
pub fn piece_basis(n: usize, id: PieceId) -> Vec<Monomial> {
    let alpha = id.hodge_q as i64 - id.aug_n as i64 + id.aug_m as i64;
    let beta = id.hodge_p as i64 - id.aug_m as i64 + id.aug_n as i64;
    if alpha < 0 || beta < 0 || alpha > n as i64 || beta > n as i64 {
        return Vec::new();
    }
    let (alpha, beta) = (alpha as usize, beta as usize);
    let a = id.aug_m as i64 - alpha as i64;
    let b = id.aug_n as i64 - beta as i64;
    if a < 0 || b < 0 {
        return Vec::new();
    }
    let (a, b) = (a as u32, b as u32);

    let mut out = Vec::new();
    let s_monos = exponent_tuples(n, a);
    let sb_monos = exponent_tuples(n, b);
    let l_masks = subsets_of_size(n, alpha);
    let lb_masks = subsets_of_size(n, beta);
    for se in &s_monos {
        for sbe in &sb_monos {
            for lm in &l_masks {
                for lbm in &lb_masks {
                    let mut raw = 0u64;
                    for i in 0..n {
                        raw |= (se[i] as u64) << (4 * i as u32);
                        raw |= (sbe[i] as u64) << (4 * (n + i) as u32);
                    }
                    let mask = (*lm as u64) | ((*lbm as u64) << n);
                    raw |= mask << 40;
                    out.push(Monomial::from_raw(raw));
                }
            }
        }
    }
    out.sort();
    out
}

fn exponent_tuples(n: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..(1 << n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Matrix of a derivation restricted to a graded piece, in the monomial
/// bases of source and target.
pub fn piece_matrix(
    n: usize,
    d: &GradedDerivation,
    source: &[Monomial],
    target: &[Monomial],
) -> CMat {
    let index: std::collections::HashMap<Monomial, usize> =
        target.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut mat = CMat::zeros(target.len(), source.len());
    for (j, m) in source.iter().enumerate() {
        let img = d.apply(&WeilElement::monomial(n, *m, Complex64::new(1.0, 0.0)));
        for (mono, c) in img.terms() {
            if let Some(&i) = index.get(mono) {
                mat[(i, j)] = *c;
            } else if c.norm() > 1e-14 {
                panic!("derivation image leaves the expected graded piece");
            }
        }
    }
    mat
}

/// Which raising component to test. Components are named by their Hodge
/// shift: `C10` sends `sb -> -lb` (shift `(1,0)`), `C01` sends `s -> l`
/// (shift `(0,1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryComponent {
    C10,
    C01,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryVerdict {
    pub piece: PieceId,
    pub component: BoundaryComponent,
    pub dim_source: usize,
    pub dim_target: usize,
    pub rank: usize,
    pub injective: bool,
    /// Vacuously true pieces (empty source) are flagged.
    pub vacuous: bool,
    /// Whether the boundary rule predicts injectivity here.
    pub on_boundary: bool,
}

/// Expected injectivity locus: `C10` is injective on pieces with
/// `p = m - n` (no barred exterior factors) when `n >= 1`, `C01` on pieces
/// with `q = n - m` when `m >= 1`.
pub fn boundary_predicts_injective(id: PieceId, comp: BoundaryComponent) -> bool {
    if id.aug_m < 1 || id.aug_n < 1 {
        return false;
    }
    match comp {
        BoundaryComponent::C10 => id.hodge_p as i64 == id.aug_m as i64 - id.aug_n as i64,
        BoundaryComponent::C01 => id.hodge_q as i64 == id.aug_n as i64 - id.aug_m as i64,
    }
}

/// Materializes a graded piece, assembles the chosen component of `C`, and
/// rank-checks it.
pub fn boundary_injectivity(n: usize, id: PieceId, comp: BoundaryComponent) -> BoundaryVerdict {
    let source = piece_basis(n, id);
    let (dp, dq) = match comp {
        BoundaryComponent::C10 => (1, 0),
        BoundaryComponent::C01 => (0, 1),
    };
    let target_id = PieceId {
        hodge_p: id.hodge_p + dp,
        hodge_q: id.hodge_q + dq,
        aug_m: id.aug_m,
        aug_n: id.aug_n,
    };
    let target = piece_basis(n, target_id);
    let c = GradedDerivation::c_op(n).hodge_shift_component(dp, dq);
    let mat = piece_matrix(n, &c, &source, &target);
    let rank = mat.rank(1e-10);
    BoundaryVerdict {
        piece: id,
        component: comp,
        dim_source: source.len(),
        dim_target: target.len(),
        rank,
        injective: rank == source.len(),
        vacuous: source.is_empty(),
        on_boundary: boundary_predicts_injective(id, comp),
    }
}

/// Independent rank oracle: counts nonzero eigenvalues of the Gram matrix.
pub fn gram_rank_oracle(mat: &CMat) -> usize {
    if mat.cols == 0 {
        return 0;
    }
    let gram = &mat.adjoint() * mat;
    let (w, _) = eigh(&gram);
    let scale = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    w.iter().filter(|&&x| x > 1e-10 * scale).count()
}

/// All piece ids with `m + n <= max_aug` whose support rule allows them to
/// be nonzero; hodge degrees swept over the full admissible window.
pub fn enumerate_pieces(n: usize, max_aug: u32) -> Vec<PieceId> {
    let mut out = Vec::new();
    for m in 0..=max_aug {
        for nn in 0..=(max_aug - m) {
            for alpha in 0..=n as i64 {
                for beta in 0..=n as i64 {
                    if alpha > m as i64 || beta > nn as i64 {
                        continue;
                    }
                    let p = (m as i64 - nn as i64) + beta;
                    let q = (nn as i64 - m as i64) + alpha;
                    out.push(PieceId {
                        hodge_p: p as i32,
                        hodge_q: q as i32,
                        aug_m: m,
                        aug_n: nn,
                    });
                }
            }
        }
    }
    out.sort_by_key(|id| (id.aug_m, id.aug_n, id.hodge_p, id.hodge_q));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weil::derivation::Parity;

    #[test]
    fn support_rule_holds_on_enumeration() {
        for id in enumerate_pieces(2, 5) {
            if !piece_basis(2, id).is_empty() {
                assert!(id.hodge_p as i64 >= id.aug_m as i64 - id.aug_n as i64);
                assert!(id.hodge_q as i64 >= id.aug_n as i64 - id.aug_m as i64);
            }
        }
    }

    #[test]
    fn piece_dimensions_match_combinatorics() {
        // B^{1,0}_{2,1} at n=1: alpha = 0+... = q - n + m = 0 - 1 + 2 = 1,
        // beta = 1 - 2 + 1 = 0, a = 1, b = 1: monomials s sb l.
        let id = PieceId { hodge_p: 1, hodge_q: 0, aug_m: 2, aug_n: 1 };
        let basis = piece_basis(1, id);
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn exception_piece_is_zero_map_at_n2() {
        // The k=2 exception: C10 vanishes identically on B^{3,-1}_{3,0}.
        let id = PieceId { hodge_p: 3, hodge_q: -1, aug_m: 3, aug_n: 0 };
        let v = boundary_injectivity(2, id, BoundaryComponent::C10);
        assert!(!v.vacuous, "piece must be nonempty at fiber dim 2");
        assert_eq!(v.rank, 0);
        assert!(!v.injective);
    }

    #[test]
    fn exception_piece_vacuous_at_n1() {
        let id = PieceId { hodge_p: 3, hodge_q: -1, aug_m: 3, aug_n: 0 };
        let v = boundary_injectivity(1, id, BoundaryComponent::C10);
        assert!(v.vacuous);
        assert!(v.injective, "empty source is vacuously injective");
    }

    #[test]
    fn odd_case_boundary_piece_injective() {
        // B^{2,-1}_{p+2,p} for p = 1: the barred-sector raising map is
        // injective (p_hodge = m - n boundary).
        let id = PieceId { hodge_p: 2, hodge_q: -1, aug_m: 3, aug_n: 1 };
        assert!(boundary_predicts_injective(id, BoundaryComponent::C10));
        let v = boundary_injectivity(1, id, BoundaryComponent::C10);
        assert!(!v.vacuous);
        assert!(v.injective);
    }

    #[test]
    fn rank_agrees_with_gram_oracle_on_random_pieces() {
        for id in enumerate_pieces(2, 4) {
            let source = piece_basis(2, id);
            if source.is_empty() {
                continue;
            }
            for comp in [BoundaryComponent::C10, BoundaryComponent::C01] {
                let (dp, dq) = match comp {
                    BoundaryComponent::C10 => (1, 0),
                    BoundaryComponent::C01 => (0, 1),
                };
                let tid = PieceId {
                    hodge_p: id.hodge_p + dp,
                    hodge_q: id.hodge_q + dq,
                    ..id
                };
                let target = piece_basis(2, tid);
                let c = GradedDerivation::c_op(2).hodge_shift_component(dp, dq);
                let mat = piece_matrix(2, &c, &source, &target);
                assert_eq!(mat.rank(1e-10), gram_rank_oracle(&mat), "piece {id:?} {comp:?}");
            }
        }
    }

    #[test]
    fn zero_derivation_has_zero_rank() {
        let id = PieceId { hodge_p: 1, hodge_q: 0, aug_m: 2, aug_n: 1 };
        let source = piece_basis(2, id);
        let z = GradedDerivation::zero(2, Parity::Odd);
        let mat = piece_matrix(2, &z, &source, &source);
        assert_eq!(mat.rank(1e-12), 0);
    }
}
