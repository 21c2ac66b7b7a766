//! Elements of the fiberwise Weil algebra.
//!
//! The algebra is free graded-commutative on `4n` generators attached to a
//! fiber dimension `n`:
//!
//! * `s_0 .. s_{n-1}` and their barred partners `sb_0 .. sb_{n-1}` —
//!   commuting degree-0 generators (fiberwise-linear functions),
//! * `l_0 .. l_{n-1}` and `lb_0 .. lb_{n-1}` — anticommuting degree-1
//!   generators (pullback one-forms).
//!
//! Generator indices run `0..2n` per family, the barred half in `n..2n`.
//! Monomials are kept canonical: symmetric exponents plus a sorted
//! anticommuting subset, with signs tracked by transposition count.

use num_complex::Complex64;
use std::collections::HashMap;

/// Hodge bidegree `(p, q)`.
pub type Hodge = (i32, i32);
/// Augmentation bidegree `(m, n)`; both entries are non-negative.
pub type AugBi = (u32, u32);

const MAX_N: usize = 4;
const EXP_BITS: u32 = 4;
const EXP_MAX: u32 = 15;
const MASK_SHIFT: u32 = 40;

/// A canonical monomial, packed into a `u64`: one 4-bit exponent per
/// symmetric generator (8 slots) and an 8-bit anticommuting subset mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(u64);

impl Monomial {
    pub fn one() -> Self {
        Monomial(0)
    }

    pub fn s_gen(idx: usize) -> Self {
        assert!(idx < 2 * MAX_N);
        Monomial(1u64 << (EXP_BITS * idx as u32))
    }

    pub fn lam_gen(idx: usize) -> Self {
        assert!(idx < 2 * MAX_N);
        Monomial(1u64 << (MASK_SHIFT + idx as u32))
    }

    pub fn s_exp(&self, idx: usize) -> u32 {
        ((self.0 >> (EXP_BITS * idx as u32)) & EXP_MAX as u64) as u32
    }

    pub fn lam_mask(&self) -> u64 {
        self.0 >> MASK_SHIFT
    }

    pub fn has_lam(&self, idx: usize) -> bool {
        self.lam_mask() & (1 << idx) != 0
    }

    fn with_s_exp(&self, idx: usize, e: u32) -> Monomial {
        assert!(e <= EXP_MAX, "symmetric exponent overflow");
        let shift = EXP_BITS * idx as u32;
        Monomial((self.0 & !((EXP_MAX as u64) << shift)) | ((e as u64) << shift))
    }

    /// Exterior degree: number of anticommuting factors.
    pub fn ext_degree(&self) -> u32 {
        self.lam_mask().count_ones()
    }

    /// The symmetric part of the monomial, exterior factors dropped.
    pub fn s_part(&self) -> Monomial {
        Monomial(self.0 & ((1u64 << MASK_SHIFT) - 1))
    }

    pub(crate) fn raw(&self) -> u64 {
        self.0
    }

    pub(crate) fn from_raw(v: u64) -> Monomial {
        Monomial(v)
    }

    fn s_degree(&self, two_n: usize) -> u32 {
        (0..two_n).map(|i| self.s_exp(i)).sum()
    }

    /// Total augmentation degree (every generator counts 1).
    pub fn aug_degree(&self, two_n: usize) -> u32 {
        self.s_degree(two_n) + self.ext_degree()
    }

    /// Augmentation bidegree: unbarred generators count `(1,0)`, barred `(0,1)`.
    pub fn aug_bidegree(&self, n: usize) -> AugBi {
        let mut m = 0;
        let mut nn = 0;
        for i in 0..n {
            m += self.s_exp(i);
            nn += self.s_exp(n + i);
            if self.has_lam(i) {
                m += 1;
            }
            if self.has_lam(n + i) {
                nn += 1;
            }
        }
        (m, nn)
    }

    /// Hodge bidegree: `s -> (1,-1)`, `sb -> (-1,1)`, `l -> (1,0)`, `lb -> (0,1)`.
    pub fn hodge(&self, n: usize) -> Hodge {
        let mut p = 0i32;
        let mut q = 0i32;
        for i in 0..n {
            let e = self.s_exp(i) as i32;
            let eb = self.s_exp(n + i) as i32;
            p += e - eb;
            q += eb - e;
            if self.has_lam(i) {
                p += 1;
            }
            if self.has_lam(n + i) {
                q += 1;
            }
        }
        (p, q)
    }

    /// Product with sign; `None` when an anticommuting factor repeats.
    pub fn mul(&self, other: &Monomial, two_n: usize) -> Option<(Monomial, f64)> {
        let m1 = self.lam_mask();
        let m2 = other.lam_mask();
        if m1 & m2 != 0 {
            return None;
        }
        // Transpositions needed to interleave the sorted masks.
        let mut inversions = 0u32;
        let mut b = m2;
        while b != 0 {
            let bit = b.trailing_zeros();
            inversions += (m1 >> (bit + 1)).count_ones();
            b &= b - 1;
        }
        let mut out = Monomial(((m1 | m2) << MASK_SHIFT) as u64);
        for i in 0..two_n {
            out = out.with_s_exp(i, self.s_exp(i) + other.s_exp(i));
        }
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        Some((out, sign))
    }
}

/// A sparse element of the Weil algebra at fiber dimension `n`.
#[derive(Debug, Clone)]
pub struct WeilElement {
    n: usize,
    terms: HashMap<Monomial, Complex64>,
}

impl WeilElement {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_N, "fiber dimension must be in 1..={MAX_N}");
        WeilElement { n, terms: HashMap::new() }
    }

    pub fn one(n: usize) -> Self {
        WeilElement::monomial(n, Monomial::one(), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(n: usize, m: Monomial, c: Complex64) -> Self {
        let mut e = WeilElement::zero(n);
        if c != Complex64::new(0.0, 0.0) {
            e.terms.insert(m, c);
        }
        e
    }

    /// The generator `s_i` (`i < n`) or `sb_{i-n}`.
    pub fn s(n: usize, idx: usize) -> Self {
        assert!(idx < 2 * n);
        WeilElement::monomial(n, Monomial::s_gen(idx), Complex64::new(1.0, 0.0))
    }

    /// The generator `l_i` (`i < n`) or `lb_{i-n}`.
    pub fn lam(n: usize, idx: usize) -> Self {
        assert!(idx < 2 * n);
        WeilElement::monomial(n, Monomial::lam_gen(idx), Complex64::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.norm_sqr() == 0.0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &WeilElement) -> WeilElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        out
    }

    pub fn sub(&self, other: &WeilElement) -> WeilElement {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> WeilElement {
        let mut out = WeilElement::zero(self.n);
        if c == Complex64::new(0.0, 0.0) {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(*m, v * c);
        }
        out
    }

    pub fn mul(&self, other: &WeilElement) -> WeilElement {
        assert_eq!(self.n, other.n);
        let two_n = 2 * self.n;
        let mut out = WeilElement::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, sign)) = m1.mul(m2, two_n) {
                    out.add_term(m, c1 * c2 * sign);
                }
            }
        }
        out
    }

    /// The real-structure conjugate: `l <-> lb`, `s -> -sb`, `sb -> -s`,
    /// coefficients conjugated. An involution.
    pub fn conj(&self) -> WeilElement {
        let n = self.n;
        let mut out = WeilElement::zero(n);
        for (m, c) in &self.terms {
            let mut packed = Monomial::one();
            let mut sign = 1.0f64;
            let mut unbarred_ext = 0u32;
            let mut barred_ext = 0u32;
            for i in 0..n {
                let e = m.s_exp(i);
                let eb = m.s_exp(n + i);
                packed = packed.with_s_exp(i, eb).with_s_exp(n + i, e);
                if (e + eb) % 2 == 1 {
                    sign = -sign;
                }
                if m.has_lam(i) {
                    unbarred_ext += 1;
                }
                if m.has_lam(n + i) {
                    barred_ext += 1;
                }
            }
            let mask = m.lam_mask();
            let swapped = ((mask & ((1 << n) - 1)) << n) | (mask >> n);
            let mut out_mono = Monomial(packed.0 | (swapped << MASK_SHIFT));
            // Swapping the two sorted blocks costs one transposition per pair.
            if (unbarred_ext * barred_ext) % 2 == 1 {
                sign = -sign;
            }
            let _ = &mut out_mono;
            out.add_term(out_mono, c.conj() * sign);
        }
        out
    }

    /// Keeps only terms of total augmentation degree `<= max`.
    pub fn truncate_aug(&self, max: u32) -> WeilElement {
        let two_n = 2 * self.n;
        let mut out = WeilElement::zero(self.n);
        for (m, c) in &self.terms {
            if m.aug_degree(two_n) <= max {
                out.terms.insert(*m, *c);
            }
        }
        out
    }

    /// Keeps only terms with the given Hodge bidegree.
    pub fn hodge_component(&self, h: Hodge) -> WeilElement {
        let mut out = WeilElement::zero(self.n);
        for (m, c) in &self.terms {
            if m.hodge(self.n) == h {
                out.terms.insert(*m, *c);
            }
        }
        out
    }

    /// Keeps only terms with the given augmentation bidegree.
    pub fn aug_component(&self, ab: AugBi) -> WeilElement {
        let mut out = WeilElement::zero(self.n);
        for (m, c) in &self.terms {
            if m.aug_bidegree(self.n) == ab {
                out.terms.insert(*m, *c);
            }
        }
        out
    }

    /// Distinct Hodge bidegrees occurring in the element.
    pub fn hodge_support(&self) -> Vec<Hodge> {
        let mut v: Vec<Hodge> = self.terms.keys().map(|m| m.hodge(self.n)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn aug_support(&self) -> Vec<AugBi> {
        let mut v: Vec<AugBi> = self.terms.keys().map(|m| m.aug_bidegree(self.n)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Largest coefficient magnitude.
    pub fn norm_max(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Maximum coefficient difference against another element.
    pub fn distance(&self, other: &WeilElement) -> f64 {
        self.sub(other).norm_max()
    }

    /// Substitutes numeric fiber values for the symmetric generators:
    /// `s_i -> xi[i]`, `sb_i -> conj(xi[i])`. The result is expanded in the
    /// anticommuting generators only.
    pub fn eval_s(&self, xi: &[Complex64]) -> HashMap<u64, Complex64> {
        assert_eq!(xi.len(), self.n);
        let n = self.n;
        let mut out: HashMap<u64, Complex64> = HashMap::new();
        for (m, c) in &self.terms {
            let mut v = *c;
            for i in 0..n {
                for _ in 0..m.s_exp(i) {
                    v *= xi[i];
                }
                for _ in 0..m.s_exp(n + i) {
                    v *= xi[i].conj();
                }
            }
            let e = out.entry(m.lam_mask()).or_insert(Complex64::new(0.0, 0.0));
            *e += v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn anticommutation_sign() {
        let n = 2;
        let l0 = WeilElement::lam(n, 0);
        let l1 = WeilElement::lam(n, 1);
        let a = l0.mul(&l1);
        let b = l1.mul(&l0);
        assert_eq!(a.distance(&b.scale(Complex64::new(-1.0, 0.0))), 0.0);
        assert!(l0.mul(&l0).is_zero());
    }

    #[test]
    fn symmetric_generators_commute() {
        let n = 2;
        let s0 = WeilElement::s(n, 0);
        let l1 = WeilElement::lam(n, 1);
        assert_eq!(s0.mul(&l1).distance(&l1.mul(&s0)), 0.0);
    }

    #[test]
    fn product_associativity_on_sample() {
        let n = 2;
        let a = WeilElement::s(n, 0).add(&WeilElement::lam(n, 1));
        let b = WeilElement::lam(n, 0).add(&WeilElement::s(n, 3));
        let c = WeilElement::lam(n, 2).add(&WeilElement::one(n).scale(Complex64::new(0.5, 0.3)));
        let ab_c = a.mul(&b).mul(&c);
        let a_bc = a.mul(&b.mul(&c));
        assert!(ab_c.distance(&a_bc) < 1e-15);
    }

    #[test]
    fn conj_is_involution() {
        let n = 2;
        let e = WeilElement::s(n, 0)
            .mul(&WeilElement::lam(n, 1))
            .mul(&WeilElement::lam(n, 2))
            .add(&WeilElement::s(n, 3).scale(Complex64::new(0.3, -0.7)));
        assert!(e.conj().conj().distance(&e) < 1e-15);
    }

    #[test]
    fn conj_on_generators() {
        let n = 1;
        // s -> -sb, l -> lb
        assert_eq!(WeilElement::s(n, 0).conj().distance(&WeilElement::s(n, 1).scale(Complex64::new(-1.0, 0.0))), 0.0);
        assert_eq!(WeilElement::lam(n, 0).conj().distance(&WeilElement::lam(n, 1)), 0.0);
    }

    #[test]
    fn degrees() {
        let n = 2;
        let m = Monomial::s_gen(0)
            .mul(&Monomial::s_gen(2), 4)
            .unwrap()
            .0
            .mul(&Monomial::lam_gen(1), 4)
            .unwrap()
            .0
            .mul(&Monomial::lam_gen(3), 4)
            .unwrap()
            .0;
        // s_0 sb_0 l_1 lb_1
        assert_eq!(m.aug_degree(4), 4);
        assert_eq!(m.aug_bidegree(2), (2, 2));
        assert_eq!(m.hodge(2), (1, 1));
        assert_eq!(m.ext_degree(), 2);
        let _ = c1();
    }

    #[test]
    fn eval_substitutes_fiber_values() {
        let n = 1;
        let e = WeilElement::s(n, 0).mul(&WeilElement::s(n, 1)).mul(&WeilElement::lam(n, 0));
        let xi = vec![Complex64::new(0.3, 0.4)];
        let vals = e.eval_s(&xi);
        let expected = Complex64::new(0.3, 0.4) * Complex64::new(0.3, -0.4);
        let got = vals[&1u64];
        assert!((got - expected).norm() < 1e-15);
    }
}
