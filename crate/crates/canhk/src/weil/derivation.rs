//! Graded derivations of the Weil algebra.
//!
//! A derivation is stored by its images on the `4n` generators and extended
//! to the whole algebra by the graded Leibniz rule. Parity is tracked
//! explicitly; the sign convention is fixed once here: applying an odd
//! derivation past `j-1` anticommuting factors costs `(-1)^(j-1)`, and the
//! graded commutator is `{a,b} = a∘b + b∘a` for two odd derivations,
//! `a∘b - b∘a` otherwise.

use super::element::{AugBi, Hodge, Monomial, WeilElement};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone)]
pub struct GradedDerivation {
    n: usize,
    parity: Parity,
    /// Images of `s_0..s_{2n-1}`.
    img_s: Vec<WeilElement>,
    /// Images of `l_0..l_{2n-1}`.
    img_lam: Vec<WeilElement>,
    label: String,
}

impl GradedDerivation {
    pub fn new(
        n: usize,
        parity: Parity,
        img_s: Vec<WeilElement>,
        img_lam: Vec<WeilElement>,
        label: impl Into<String>,
    ) -> Self {
        assert!(n >= 1, "fiber dimension must be positive");
        assert_eq!(img_s.len(), 2 * n);
        assert_eq!(img_lam.len(), 2 * n);
        GradedDerivation { n, parity, img_s, img_lam, label: label.into() }
    }

    pub fn zero(n: usize, parity: Parity) -> Self {
        GradedDerivation::new(
            n,
            parity,
            vec![WeilElement::zero(n); 2 * n],
            vec![WeilElement::zero(n); 2 * n],
            "0",
        )
    }

    /// The contraction `sigma`: kills the symmetric generators, sends
    /// `l_i -> s_i` and `lb_i -> -sb_i`. Odd, lowers exterior degree by one.
    pub fn sigma(n: usize) -> Self {
        let mut img_lam = Vec::with_capacity(2 * n);
        for i in 0..n {
            img_lam.push(WeilElement::s(n, i));
        }
        for i in 0..n {
            img_lam.push(WeilElement::s(n, n + i).scale(Complex64::new(-1.0, 0.0)));
        }
        GradedDerivation::new(n, Parity::Odd, vec![WeilElement::zero(n); 2 * n], img_lam, "sigma")
    }

    /// The raising operator `C`, inverse to `sigma` on the symmetric
    /// generators: `s_i -> l_i`, `sb_i -> -lb_i`, zero on the exterior ones.
    pub fn c_op(n: usize) -> Self {
        let mut img_s = Vec::with_capacity(2 * n);
        for i in 0..n {
            img_s.push(WeilElement::lam(n, i));
        }
        for i in 0..n {
            img_s.push(WeilElement::lam(n, n + i).scale(Complex64::new(-1.0, 0.0)));
        }
        GradedDerivation::new(n, Parity::Odd, img_s, vec![WeilElement::zero(n); 2 * n], "C")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn image_s(&self, idx: usize) -> &WeilElement {
        &self.img_s[idx]
    }

    pub fn image_lam(&self, idx: usize) -> &WeilElement {
        &self.img_lam[idx]
    }

    /// Leibniz extension to an arbitrary element.
    pub fn apply(&self, e: &WeilElement) -> WeilElement {
        let n = self.n;
        let two_n = 2 * n;
        let odd = self.parity == Parity::Odd;
        let mut out = WeilElement::zero(n);
        for (mono, coeff) in e.terms() {
            let lam_part = WeilElement::monomial(n, lam_only(mono), Complex64::new(1.0, 0.0));
            // Symmetric factors first: even prefixes, no signs, but the image
            // must be inserted before the anticommuting tail.
            for i in 0..two_n {
                let exp = mono.s_exp(i);
                if exp == 0 || self.img_s[i].is_zero() {
                    continue;
                }
                let reduced_s = strip_lam(&reduce_s(mono, i));
                let partial = WeilElement::monomial(n, reduced_s, coeff * exp as f64);
                out = out.add(&partial.mul(&self.img_s[i]).mul(&lam_part));
            }
            // Anticommuting factors, in ascending order.
            let mask = mono.lam_mask();
            if mask != 0 {
                let s_part = strip_lam(mono);
                let mut bits: Vec<usize> = (0..two_n).filter(|&b| mono.has_lam(b)).collect();
                bits.sort_unstable();
                for (j, &b) in bits.iter().enumerate() {
                    if self.img_lam[b].is_zero() {
                        continue;
                    }
                    let sign = if odd && j % 2 == 1 { -1.0 } else { 1.0 };
                    let prefix: WeilElement = bits[..j]
                        .iter()
                        .fold(WeilElement::monomial(n, s_part, *coeff * sign), |acc, &bb| {
                            acc.mul(&WeilElement::lam(n, bb))
                        });
                    let suffix: WeilElement = bits[j + 1..]
                        .iter()
                        .fold(WeilElement::one(n), |acc, &bb| acc.mul(&WeilElement::lam(n, bb)));
                    out = out.add(&prefix.mul(&self.img_lam[b]).mul(&suffix));
                }
            }
        }
        out
    }

    /// `self` composed after `other` on an element.
    pub fn compose_apply(&self, other: &GradedDerivation, e: &WeilElement) -> WeilElement {
        self.apply(&other.apply(e))
    }

    /// Graded commutator; `a∘b + b∘a` when both are odd, `a∘b - b∘a` otherwise.
    pub fn supercommutator(a: &GradedDerivation, b: &GradedDerivation) -> GradedDerivation {
        assert_eq!(a.n, b.n);
        let n = a.n;
        let plus = a.parity == Parity::Odd && b.parity == Parity::Odd;
        let sign = if plus { 1.0 } else { -1.0 };
        let mut img_s = Vec::with_capacity(2 * n);
        let mut img_lam = Vec::with_capacity(2 * n);
        for i in 0..2 * n {
            let ab = a.apply(b.image_s(i));
            let ba = b.apply(a.image_s(i));
            img_s.push(ab.add(&ba.scale(Complex64::new(sign, 0.0))));
            let ab = a.apply(b.image_lam(i));
            let ba = b.apply(a.image_lam(i));
            img_lam.push(ab.add(&ba.scale(Complex64::new(sign, 0.0))));
        }
        let parity = if a.parity == b.parity { Parity::Even } else { Parity::Odd };
        GradedDerivation::new(n, parity, img_s, img_lam, format!("{{{},{}}}", a.label, b.label))
    }

    pub fn add(&self, other: &GradedDerivation) -> GradedDerivation {
        assert_eq!(self.n, other.n);
        assert_eq!(self.parity, other.parity);
        let img_s = (0..2 * self.n).map(|i| self.img_s[i].add(&other.img_s[i])).collect();
        let img_lam = (0..2 * self.n).map(|i| self.img_lam[i].add(&other.img_lam[i])).collect();
        GradedDerivation::new(self.n, self.parity, img_s, img_lam, self.label.clone())
    }

    pub fn scale(&self, c: Complex64) -> GradedDerivation {
        let img_s = self.img_s.iter().map(|e| e.scale(c)).collect();
        let img_lam = self.img_lam.iter().map(|e| e.scale(c)).collect();
        GradedDerivation::new(self.n, self.parity, img_s, img_lam, self.label.clone())
    }

    /// Restricts every generator image to a single Hodge shift.
    pub fn hodge_shift_component(&self, dp: i32, dq: i32) -> GradedDerivation {
        let n = self.n;
        let comp = |gen_hodge: Hodge, img: &WeilElement| {
            img.hodge_component((gen_hodge.0 + dp, gen_hodge.1 + dq))
        };
        let img_s = (0..2 * n)
            .map(|i| comp(Monomial::s_gen(i).hodge(n), &self.img_s[i]))
            .collect();
        let img_lam = (0..2 * n)
            .map(|i| comp(Monomial::lam_gen(i).hodge(n), &self.img_lam[i]))
            .collect();
        GradedDerivation::new(n, self.parity, img_s, img_lam, format!("{}^({dp},{dq})", self.label))
    }

    /// Hodge shifts present across all generator images.
    pub fn hodge_shifts(&self) -> Vec<Hodge> {
        let n = self.n;
        let mut shifts = Vec::new();
        let mut push = |gen: Hodge, img: &WeilElement| {
            for h in img.hodge_support() {
                shifts.push((h.0 - gen.0, h.1 - gen.1));
            }
        };
        for i in 0..2 * n {
            push(Monomial::s_gen(i).hodge(n), &self.img_s[i]);
            push(Monomial::lam_gen(i).hodge(n), &self.img_lam[i]);
        }
        shifts.sort();
        shifts.dedup();
        shifts
    }

    /// Augmentation bidegree shifts present across all generator images.
    pub fn aug_shifts(&self) -> Vec<(i64, i64)> {
        let n = self.n;
        let mut shifts = Vec::new();
        let mut push = |gen: AugBi, img: &WeilElement| {
            for a in img.aug_support() {
                shifts.push((a.0 as i64 - gen.0 as i64, a.1 as i64 - gen.1 as i64));
            }
        };
        for i in 0..2 * n {
            push(Monomial::s_gen(i).aug_bidegree(n), &self.img_s[i]);
            push(Monomial::lam_gen(i).aug_bidegree(n), &self.img_lam[i]);
        }
        shifts.sort();
        shifts.dedup();
        shifts
    }

    /// Deviation from commuting with the real structure, measured on the
    /// generators.
    pub fn reality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..2 * n {
            // conj(s_i) = -sb_i (indices swap between halves).
            let j = (i + n) % (2 * n);
            let lhs = self.img_s[j].scale(Complex64::new(-1.0, 0.0));
            let rhs = self.img_s[i].conj();
            worst = worst.max(lhs.distance(&rhs));
            let lhs = self.img_lam[(i + n) % (2 * n)].clone();
            let rhs = self.img_lam[i].conj();
            worst = worst.max(lhs.distance(&rhs));
        }
        worst
    }

    /// Checks the derivation property on sample products; the left factors
    /// must have definite exterior parity. Returns the worst residual; a
    /// self-test hook for composite operators.
    pub fn leibniz_defect(&self, samples: &[(WeilElement, WeilElement)]) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in samples {
            let parities: Vec<u32> = a.terms().map(|(m, _)| m.ext_degree() % 2).collect();
            assert!(
                parities.windows(2).all(|w| w[0] == w[1]),
                "left factor must have definite exterior parity"
            );
            let a_odd = parities.first().copied().unwrap_or(0) == 1;
            let sign = if self.parity == Parity::Odd && a_odd { -1.0 } else { 1.0 };
            let lhs = self.apply(&a.mul(b));
            let da_b = self.apply(a).mul(b);
            let a_db = a.mul(&self.apply(b)).scale(Complex64::new(sign, 0.0));
            worst = worst.max(lhs.distance(&da_b.add(&a_db)));
        }
        worst
    }
}

fn reduce_s(m: &Monomial, idx: usize) -> Monomial {
    // One fewer power of s_idx.
    let e = m.s_exp(idx);
    debug_assert!(e > 0);
    let shift = 4 * idx as u32;
    Monomial::from_raw((m.raw() & !(0xFu64 << shift)) | (((e - 1) as u64) << shift))
}

fn strip_lam(m: &Monomial) -> Monomial {
    Monomial::from_raw(m.raw() & ((1u64 << 40) - 1))
}

fn lam_only(m: &Monomial) -> Monomial {
    Monomial::from_raw(m.raw() & !((1u64 << 40) - 1))
}

/// Verdict of the weakly-Hodge test.
#[derive(Debug, Clone, Serialize)]
pub struct WeaklyHodgeVerdict {
    pub passes: bool,
    pub reality_defect: f64,
    /// Offending components: (generator name, hodge shift, largest coefficient).
    pub offenders: Vec<(String, (i32, i32), f64)>,
}

/// A map between graded pieces may only raise the holomorphic and
/// antiholomorphic weights; components with a negative shift in either
/// slot, or failure to commute with the real structure, disqualify it.
pub fn check_weakly_hodge(d: &GradedDerivation) -> WeaklyHodgeVerdict {
    let n = d.dim();
    let reality = d.reality_defect();
    let mut offenders = Vec::new();
    let mut scan = |name: String, gen: Hodge, img: &WeilElement| {
        for h in img.hodge_support() {
            let shift = (h.0 - gen.0, h.1 - gen.1);
            if shift.0 < 0 || shift.1 < 0 {
                offenders.push((name.clone(), shift, img.hodge_component(h).norm_max()));
            }
        }
    };
    for i in 0..2 * n {
        let gname = if i < n { format!("s_{i}") } else { format!("sb_{}", i - n) };
        scan(gname, Monomial::s_gen(i).hodge(n), d.image_s(i));
        let gname = if i < n { format!("l_{i}") } else { format!("lb_{}", i - n) };
        scan(gname, Monomial::lam_gen(i).hodge(n), d.image_lam(i));
    }
    WeaklyHodgeVerdict { passes: reality < 1e-12 && offenders.is_empty(), reality_defect: reality, offenders }
}

/// Serializable sparse form of a derivation: generator images as monomial lists.
#[derive(Debug, Clone, Serialize)]
pub struct DerivationDump {
    pub label: String,
    pub fiber_dim: usize,
    pub parity: Parity,
    pub images: Vec<GeneratorImage>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorImage {
    pub generator: String,
    pub terms: Vec<MonomialTerm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialTerm {
    /// Exponents of `s_0..s_{n-1}, sb_0..sb_{n-1}`.
    pub s_exps: Vec<u32>,
    /// Indices of anticommuting factors, `0..n` unbarred, `n..2n` barred.
    pub lam: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

pub fn dump_derivation(d: &GradedDerivation) -> DerivationDump {
    let n = d.dim();
    let two_n = 2 * n;
    let elem_terms = |e: &WeilElement| {
        let mut ts: Vec<MonomialTerm> = e
            .terms()
            .map(|(m, c)| MonomialTerm {
                s_exps: (0..two_n).map(|i| m.s_exp(i)).collect(),
                lam: (0..two_n).filter(|&b| m.has_lam(b)).collect(),
                re: c.re,
                im: c.im,
            })
            .collect();
        ts.sort_by(|a, b| (&a.s_exps, &a.lam).partial_cmp(&(&b.s_exps, &b.lam)).unwrap());
        ts
    };
    let mut images = Vec::new();
    for i in 0..two_n {
        let gname = if i < n { format!("s_{i}") } else { format!("sb_{}", i - n) };
        images.push(GeneratorImage { generator: gname, terms: elem_terms(d.image_s(i)) });
    }
    for i in 0..two_n {
        let gname = if i < n { format!("l_{i}") } else { format!("lb_{}", i - n) };
        images.push(GeneratorImage { generator: gname, terms: elem_terms(d.image_lam(i)) });
    }
    DerivationDump { label: d.label().to_string(), fiber_dim: n, parity: d.parity(), images }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_on_generators() {
        let n = 2;
        let sig = GradedDerivation::sigma(n);
        assert_eq!(sig.apply(&WeilElement::lam(n, 0)).distance(&WeilElement::s(n, 0)), 0.0);
        assert_eq!(
            sig.apply(&WeilElement::lam(n, n)).distance(&WeilElement::s(n, n).scale(Complex64::new(-1.0, 0.0))),
            0.0
        );
        assert!(sig.apply(&WeilElement::s(n, 0)).is_zero());
    }

    #[test]
    fn sigma_leibniz_on_product() {
        // sigma(s_0 lb_0) = -s_0 sb_0 since sigma kills s_0.
        let n = 1;
        let sig = GradedDerivation::sigma(n);
        let e = WeilElement::s(n, 0).mul(&WeilElement::lam(n, 1));
        let expect = WeilElement::s(n, 0).mul(&WeilElement::s(n, 1)).scale(Complex64::new(-1.0, 0.0));
        assert_eq!(sig.apply(&e).distance(&expect), 0.0);
    }

    #[test]
    fn sigma_on_two_form() {
        // sigma(l_0 lb_0) = s_0 lb_0 + sb_0 l_0 by the Leibniz expansion.
        let n = 1;
        let sig = GradedDerivation::sigma(n);
        let e = WeilElement::lam(n, 0).mul(&WeilElement::lam(n, 1));
        let expect = WeilElement::s(n, 0)
            .mul(&WeilElement::lam(n, 1))
            .add(&WeilElement::s(n, 1).mul(&WeilElement::lam(n, 0)));
        assert!(sig.apply(&e).distance(&expect) < 1e-15);
    }

    #[test]
    fn c_squared_and_sigma_squared_vanish() {
        let n = 2;
        let c = GradedDerivation::c_op(n);
        let sig = GradedDerivation::sigma(n);
        let e = WeilElement::s(n, 0)
            .mul(&WeilElement::s(n, 2))
            .mul(&WeilElement::lam(n, 1))
            .add(&WeilElement::s(n, 3).mul(&WeilElement::lam(n, 2)).mul(&WeilElement::lam(n, 0)));
        assert!(c.apply(&c.apply(&e)).norm_max() < 1e-15);
        assert!(sig.apply(&sig.apply(&e)).norm_max() < 1e-15);
    }

    #[test]
    fn c_sigma_commutator_counts_augmentation() {
        let n = 2;
        let c = GradedDerivation::c_op(n);
        let sig = GradedDerivation::sigma(n);
        let anti = GradedDerivation::supercommutator(&c, &sig);
        for k in 1..=4u32 {
            // Build an element of pure augmentation degree k.
            let mut e = WeilElement::one(n);
            for j in 0..k {
                e = e.mul(&if j % 2 == 0 {
                    WeilElement::s(n, (j as usize) % 4)
                } else {
                    WeilElement::lam(n, (j as usize) % 4)
                });
            }
            if e.is_zero() {
                continue;
            }
            let expect = e.scale(Complex64::new(k as f64, 0.0));
            assert!(anti.apply(&e).distance(&expect) < 1e-14, "k={k}");
        }
    }

    #[test]
    fn sigma_fails_weakly_hodge_c_passes() {
        let n = 2;
        assert!(check_weakly_hodge(&GradedDerivation::c_op(n)).passes);
        let verdict = check_weakly_hodge(&GradedDerivation::sigma(n));
        assert!(!verdict.passes);
        assert!(!verdict.offenders.is_empty());
    }

    #[test]
    fn both_are_real() {
        let n = 2;
        assert!(GradedDerivation::c_op(n).reality_defect() < 1e-15);
        assert!(GradedDerivation::sigma(n).reality_defect() < 1e-15);
    }
}
