//! The generating function `f(z) = sum_{p>=1} f_p z^p` of the fiberwise
//! recursion, with exact rational coefficients.
//!
//! The coefficients satisfy `f_1 = 1` and, for `p >= 2`,
//!
//! ```text
//! (2p + 1) f_p + sum_{l=1}^{p-1} f_l f_{p-l} = 0,
//! ```
//!
//! equivalently `f` solves `2 z f'(z) + f(z) + f(z)^2 = 3 z` with `f(0) = 0`.
//! Rational arithmetic keeps the recurrence exactly checkable; floating
//! point enters only at evaluation time.

use crate::linalg::{eig_normal, CMat, LinalgError};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::io::Write;

/// Exact rational coefficients `f_1 .. f_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesF {
    coeffs: Vec<BigRational>,
}

/// How [`eval_endo`] applies the series to a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum EndoStrategy {
    /// Horner evaluation of the truncated matrix polynomial.
    TruncatedSeries,
    /// Diagonalize (the input must be normal) and apply the truncated
    /// scalar series to each eigenvalue.
    Eigendecomposition,
}

/// Which function of the operator argument is evaluated.
///
/// `f` itself vanishes at zero, so the structure blocks built from it are
/// singular on the zero section; `1 + f` is the variant with unit constant
/// term. Both are first-class and the structure-level integrability test
/// selects between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Variant {
    F,
    OnePlusF,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::F => write!(f, "f"),
            Variant::OnePlusF => write!(f, "1+f"),
        }
    }
}

#[derive(Debug)]
pub enum FgenError {
    /// Eigendecomposition requested for a matrix that is not normal.
    NotNormal { defect: f64 },
    /// Requested more terms than the series holds.
    NotEnoughTerms { have: usize, want: usize },
}

impl std::fmt::Display for FgenError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FgenError::NotNormal { defect } => {
                write!(f, "eigendecomposition strategy needs a normal matrix (commutator with adjoint {defect:.3e})")
            }
            FgenError::NotEnoughTerms { have, want } => {
                write!(f, "series holds {have} coefficients, {want} requested")
            }
        }
    }
}

impl std::error::Error for FgenError {}

impl SeriesF {
    /// Number of computed coefficients.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `f_p` for `1 <= p <= order`.
    pub fn coeff(&self, p: usize) -> &BigRational {
        assert!(p >= 1 && p <= self.coeffs.len(), "coefficient index out of range");
        &self.coeffs[p - 1]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficients truncated to `terms` entries, as f64.
    pub fn coeffs_f64(&self, terms: usize) -> Vec<f64> {
        assert!(terms <= self.coeffs.len());
        self.coeffs[..terms].iter().map(|c| c.to_f64().unwrap()).collect()
    }

    /// Writes the table `p,numerator,denominator` in CSV form.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "p,numerator,denominator")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, c.numer(), c.denom())?;
        }
        Ok(())
    }
}

/// Computes `f_1 .. f_{n_max}` by the recurrence, exactly.
pub fn coefficients(n_max: usize) -> SeriesF {
    assert!(n_max >= 1, "n_max must be positive");
    let mut coeffs: Vec<BigRational> = Vec::with_capacity(n_max);
    coeffs.push(BigRational::one());
    for p in 2..=n_max {
        let mut conv = BigRational::zero();
        for l in 1..p {
            conv += &coeffs[l - 1] * &coeffs[p - l - 1];
        }
        let denom = BigRational::from_integer(BigInt::from(2 * p as i64 + 1));
        coeffs.push(-conv / denom);
    }
    SeriesF { coeffs }
}

/// Exact residual of the defining ODE, coefficient by coefficient.
///
/// Entry `p-1` is the coefficient of `z^p` in `2 z f' + f + f^2 - 3 z`,
/// namely `(2p+1) f_p + sum f_l f_{p-l} - 3 [p=1]`. All entries are zero
/// exactly when the series satisfies the recurrence.
pub fn ode_residual(s: &SeriesF) -> Vec<BigRational> {
    let n = s.order();
    let mut res = Vec::with_capacity(n);
    for p in 1..=n {
        let mut r = BigRational::from_integer(BigInt::from(2 * p as i64 + 1)) * s.coeff(p);
        for l in 1..p {
            r += s.coeff(l) * s.coeff(p - l);
        }
        if p == 1 {
            r -= BigRational::from_integer(BigInt::from(3));
        }
        res.push(r);
    }
    res
}

/// Builds a tampered series for negative tests; panics unless `n_max >= 1`.
pub fn series_from_rationals(coeffs: Vec<BigRational>) -> SeriesF {
    assert!(!coeffs.is_empty());
    SeriesF { coeffs }
}

/// Result of a scalar evaluation: partial sum plus a crude tail indicator.
#[derive(Debug, Clone, Copy)]
pub struct ScalarEval {
    pub value: f64,
    /// Magnitude of the last retained term.
    pub tail: f64,
    /// Set when the retained terms stopped contracting in magnitude,
    /// i.e. the argument looks to be outside the empirical convergence range.
    pub contraction_warning: bool,
}

/// Partial sum `sum_{p<=terms} f_p x^p` with the last-term magnitude.
pub fn eval_scalar(s: &SeriesF, x: f64, terms: usize) -> Result<ScalarEval, FgenError> {
    if terms > s.order() {
        return Err(FgenError::NotEnoughTerms { have: s.order(), want: terms });
    }
    let mut value = 0.0;
    let mut xp = 1.0;
    let mut prev_mag = f64::INFINITY;
    let mut tail = 0.0;
    let mut contraction_warning = false;
    for p in 1..=terms {
        xp *= x;
        let term = s.coeff(p).to_f64().unwrap() * xp;
        value += term;
        let mag = term.abs();
        // Ignore the first few terms; the magnitudes may wobble before the
        // geometric regime sets in.
        if p > 3 && mag > prev_mag && mag > 1e-14 {
            contraction_warning = true;
        }
        prev_mag = mag;
        tail = mag;
    }
    Ok(ScalarEval { value, tail, contraction_warning })
}

/// Derivative partial sum `sum_{p<=terms} p f_p x^(p-1)`.
pub fn eval_scalar_derivative(s: &SeriesF, x: f64, terms: usize) -> Result<f64, FgenError> {
    if terms > s.order() {
        return Err(FgenError::NotEnoughTerms { have: s.order(), want: terms });
    }
    let mut value = 0.0;
    let mut xp = 1.0;
    for p in 1..=terms {
        value += p as f64 * s.coeff(p).to_f64().unwrap() * xp;
        xp *= x;
    }
    Ok(value)
}

/// Applies `phi(A)` with `phi = f` or `phi = 1 + f`.
pub fn eval_endo(
    s: &SeriesF,
    a: &CMat,
    variant: Variant,
    strategy: EndoStrategy,
    terms: usize,
) -> Result<CMat, FgenError> {
    assert_eq!(a.rows, a.cols, "endomorphism must be square");
    if terms > s.order() {
        return Err(FgenError::NotEnoughTerms { have: s.order(), want: terms });
    }
    let n = a.rows;
    let fa = match strategy {
        EndoStrategy::TruncatedSeries => a.poly_no_const(&s.coeffs_f64(terms)),
        EndoStrategy::Eigendecomposition => {
            let (vals, u) = eig_normal(a, 1e-12).map_err(|e| match e {
                LinalgError::NotNormal => FgenError::NotNormal { defect: a.normality_defect() },
                LinalgError::Singular => unreachable!(),
            })?;
            let coeffs = s.coeffs_f64(terms);
            let mut d = CMat::zeros(n, n);
            for (i, lam) in vals.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &c in coeffs.iter().rev() {
                    acc = lam * (acc + c);
                }
                d[(i, i)] = acc;
            }
            &(&u * &d) * &u.adjoint()
        }
    };
    Ok(match variant {
        Variant::F => fa,
        Variant::OnePlusF => &fa + &CMat::identity(n),
    })
}

/// Pretty-prints a rational (used by the CLI table output).
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else if r.is_negative() {
        format!("{}/{}", r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
