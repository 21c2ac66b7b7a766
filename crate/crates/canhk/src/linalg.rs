//! Dense complex linear algebra for the small matrices used throughout the
//! crate (fiber dimensions are tiny, so everything is O(n^3) without blocking).

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Column-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        CMat::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[i] += self[(i, j)] * v[j];
            }
        }
        out
    }

    /// Max-abs entry norm. Cheap and adequate for residual thresholds.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator 1-norm (max column sum); used for cheap condition estimates.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev <= tol
    }

    /// Commutator norm with the adjoint; zero for normal matrices.
    pub fn normality_defect(&self) -> f64 {
        let a = self.adjoint();
        (&(self * &a) - &(&a * self)).norm_max()
    }

    /// Inverse by Gaussian elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMat, LinalgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMat::identity(n);
        for k in 0..n {
            let (mut pi, mut pv) = (k, a[(k, k)].norm());
            for i in k + 1..n {
                if a[(i, k)].norm() > pv {
                    pi = i;
                    pv = a[(i, k)].norm();
                }
            }
            if pv < 1e-300 {
                return Err(LinalgError::Singular);
            }
            if pi != k {
                for j in 0..n {
                    let (x, y) = (a[(k, j)], a[(pi, j)]);
                    a[(k, j)] = y;
                    a[(pi, j)] = x;
                    let (x, y) = (inv[(k, j)], inv[(pi, j)]);
                    inv[(k, j)] = y;
                    inv[(pi, j)] = x;
                }
            }
            let piv = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= piv;
                inv[(k, j)] /= piv;
            }
            for i in 0..n {
                if i != k {
                    let m = a[(i, k)];
                    if m.norm() > 0.0 {
                        for j in 0..n {
                            let akj = a[(k, j)];
                            let ikj = inv[(k, j)];
                            a[(i, j)] -= m * akj;
                            inv[(i, j)] -= m * ikj;
                        }
                    }
                }
            }
        }
        Ok(inv)
    }

    /// Condition number estimate in the 1-norm.
    pub fn cond_one(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm_one() * inv.norm_one(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Rank by column-pivoted Gaussian elimination.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let scale = a.norm_max().max(1.0);
        let mut rank = 0;
        let mut row = 0;
        for col in 0..n {
            if row >= m {
                break;
            }
            let (mut pi, mut pv) = (row, a[(row, col)].norm());
            for i in row + 1..m {
                if a[(i, col)].norm() > pv {
                    pi = i;
                    pv = a[(i, col)].norm();
                }
            }
            if pv <= tol * scale {
                continue;
            }
            if pi != row {
                for j in 0..n {
                    let (x, y) = (a[(row, j)], a[(pi, j)]);
                    a[(row, j)] = y;
                    a[(pi, j)] = x;
                }
            }
            for i in row + 1..m {
                let f = a[(i, col)] / a[(row, col)];
                for j in col..n {
                    let v = a[(row, j)];
                    a[(i, j)] -= f * v;
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    /// Matrix polynomial sum_{p=1..coeffs.len()} coeffs[p-1] * A^p by Horner.
    pub fn poly_no_const(&self, coeffs: &[f64]) -> CMat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut acc = CMat::zeros(n, n);
        for &c in coeffs.iter().rev() {
            acc = &(self * &acc) + &CMat::identity(n).scale(Complex64::new(c, 0.0));
        }
        self * &acc
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i + j * self.rows]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i + j * self.rows]
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)])
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for k in 0..self.cols {
                let r = rhs[(k, j)];
                if r.norm_sqr() == 0.0 {
                    continue;
                }
                for i in 0..self.rows {
                    out[(i, j)] += self[(i, k)] * r;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    Singular,
    NotNormal,
}

impl std::fmt::Display for LinalgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinalgError::Singular => write!(f, "matrix is singular to working precision"),
            LinalgError::NotNormal => write!(f, "matrix is not normal within tolerance"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, U) with A = U diag(w) U^*.
pub fn eigh(a: &CMat) -> (Vec<f64>, CMat) {
    assert!(a.rows == a.cols);
    let n = a.rows;
    let mut h = a.clone();
    // Symmetrize to kill round-off skew; callers check Hermitianness.
    for i in 0..n {
        for j in 0..n {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
        }
    }
    let mut u = CMat::identity(n);
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(h[(i, j)].norm());
            }
        }
        if off < 1e-15 * (1.0 + h.norm_max()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = h[(p, q)];
                if hpq.norm() < 1e-18 {
                    continue;
                }
                // Unitary 2x2 rotation diagonalizing the (p,q) block.
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let phase = hpq / hpq.norm();
                let apq = hpq.norm();
                let theta = 0.5 * (2.0 * apq).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // Columns: p' = c*p - s*conj(phase)*q ; q' = s*phase*p + c*q
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * c - hiq * phase.conj() * s;
                    h[(i, q)] = hip * phase * s + hiq * c;
                }
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = hpj * c - hqj * phase * s;
                    h[(q, j)] = hpj * phase.conj() * s + hqj * c;
                }
                for i in 0..n {
                    let uip = u[(i, p)];
                    let uiq = u[(i, q)];
                    u[(i, p)] = uip * c - uiq * phase.conj() * s;
                    u[(i, q)] = uip * phase * s + uiq * c;
                }
            }
        }
    }
    let w = (0..n).map(|i| h[(i, i)].re).collect();
    (w, u)
}

/// Eigendecomposition of a numerically normal matrix.
///
/// Splits A = H + iK into commuting Hermitian parts, diagonalizes H, then
/// diagonalizes K inside each H-eigenvalue cluster. Returns (eigenvalues, U)
/// with A = U diag(w) U^* and U unitary.
pub fn eig_normal(a: &CMat, normality_tol: f64) -> Result<(Vec<Complex64>, CMat), LinalgError> {
    assert!(a.rows == a.cols);
    let n = a.rows;
    if a.normality_defect() > normality_tol * (1.0 + a.norm_max() * a.norm_max()) {
        return Err(LinalgError::NotNormal);
    }
    let herm = CMat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let skew = CMat::from_fn(n, n, |i, j| {
        (a[(i, j)] - a[(j, i)].conj()) * Complex64::new(0.0, -0.5)
    });
    let (wh, uh) = eigh(&herm);
    // K expressed in the H-eigenbasis is block diagonal over clusters.
    let k1 = &(&uh.adjoint() * &skew) * &uh;
    let scale = 1.0 + wh.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| wh[i].partial_cmp(&wh[j]).unwrap());
    let mut u = CMat::zeros(n, n);
    let mut vals = vec![Complex64::new(0.0, 0.0); n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (wh[order[end]] - wh[order[end - 1]]).abs() < 1e-9 * scale {
            end += 1;
        }
        let idx = &order[start..end];
        let m = idx.len();
        let block = CMat::from_fn(m, m, |i, j| k1[(idx[i], idx[j])]);
        let (wk, ub) = eigh(&block);
        for (bj, &_col) in idx.iter().enumerate() {
            let target = idx[bj];
            vals[target] = Complex64::new(wh[idx[bj]], wk[bj]);
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (bi, &src) in idx.iter().enumerate() {
                    acc += uh[(i, src)] * ub[(bi, bj)];
                }
                u[(i, target)] = acc;
            }
        }
        start = end;
    }
    Ok((vals, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let a = CMat::from_rows(&[
            vec![c(2.0, 1.0), c(0.5, -0.3)],
            vec![c(-1.0, 0.2), c(1.5, 0.0)],
        ]);
        let inv = a.inverse().unwrap();
        let id = &a * &inv;
        assert!((&id - &CMat::identity(2)).norm_max() < 1e-12);
    }

    #[test]
    fn rank_detects_deficiency() {
        let a = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)],
            vec![c(2.0, 0.0), c(4.0, 0.0), c(6.0, 0.0)],
            vec![c(0.0, 1.0), c(0.0, 2.0), c(0.0, 3.0)],
        ]);
        assert_eq!(a.rank(1e-12), 1);
        assert_eq!(CMat::identity(3).rank(1e-12), 3);
    }

    #[test]
    fn eigh_reconstructs() {
        let a = CMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.3, 0.4), c(0.0, -0.2)],
            vec![c(0.3, -0.4), c(-2.0, 0.0), c(0.1, 0.0)],
            vec![c(0.0, 0.2), c(0.1, 0.0), c(0.5, 0.0)],
        ]);
        let (w, u) = eigh(&a);
        let d = CMat::from_fn(3, 3, |i, j| if i == j { c(w[i], 0.0) } else { c(0.0, 0.0) });
        let rec = &(&u * &d) * &u.adjoint();
        assert!((&rec - &a).norm_max() < 1e-12);
        let uu = &u.adjoint() * &u;
        assert!((&uu - &CMat::identity(3)).norm_max() < 1e-12);
    }

    #[test]
    fn eig_normal_reconstructs() {
        // Normal but not Hermitian: unitary rotation of a complex diagonal.
        let d = CMat::from_fn(3, 3, |i, j| {
            if i == j {
                c(i as f64, 1.0 - i as f64)
            } else {
                c(0.0, 0.0)
            }
        });
        let th: f64 = 0.7;
        let mut q = CMat::identity(3);
        q[(0, 0)] = c(th.cos(), 0.0);
        q[(0, 1)] = c(-th.sin(), 0.0);
        q[(1, 0)] = c(th.sin(), 0.0);
        q[(1, 1)] = c(th.cos(), 0.0);
        let a = &(&q * &d) * &q.adjoint();
        let (w, u) = eig_normal(&a, 1e-12).unwrap();
        let dw = CMat::from_fn(3, 3, |i, j| if i == j { w[i] } else { c(0.0, 0.0) });
        let rec = &(&u * &dw) * &u.adjoint();
        assert!((&rec - &a).norm_max() < 1e-10);
    }

    #[test]
    fn eig_normal_rejects_nonnormal() {
        let a = CMat::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
        assert!(eig_normal(&a, 1e-12).is_err());
    }
}
