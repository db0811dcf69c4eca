//! Dense complex-matrix kernel: tensor products, Hermitian eigendecomposition,
//! PSD square root.
//!
//! Row-major storage. Everything here is sized for desk-scale states
//! (total dimension well under 100), so the cyclic Jacobi method is the
//! eigensolver of choice: deterministic, branch-light and accurate to near
//! machine precision at these sizes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::policy::Tolerances;
use crate::C64;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid_argument(alloc::format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMat { rows, cols, data })
    }

    /// Build from real entries, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let data = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        CMat::from_rows(rows, cols, data)
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = CMat::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker (tensor) product, row-major block convention: the left factor is
/// the most significant one.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.rows * b.rows, a.cols * b.cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let x = a[(ia, ja)];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of amplitude vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic Jacobi rotation.
///
/// Returns eigenvalues sorted descending and the matching unitary of
/// eigenvectors (columns), so that `m == V diag(w) V^dagger` up to the
/// reconstruction tolerance. Errors on non-Hermitian input.
pub fn herm_eig(m: &CMat, tol: &Tolerances) -> Result<(Vec<f64>, CMat)> {
    if !m.is_square() {
        return Err(Error::invalid_argument("herm_eig: matrix not square"));
    }
    if m.hermiticity_defect() > tol.hermiticity {
        return Err(Error::invalid_argument(alloc::format!(
            "herm_eig: input not Hermitian (defect {:.3e})",
            m.hermiticity_defect()
        )));
    }
    let (w, v) = jacobi(m, true);
    Ok((w, v.expect("vectors requested")))
}

/// Eigenvalues only, sorted descending; skips eigenvector accumulation.
pub fn herm_eigvals(m: &CMat, tol: &Tolerances) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::invalid_argument("herm_eigvals: matrix not square"));
    }
    if m.hermiticity_defect() > tol.hermiticity {
        return Err(Error::invalid_argument(alloc::format!(
            "herm_eigvals: input not Hermitian (defect {:.3e})",
            m.hermiticity_defect()
        )));
    }
    let (w, _) = jacobi(m, false);
    Ok(w)
}

fn jacobi(m: &CMat, want_vectors: bool) -> (Vec<f64>, Option<CMat>) {
    let n = m.rows();
    // Symmetrize first so sub-tolerance asymmetry never leaks into the sweep.
    let mut a = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = want_vectors.then(|| CMat::identity(n));
    let scale = a.frobenius_norm().max(1.0);
    let stop = 1e-15 * scale;

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if math::sqrt(off) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= stop / (n as f64) {
                    continue;
                }
                let u = apq / b; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                // G is identity except G[p][p]=c, G[p][q]=s*u,
                // G[q][p]=-s*conj(u), G[q][q]=c; apply A <- G^dagger A G.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * (s * u.conj());
                    a[(k, q)] = akp * (s * u) + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * (s * u);
                    a[(q, k)] = apk * (s * u.conj()) + aqk * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let vkp = vm[(k, p)];
                        let vkq = vm[(k, q)];
                        vm[(k, p)] = vkp * c - vkq * (s * u.conj());
                        vm[(k, q)] = vkp * (s * u) + vkq * c;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let w: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vs = v.map(|vm| {
        let mut sorted = CMat::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, new_col)] = vm[(k, old_col)];
            }
        }
        sorted
    });
    (w, vs)
}

/// Square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-psd_floor, 0)` are treated as numeric zeros; anything
/// below `-psd_strict` is a hard error.
pub fn psd_sqrt(m: &CMat, tol: &Tolerances) -> Result<CMat> {
    let (w, v) = herm_eig(m, tol)?;
    let n = m.rows();
    let mut roots = Vec::with_capacity(n);
    for &lam in &w {
        if lam < -tol.psd_strict {
            return Err(Error::numeric(alloc::format!(
                "psd_sqrt: eigenvalue {lam:.3e} significantly negative"
            )));
        }
        roots.push(math::sqrt(lam.max(0.0)));
    }
    // V diag(sqrt(w)) V^dagger
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v[(i, k)] * roots[k] * v[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand_chacha::ChaCha12Rng;
    use rand_core::{RngCore, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        let mut g = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = c(unit(), unit());
            }
        }
        g.add(&g.adjoint()).scale(0.5)
    }

    #[test]
    fn kron_identities() {
        let i2 = CMat::identity(2);
        assert_eq!(kron(&i2, &i2), CMat::identity(4));

        let p0 = CMat::diag(&[1.0, 0.0]);
        let p1 = CMat::diag(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1), CMat::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_bit_flip() {
        let x = CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let xx = kron(&x, &x);
        let ket00 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let out = xx.mul_vec(&ket00);
        assert_abs_diff_eq!(out[3].re, 1.0, epsilon = 1e-15);
        assert!(out[0].norm() + out[1].norm() + out[2].norm() < 1e-15);
    }

    #[test]
    fn kron_associativity_on_random_triples() {
        let a = random_hermitian(2, 1);
        let b = random_hermitian(3, 2);
        let cm = random_hermitian(2, 3);
        let lhs = kron(&kron(&a, &b), &cm);
        let rhs = kron(&a, &kron(&b, &cm));
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }

    #[test]
    fn eig_diagonal() {
        let tol = Tolerances::default();
        let (w, _) = herm_eig(&CMat::diag(&[1.0, 2.0, 3.0]), &tol).unwrap();
        assert_eq!(w, alloc::vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_pauli_x() {
        let tol = Tolerances::default();
        let x = CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let (w, v) = herm_eig(&x, &tol).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], -1.0, epsilon = 1e-14);
        // eigenvectors are (|0> +- |1>)/sqrt(2) up to phase
        for col in 0..2 {
            let ratio = v[(1, col)] / v[(0, col)];
            assert_abs_diff_eq!(ratio.re, if col == 0 { 1.0 } else { -1.0 }, epsilon = 1e-12);
            assert_abs_diff_eq!(ratio.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn eig_reconstructs_random_9x9() {
        let tol = Tolerances::default();
        let m = random_hermitian(9, 42);
        let (w, v) = herm_eig(&m, &tol).unwrap();
        let recon = v.mul(&CMat::diag(&w)).mul(&v.adjoint());
        assert!(recon.sub(&m).frobenius_norm() < 1e-9);
        // eigenvalue sum equals trace
        let sum: f64 = w.iter().sum();
        assert_abs_diff_eq!(sum, m.trace().re, epsilon = 1e-9);
        // unitarity
        assert!(v.adjoint().mul(&v).sub(&CMat::identity(9)).max_abs() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let tol = Tolerances::default();
        let m = CMat::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            herm_eig(&m, &tol),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sqrt_diag() {
        let tol = Tolerances::default();
        let s = psd_sqrt(&CMat::diag(&[4.0, 9.0]), &tol).unwrap();
        assert_abs_diff_eq!(s[(0, 0)].re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[(1, 1)].re, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_projector_is_projector() {
        let tol = Tolerances::default();
        // projector onto (|0>+|1>)/sqrt(2)
        let p = CMat::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let s = psd_sqrt(&p, &tol).unwrap();
        assert!(s.sub(&p).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let tol = Tolerances::default();
        let g = random_hermitian(5, 7);
        let psd = g.mul(&g.adjoint());
        let s = psd_sqrt(&psd, &tol).unwrap();
        assert!(s.mul(&s).sub(&psd).frobenius_norm() < 1e-8);
    }

    #[test]
    fn sqrt_rejects_significantly_negative() {
        let tol = Tolerances::default();
        let m = CMat::diag(&[1.0, -0.5]);
        assert!(matches!(psd_sqrt(&m, &tol), Err(Error::Numeric(_))));
    }
}
