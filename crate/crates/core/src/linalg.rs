//! Small dense complex linear algebra: fixed 3×3 operators on the atom's
//! Hilbert space and square matrices for the 9-dimensional Liouville space.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // unused whenever std is linked into the build
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

const ZERO: C64 = c64(0.0, 0.0);
const ONE: C64 = c64(1.0, 0.0);

/// 3×3 complex matrix, row-major. Indices are zero-based: `m[(0, 1)]` is the
/// element between level |1⟩ (row) and level |2⟩ (column).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [C64; 9]);

impl Default for Mat3 {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Mat3 {
    pub const fn zeros() -> Self {
        Mat3([ZERO; 9])
    }

    pub const fn identity() -> Self {
        Mat3([ONE, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ONE])
    }

    /// Projector |k⟩⟨k| (zero-based level index).
    pub fn projector(k: usize) -> Self {
        let mut m = Self::zeros();
        m[(k, k)] = ONE;
        m
    }

    /// Matrix unit |i⟩⟨j|.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zeros();
        m[(i, j)] = ONE;
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[3 * i + j] = f(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[4] + self.0[8]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.0.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        let mut out = *self;
        out.0.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// `self + s·other`, the workhorse of the Runge–Kutta stages.
    #[inline]
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut out = *self;
        for (o, x) in out.0.iter_mut().zip(other.0.iter()) {
            *o += x * s;
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Largest elementwise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |m_ij − conj(m_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Row-major flattening, the vectorization used for the Liouville space.
    pub fn to_vec9(&self) -> [C64; 9] {
        self.0
    }

    pub fn from_vec9(v: &[C64]) -> Self {
        let mut m = Self::zeros();
        m.0.copy_from_slice(&v[..9]);
        m
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part of `self` is used. The characteristic polynomial
    /// of a Hermitian 3×3 matrix has real coefficients and three real roots,
    /// which are found with the trigonometric form of Cardano's formula.
    pub fn hermitian_eigenvalues(&self) -> [f64; 3] {
        // cyclic Jacobi; unlike the closed-form cubic it keeps full accuracy
        // for (near-)degenerate spectra such as pure states
        let mut a = Mat3::from_fn(|i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let scale = a.max_abs();
        if scale == 0.0 {
            return [0.0; 3];
        }
        for _ in 0..32 {
            let off = a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr();
            if off <= (f64::EPSILON * scale) * (f64::EPSILON * scale) {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // unitary phase on index q makes a_pq real and positive
                let phase = apq.conj() / mag;
                for k in 0..3 {
                    a[(k, q)] *= phase;
                    a[(q, k)] *= phase.conj();
                }
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let (kp, kq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                }
                for k in 0..3 {
                    let (pk, qk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
            }
        }
        let mut e = [a[(0, 0)].re, a[(1, 1)].re, a[(2, 2)].re];
        e.sort_by(|x, y| x.total_cmp(y));
        e
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[3 * i + j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[3 * i + j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(mut self, rhs: Mat3) -> Mat3 {
        self += rhs;
        self
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, rhs: Mat3) {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(mut self, rhs: Mat3) -> Mat3 {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    #[inline]
    fn mul(self, rhs: Mat3) -> Mat3 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
            }
        }
        Mat3(out)
    }
}

/// Square complex matrix with heap storage, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Kronecker product `a ⊗ b` of two 3×3 matrices.
    pub fn kron3(a: &Mat3, b: &Mat3) -> Self {
        let mut m = Self::zeros(9);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        m[(3 * i + k, 3 * j + l)] = a[(i, j)] * b[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n).map(|i| (0..n).fold(ZERO, |acc, j| acc + self.data[i * n + j] * v[j])).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Shape(alloc::format!("right-hand side has length {}, expected {n}", b.len())));
        }
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let (piv, pmag) =
                (col..n)
                    .map(|r| (r, a[r * n + col].norm()))
                    .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmag <= scale * 1e-14 {
                return Err(Error::Singular { pivot: pmag, column: col });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                let xc = x[col];
                x[r] -= f * xc;
            }
        }
        for col in (0..n).rev() {
            let mut s = x[col];
            for j in col + 1..n {
                s -= a[col * n + j] * x[j];
            }
            x[col] = s / a[col * n + col];
        }
        Ok(x)
    }

    /// Matrix exponential by scaling and squaring with a Taylor series
    /// summed to machine precision.
    pub fn expm(&self) -> Self {
        let n = self.n;
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
        }
        let a = self.scale(c64(libm::ldexp(1.0, -(squarings as i32)), 0.0));
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=40 {
            term = term.matmul(&a).scale(c64(1.0 / k as f64, 0.0));
            result = result.add(&term);
            if term.norm_inf() <= 1e-18 * result.norm_inf() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

pub(crate) const MINUS_I: C64 = c64(0.0, -1.0);

#[cfg(test)]
mod tests {
    use super::*;

    fn hermitian(d: [f64; 3], off: [C64; 3]) -> Mat3 {
        let mut m = Mat3::zeros();
        m[(0, 0)] = c64(d[0], 0.0);
        m[(1, 1)] = c64(d[1], 0.0);
        m[(2, 2)] = c64(d[2], 0.0);
        m[(0, 1)] = off[0];
        m[(1, 0)] = off[0].conj();
        m[(0, 2)] = off[1];
        m[(2, 0)] = off[1].conj();
        m[(1, 2)] = off[2];
        m[(2, 1)] = off[2].conj();
        m
    }

    #[test]
    fn eigenvalues_of_diagonal_are_sorted_diagonal() {
        let m = hermitian([3.0, -1.0, 2.0], [ZERO; 3]);
        assert_eq!(m.hermitian_eigenvalues(), [-1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigenvalues_satisfy_trace_and_determinant() {
        let m = hermitian([0.3, -0.7, 1.1], [c64(0.2, 0.5), c64(-0.4, 0.1), c64(0.9, -0.3)]);
        let e = m.hermitian_eigenvalues();
        let tr = m.trace().re;
        assert!((e.iter().sum::<f64>() - tr).abs() < 1e-12);
        for &l in &e {
            // det(M − λI) ≈ 0
            let s = m - Mat3::identity().scale_re(l);
            let det = s[(0, 0)] * (s[(1, 1)] * s[(2, 2)] - s[(1, 2)] * s[(2, 1)])
                - s[(0, 1)] * (s[(1, 0)] * s[(2, 2)] - s[(1, 2)] * s[(2, 0)])
                + s[(0, 2)] * (s[(1, 0)] * s[(2, 1)] - s[(1, 1)] * s[(2, 0)]);
            assert!(det.norm() < 1e-12, "det = {det}");
        }
    }

    #[test]
    fn eigenvalues_of_rank_one_projector() {
        let v = [c64(0.6, 0.0), c64(0.0, 0.8), c64(0.0, 0.0)];
        let m = Mat3::from_fn(|i, j| v[i] * v[j].conj());
        let e = m.hermitian_eigenvalues();
        assert!(e[0].abs() < 1e-15 && e[1].abs() < 1e-15);
        assert!((e[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut a = DenseMatrix::zeros(4);
        let vals = [4.0, 1.0, 0.5, 0.0, 1.0, 3.0, 0.0, 0.2, 0.0, 0.1, 2.0, 1.0, 1.0, 0.0, 0.0, 5.0];
        for (k, v) in vals.iter().enumerate() {
            a[(k / 4, k % 4)] = c64(*v, 0.1 * k as f64);
        }
        let x = [c64(1.0, -1.0), c64(0.5, 0.0), c64(-2.0, 0.3), c64(0.0, 1.0)];
        let b = a.matvec(&x);
        let got = a.solve(&b).unwrap();
        for (g, e) in got.iter().zip(x.iter()) {
            assert!((g - e).norm() < 1e-13);
        }
    }

    #[test]
    fn solve_reports_singular_matrix() {
        let a = DenseMatrix::zeros(3);
        assert!(matches!(a.solve(&[ONE, ONE, ONE]), Err(Error::Singular { .. })));
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp(θ [[0, -1], [1, 0]]) embedded in 9×9 acts as a rotation on the first two axes.
        let theta = 2.7;
        let mut a = DenseMatrix::zeros(9);
        a[(0, 1)] = c64(-theta, 0.0);
        a[(1, 0)] = c64(theta, 0.0);
        let e = a.expm();
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-14);
        assert!((e[(5, 5)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expm_of_diagonal_uses_scaling() {
        let mut a = DenseMatrix::zeros(2);
        a[(0, 0)] = c64(-7.5, 0.0);
        a[(1, 1)] = c64(0.0, 12.0);
        let e = a.expm();
        assert!((e[(0, 0)].re - (-7.5f64).exp()).abs() < 1e-14);
        let z = c64(0.0, 12.0).exp();
        assert!((e[(1, 1)] - z).norm() < 1e-12);
    }
}
