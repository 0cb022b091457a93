//! Small dense linear algebra: the engine works with 3×3 density matrices,
//! 9×9 superoperators and at most a handful of fit parameters, so nothing
//! here needs to scale.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

pub type Mat3 = [[Complex64; 3]; 3];

pub const ZERO3: Mat3 = [[Complex64::new(0.0, 0.0); 3]; 3];

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_adjoint(a: &Mat3) -> Mat3 {
    let mut out = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn mat3_axpy(acc: &mut Mat3, alpha: Complex64, x: &Mat3) {
    for i in 0..3 {
        for j in 0..3 {
            acc[i][j] += alpha * x[i][j];
        }
    }
}

/// Eigenvalues of a Hermitian 3×3 matrix in ascending order (closed-form
/// trigonometric solution of the characteristic cubic).
pub fn hermitian3_eigenvalues(a: &Mat3) -> [f64; 3] {
    let a00 = a[0][0].re;
    let a11 = a[1][1].re;
    let a22 = a[2][2].re;
    let off = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
    let q = (a00 + a11 + a22) / 3.0;
    let p2 = (a00 - q).powi(2) + (a11 - q).powi(2) + (a22 - q).powi(2) + 2.0 * off;
    if p2 <= 1e-300 {
        return [q, q, q];
    }
    let p = Float::sqrt(p2 / 6.0);
    // B = (A - qI)/p, r = det(B)/2
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= Complex64::new(q, 0.0);
        for v in row.iter_mut() {
            *v /= p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = Float::acos(r) / 3.0;
    let hi = q + 2.0 * p * Float::cos(phi);
    let lo = q + 2.0 * p * Float::cos(phi + 2.0 * PI / 3.0);
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Solve `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is `n×n` row-major. Returns the smallest absolute pivot encountered,
/// or `Err(pivot)` when a pivot falls below `tol` times the largest entry.
pub fn solve_real(a: &mut [f64], b: &mut [f64], n: usize, tol: f64) -> Result<f64, f64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_val <= tol * scale {
            return Err(piv_val / scale);
        }
        min_pivot = min_pivot.min(piv_val / scale);
        if piv_row != col {
            for k in 0..n {
                a.swap(col * n + k, piv_row * n + k);
            }
            b.swap(col, piv_row);
        }
        let pivot = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / pivot;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col * n + k] * b[k];
        }
        b[col] = acc / a[col * n + col];
    }
    Ok(min_pivot)
}

/// Inverse of a symmetric positive-definite matrix, or `None` when the
/// matrix is numerically singular after unit-diagonal rescaling.
pub fn spd_inverse(a: &[f64], n: usize, tol: f64) -> Option<Vec<f64>> {
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    if d.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let s: Vec<f64> = d.iter().map(|v| 1.0 / Float::sqrt(*v)).collect();
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut m: Vec<f64> = (0..n * n).map(|k| a[k] * s[k / n] * s[k % n]).collect();
        let mut rhs = vec![0.0; n];
        rhs[col] = 1.0;
        solve_real(&mut m, &mut rhs, n, tol).ok()?;
        for row in 0..n {
            inv[row * n + col] = rhs[row] * s[row] * s[col];
        }
    }
    Some(inv)
}

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).sum()).collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.data[i * self.n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Self {
        let norm = self.norm_inf();
        let mut squarings = 0u32;
        let mut scaled_norm = norm;
        while scaled_norm > 0.5 {
            scaled_norm /= 2.0;
            squarings += 1;
        }
        let a = self.scale(Float::powi(0.5, squarings as i32));
        let mut result = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..=20 {
            term = term.mul(&a).scale(1.0 / k as f64);
            for (r, t) in result.data.iter_mut().zip(&term.data) {
                *r += t;
            }
            if term.norm_inf() < 1e-18 * result.norm_inf() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}
