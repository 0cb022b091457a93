use num_complex::Complex64;

use crate::linalg::{hermitian3_eigenvalues, Mat3, ZERO3};

/// Density matrix of the `{|0⟩, |1⟩, |2⟩}` ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub m: Mat3,
}

impl DensityMatrix3 {
    pub fn ground() -> Self {
        Self::pure_level(0)
    }

    /// `|k⟩⟨k|`.
    pub fn pure_level(k: usize) -> Self {
        let mut m = ZERO3;
        m[k][k] = Complex64::new(1.0, 0.0);
        Self { m }
    }

    pub fn from_matrix(m: Mat3) -> Self {
        Self { m }
    }

    /// Element `⟨i|ρ|j⟩`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn population(&self, k: usize) -> f64 {
        self.m[k][k].re
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Largest deviation `|ρ_ij − ρ_ji*|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        hermitian3_eigenvalues(&self.m)
    }

    /// Hermitian within 1e-10, unit trace within 1e-10 and eigenvalues above
    /// -1e-9.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_error() <= 1e-10
            && (self.trace() - 1.0).norm() <= 1e-10
            && self.eigenvalues()[0] >= -1e-9
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }

    pub(crate) fn from_real(x: &[f64; 9]) -> Self {
        let mut m = ZERO3;
        m[0][0] = Complex64::new(x[0], 0.0);
        m[1][1] = Complex64::new(x[1], 0.0);
        m[2][2] = Complex64::new(x[2], 0.0);
        for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
            let v = Complex64::new(x[3 + 2 * k], x[4 + 2 * k]);
            m[i][j] = v;
            m[j][i] = v.conj();
        }
        Self { m }
    }

    pub(crate) fn to_real(self) -> [f64; 9] {
        let mut x = [0.0; 9];
        for k in 0..3 {
            x[k] = self.m[k][k].re;
        }
        for (k, &(i, j)) in OFF_DIAGONAL.iter().enumerate() {
            // average with the lower triangle so a slightly non-Hermitian
            // input projects onto its Hermitian part
            let v = (self.m[i][j] + self.m[j][i].conj()) * 0.5;
            x[3 + 2 * k] = v.re;
            x[4 + 2 * k] = v.im;
        }
        x
    }
}

pub(crate) const OFF_DIAGONAL: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
