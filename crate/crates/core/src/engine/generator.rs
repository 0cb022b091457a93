use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use super::density::DensityMatrix3;
use super::ladder::LadderSystem;
use crate::error::Result;
use crate::linalg::{mat3_adjoint, mat3_axpy, mat3_mul, CMatrix, Mat3, ZERO3};
use crate::units::mhz_to_angular;

/// Real 9×9 superoperator acting on the Hermitian parameterization of a
/// [`DensityMatrix3`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSuperoperator(pub [[f64; 9]; 9]);

impl RealSuperoperator {
    pub const ZERO: Self = Self([[0.0; 9]; 9]);

    #[inline]
    pub fn apply(&self, x: &[f64; 9], out: &mut [f64; 9]) {
        for (row, o) in self.0.iter().zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `self + a·p + b·c`.
    pub fn combine(&self, a: f64, p: &Self, b: f64, c: &Self) -> Self {
        let mut out = *self;
        for i in 0..9 {
            for j in 0..9 {
                out.0[i][j] += a * p.0[i][j] + b * c.0[i][j];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m: f64, v| Float::max(m, Float::abs(*v)))
    }
}

/// Generator `dρ/dt = −i[H, ρ] + Σ_k D[L_k]ρ` of a [`LadderSystem`], split into
/// the drive-independent part and the parts linear in each Rabi frequency so
/// that time-dependent envelopes can be applied without rebuilding.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub system: LadderSystem,
    /// Detunings and dissipators.
    pub base: RealSuperoperator,
    /// `−i[(|0⟩⟨1| + h.c.)/2, ·]`, per rad/ns of probe Rabi frequency.
    pub probe_unit: RealSuperoperator,
    /// `−i[(|1⟩⟨2| + h.c.)/2, ·]`, per rad/ns of control Rabi frequency.
    pub control_unit: RealSuperoperator,
}

pub fn build_generator(sys: &LadderSystem) -> Result<Liouvillian> {
    sys.validate()?;
    let ops = Operators::new(sys);
    Ok(Liouvillian {
        system: *sys,
        base: realify(|rho| ops.base_action(rho)),
        probe_unit: realify(|rho| commutator_action(&ops.probe_coupling, rho)),
        control_unit: realify(|rho| commutator_action(&ops.control_coupling, rho)),
    })
}

impl Liouvillian {
    /// Real generator with the given angular Rabi frequencies (rad/ns).
    pub fn at_rabi(&self, probe: f64, control: f64) -> RealSuperoperator {
        self.base.combine(probe, &self.probe_unit, control, &self.control_unit)
    }

    /// Real generator with the system's own drives.
    pub fn real(&self) -> RealSuperoperator {
        self.at_rabi(mhz_to_angular(self.system.probe_rabi), mhz_to_angular(self.system.control_rabi))
    }

    /// Action on an arbitrary (not necessarily Hermitian) 3×3 operator with
    /// the system's own drives.
    pub fn apply_operator(&self, rho: &Mat3) -> Mat3 {
        Operators::new(&self.system).full_action(rho)
    }

    /// Complex 9×9 matrix acting on row-major `vec(ρ)`.
    pub fn complex_matrix(&self) -> CMatrix {
        let ops = Operators::new(&self.system);
        let mut out = CMatrix::zeros(9);
        for col in 0..9 {
            let mut e = ZERO3;
            e[col / 3][col % 3] = Complex64::new(1.0, 0.0);
            let image = ops.full_action(&e);
            for row in 0..9 {
                out.set(row, col, image[row / 3][row % 3]);
            }
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix3) -> DensityMatrix3 {
        let x = rho.to_real();
        let mut dx = [0.0; 9];
        self.real().apply(&x, &mut dx);
        DensityMatrix3::from_real(&dx)
    }
}

struct Operators {
    hamiltonian_static: Mat3,
    probe_coupling: Mat3,
    control_coupling: Mat3,
    probe_rabi: f64,
    control_rabi: f64,
    collapse: Vec<(f64, Mat3)>,
}

impl Operators {
    fn new(sys: &LadderSystem) -> Self {
        let c = |v: f64| Complex64::new(v, 0.0);
        let dp = mhz_to_angular(sys.probe_detuning);
        let dc = mhz_to_angular(sys.control_detuning);
        let mut h0 = ZERO3;
        h0[1][1] = c(-dp);
        h0[2][2] = c(-(dp + dc));
        let mut hp = ZERO3;
        hp[0][1] = c(0.5);
        hp[1][0] = c(0.5);
        let mut hc = ZERO3;
        hc[1][2] = c(0.5);
        hc[2][1] = c(0.5);
        let mut lower01 = ZERO3;
        lower01[0][1] = c(1.0);
        let mut lower12 = ZERO3;
        lower12[1][2] = c(1.0);
        let mut proj1 = ZERO3;
        proj1[1][1] = c(1.0);
        let mut proj2 = ZERO3;
        proj2[2][2] = c(1.0);
        let collapse = [
            (mhz_to_angular(sys.gamma10), lower01),
            (mhz_to_angular(sys.gamma21), lower12),
            (2.0 * mhz_to_angular(sys.gamma_phi), proj1),
            (2.0 * mhz_to_angular(sys.gamma_phi2), proj2),
        ]
        .into_iter()
        .filter(|(rate, _)| *rate > 0.0)
        .collect();
        Self {
            hamiltonian_static: h0,
            probe_coupling: hp,
            control_coupling: hc,
            probe_rabi: mhz_to_angular(sys.probe_rabi),
            control_rabi: mhz_to_angular(sys.control_rabi),
            collapse,
        }
    }

    fn base_action(&self, rho: &Mat3) -> Mat3 {
        let mut out = commutator_action(&self.hamiltonian_static, rho);
        for (rate, op) in &self.collapse {
            let d = dissipator(op, rho);
            mat3_axpy(&mut out, Complex64::new(*rate, 0.0), &d);
        }
        out
    }

    fn full_action(&self, rho: &Mat3) -> Mat3 {
        let mut out = self.base_action(rho);
        mat3_axpy(&mut out, Complex64::new(self.probe_rabi, 0.0), &commutator_action(&self.probe_coupling, rho));
        mat3_axpy(&mut out, Complex64::new(self.control_rabi, 0.0), &commutator_action(&self.control_coupling, rho));
        out
    }
}

/// `−i[H, ρ]`.
fn commutator_action(h: &Mat3, rho: &Mat3) -> Mat3 {
    let hr = mat3_mul(h, rho);
    let rh = mat3_mul(rho, h);
    let mut out = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = Complex64::new(0.0, -1.0) * (hr[i][j] - rh[i][j]);
        }
    }
    out
}

/// `LρL† − ½{L†L, ρ}`.
fn dissipator(l: &Mat3, rho: &Mat3) -> Mat3 {
    let ld = mat3_adjoint(l);
    let ldl = mat3_mul(&ld, l);
    let jump = mat3_mul(&mat3_mul(l, rho), &ld);
    let left = mat3_mul(&ldl, rho);
    let right = mat3_mul(rho, &ldl);
    let mut out = jump;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= (left[i][j] + right[i][j]) * 0.5;
        }
    }
    out
}

/// Matrix of a Hermiticity-preserving linear map in the real parameterization.
fn realify(action: impl Fn(&Mat3) -> Mat3) -> RealSuperoperator {
    let mut out = RealSuperoperator::ZERO;
    for col in 0..9 {
        let mut x = [0.0; 9];
        x[col] = 1.0;
        let image = DensityMatrix3::from_matrix(action(&DensityMatrix3::from_real(&x).m)).to_real();
        for row in 0..9 {
            out.0[row][col] = image[row];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undriven(gamma10: f64, gamma_phi: f64, gamma21: f64, gamma_phi2: f64) -> LadderSystem {
        LadderSystem {
            probe_detuning: 0.0,
            control_detuning: 0.0,
            probe_rabi: 0.0,
            control_rabi: 0.0,
            gamma10,
            gamma21,
            gamma_phi,
            gamma_phi2,
        }
    }

    #[test]
    fn zero_system_has_zero_generator() {
        let g = build_generator(&undriven(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(g.real().max_abs(), 0.0);
        assert!(g.complex_matrix().data.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn trace_row_vanishes() {
        let sys = LadderSystem { probe_rabi: 40.0, control_rabi: 300.0, probe_detuning: 12.0, ..undriven(73.0, 18.0, 146.0, 72.0) };
        let g = build_generator(&sys).unwrap().real();
        for col in 0..9 {
            let s = g.0[0][col] + g.0[1][col] + g.0[2][col];
            assert!(s.abs() < 1e-14, "column {col}: {s}");
        }
    }

    #[test]
    fn coherence_decay_rates() {
        // undriven coherences are eigenvectors; read the rates off the diagonal
        let sys = undriven(73.0, 18.0, 146.0, 72.0);
        let g = build_generator(&sys).unwrap().real();
        let g01 = mhz_to_angular(sys.gamma10_decoherence());
        let g02 = mhz_to_angular(sys.gamma20_decoherence());
        assert!((g.0[3][3] + g01).abs() < 1e-12);
        assert!((g.0[4][4] + g01).abs() < 1e-12);
        assert!((g.0[5][5] + g02).abs() < 1e-12);
        assert!((g.0[6][6] + g02).abs() < 1e-12);
        assert!((g02 - mhz_to_angular(145.0)).abs() < 1e-12);
    }

    #[test]
    fn complex_and_real_forms_agree() {
        let sys = LadderSystem { probe_rabi: 25.0, control_rabi: 120.0, probe_detuning: -30.0, control_detuning: 7.0, ..undriven(73.0, 18.0, 146.0, 72.0) };
        let g = build_generator(&sys).unwrap();
        let x = [0.6, 0.3, 0.1, 0.1, -0.05, 0.02, 0.01, -0.03, 0.04];
        let rho = DensityMatrix3::from_real(&x);
        let via_real = g.apply(&rho);
        let via_op = DensityMatrix3::from_matrix(g.apply_operator(&rho.m));
        assert!(via_real.max_abs_diff(&via_op) < 1e-13);
        let vecd: Vec<Complex64> = rho.m.iter().flatten().copied().collect();
        let out = g.complex_matrix().mul_vec(&vecd);
        for i in 0..3 {
            for j in 0..3 {
                assert!((out[3 * i + j] - via_op.m[i][j]).norm() < 1e-13);
            }
        }
    }
}
