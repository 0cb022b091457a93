use super::density::DensityMatrix3;
use super::generator::Liouvillian;
use crate::error::{Error, Result};
use crate::linalg::solve_real;

/// Stationary state of `gen`, solved as the generator with its first row
/// replaced by the trace constraint.
pub fn steady_state(gen: &Liouvillian) -> Result<DensityMatrix3> {
    let a = gen.real();
    let mut m = [0.0; 81];
    for i in 0..9 {
        for j in 0..9 {
            m[i * 9 + j] = a.0[i][j];
        }
    }
    for j in 0..9 {
        m[j] = if j < 3 { 1.0 } else { 0.0 };
    }
    let mut x = [0.0; 9];
    x[0] = 1.0;
    let bordered = m;
    solve_real(&mut m, &mut x, 9, 1e-13).map_err(|pivot| Error::NoUniqueSteadyState { pivot })?;

    // one step of iterative refinement
    let mut residual = [0.0; 9];
    for i in 0..9 {
        let target = if i == 0 { 1.0 } else { 0.0 };
        residual[i] = target - (0..9).map(|j| bordered[i * 9 + j] * x[j]).sum::<f64>();
    }
    let mut m2 = bordered;
    if solve_real(&mut m2, &mut residual, 9, 1e-13).is_ok() {
        for (xi, di) in x.iter_mut().zip(residual) {
            *xi += di;
        }
    }
    Ok(DensityMatrix3::from_real(&x))
}
