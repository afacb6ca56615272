//! Continuous-time LQR: algebraic Riccati solver and stability checks.
//!
//! The Riccati equation `AᵀP + PA − PBR⁻¹BᵀP + Q = 0` is solved with the
//! matrix sign function of the Hamiltonian, then polished with a few
//! Newton–Kleinman iterations.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

const SIGN_MAX_ITER: usize = 100;
const KLEINMAN_MAX_ITER: usize = 30;

fn synthesis(msg: impl Into<String>) -> Error {
    Error::Synthesis(msg.into())
}

fn check_symmetric(m: &DMatrix<f64>, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(synthesis(format!("{name} must be square")));
    }
    let asym = (m - m.transpose()).amax();
    if asym > 1e-9 * m.amax().max(1.0) {
        return Err(synthesis(format!(
            "{name} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn is_hurwitz(m: &DMatrix<f64>) -> bool {
    spectral_abscissa(m) < 0.0
}

/// Solves `AᵀX + XA = −C` for square `A` through the Kronecker form.
fn lyapunov(a: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let at = a.transpose();
    let op = id.kronecker(&at) + at.kronecker(&id);
    let rhs = DMatrix::from_column_slice(n * n, 1, (-c).as_slice());
    let x = op
        .lu()
        .solve(&rhs)
        .ok_or_else(|| synthesis("singular Lyapunov operator"))?;
    let x = DMatrix::from_column_slice(n, n, x.as_slice());
    Ok((&x + x.transpose()) * 0.5)
}

fn matrix_sign(h: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = h.nrows() as f64;
    let mut z = h;
    for _ in 0..SIGN_MAX_ITER {
        let inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| synthesis("Hamiltonian has imaginary-axis eigenvalues"))?;
        // Determinant scaling speeds up the early iterations.
        let det = z.determinant().abs();
        let c = if det.is_finite() && det > 0.0 {
            det.powf(-1.0 / n)
        } else {
            1.0
        };
        let next = (&z * c + inv / c) * 0.5;
        let change = (&next - &z).norm();
        let scale = next.norm();
        z = next;
        if change <= 1e-13 * scale {
            return Ok(z);
        }
    }
    Err(synthesis("matrix sign iteration did not converge"))
}

/// Stabilising solution `P` of the continuous algebraic Riccati equation.
pub fn solve_care(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || b.nrows() != n || q.nrows() != n || r.nrows() != b.ncols() {
        return Err(synthesis("inconsistent A, B, Q, R dimensions"));
    }
    check_symmetric(q, "Q")?;
    check_symmetric(r, "R")?;
    if min_symmetric_eigenvalue(q) < -1e-12 * q.amax().max(1.0) {
        return Err(synthesis("Q is not positive semidefinite"));
    }
    if min_symmetric_eigenvalue(r) <= 0.0 {
        return Err(synthesis("R is not positive definite"));
    }
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| synthesis("R is singular"))?;
    let g = b * &r_inv * b.transpose();

    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&g));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let w = matrix_sign(h)?;
    let id = DMatrix::<f64>::identity(n, n);
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n))
        .copy_from(&w.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n))
        .copy_from(&(w.view((n, n), (n, n)) + &id));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n))
        .copy_from(&(-(w.view((0, 0), (n, n)) + &id)));
    rhs.view_mut((n, 0), (n, n))
        .copy_from(&(-w.view((n, 0), (n, n))));
    let p = lhs.svd(true, true).solve(&rhs, 1e-14).map_err(synthesis)?;
    let mut p = (&p + p.transpose()) * 0.5;

    let mut k = &r_inv * b.transpose() * &p;
    if !is_hurwitz(&(a - b * &k)) {
        return Err(synthesis(
            "pair (A, B) is not stabilisable with the given weights",
        ));
    }
    for _ in 0..KLEINMAN_MAX_ITER {
        let acl = a - b * &k;
        let next = lyapunov(&acl, &(q + k.transpose() * r * &k))?;
        let change = (&next - &p).amax();
        p = next;
        k = &r_inv * b.transpose() * &p;
        if change <= 1e-14 * p.amax().max(1.0) {
            break;
        }
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(synthesis("Riccati solution is not finite"));
    }
    Ok(p)
}

/// LQR gain `K = R⁻¹BᵀP` for the feedback `u = −Kx`.
pub fn lqr(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let p = solve_care(a, b, q, r)?;
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or_else(|| synthesis("R is singular"))?;
    let k = r_inv * b.transpose() * p;
    if !is_hurwitz(&(a - b * &k)) {
        return Err(synthesis("closed loop is not Hurwitz"));
    }
    Ok(k)
}

/// Residual of the Riccati equation, useful for diagnostics.
pub fn care_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    p: &DMatrix<f64>,
) -> f64 {
    let r_inv = r.clone().try_inverse().expect("R invertible");
    (a.transpose() * p + p * a - p * b * r_inv * b.transpose() * p + q).amax()
}
