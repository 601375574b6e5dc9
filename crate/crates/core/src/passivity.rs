//! KYP matrix, certificate verdicts, positive-realness sweeps and Pick-matrix
//! diagnostics.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eigenvalues, norm1_real, sym_eigenvalues, sym_part, RMatrix};
use crate::ph::PortHamiltonianForm;
use crate::state_space::StateSpace;

/// Relative tolerance of certificate verdicts, scaled by the 1-norm.
pub const VERDICT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Strict,
    Nonstrict,
    Invalid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub x: RMatrix,
    /// `+∞` for a model without states.
    pub lambda_min_x: f64,
    pub lambda_min_w: f64,
    pub verdict: Verdict,
}

/// `[[−AᵀX − XA, Cᵀ − XB], [C − BᵀX, D + Dᵀ]]`, symmetrized.
pub fn kyp_matrix(model: &StateSpace, x: &RMatrix) -> Result<RMatrix> {
    let rm = model.real_matrices()?;
    let n = model.n();
    let m = model.m();
    if (&rm.e - RMatrix::identity(n, n)).amax() > 1e-12 {
        return Err(Error::DescriptorUnsupported);
    }
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!("X is {}x{}, expected {n}x{n}", x.nrows(), x.ncols())));
    }
    let mut w = RMatrix::zeros(n + m, n + m);
    w.view_mut((0, 0), (n, n)).copy_from(&(-rm.a.transpose() * x - x * &rm.a));
    w.view_mut((0, n), (n, m)).copy_from(&(rm.c.transpose() - x * &rm.b));
    w.view_mut((n, 0), (m, n)).copy_from(&(&rm.c - rm.b.transpose() * x));
    w.view_mut((n, n), (m, m)).copy_from(&(&rm.d + rm.d.transpose()));
    Ok(sym_part(&w))
}

pub fn check_certificate(model: &StateSpace, x: &RMatrix) -> Result<CertificateReport> {
    let w = kyp_matrix(model, x)?;
    let lambda_min_w = sym_eigenvalues(&w)[0];
    let lambda_min_x = sym_eigenvalues(x).first().copied().unwrap_or(f64::INFINITY);
    let tol_x = VERDICT_TOL * norm1_real(x);
    let tol_w = VERDICT_TOL * norm1_real(&w);
    let verdict = if lambda_min_x > tol_x && lambda_min_w > tol_w {
        Verdict::Strict
    } else if lambda_min_x >= -tol_x && lambda_min_w >= -tol_w {
        Verdict::Nonstrict
    } else {
        Verdict::Invalid
    };
    Ok(CertificateReport {
        x: x.clone(),
        lambda_min_x,
        lambda_min_w,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub omega: f64,
    /// Smallest eigenvalue of `Z(iω)ᴴ + Z(iω)`; `None` at a pole.
    pub lambda_min: Option<f64>,
}

pub fn positive_real_sweep(model: &StateSpace, omegas: &[f64]) -> Vec<SweepPoint> {
    omegas
        .iter()
        .map(|&omega| {
            let lambda_min = model
                .eval_transfer(Complex64::new(0.0, omega))
                .ok()
                .map(|z| herm_eigenvalues(&z.map(|v| v * 2.0))[0]);
            SweepPoint { omega, lambda_min }
        })
        .collect()
}

/// Smallest eigenvalue of `[[R, P], [Pᵀ, S]]`.
pub fn lambda_min_dissipation(ph: &PortHamiltonianForm) -> f64 {
    sym_eigenvalues(&ph.dissipation_block())[0]
}

/// Ratio of extreme eigenvalues of a symmetric matrix; `+∞` when it is not
/// positive definite.
pub fn pick_condition(pick: &RMatrix) -> f64 {
    let eig = sym_eigenvalues(pick);
    match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        (None, _) => 1.0,
        _ => f64::INFINITY,
    }
}
