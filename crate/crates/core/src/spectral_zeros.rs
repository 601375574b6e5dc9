//! Spectral zeros `Φ(λ)r = 0` of a realization, computed from the even
//! pencil
//!
//! ```text
//! M₀ = [[A, 0, B], [0, −Aᵀ, −Cᵀ], [C, Bᵀ, D + Dᵀ]],   N₀ = diag(E, Eᵀ, 0)
//! ```
//!
//! Eigenvalue estimates come from a complex Schur decomposition (after
//! eliminating the input block when `D + Dᵀ` is invertible, otherwise via
//! shift-and-invert on the full pencil); each estimate is then polished by
//! inverse iteration on `M₀ − λN₀`, which also yields the direction.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;
use core::cmp::Ordering;

use nalgebra::Schur;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{block_diag, norm1, start_vector, CMatrix, CVector, ComplexLu};
use crate::state_space::StateSpace;
use crate::tangential::RightDatum;

/// Residual bound `‖Φ(λ)r‖ ≤ RESIDUAL_TOL·(‖Z(λ)‖ + ‖Z(−λ)‖)`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// `|β| ≤ INFINITE_TOL·|α|` marks an infinite eigenvalue.
pub const INFINITE_TOL: f64 = 1e-12;
/// Zeros with `|Re λ| ≤ AXIS_TOL·(1 + |λ|)` count as lying on the axis.
pub const AXIS_TOL: f64 = 1e-8;
/// A candidate with `σ_min(Φ(λ)) > DECOUPLING_TOL·(‖Z(λ)‖ + ‖Z(−λ)‖)` is
/// not a zero.
const DECOUPLING_TOL: f64 = 1e-6;
/// Relative tolerance for snapping the imaginary part of real zeros.
const REAL_TOL: f64 = 1e-8;

/// Zeros with unit-norm directions, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralZeroSet {
    pub zeros: Vec<Complex64>,
    pub directions: Vec<CVector>,
    /// Free-form description of the model the zeros came from.
    pub source: String,
}

impl SpectralZeroSet {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

struct EvenPencil {
    m0: CMatrix,
    n0: CMatrix,
    n: usize,
    m: usize,
}

fn even_pencil(model: &StateSpace) -> EvenPencil {
    let (n, m) = (model.n(), model.m());
    let size = 2 * n + m;
    let mut m0 = CMatrix::zeros(size, size);
    m0.view_mut((0, 0), (n, n)).copy_from(model.a());
    m0.view_mut((0, 2 * n), (n, m)).copy_from(model.b());
    m0.view_mut((n, n), (n, n)).copy_from(&-model.a().transpose());
    m0.view_mut((n, 2 * n), (n, m)).copy_from(&-model.c().transpose());
    m0.view_mut((2 * n, 0), (m, n)).copy_from(model.c());
    m0.view_mut((2 * n, n), (m, n)).copy_from(&model.b().transpose());
    m0.view_mut((2 * n, 2 * n), (m, m)).copy_from(&(model.d() + model.d().transpose()));
    let n0 = block_diag(&[model.e(), &model.e().transpose(), &CMatrix::zeros(m, m)]);
    EvenPencil { m0, n0, n, m }
}

fn schur_eigenvalues(m: CMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000).ok_or(Error::EigenSolverFailed)?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().copied().collect())
}

/// Finite eigenvalues of `mat − λ·nmat` by shift-and-invert.
fn shift_invert(mat: &CMatrix, nmat: &CMatrix) -> Result<Vec<Complex64>> {
    let scale = norm1(mat) / norm1(nmat).max(f64::MIN_POSITIVE);
    let shifts = [
        Complex64::new(0.37, 0.61),
        Complex64::new(-0.53, 0.29),
        Complex64::new(1.3, -0.7),
        Complex64::new(0.05, 2.1),
        Complex64::new(-2.7, -1.9),
    ];
    for &unit in &shifts {
        let sigma = unit * scale;
        let lu = ComplexLu::new(mat - nmat * sigma);
        if lu.rcond() < 1e-12 {
            continue;
        }
        // θ' = scale·θ with θ = 1/(λ − σ), so λ = σ + 1/θ = scale·α/β with
        // α = 1 + unit·θ', β = θ'.
        let t = lu.solve(nmat) * Complex64::new(scale, 0.0);
        let thetas = schur_eigenvalues(t)?;
        return Ok(thetas
            .into_iter()
            .filter_map(|beta| {
                let alpha = Complex64::new(1.0, 0.0) + unit * beta;
                if beta.norm() <= INFINITE_TOL * alpha.norm() {
                    None
                } else {
                    Some(alpha / beta * scale)
                }
            })
            .collect());
    }
    Err(Error::SingularEvenPencil)
}

/// Eigenvalue estimates of the even pencil, infinite ones removed.
fn estimates(model: &StateSpace, ep: &EvenPencil) -> Result<Vec<Complex64>> {
    let n = ep.n;
    let k = model.d() + model.d().transpose();
    let k_lu = ComplexLu::new(k);
    if k_lu.rcond() > 1e-8 {
        // u = −K⁻¹(Cx + Bᵀy)
        let kc = k_lu.solve(model.c());
        let kbt = k_lu.solve(&model.b().transpose());
        let mut h = CMatrix::zeros(2 * n, 2 * n);
        h.view_mut((0, 0), (n, n)).copy_from(&(model.a() - model.b() * &kc));
        h.view_mut((0, n), (n, n)).copy_from(&-(model.b() * &kbt));
        h.view_mut((n, 0), (n, n)).copy_from(&(model.c().transpose() * &kc));
        h.view_mut((n, n), (n, n)).copy_from(&(-model.a().transpose() + model.c().transpose() * &kbt));
        if model.has_identity_e() {
            return schur_eigenvalues(h);
        }
        let e2 = block_diag(&[model.e(), &model.e().transpose()]);
        let e_lu = ComplexLu::new(e2.clone());
        if e_lu.rcond() > 1e-8 {
            return schur_eigenvalues(e_lu.solve(&h));
        }
        return shift_invert(&h, &e2);
    }
    shift_invert(&ep.m0, &ep.n0)
}

/// Two-sided Rayleigh quotient after a few inverse-iteration steps at
/// `lambda`; returns the polished value and the right eigenvector.
fn polish(ep: &EvenPencil, lambda: Complex64) -> Option<(Complex64, CVector)> {
    let size = ep.m0.nrows();
    let n0h = ep.n0.adjoint();
    let mut current = lambda;
    let mut v = start_vector(size);
    let mut w = start_vector(size);
    for _ in 0..2 {
        let lu = ComplexLu::new(&ep.m0 - &ep.n0 * current);
        for _ in 0..3 {
            v = lu.solve_vec(&(&ep.n0 * &v));
            v /= Complex64::new(v.norm(), 0.0);
            w = lu.solve_adjoint_vec(&(&n0h * &w));
            w /= Complex64::new(w.norm(), 0.0);
        }
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        let den = w.dotc(&(&ep.n0 * &v));
        if den.norm() <= INFINITE_TOL * w.dotc(&(&ep.m0 * &v)).norm() {
            return None;
        }
        let refined = w.dotc(&(&ep.m0 * &v)) / den;
        if (refined - current).norm() <= 1e-6 * (1.0 + current.norm()) {
            current = refined;
        }
    }
    Some((current, v))
}

/// Unit norm, the first entry of (numerically) largest modulus real and
/// nonnegative.
pub fn normalize_direction(u: &CVector) -> Option<CVector> {
    let norm = u.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    let peak = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let k = u.iter().position(|z| z.norm() >= peak * (1.0 - 1e-10))?;
    let phase = u[k].conj() / u[k].norm();
    Some(u.map(|z| z * phase / norm))
}

fn is_real_point(z: Complex64) -> bool {
    z.im.abs() <= REAL_TOL * (1.0 + z.norm())
}

/// Real points first by real part, then pairs by `(|Im|, Re)` with the upper
/// member first.
fn canonical_cmp(a: Complex64, b: Complex64) -> Ordering {
    let (ra, rb) = (is_real_point(a), is_real_point(b));
    rb.cmp(&ra).then_with(|| {
        if ra {
            a.re.total_cmp(&b.re)
        } else {
            a.im.abs()
                .total_cmp(&b.im.abs())
                .then(a.re.total_cmp(&b.re))
                .then((a.im < 0.0).cmp(&(b.im < 0.0)))
        }
    })
}

fn sort_canonical(zeros: Vec<Complex64>, directions: Vec<CVector>) -> (Vec<Complex64>, Vec<CVector>) {
    let mut idx: Vec<usize> = (0..zeros.len()).collect();
    idx.sort_by(|&i, &j| canonical_cmp(zeros[i], zeros[j]));
    (idx.iter().map(|&i| zeros[i]).collect(), idx.iter().map(|&i| directions[i].clone()).collect())
}

fn phi_residual(model: &StateSpace, lambda: Complex64, r: &CVector) -> Result<(f64, f64)> {
    let zp = model.eval_transfer(lambda)?;
    let zm = model.eval_transfer(-lambda)?;
    let phi = zm.transpose() + &zp;
    Ok(((&phi * r).norm(), zp.norm() + zm.norm()))
}

/// `true` if `Φ(λ)` is clearly nonsingular or cannot be evaluated, i.e. the
/// pencil eigenvalue does not correspond to a spectral zero.
fn is_decoupling_mode(model: &StateSpace, lambda: Complex64) -> bool {
    let (Ok(zp), Ok(zm)) = (model.eval_transfer(lambda), model.eval_transfer(-lambda)) else {
        return true;
    };
    let scale = zp.norm() + zm.norm();
    let phi = zm.transpose() + zp;
    phi.singular_values().min() > DECOUPLING_TOL * scale
}

/// All finite spectral zeros with their directions.
pub fn compute_spectral_zeros(model: &StateSpace) -> Result<SpectralZeroSet> {
    let source = format!("model with n = {}, m = {}", model.n(), model.m());
    if model.n() == 0 {
        return Ok(SpectralZeroSet {
            zeros: Vec::new(),
            directions: Vec::new(),
            source,
        });
    }
    let ep = even_pencil(model);
    let mut zeros = Vec::new();
    let mut directions = Vec::new();
    for estimate in estimates(model, &ep)? {
        let Some((lambda, v)) = polish(&ep, estimate) else {
            continue;
        };
        if is_decoupling_mode(model, lambda) {
            continue;
        }
        let u = v.rows(2 * ep.n, ep.m).into_owned();
        let Some(r) = normalize_direction(&u) else {
            continue;
        };
        zeros.push(lambda);
        directions.push(r);
    }

    if model.is_real() {
        let mut sym_z = Vec::new();
        let mut sym_d = Vec::new();
        for (z, r) in zeros.iter().zip(&directions) {
            if is_real_point(*z) {
                let real_dir = r.map(|c| Complex64::new(c.re, 0.0));
                if let Some(d) = normalize_direction(&real_dir) {
                    sym_z.push(Complex64::new(z.re, 0.0));
                    sym_d.push(d);
                }
            } else if z.im > 0.0 {
                sym_z.push(*z);
                sym_d.push(r.clone());
                sym_z.push(z.conj());
                sym_d.push(r.map(|c| c.conj()));
            }
        }
        zeros = sym_z;
        directions = sym_d;
    }

    let failed: Vec<Complex64> = zeros
        .iter()
        .zip(&directions)
        .filter(|(z, r)| match phi_residual(model, **z, r) {
            Ok((res, scale)) => res > RESIDUAL_TOL * scale,
            Err(_) => true,
        })
        .map(|(z, _)| *z)
        .collect();
    if !failed.is_empty() {
        return Err(Error::ResidualCheckFailed(failed));
    }
    let (zeros, directions) = sort_canonical(zeros, directions);
    Ok(SpectralZeroSet {
        zeros,
        directions,
        source,
    })
}

fn on_axis(z: Complex64) -> bool {
    z.re.abs() <= AXIS_TOL * (1.0 + z.norm())
}

/// Keeps the open right half-plane zeros; any zero on the imaginary axis or
/// a count different from `n_expected` is an error.
pub fn filter_rhp(zs: &SpectralZeroSet, n_expected: usize) -> Result<SpectralZeroSet> {
    let keep: Vec<usize> = (0..zs.len()).filter(|&i| !on_axis(zs.zeros[i]) && zs.zeros[i].re > 0.0).collect();
    let axis = zs.zeros.iter().any(|z| on_axis(*z));
    if axis || keep.len() != n_expected {
        return Err(Error::UnexpectedZeroCount {
            found: keep.len(),
            expected: n_expected,
        });
    }
    let (zeros, directions) = sort_canonical(
        keep.iter().map(|&i| zs.zeros[i]).collect(),
        keep.iter().map(|&i| zs.directions[i].clone()).collect(),
    );
    Ok(SpectralZeroSet {
        zeros,
        directions,
        source: zs.source.clone(),
    })
}

/// Right data `(λ_j, r_j, Z(λ_j)r_j)` at the `n` right half-plane zeros.
pub fn spectral_data_from_model(model: &StateSpace, n: usize) -> Result<Vec<RightDatum>> {
    let zs = filter_rhp(&compute_spectral_zeros(model)?, n)?;
    zs.zeros
        .iter()
        .zip(&zs.directions)
        .map(|(&lambda, r)| {
            let w = model.eval_transfer(lambda)? * r;
            Ok(RightDatum::new(lambda, r.clone(), w))
        })
        .collect()
}

/// Helper for tests and diagnostics: `max_j ‖Φ(λ_j)r_j‖ / scale_j`.
pub fn max_relative_residual(model: &StateSpace, zs: &SpectralZeroSet) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (z, r) in zs.zeros.iter().zip(&zs.directions) {
        let (res, scale) = phi_residual(model, *z, r)?;
        worst = worst.max(if scale > 0.0 { res / scale } else { res });
    }
    Ok(worst)
}
