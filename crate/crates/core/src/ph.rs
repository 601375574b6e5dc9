//! Port-Hamiltonian forms: validation, extraction from and reconstruction to
//! state space, the spectral-zero construction of a normalized form, and the
//! transformation induced by a passivity certificate.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_upper, real_part, relative_asymmetry, skew_part, sym_eigenvalues, sym_part, RMatrix};
use crate::loewner::{assemble_realization, build_pencil, LoewnerPencil};
use crate::passivity::{check_certificate, Verdict};
use crate::realify::{build_realifier, realify_pencil};
use crate::state_space::StateSpace;
use crate::tangential::{left_from_spectral, RightDatum, TangentialDataSet};

/// Relative tolerance for skew-symmetry and symmetry of the blocks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Relative tolerance on the smallest eigenvalue of the dissipation block.
pub const PSD_TOL: f64 = 1e-8;

/// `ẋ = (J − R)Qx + (G − P)u`, `y = (G + P)ᵀQx + (N + S)u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PortHamiltonianForm {
    j: RMatrix,
    r: RMatrix,
    g: RMatrix,
    p: RMatrix,
    n: RMatrix,
    s: RMatrix,
    q: RMatrix,
}

fn skew_defect(m: &RMatrix) -> f64 {
    (m + m.transpose()).norm() / m.norm().max(1.0)
}

fn sym_defect(m: &RMatrix) -> f64 {
    (m - m.transpose()).norm() / m.norm().max(1.0)
}

/// Smallest eigenvalue and spectral radius of a symmetric matrix.
fn lambda_min_and_scale(m: &RMatrix) -> (f64, f64) {
    let eig = sym_eigenvalues(m);
    match (eig.first(), eig.last()) {
        (Some(&lo), Some(&hi)) => (lo, lo.abs().max(hi.abs())),
        _ => (0.0, 0.0),
    }
}

impl PortHamiltonianForm {
    /// Validates shapes, skew/symmetric structure, `[[R, P], [Pᵀ, S]] ⪰ 0`
    /// and `Q ≻ 0`.
    pub fn new(j: RMatrix, r: RMatrix, g: RMatrix, p: RMatrix, n: RMatrix, s: RMatrix, q: RMatrix) -> Result<Self> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidPortHamiltonian(msg));
        let dim = j.nrows();
        let m = s.nrows();
        let shapes = [
            ("J", &j, dim, dim),
            ("R", &r, dim, dim),
            ("G", &g, dim, m),
            ("P", &p, dim, m),
            ("N", &n, m, m),
            ("S", &s, m, m),
            ("Q", &q, dim, dim),
        ];
        if m == 0 {
            return bad("S must be at least 1x1".into());
        }
        for (name, mat, rows, cols) in shapes {
            if mat.shape() != (rows, cols) {
                return bad(format!("{name} is {}x{}, expected {rows}x{cols}", mat.nrows(), mat.ncols()));
            }
            if mat.iter().any(|x| !x.is_finite()) {
                return bad(format!("{name} has a non-finite entry"));
            }
        }
        for (name, mat) in [("J", &j), ("N", &n)] {
            let defect = skew_defect(mat);
            if defect > STRUCTURE_TOL {
                return bad(format!("{name} is not skew-symmetric (defect {defect:e})"));
            }
        }
        for (name, mat) in [("R", &r), ("S", &s), ("Q", &q)] {
            let defect = sym_defect(mat);
            if defect > STRUCTURE_TOL {
                return bad(format!("{name} is not symmetric (defect {defect:e})"));
            }
        }
        if dim > 0 {
            let (q_min, _) = lambda_min_and_scale(&q);
            if q_min <= 0.0 {
                return bad(format!("Q is not positive definite (smallest eigenvalue {q_min:e})"));
            }
        }
        let form = PortHamiltonianForm { j, r, g, p, n, s, q };
        let (lo, scale) = lambda_min_and_scale(&form.dissipation_block());
        if lo < -PSD_TOL * scale {
            return bad(format!("dissipation block has eigenvalue {lo:e}"));
        }
        Ok(form)
    }

    pub fn j(&self) -> &RMatrix {
        &self.j
    }
    pub fn r(&self) -> &RMatrix {
        &self.r
    }
    pub fn g(&self) -> &RMatrix {
        &self.g
    }
    pub fn p(&self) -> &RMatrix {
        &self.p
    }
    pub fn n_feed(&self) -> &RMatrix {
        &self.n
    }
    pub fn s(&self) -> &RMatrix {
        &self.s
    }
    pub fn q(&self) -> &RMatrix {
        &self.q
    }

    /// State dimension.
    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    /// Port dimension.
    pub fn m(&self) -> usize {
        self.s.nrows()
    }

    /// `Q = I` exactly.
    pub fn is_normalized(&self) -> bool {
        self.q == RMatrix::identity(self.dim(), self.dim())
    }

    /// `[[R, P], [Pᵀ, S]]`.
    pub fn dissipation_block(&self) -> RMatrix {
        let (dim, m) = (self.dim(), self.m());
        let mut w = RMatrix::zeros(dim + m, dim + m);
        w.view_mut((0, 0), (dim, dim)).copy_from(&self.r);
        w.view_mut((0, dim), (dim, m)).copy_from(&self.p);
        w.view_mut((dim, 0), (m, dim)).copy_from(&self.p.transpose());
        w.view_mut((dim, dim), (m, m)).copy_from(&self.s);
        w
    }
}

/// Upper triangular `Γ` with `𝕃̂ = ΓᵀΓ`.
pub fn pick_cholesky(pick: &RMatrix) -> Result<RMatrix> {
    if !pick.is_square() {
        return Err(Error::Dimension(format!("Pick matrix is {}x{}", pick.nrows(), pick.ncols())));
    }
    let asymmetry = relative_asymmetry(pick);
    if asymmetry > STRUCTURE_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    cholesky_upper(&sym_part(pick)).map_err(|minor| Error::PickNotPositiveDefinite { minor })
}

fn upper_inverse(gamma: &RMatrix) -> Result<RMatrix> {
    let n = gamma.nrows();
    gamma
        .solve_upper_triangular(&RMatrix::identity(n, n))
        .ok_or_else(|| Error::InvalidInput("triangular factor is singular".into()))
}

/// `(I, Γ⁻ᵀAΓ⁻¹, Γ⁻ᵀB, CΓ⁻¹, D)`.
pub fn normalize_realization(model: &StateSpace, gamma: &RMatrix) -> Result<StateSpace> {
    let rm = model.real_matrices()?;
    let n = model.n();
    if gamma.shape() != (n, n) {
        return Err(Error::Dimension(format!("factor is {}x{}, expected {n}x{n}", gamma.nrows(), gamma.ncols())));
    }
    let g_inv = upper_inverse(gamma)?;
    let g_inv_t = g_inv.transpose();
    StateSpace::standard(&g_inv_t * &rm.a * &g_inv, &g_inv_t * &rm.b, &rm.c * &g_inv, rm.d)
}

fn require_standard(model: &StateSpace) -> Result<crate::state_space::RealMatrices> {
    let rm = model.real_matrices()?;
    let n = model.n();
    let defect = (&rm.e - RMatrix::identity(n, n)).amax();
    if defect > STRUCTURE_TOL {
        return Err(Error::DescriptorUnsupported);
    }
    Ok(rm)
}

/// Normalized form of a real standard-form model. Fails if the dissipation
/// block is indefinite beyond roundoff.
pub fn extract_ph(model: &StateSpace) -> Result<PortHamiltonianForm> {
    let rm = require_standard(model)?;
    let n = model.n();
    let ct = rm.c.transpose();
    let form = PortHamiltonianForm {
        j: skew_part(&rm.a),
        r: -sym_part(&rm.a),
        g: (&rm.b + &ct) * 0.5,
        p: (&ct - &rm.b) * 0.5,
        n: skew_part(&rm.d),
        s: sym_part(&rm.d),
        q: RMatrix::identity(n, n),
    };
    let (lambda_min, scale) = lambda_min_and_scale(&form.dissipation_block());
    if lambda_min < -PSD_TOL * scale {
        return Err(Error::NotPassiveRealization { lambda_min });
    }
    Ok(form)
}

/// `(I, (J − R)Q, G − P, (G + P)ᵀQ, N + S)`.
pub fn reconstruct(ph: &PortHamiltonianForm) -> StateSpace {
    let a = (&ph.j - &ph.r) * &ph.q;
    let b = &ph.g - &ph.p;
    let c = (&ph.g + &ph.p).transpose() * &ph.q;
    let d = &ph.n + &ph.s;
    StateSpace::standard(a, b, c, d).expect("validated form has consistent shapes")
}

/// Intermediate results of [`algorithm1_trace`].
#[derive(Debug, Clone)]
pub struct Algorithm1Trace {
    pub data: TangentialDataSet,
    pub pencil: LoewnerPencil,
    pub realified: LoewnerPencil,
    /// Upper Cholesky factor of the realified Pick matrix.
    pub gamma: RMatrix,
    /// Interpolant with `E = 𝕃̂`.
    pub realization: StateSpace,
    /// Interpolant with `E = I`.
    pub normalized: StateSpace,
    pub ph: PortHamiltonianForm,
}

/// Normalized port-Hamiltonian interpolant of spectral-zero data.
pub fn algorithm1(rights: &[RightDatum], d: &RMatrix) -> Result<PortHamiltonianForm> {
    algorithm1_trace(rights, d).map(|t| t.ph)
}

pub fn algorithm1_trace(rights: &[RightDatum], d: &RMatrix) -> Result<Algorithm1Trace> {
    if !d.is_square() || d.nrows() == 0 {
        return Err(Error::Dimension(format!("D is {}x{}", d.nrows(), d.ncols())));
    }
    if cholesky_upper(&(d + d.transpose())).is_err() {
        return Err(Error::DNotStrictlyPositiveReal);
    }
    let data = left_from_spectral(rights.to_vec(), d.clone())?;
    let pencil = build_pencil(&data)?;
    let realified = realify_pencil(&pencil, &build_realifier(&data)?)?;
    let gamma = pick_cholesky(&real_part(realified.l()))?;
    let realization = assemble_realization(&realified, d)?;
    let normalized = normalize_realization(&realization, &gamma)?;
    let ph = extract_ph(&normalized)?;
    Ok(Algorithm1Trace {
        data,
        pencil,
        realified,
        gamma,
        realization,
        normalized,
        ph,
    })
}

/// With `X = TᵀT` (upper Cholesky), applies `(TAT⁻¹, TB, CT⁻¹, D)` and
/// extracts the normalized form.
pub fn from_certificate(model: &StateSpace, x: &RMatrix) -> Result<PortHamiltonianForm> {
    let rm = require_standard(model)?;
    let n = model.n();
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!("X is {}x{}, expected {n}x{n}", x.nrows(), x.ncols())));
    }
    let asymmetry = relative_asymmetry(x);
    if asymmetry > STRUCTURE_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let t = cholesky_upper(&sym_part(x)).map_err(|_| Error::XNotPositiveDefinite)?;
    let report = check_certificate(model, x)?;
    if report.verdict == Verdict::Invalid {
        return Err(Error::CertificateInvalid {
            lambda_min_w: report.lambda_min_w,
        });
    }
    let t_inv = upper_inverse(&t)?;
    let transformed = StateSpace::standard(&t * &rm.a * &t_inv, &t * &rm.b, &rm.c * &t_inv, rm.d)?;
    extract_ph(&transformed)
}

/// Eigenvalues of the dissipation block, ascending; small negative values
/// from roundoff are clipped to zero.
pub fn dissipation_spectrum(ph: &PortHamiltonianForm) -> Vec<f64> {
    sym_eigenvalues(&ph.dissipation_block()).into_iter().map(|v| v.max(0.0)).collect()
}
