//! Loewner and shifted Loewner matrices, their Sylvester identities, the
//! interpolating descriptor realization, and SVD-based truncation.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::SVD;

use crate::error::{Error, Result};
use crate::linalg::{complexify, real_part, CMatrix, ComplexLu, RMatrix};
use crate::realify::{build_realifier, realify_pencil};
use crate::state_space::StateSpace;
use crate::tangential::{validate, TangentialDataSet, Violation};

/// The pair `(𝕃, 𝕃σ)` together with the stacked interpolation data
/// `Λ, M, L, V, R, W` it was built from.
///
/// After realification the same container holds the transformed real
/// matrices (`Λ` and `M` then carry 2×2 rotation blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerPencil {
    pub(crate) l: CMatrix,
    pub(crate) ls: CMatrix,
    pub(crate) lambda: CMatrix,
    pub(crate) mu: CMatrix,
    pub(crate) left_dirs: CMatrix,
    pub(crate) left_values: CMatrix,
    pub(crate) right_dirs: CMatrix,
    pub(crate) right_values: CMatrix,
    pub(crate) data: TangentialDataSet,
    pub(crate) symmetric: bool,
    pub(crate) real: bool,
}

impl LoewnerPencil {
    /// Loewner matrix `𝕃`.
    pub fn l(&self) -> &CMatrix {
        &self.l
    }
    /// Shifted Loewner matrix `𝕃σ`.
    pub fn ls(&self) -> &CMatrix {
        &self.ls
    }
    /// `Λ` (diagonal of right points, or its real block form).
    pub fn lambda(&self) -> &CMatrix {
        &self.lambda
    }
    /// `M` (diagonal of left points, or its real block form).
    pub fn mu(&self) -> &CMatrix {
        &self.mu
    }
    /// `L`, rows are left directions (n×m).
    pub fn left_dirs(&self) -> &CMatrix {
        &self.left_dirs
    }
    /// `V`, rows are left responses (n×m).
    pub fn left_values(&self) -> &CMatrix {
        &self.left_values
    }
    /// `R`, columns are right directions (m×n).
    pub fn right_dirs(&self) -> &CMatrix {
        &self.right_dirs
    }
    /// `W`, columns are right responses (m×n).
    pub fn right_values(&self) -> &CMatrix {
        &self.right_values
    }
    pub fn data(&self) -> &TangentialDataSet {
        &self.data
    }
    /// Built from mirrored spectral-zero data: `𝕃` Hermitian, `𝕃σ` skew-Hermitian.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }
    /// All matrices are real (output of realification).
    pub fn is_real(&self) -> bool {
        self.real
    }
    pub fn n(&self) -> usize {
        self.l.nrows()
    }
    pub fn m(&self) -> usize {
        self.data.m
    }
}

/// Entrywise divided differences of the data.
pub fn build_pencil(ds: &TangentialDataSet) -> Result<LoewnerPencil> {
    let violations = validate(ds);
    if let Some(Violation::PointCollision { right, left }) =
        violations.iter().find(|v| matches!(v, Violation::PointCollision { .. }))
    {
        return Err(Error::PointCollision {
            right: *right,
            left: *left,
        });
    }
    if !violations.is_empty() {
        return Err(Error::InvalidTangentialData(violations));
    }

    let n = ds.len();
    let m = ds.m;
    let lambda = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, ds.rights.iter().map(|r| r.lambda)));
    let mu = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, ds.lefts.iter().map(|l| l.mu)));
    let right_dirs = CMatrix::from_fn(m, n, |i, j| ds.rights[j].r[i]);
    let right_values = CMatrix::from_fn(m, n, |i, j| ds.rights[j].w[i]);
    let left_dirs = CMatrix::from_fn(n, m, |i, j| ds.lefts[i].ell[j]);
    let left_values = CMatrix::from_fn(n, m, |i, j| ds.lefts[i].v[j]);

    let mut l = CMatrix::zeros(n, n);
    let mut ls = CMatrix::zeros(n, n);
    if ds.spectral {
        // (r_iᴴ w_j + w_iᴴ r_j) / (λ_j + λ̄_i) and
        // (λ_j r_iᴴ w_j − λ̄_i w_iᴴ r_j) / (λ_j + λ̄_i)
        for i in 0..n {
            let (ri, wi, li) = (&ds.rights[i].r, &ds.rights[i].w, ds.rights[i].lambda);
            for j in 0..n {
                let (rj, wj, lj) = (&ds.rights[j].r, &ds.rights[j].w, ds.rights[j].lambda);
                let rw = ri.dotc(wj);
                let wr = wi.dotc(rj);
                let den = lj + li.conj();
                l[(i, j)] = (rw + wr) / den;
                ls[(i, j)] = (lj * rw - li.conj() * wr) / den;
            }
        }
    } else {
        // (ℓ_i w_j − v_i r_j) / (λ_j − μ_i) and
        // (λ_j ℓ_i w_j − μ_i v_i r_j) / (λ_j − μ_i)
        for i in 0..n {
            let left = &ds.lefts[i];
            for j in 0..n {
                let right = &ds.rights[j];
                let lw = (&left.ell * &right.w)[(0, 0)];
                let vr = (&left.v * &right.r)[(0, 0)];
                let den = right.lambda - left.mu;
                l[(i, j)] = (lw - vr) / den;
                ls[(i, j)] = (right.lambda * lw - left.mu * vr) / den;
            }
        }
    }

    Ok(LoewnerPencil {
        l,
        ls,
        lambda,
        mu,
        left_dirs,
        left_values,
        right_dirs,
        right_values,
        data: ds.clone(),
        symmetric: ds.spectral,
        real: false,
    })
}

/// Relative residuals of `𝕃Λ − M𝕃 = LW − VR` and
/// `𝕃σΛ − M𝕃σ = LWΛ − MVR`, each divided by the largest of its four terms.
pub fn sylvester_residual(p: &LoewnerPencil) -> (f64, f64) {
    if p.n() == 0 {
        return (0.0, 0.0);
    }
    let rel = |terms: [CMatrix; 4]| {
        let [a, b, c, d] = terms;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let res = (&a - &b - (&c - &d)).norm();
        if scale == 0.0 {
            res
        } else {
            res / scale
        }
    };
    let lw = &p.left_dirs * &p.right_values;
    let vr = &p.left_values * &p.right_dirs;
    let first = rel([&p.l * &p.lambda, &p.mu * &p.l, lw.clone(), vr.clone()]);
    let second = rel([&p.ls * &p.lambda, &p.mu * &p.ls, lw * &p.lambda, &p.mu * vr]);
    (first, second)
}

/// `(E, A, B, C)` of the interpolant, `D` folded in.
pub(crate) fn pencil_matrices(p: &LoewnerPencil, d: &CMatrix) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let e = p.l.clone();
    let a = &p.ls - &p.left_dirs * d * &p.right_dirs;
    let b = &p.left_values - &p.left_dirs * d;
    let c = -&p.right_values + d * &p.right_dirs;
    (e, a, b, c)
}

fn check_feedthrough(p: &LoewnerPencil, d: &RMatrix) -> Result<()> {
    let m = p.m();
    if d.shape() != (m, m) {
        return Err(Error::Dimension(format!("D is {}x{}, expected {m}x{m}", d.nrows(), d.ncols())));
    }
    Ok(())
}

/// Interpolating realization `E = 𝕃`, `A = 𝕃σ − LDR`, `B = V − LD`,
/// `C = −W + DR`. For mirrored spectral data this is `A = 𝕃σ − RᴴDR`,
/// `B = −Wᴴ − RᴴD`.
pub fn assemble_realization(p: &LoewnerPencil, d: &RMatrix) -> Result<StateSpace> {
    check_feedthrough(p, d)?;
    if p.n() == 0 {
        return StateSpace::static_gain(d.clone());
    }
    let lu = ComplexLu::new(p.l.clone());
    let rcond = lu.rcond();
    if lu.is_singular() {
        return Err(Error::SingularLoewner { rcond });
    }
    let dc = complexify(d);
    let (e, a, b, c) = pencil_matrices(p, &dc);
    StateSpace::new(Some(e), a, b, c, dc)
}

/// Which matrix supplies the projection bases in [`svd_truncate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdBasis {
    /// Left and right singular vectors of `𝕃`.
    #[default]
    Loewner,
    /// Left vectors of `[𝕃, A]`, right vectors of `[𝕃; A]`.
    Stacked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub model: StateSpace,
    /// Descending singular values of the basis matrix (all of them).
    pub singular_values: Vec<f64>,
    pub order: usize,
}

/// Smallest `r` with `σ_{r+1} / σ_1 ≤ rel_tol`, or `n` if there is none.
pub fn truncation_order(singular_values: &[f64], rel_tol: f64) -> usize {
    let n = singular_values.len();
    let Some(&first) = singular_values.first() else {
        return 0;
    };
    if first == 0.0 {
        return 0;
    }
    (1..n).find(|&k| singular_values[k] / first <= rel_tol).unwrap_or(n)
}

pub fn svd_truncate(p: &LoewnerPencil, d: &RMatrix, rel_tol: f64) -> Result<Truncation> {
    svd_truncate_with(p, d, rel_tol, SvdBasis::Loewner)
}

/// Projects the interpolant onto the dominant singular subspaces. Self-conjugate
/// data are realified first so the reduced model is real.
pub fn svd_truncate_with(p: &LoewnerPencil, d: &RMatrix, rel_tol: f64, basis: SvdBasis) -> Result<Truncation> {
    if !(0.0..1.0).contains(&rel_tol) {
        return Err(Error::InvalidInput(format!("rel_tol must lie in [0, 1), got {rel_tol}")));
    }
    check_feedthrough(p, d)?;
    let realified;
    let p = if p.real {
        p
    } else {
        match build_realifier(&p.data) {
            Ok(map) => {
                realified = realify_pencil(p, &map)?;
                &realified
            }
            Err(Error::NotSelfConjugate(_)) => p,
            Err(e) => return Err(e),
        }
    };
    let n = p.n();
    if n == 0 {
        return Ok(Truncation {
            model: StateSpace::static_gain(d.clone())?,
            singular_values: Vec::new(),
            order: 0,
        });
    }
    let dc = complexify(d);
    let (e, a, b, c) = pencil_matrices(p, &dc);

    let (left, right, sv) = match basis {
        SvdBasis::Loewner => {
            let (u, s, vt) = sorted_svd(e.clone(), p.real);
            (u, vt.adjoint(), s)
        }
        SvdBasis::Stacked => {
            let mut wide = CMatrix::zeros(n, 2 * n);
            wide.view_mut((0, 0), (n, n)).copy_from(&e);
            wide.view_mut((0, n), (n, n)).copy_from(&a);
            let mut tall = CMatrix::zeros(2 * n, n);
            tall.view_mut((0, 0), (n, n)).copy_from(&e);
            tall.view_mut((n, 0), (n, n)).copy_from(&a);
            let (u, s, _) = sorted_svd(wide, p.real);
            let (_, _, vt) = sorted_svd(tall, p.real);
            (u, vt.adjoint(), s)
        }
    };
    let r = truncation_order(&sv, rel_tol);
    let y = left.columns(0, r).into_owned();
    let x = right.columns(0, r).into_owned();
    let yh = y.adjoint();
    let model = StateSpace::new(Some(&yh * &e * &x), &yh * &a * &x, &yh * &b, &c * &x, dc)?;
    Ok(Truncation {
        model,
        singular_values: sv,
        order: r,
    })
}

/// Thin SVD with singular values in descending order: `(U, σ, Vᴴ)`. With
/// `real` set the factorization runs in real arithmetic so that products
/// with the factors stay exactly real.
pub(crate) fn sorted_svd(m: CMatrix, real: bool) -> (CMatrix, Vec<f64>, CMatrix) {
    let (u, sv, vt) = if real {
        let svd = SVD::new(real_part(&m), true, true);
        (
            complexify(&svd.u.expect("left singular vectors requested")),
            svd.singular_values,
            complexify(&svd.v_t.expect("right singular vectors requested")),
        )
    } else {
        let svd = SVD::new(m, true, true);
        (
            svd.u.expect("left singular vectors requested"),
            svd.singular_values,
            svd.v_t.expect("right singular vectors requested"),
        )
    };
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let s = order.iter().map(|&i| sv[i]).collect();
    let u_sorted = CMatrix::from_fn(u.nrows(), order.len(), |i, k| u[(i, order[k])]);
    let vt_sorted = CMatrix::from_fn(order.len(), vt.ncols(), |k, j| vt[(order[k], j)]);
    (u_sorted, s, vt_sorted)
}
