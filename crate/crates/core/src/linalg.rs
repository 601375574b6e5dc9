//! Dense helpers shared by the numerical modules: complex LU with a 1-norm
//! condition estimate, Cholesky with failing-minor reporting, and a few
//! conversions between real and complex storage.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

pub const EPS: f64 = f64::EPSILON;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn max_abs_imag(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Maximum absolute column sum.
pub fn norm1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm1_real(m: &RMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖M − Mᵀ‖_F / ‖M‖_F`, zero for the zero matrix.
pub fn relative_asymmetry(m: &RMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.transpose()).norm() / scale
}

pub fn sym_part(m: &RMatrix) -> RMatrix {
    (m + m.transpose()) * 0.5
}

pub fn skew_part(m: &RMatrix) -> RMatrix {
    (m - m.transpose()) * 0.5
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues(m: &RMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(sym_part(m));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn herm_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = SymmetricEigen::new(h);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Upper triangular `Γ` with `A = ΓᵀΓ`. On failure returns the 1-based
/// index of the first leading minor that is not positive.
pub fn cholesky_upper(a: &RMatrix) -> core::result::Result<RMatrix, usize> {
    let n = a.nrows();
    let mut g = RMatrix::zeros(n, n);
    for j in 0..n {
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= g[(k, j)] * g[(k, j)];
        }
        if !s.is_finite() || s <= 0.0 {
            return Err(j + 1);
        }
        let pivot = Float::sqrt(s);
        g[(j, j)] = pivot;
        for i in (j + 1)..n {
            let mut t = a[(j, i)];
            for k in 0..j {
                t -= g[(k, j)] * g[(k, i)];
            }
            g[(j, i)] = t / pivot;
        }
    }
    Ok(g)
}

/// LU factorization with partial pivoting, `PA = LU`.
///
/// Exactly zero pivots are replaced by `ε‖A‖₁` so that solves stay finite;
/// such a factorization reports an `rcond` at roundoff level.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: CMatrix,
    perm: Vec<usize>,
    anorm: f64,
    zero_pivot: bool,
}

impl ComplexLu {
    pub fn new(a: CMatrix) -> Self {
        assert!(a.is_square(), "LU of a non-square matrix");
        let n = a.nrows();
        let anorm = norm1(&a);
        let mut lu = a;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut zero_pivot = false;
        let floor = if anorm > 0.0 { EPS * anorm } else { EPS };
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                lu.swap_rows(k, p);
                perm.swap(k, p);
            }
            if best == 0.0 {
                zero_pivot = true;
                lu[(k, k)] = Complex64::new(floor, 0.0);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                lu[(i, k)] /= pivot;
            }
            for j in (k + 1)..n {
                let akj = lu[(k, j)];
                if akj == ZERO {
                    continue;
                }
                for i in (k + 1)..n {
                    let lik = lu[(i, k)];
                    lu[(i, j)] -= lik * akj;
                }
            }
        }
        ComplexLu {
            lu,
            perm,
            anorm,
            zero_pivot,
        }
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        let n = self.dim();
        assert_eq!(b.nrows(), n);
        let mut x = CMatrix::from_fn(n, b.ncols(), |i, j| b[(self.perm[i], j)]);
        for col in 0..x.ncols() {
            for k in 0..n {
                let xk = x[(k, col)];
                if xk == ZERO {
                    continue;
                }
                for i in (k + 1)..n {
                    x[(i, col)] -= self.lu[(i, k)] * xk;
                }
            }
            for k in (0..n).rev() {
                let xk = x[(k, col)] / self.lu[(k, k)];
                x[(k, col)] = xk;
                if xk == ZERO {
                    continue;
                }
                for i in 0..k {
                    x[(i, col)] -= self.lu[(i, k)] * xk;
                }
            }
        }
        x
    }

    pub fn solve_vec(&self, b: &CVector) -> CVector {
        let x = self.solve(&CMatrix::from_column_slice(b.len(), 1, b.as_slice()));
        CVector::from_column_slice(x.as_slice())
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint_vec(&self, b: &CVector) -> CVector {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // Uᴴ z = b
        let mut z = b.clone();
        for i in 0..n {
            let mut s = z[i];
            for k in 0..i {
                s -= self.lu[(k, i)].conj() * z[k];
            }
            z[i] = s / self.lu[(i, i)].conj();
        }
        // Lᴴ y = z
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= self.lu[(k, i)].conj() * z[k];
            }
            z[i] = s;
        }
        let mut x = CVector::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = z[i];
        }
        x
    }

    /// Reciprocal 1-norm condition number, estimated with the Hager–Higham
    /// iteration (a handful of solves with `A` and `Aᴴ`).
    pub fn rcond(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        if self.zero_pivot || self.anorm == 0.0 {
            return 0.0;
        }
        let inv_norm = self.inverse_norm1_estimate();
        if !inv_norm.is_finite() || inv_norm == 0.0 {
            return 0.0;
        }
        1.0 / (self.anorm * inv_norm)
    }

    pub fn is_singular(&self) -> bool {
        self.rcond() < EPS
    }

    fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.dim();
        let vec_norm1 = |v: &CVector| v.iter().map(|z| z.norm()).sum::<f64>();
        let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0;
        for iter in 0..5 {
            let y = self.solve_vec(&x);
            let ny = vec_norm1(&y);
            if iter > 0 && ny <= est {
                break;
            }
            est = ny;
            if n == 1 {
                break;
            }
            let xi = y.map(|z| {
                let a = z.norm();
                if a == 0.0 {
                    ONE
                } else {
                    z / a
                }
            });
            let z = self.solve_adjoint_vec(&xi);
            let (j, zj) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, p| if p.1 > acc.1 { p } else { acc });
            if iter > 0 && zj <= z.dotc(&x).re {
                break;
            }
            x = CVector::zeros(n);
            x[j] = ONE;
        }
        if n > 1 {
            let alt = CVector::from_fn(n, |i, _| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(sign * (1.0 + i as f64 / (n - 1) as f64), 0.0)
            });
            let y = self.solve_vec(&alt);
            est = est.max(2.0 * vec_norm1(&y) / (3.0 * n as f64));
        }
        est
    }
}

/// Solves `A X = B` for real matrices through the complex LU; `None` if `A`
/// is numerically singular.
pub fn solve_real(a: &RMatrix, b: &RMatrix) -> Option<RMatrix> {
    let lu = ComplexLu::new(complexify(a));
    if lu.is_singular() {
        return None;
    }
    Some(real_part(&lu.solve(&complexify(b))))
}

/// Deterministic, well-spread start vector for inverse iterations.
pub(crate) fn start_vector(n: usize) -> CVector {
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
    CVector::from_vec(v)
}

pub(crate) fn identity_c(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub(crate) fn block_diag(blocks: &[&CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}
