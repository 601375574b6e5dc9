//! Generalized state-space models `(E, A, B, C, D)` with square port count,
//! transfer and spectral-density evaluation, and degree-of-freedom counts.

use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{complexify, identity_c, real_part, CMatrix, ComplexLu, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

/// Descriptor realization `Z(s) = C (sE − A)⁻¹ B + D` with `m` inputs and
/// `m` outputs. Entries are stored as complex numbers; `field()` records
/// whether all of them are real.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    e: CMatrix,
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    field: ScalarField,
}

/// Real quintuple `(E, A, B, C, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrices {
    pub e: RMatrix,
    pub a: RMatrix,
    pub b: RMatrix,
    pub c: RMatrix,
    pub d: RMatrix,
}

impl StateSpace {
    /// Builds a model; `e = None` means `E = I`.
    pub fn new(e: Option<CMatrix>, a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = a.nrows();
        let e = e.unwrap_or_else(|| identity_c(n));
        if !a.is_square() {
            return Err(Error::Dimension(format!("A is {}x{}", a.nrows(), a.ncols())));
        }
        if e.shape() != (n, n) {
            return Err(Error::Dimension(format!("E is {}x{}, expected {n}x{n}", e.nrows(), e.ncols())));
        }
        let m = d.nrows();
        if m == 0 || !d.is_square() {
            return Err(Error::Dimension(format!("D is {}x{}, expected square with m >= 1", d.nrows(), d.ncols())));
        }
        if b.shape() != (n, m) {
            return Err(Error::Dimension(format!("B is {}x{}, expected {n}x{m}", b.nrows(), b.ncols())));
        }
        if c.shape() != (m, n) {
            return Err(Error::Dimension(format!("C is {}x{}, expected {m}x{n}", c.nrows(), c.ncols())));
        }
        let finite = [&e, &a, &b, &c, &d]
            .iter()
            .all(|x| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !finite {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let real = [&e, &a, &b, &c, &d].iter().all(|x| x.iter().all(|z| z.im == 0.0));
        let field = if real { ScalarField::Real } else { ScalarField::Complex };
        Ok(StateSpace { e, a, b, c, d, field })
    }

    pub fn from_real(e: Option<RMatrix>, a: RMatrix, b: RMatrix, c: RMatrix, d: RMatrix) -> Result<Self> {
        StateSpace::new(
            e.as_ref().map(complexify),
            complexify(&a),
            complexify(&b),
            complexify(&c),
            complexify(&d),
        )
    }

    /// Standard form, `E = I`.
    pub fn standard(a: RMatrix, b: RMatrix, c: RMatrix, d: RMatrix) -> Result<Self> {
        StateSpace::from_real(None, a, b, c, d)
    }

    /// Static gain `Z(s) ≡ D`.
    pub fn static_gain(d: RMatrix) -> Result<Self> {
        let m = d.nrows();
        StateSpace::standard(RMatrix::zeros(0, 0), RMatrix::zeros(0, m), RMatrix::zeros(m, 0), d)
    }

    pub fn e(&self) -> &CMatrix {
        &self.e
    }
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CMatrix {
        &self.b
    }
    pub fn c(&self) -> &CMatrix {
        &self.c
    }
    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Port dimension.
    pub fn m(&self) -> usize {
        self.d.nrows()
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn is_real(&self) -> bool {
        self.field == ScalarField::Real
    }

    pub fn has_identity_e(&self) -> bool {
        self.e == identity_c(self.n())
    }

    pub fn real_matrices(&self) -> Result<RealMatrices> {
        if !self.is_real() {
            return Err(Error::ComplexModel);
        }
        Ok(RealMatrices {
            e: real_part(&self.e),
            a: real_part(&self.a),
            b: real_part(&self.b),
            c: real_part(&self.c),
            d: real_part(&self.d),
        })
    }

    /// `Z(s) = C (sE − A)⁻¹ B + D`.
    pub fn eval_transfer(&self, s: Complex64) -> Result<CMatrix> {
        if self.n() == 0 {
            return Ok(self.d.clone());
        }
        let pencil = self.e.map(|x| x * s) - &self.a;
        let lu = ComplexLu::new(pencil);
        if lu.is_singular() {
            return Err(Error::SingularPencil { s });
        }
        let x = lu.solve(&self.b);
        Ok(&self.c * x + &self.d)
    }

    /// Spectral density `Φ(s) = Z(−s)ᵀ + Z(s)`.
    pub fn eval_phi(&self, s: Complex64) -> Result<CMatrix> {
        let zp = self.eval_transfer(s)?;
        let zm = self.eval_transfer(-s)?;
        Ok(zm.transpose() + zp)
    }

    /// State transformation `(TET⁻¹, TAT⁻¹, TB, CT⁻¹, D)`; leaves the
    /// transfer function unchanged.
    pub fn similarity(&self, t: &CMatrix) -> Result<StateSpace> {
        let n = self.n();
        if t.shape() != (n, n) {
            return Err(Error::Dimension(format!("T is {}x{}, expected {n}x{n}", t.nrows(), t.ncols())));
        }
        let lu = ComplexLu::new(t.clone());
        if lu.is_singular() {
            return Err(Error::InvalidInput("transformation is singular".into()));
        }
        let t_inv = lu.solve(&identity_c(n));
        StateSpace::new(
            Some(t * &self.e * &t_inv),
            t * &self.a * &t_inv,
            t * &self.b,
            &self.c * &t_inv,
            self.d.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    StrictlyProper,
    /// Proper, with `rank Z(∞) = r`.
    ProperWithRank(usize),
}

/// Degree-of-freedom query for a real `m × m` transfer function of
/// MacMillan degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofQuery {
    n: usize,
    m: usize,
    kind: DofKind,
}

impl DofQuery {
    pub fn new(n: usize, m: usize, kind: DofKind) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("port dimension must be at least 1".into()));
        }
        if let DofKind::ProperWithRank(r) = kind {
            if r > m {
                return Err(Error::InvalidInput(format!("rank {r} exceeds port dimension {m}")));
            }
        }
        Ok(DofQuery { n, m, kind })
    }
}

/// Number of real parameters: `2mn` when strictly proper, `2m(n + r) − r²`
/// when `Z(∞)` has rank `r`.
pub fn dof_count(q: DofQuery) -> u64 {
    let (n, m) = (q.n as u64, q.m as u64);
    match q.kind {
        DofKind::StrictlyProper => 2 * m * n,
        DofKind::ProperWithRank(r) => {
            let r = r as u64;
            2 * m * (n + r) - r * r
        }
    }
}
