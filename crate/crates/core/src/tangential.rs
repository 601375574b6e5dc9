//! Tangential interpolation data: right triples `(λ, r, w)` with
//! `w = Z(λ) r`, left triples `(μ, ℓ, v)` with `v = ℓ Z(μ)`, conjugate
//! bookkeeping, and the mirrored left data of a spectral-zero set.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{DVector, RowDVector};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

/// Relative tolerance for deciding that two data are conjugate partners.
pub const CONJUGATE_TOL: f64 = 1e-10;
/// Relative separation below which interpolation points are considered equal.
pub const COLLISION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct RightDatum {
    pub lambda: Complex64,
    pub r: DVector<Complex64>,
    pub w: DVector<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeftDatum {
    pub mu: Complex64,
    pub ell: RowDVector<Complex64>,
    pub v: RowDVector<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// One broken invariant of a [`TangentialDataSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    CountMismatch { rights: usize, lefts: usize },
    DimensionMismatch { side: Side, index: usize, expected: usize, found: usize },
    FeedthroughShape { rows: usize, cols: usize, m: usize },
    ZeroDirection { side: Side, index: usize },
    MissingConjugate { side: Side, index: usize },
    PointCollision { right: usize, left: usize },
    /// Two spectral-zero data at numerically the same point.
    CoincidentPoints { first: usize, second: usize },
}

/// Matched left/right data plus the value at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialDataSet {
    pub rights: Vec<RightDatum>,
    pub lefts: Vec<LeftDatum>,
    pub d: RMatrix,
    pub m: usize,
    /// Lefts were mirrored from the rights (`μ = −λ̄`, `ℓ = rᴴ`, `v = −wᴴ`).
    pub spectral: bool,
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= CONJUGATE_TOL * a.norm().max(1.0)
}

/// `a ≈ conj(b)` in the relative 2-norm sense.
fn conj_close(a: &[Complex64], b: &[Complex64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = Float::sqrt(a.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(1.0);
    let diff = Float::sqrt(a.iter().zip(b).map(|(x, y)| (x - y.conj()).norm_sqr()).sum::<f64>());
    diff <= CONJUGATE_TOL * scale
}

impl RightDatum {
    pub fn new(lambda: Complex64, r: DVector<Complex64>, w: DVector<Complex64>) -> Self {
        RightDatum { lambda, r, w }
    }

    pub fn conj(&self) -> Self {
        RightDatum {
            lambda: self.lambda.conj(),
            r: self.r.map(|z| z.conj()),
            w: self.w.map(|z| z.conj()),
        }
    }

    /// Point and vectors all real within the conjugacy tolerance.
    pub fn is_real(&self) -> bool {
        self.is_partner_of(self)
    }

    pub fn is_partner_of(&self, other: &RightDatum) -> bool {
        close(self.lambda, other.lambda.conj())
            && conj_close(self.r.as_slice(), other.r.as_slice())
            && conj_close(self.w.as_slice(), other.w.as_slice())
    }

    fn sort_key(&self) -> DatumKey {
        DatumKey::new(self.lambda, self.r.as_slice(), self.w.as_slice(), self.is_real())
    }
}

impl LeftDatum {
    pub fn new(mu: Complex64, ell: RowDVector<Complex64>, v: RowDVector<Complex64>) -> Self {
        LeftDatum { mu, ell, v }
    }

    pub fn conj(&self) -> Self {
        LeftDatum {
            mu: self.mu.conj(),
            ell: self.ell.map(|z| z.conj()),
            v: self.v.map(|z| z.conj()),
        }
    }

    pub fn is_real(&self) -> bool {
        self.is_partner_of(self)
    }

    pub fn is_partner_of(&self, other: &LeftDatum) -> bool {
        close(self.mu, other.mu.conj())
            && conj_close(self.ell.as_slice(), other.ell.as_slice())
            && conj_close(self.v.as_slice(), other.v.as_slice())
    }

    fn sort_key(&self) -> DatumKey {
        DatumKey::new(self.mu, self.ell.as_slice(), self.v.as_slice(), self.is_real())
    }
}

/// Total order used for canonical ordering: real data first (by point),
/// then conjugate pairs by `(|Im|, Re)` with the upper member first. Ties
/// between distinct data are broken lexicographically on the vectors.
#[derive(Debug, Clone)]
struct DatumKey {
    real: bool,
    abs_im: f64,
    re: f64,
    lower: bool,
    entries: Vec<f64>,
}

impl DatumKey {
    fn new(point: Complex64, dir: &[Complex64], resp: &[Complex64], real: bool) -> Self {
        let real_point = 2.0 * point.im.abs() <= CONJUGATE_TOL * point.norm().max(1.0);
        // Upper member: positive imaginary part of the point, or for a real
        // point with complex vectors, the first non-real vector entry.
        let lower = if !real_point {
            point.im < 0.0
        } else {
            dir.iter()
                .chain(resp)
                .find(|z| z.im.abs() > CONJUGATE_TOL * z.norm().max(1.0))
                .map(|z| z.im < 0.0)
                .unwrap_or(false)
        };
        let mut entries = Vec::with_capacity(2 * (dir.len() + resp.len()));
        for z in dir.iter().chain(resp) {
            entries.push(z.re);
            entries.push(z.im.abs());
        }
        DatumKey {
            real,
            abs_im: if real_point { 0.0 } else { point.im.abs() },
            re: point.re,
            lower,
            entries,
        }
    }

    fn pair_key_cmp(&self, other: &Self) -> Ordering {
        // real data before pairs
        other
            .real
            .cmp(&self.real)
            .then(self.abs_im.total_cmp(&other.abs_im))
            .then(self.re.total_cmp(&other.re))
            .then_with(|| {
                for (a, b) in self.entries.iter().zip(&other.entries) {
                    let c = a.total_cmp(b);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            })
    }
}

fn closure_generic<T: Clone>(
    items: &[T],
    conj: impl Fn(&T) -> T,
    partner: impl Fn(&T, &T) -> bool,
    is_real: impl Fn(&T) -> bool,
    key: impl Fn(&T) -> DatumKey,
) -> Vec<T> {
    // Group into real singletons and (upper, lower) pairs.
    let mut used = alloc::vec![false; items.len()];
    let mut groups: Vec<(DatumKey, Vec<T>)> = Vec::new();
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let it = &items[i];
        if is_real(it) {
            groups.push((key(it), alloc::vec![it.clone()]));
            continue;
        }
        let mate = (0..items.len()).find(|&j| !used[j] && partner(it, &items[j]));
        let other = match mate {
            Some(j) => {
                used[j] = true;
                items[j].clone()
            }
            None => conj(it),
        };
        let (ka, kb) = (key(it), key(&other));
        let (upper, lower, kupper) = if ka.lower && !kb.lower {
            (other, it.clone(), kb)
        } else {
            (it.clone(), other, ka)
        };
        groups.push((kupper, alloc::vec![upper, lower]));
    }
    groups.sort_by(|a, b| a.0.pair_key_cmp(&b.0));
    groups.into_iter().flat_map(|(_, g)| g).collect()
}

/// Adds the missing conjugate partner of every non-real datum and returns the
/// data in canonical order.
pub fn conjugate_closure(rights: &[RightDatum]) -> Vec<RightDatum> {
    closure_generic(
        rights,
        RightDatum::conj,
        RightDatum::is_partner_of,
        RightDatum::is_real,
        RightDatum::sort_key,
    )
}

/// Left-data analogue of [`conjugate_closure`].
pub fn conjugate_closure_left(lefts: &[LeftDatum]) -> Vec<LeftDatum> {
    closure_generic(
        lefts,
        LeftDatum::conj,
        LeftDatum::is_partner_of,
        LeftDatum::is_real,
        LeftDatum::sort_key,
    )
}

/// Mirrors spectral-zero right data into left data: `μ = −λ̄`, `ℓ = rᴴ`,
/// `v = −wᴴ`, index for index.
pub fn left_from_spectral(rights: Vec<RightDatum>, d: RMatrix) -> Result<TangentialDataSet> {
    if let Some(index) = rights.iter().position(|r| r.lambda.re.is_nan() || r.lambda.re <= 0.0) {
        return Err(Error::InvalidSpectralData { index });
    }
    let m = d.nrows();
    let lefts = rights
        .iter()
        .map(|rd| LeftDatum {
            mu: -rd.lambda.conj(),
            ell: rd.r.adjoint(),
            v: -rd.w.adjoint(),
        })
        .collect();
    Ok(TangentialDataSet {
        rights,
        lefts,
        d,
        m,
        spectral: true,
    })
}

impl TangentialDataSet {
    /// General data set; lefts are taken as given.
    pub fn new(rights: Vec<RightDatum>, lefts: Vec<LeftDatum>, d: RMatrix) -> Self {
        let m = d.nrows();
        TangentialDataSet {
            rights,
            lefts,
            d,
            m,
            spectral: false,
        }
    }

    pub fn len(&self) -> usize {
        self.rights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rights.is_empty()
    }
}

/// Lists every broken invariant; an empty list means the set is valid.
pub fn validate(ds: &TangentialDataSet) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = ds.m;
    if ds.d.nrows() != m || ds.d.ncols() != m {
        out.push(Violation::FeedthroughShape {
            rows: ds.d.nrows(),
            cols: ds.d.ncols(),
            m,
        });
    }
    if ds.rights.len() != ds.lefts.len() {
        out.push(Violation::CountMismatch {
            rights: ds.rights.len(),
            lefts: ds.lefts.len(),
        });
    }
    for (index, rd) in ds.rights.iter().enumerate() {
        for found in [rd.r.len(), rd.w.len()] {
            if found != m {
                out.push(Violation::DimensionMismatch { side: Side::Right, index, expected: m, found });
            }
        }
        if rd.r.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            out.push(Violation::ZeroDirection { side: Side::Right, index });
        }
        if !rd.is_real() && !ds.rights.iter().any(|o| rd.is_partner_of(o)) {
            out.push(Violation::MissingConjugate { side: Side::Right, index });
        }
    }
    for (index, ld) in ds.lefts.iter().enumerate() {
        for found in [ld.ell.len(), ld.v.len()] {
            if found != m {
                out.push(Violation::DimensionMismatch { side: Side::Left, index, expected: m, found });
            }
        }
        if ld.ell.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            out.push(Violation::ZeroDirection { side: Side::Left, index });
        }
        if !ld.is_real() && !ds.lefts.iter().any(|o| ld.is_partner_of(o)) {
            out.push(Violation::MissingConjugate { side: Side::Left, index });
        }
    }
    for (j, rd) in ds.rights.iter().enumerate() {
        for (i, ld) in ds.lefts.iter().enumerate() {
            let scale = rd.lambda.norm().max(ld.mu.norm()).max(1.0);
            if (rd.lambda - ld.mu).norm() <= COLLISION_TOL * scale {
                out.push(Violation::PointCollision { right: j, left: i });
            }
        }
    }
    if ds.spectral {
        for i in 0..ds.rights.len() {
            for j in (i + 1)..ds.rights.len() {
                let (a, b) = (ds.rights[i].lambda, ds.rights[j].lambda);
                if (a - b).norm() <= CONJUGATE_TOL * a.norm().max(1.0) {
                    out.push(Violation::CoincidentPoints { first: i, second: j });
                }
            }
        }
    }
    out
}
