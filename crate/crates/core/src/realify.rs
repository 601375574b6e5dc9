//! Conversion of self-conjugate complex Loewner data to real form with the
//! unitary 2×2 blocks `(1/√2)[[1, −i], [1, i]]`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_imag, CMatrix};
use crate::loewner::LoewnerPencil;
use crate::tangential::TangentialDataSet;

/// Relative bound on the imaginary residue of realified matrices.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// One diagonal block of the realifier, in data indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Real(usize),
    /// `(upper, partner)`: the first index gets the real part, the second
    /// the imaginary part.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealifierMap {
    pub right_blocks: Vec<Block>,
    pub left_blocks: Vec<Block>,
    /// Acts on the right data (columns of `R`, `W`, `𝕃`).
    pub u_right: CMatrix,
    /// Acts on the left data (rows of `L`, `V`, `𝕃`).
    pub u_left: CMatrix,
}

impl RealifierMap {
    pub fn n(&self) -> usize {
        self.u_right.nrows()
    }

    /// `Ω = Uᴴ Λ U` for the right points.
    pub fn omega(&self, ds: &TangentialDataSet) -> CMatrix {
        let lambda = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            ds.rights.len(),
            ds.rights.iter().map(|r| r.lambda),
        ));
        self.u_right.adjoint() * lambda * &self.u_right
    }
}

fn blocks<T>(items: &[T], is_real: impl Fn(&T) -> bool, partner: impl Fn(&T, &T) -> bool, side: &str) -> Result<Vec<Block>> {
    let mut used = alloc::vec![false; items.len()];
    let mut out = Vec::new();
    for i in 0..items.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if is_real(&items[i]) {
            out.push(Block::Real(i));
            continue;
        }
        let j = (i + 1..items.len())
            .find(|&j| !used[j] && partner(&items[i], &items[j]))
            .ok_or_else(|| Error::NotSelfConjugate(format!("{side} datum {i} has no conjugate partner")))?;
        used[j] = true;
        out.push(Block::Pair(i, j));
    }
    Ok(out)
}

fn unitary(n: usize, blocks: &[Block]) -> CMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMatrix::zeros(n, n);
    for b in blocks {
        match *b {
            Block::Real(i) => u[(i, i)] = Complex64::new(1.0, 0.0),
            Block::Pair(i, j) => {
                u[(i, i)] = Complex64::new(h, 0.0);
                u[(i, j)] = Complex64::new(0.0, -h);
                u[(j, i)] = Complex64::new(h, 0.0);
                u[(j, j)] = Complex64::new(0.0, h);
            }
        }
    }
    u
}

/// Pairs every non-real datum with its conjugate; fails if one is missing.
pub fn build_realifier(ds: &TangentialDataSet) -> Result<RealifierMap> {
    let right_blocks = blocks(&ds.rights, |d| d.is_real(), |a, b| a.is_partner_of(b), "right")?;
    let left_blocks = blocks(&ds.lefts, |d| d.is_real(), |a, b| a.is_partner_of(b), "left")?;
    Ok(RealifierMap {
        u_right: unitary(ds.rights.len(), &right_blocks),
        u_left: unitary(ds.lefts.len(), &left_blocks),
        right_blocks,
        left_blocks,
    })
}

fn drop_residue(m: CMatrix, what: &str) -> Result<CMatrix> {
    let residue = max_abs_imag(&m);
    if residue > IMAG_RESIDUE_TOL * max_abs(&m).max(1.0) {
        return Err(Error::NotSelfConjugate(format!("{what} keeps imaginary residue {residue:e}")));
    }
    Ok(m.map(|z| Complex64::new(z.re, 0.0)))
}

/// `𝕃̂ = U_lᴴ 𝕃 U_r`, `𝕃̂σ = U_lᴴ 𝕃σ U_r`, `Ω = U_rᴴ Λ U_r`, `M̂ = U_lᴴ M U_l`,
/// `L̂ = U_lᴴ L`, `V̂ = U_lᴴ V`, `R̂ = R U_r`, `Ŵ = W U_r`.
pub fn realify_pencil(p: &LoewnerPencil, map: &RealifierMap) -> Result<LoewnerPencil> {
    if map.n() != p.n() || map.u_left.nrows() != p.n() {
        return Err(Error::Dimension(format!("realifier of size {} for pencil of size {}", map.n(), p.n())));
    }
    let ul_h = map.u_left.adjoint();
    let ur = &map.u_right;
    Ok(LoewnerPencil {
        l: drop_residue(&ul_h * &p.l * ur, "Loewner matrix")?,
        ls: drop_residue(&ul_h * &p.ls * ur, "shifted Loewner matrix")?,
        lambda: drop_residue(ur.adjoint() * &p.lambda * ur, "right points")?,
        mu: drop_residue(&ul_h * &p.mu * &map.u_left, "left points")?,
        left_dirs: drop_residue(&ul_h * &p.left_dirs, "left directions")?,
        left_values: drop_residue(&ul_h * &p.left_values, "left responses")?,
        right_dirs: drop_residue(&p.right_dirs * ur, "right directions")?,
        right_values: drop_residue(&p.right_values * ur, "right responses")?,
        data: p.data.clone(),
        symmetric: p.symmetric,
        real: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity_c, RMatrix};
    use crate::loewner::{assemble_realization, build_pencil};
    use crate::tangential::{conjugate_closure, left_from_spectral, RightDatum};
    use alloc::vec;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn analytic_data() -> TangentialDataSet {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let rd = RightDatum::new(
            c(h, 1.0),
            DVector::from_column_slice(&[c(h, 0.0), c(0.0, h)]),
            DVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 1.0)]),
        );
        left_from_spectral(conjugate_closure(&[rd]), RMatrix::identity(2, 2) * 2.0).unwrap()
    }

    #[test]
    fn analytic_pair() {
        let ds = analytic_data();
        let map = build_realifier(&ds).unwrap();
        assert_eq!(map.right_blocks, vec![Block::Pair(0, 1)]);
        assert!((map.u_right.adjoint() * &map.u_right - identity_c(2)).norm() < 1e-12);

        let h = core::f64::consts::FRAC_1_SQRT_2;
        let omega = map.omega(&ds);
        let expected = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(h, 0.0)]);
        assert!((omega - expected).norm() < 1e-14);

        let p = realify_pencil(&build_pencil(&ds).unwrap(), &map).unwrap();
        assert!((p.l() - identity_c(2) * c(2.0, 0.0)).norm() < 1e-12);
        let ls = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)]);
        assert!((p.ls() - ls).norm() < 1e-12);
        // W = [w, w̄] with w = [1; i] goes to √2 I
        let w = p.right_values().clone();
        assert!((w - identity_c(2) * c(2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(p.is_real());
    }

    #[test]
    fn real_point_unchanged() {
        let s2 = 2f64.sqrt();
        let rd = RightDatum::new(c(s2, 0.0), DVector::from_element(1, c(1.0, 0.0)), DVector::from_element(1, c(s2, 0.0)));
        let ds = left_from_spectral(vec![rd], RMatrix::identity(1, 1)).unwrap();
        let map = build_realifier(&ds).unwrap();
        assert_eq!(map.u_right, identity_c(1));
        assert_eq!(map.omega(&ds)[(0, 0)], c(s2, 0.0));
        let p = build_pencil(&ds).unwrap();
        assert_eq!(realify_pencil(&p, &map).unwrap().l(), p.l());
    }

    #[test]
    fn realified_transfer_matches() {
        let ds = analytic_data();
        let p = build_pencil(&ds).unwrap();
        let d = RMatrix::identity(2, 2) * 2.0;
        let full = assemble_realization(&p, &d).unwrap();
        let real = assemble_realization(&realify_pencil(&p, &build_realifier(&ds).unwrap()).unwrap(), &d).unwrap();
        assert!(real.is_real());
        for k in 0..5 {
            let s = c(0.3 * k as f64, 1.0 + k as f64);
            let a = full.eval_transfer(s).unwrap();
            let b = real.eval_transfer(s).unwrap();
            assert!((&a - &b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn unpaired_datum_rejected() {
        let rd = RightDatum::new(c(1.0, 1.0), DVector::from_element(1, c(1.0, 0.0)), DVector::from_element(1, c(1.0, 0.0)));
        let ds = TangentialDataSet {
            rights: vec![rd.clone()],
            lefts: vec![],
            d: RMatrix::identity(1, 1),
            m: 1,
            spectral: false,
        };
        assert!(matches!(build_realifier(&ds), Err(Error::NotSelfConjugate(_))));
    }
}
