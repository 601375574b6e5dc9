#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use phid_core::linalg::{CMatrix, RMatrix};
use phid_core::ph::PortHamiltonianForm;
use rand::Rng;

pub fn uniform(rng: &mut impl Rng, rows: usize, cols: usize) -> RMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

/// Strictly passive form: `[[R, P], [Pᵀ, S]] ≻ 0`, `Q ≻ 0`.
pub fn random_ph(rng: &mut impl Rng, n: usize, m: usize, normalized: bool) -> PortHamiltonianForm {
    let k = n + m;
    let f = uniform(rng, k, k);
    let w = &f * f.transpose() / k as f64 + RMatrix::identity(k, k) * 0.1;
    let r = w.view((0, 0), (n, n)).into_owned();
    let p = w.view((0, n), (n, m)).into_owned();
    let s = w.view((n, n), (m, m)).into_owned();
    let jr = uniform(rng, n, n) * 2.0;
    let j = (&jr - jr.transpose()) * 0.5;
    let nr = uniform(rng, m, m);
    let skew_n = (&nr - nr.transpose()) * 0.5;
    let g = uniform(rng, n, m);
    let q = if normalized {
        RMatrix::identity(n, n)
    } else {
        let h = uniform(rng, n, n);
        &h * h.transpose() / n as f64 + RMatrix::identity(n, n) * 0.5
    };
    PortHamiltonianForm::new(j, r, g, p, skew_n, s, q).expect("valid by construction")
}

/// Well-conditioned random state transformation.
pub fn random_transform(rng: &mut impl Rng, n: usize) -> CMatrix {
    let t = uniform(rng, n, n) + RMatrix::identity(n, n) * 2.0;
    t.map(|x| Complex64::new(x, 0.0))
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * k as f64 / (count - 1) as f64))
        .collect()
}

pub fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

/// Matches two zero lists irrespective of order; `None` when counts differ.
pub fn max_zero_mismatch(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for z in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, w)| (k, (z - w).norm() / (1.0 + w.norm())))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[k] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
