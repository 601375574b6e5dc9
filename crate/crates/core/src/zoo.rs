//! Reference models: a 2×2 analytic system, a five-state RLC circuit and a
//! strictly passive RLC ladder of arbitrary length.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::ph::{reconstruct, PortHamiltonianForm};
use crate::state_space::StateSpace;

/// `Z(s) = dI − (sI − A)⁻¹` with `A = [[a, b], [−b, a]]`.
pub fn make_analytic(a: f64, b: f64, d: f64) -> Result<StateSpace> {
    if !a.is_finite() || !b.is_finite() || !d.is_finite() || a >= 0.0 || d <= 0.0 {
        return Err(Error::InvalidInput(format!("need a < 0 and d > 0, got a = {a}, d = {d}")));
    }
    let i2 = RMatrix::identity(2, 2);
    StateSpace::standard(RMatrix::from_row_slice(2, 2, &[a, b, -b, a]), i2.clone(), -i2.clone(), i2 * d)
}

/// Five-state single-port RLC circuit.
pub fn make_rlc5() -> StateSpace {
    #[rustfmt::skip]
    let a = RMatrix::from_row_slice(5, 5, &[
        -20.0, -10.0,   0.0,   0.0,   0.0,
         10.0,   0.0, -10.0,   0.0,   0.0,
          0.0,  10.0,   0.0, -10.0,   0.0,
          0.0,   0.0,  10.0,   0.0, -10.0,
          0.0,   0.0,   0.0,  10.0,  -2.0,
    ]);
    let mut b = RMatrix::zeros(5, 1);
    b[(0, 0)] = 20.0;
    let mut c = RMatrix::zeros(1, 5);
    c[(0, 0)] = -2.0;
    StateSpace::standard(a, b, c, RMatrix::from_element(1, 1, 2.0)).expect("fixed shapes")
}

/// Resistance per ladder section.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Dissipation {
    /// `r_i = 0.05 + 0.15·i/k` for `i = 1..k`.
    #[default]
    Graded,
    /// One value per section.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    pub sections: usize,
    pub dissipation: Dissipation,
    pub feedthrough: f64,
}

impl LadderSpec {
    pub fn new(sections: usize) -> Self {
        LadderSpec {
            sections,
            dissipation: Dissipation::Graded,
            feedthrough: 1.0,
        }
    }

    pub fn resistances(&self) -> Vec<f64> {
        let k = self.sections;
        match &self.dissipation {
            Dissipation::Graded => (1..=k).map(|i| 0.05 + 0.15 * i as f64 / k as f64).collect(),
            Dissipation::Custom(values) => values.clone(),
        }
    }
}

/// Ladder in port-Hamiltonian form: alternating capacitor/inductor states
/// coupled by a tridiagonal skew `J`, both states of section `i` damped by
/// `r_i`, the port attached to the first state.
pub fn make_ladder_ph(spec: &LadderSpec) -> Result<PortHamiltonianForm> {
    let k = spec.sections;
    if k == 0 {
        return Err(Error::InvalidInput("ladder needs at least one section".into()));
    }
    let res = spec.resistances();
    if res.len() != k || res.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidInput(format!("need {k} positive resistances")));
    }
    if !spec.feedthrough.is_finite() || spec.feedthrough <= 0.0 {
        return Err(Error::InvalidInput(format!("feedthrough must be positive, got {}", spec.feedthrough)));
    }
    let n = 2 * k;
    let mut j = RMatrix::zeros(n, n);
    for i in 0..n - 1 {
        j[(i, i + 1)] = -1.0;
        j[(i + 1, i)] = 1.0;
    }
    let r = RMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| res[i / 2]));
    let mut g = RMatrix::zeros(n, 1);
    g[(0, 0)] = 1.0;
    PortHamiltonianForm::new(
        j,
        r,
        g,
        RMatrix::zeros(n, 1),
        RMatrix::zeros(1, 1),
        RMatrix::from_element(1, 1, spec.feedthrough),
        RMatrix::identity(n, n),
    )
}

pub fn make_ladder(spec: &LadderSpec) -> Result<StateSpace> {
    make_ladder_ph(spec).map(|ph| reconstruct(&ph))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub description: &'static str,
}

pub const ZOO: &[ZooEntry] = &[
    ZooEntry {
        name: "analytic",
        description: "2x2 model dI - (sI - A)^-1, A = [[a, b], [-b, a]] (default a = -1, b = 1, d = 2)",
    },
    ZooEntry {
        name: "rlc5",
        description: "5-state single-port RLC circuit, D = 2",
    },
    ZooEntry {
        name: "ladder",
        description: "strictly passive RLC ladder with 2k states (default k = 100)",
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::passivity::{check_certificate, positive_real_sweep, Verdict};
    use alloc::vec;
    use num_complex::Complex64;

    #[test]
    fn analytic_model() {
        let model = make_analytic(-1.0, 1.0, 2.0).unwrap();
        let z0 = model.eval_transfer(Complex64::new(0.0, 0.0)).unwrap();
        // 2I − (−A)⁻¹ with A = [[−1, 1], [−1, −1]]
        let want = [[1.5, -0.5], [0.5, 1.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((z0[(i, j)] - Complex64::new(want[i][j], 0.0)).norm() < 1e-14);
            }
        }
        assert!(make_analytic(1.0, 1.0, 2.0).is_err());
        assert!(make_analytic(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rlc5_shape() {
        let model = make_rlc5();
        assert_eq!((model.n(), model.m()), (5, 1));
        assert_eq!(model.d()[(0, 0)], Complex64::new(2.0, 0.0));
        assert!(model.is_real());
    }

    #[test]
    fn ladder_is_strictly_passive() {
        let spec = LadderSpec {
            sections: 1,
            dissipation: Dissipation::Custom(vec![1.0]),
            feedthrough: 1.0,
        };
        let model = make_ladder(&spec).unwrap();
        assert_eq!(model.n(), 2);
        let report = check_certificate(&model, &RMatrix::identity(2, 2)).unwrap();
        assert_eq!(report.verdict, Verdict::Strict);

        let big = make_ladder(&LadderSpec::new(100)).unwrap();
        assert_eq!((big.n(), big.m()), (200, 1));
        assert_eq!(check_certificate(&big, &RMatrix::identity(200, 200)).unwrap().verdict, Verdict::Strict);
        let omegas: Vec<f64> = (0..50).map(|i| 10f64.powf(-1.0 + 4.0 * i as f64 / 49.0)).collect();
        assert!(positive_real_sweep(&big, &omegas).iter().all(|p| p.lambda_min.unwrap() > 0.0));
    }

    #[test]
    fn ladder_spec_validation() {
        assert!(make_ladder(&LadderSpec::new(0)).is_err());
        let neg = LadderSpec {
            sections: 2,
            dissipation: Dissipation::Custom(vec![1.0, -1.0]),
            feedthrough: 1.0,
        };
        assert!(make_ladder(&neg).is_err());
        let mut zero_d = LadderSpec::new(2);
        zero_d.feedthrough = 0.0;
        assert!(make_ladder(&zero_d).is_err());
    }
}
