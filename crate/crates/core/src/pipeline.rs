//! Identification from imaginary-axis samples: a Loewner model is built
//! and truncated first, its right half-plane spectral zeros then serve as
//! interpolation points for the port-Hamiltonian construction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DVector, RowDVector};
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_upper, real_part, CMatrix, RMatrix};
use crate::loewner::{build_pencil, svd_truncate_with, SvdBasis};
use crate::passivity::{lambda_min_dissipation, pick_condition};
use crate::ph::{algorithm1_trace, reconstruct, PortHamiltonianForm};
use crate::spectral_zeros::spectral_data_from_model;
use crate::state_space::StateSpace;
use crate::tangential::{conjugate_closure, conjugate_closure_left, LeftDatum, RightDatum, TangentialDataSet};

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySample {
    pub omega: f64,
    pub z: CMatrix,
}

/// Samples `Z(iω)` at strictly increasing positive frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySampleSet {
    samples: Vec<FrequencySample>,
    m: usize,
    band: Option<(f64, f64)>,
}

impl FrequencySampleSet {
    pub fn new(samples: Vec<FrequencySample>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        };
        let m = first.z.nrows();
        if m == 0 {
            return Err(Error::Dimension("samples must have at least one port".into()));
        }
        for (k, s) in samples.iter().enumerate() {
            if s.z.shape() != (m, m) {
                return Err(Error::Dimension(format!("sample {k} is {}x{}, expected {m}x{m}", s.z.nrows(), s.z.ncols())));
            }
            if !s.omega.is_finite() || s.omega <= 0.0 {
                return Err(Error::InvalidInput(format!("sample {k} has frequency {}", s.omega)));
            }
            if s.z.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {k} has a non-finite entry")));
            }
            if k > 0 && s.omega <= samples[k - 1].omega {
                return Err(Error::InvalidInput(format!("frequencies must increase strictly (sample {k})")));
            }
        }
        Ok(FrequencySampleSet { samples, m, band: None })
    }

    /// Evaluates `model` at `iω` for every frequency.
    pub fn from_model(model: &StateSpace, omegas: &[f64]) -> Result<Self> {
        let samples = omegas
            .iter()
            .map(|&omega| {
                Ok(FrequencySample {
                    omega,
                    z: model.eval_transfer(Complex64::new(0.0, omega))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FrequencySampleSet::new(samples)
    }

    pub fn samples(&self) -> &[FrequencySample] {
        &self.samples
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.omega).collect()
    }

    /// Band the set was restricted to, if any.
    pub fn band(&self) -> Option<(f64, f64)> {
        self.band
    }

    /// Samples with `lo ≤ ω ≤ hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let samples: Vec<FrequencySample> = self.samples.iter().filter(|s| s.omega >= lo && s.omega <= hi).cloned().collect();
        if samples.is_empty() {
            return Err(Error::EmptyBand { lo, hi });
        }
        Ok(FrequencySampleSet {
            samples,
            m: self.m,
            band: Some((lo, hi)),
        })
    }

    /// The complement of [`restrict`](Self::restrict); may be empty.
    fn outside(&self, lo: f64, hi: f64) -> Vec<FrequencySample> {
        self.samples.iter().filter(|s| s.omega < lo || s.omega > hi).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// `count` frequencies from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            lo: 0.1,
            hi: 1e3,
            count: 200,
            spacing: Spacing::Log,
        }
    }
}

impl FrequencyGrid {
    pub fn log(lo: f64, hi: f64, count: usize) -> Self {
        FrequencyGrid {
            lo,
            hi,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi && self.count >= 1;
        if !ok || (self.spacing == Spacing::Log && self.lo <= 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid grid {}..{} with {} points",
                self.lo, self.hi, self.count
            )));
        }
        if self.count == 1 {
            return Ok(alloc::vec![self.lo]);
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| {
                let t = k as f64 / last;
                match self.spacing {
                    Spacing::Log => {
                        let (lo, hi) = (Float::log10(self.lo), Float::log10(self.hi));
                        Float::powf(10.0, lo + t * (hi - lo))
                    }
                    Spacing::Linear => self.lo + t * (self.hi - self.lo),
                }
            })
            .collect())
    }
}

/// How the value at infinity is obtained.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum FeedthroughMode {
    Given(RMatrix),
    /// Real part of the sample at the largest frequency.
    #[default]
    EstimateFromTop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub svd_rel_tol: f64,
    pub d_mode: FeedthroughMode,
    pub band: Option<(f64, f64)>,
    pub basis: SvdBasis,
    /// Sampling grid used when a model is sampled for identification.
    pub grid: FrequencyGrid,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            svd_rel_tol: 1e-8,
            d_mode: FeedthroughMode::EstimateFromTop,
            band: None,
            basis: SvdBasis::Loewner,
            grid: FrequencyGrid::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.svd_rel_tol) {
            return Err(Error::InvalidInput(format!("svd_rel_tol must lie in [0, 1), got {}", self.svd_rel_tol)));
        }
        if let Some((lo, hi)) = self.band {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(Error::InvalidInput(format!("band needs lo < hi, got {lo}..{hi}")));
            }
        }
        Ok(())
    }
}

/// Alternating split: the 1st, 3rd, … samples give right data, the 2nd,
/// 4th, … left data, with directions cycling through the unit vectors.
/// Both sides are closed under conjugation. The feedthrough of the returned
/// set is zero; callers supply the actual one. With an odd number of
/// samples the last one is not used.
pub fn split_samples(fs: &FrequencySampleSet) -> Result<TangentialDataSet> {
    let got = fs.len();
    if got < 2 {
        return Err(Error::TooFewSamples { needed: 2, got });
    }
    let m = fs.m();
    let used = got - got % 2;
    let mut rights = Vec::new();
    let mut lefts = Vec::new();
    for (k, s) in fs.samples()[..used].iter().enumerate() {
        let point = Complex64::new(0.0, s.omega);
        let dir = (k / 2) % m;
        if k % 2 == 0 {
            let r = DVector::from_fn(m, |i, _| if i == dir { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
            let w = &s.z * &r;
            rights.push(RightDatum::new(point, r, w));
        } else {
            let ell = RowDVector::from_fn(m, |_, j| if j == dir { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
            let v = &ell * &s.z;
            lefts.push(LeftDatum::new(point, ell, v));
        }
    }
    Ok(TangentialDataSet::new(
        conjugate_closure(&rights),
        conjugate_closure_left(&lefts),
        RMatrix::zeros(m, m),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feedthrough {
    pub d: RMatrix,
    /// Set when the top sample still has a sizable imaginary part.
    pub warning: Option<String>,
}

pub fn estimate_d(fs: &FrequencySampleSet, cfg: &PipelineConfig) -> Result<Feedthrough> {
    let (d, warning) = match &cfg.d_mode {
        FeedthroughMode::Given(d) => {
            if d.shape() != (fs.m(), fs.m()) {
                return Err(Error::Dimension(format!("D is {}x{}, expected {m}x{m}", d.nrows(), d.ncols(), m = fs.m())));
            }
            (d.clone(), None)
        }
        FeedthroughMode::EstimateFromTop => {
            let top = fs.samples().last().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
            let re = real_part(&top.z);
            let im = top.z.map(|z| z.im);
            let warning = (im.norm() > 0.1 * re.norm()).then(|| {
                format!(
                    "imaginary part of Z at the largest frequency ({:.3e}) exceeds 10% of the real part ({:.3e})",
                    im.norm(),
                    re.norm()
                )
            });
            (re, warning)
        }
    };
    if cholesky_upper(&(&d + d.transpose())).is_err() {
        return Err(Error::DNotStrictlyPositiveReal);
    }
    Ok(Feedthrough { d, warning })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerModel {
    pub model: StateSpace,
    /// Descending singular values of the (realified) Loewner matrix.
    pub singular_values: Vec<f64>,
    pub order: usize,
    pub feedthrough: Feedthrough,
}

/// Loewner interpolant of the samples, truncated at `cfg.svd_rel_tol`.
pub fn identify_loewner(fs: &FrequencySampleSet, cfg: &PipelineConfig) -> Result<LoewnerModel> {
    cfg.validate()?;
    let feedthrough = estimate_d(fs, cfg)?;
    let mut ds = split_samples(fs)?;
    ds.d = feedthrough.d.clone();
    let pencil = build_pencil(&ds)?;
    let t = svd_truncate_with(&pencil, &feedthrough.d, cfg.svd_rel_tol, cfg.basis)?;
    Ok(LoewnerModel {
        model: t.model,
        singular_values: t.singular_values,
        order: t.order,
        feedthrough,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub d: RMatrix,
    pub order: usize,
    pub singular_values: Vec<f64>,
    /// Right half-plane spectral zeros used as interpolation points.
    pub zeros: Vec<Complex64>,
    /// Extreme eigenvalue ratio of the realified Pick matrix.
    pub pick_condition: f64,
    /// `max_j ‖Z(λ_j)r_j − w_j‖ / ‖w_j‖` for the constructed model.
    pub max_interpolation_residual: f64,
    pub lambda_min_dissipation: f64,
    pub in_band_error: Option<f64>,
    pub out_of_band_error: Option<f64>,
    pub warnings: Vec<String>,
}

/// Normalized port-Hamiltonian model interpolating the Loewner model at its
/// right half-plane spectral zeros.
pub fn identify_ph(fs: &FrequencySampleSet, cfg: &PipelineConfig) -> Result<(PortHamiltonianForm, Diagnostics)> {
    let lm = identify_loewner(fs, cfg)?;
    let d = lm.feedthrough.d.clone();
    let rights = spectral_data_from_model(&lm.model, lm.order)?;
    let trace = algorithm1_trace(&rights, &d)?;
    let ph_model = reconstruct(&trace.ph);
    let mut residual: f64 = 0.0;
    for datum in &rights {
        let got = ph_model.eval_transfer(datum.lambda)? * &datum.r;
        residual = residual.max((got - &datum.w).norm() / datum.w.norm().max(f64::MIN_POSITIVE));
    }
    let diagnostics = Diagnostics {
        d,
        order: lm.order,
        singular_values: lm.singular_values,
        zeros: rights.iter().map(|r| r.lambda).collect(),
        pick_condition: pick_condition(&real_part(trace.realified.l())),
        max_interpolation_residual: residual,
        lambda_min_dissipation: lambda_min_dissipation(&trace.ph),
        in_band_error: None,
        out_of_band_error: None,
        warnings: lm.feedthrough.warning.into_iter().collect(),
    };
    Ok((trace.ph, diagnostics))
}

/// [`identify_ph`] on the samples inside `cfg.band`. The in-band and
/// out-of-band errors are measured against `reference` when given, else
/// against the samples themselves.
pub fn identify_ph_limited(
    fs: &FrequencySampleSet,
    cfg: &PipelineConfig,
    reference: Option<&StateSpace>,
) -> Result<(PortHamiltonianForm, Diagnostics)> {
    cfg.validate()?;
    let (lo, hi) = cfg.band.ok_or_else(|| Error::InvalidInput("no band configured".into()))?;
    let inside = fs.restrict(lo, hi)?;
    let (ph, mut diag) = identify_ph(&inside, cfg)?;
    let model = reconstruct(&ph);
    let error_on = |samples: &[FrequencySample]| -> Result<Option<f64>> {
        if samples.is_empty() {
            return Ok(None);
        }
        let omegas: Vec<f64> = samples.iter().map(|s| s.omega).collect();
        let err = match reference {
            Some(r) => max_relative_error_between(&model, r, &omegas)?,
            None => max_relative_error(&model, samples)?,
        };
        Ok(Some(err))
    };
    diag.in_band_error = error_on(inside.samples())?;
    diag.out_of_band_error = error_on(&fs.outside(lo, hi))?;
    Ok((ph, diag))
}

/// `max_k ‖Z(iω_k) − Z_k‖_F / ‖Z_k‖_F` over the given samples.
pub fn max_relative_error(model: &StateSpace, samples: &[FrequencySample]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in samples {
        let z = model.eval_transfer(Complex64::new(0.0, s.omega))?;
        worst = worst.max((z - &s.z).norm() / s.z.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Same metric with `reference` evaluated at `omegas` as the truth.
pub fn max_relative_error_between(model: &StateSpace, reference: &StateSpace, omegas: &[f64]) -> Result<f64> {
    let samples = omegas
        .iter()
        .map(|&omega| {
            Ok(FrequencySample {
                omega,
                z: reference.eval_transfer(Complex64::new(0.0, omega))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    max_relative_error(model, &samples)
}
