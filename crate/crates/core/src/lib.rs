//! Identification of strictly passive LTI systems from frequency-response
//! data, producing normalized port-Hamiltonian realizations.
//!
//! The pipeline interpolates at spectral zeros with mirrored left data so
//! that the Loewner matrix is a Pick matrix; its Cholesky factor turns the
//! interpolant into a normalized port-Hamiltonian model. Imaginary-axis
//! samples are first reduced to a Loewner model whose spectral zeros are
//! then used as interpolation points.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod linalg;
pub mod loewner;
pub mod passivity;
pub mod ph;
pub mod pipeline;
pub mod realify;
pub mod spectral_zeros;
pub mod state_space;
pub mod tangential;
pub mod zoo;

pub use error::{Error, Result};
pub use loewner::{assemble_realization, build_pencil, svd_truncate, LoewnerPencil, SvdBasis, Truncation};
pub use passivity::{check_certificate, kyp_matrix, lambda_min_dissipation, positive_real_sweep, CertificateReport, Verdict};
pub use ph::{algorithm1, extract_ph, from_certificate, normalize_realization, pick_cholesky, reconstruct, PortHamiltonianForm};
pub use pipeline::{identify_loewner, identify_ph, identify_ph_limited, split_samples, estimate_d, FrequencyGrid, FrequencySample, FrequencySampleSet, PipelineConfig, FeedthroughMode};
pub use realify::{build_realifier, realify_pencil, RealifierMap};
pub use spectral_zeros::{compute_spectral_zeros, filter_rhp, spectral_data_from_model, SpectralZeroSet};
pub use state_space::{dof_count, DofKind, DofQuery, ScalarField, StateSpace};
pub use tangential::{conjugate_closure, left_from_spectral, validate, LeftDatum, RightDatum, TangentialDataSet, Violation};
