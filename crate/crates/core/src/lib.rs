//! Principal points and self-consistent points for elliptical random
//! elements of a separable Hilbert space, computed in coefficient space.
//!
//! Every element of the space is represented by its coefficients in a fixed
//! orthonormal basis truncated at level `d`. Elliptical elements are built as
//! scale mixtures `V = mu + Z * V1` with `V1` Gaussian. On top of that the crate
//! provides:
//!
//! * simulation and moment laws of elliptical models ([`elliptical`]),
//! * moment estimation and eigenanalysis of the covariance operator ([`covariance`]),
//! * nearest-point quantizers, Lloyd's algorithm, one-dimensional quadrature
//!   principal points and the closed-form two-point solution ([`points`],
//!   [`lloyd`], [`univariate`], [`closed_form`]),
//! * executable structural checks returning data-only reports ([`verify`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command line
//! driver and parallel scheduling live in the `ppoints` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod closed_form;
pub mod covariance;
pub mod elliptical;
mod error;
pub mod function_space;
pub mod linalg;
pub mod lloyd;
pub mod points;
pub mod rng;
pub mod samples;
pub mod simplex;
pub mod special;
pub mod univariate;
pub mod verify;

pub use closed_form::{closed_form_two_points, g_constant, ClosedFormPoints};
pub use covariance::{estimate, principal_angles, trace_tail, CovarianceEstimate, Spectrum};
pub use elliptical::{EllipticalLaw, EllipticalModel, ModelSpec, ScaleMixture};
pub use error::{Error, Result};
pub use function_space::{
    inner_product, make_basis, random_orthogonal, split, truncate, Basis, BasisFamily, BasisSpec,
    HilbertVector, SubspaceSplit,
};
pub use lloyd::{lloyd, Init, LloydOptions, LloydReport};
pub use points::{
    assign, empirical_mse, min_distance, quantizer_variable, self_consistency_residual,
    AttractionAssignment, PointSet,
};
pub use samples::SampleMatrix;
pub use univariate::{univariate_principal_points, UnivariateLaw};
pub use verify::{Status, VerificationReport};
