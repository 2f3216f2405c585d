//! Executable checks of the inequality chain behind the Gaussian heat kernel
//! bounds: elementary inequalities, Caccioppoli estimates, Moser iterations
//! in space-time and in time, the ℓ²-mean value inequality, and Davies'
//! two-point method.
//!
//! Every check returns [`CheckReport`](hklab::CheckReport)s. Conditional
//! statements take a [`Hypothesis`](hypothesis::Hypothesis) and only pass
//! when it is certified. The lab works in `f64` throughout.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod davies;
pub mod elementary;
pub mod hypothesis;
pub mod instances;
pub mod mean_value;
pub mod norms;
pub mod sample;
pub mod statements;
pub mod subsolution;
pub mod suite;
pub mod supersolution;

pub use hypothesis::{Constants, Hypothesis};
pub use sample::{Recipe, SampleKind, SolutionSample};
