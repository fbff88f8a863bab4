//! Capacity per unit-cost of the bandlimited Gaussian channel with one-bit
//! output quantization, at slot-rate and double-rate sampling.
//!
//! The crate is organized around one chain of evidence:
//!
//! * [`gaussmath`] - exact special functions, orthant probabilities, and
//!   adaptive-quadrature CCDF oracles for standardized Gaussian vectors;
//! * [`expansion`] - first-order expansions of shifted CCDFs with explicit
//!   remainder envelopes, validated against the oracles;
//! * [`waveform`] - bandlimited unit-energy pulse families, feature
//!   extraction, and the boundary parameterization of the feasible set;
//! * [`bound`] - the joint sign-pattern law, posteriors, the mutual-
//!   information expansion, the achievable-rate functional and its scalar
//!   optimization, plus baseline capacities;
//! * [`simulate`] - exact enumeration of the ISI-truncated law and a Monte
//!   Carlo simulator that must converge to it.

pub mod bound;
pub mod error;
pub mod expansion;
pub mod gaussmath;
pub mod quad;
pub mod simulate;
pub mod waveform;

pub use bound::{Pattern, RateSlope, TripleLaw};
pub use error::{Error, Result};
pub use expansion::{ExpansionResult, OffsetSpec};
pub use gaussmath::{Corr2, Corr3};
pub use quad::QuadratureSettings;
pub use simulate::{EmpiricalJoint, Sampling, SimConfig, SlopeFit};
pub use waveform::{ChannelParams, Features, Pulse, PulseFamily};
