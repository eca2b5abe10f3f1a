//! Simulator of a four-particle Bell test driven by Aharonov-Casher phases.
//!
//! Two singlet pairs are emitted at sources `C` and `D`; their members meet
//! pairwise at `A` and `B` after travelling around an impenetrable line
//! charge. The crate maps the planar layout to phases ([`geometry`]),
//! evolves the four-spin state ([`spin`]) and evaluates joint
//! probabilities, correlations and the CHSH sum ([`engine`]). The
//! [`cli`] module drives everything from a JSON configuration.

pub mod cli;
pub mod engine;
pub mod geometry;
pub mod spin;
