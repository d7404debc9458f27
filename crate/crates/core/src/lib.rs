//! Geometry of amplitude-damping noise on the Bloch sphere, and random
//! {H, T, CNOT} circuit experiments measuring how fast damped ensembles
//! approach Haar-like majorization statistics.
//!
//! - [`bloch`]: the renormalized damping map `F_γ`, its Jacobian and the
//!   area factor `Λ(θ; γ)`.
//! - [`quantum`]: dense pure states, density matrices, gates and Kraus maps.
//! - [`circuits`]: seeded circuit sampling and paired noiseless/noisy evolution.
//! - [`majorization`]: cumulants, SDL signatures, Haar references and `D(t)`.
//! - [`experiment`]: configs, ensemble orchestration and CSV/JSON output.

pub mod bloch;
pub mod circuits;
pub mod error;
pub mod experiment;
pub mod majorization;
mod par;
pub mod quantum;
pub mod seed;

pub use error::{Error, Result};
