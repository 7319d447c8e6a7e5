//! Style-based quantum generative adversarial network.
//!
//! A parameterised quantum circuit whose gate angles are affine functions of
//! a latent vector generates samples as Pauli-Z expectation values. The crate
//! covers simulation (exact, shot-based and noisy), the replicated
//! "parallel" circuit layout, adversarial training against a classical
//! discriminator, data pre/post-processing and the evaluation metrics.

pub mod adversary;
pub mod datapipe;
pub mod error;
pub mod evaluation;
pub mod generator;
pub mod harness;
pub mod registry;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
