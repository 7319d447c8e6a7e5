//! Style-based generator: circuit construction, replication, sampling and
//! parameter-shift gradients.

mod ansatz;
mod backend;
mod gradient;
mod latent;
mod params;
mod sampling;

pub use ansatz::{
    build_base_circuit, build_parallel_circuit, style_angle, Binding, Circuit, Entangler, StyleAnsatz,
};
pub use backend::{
    backends, Backend, BackendOptions, BackendRegistry, ExactBackend, SampleMode, ShotBackend,
};
pub use gradient::{angle_derivative, exact_samples, sample_gradient, sample_jacobian, SampleJacobian};
pub use latent::LatentTensor;
pub use params::{params_from_text, params_to_text, ParamVector, LAYOUT_VERSION};
pub use sampling::{generate_samples, generate_with_backend, GeneratedBatch, SampleVector};
