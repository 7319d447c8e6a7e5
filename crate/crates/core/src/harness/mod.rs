//! Hardware-facing pieces: device profiles, runtime estimates, run
//! configuration, checkpoints and the end-to-end workflows.

mod config;
mod plan;
mod profiles;
mod timing;
mod workflow;

pub use config::{config_hash, Checkpoint, Manifest, ProfileStamp, RunConfig, CHECKPOINT_VERSION};
pub use plan::{estimate_runtime, RunPlan, RuntimeEstimate};
pub use profiles::{builtin_profile, builtin_profiles, DeviceProfile, PROFILE_VERSION};
pub use timing::{timing_models, DepthTiming, SerializedTiming, TimingModel, TimingRegistry};
pub use workflow::{
    generate_physical, noise_sweep, reference_histograms, score_samples, train_pipeline, NoiseSweepRow, PhysicalSamples,
    TrainedModel,
};
