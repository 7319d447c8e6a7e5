//! Classical discriminator, its autodiff tape, and adversarial training.

mod adam;
mod net;
mod tape;
mod train;

pub use adam::Adam;
pub use net::{default_layers, DiscriminatorNet, LayerSpec, DEFAULT_LEAKY_SLOPE};
pub use tape::{bce_loss, ConvGeometry, Gradients, Tape, Tensor, Var, BCE_CLAMP};
pub use train::{
    discriminator_accuracy, sample_generator, train, train_observed, EpochLoss, LabelConvention, TrainConfig,
    TrainOutcome,
};
