//! Generative model: scenes, memoryless channels, corruption and transformation.

mod channel;
mod image;
mod law;
mod scene;

pub use channel::{Channel, ChannelModel, ChannelModelSpec, ChannelSpec, JointChannel};
pub use image::{Image, MAX_ALPHABET};
pub use law::{analytic_pixel_joint, channel_analysis, conditional_channel, kl_bits, output_pair_analysis, ChannelAnalysis};
pub use scene::{generate_ensemble, Ensemble, SceneModel, Truth};

pub(crate) use image::common_shape;
pub(crate) use scene::check_pmf;
