//! Joint clustering and registration of discrete-alphabet images corrupted by
//! memoryless channels and unknown group transforms.

pub mod analysis;
pub mod blockwise;
pub mod clustering;
pub mod error;
pub mod info;
pub mod model;
pub mod registration;
pub mod search;
pub mod seed;
pub mod transform;

pub use error::{Error, Result};
pub use info::{EntropyProfile, JointHistogram, JointPmf, Partition};
pub use model::{Channel, ChannelModel, Ensemble, Image, JointChannel, SceneModel};
pub use transform::{GroupSpec, Transform, TransformGroup};
