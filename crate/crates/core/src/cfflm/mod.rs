//! Classical Fourier-featured linear models and feature-space projections.

mod eigen;
mod features;
mod model;
mod projection;

pub use eigen::{symmetric_eigen, SymmetricEigen};
pub use features::{FeatureMap, MAX_FEATURES};
pub use model::{ClassicalModel, Projection, CFFLM_VERSION};
pub use projection::{
    jl_dimension, pairwise_distortions, pca_projection, random_projection, second_moment,
    PcaProjection, RandomProjection, JL_CONSTANT,
};
