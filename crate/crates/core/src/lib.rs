//! Simulation and training of recurrent double-critic agents for a hybrid
//! aerial-underwater vehicle navigating a water tank without a map.

pub mod agents;
pub mod autodiff;
pub mod baseline;
pub mod env;
pub mod error;
pub mod harness;
pub mod nn;
pub mod optim;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor64 = autodiff::Tensor<f64>;
pub type Tensor32 = autodiff::Tensor<f32>;
pub type Tape64 = autodiff::Tape<f64>;
pub type ParamSet64 = nn::ParamSet<f64>;
pub type AdamState64 = optim::AdamState<f64>;
