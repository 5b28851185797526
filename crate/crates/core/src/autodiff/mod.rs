//! Minimal reverse-mode automatic differentiation over rank-2 tensors.

mod tape;
mod tensor;

pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;

