//! Network layers and parameter containers.

mod dense;
mod lstm;
mod params;

pub use dense::Dense;
pub use lstm::{Forward, Head, LstmNet, LstmState, StateVars};
pub use params::{Bound, ParamSet, Role};
