//! Sparse network influence regression.
//!
//! Identifies the nodes of a directed follower network whose responses
//! drive the responses of their followers, under the model
//! `Y = mu + A diag(rho) Y + eps` with a sparse coefficient vector `rho`.

pub mod baselines;
pub mod error;
pub mod ext;
pub mod netcore;
pub mod seeding;
pub mod simlab;
pub mod snir;

pub use error::{Error, Result};
pub use netcore::DirectedGraph;
pub use snir::{fit, fit_adjusted, FitConfig, FitResult, ScreenConfig, SelectionPath};
