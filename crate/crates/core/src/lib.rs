pub mod convex;
pub mod models;
pub mod report;
pub mod audit;
pub mod cli;
pub mod error;
pub mod groups;
pub mod kernel;
pub mod lp;
pub mod tolerance;

pub use error::{GptError, Result};
pub use tolerance::Tolerance;
