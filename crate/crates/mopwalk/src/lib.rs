pub mod arith;
pub mod band;
pub mod cli;
pub mod error;
pub mod jp;
pub mod markov;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod spectral;
pub mod stepline;
pub mod walk;

pub use error::{Error, Result};
