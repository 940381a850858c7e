pub mod cell;
pub mod error;
pub mod es;
pub mod experiments;
pub mod harness;
pub mod io;
pub mod network;
pub mod reference;
pub mod scalar;
pub mod seed;
pub mod tmaze;

pub use cell::{BatchWorkspace, Chromosome, EnuDims, EnuParams, EnuState, Gate, Genome, Noise, StateBatch};
pub use error::{Error, Result};
pub use scalar::Scalar;
