pub mod error;
pub mod qlaurent;
pub mod repcore;
pub mod root_system;
pub mod spectral;
pub mod twisted_trace;
pub mod verify;
pub mod weight_oracle;

pub use error::{Error, Result};
