pub mod decoder;
pub mod io;
pub mod error;
pub mod experiments;
pub mod keys;
pub mod local_search;
pub mod mip;
pub mod perturb;
pub mod pool;
pub mod portfolio;
pub mod search;
pub mod tdtsp;

pub use decoder::{Decoder, FnDecoder};
pub use error::{Result, RkoError};
pub use keys::{EvaluatedSolution, RandomKeyVector};
pub use pool::ElitePool;
