pub mod boundscheck;
pub mod cli;
pub mod error;
pub mod gammaengine;
pub mod irrat;
pub mod linforms;
pub mod numerics;
pub mod numtheory;
pub mod qlog;
pub mod qpoly;
pub mod series;

pub use error::{Error, Result};
pub use numerics::{HpReal, PrecisionPlan};
