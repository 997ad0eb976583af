pub mod error;
pub mod geometry;
pub mod symbolic;
pub mod curves;
pub mod piecewise;
pub mod io;
