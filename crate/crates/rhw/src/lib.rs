//! File formats, command-line front end and parallel drivers for the
//! randomized Hull-White library `rhw-core`.

pub mod cli;
pub mod driver;
pub mod io;
