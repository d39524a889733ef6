//! Support library for the `sylvester` binary: the instance file format,
//! solver drivers with CSV reporting, and SVG rendering of planar
//! instances. Kept as a library so the pieces stay testable without
//! spawning the binary.

pub mod driver;
pub mod format;
pub mod svg;
