//! Exact computation of Koszul cohomology groups and graded Betti tables
//! for explicit curve models (rational, odd-degree hyperelliptic, smooth
//! plane), together with verifiers for the gonality-theorem syzygy
//! patterns those tables are predicted to follow.

pub mod curve;
pub mod field;
pub mod job;
pub mod koszul;
pub mod matrix;
pub mod poly;
pub mod rr;
pub mod series;
pub mod suite;
pub mod verify;
