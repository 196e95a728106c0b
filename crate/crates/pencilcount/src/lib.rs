//! Exact counts of rational curves through points on the quadric surface and in
//! projective 3-space, real and complex, via marked floor diagrams.

pub mod cache;
pub mod canon;
pub mod convention;
pub mod diagram;
pub mod error;
pub mod invariants;
pub mod marking;
pub mod par;
pub mod scan;
pub mod verify;

pub use convention::{Convention, PairScope, SigmaRule};
pub use diagram::{enumerate_diagrams, Bidegree, FloorDiagram};
pub use error::{Error, Result};
pub use invariants::{Calculator, Engine};
