//! Synthesis of stabilizer (Clifford) operations into short layered circuits.
//!
//! Operations are given as binary symplectic tableaux `[[A,B],[C,D]]` without a
//! sign column. Gates act on the tableau by right multiplication, so the tableau
//! of `g1 g2 ... gm` (in circuit order) is `T(g1)·T(g2)···T(gm)`.

pub mod clifford;
pub mod error;
pub mod f2linalg;
pub mod lnn;
pub mod oracle;
pub mod phasepoly;
pub mod synthesis;

pub use error::{Error, Result};
