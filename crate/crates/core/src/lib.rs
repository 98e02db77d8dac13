//! Exact toric geometry for smooth complete toric threefolds: intersection
//! theory, line bundle cohomology, Mori cones and extremal contractions, and
//! the analysis of divisors as candidates for superpotential contributions in
//! F-theory compactifications on elliptic Calabi–Yau fourfolds.

pub mod catalog;
pub mod cy4;
pub mod error;
pub mod exactmath;
pub mod mori;
pub mod superpot;
pub mod toric;

pub use error::{Error, Result};
pub use exactmath::{LatticeVector, PolyCone, Rational};
pub use mori::{ContractionInfo, ContractionKind, CurveClass, DivisorialType};
pub use superpot::{BaseReport, DivisorReport, Verdict};
pub use toric::{DivisorClass, Fan, FanDiagnostics, SurfaceDescriptor, SurfaceKind, ToricVariety};
