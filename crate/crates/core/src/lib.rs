//! Numerical experiments on Riesz, compact and power compact composition
//! operators `T f = f ∘ φ` for polynomial self-maps of an interval.

pub mod classifier;
pub mod cli;
pub mod dales_davie;
pub mod error;
pub mod gleason_shift;
pub mod linalg;
pub mod operator;
pub mod poly;
pub mod report;
pub mod selfmap;
pub mod spectra;

pub use error::{Error, Result};
pub use poly::{Interval, Poly, SupBracket};
pub use selfmap::PolyMap;
