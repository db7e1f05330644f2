//! Exact resolution of singularities for hypersurface germs over ℚ.

pub mod blowup;
pub mod bundled;
pub mod dc_class;
pub mod faa_di_bruno;
pub mod linalg;
pub mod parse;
pub mod resolve;
pub mod series;

pub use series::{Jet, Multiindex, OrderResult, PolyMap, SeriesError};
