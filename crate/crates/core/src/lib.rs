//! Workbench for shifts of finite type, sliding block codes, effective
//! subshifts over the Cantor alphabet and symbolic encodings of attractors.
//!
//! Every semi-algorithm takes an explicit budget and either returns a
//! checkable certificate or reports that the budget ran out.

pub mod attractor;
pub mod blockcode;
pub mod budget;
pub mod csp;
pub mod dyadic;
pub mod eds;
pub mod error;
pub mod format;
pub mod multidim;
pub mod onedim;
pub mod patterns;

pub use budget::Budget;
pub use error::{Error, Result};
pub use patterns::{Alphabet, Pattern, SftSpec, Site, SiteBox};
