//! Numerical machinery for spin alignment problems: majorization with
//! constructive witnesses, unitarily invariant norms, alignment operators and
//! the alignment preorder, classical alignment, two-projector optimality,
//! ordered-product overlap bounds, randomized conjecture searches, and the
//! spectrum-constrained dual program.

pub mod error;
pub mod tensor;
pub mod sample;
pub mod majorization;
pub mod norms;
pub mod alignment;
pub mod classical;
pub mod projectors;
pub mod overlap;
pub mod search;
pub mod dual;

pub use error::{Error, Result};
pub use tensor::{HermitianOperator, SiteLayout, Spectrum, Subset};
