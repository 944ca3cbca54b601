//! Exact computation of characteristic cycles, relative conormal spaces,
//! polar curves and the normal data of vanishing cycles for hypersurface
//! germs on stratified affine varieties.

pub mod afcheck;
pub mod algebra;
pub mod charcycle;
pub mod conormal;
pub mod corpus;
pub mod cycles;
pub mod error;
pub mod pipeline;
pub mod polar;
pub mod rng;
pub mod vanishing;

pub use error::{Error, Result};
