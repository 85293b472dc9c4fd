//! Self-similar groups generated by finite Mealy automata and their
//! representations by automatic matrices over F_p.

pub mod automatic;
pub mod error;
pub mod fp;
pub mod mealy;
pub mod recursion;
pub mod render;
pub mod sequences;
pub mod series;
pub mod triangular;

pub use automatic::AutoMatrix;
pub use error::{Error, Result};
pub use fp::{Field, Fp, FpMatrix, IntMatrix, ReducedPoly};
pub use mealy::{Element, Group, MealyMachine, StateId};
pub use recursion::{GroupRingElem, MarkedBasis};
pub use series::{FpSeries, TSPoly};
pub use triangular::{AlphaSequence, Tableau};
