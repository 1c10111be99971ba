//! Truncated free associative and free Lie algebra arithmetic over the
//! rationals, the multilinear Campbell–Baker–Hausdorff map, the Le–Murakami
//! expansion of the Knizhnik–Zamolodchikov associator, and numeric holonomy
//! routines used to cross-check them.

pub mod cbh;
pub mod coeff;
pub mod error;
pub mod holonomy;
pub mod lemurakami;
pub mod lie;
mod linalg;
mod memo;
pub mod mzv;
pub mod quadrature;
pub mod serial;
pub mod series;
pub mod verify;
pub mod word;

pub use coeff::{Coefficient, Q};
pub use error::{Error, Result};
pub use lie::{LieElement, LyndonWord, PbwMonomial};
pub use series::{NumericSeries, Series, TensorSeries};
pub use word::Word;
