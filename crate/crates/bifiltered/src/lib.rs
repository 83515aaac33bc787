//! Exact bifiltered cochain complexes over `Z/l^n`, `F_l`, `Z` and `Q`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod complex;
pub mod error;
pub mod filtration;
pub mod fixtures;
#[cfg(feature = "gen")]
pub mod gen;
pub mod linalg;
pub mod matrix;
pub mod monodromy;
pub mod resolution;
pub mod ring;
pub mod subquotient;
pub mod szk;
pub mod special;
pub mod spectral;
pub mod tensor_hom;
pub mod twist;

pub use complex::{BifilteredComplex, Complex, FilteredMorphism};
pub use error::{Error, Result};
pub use filtration::{BifilteredModule, Filtration, Level, Which};
pub use matrix::Matrix;
pub use ring::{Ring, Scalar};
pub use subquotient::{Invariants, ModMorphism, Subquotient};
