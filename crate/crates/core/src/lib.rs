//! Substitution tilings of the hyperbolic plane lifted to subshifts of
//! finite type on the Baumslag–Solitar groups BS(1,n).

pub mod alphabet;
pub mod analysis;
pub mod checker;
pub mod codec;
pub mod dyadic;
pub mod error;
pub mod group;
pub mod render;
pub mod robinson;
pub mod substitution;
pub mod tiling;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use group::{GroupElement, PhiBox};
pub use substitution::{EigenData, Substitution};
