//! Constructive kernel for quasi-compact quasi-separated schemes over `QQ` and `GF(p)`.
//!
//! Two presentations of a scheme live side by side: finite affine gluing data
//! read as a locally ringed lattice ([`latscheme`]), and the same data read as
//! a functor on finite test algebras ([`funscheme`]). [`compare`] checks that
//! they agree.

pub mod algebra;
pub mod compare;
pub mod error;
pub mod funscheme;
pub mod latscheme;
pub mod schema;
pub mod sheaf;
pub mod zarlattice;

/// Default bound on numerator-extraction and clearing exponents.
pub const DEFAULT_CAP: u32 = 64;

pub use algebra::{
    make_localization, make_pushout, make_tensor, AlgebraElement, AlgebraMorphism, Field,
    Localization, PresentedAlgebra,
};
pub use error::{Error, Result};
