//! Numerical laboratory for the growth and measure theory of transcendental
//! entire functions.
//!
//! The crate is organised around a small catalog of entire functions
//! ([`fncat::FunctionSpec`]) and the measurements built on top of it:
//!
//! * [`fncat`] evaluates the catalog (including Mittag-Leffler functions)
//!   without overflow and estimates maximum modulus and order.
//! * [`schroeder`] linearizes `x ↦ e^{βx}` at its repelling fixed point and
//!   exposes the slowly decaying function `ε = 1/Φ`.
//! * [`tracts`] splits `{|f| > R}` into components on a polar grid and
//!   measures angular profiles, Tsuji integrals and the related inequalities.
//! * [`logvar`] works in logarithmic coordinates `F = log f(exp z)`.
//! * [`measure`] estimates densities of escaping sets on square grids.
//!
//! ```
//! use tractlab::fncat::FunctionSpec;
//! use num_complex::Complex64;
//!
//! let f: FunctionSpec = "ml:1".parse().unwrap();
//! let v = tractlab::fncat::eval(&f, Complex64::new(1.0, 0.0)).unwrap();
//! assert!((v.re - std::f64::consts::E).abs() < 1e-12);
//! ```

pub mod error;
pub mod fncat;
pub mod io;
pub mod logvar;
pub mod measure;
pub mod quadrature;
pub mod schroeder;
pub mod tracts;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/mittag-leffler.md")]
    mod mittag_leffler {}
    #[doc = include_str!("../../../book/src/schroeder.md")]
    mod schroeder {}
    #[doc = include_str!("../../../book/src/tracts.md")]
    mod tracts {}
    #[doc = include_str!("../../../book/src/logvar.md")]
    mod logvar {}
    #[doc = include_str!("../../../book/src/measure.md")]
    mod measure {}
}
