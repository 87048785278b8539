pub mod complex_gamma;
pub mod error;
pub mod fox_h;
pub mod gamma_sum;
pub mod incomplete_gamma;
pub mod mellin_barnes;
pub mod monte_carlo;
pub mod mrc;
pub mod quadrature;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/contours.md")]
    pub mod contours {}
    #[doc = include_str!("../../../book/src/h_family.md")]
    pub mod h_family {}
    #[doc = include_str!("../../../book/src/gamma_sums.md")]
    pub mod gamma_sums {}
    #[doc = include_str!("../../../book/src/mrc.md")]
    pub mod mrc {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    pub mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
