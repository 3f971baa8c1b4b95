//! Log-weighted quadrature domains.
//!
//! Domains Ω with ∫_Ω f(w)|w|⁻² dA(w) = ∮_{∂Ω} f(w) h(w) dw for all admissible
//! analytic f, built from exponential-of-rational Riemann maps and checked
//! numerically. Area measure is normalized (dA = dx dy / π) and contour
//! integrals carry the factor 1/(2πi).

pub mod cli;
pub mod complexpoly;
pub mod contour;
pub mod error;
pub mod faber;
pub mod lqd;
pub mod maps;
pub mod quad;
pub mod series;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
