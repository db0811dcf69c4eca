//! Scalar float math that works both with and without `std`.
//!
//! Inherent `f64` methods like `sqrt` live in `std`, not `core`; in `no_std`
//! builds the same operations come from `libm`.

#[cfg(any(feature = "std", test))]
mod imp {
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    pub fn powi(x: f64, n: i32) -> f64 {
        x.powi(n)
    }
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    pub fn log2(x: f64) -> f64 {
        x.log2()
    }
    pub fn exp2(x: f64) -> f64 {
        x.exp2()
    }
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
}

#[cfg(not(any(feature = "std", test)))]
mod imp {
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    pub fn powi(x: f64, n: i32) -> f64 {
        libm::pow(x, n as f64)
    }
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }
    pub fn exp2(x: f64) -> f64 {
        libm::exp2(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
}

pub use imp::{abs, cos, exp2, ln, log2, powf, powi, sin, sqrt};

pub const PI: f64 = core::f64::consts::PI;
pub const FRAC_PI_2: f64 = core::f64::consts::FRAC_PI_2;
pub const LN_2: f64 = core::f64::consts::LN_2;
