//! Scalar math shim: std intrinsics when available, libm otherwise.
#![allow(dead_code)] // feature combinations use different subsets

#[cfg(feature = "std")]
mod imp {
    pub fn abs(x: f64) -> f64 {
        x.abs()
    }
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    pub fn log2(x: f64) -> f64 {
        x.log2()
    }
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
}

#[cfg(not(feature = "std"))]
mod imp {
    pub fn abs(x: f64) -> f64 {
        libm::fabs(x)
    }
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
}

pub(crate) use imp::*;
