//! Shared fixtures for the kernel benchmarks.

use arcdet_core::numerics::RealContext;
use arcdet_core::symbol::{fourier_coefficients, ArcConfig, SymbolCoefficients};
use arcdet_core::Rational;

pub const BITS: u32 = 256;

pub fn one_cut_half() -> ArcConfig {
    ArcConfig::one_cut(Rational::from((1, 2))).expect("valid config")
}

pub fn odd_r1(eps: (i64, i64)) -> ArcConfig {
    ArcConfig::odd_symmetric(1, Rational::from(eps)).expect("valid config")
}

pub fn coefficients(config: &ArcConfig, n: usize) -> (SymbolCoefficients, RealContext) {
    let ctx = RealContext::new(BITS).expect("valid precision");
    (fourier_coefficients(config, n, &ctx), ctx)
}
