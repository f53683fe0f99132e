//! Precision contexts, exact arithmetic in `Q(a)[s]/(s^2 - 1 - a^2)`,
//! edge-singular quadrature and special constants.

pub mod algebraic;
pub mod context;
pub mod linalg;
pub mod poly;
pub mod quad;
pub mod rational_serde;
pub mod special;

pub use algebraic::{algebraic_eval, algebraic_normalize, AlgebraicElement, RatFunc};
pub use context::{to_decimal, BigComplex, RealContext};
pub use linalg::{least_squares, LsqFit};
pub use poly::Poly;
pub use quad::quad_singular;
pub use special::{
    bernoulli, bernoulli_table, glaisher_log, glaisher_log_euler_maclaurin, ln_factorial, sinc, widom_constant,
    xi_prime_minus_one, zeta_prime_minus_one,
};
