//! Shared numerical primitives: sinc kernels, adaptive quadrature, damped
//! Newton and reproducible random streams.

pub mod newton;
pub mod quadrature;
pub mod random;
pub mod sinc;

pub use newton::{damped_newton, solve_newton, NewtonOptions, NewtonSolution, NewtonSystem};
pub use quadrature::{integrate_1d, integrate_2d, Integral, QuadratureSpec};
pub use random::{derive_seed, RandomStream, RNG_ALGORITHM};
pub use sinc::{sinc2d, sinc_fc, sinc_unit};
