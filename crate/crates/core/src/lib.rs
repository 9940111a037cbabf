//! Generalized Weyl quantization on the cylindrical phase space `S^1 x R^1`.
//!
//! The crate builds the restricted (finite-dimensional) quantizer for an
//! arbitrary ordering kernel, maps classical observables `f(Theta, L)` to
//! matrices on `span{|k>}_{k=-N}^{N}`, and derives the angle operator, the
//! Garrison-Wong and Pegg-Barnett phase operators, the phase POV measure and
//! the associated uncertainty checks.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod angle;
pub mod error;
pub mod kernel;
pub mod matrix;
pub mod observable;
pub mod phase;
pub mod quadrature;
pub mod quantizer;
pub mod scalar;
pub mod uncertainty;

pub use error::{Error, Result};
pub use kernel::{HalfInteger, KernelSpec};
pub use matrix::{ComplexMatrix, StateVector};
pub use observable::{ClassicalObservable, PhaseFunction};
pub use phase::{NumberStateVector, PhaseDistribution, PhaseMethod};
pub use quadrature::{Quadrature, QuadratureConfig};
pub use quantizer::QuantizerConfig;
pub use scalar::Real;
pub use uncertainty::UncertaintyReport;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type Matrix = ComplexMatrix<f64>;
pub type State = StateVector<f64>;
pub type Kernel = KernelSpec<f64>;
pub type Observable = ClassicalObservable<f64>;
pub type Phase = PhaseFunction<f64>;
pub type NumberState = NumberStateVector<f64>;
pub type Distribution = PhaseDistribution<f64>;
pub type Config = QuantizerConfig<f64>;
