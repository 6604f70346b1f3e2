//! Numerical laboratory for gradient statistics of randomly generated
//! rotation-gate circuits.
//!
//! The pieces, bottom up:
//!
//! * [`matkernel`]: dense complex matrices, tensor products, partial traces,
//!   and the fixed gate dictionary, with qubit 0 as the most significant
//!   tensor factor throughout.
//! * [`circuit`]: the layered circuit IR, Pauli-string observables, seeded
//!   ensemble sampling, and the JSON wire format.
//! * [`simulator`]: state-vector loss evaluation and per-parameter gradients
//!   via two independent routes (parameter shift and a commutator sweep).
//! * [`moments`]: exact and closed-form evaluators for the single-gate
//!   averages E[U†AU] and E[U†AU·B·U†CU], grounded in an equispaced
//!   quadrature oracle that is exact for every integrand in scope.
//! * [`lightcone`]: structural counting of the rotation parameters that can
//!   influence the measured observable.
//! * [`stats`]: streaming Monte Carlo estimation of gradient moments over
//!   circuit ensembles plus closed-form variance predictors.
//! * [`cli`]: the experiment runner behind the `barren-lab` binary.

pub mod circuit;
pub mod cli;
pub mod lightcone;
pub mod matkernel;
pub mod moments;
pub mod scalar;
pub mod simulator;
pub mod stats;

pub use scalar::Scalar;

/// Double-precision complex matrix, the default working type.
pub type CMat = matkernel::ComplexMatrix<f64>;
/// Single-precision complex matrix for callers trading accuracy for footprint.
pub type CMat32 = matkernel::ComplexMatrix<f32>;
/// Double-precision state vector.
pub type State = simulator::StateVector<f64>;
/// Single-precision state vector.
pub type State32 = simulator::StateVector<f32>;
