//! Exact classical dynamics for N-level quantum systems.
//!
//! A pure state of an N-level system is a ray in `C^N`, i.e. a point of the
//! complex projective space `CP^(N-1)`. In an affine chart the ray is described
//! by N-1 complex ratios `x^j = a^j / a^p` against a pivot amplitude `a^p`.
//! The expectation value `H0 = <psi|H|psi>` written in those coordinates,
//! together with the inverse symplectic form of the Fubini–Study geometry,
//! generates a classical Hamiltonian flow whose trajectories coincide with
//! Schrödinger evolution.
//!
//! Modules:
//!
//! * [`pauli`]: Hermitian operators built from Pauli tensor-product terms.
//! * [`quantum`]: reference Schrödinger evolution (spectral propagator, RK4).
//! * [`chart`]: chart coordinates, Kähler potential, metric, symplectic form.
//! * [`classical_flow`]: `H0`, its conjugate gradient, Hamilton's equations and
//!   a chart-switching integrator.
//! * [`observables`]: populations, population difference, concurrence, energy.
//! * [`scenario`]: declarative run files, CSV output and comparison reports.

pub mod chart;
pub mod classical_flow;
mod error;
pub mod observables;
pub mod operator;
pub mod pauli;
pub mod quantum;
pub mod sampling;
pub mod scenario;

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub use chart::{ChartPoint, HermitianForm};
pub use classical_flow::{ClassicalState, ClassicalTrajectory, FlowSettings};
pub use error::{Error, ErrorKind, Result};
pub use operator::HermitianOperator;
pub use pauli::{PauliLabel, PauliTerm};
pub use quantum::{QuantumTrajectory, StateVector, TimeGrid};
pub use scenario::{ComparisonReport, Method, ScenarioConfig};
