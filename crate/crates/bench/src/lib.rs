//! Fixtures shared by the benchmarks.

use cpflow::chart::{select_pivot, to_chart};
use cpflow::pauli::build_two_qubit_hamiltonian;
use cpflow::{ChartPoint, HermitianOperator, StateVector};

/// The two-qubit model with every coupling switched on, started from
/// `(sqrt 0.4, sqrt 0.4, 0, sqrt 0.2)`.
pub fn two_qubit_fixture() -> (HermitianOperator, StateVector, ChartPoint) {
    let h = build_two_qubit_hamiltonian([1.0; 5]);
    let psi = StateVector::from_real(&[0.4f64.sqrt(), 0.4f64.sqrt(), 0.0, 0.2f64.sqrt()])
        .expect("unit state");
    let point = to_chart(&psi, select_pivot(&psi)).expect("max-modulus pivot");
    (h, psi, point)
}
