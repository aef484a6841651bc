//! Random operators, states and chart points for tests and benchmarks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{ChartPoint, HermitianOperator, StateVector, C64};

/// Hermitian `n`×`n` matrix with real diagonal and off-diagonal real and
/// imaginary parts drawn uniformly from `[-scale, scale]`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> HermitianOperator {
    let mut m = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = C64::new(rng.random_range(-scale..=scale), 0.0);
        for k in (j + 1)..n {
            let z = C64::new(rng.random_range(-scale..=scale), rng.random_range(-scale..=scale));
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
        }
    }
    HermitianOperator::new(m).expect("constructed Hermitian")
}

/// Unit vector drawn from the unitarily invariant distribution.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector {
    loop {
        let v = DVector::from_fn(n, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        if v.norm() > 1e-6 {
            return StateVector::normalized(v).expect("finite nonzero vector");
        }
    }
}

/// Chart point for an `n`-level system whose coordinates are drawn uniformly
/// from the disc `|x| <= radius`.
pub fn random_chart_point<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> ChartPoint {
    let pivot = rng.random_range(0..n);
    let coords = DVector::from_fn(n - 1, |_, _| {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        C64::from_polar(r, theta)
    });
    ChartPoint::new(pivot, coords).expect("finite coordinates")
}

/// `(alpha, beta) ⊗ (gamma, delta)` for two random single-qubit states.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    let q0 = random_state(rng, 2);
    let q1 = random_state(rng, 2);
    StateVector::normalized(q0.amplitudes().kronecker(q1.amplitudes()))
        .expect("product of unit vectors")
}
