//! Reference Schrödinger evolution (ħ = 1).
//!
//! Two independent routes are provided: the spectral propagator
//! `V exp(-i Λ t) V^dagger`, exact up to rounding, and a fixed-step classical
//! RK4 integrator that records its norm drift instead of renormalizing.

use nalgebra::{DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, HermitianOperator, Result, C64};

/// Accepted deviation of `‖psi‖` from 1 when constructing a [`StateVector`].
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    /// Wraps `amplitudes`, which must be finite with unit norm within [`NORM_TOL`].
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, NORM_TOL)
    }

    pub fn with_tolerance(amplitudes: DVector<C64>, tol: f64) -> Result<Self> {
        if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        if let Some(index) = amplitudes.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes.unscale(norm)))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&r| C64::new(r, 0.0)),
        ))
    }

    /// Basis state `|index>` of an `n`-level system.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = DVector::zeros(n);
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    /// Wraps without checking the norm. Used for integrator output, where the
    /// drift away from unit norm is itself the quantity of interest.
    pub(crate) fn from_raw(amplitudes: DVector<C64>) -> Self {
        Self(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `1 - |<self|other>|`, a phase-invariant distance between unit states.
    pub fn fidelity_gap(&self, other: &StateVector) -> f64 {
        1.0 - self.inner(other).norm()
    }

    pub fn renormalized(&self) -> Self {
        Self(self.0.unscale(self.0.norm()))
    }
}

impl std::ops::Index<usize> for StateVector {
    type Output = C64;

    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_stride")]
    pub output_stride: usize,
}

fn default_stride() -> usize {
    1
}

impl TimeGrid {
    pub fn new(t_end: f64, dt: f64, output_stride: usize) -> Result<Self> {
        let grid = Self {
            t_end,
            dt,
            output_stride,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidGrid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt > self.t_end {
            return Err(Error::InvalidGrid(format!(
                "dt = {} exceeds t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidGrid("output_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps, `floor(t_end / dt)` with a little slack so that
    /// `10.0 / 1e-3` counts as 10000 steps.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt + 1e-9).floor() as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    /// Step indices that are recorded: every `output_stride`-th step plus the
    /// final one.
    pub fn sampled_steps(&self) -> Vec<usize> {
        let n = self.steps();
        let mut out: Vec<usize> = (0..=n).step_by(self.output_stride).collect();
        if out.last() != Some(&n) {
            out.push(n);
        }
        out
    }

    pub fn is_sampled(&self, step: usize) -> bool {
        step.is_multiple_of(self.output_stride) || step == self.steps()
    }
}

/// `-i H psi`.
pub fn schrodinger_rhs(h: &HermitianOperator, psi: &DVector<C64>) -> Result<DVector<C64>> {
    if h.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.len(),
        });
    }
    Ok(h.apply(psi) * C64::new(0.0, -1.0))
}

/// Eigendecomposition `H = V diag(λ) V^dagger`, reusable across times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: nalgebra::DMatrix<C64>,
}

impl SpectralPropagator {
    pub fn new(h: &HermitianOperator) -> Result<Self> {
        let deviation = crate::operator::hermitian_deviation(h.matrix());
        if deviation > crate::operator::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let eig = SymmetricEigen::new(h.matrix().clone());
        if eig.eigenvalues.iter().any(|v| !v.is_finite())
            || eig.eigenvectors.iter().any(|z| !z.is_finite())
        {
            return Err(Error::Eigen("non-finite eigenpairs".into()));
        }
        Ok(Self {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        if psi0.dim() != self.eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eigenvalues.len(),
                found: psi0.dim(),
            });
        }
        let mut c = self.eigenvectors.ad_mul(psi0.amplitudes());
        for (ck, &lambda) in c.iter_mut().zip(self.eigenvalues.iter()) {
            *ck *= C64::from_polar(1.0, -lambda * t);
        }
        Ok(StateVector::from_raw(&self.eigenvectors * c))
    }
}

/// `exp(-i H t) psi0` through the eigendecomposition of `H`.
pub fn evolve_exact(h: &HermitianOperator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    SpectralPropagator::new(h)?.evolve(psi0, t)
}

#[derive(Debug, Clone)]
pub struct QuantumSample {
    pub step: usize,
    pub time: f64,
    pub state: StateVector,
    /// `| ‖psi‖ - 1 |` at this sample.
    pub norm_drift: f64,
}

#[derive(Debug, Clone, Default)]
pub struct QuantumTrajectory {
    pub samples: Vec<QuantumSample>,
}

impl QuantumTrajectory {
    pub fn max_norm_drift(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_drift).fold(0.0, f64::max)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }
}

/// Samples the spectral propagator on the grid's recorded steps.
pub fn sample_exact(
    h: &HermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<QuantumTrajectory> {
    grid.validate()?;
    let prop = SpectralPropagator::new(h)?;
    let samples = grid
        .sampled_steps()
        .into_iter()
        .map(|step| {
            let time = grid.time(step);
            let state = prop.evolve(psi0, time)?;
            let norm_drift = (state.norm() - 1.0).abs();
            Ok(QuantumSample {
                step,
                time,
                state,
                norm_drift,
            })
        })
        .collect::<Result<_>>()?;
    Ok(QuantumTrajectory { samples })
}

/// Classical fourth-order Runge–Kutta on `-i H psi` with fixed step `grid.dt`.
/// The state is never renormalized.
pub fn evolve_rk4(
    h: &HermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
) -> Result<QuantumTrajectory> {
    grid.validate()?;
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    let dt = grid.dt;
    let mut psi = psi0.amplitudes().clone();
    let mut samples = Vec::with_capacity(grid.steps() / grid.output_stride + 2);
    let record = |step: usize, psi: &DVector<C64>, samples: &mut Vec<QuantumSample>| {
        let state = StateVector::from_raw(psi.clone());
        let norm_drift = (state.norm() - 1.0).abs();
        samples.push(QuantumSample {
            step,
            time: grid.time(step),
            state,
            norm_drift,
        });
    };
    record(0, &psi, &mut samples);
    for step in 1..=grid.steps() {
        let k1 = schrodinger_rhs(h, &psi)?;
        let k2 = schrodinger_rhs(h, &(&psi + k1.scale(0.5 * dt)))?;
        let k3 = schrodinger_rhs(h, &(&psi + k2.scale(0.5 * dt)))?;
        let k4 = schrodinger_rhs(h, &(&psi + k3.scale(dt)))?;
        psi += (k1 + (k2 + k3).scale(2.0) + k4).scale(dt / 6.0);
        if psi.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFiniteStep { step });
        }
        if grid.is_sampled(step) {
            record(step, &psi, &mut samples);
        }
    }
    Ok(QuantumTrajectory { samples })
}
