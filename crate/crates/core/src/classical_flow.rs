//! Hamilton's equations on `CP^(N-1)`.
//!
//! For a Hermitian `H` and chart point `x` with homogeneous vector `u`:
//!
//! ```text
//! D              = u^dagger H u
//! H0             = D / N_x
//! ∂H0/∂conj(x^k) = ((H u)_k N_x - D x^k) / N_x^2
//! dx^j/dt        = Σ_k ω_inv[j][k] ∂H0/∂conj(x^k)
//! ```
//!
//! where `k` runs over non-pivot slots. The flow has `N - 1` complex degrees
//! of freedom; it is integrated with fixed-step RK4, switching charts between
//! steps once the pivot amplitude `1/sqrt(N_x)` falls below a threshold.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::chart::{self, max_modulus_index, normalization, ChartPoint, DEFAULT_PIVOT_FLOOR};
use crate::{Error, HermitianOperator, Result, TimeGrid, C64};

/// Largest imaginary part tolerated in `H0` before it is reported as a bug.
pub const IMAGINARY_ENERGY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowMethod {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSettings {
    /// Switch charts when the pivot amplitude modulus drops below this.
    #[serde(default = "default_threshold")]
    pub switch_threshold: f64,
    #[serde(default)]
    pub method: FlowMethod,
}

fn default_threshold() -> f64 {
    0.6
}

impl Default for FlowSettings {
    fn default() -> Self {
        Self {
            switch_threshold: default_threshold(),
            method: FlowMethod::Rk4,
        }
    }
}

impl FlowSettings {
    pub fn validate(&self) -> Result<()> {
        let t = self.switch_threshold;
        if !(t.is_finite() && t > 0.0 && t < 1.0) {
            return Err(Error::InvalidSettings(format!(
                "switch_threshold must lie in (0, 1), got {t}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalState {
    pub point: ChartPoint,
    pub time: f64,
}

fn check_dims(h: &HermitianOperator, point: &ChartPoint) -> Result<()> {
    if h.dim() != point.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: point.dim(),
        });
    }
    Ok(())
}

/// `(D, H u, u)` for the homogeneous representative `u` of `point`.
fn energy_parts(h: &HermitianOperator, point: &ChartPoint) -> (C64, DVector<C64>, DVector<C64>) {
    let u = point.homogeneous();
    let hu = h.apply(&u);
    let d = u.dotc(&hu);
    (d, hu, u)
}

/// `H0 = <psi|H|psi> = D / N_x`.
pub fn classical_hamiltonian(h: &HermitianOperator, point: &ChartPoint) -> Result<f64> {
    check_dims(h, point)?;
    let (d, _, _) = energy_parts(h, point);
    let h0 = d / normalization(point);
    if h0.im.abs() > IMAGINARY_ENERGY_TOL {
        return Err(Error::ImaginaryEnergy { imag: h0.im });
    }
    Ok(h0.re)
}

/// Wirtinger gradient `∂H0/∂conj(x^k)` in coordinate order.
pub fn grad_conj(h: &HermitianOperator, point: &ChartPoint) -> Result<DVector<C64>> {
    check_dims(h, point)?;
    let (d, hu, _) = energy_parts(h, point);
    let n = normalization(point);
    let n2 = n * n;
    let pivot = point.pivot();
    let coords = point.coords();
    Ok(DVector::from_iterator(
        coords.len(),
        hu.iter()
            .enumerate()
            .filter(|&(i, _)| i != pivot)
            .zip(coords.iter())
            .map(|((_, huk), xk)| (huk * n - d * xk) / n2),
    ))
}

/// `dx/dt = ω_inv · ∂H0/∂conj(x)`.
pub fn hamilton_rhs(h: &HermitianOperator, point: &ChartPoint) -> Result<DVector<C64>> {
    let grad = grad_conj(h, point)?;
    Ok(chart::apply_symplectic_inverse(point, &grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartSwitch {
    pub step: usize,
    pub time: f64,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct ClassicalSample {
    pub step: usize,
    pub state: ClassicalState,
    /// Chart switches performed up to and including this step.
    pub switches_so_far: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ClassicalTrajectory {
    pub samples: Vec<ClassicalSample>,
    pub switches: Vec<ChartSwitch>,
}

impl ClassicalTrajectory {
    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }
}

/// Integrates Hamilton's equations with fixed-step RK4 and chart switching.
pub fn integrate_classical(
    h: &HermitianOperator,
    point0: &ChartPoint,
    grid: &TimeGrid,
    settings: &FlowSettings,
) -> Result<ClassicalTrajectory> {
    integrate_classical_with(h, point0, grid, settings, hamilton_rhs)
}

/// [`integrate_classical`] with a caller-supplied vector field, so harnesses can
/// substitute a deliberately wrong right-hand side.
pub fn integrate_classical_with<F>(
    h: &HermitianOperator,
    point0: &ChartPoint,
    grid: &TimeGrid,
    settings: &FlowSettings,
    rhs: F,
) -> Result<ClassicalTrajectory>
where
    F: Fn(&HermitianOperator, &ChartPoint) -> Result<DVector<C64>>,
{
    grid.validate()?;
    settings.validate()?;
    check_dims(h, point0)?;

    let dt = grid.dt;
    // 1/sqrt(N_x) < threshold  <=>  N_x > 1/threshold^2
    let max_norm = settings.switch_threshold.powi(-2);
    let mut point = point0.clone();
    let mut traj = ClassicalTrajectory::default();
    traj.samples.push(ClassicalSample {
        step: 0,
        state: ClassicalState {
            point: point.clone(),
            time: 0.0,
        },
        switches_so_far: 0,
    });

    let shifted = |p: &ChartPoint, k: &DVector<C64>, scale: f64| -> Result<ChartPoint> {
        ChartPoint::new(p.pivot(), p.coords() + k * C64::new(scale, 0.0))
    };
    let stage = |p: &ChartPoint, step: usize| -> Result<DVector<C64>> {
        let k = rhs(h, p)?;
        if k.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFiniteStep { step });
        }
        Ok(k)
    };

    for step in 1..=grid.steps() {
        let k1 = stage(&point, step)?;
        let k2 = stage(&shifted(&point, &k1, 0.5 * dt).map_err(|_| Error::NonFiniteStep { step })?, step)?;
        let k3 = stage(&shifted(&point, &k2, 0.5 * dt).map_err(|_| Error::NonFiniteStep { step })?, step)?;
        let k4 = stage(&shifted(&point, &k3, dt).map_err(|_| Error::NonFiniteStep { step })?, step)?;
        let incr = (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * C64::new(dt / 6.0, 0.0);
        point = ChartPoint::new(point.pivot(), point.coords() + incr)
            .map_err(|_| Error::NonFiniteStep { step })?;

        if normalization(&point) > max_norm {
            let u = point.homogeneous();
            let best = max_modulus_index(&u);
            if best != point.pivot() {
                let from = point.pivot();
                point = chart::transition_with_floor(&point, best, DEFAULT_PIVOT_FLOOR)
                    .expect("max-modulus slot of a nonzero ray is a valid divisor");
                traj.switches.push(ChartSwitch {
                    step,
                    time: grid.time(step),
                    from,
                    to: best,
                });
            }
        }

        if grid.is_sampled(step) {
            traj.samples.push(ClassicalSample {
                step,
                state: ClassicalState {
                    point: point.clone(),
                    time: grid.time(step),
                },
                switches_so_far: traj.switches.len(),
            });
        }
    }
    Ok(traj)
}
