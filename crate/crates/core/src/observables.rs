//! Observables in both representations.
//!
//! Every quantity has a quantum form, evaluated on a [`StateVector`], and a
//! classical form, evaluated directly on chart coordinates. The two agree
//! through [`from_chart`](crate::chart::from_chart).
//!
//! Two-qubit quantities use the basis order `(a, b, c, d) = (|00>, |01>, |10>, |11>)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chart::{normalization, ChartPoint};
use crate::classical_flow::classical_hamiltonian;
use crate::{Error, HermitianOperator, Result, StateVector};

pub const DEFAULT_SEPARABILITY_EPS: f64 = 1e-8;

/// Observable names accepted in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Populations,
    Z,
    Concurrence,
    Energy,
    Norm,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Populations,
        Observable::Z,
        Observable::Concurrence,
        Observable::Energy,
        Observable::Norm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Populations => "populations",
            Observable::Z => "z",
            Observable::Concurrence => "concurrence",
            Observable::Energy => "energy",
            Observable::Norm => "norm",
        }
    }

    pub fn requires_two_qubits(self) -> bool {
        matches!(self, Observable::Z | Observable::Concurrence)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown observable `{s}`")))
    }
}

fn require_four(dim: usize, observable: &'static str) -> Result<()> {
    if dim != 4 {
        return Err(Error::RequiresTwoQubits { observable, dim });
    }
    Ok(())
}

/// `|a^i|^2`.
pub fn populations_quantum(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes().iter().map(|z| z.norm_sqr()).collect()
}

/// `|x^i|^2 / N_x` off the pivot, `1 / N_x` at the pivot.
pub fn populations_classical(point: &ChartPoint) -> Vec<f64> {
    let n = normalization(point);
    (0..point.dim())
        .map(|slot| match point.coord_index(slot) {
            Some(j) => point.coords()[j].norm_sqr() / n,
            None => 1.0 / n,
        })
        .collect()
}

fn z_from_populations(p: &[f64]) -> f64 {
    p[0] + p[1] - p[2] - p[3]
}

/// `z = |a|^2 + |b|^2 - |c|^2 - |d|^2`.
pub fn quaternionic_z_quantum(psi: &StateVector) -> Result<f64> {
    require_four(psi.dim(), "z")?;
    Ok(z_from_populations(&populations_quantum(psi)))
}

/// Classical `z`; at pivot 3 this is `(|x0|^2 + |x1|^2 - |x2|^2 - 1) / N_x`.
pub fn quaternionic_z_classical(point: &ChartPoint) -> Result<f64> {
    require_four(point.dim(), "z")?;
    Ok(z_from_populations(&populations_classical(point)))
}

/// `C = 2 |ad - bc|`.
pub fn concurrence_quantum(psi: &StateVector) -> Result<f64> {
    require_four(psi.dim(), "concurrence")?;
    let a = psi.amplitudes();
    Ok(2.0 * (a[0] * a[3] - a[1] * a[2]).norm())
}

/// `C = 2 |u0 u3 - u1 u2| / N_x` on the homogeneous vector; at pivot 3 this is
/// `2 |x0 - x1 x2| / N_x`.
pub fn concurrence_classical(point: &ChartPoint) -> Result<f64> {
    require_four(point.dim(), "concurrence")?;
    let u = point.homogeneous();
    Ok(2.0 * (u[0] * u[3] - u[1] * u[2]).norm() / normalization(point))
}

/// Whether `point` lies on the product-state (Segre) locus `CP^1 × CP^1`,
/// detected as vanishing concurrence.
pub fn is_separable(point: &ChartPoint, eps: f64) -> Result<bool> {
    Ok(concurrence_classical(point)? < eps)
}

/// `<psi|H|psi>`.
pub fn energy_quantum(h: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    if h.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    Ok(h.expectation(psi.amplitudes()).re)
}

/// `D / N_x`.
pub fn energy_classical(h: &HermitianOperator, point: &ChartPoint) -> Result<f64> {
    classical_hamiltonian(h, point)
}

/// One row of observable values at a single time.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ObservableSample {
    pub time: f64,
    pub populations: Vec<f64>,
    pub z: Option<f64>,
    pub concurrence: Option<f64>,
    pub energy: f64,
    /// `| ‖psi‖ - 1 |`; zero for chart points, which are unit by construction.
    pub norm_drift: f64,
}

impl ObservableSample {
    pub fn from_state(h: &HermitianOperator, psi: &StateVector, time: f64) -> Result<Self> {
        let two_qubit = psi.dim() == 4;
        Ok(Self {
            time,
            populations: populations_quantum(psi),
            z: two_qubit.then(|| quaternionic_z_quantum(psi)).transpose()?,
            concurrence: two_qubit.then(|| concurrence_quantum(psi)).transpose()?,
            energy: energy_quantum(h, psi)?,
            norm_drift: (psi.norm() - 1.0).abs(),
        })
    }

    pub fn from_point(h: &HermitianOperator, point: &ChartPoint, time: f64) -> Result<Self> {
        let two_qubit = point.dim() == 4;
        Ok(Self {
            time,
            populations: populations_classical(point),
            z: two_qubit.then(|| quaternionic_z_classical(point)).transpose()?,
            concurrence: two_qubit.then(|| concurrence_classical(point)).transpose()?,
            energy: energy_classical(h, point)?,
            norm_drift: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{from_chart, select_pivot, to_chart};
    use crate::sampling::{random_chart_point, random_hermitian, random_product_state, random_state};
    use crate::C64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real_point(pivot: usize, xs: &[f64]) -> ChartPoint {
        ChartPoint::from_slice(pivot, &xs.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
            .unwrap()
    }

    fn fig1_state() -> StateVector {
        StateVector::from_real(&[0.4f64.sqrt(), 0.4f64.sqrt(), 0.0, 0.2f64.sqrt()]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn quantum_populations() {
        let uniform = StateVector::from_real(&[0.5; 4]).unwrap();
        assert!(close(&populations_quantum(&uniform), &[0.25; 4], 1e-15));
        assert_eq!(populations_quantum(&StateVector::basis(4, 3)), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(close(&populations_quantum(&fig1_state()), &[0.4, 0.4, 0.0, 0.2], 1e-15));
    }

    #[test]
    fn classical_populations() {
        assert_eq!(populations_classical(&real_point(3, &[1.0; 3])), vec![0.25; 4]);
        assert_eq!(populations_classical(&real_point(3, &[0.0; 3])), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(populations_classical(&real_point(3, &[1.0, 0.0, 0.0])), vec![0.5, 0.0, 0.0, 0.5]);
        assert_eq!(populations_classical(&real_point(0, &[1.0, 0.0, 0.0])), vec![0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn population_difference_examples() {
        let uniform = StateVector::from_real(&[0.5; 4]).unwrap();
        assert_eq!(quaternionic_z_quantum(&uniform).unwrap(), 0.0);
        assert_eq!(quaternionic_z_quantum(&StateVector::basis(4, 0)).unwrap(), 1.0);
        assert_eq!(quaternionic_z_quantum(&StateVector::basis(4, 3)).unwrap(), -1.0);
        assert_eq!(quaternionic_z_classical(&real_point(3, &[1.0; 3])).unwrap(), 0.0);
        assert_eq!(quaternionic_z_classical(&real_point(3, &[0.0; 3])).unwrap(), -1.0);
        assert!(matches!(
            quaternionic_z_quantum(&StateVector::basis(3, 0)),
            Err(Error::RequiresTwoQubits { .. })
        ));
        assert!(quaternionic_z_classical(&real_point(1, &[0.0; 2])).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        assert!((concurrence_quantum(&bell).unwrap() - 1.0).abs() < 1e-15);
        let uniform = StateVector::from_real(&[0.5; 4]).unwrap();
        assert_eq!(concurrence_quantum(&uniform).unwrap(), 0.0);
        let c = concurrence_quantum(&fig1_state()).unwrap();
        assert!((c - 2.0 * 0.08f64.sqrt()).abs() < 1e-15);
        assert!((c - 0.56569).abs() < 1e-5);

        assert_eq!(concurrence_classical(&real_point(3, &[1.0, 0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(concurrence_classical(&real_point(3, &[1.0; 3])).unwrap(), 0.0);
        assert!(concurrence_quantum(&StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn separability() {
        let eps = DEFAULT_SEPARABILITY_EPS;
        assert!(is_separable(&real_point(3, &[1.0; 3]), eps).unwrap());
        assert!(!is_separable(&real_point(3, &[1.0, 0.0, 0.0]), eps).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let psi = random_product_state(&mut rng);
            let p = to_chart(&psi, select_pivot(&psi)).unwrap();
            assert!(is_separable(&p, eps).unwrap());
        }
    }

    #[test]
    fn energy_examples() {
        let id = HermitianOperator::identity(4).unwrap();
        let uniform = StateVector::from_real(&[0.5; 4]).unwrap();
        assert!((energy_quantum(&id, &uniform).unwrap() - 1.0).abs() < 1e-15);
        let zi = HermitianOperator::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]).unwrap();
        assert_eq!(energy_quantum(&zi, &uniform).unwrap(), 0.0);
        assert!(energy_quantum(&zi, &StateVector::basis(2, 0)).is_err());
    }

    #[test]
    fn representations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..2000 {
            let p = random_chart_point(&mut rng, 4, 4.0);
            let h = random_hermitian(&mut rng, 4, 2.0);
            let psi = from_chart(&p);
            assert!(close(&populations_classical(&p), &populations_quantum(&psi), 1e-12));
            let dz = quaternionic_z_classical(&p).unwrap() - quaternionic_z_quantum(&psi).unwrap();
            assert!(dz.abs() < 1e-12);
            let dc = concurrence_classical(&p).unwrap() - concurrence_quantum(&psi).unwrap();
            assert!(dc.abs() < 1e-12);
            let de = energy_classical(&h, &p).unwrap() - energy_quantum(&h, &psi).unwrap();
            assert!(de.abs() < 1e-12);
        }
    }

    #[test]
    fn bounds_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..2000 {
            let psi = random_state(&mut rng, 4);
            let c = concurrence_quantum(&psi).unwrap();
            assert!((0.0..=1.0 + 1e-9).contains(&c));
            assert!(quaternionic_z_quantum(&psi).unwrap().abs() <= 1.0 + 1e-9);
            let sum: f64 = populations_quantum(&psi).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn observable_names_round_trip() {
        for o in Observable::ALL {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        assert!("entropy".parse::<Observable>().is_err());
    }
}
