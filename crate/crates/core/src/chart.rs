//! Affine charts of `CP^(N-1)` and the Kähler geometry expressed in them.
//!
//! A chart is labeled by a pivot index `p`. A ray `[a^0 : ... : a^(N-1)]` with
//! `a^p != 0` has coordinates `x = (a^i / a^p)` for `i != p`, in ascending `i`.
//! The homogeneous representative `u` of a chart point is `x` with `1` inserted
//! at slot `p`; `N_x = u^dagger u = 1 + Σ|x^i|^2` is the normalization and
//! `K = ln N_x` the Kähler potential.
//!
//! Matrix conventions. Row `j` pairs with the unbarred coordinate `x^j` and
//! column `k` with `conj(x^k)`:
//!
//! ```text
//! g[j][k]      = 2 (δ_jk / N_x - x^j conj(x^k) / N_x^2)
//! ω[j][k]      = (i/2) g[j][k]
//! ω_inv[j][k]  = -i N_x (δ_jk + x^j conj(x^k))
//! ```
//!
//! With this layout `ω · ω_inv = I` exactly, and `g[j][k]` equals
//! `2 ∂²K / ∂conj(x^j) ∂x^k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result, StateVector, C64};

/// Pivot amplitudes below this modulus are not used as divisors.
pub const DEFAULT_PIVOT_FLOOR: f64 = 1e-12;

/// A point of `CP^(N-1)` in the chart with the given pivot.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pivot: usize,
    coords: DVector<C64>,
}

impl ChartPoint {
    pub fn new(pivot: usize, coords: DVector<C64>) -> Result<Self> {
        let dim = coords.len() + 1;
        if pivot >= dim {
            return Err(Error::PivotOutOfRange { pivot, dim });
        }
        if let Some(index) = coords.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self { pivot, coords })
    }

    pub fn from_slice(pivot: usize, coords: &[C64]) -> Result<Self> {
        Self::new(pivot, DVector::from_column_slice(coords))
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.coords
    }

    /// Number of levels `N` of the underlying system.
    pub fn dim(&self) -> usize {
        self.coords.len() + 1
    }

    /// Position in `coords` of homogeneous slot `i`, or `None` for the pivot.
    pub fn coord_index(&self, slot: usize) -> Option<usize> {
        use std::cmp::Ordering::*;
        match slot.cmp(&self.pivot) {
            Less => Some(slot),
            Equal => None,
            Greater => Some(slot - 1),
        }
    }

    /// Homogeneous slot of coordinate `j`.
    pub fn slot_of(&self, j: usize) -> usize {
        if j < self.pivot {
            j
        } else {
            j + 1
        }
    }

    /// `u`: the coordinates with `1` inserted at the pivot slot.
    pub fn homogeneous(&self) -> DVector<C64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| match self.coord_index(i) {
            Some(j) => self.coords[j],
            None => C64::new(1.0, 0.0),
        })
    }

    /// Rebuilds the coordinates of a different pivot from a homogeneous vector
    /// `u` (any nonzero scale).
    pub(crate) fn from_homogeneous(u: &DVector<C64>, pivot: usize, floor: f64) -> Result<Self> {
        let dim = u.len();
        if pivot >= dim {
            return Err(Error::PivotOutOfRange { pivot, dim });
        }
        let divisor = u[pivot];
        if divisor.norm() < floor {
            return Err(Error::ZeroPivot {
                pivot,
                modulus: divisor.norm(),
            });
        }
        let inv = divisor.inv();
        let coords = DVector::from_iterator(
            dim - 1,
            u.iter()
                .enumerate()
                .filter(|&(i, _)| i != pivot)
                .map(|(_, z)| z * inv),
        );
        Self::new(pivot, coords)
    }

    pub fn normalization(&self) -> f64 {
        normalization(self)
    }
}

/// A square complex matrix on the tangent space of a chart; Hermitian for
/// the metric.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm(DMatrix<C64>);

impl HermitianForm {
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn eigenvalues(&self) -> DVector<f64> {
        SymmetricEigen::new(self.0.clone()).eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().min()
    }
}

/// Index of the largest-modulus amplitude; ties go to the lowest index.
pub fn select_pivot(psi: &StateVector) -> usize {
    max_modulus_index(psi.amplitudes())
}

pub(crate) fn max_modulus_index(v: &DVector<C64>) -> usize {
    let mut best = 0;
    let mut best_mod = v[0].norm_sqr();
    for (i, z) in v.iter().enumerate().skip(1) {
        let m = z.norm_sqr();
        if m > best_mod {
            best = i;
            best_mod = m;
        }
    }
    best
}

pub fn to_chart(psi: &StateVector, pivot: usize) -> Result<ChartPoint> {
    to_chart_with_floor(psi, pivot, DEFAULT_PIVOT_FLOOR)
}

pub fn to_chart_with_floor(psi: &StateVector, pivot: usize, floor: f64) -> Result<ChartPoint> {
    ChartPoint::from_homogeneous(psi.amplitudes(), pivot, floor)
}

/// Unit state `u / sqrt(N_x)`; the pivot amplitude is real and positive.
pub fn from_chart(point: &ChartPoint) -> StateVector {
    let u = point.homogeneous();
    let scale = normalization(point).sqrt();
    StateVector::from_raw(u.unscale(scale))
}

/// `N_x = 1 + Σ|x^i|^2`.
pub fn normalization(point: &ChartPoint) -> f64 {
    1.0 + point.coords.norm_squared()
}

/// `K = ln N_x`.
pub fn kahler_potential(point: &ChartPoint) -> f64 {
    normalization(point).ln()
}

fn outer_x_xbar(point: &ChartPoint) -> DMatrix<C64> {
    &point.coords * point.coords.adjoint()
}

pub fn fubini_study_metric(point: &ChartPoint) -> HermitianForm {
    let n = normalization(point);
    let m = point.coords.len();
    let g = (DMatrix::<C64>::identity(m, m).unscale(n) - outer_x_xbar(point).unscale(n * n)) * C64::new(2.0, 0.0);
    HermitianForm(g)
}

/// `ω = (i/2) g`.
pub fn symplectic_form(point: &ChartPoint) -> DMatrix<C64> {
    fubini_study_metric(point).into_matrix() * C64::new(0.0, 0.5)
}

/// `ω_inv = -i N_x (I + x x^dagger)`.
pub fn symplectic_inverse(point: &ChartPoint) -> DMatrix<C64> {
    let n = normalization(point);
    let m = point.coords.len();
    (DMatrix::<C64>::identity(m, m) + outer_x_xbar(point)) * C64::new(0.0, -n)
}

/// `ω_inv · v` without forming the matrix: `-i N_x (v + x (x^dagger v))`.
pub fn apply_symplectic_inverse(point: &ChartPoint, v: &DVector<C64>) -> DVector<C64> {
    let n = normalization(point);
    let xv = point.coords.dotc(v);
    (v + &point.coords * xv) * C64::new(0.0, -n)
}

/// Re-expresses `point` in the chart of `new_pivot`.
pub fn transition(point: &ChartPoint, new_pivot: usize) -> Result<ChartPoint> {
    transition_with_floor(point, new_pivot, DEFAULT_PIVOT_FLOOR)
}

pub fn transition_with_floor(point: &ChartPoint, new_pivot: usize, floor: f64) -> Result<ChartPoint> {
    if new_pivot == point.pivot {
        return Ok(point.clone());
    }
    ChartPoint::from_homogeneous(&point.homogeneous(), new_pivot, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::MaxAbs;
    use crate::sampling::{random_chart_point, random_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real_point(pivot: usize, xs: &[f64]) -> ChartPoint {
        ChartPoint::from_slice(pivot, &xs.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn pivot_selection() {
        let s = StateVector::basis(4, 3);
        assert_eq!(select_pivot(&s), 3);
        let s = StateVector::from_real(&[0.4f64.sqrt(), 0.4f64.sqrt(), 0.0, 0.2f64.sqrt()]).unwrap();
        assert_eq!(select_pivot(&s), 0);
        let s = StateVector::from_real(&[0.5; 4]).unwrap();
        assert_eq!(select_pivot(&s), 0);
    }

    #[test]
    fn to_chart_examples() {
        let s = StateVector::from_real(&[0.25f64.sqrt(); 4]).unwrap();
        let p = to_chart(&s, 3).unwrap();
        for z in p.coords().iter() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        }
        assert!((normalization(&p) - 4.0).abs() < 1e-14);

        let p = to_chart(&StateVector::basis(4, 3), 3).unwrap();
        assert_eq!(p.coords().as_slice(), &[c(0., 0.); 3]);
        assert_eq!(normalization(&p), 1.0);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_real(&[h, 0.0, 0.0, h]).unwrap();
        let p = to_chart(&bell, 3).unwrap();
        assert!((p.coords()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((normalization(&p) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_pivot_rejected() {
        let s = StateVector::basis(4, 0);
        assert!(matches!(to_chart(&s, 3), Err(Error::ZeroPivot { pivot: 3, .. })));
        assert!(matches!(to_chart(&s, 7), Err(Error::PivotOutOfRange { .. })));
    }

    #[test]
    fn from_chart_examples() {
        let s = from_chart(&real_point(3, &[0.0, 0.0, 0.0]));
        assert_eq!(s, StateVector::basis(4, 3));
        let s = from_chart(&real_point(3, &[1.0, 0.0, 0.0]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((s[3] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn potential_and_normalization() {
        for (xs, n) in [([0.0, 0.0, 0.0], 1.0), ([1.0, 1.0, 1.0], 4.0), ([1.0, 0.0, 0.0], 2.0)] {
            let p = real_point(3, &xs);
            assert_eq!(normalization(&p), n);
            assert!((kahler_potential(&p) - f64::ln(n)).abs() < 1e-15);
        }
    }

    #[test]
    fn metric_at_origin_is_twice_identity() {
        let g = fubini_study_metric(&real_point(3, &[0.0; 3]));
        assert_eq!(g.matrix(), &DMatrix::<C64>::identity(3, 3).scale(2.0));
    }

    #[test]
    fn metric_one_dimensional() {
        let x = c(0.3, 0.4);
        let p = ChartPoint::from_slice(1, &[x]).unwrap();
        let want = 2.0 / (1.0 + x.norm_sqr()).powi(2);
        assert!((fubini_study_metric(&p).matrix()[(0, 0)] - c(want, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn symplectic_inverse_examples() {
        let w = symplectic_inverse(&real_point(3, &[0.0; 3]));
        assert_eq!(w, DMatrix::<C64>::identity(3, 3) * c(0.0, -1.0));
        let w = symplectic_inverse(&real_point(3, &[1.0, 0.0, 0.0]));
        assert_eq!(w[(0, 0)], c(0.0, -4.0));
        assert_eq!(w[(1, 1)], c(0.0, -2.0));
        assert_eq!(w[(2, 2)], c(0.0, -2.0));
        assert_eq!(w[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn symplectic_pair_are_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.random_range(2..7);
            let p = random_chart_point(&mut rng, n, 3.0);
            let prod = symplectic_form(&p) * symplectic_inverse(&p);
            let err = (prod - DMatrix::<C64>::identity(n - 1, n - 1)).max_abs();
            assert!(err < 1e-10, "err {err:e}");
            let v = DVector::from_fn(n - 1, |_, _| c(rng.random(), rng.random()));
            let fast = apply_symplectic_inverse(&p, &v);
            assert!((fast - symplectic_inverse(&p) * &v).max_abs() < 1e-12);
        }
    }

    #[test]
    fn metric_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let n = rng.random_range(2..7);
            let p = random_chart_point(&mut rng, n, 10.0);
            let g = fubini_study_metric(&p);
            assert!(crate::operator::hermitian_deviation(g.matrix()) < 1e-12);
            // Spectrum is 2/N_x (multiplicity N-2) and 2/N_x^2 along x.
            let n_x = normalization(&p);
            assert!((g.min_eigenvalue() - 2.0 / (n_x * n_x)).abs() < 1e-12);
            assert!(g.min_eigenvalue() > 1e-12);
        }
    }

    #[test]
    fn round_trip_and_gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let n = rng.random_range(2..9);
            let psi = random_state(&mut rng, n);
            let pivot = select_pivot(&psi);
            let p = to_chart(&psi, pivot).unwrap();
            let back = from_chart(&p);
            assert!(back.fidelity_gap(&psi) < 1e-12);
            let again = to_chart(&back, pivot).unwrap();
            assert!((again.coords() - p.coords()).max_abs() < 1e-12);

            let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let rotated = StateVector::from_raw(psi.amplitudes() * phase);
            let q = to_chart(&rotated, pivot).unwrap();
            assert!((q.coords() - p.coords()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn transition_examples() {
        let p = real_point(3, &[1.0, 0.0, 0.0]);
        let q = transition(&p, 0).unwrap();
        assert_eq!(q.pivot(), 0);
        assert_eq!(q.coords().as_slice(), &[c(0., 0.), c(0., 0.), c(1., 0.)]);
        assert_eq!(transition(&p, 3).unwrap(), p);
        assert!(matches!(transition(&p, 1), Err(Error::ZeroPivot { .. })));
    }

    #[test]
    fn transition_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..1000 {
            let n = rng.random_range(2..7);
            let p = random_chart_point(&mut rng, n, 2.0);
            let u = p.homogeneous();
            let q_pivot = rng.random_range(0..n);
            if u[q_pivot].norm() < 0.2 {
                continue;
            }
            let q = transition(&p, q_pivot).unwrap();
            let via_state = to_chart(&from_chart(&p), q_pivot).unwrap();
            assert!((q.coords() - via_state.coords()).max_abs() < 1e-12);
            let back = transition(&q, p.pivot()).unwrap();
            assert!((back.coords() - p.coords()).max_abs() < 1e-12);
        }
    }
}
