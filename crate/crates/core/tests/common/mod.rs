//! Independent oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls the library's geometry or flow routines; each function
//! recomputes its quantity from first principles so that agreement is
//! evidence rather than tautology.

#![allow(dead_code)]

use cpflow::{ChartPoint, DMatrix, DVector, HermitianOperator, C64};

pub const FD_STEP: f64 = 1e-5;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs<'a>(it: impl IntoIterator<Item = &'a C64>) -> f64 {
    it.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Displacement of coordinate `j` along its real (`part = 0`) or imaginary
/// (`part = 1`) axis.
fn unit(m: usize, var: usize) -> DVector<C64> {
    let mut e = DVector::zeros(m);
    e[var / 2] = if var.is_multiple_of(2) { c(1.0, 0.0) } else { c(0.0, 1.0) };
    e
}

/// `K(x + d) - K(x)` for `K = ln(1 + |x|^2)`, evaluated as
/// `ln_1p((2 Re<x, d> + |d|^2) / N_x)` so that differences of nearby points
/// keep full relative precision.
fn kahler_delta(x: &DVector<C64>, d: &DVector<C64>) -> f64 {
    let n = 1.0 + x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let cross: f64 = x.iter().zip(d.iter()).map(|(a, b)| 2.0 * (a.conj() * b).re).sum();
    let dd: f64 = d.iter().map(|z| z.norm_sqr()).sum();
    ((cross + dd) / n).ln_1p()
}

/// Real Hessian of `K` over the `2m` real coordinates `(Re x0, Im x0, Re x1, ...)`
/// by central differences.
fn kahler_real_hessian(x: &DVector<C64>, h: f64) -> DMatrix<f64> {
    let m = x.len();
    let dim = 2 * m;
    let mut hess = DMatrix::zeros(dim, dim);
    for p in 0..dim {
        let ep = unit(m, p) * c(h, 0.0);
        hess[(p, p)] = (kahler_delta(x, &ep) + kahler_delta(x, &(-&ep))) / (h * h);
        for q in (p + 1)..dim {
            let eq = unit(m, q) * c(h, 0.0);
            let v = (kahler_delta(x, &(&ep + &eq)) - kahler_delta(x, &(&ep - &eq))
                - kahler_delta(x, &(&eq - &ep))
                + kahler_delta(x, &(-&ep - &eq)))
                / (4.0 * h * h);
            hess[(p, q)] = v;
            hess[(q, p)] = v;
        }
    }
    hess
}

/// `2 ∂²K / ∂conj(x^j) ∂x^k` from finite differences, laid out `[j][k]`.
pub fn fd_metric(x: &DVector<C64>, h: f64) -> DMatrix<C64> {
    let m = x.len();
    let r = kahler_real_hessian(x, h);
    DMatrix::from_fn(m, m, |j, k| {
        let (aj, bj, ak, bk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        // ∂_{conj x_j} = (∂_a + i∂_b)/2,  ∂_{x_k} = (∂_a - i∂_b)/2
        let re = r[(aj, ak)] + r[(bj, bk)];
        let im = r[(bj, ak)] - r[(aj, bk)];
        c(re, im) * 0.5
    })
}

/// `<psi|H|psi>` straight from the homogeneous vector of a chart point.
pub fn expectation_direct(h: &HermitianOperator, pivot: usize, coords: &DVector<C64>) -> f64 {
    let n = coords.len() + 1;
    let mut u = DVector::zeros(n);
    let mut j = 0;
    for i in 0..n {
        if i == pivot {
            u[i] = c(1.0, 0.0);
        } else {
            u[i] = coords[j];
            j += 1;
        }
    }
    let hu = h.matrix() * &u;
    (u.dotc(&hu) / u.dotc(&u)).re
}

/// `∂H0/∂conj(x^k) = (∂_a + i ∂_b) H0 / 2` by central differences.
pub fn fd_grad_conj(h: &HermitianOperator, point: &ChartPoint, step: f64) -> DVector<C64> {
    let x = point.coords();
    let m = x.len();
    let f = |d: &DVector<C64>| expectation_direct(h, point.pivot(), &(x + d));
    DVector::from_fn(m, |k, _| {
        let ea = unit(m, 2 * k) * c(step, 0.0);
        let eb = unit(m, 2 * k + 1) * c(step, 0.0);
        let da = (f(&ea) - f(&(-&ea))) / (2.0 * step);
        let db = (f(&eb) - f(&(-&eb))) / (2.0 * step);
        c(da, db) * 0.5
    })
}

/// The two-qubit model in the pivot-3 chart, transcribed term by term:
/// `D = N_x H0`, the three conjugate derivatives, and the three Hamilton
/// equations with their `(1 + x^j conj(x^j))`, `x^j conj(x^k)` prefactors.
pub mod two_qubit_transcription {
    use super::c;
    use cpflow::C64;

    pub struct Eval {
        pub d: C64,
        pub grad: [C64; 3],
        pub xdot: [C64; 3],
    }

    pub fn eval(k: [f64; 5], x: [C64; 3]) -> Eval {
        let i = c(0.0, 1.0);
        let [c1, c2, c3, c4, c5] = k.map(|v| c(v, 0.0));
        let [x0, x1, x2] = x;
        let (b0, b1, b2) = (x0.conj(), x1.conj(), x2.conj());
        let nn = c(1.0 + x0.norm_sqr() + x1.norm_sqr() + x2.norm_sqr(), 0.0);

        let d = c1 * (x0 * b0 + x1 * b1 - x2 * b2 - 1.0)
            + c2 * (x2 * b0 + b1 + b2 * x0 + x1)
            + i * c3 * (-x2 * b0 - b1 + b2 * x0 + x1)
            + c4 * (-b0 + x2 * b1 + x1 * b2 - x0)
            + i * c5 * (-b0 + x2 * b1 - x1 * b2 + x0);

        let n2 = nn * nn;
        let g0 = ((c1 * x0 + c2 * x2 - i * c3 * x2 - c4 - i * c5) * nn - d * x0) / n2;
        let g1 = ((c1 * x1 + c2 - i * c3 + c4 * x2 + i * c5 * x2) * nn - d * x1) / n2;
        let g2 = ((-c1 * x2 + c2 * x0 + i * c3 * x0 + c4 * x1 - i * c5 * x1) * nn - d * x2) / n2;

        let one = c(1.0, 0.0);
        let pre = -i * nn;
        let xd0 = pre * ((one + x0 * b0) * g0 + x0 * b1 * g1 + x0 * b2 * g2);
        let xd1 = pre * (x1 * b0 * g0 + (one + x1 * b1) * g1 + x1 * b2 * g2);
        let xd2 = pre * (x2 * b0 * g0 + x2 * b1 * g1 + (one + x2 * b2) * g2);

        Eval {
            d,
            grad: [g0, g1, g2],
            xdot: [xd0, xd1, xd2],
        }
    }
}

/// Sign changes in a sampled series, skipping exact zeros.
pub fn zero_crossings(values: impl IntoIterator<Item = f64>) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

pub fn scenario_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}
