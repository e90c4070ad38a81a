use thiserror::Error;

use crate::scalar::{Coeff, Exact, Scalar};
use crate::series::{AutSeries, SeriesError, TailSeries};

use super::{FlowParams, FlowState, Increments};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("observable is not polynomial of degree < {0} along a step direction")]
    DegreeExceeded(usize),
}

/// `a + ε(b − a)` coefficientwise; the time stamp is taken from `a`.
fn along(a: &FlowState<Exact>, b: &FlowState<Exact>, eps: &Exact) -> FlowState<Exact> {
    let mix = |x: &[Exact], y: &[Exact]| -> Vec<Exact> {
        x.iter().zip(y).map(|(p, q)| p.clone() + eps.clone() * (q.clone() - p.clone())).collect()
    };
    let mut out = a.clone();
    out.rho = AutSeries::from_coeffs(mix(a.rho.coeffs(), b.rho.coeffs()));
    let bp = b.processes();
    for (p, q) in out.processes_mut().into_iter().zip(bp) {
        *p = TailSeries::from_coeffs(mix(p.coeffs(), q.coeffs()));
    }
    out
}

/// First and second derivatives at 0 of a polynomial sampled at `ε = 0, 1, …`.
fn derivatives(samples: &[Vec<Exact>]) -> Result<(Vec<Exact>, Vec<Exact>), GeneratorError> {
    let n = samples.len();
    let width = samples.first().map_or(0, Vec::len);
    let mut d1 = Vec::with_capacity(width);
    let mut d2 = Vec::with_capacity(width);
    for o in 0..width {
        let mut a: Vec<Vec<Exact>> =
            (0..n).map(|i| (0..n).map(|j| Exact::from_int(i as i64).pow(j as u32)).collect()).collect();
        let mut y: Vec<Exact> = samples.iter().map(|v| v[o].clone()).collect();
        for c in 0..n {
            let p = a[c][c].inv().expect("Vandermonde pivot");
            for x in a[c].iter_mut() {
                *x = x.clone() * p.clone();
            }
            y[c] = y[c].clone() * p;
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = a[c][j].clone() * f.clone();
                    a[r][j] -= t;
                }
                let t = y[c].clone() * f;
                y[r] -= t;
            }
        }
        if !y[n - 1].is_zero() {
            return Err(GeneratorError::DegreeExceeded(n - 1));
        }
        d1.push(y[1].clone());
        d2.push(y[2].clone() * Exact::from_int(2));
    }
    Ok((d1, d2))
}

/// Exact drift of `f(state)` under one Euler–Maruyama step, per unit time.
///
/// A step is affine in `(dt, dB⁰, …, dβ)`, so `f` restricted to each step
/// direction is a polynomial in the step size and is recovered exactly from
/// `nodes` samples. The drift is the `dt`-derivative plus half the second
/// derivative along each driver times its variance (`κ` for `B⁰`, `τ` else).
pub fn ito_drift(
    s: &FlowState<Exact>,
    params: &FlowParams<Exact>,
    kappa: &Exact,
    nodes: usize,
    f: impl Fn(&FlowState<Exact>) -> Vec<Exact>,
) -> Result<Vec<Exact>, GeneratorError> {
    let nodes = nodes.max(3);
    let sample = |target: &FlowState<Exact>| -> Vec<Vec<Exact>> {
        (0..nodes).map(|e| f(&along(s, target, &Exact::from_int(e as i64)))).collect()
    };
    let drift_dir = s.step(&Exact::one(), &Increments::zero(), params)?;
    let (mut total, _) = derivatives(&sample(&drift_dir))?;
    for i in 0..5 {
        let mut inc = Increments::<Exact>::zero();
        let var = if i == 0 { kappa.clone() } else { params.tau.clone() };
        *[&mut inc.db0, &mut inc.db1, &mut inc.db2, &mut inc.db3, &mut inc.dbeta][i] = Exact::one();
        let dir = s.step(&Exact::zero(), &inc, params)?;
        let (_, d2) = derivatives(&sample(&dir))?;
        let half_var = var * Exact::from_frac(1, 2);
        for (t, x) in total.iter_mut().zip(d2) {
            *t += x * half_var.clone();
        }
    }
    Ok(total)
}
