use num_complex::Complex64;
use serde::Serialize;

use crate::evolution::DriverBundle;

use super::config::RunConfig;
use super::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub t: f64,
    pub tip_re: f64,
    pub tip_im: f64,
    /// Grid points absorbed into the hull so far.
    pub swallowed: usize,
}

impl TracePoint {
    pub fn tip(&self) -> Complex64 {
        Complex64::new(self.tip_re, self.tip_im)
    }
}

/// Evaluation grid in the upper half plane: `G` columns across `[−X, X]`
/// and `G` rows at heights `X(j+1)/G`.
pub fn trace_grid(cfg: &RunConfig) -> Vec<Complex64> {
    let g = cfg.grid_points;
    let x = cfg.grid_extent.unwrap_or_else(|| (1.5 * ((4.0 + cfg.kappa_f64()) * cfg.t_max).sqrt()).max(0.1));
    let mut pts = Vec::with_capacity(g * g);
    for j in 0..g {
        let y = x * (j + 1) as f64 / g as f64;
        for i in 0..g {
            pts.push(Complex64::new(-x + 2.0 * x * i as f64 / (g - 1) as f64, y));
        }
    }
    pts
}

/// Approximate tip `γ(t) ≈ g_t⁻¹(B⁰_t)`.
///
/// Each grid point follows `w ↦ w + 2dt/w − dB⁰`, the pointwise form of the
/// `ρ` update driven by the same `B⁰` as path 0 of `simulate`. A point is
/// swallowed once `|w| < 2√dt`, `Im w ≤ 0` or `w` stops being finite. The tip
/// is the live grid point with the smallest `|w|`.
pub fn trace(cfg: &RunConfig) -> Result<Vec<TracePoint>, HarnessError> {
    cfg.check_runnable()?;
    let grid = trace_grid(cfg);
    let mut w = grid.clone();
    let mut live = vec![true; grid.len()];
    let mut swallowed = 0;
    let eps = 2.0 * cfg.dt.sqrt();
    let mut drivers = DriverBundle::new(cfg.seed, 0, cfg.kappa_f64(), cfg.tau_f64(), cfg.dt);
    let total = cfg.steps_to(cfg.t_max);
    let mut out = vec![TracePoint { t: 0.0, tip_re: 0.0, tip_im: 0.0, swallowed: 0 }];
    for step in 1..=total {
        let db0 = drivers.next_increments::<Complex64>().db0;
        for (wi, alive) in w.iter_mut().zip(live.iter_mut()) {
            if !*alive {
                continue;
            }
            *wi += 2.0 * cfg.dt / *wi - db0;
            if !(wi.re.is_finite() && wi.im.is_finite()) || wi.norm() < eps || wi.im <= 0.0 {
                *alive = false;
                swallowed += 1;
            }
        }
        if step % cfg.record_every == 0 || step == total {
            let tip = grid
                .iter()
                .zip(&w)
                .zip(&live)
                .filter(|(_, &alive)| alive)
                .min_by(|a, b| a.0 .1.norm().total_cmp(&b.0 .1.norm()))
                .map(|((z, _), _)| *z)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            out.push(TracePoint { t: step as f64 * cfg.dt, tip_re: tip.re, tip_im: tip.im, swallowed });
        }
    }
    Ok(out)
}

pub fn write_trace_csv<W: std::io::Write>(points: &[TracePoint], w: W) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    for p in points {
        out.serialize(p)?;
    }
    out.flush()?;
    Ok(())
}
