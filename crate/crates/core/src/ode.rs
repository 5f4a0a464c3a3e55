//! Adaptive Dormand–Prince 5(4) integrator on flat complex state vectors.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size (ns); `None` leaves it free.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    /// Tolerances for pure-state propagation.
    pub fn pure() -> Self {
        Self { rtol: 1e-9, atol: 1e-11, h_max: None, max_steps: 50_000_000 }
    }

    /// Tolerances for density-matrix propagation.
    pub fn master() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, h_max: None, max_steps: 50_000_000 }
    }

    pub fn with_rtol(mut self, rtol: f64) -> Self {
        self.atol *= rtol / self.rtol;
        self.rtol = rtol;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest scaled local error estimate of an accepted step.
    pub max_error: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Reusable integrator state. The step size carries over between calls to
/// [`Dopri5::advance`], so a run split at schedule breakpoints stays cheap.
pub struct Dopri5 {
    pub opts: OdeOptions,
    pub stats: OdeStats,
    h: Option<f64>,
    k: [Vec<C64>; 7],
    ytmp: Vec<C64>,
    ynew: Vec<C64>,
}

impl Dopri5 {
    pub fn new(dim: usize, opts: OdeOptions) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self {
            opts,
            stats: OdeStats::default(),
            h: None,
            k: std::array::from_fn(|_| z.clone()),
            ytmp: z.clone(),
            ynew: z,
        }
    }

    /// Integrate y' = f(t, y) from t0 to t1 in place.
    pub fn advance<F>(&mut self, f: &mut F, t0: f64, t1: f64, y: &mut [C64]) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        if span < 0.0 {
            return Err(Error::Numeric(format!("backward integration from {t0} to {t1}")));
        }
        let n = y.len();
        let opts = self.opts;
        let h_max = opts.h_max.unwrap_or(span).min(span);
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let ytmp = &mut self.ytmp;
        let ynew = &mut self.ynew;

        f(t0, y, k1);
        self.stats.evaluations += 1;
        let mut h = match self.h {
            Some(h) => h.min(h_max),
            None => initial_step(y, k1, span, &opts),
        };
        let mut t = t0;
        let mut steps = 0usize;
        let mut last_ratio: f64 = 1e-4;
        while t < t1 {
            if steps >= opts.max_steps {
                return Err(Error::StiffFailure { t, step: h, steps });
            }
            let mut last = false;
            if t + h >= t1 || t1 - (t + h) < 1e-12 * span {
                h = t1 - t;
                last = true;
            }
            if h <= 1e-14 * span.max(t.abs()) {
                return Err(Error::StiffFailure { t, step: h, steps });
            }
            let hc = C64::new(h, 0.0);
            for i in 0..n {
                ytmp[i] = y[i] + hc * (A21 * k1[i]);
            }
            f(t + C2 * h, ytmp, k2);
            for i in 0..n {
                ytmp[i] = y[i] + hc * (A31 * k1[i] + A32 * k2[i]);
            }
            f(t + C3 * h, ytmp, k3);
            for i in 0..n {
                ytmp[i] = y[i] + hc * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            f(t + C4 * h, ytmp, k4);
            for i in 0..n {
                ytmp[i] = y[i] + hc * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            f(t + C5 * h, ytmp, k5);
            for i in 0..n {
                ytmp[i] = y[i]
                    + hc * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let t_new = if last { t1 } else { t + h };
            f(t_new, ytmp, k6);
            for i in 0..n {
                ynew[i] = y[i] + hc * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            f(t_new, ynew, k7);
            self.stats.evaluations += 6;

            let mut acc = 0.0;
            for i in 0..n {
                let e = hc * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                acc += (e.norm() / sc).powi(2);
            }
            let err = (acc / n.max(1) as f64).sqrt();
            steps += 1;
            if err <= 1.0 {
                // PI controller (Hairer & Wanner, beta = 0.04)
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.7 / 5.0) * last_ratio.powf(0.04)).clamp(0.2, 5.0)
                };
                last_ratio = err.max(1e-4);
                y.copy_from_slice(ynew);
                std::mem::swap(k1, k7);
                t = t_new;
                self.stats.accepted += 1;
                self.stats.max_error = self.stats.max_error.max(err);
                if !last {
                    h = (h * fac).min(h_max);
                    self.h = Some(h);
                }
            } else {
                self.stats.rejected += 1;
                let fac = (0.9 * err.powf(-1.0 / 5.0)).clamp(0.2, 1.0);
                h *= fac;
                self.h = Some(h);
            }
            if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Numeric(format!("non-finite state at t = {t}")));
            }
        }
        Ok(())
    }
}

fn initial_step(y: &[C64], dy: &[C64], span: f64, opts: &OdeOptions) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (a, b) in y.iter().zip(dy) {
        let sc = opts.atol + opts.rtol * a.norm();
        d0 += (a.norm() / sc).powi(2);
        d1 += (b.norm() / sc).powi(2);
    }
    let h = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6 * span
    } else {
        0.01 * (d0 / d1).sqrt()
    };
    h.min(span).max(1e-12 * span)
}

/// Integrate y' = f(t, y) over consecutive breakpoints, invoking `observe`
/// at every breakpoint (including the first).
pub fn integrate_piecewise<F, O>(
    f: &mut F,
    breakpoints: &[f64],
    y: &mut [C64],
    opts: OdeOptions,
    mut observe: O,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]),
{
    let mut ode = Dopri5::new(y.len(), opts);
    if let Some(&t0) = breakpoints.first() {
        observe(0, t0, y);
    }
    for (i, w) in breakpoints.windows(2).enumerate() {
        ode.advance(f, w[0], w[1], y)?;
        observe(i + 1, w[1], y);
    }
    Ok(ode.stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_phase() {
        // y' = -i w y
        let w = 37.0;
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, -w) * y[0];
        let mut ode = Dopri5::new(1, OdeOptions::pure());
        ode.advance(&mut f, 0.0, 3.0, &mut y).unwrap();
        let exact = C64::from_polar(1.0, -w * 3.0);
        assert!((y[0] - exact).norm() < 1e-7, "{}", (y[0] - exact).norm());
    }

    #[test]
    fn fifth_order_convergence() {
        // y' = cos(t) y, y = exp(sin t); fixed tolerance ladder shrinks error
        let mut f = |t: f64, y: &[C64], dy: &mut [C64]| dy[0] = y[0] * t.cos();
        let exact = (5.0f64).sin().exp();
        let mut errs = Vec::new();
        for rtol in [1e-6, 1e-9] {
            let mut y = vec![C64::new(1.0, 0.0)];
            let mut ode = Dopri5::new(1, OdeOptions::pure().with_rtol(rtol));
            ode.advance(&mut f, 0.0, 5.0, &mut y).unwrap();
            errs.push((y[0].re - exact).abs());
        }
        assert!(errs[1] < 1e-8 && errs[1] < errs[0]);
    }

    #[test]
    fn breakpoints_are_hit_exactly() {
        let mut f = |_t: f64, _y: &[C64], dy: &mut [C64]| dy[0] = C64::new(1.0, 0.0);
        let mut y = vec![C64::new(0.0, 0.0)];
        let mut seen = Vec::new();
        integrate_piecewise(&mut f, &[0.0, 0.3, 1.7, 2.0], &mut y, OdeOptions::pure(), |i, t, y| {
            seen.push((i, t, y[0].re))
        })
        .unwrap();
        assert_eq!(seen.len(), 4);
        for (_, t, v) in seen {
            assert!((t - v).abs() < 1e-12);
        }
    }

    #[test]
    fn step_limit_reports_stiff_failure() {
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = C64::new(0.0, -1e4) * y[0];
        let mut y = vec![C64::new(1.0, 0.0)];
        let mut opts = OdeOptions::pure();
        opts.max_steps = 10;
        let mut ode = Dopri5::new(1, opts);
        assert!(matches!(ode.advance(&mut f, 0.0, 10.0, &mut y), Err(Error::StiffFailure { .. })));
    }
}
