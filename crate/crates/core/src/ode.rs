//! Dormand-Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights equal the last row of A
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Adaptive,
    /// Constant step length (shortened only to land on output points).
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub max_steps: usize,
    pub control: StepControl,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_min: 1e-14,
            max_steps: 1_000_000,
            control: StepControl::Adaptive,
        }
    }
}

impl OdeOptions {
    pub fn fixed(h: f64) -> Self {
        Self {
            control: StepControl::Fixed(h),
            ..Self::default()
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coef: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, c) in ks.iter().zip(coef) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// One Dormand-Prince step; returns the fifth-order solution and the error vector.
fn dp_step<const N: usize, F>(rhs: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(t, y);
    for s in 1..7 {
        let ys = axpy(y, h, &k[..s], &A[s][..s]);
        k[s] = rhs(t + C[s] * h, &ys);
    }
    let y5 = axpy(y, h, &k, &B5);
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>();
    }
    (y5, err)
}

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` and returns the state at each
/// entry of `targets`, which must be monotone in the direction of integration.
///
/// `project` runs after every accepted step (constraint projection); pass
/// `|_| {}` for none.
pub fn integrate<const N: usize, F, P>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    targets: &[f64],
    opts: &OdeOptions,
    project: P,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    P: Fn(&mut [f64; N]),
{
    let Some(&last) = targets.last() else {
        return Ok(Vec::new());
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    if targets.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || (targets[0] - t0) * dir < 0.0 {
        return Err(Error::BadInput("output points are not monotone".into()));
    }
    let span = (last - t0).abs();
    let mut h = match opts.control {
        StepControl::Fixed(h) => h.abs(),
        StepControl::Adaptive => opts.h_init.unwrap_or((span * 1e-3).max(1e-6)),
    };
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(targets.len());
    let mut steps = 0usize;
    for &target in targets {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::IntegratorFailure {
                    t,
                    reason: "step budget exhausted".into(),
                });
            }
            let remaining = (target - t).abs();
            let land = h >= remaining * (1.0 - 1e-12);
            let step = if land { remaining } else { h };
            let (y_new, err) = dp_step(&rhs, t, &y, dir * step);
            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::IntegratorFailure {
                    t,
                    reason: "non-finite state".into(),
                });
            }
            let accept = match opts.control {
                StepControl::Fixed(_) => true,
                StepControl::Adaptive => {
                    let mut e2 = 0.0;
                    for i in 0..N {
                        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                        e2 += (err[i] / sc).powi(2);
                    }
                    let e = (e2 / N as f64).sqrt();
                    let fac = if e == 0.0 {
                        5.0
                    } else {
                        (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    let ok = e <= 1.0;
                    if ok && !land {
                        h = step * fac;
                    } else if ok {
                        h = h.max(step * fac.min(1.0));
                    } else {
                        h = step * fac.min(1.0);
                        if h < opts.h_min {
                            return Err(Error::IntegratorFailure {
                                t,
                                reason: format!("step size underflow ({h:e})"),
                            });
                        }
                    }
                    ok
                }
            };
            if accept {
                t = if land { target } else { t + dir * step };
                y = y_new;
                project(&mut y);
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let targets: Vec<f64> = (1..=10).map(|i| i as f64 * 0.5).collect();
        let ys = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            &targets,
            &OdeOptions::default(),
            |_| {},
        )
        .unwrap();
        for (t, y) in targets.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn backward_harmonic() {
        let ys = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            &[-1.0, -3.0],
            &OdeOptions::default(),
            |_| {},
        )
        .unwrap();
        assert!((ys[0][0] - (-1f64).sin()).abs() < 1e-9);
        assert!((ys[1][0] - (-3f64).sin()).abs() < 1e-9);
    }

    #[test]
    fn fixed_step_order_five() {
        let err = |h: f64| {
            let y = integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [0.0, 1.0],
                &[2.0],
                &OdeOptions::fixed(h),
                |_| {},
            )
            .unwrap();
            (y[0][0] - 2f64.sin()).abs()
        };
        let r = err(0.1) / err(0.05);
        assert!(r > 25.0 && r < 40.0, "ratio {r}");
    }

    #[test]
    fn rejects_non_monotone_targets() {
        let r = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            &[1.0, 0.5],
            &OdeOptions::default(),
            |_| {},
        );
        assert!(matches!(r, Err(Error::BadInput(_))));
    }

    #[test]
    fn tiny_final_step() {
        let ys = integrate(
            |_, y: &[f64; 1]| [y[0]],
            1.0,
            [1.0],
            &[1.0 + 4.5e-16],
            &OdeOptions {
                h_init: Some(4.5e-16),
                ..OdeOptions::default()
            },
            |_| {},
        )
        .unwrap();
        assert!((ys[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn blow_up_fails_cleanly() {
        let r = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            &[2.0],
            &OdeOptions::default(),
            |_| {},
        );
        assert!(matches!(r, Err(Error::IntegratorFailure { .. })));
    }
}
