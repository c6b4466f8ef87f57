//! Parametrized null curves with interchangeable backends.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::FrenetSolution;
use crate::grid::{node_index, ParameterGrid};
use crate::lorentz::{LorentzTransform, Vec3};
use crate::stencil::{derivative_stencil_vec, interpolate_vec, MIN_SAMPLES};

/// A real function of one parameter.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Evaluator `(s, order) -> d^order a / ds^order`.
pub type JetFn = Arc<dyn Fn(f64, usize) -> Result<Vec3> + Send + Sync>;

/// Relative slack when checking that a parameter lies in a curve's domain.
const DOMAIN_SLACK: f64 = 1e-9;

pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

pub fn constant_fn(c: f64) -> ScalarFn {
    Arc::new(move |_| c)
}

/// Closed-form curve given by an evaluator of its derivatives.
#[derive(Clone)]
pub struct AnalyticCurve {
    jet: JetFn,
    max_order: usize,
}

/// Positions on a grid; derivatives by fourth-order finite differences.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    grid: Vec<f64>,
    // derivs[k][i] = k-th derivative at grid[i]
    derivs: Vec<Vec<Vec3>>,
}

impl SampledCurve {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.derivs[0]
    }
}

#[derive(Clone)]
pub enum Backend {
    Analytic(AnalyticCurve),
    Sampled(SampledCurve),
    FrenetIntegrated(FrenetSolution),
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Analytic(_) => "analytic",
            Backend::Sampled(_) => "sampled",
            Backend::FrenetIntegrated(_) => "frenet",
        }
    }
}

/// A curve `a(s)` of E^3_1 whose velocity is expected to be null.
#[derive(Clone)]
pub struct NullCurve {
    backend: Backend,
    domain: (f64, f64),
}

impl fmt::Debug for NullCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NullCurve")
            .field("backend", &self.backend.kind())
            .field("domain", &self.domain)
            .finish()
    }
}

impl NullCurve {
    pub fn analytic<F>(domain: (f64, f64), max_order: usize, jet: F) -> Result<Self>
    where
        F: Fn(f64, usize) -> Vec3 + Send + Sync + 'static,
    {
        Self::analytic_fallible(domain, max_order, move |s, k| Ok(jet(s, k)))
    }

    /// Like [`NullCurve::analytic`] for evaluators that can fail, e.g. curves
    /// composed from other curves.
    pub fn analytic_fallible<F>(domain: (f64, f64), max_order: usize, jet: F) -> Result<Self>
    where
        F: Fn(f64, usize) -> Result<Vec3> + Send + Sync + 'static,
    {
        check_domain(domain)?;
        if max_order < 3 {
            return Err(Error::BadInput(format!(
                "analytic curves must supply derivatives up to order 3, got {max_order}"
            )));
        }
        Ok(Self {
            backend: Backend::Analytic(AnalyticCurve {
                jet: Arc::new(jet),
                max_order,
            }),
            domain,
        })
    }

    pub fn sampled(grid: &ParameterGrid, positions: Vec<Vec3>) -> Result<Self> {
        if positions.len() != grid.len() {
            return Err(Error::BadInput(format!(
                "{} positions for a grid of {} points",
                positions.len(),
                grid.len()
            )));
        }
        if grid.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                needed: MIN_SAMPLES,
                got: grid.len(),
            });
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::BadInput("non-finite sample position".into()));
        }
        grid.require_smooth()?;
        let g = grid.values();
        let mut derivs = vec![positions];
        for order in 1..=3 {
            derivs.push(derivative_stencil_vec(&derivs[0], g, order)?);
        }
        Ok(Self {
            backend: Backend::Sampled(SampledCurve {
                grid: g.to_vec(),
                derivs,
            }),
            domain: (grid.start(), grid.end()),
        })
    }

    pub(crate) fn from_frenet(solution: FrenetSolution) -> Self {
        let domain = solution.domain();
        Self {
            backend: Backend::FrenetIntegrated(solution),
            domain,
        }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn max_derivative_order(&self) -> usize {
        match &self.backend {
            Backend::Analytic(a) => a.max_order,
            Backend::Sampled(_) | Backend::FrenetIntegrated(_) => 3,
        }
    }

    pub fn in_domain(&self, s: f64) -> bool {
        let (lo, hi) = self.domain;
        let slack = DOMAIN_SLACK * (1.0 + (hi - lo).abs());
        s >= lo - slack && s <= hi + slack
    }

    /// Position (`order = 0`) or derivative of the given order at `s`.
    pub fn evaluate(&self, s: f64, order: usize) -> Result<Vec3> {
        let (lo, hi) = self.domain;
        if !s.is_finite() || !self.in_domain(s) {
            return Err(Error::OutOfDomain {
                s,
                min: lo,
                max: hi,
            });
        }
        let max = self.max_derivative_order();
        if order > max {
            return Err(Error::DerivativeUnavailable { order, max });
        }
        match &self.backend {
            Backend::Analytic(a) => (a.jet)(s, order),
            Backend::Sampled(c) => {
                let s = s.clamp(lo, hi);
                Ok(match node_index(&c.grid, s) {
                    Some(i) => c.derivs[order][i],
                    None => interpolate_vec(&c.grid, &c.derivs[order], s, 0),
                })
            }
            Backend::FrenetIntegrated(sol) => sol.evaluate(s.clamp(lo, hi), order),
        }
    }

    /// `[a, a', a'', a''']` at `s`.
    pub fn jet(&self, s: f64) -> Result<[Vec3; 4]> {
        Ok([
            self.evaluate(s, 0)?,
            self.evaluate(s, 1)?,
            self.evaluate(s, 2)?,
            self.evaluate(s, 3)?,
        ])
    }

    pub fn nullity_check(&self, grid: &ParameterGrid, eps_null: f64) -> Result<NullityReport> {
        let mut worst = (0.0f64, grid.start());
        for &s in grid.values() {
            let v = self.evaluate(s, 1)?;
            let r = v.norm_sq().abs();
            if r > worst.0 || r.is_nan() {
                worst = (r, s);
            }
        }
        Ok(NullityReport {
            max_residual: worst.0,
            worst_s: worst.1,
            eps_null,
            pass: worst.0 <= eps_null,
        })
    }

    /// Samples the positions on `grid` and returns the finite-difference backed curve.
    pub fn resample(&self, grid: &ParameterGrid) -> Result<NullCurve> {
        let pts = grid
            .values()
            .iter()
            .map(|&s| self.evaluate(s, 0))
            .collect::<Result<Vec<_>>>()?;
        NullCurve::sampled(grid, pts)
    }

    /// Image of the curve under `x -> L x + shift`, parameter unchanged.
    pub fn transformed(self: &Arc<Self>, l: LorentzTransform, shift: Vec3) -> NullCurve {
        let inner = Arc::clone(self);
        let max_order = self.max_derivative_order();
        let domain = self.domain;
        let jet = move |s: f64, k: usize| {
            let v = l.apply(&inner.evaluate(s, k)?);
            Ok(if k == 0 { v + shift } else { v })
        };
        NullCurve {
            backend: Backend::Analytic(AnalyticCurve {
                jet: Arc::new(jet),
                max_order,
            }),
            domain,
        }
    }
}

fn check_domain(domain: (f64, f64)) -> Result<()> {
    if !(domain.0.is_finite() && domain.1.is_finite() && domain.0 < domain.1) {
        return Err(Error::BadInput(format!("degenerate domain {domain:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullityReport {
    pub max_residual: f64,
    pub worst_s: f64,
    pub eps_null: f64,
    pub pass: bool,
}

/// The null helix `a(t) = (t, cos t, sin t)`.
pub fn helix1(domain: (f64, f64)) -> Result<NullCurve> {
    NullCurve::analytic(domain, usize::MAX, |t, k| {
        let (s, c) = t.sin_cos();
        match k {
            0 => Vec3::new(t, c, s),
            1 => Vec3::new(1.0, -s, c),
            _ => {
                // derivatives of (cos, sin) cycle with period 4
                let (x2, x3) = match k % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                Vec3::new(0.0, x2, x3)
            }
        }
    })
}

/// Straight line `p0 + s d`; accepts any direction, see
/// [`crate::families::make_null_geodesic`] for the checked constructor.
pub fn straight_line(p0: Vec3, d: Vec3, domain: (f64, f64)) -> Result<NullCurve> {
    NullCurve::analytic(domain, usize::MAX, move |s, k| match k {
        0 => p0 + d * s,
        1 => d,
        _ => Vec3::ZERO,
    })
}
