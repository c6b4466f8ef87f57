//! Total-curvature chart `φ(s) = ∫ κ ds`, the ratio `f = τ/κ` and the
//! third-order tangent equation
//!
//! ```text
//! α''' + 2 f α' + f' α = 0        (derivatives in φ)
//! ```
//!
//! In the φ parameter the frame moves by `dα/dφ = β`, `dγ/dφ = f β`,
//! `dβ/dφ = -f α - γ`, hence `γ = -(d²α/dφ² + f α)`.

use serde::Serialize;

use crate::curve::{NullCurve, ScalarFn};
use crate::error::{Error, Result};
use crate::frame::{FrameSample, FramedCurve, EPS_KAPPA};
use crate::grid::{interval_index, ParameterGrid};
use crate::lorentz::Vec3;
use crate::ode::{integrate, OdeOptions};
use crate::quad::{cumulative_hermite_vec, cumulative_integral, gauss_legendre, HermiteSegment};
use crate::stencil::{derivative_stencil, derivative_stencil_vec, interpolate};

/// Points skipped at each end when evaluating the tangent equation residual.
const RESIDUAL_MARGIN: usize = 3;

/// The curve re-parametrized by total curvature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiChart {
    s: Vec<f64>,
    phi: Vec<f64>,
    kappa: Vec<f64>,
    f: Vec<f64>,
    /// `+1` if φ increases with s, `-1` otherwise.
    direction: f64,
}

impl PhiChart {
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn ratio(&self) -> &[f64] {
        &self.f
    }

    pub fn direction(&self) -> f64 {
        self.direction
    }

    /// `(min φ, max φ)`.
    pub fn phi_range(&self) -> (f64, f64) {
        let (a, b) = (self.phi[0], self.phi[self.phi.len() - 1]);
        (a.min(b), a.max(b))
    }

    fn segment(&self, i: usize) -> HermiteSegment {
        HermiteSegment {
            x0: self.s[i],
            x1: self.s[i + 1],
            y0: self.phi[i],
            y1: self.phi[i + 1],
            d0: self.kappa[i],
            d1: self.kappa[i + 1],
        }
    }

    /// φ at any `s` in the chart (cubic Hermite with slopes κ).
    pub fn phi_at(&self, s: f64) -> f64 {
        self.segment(interval_index(&self.s, s)).eval(s)
    }

    /// Inverse of [`PhiChart::phi_at`].
    pub fn s_at(&self, phi: f64) -> Result<f64> {
        let (lo, hi) = self.phi_range();
        let slack = 1e-9 * (1.0 + (hi - lo));
        if !(phi >= lo - slack && phi <= hi + slack) {
            return Err(Error::OutOfDomain {
                s: phi,
                min: lo,
                max: hi,
            });
        }
        let key = phi * self.direction;
        let n = self.phi.len();
        let p = self.phi.partition_point(|v| v * self.direction <= key);
        let i = p.saturating_sub(1).min(n - 2);
        if self.phi[i] == phi {
            return Ok(self.s[i]);
        }
        Ok(self.segment(i).invert(phi))
    }

    /// φ-grid in increasing order with the matching node permutation.
    fn ascending<T: Copy>(&self, values: &[T]) -> (Vec<f64>, Vec<T>) {
        if self.direction > 0.0 {
            (self.phi.clone(), values.to_vec())
        } else {
            (
                self.phi.iter().rev().copied().collect(),
                values.iter().rev().copied().collect(),
            )
        }
    }
}

pub fn total_curvature(fc: &FramedCurve) -> Result<PhiChart> {
    let samples = fc.samples();
    for f in samples {
        if !(f.kappa.abs() >= EPS_KAPPA) {
            return Err(Error::KappaVanishes { s: f.s });
        }
    }
    if let Some(w) = samples
        .windows(2)
        .find(|w| w[0].kappa.signum() != w[1].kappa.signum())
    {
        return Err(Error::SignChange { s: w[0].s });
    }
    let s = fc.grid().values().to_vec();
    let kappa = fc.kappas();
    let phi = cumulative_integral(&s, &kappa);
    let f = samples.iter().map(FrameSample::ratio).collect();
    Ok(PhiChart {
        direction: kappa[0].signum(),
        s,
        phi,
        kappa,
        f,
    })
}

fn eq6_residual(phi: &[f64], alpha: &[Vec3], f: &[f64]) -> Result<f64> {
    let d1 = derivative_stencil_vec(alpha, phi, 1)?;
    let d3 = derivative_stencil_vec(alpha, phi, 3)?;
    let df = derivative_stencil(f, phi, 1)?;
    let n = phi.len();
    let range = if n > 2 * RESIDUAL_MARGIN {
        RESIDUAL_MARGIN..n - RESIDUAL_MARGIN
    } else {
        0..n
    };
    Ok(range
        .map(|i| (d3[i] + d1[i] * (2.0 * f[i]) + alpha[i] * df[i]).euclid_norm())
        .fold(0.0, f64::max))
}

/// Max over the interior φ-grid of `|α''' + 2fα' + f'α|`, all φ-derivatives by differencing.
pub fn tangent_ode_residual(fc: &FramedCurve, chart: &PhiChart) -> Result<f64> {
    let alphas: Vec<Vec3> = fc.samples().iter().map(|f| f.alpha).collect();
    let (phi, alpha) = chart.ascending(&alphas);
    let (_, f) = chart.ascending(&chart.f);
    eq6_residual(&phi, &alpha, &f)
}

/// Residuals of the φ-frame equations on a chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartIdentities {
    /// max `|dα/dφ - β|`
    pub d_alpha: f64,
    /// max `|dγ/dφ - f β|`
    pub d_gamma: f64,
    /// max `|γ + d²α/dφ² + f α|`
    pub gamma_recovery: f64,
}

pub fn chart_identities(fc: &FramedCurve, chart: &PhiChart) -> Result<ChartIdentities> {
    let samples = chart.ascending(fc.samples()).1;
    let (phi, f) = chart.ascending(&chart.f);
    let col = |g: fn(&FrameSample) -> Vec3| samples.iter().map(g).collect::<Vec<_>>();
    let alpha = col(|x| x.alpha);
    let da = derivative_stencil_vec(&alpha, &phi, 1)?;
    let d2a = derivative_stencil_vec(&alpha, &phi, 2)?;
    let dg = derivative_stencil_vec(&col(|x| x.gamma), &phi, 1)?;
    let mut out = ChartIdentities {
        d_alpha: 0.0,
        d_gamma: 0.0,
        gamma_recovery: 0.0,
    };
    for (i, x) in samples.iter().enumerate() {
        out.d_alpha = out.d_alpha.max((da[i] - x.beta).euclid_norm());
        out.d_gamma = out.d_gamma.max((dg[i] - x.beta * f[i]).euclid_norm());
        out.gamma_recovery = out
            .gamma_recovery
            .max((x.gamma + d2a[i] + x.alpha * f[i]).euclid_norm());
    }
    Ok(out)
}

/// Initial data `(α, dα/dφ, d²α/dφ²)` at `phi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentInit {
    pub phi0: f64,
    pub alpha: Vec3,
    pub d_alpha: Vec3,
    pub d2_alpha: Vec3,
}

impl TangentInit {
    /// `dα/dφ = β` and `d²α/dφ² = -γ - f α` from a Cartan frame.
    pub fn from_frame(frame: &FrameSample, phi0: f64) -> Self {
        let f = frame.ratio();
        Self {
            phi0,
            alpha: frame.alpha,
            d_alpha: frame.beta,
            d2_alpha: -frame.gamma - frame.alpha * f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentOdeOptions {
    pub ode: OdeOptions,
    /// Rescale the timelike component after each step so that `<α,α> = 0`.
    pub project_null: bool,
}

/// Tangent field `α(φ)` with its first two φ-derivatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentField {
    pub phi: Vec<f64>,
    pub alpha: Vec<Vec3>,
    pub d_alpha: Vec<Vec3>,
    pub d2_alpha: Vec<Vec3>,
    /// max `|<α,α>|` over the field.
    pub null_drift: f64,
}

type TangentState = [f64; 9];

fn to_state(a: Vec3, b: Vec3, c: Vec3) -> TangentState {
    [a.c1, a.c2, a.c3, b.c1, b.c2, b.c3, c.c1, c.c2, c.c3]
}

fn from_state(y: &TangentState) -> [Vec3; 3] {
    let v = |i: usize| Vec3::new(y[i], y[i + 1], y[i + 2]);
    [v(0), v(3), v(6)]
}

/// Integrates the tangent equation for coefficient `f(φ)` (with derivative
/// `df`) from `init` and returns the field on `phi_grid`.
pub fn solve_tangent_ode(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    init: &TangentInit,
    phi_grid: &ParameterGrid,
    opts: &TangentOdeOptions,
) -> Result<TangentField> {
    let rhs = |phi: f64, y: &TangentState| {
        let [a, da, d2a] = from_state(y);
        let d3a = -(da * (2.0 * f(phi))) - a * df(phi);
        to_state(da, d2a, d3a)
    };
    let project = |y: &mut TangentState| {
        if opts.project_null {
            let spatial = (y[1] * y[1] + y[2] * y[2]).sqrt();
            y[0] = if y[0] < 0.0 { -spatial } else { spatial };
        }
    };
    let y0 = to_state(init.alpha, init.d_alpha, init.d2_alpha);
    let values = phi_grid.values();
    let split = values.partition_point(|p| *p < init.phi0);
    let backward: Vec<f64> = values[..split].iter().rev().copied().collect();
    let forward = &values[split..];
    let mut states: Vec<TangentState> =
        integrate(rhs, init.phi0, y0, &backward, &opts.ode, project)?;
    states.reverse();
    states.extend(integrate(rhs, init.phi0, y0, forward, &opts.ode, project)?);
    let mut field = TangentField {
        phi: values.to_vec(),
        alpha: Vec::with_capacity(states.len()),
        d_alpha: Vec::with_capacity(states.len()),
        d2_alpha: Vec::with_capacity(states.len()),
        null_drift: 0.0,
    };
    for y in &states {
        let [a, da, d2a] = from_state(y);
        field.null_drift = field.null_drift.max(a.norm_sq().abs());
        field.alpha.push(a);
        field.d_alpha.push(da);
        field.d2_alpha.push(d2a);
    }
    Ok(field)
}

/// Tangent-equation residual of a field, derivatives by differencing.
pub fn tangent_field_residual(field: &TangentField, f: &dyn Fn(f64) -> f64) -> Result<f64> {
    let fs: Vec<f64> = field.phi.iter().map(|&p| f(p)).collect();
    eq6_residual(&field.phi, &field.alpha, &fs)
}

/// Recovers a curve from its tangent field in the φ parameter and a chosen
/// curvature `κ(φ)`: `ds = dφ/κ`, `a = anchor + ∫ α ds`, with `a = anchor`
/// at the first φ node. The parameter is reversed if κ < 0 so that the
/// returned curve has an increasing grid.
pub fn reconstruct_curve(
    field: &TangentField,
    kappa_of_phi: &ScalarFn,
    anchor: Vec3,
) -> Result<NullCurve> {
    let phi = &field.phi;
    let kappas: Vec<f64> = phi.iter().map(|&p| kappa_of_phi(p)).collect();
    for (p, k) in phi.iter().zip(&kappas) {
        if !(k.abs() >= EPS_KAPPA) {
            return Err(Error::KappaVanishes { s: *p });
        }
    }
    if let Some(i) = (1..kappas.len()).find(|&i| kappas[i].signum() != kappas[0].signum()) {
        return Err(Error::SignChange { s: phi[i] });
    }
    let mut s = vec![0.0; phi.len()];
    for i in 1..phi.len() {
        s[i] = s[i - 1] + gauss_legendre(|p| 1.0 / kappa_of_phi(p), phi[i - 1], phi[i]);
    }
    let ds_alpha: Vec<Vec3> = field
        .d_alpha
        .iter()
        .zip(&kappas)
        .map(|(d, k)| *d * *k)
        .collect();
    let mut pos: Vec<Vec3> = cumulative_hermite_vec(&s, &field.alpha, &ds_alpha)
        .into_iter()
        .map(|v| v + anchor)
        .collect();
    if kappas[0] < 0.0 {
        s.reverse();
        pos.reverse();
    }
    NullCurve::sampled(&ParameterGrid::new(s)?, pos)
}

/// Interpolating coefficient functions `(f, df/dφ)` built from chart samples.
pub fn ratio_functions(chart: &PhiChart) -> Result<(impl Fn(f64) -> f64, impl Fn(f64) -> f64)> {
    let (phi, f) = chart.ascending(&chart.f);
    let df = derivative_stencil(&f, &phi, 1)?;
    let (p1, p2) = (phi.clone(), phi);
    Ok((
        move |x: f64| interpolate(&p1, &f, x, 0),
        move |x: f64| interpolate(&p2, &df, x, 0),
    ))
}
