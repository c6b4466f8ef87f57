//! Cartan frames `{α, γ, β}` of null curves and the Frenet system
//!
//! ```text
//! α' = κ β,   γ' = τ β,   β' = -τ α - κ γ
//! ```
//!
//! with `α = a'`, `<α,α> = <γ,γ> = 0`, `<β,β> = <α,γ> = 1` and `β = α ∧ γ`.
//!
//! The frame at a point is built from the curve's 3-jet: `α = a'`, the unit
//! direction of `a''` fixes the Lorentz-orthogonal complement of `β`, and `γ`
//! is the second null direction of that timelike plane normalized by
//! `<α,γ> = 1`. The construction has no sign branch, so `γ` and `β` are
//! continuous wherever `a''` is not null. Curvature is signed.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{Backend, NullCurve, ScalarFn};
use crate::error::{Error, Result};
use crate::grid::{interval_index, node_index, ParameterGrid};
use crate::lorentz::Vec3;
use crate::ode::{integrate, OdeOptions};
use crate::stencil::{derivative_stencil_vec, MIN_SAMPLES};

/// Threshold below which `|κ|` counts as zero.
pub const EPS_KAPPA: f64 = 1e-8;
/// Tolerance on the frame relations of an initial frame for [`integrate_frenet`].
pub const INITIAL_FRAME_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOptions {
    /// Relative nullity tolerance: `|<a',a'>| <= eps_null * max(1, |a'|^2)`.
    pub eps_null: f64,
    /// `a''` is treated as proportional to `α` when `<a'',a''> <= eps_gram |a''|^2`.
    pub eps_gram: f64,
    /// `a''` is treated as zero when `|a''| <= eps_flat * max(1, |a'|)`.
    pub eps_flat: f64,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            eps_null: 1e-9,
            eps_gram: 1e-12,
            eps_flat: 1e-8,
        }
    }
}

impl FrameOptions {
    /// Defaults, with the nullity tolerance loosened to 1e-6 for sampled
    /// curves whose tangents carry finite-difference error.
    pub fn for_curve(curve: &NullCurve) -> Self {
        match curve.backend() {
            Backend::Sampled(_) => Self {
                eps_null: 1e-6,
                ..Self::default()
            },
            _ => Self::default(),
        }
    }
}

/// Cartan frame and invariants at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameSample {
    pub s: f64,
    pub alpha: Vec3,
    pub beta: Vec3,
    pub gamma: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Violations of the scalar frame relations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RelationResiduals {
    pub alpha_alpha: f64,
    pub gamma_gamma: f64,
    pub beta_beta: f64,
    pub alpha_gamma: f64,
    pub alpha_beta: f64,
    pub gamma_beta: f64,
    /// Largest component of `β - α ∧ γ`.
    pub cross: f64,
}

impl RelationResiduals {
    /// Largest of the six scalar relations (excludes `cross`).
    pub fn max_scalar(&self) -> f64 {
        [
            self.alpha_alpha,
            self.gamma_gamma,
            self.beta_beta,
            self.alpha_gamma,
            self.alpha_beta,
            self.gamma_beta,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.max_scalar().max(self.cross)
    }

    fn merge(&mut self, o: &RelationResiduals) {
        self.alpha_alpha = self.alpha_alpha.max(o.alpha_alpha);
        self.gamma_gamma = self.gamma_gamma.max(o.gamma_gamma);
        self.beta_beta = self.beta_beta.max(o.beta_beta);
        self.alpha_gamma = self.alpha_gamma.max(o.alpha_gamma);
        self.alpha_beta = self.alpha_beta.max(o.alpha_beta);
        self.gamma_beta = self.gamma_beta.max(o.gamma_beta);
        self.cross = self.cross.max(o.cross);
    }
}

impl FrameSample {
    /// The frame `α = (1,0,1)`, `β = (0,1,0)`, `γ = (-1/2,0,1/2)` at parameter `s`.
    pub fn canonical(s: f64, kappa: f64, tau: f64) -> Self {
        Self {
            s,
            alpha: Vec3::new(1.0, 0.0, 1.0),
            beta: Vec3::new(0.0, 1.0, 0.0),
            gamma: Vec3::new(-0.5, 0.0, 0.5),
            kappa,
            tau,
        }
    }

    pub fn relations(&self) -> RelationResiduals {
        let (a, b, g) = (&self.alpha, &self.beta, &self.gamma);
        RelationResiduals {
            alpha_alpha: a.dot(a).abs(),
            gamma_gamma: g.dot(g).abs(),
            beta_beta: (b.dot(b) - 1.0).abs(),
            alpha_gamma: (a.dot(g) - 1.0).abs(),
            alpha_beta: a.dot(b).abs(),
            gamma_beta: g.dot(b).abs(),
            cross: (*b - a.cross(g)).max_abs(),
        }
    }

    /// `f = τ / κ`.
    pub fn ratio(&self) -> f64 {
        self.tau / self.kappa
    }
}

/// Null vector `γ` with `<γ, β> = 0` and `<α, γ> = 1`, for null `α` and unit
/// spacelike `β` orthogonal to `α`. Invariant under `β -> -β`.
pub fn complete_null_frame(alpha: &Vec3, beta: &Vec3) -> Vec3 {
    let w = Vec3::E1 + *beta * beta.c1;
    let p = w.dot(alpha);
    let q = w.dot(&w);
    w / p - *alpha * (q / (2.0 * p * p))
}

/// A frame together with both torsion evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameEval {
    pub sample: FrameSample,
    /// `τ = -<β', γ>`.
    pub tau_via_beta: f64,
    /// `τ = <γ', β>`.
    pub tau_via_gamma: f64,
}

pub fn compute_frame_at(curve: &NullCurve, s: f64) -> Result<FrameSample> {
    compute_frame_detailed(curve, s, &FrameOptions::for_curve(curve)).map(|e| e.sample)
}

pub fn compute_frame_detailed(curve: &NullCurve, s: f64, opts: &FrameOptions) -> Result<FrameEval> {
    let [_, alpha, a2, a3] = curve.jet(s)?;
    frame_from_jet(s, alpha, a2, a3, opts)
}

pub(crate) fn frame_from_jet(
    s: f64,
    alpha: Vec3,
    a2: Vec3,
    a3: Vec3,
    opts: &FrameOptions,
) -> Result<FrameEval> {
    let speed2 = alpha.euclid_norm().powi(2);
    let nullity = alpha.norm_sq();
    if !(nullity.abs() <= opts.eps_null * speed2.max(1.0)) || alpha.is_zero() {
        return Err(Error::NotNull {
            s,
            residual: nullity,
        });
    }
    let acc2 = a2.euclid_norm().powi(2);
    let q = a2.norm_sq();
    if acc2.sqrt() <= opts.eps_flat * speed2.sqrt().max(1.0) || q <= opts.eps_gram * acc2 {
        return Err(Error::GeodesicDegeneracy { s });
    }
    let beta0 = a2 / q.sqrt();
    let gamma = complete_null_frame(&alpha, &beta0);
    let beta = alpha.cross(&gamma);
    let kappa = a2.dot(&beta);

    // β' from differentiating β = a''/κ, with κ' = <a''', β>
    let dkappa = a3.dot(&beta);
    let dbeta = (a3 - beta * dkappa) / kappa;
    let tau_via_beta = -dbeta.dot(&gamma);

    // γ' from differentiating the completion formula along the curve
    let w = Vec3::E1 + beta * beta.c1;
    let dw = beta * dbeta.c1 + dbeta * beta.c1;
    let p = w.dot(&alpha);
    let dp = dw.dot(&alpha) + w.dot(&a2);
    let qq = w.dot(&w);
    let dqq = 2.0 * w.dot(&dw);
    let dgamma = dw / p
        - w * (dp / (p * p))
        - alpha * (dqq / (2.0 * p * p) - qq * dp / (p * p * p))
        - a2 * (qq / (2.0 * p * p));
    let tau_via_gamma = dgamma.dot(&beta);

    Ok(FrameEval {
        sample: FrameSample {
            s,
            alpha,
            beta,
            gamma,
            kappa,
            tau: tau_via_beta,
        },
        tau_via_beta,
        tau_via_gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FrameSummary {
    pub relations: RelationResiduals,
    /// Largest `|<γ',β> + <β',γ>|` over the grid.
    pub tau_discrepancy: f64,
    /// Grid intervals across which `κ` changes sign (reported by left end).
    pub kappa_sign_changes: Vec<f64>,
}

/// A curve together with its Cartan frame sampled on a grid.
#[derive(Debug, Clone)]
pub struct FramedCurve {
    curve: Arc<NullCurve>,
    grid: ParameterGrid,
    samples: Vec<FrameSample>,
    summary: FrameSummary,
}

impl FramedCurve {
    /// Assembles a framed curve from precomputed samples without re-deriving them.
    pub fn from_parts(
        curve: Arc<NullCurve>,
        grid: ParameterGrid,
        samples: Vec<FrameSample>,
    ) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::BadInput(format!(
                "{} frame samples for {} grid points",
                samples.len(),
                grid.len()
            )));
        }
        let summary = summarize(&samples, None);
        Ok(Self {
            curve,
            grid,
            samples,
            summary,
        })
    }

    pub fn curve(&self) -> &Arc<NullCurve> {
        &self.curve
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[FrameSample] {
        &self.samples
    }

    pub fn summary(&self) -> &FrameSummary {
        &self.summary
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.samples.iter().map(|f| f.kappa).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        self.samples.iter().map(|f| f.tau).collect()
    }

    /// Frame at an arbitrary parameter: the stored sample on a node, otherwise
    /// evaluated from the source curve.
    pub fn frame_at(&self, s: f64) -> Result<FrameSample> {
        match node_index(self.grid.values(), s) {
            Some(i) => Ok(self.samples[i]),
            None => compute_frame_at(&self.curve, s),
        }
    }

    /// Copy with every sample passed through `f` (used to build corrupted frames).
    pub fn map_samples<F: Fn(&FrameSample) -> FrameSample>(&self, f: F) -> FramedCurve {
        let samples: Vec<FrameSample> = self.samples.iter().map(f).collect();
        let summary = summarize(&samples, None);
        FramedCurve {
            curve: Arc::clone(&self.curve),
            grid: self.grid.clone(),
            samples,
            summary,
        }
    }
}

fn summarize(samples: &[FrameSample], tau_pairs: Option<&[(f64, f64)]>) -> FrameSummary {
    let mut relations = RelationResiduals::default();
    for f in samples {
        relations.merge(&f.relations());
    }
    let tau_discrepancy = tau_pairs
        .map(|p| p.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let kappa_sign_changes = samples
        .windows(2)
        .filter(|w| w[0].kappa.signum() != w[1].kappa.signum())
        .map(|w| w[0].s)
        .collect();
    FrameSummary {
        relations,
        tau_discrepancy,
        kappa_sign_changes,
    }
}

pub fn frame_curve(curve: Arc<NullCurve>, grid: &ParameterGrid) -> Result<FramedCurve> {
    let opts = FrameOptions::for_curve(&curve);
    frame_curve_with(curve, grid, &opts)
}

pub fn frame_curve_with(
    curve: Arc<NullCurve>,
    grid: &ParameterGrid,
    opts: &FrameOptions,
) -> Result<FramedCurve> {
    let evals = grid
        .values()
        .par_iter()
        .map(|&s| compute_frame_detailed(&curve, s, opts))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = evals
        .iter()
        .map(|e| (e.tau_via_beta, e.tau_via_gamma))
        .collect();
    let samples: Vec<FrameSample> = evals.into_iter().map(|e| e.sample).collect();
    let summary = summarize(&samples, Some(&pairs));
    Ok(FramedCurve {
        curve,
        grid: grid.clone(),
        samples,
        summary,
    })
}

/// Residuals of the Frenet system on a framed grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetResiduals {
    /// max `|α' - κβ|`
    pub alpha: f64,
    /// max `|γ' - τβ|`
    pub gamma: f64,
    /// max `|β' + τα + κγ|`
    pub beta: f64,
    pub relations: RelationResiduals,
}

impl FrenetResiduals {
    pub fn max_derivative(&self) -> f64 {
        self.alpha.max(self.gamma).max(self.beta)
    }
}

/// Frame derivatives are taken by differencing the sampled frame arrays.
pub fn frenet_residuals(fc: &FramedCurve) -> Result<FrenetResiduals> {
    let n = fc.samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let g = fc.grid.values();
    let col = |f: fn(&FrameSample) -> Vec3| fc.samples.iter().map(f).collect::<Vec<_>>();
    let da = derivative_stencil_vec(&col(|f| f.alpha), g, 1)?;
    let db = derivative_stencil_vec(&col(|f| f.beta), g, 1)?;
    let dg = derivative_stencil_vec(&col(|f| f.gamma), g, 1)?;
    let mut out = FrenetResiduals {
        alpha: 0.0,
        gamma: 0.0,
        beta: 0.0,
        relations: fc.summary.relations,
    };
    for (i, f) in fc.samples.iter().enumerate() {
        out.alpha = out.alpha.max((da[i] - f.beta * f.kappa).euclid_norm());
        out.gamma = out.gamma.max((dg[i] - f.beta * f.tau).euclid_norm());
        out.beta = out
            .beta
            .max((db[i] + f.alpha * f.tau + f.gamma * f.kappa).euclid_norm());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrenetOptions {
    pub ode: OdeOptions,
    /// Project the frame back onto the null-frame relations after every step.
    pub renormalize: bool,
}

type State = [f64; 12];

fn pack(x: Vec3, a: Vec3, b: Vec3, g: Vec3) -> State {
    [
        x.c1, x.c2, x.c3, a.c1, a.c2, a.c3, b.c1, b.c2, b.c3, g.c1, g.c2, g.c3,
    ]
}

fn unpack(y: &State) -> [Vec3; 4] {
    let v = |i: usize| Vec3::new(y[i], y[i + 1], y[i + 2]);
    [v(0), v(3), v(6), v(9)]
}

/// Restores `<α,α> = <γ,γ> = 0`, `<α,γ> = <β,β> = 1` and mutual orthogonality
/// by Gram-Schmidt on `(β, (α-γ)/√2, (α+γ)/√2)`.
pub fn project_null_frame(alpha: Vec3, beta: Vec3, gamma: Vec3) -> (Vec3, Vec3, Vec3) {
    let beta = beta / beta.norm_sq().sqrt();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = (alpha - gamma) * r;
    t -= beta * t.dot(&beta);
    t = t / (-t.norm_sq()).sqrt();
    let mut e = (alpha + gamma) * r;
    e = e - beta * e.dot(&beta) + t * e.dot(&t);
    e = e / e.norm_sq().sqrt();
    ((t + e) * r, beta, (e - t) * r)
}

fn frenet_rhs(kappa: &ScalarFn, tau: &ScalarFn, s: f64, y: &State) -> State {
    let [_, a, b, g] = unpack(y);
    let (k, t) = (kappa(s), tau(s));
    pack(a, b * k, -(a * t) - g * k, b * t)
}

/// Dense solution of the Frenet system; backs [`crate::curve::Backend::FrenetIntegrated`].
#[derive(Clone)]
pub struct FrenetSolution {
    grid: Vec<f64>,
    states: Vec<State>,
    kappa: ScalarFn,
    tau: ScalarFn,
    opts: FrenetOptions,
}

impl FrenetSolution {
    pub fn domain(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn kappa(&self) -> &ScalarFn {
        &self.kappa
    }

    pub fn tau(&self) -> &ScalarFn {
        &self.tau
    }

    fn state_at(&self, s: f64) -> Result<State> {
        if let Some(i) = node_index(&self.grid, s) {
            return Ok(self.states[i]);
        }
        let i = interval_index(&self.grid, s);
        let j = if s - self.grid[i] <= self.grid[i + 1] - s {
            i
        } else {
            i + 1
        };
        let (kappa, tau) = (&self.kappa, &self.tau);
        let project = |y: &mut State| self.project(y);
        let mut ode = self.opts.ode;
        ode.h_init = Some((s - self.grid[j]).abs());
        let ys = integrate(
            |t, y: &State| frenet_rhs(kappa, tau, t, y),
            self.grid[j],
            self.states[j],
            &[s],
            &ode,
            project,
        )?;
        Ok(ys[0])
    }

    fn project(&self, y: &mut State) {
        if self.opts.renormalize {
            let [x, a, b, g] = unpack(y);
            let (a, b, g) = project_null_frame(a, b, g);
            *y = pack(x, a, b, g);
        }
    }

    pub(crate) fn evaluate(&self, s: f64, order: usize) -> Result<Vec3> {
        let [x, a, b, g] = unpack(&self.state_at(s)?);
        let k = (self.kappa)(s);
        Ok(match order {
            0 => x,
            1 => a,
            2 => b * k,
            3 => {
                let dk = five_point_derivative(&self.kappa, s);
                let t = (self.tau)(s);
                b * dk - (a * t + g * k) * k
            }
            _ => {
                return Err(Error::DerivativeUnavailable { order, max: 3 });
            }
        })
    }
}

pub(crate) fn five_point_derivative(f: &ScalarFn, s: f64) -> f64 {
    let h = 1e-3 * (1.0 + s.abs());
    (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
}

/// Integrates the Frenet system for given curvature and torsion, starting from
/// `initial` (placed at the first grid point) and position `origin`.
///
/// The returned framed curve carries the integrated frames; its source curve is
/// the dense Frenet solution.
pub fn integrate_frenet(
    kappa: ScalarFn,
    tau: ScalarFn,
    initial: &FrameSample,
    origin: Vec3,
    grid: &ParameterGrid,
    opts: &FrenetOptions,
) -> Result<FramedCurve> {
    let residual = initial.relations().max();
    if !(residual <= INITIAL_FRAME_TOL) {
        return Err(Error::BadInitialFrame { residual });
    }
    for &s in grid.values() {
        let k = kappa(s);
        if !(k.abs() >= EPS_KAPPA) {
            return Err(Error::BadInput(format!(
                "curvature {k} vanishes at s = {s}; the Cartan frame is undefined there"
            )));
        }
        if !tau(s).is_finite() {
            return Err(Error::BadInput(format!("torsion not finite at s = {s}")));
        }
    }
    let s0 = grid.start();
    let y0 = pack(origin, initial.alpha, initial.beta, initial.gamma);
    let mut solution = FrenetSolution {
        grid: grid.values().to_vec(),
        states: Vec::new(),
        kappa: Arc::clone(&kappa),
        tau: Arc::clone(&tau),
        opts: *opts,
    };
    let rest = &grid.values()[1..];
    let mut states = vec![y0];
    states.extend(integrate(
        |t, y: &State| frenet_rhs(&kappa, &tau, t, y),
        s0,
        y0,
        rest,
        &opts.ode,
        |y: &mut State| solution.project(y),
    )?);
    solution.states = states;
    let samples = solution
        .grid
        .iter()
        .zip(&solution.states)
        .map(|(&s, y)| {
            let [_, a, b, g] = unpack(y);
            FrameSample {
                s,
                alpha: a,
                beta: b,
                gamma: g,
                kappa: kappa(s),
                tau: tau(s),
            }
        })
        .collect();
    let curve = Arc::new(NullCurve::from_frenet(solution));
    FramedCurve::from_parts(curve, grid.clone(), samples)
}

/// Shape labels of a framed curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CurveClass {
    Geodesic,
    Helix,
    TorsionFree,
    Generic,
}

fn stdev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// All matching labels in priority order; `Generic` when none match.
pub fn classify(fc: &FramedCurve, eps: f64) -> Vec<CurveClass> {
    let k = fc.kappas();
    let t = fc.taus();
    let mut labels = Vec::new();
    if stdev(&k) <= eps && stdev(&t) <= eps {
        labels.push(CurveClass::Helix);
    }
    if t.iter().all(|x| x.abs() <= eps) {
        labels.push(CurveClass::TorsionFree);
    }
    if labels.is_empty() {
        labels.push(CurveClass::Generic);
    }
    labels
}

/// Frames the curve and classifies it; a curve whose framing fails with
/// geodesic degeneracy at every grid point is a geodesic.
pub fn classify_curve(
    curve: Arc<NullCurve>,
    grid: &ParameterGrid,
    eps: f64,
) -> Result<Vec<CurveClass>> {
    let all_flat = grid.values().iter().all(|&s| {
        matches!(
            compute_frame_at(&curve, s),
            Err(Error::GeodesicDegeneracy { .. })
        )
    });
    if all_flat {
        return Ok(vec![CurveClass::Geodesic]);
    }
    Ok(classify(&frame_curve(curve, grid)?, eps))
}

pub fn sample_stdev(xs: &[f64]) -> f64 {
    stdev(xs)
}
