//! Null similar curves: variable transformations `s_a(s_b)`, synthesis of
//! similar curves, and the tangent, normal, binormal and curvature-ratio
//! criteria that detect them.
//!
//! Every detection takes an explicit anchor pair `(s_a0, s_b0)` of
//! corresponding parameters. [`search_anchor`] is a heuristic helper only.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{NullCurve, ScalarFn};
use crate::error::{Error, Result};
use crate::frame::{
    complete_null_frame, five_point_derivative, sample_stdev, FrameSample, FramedCurve, EPS_KAPPA,
};
use crate::grid::{interval_index, node_index, ParameterGrid};
use crate::lorentz::Vec3;
use crate::ode::{integrate, OdeOptions};
use crate::phi::{
    ratio_functions, solve_tangent_ode, total_curvature, TangentInit, TangentOdeOptions,
};
use crate::quad::{composite, try_gauss_legendre_vec, HermiteSegment};
use crate::stencil::interpolate;

/// Torsion below this magnitude makes the binormal criterion inapplicable.
pub const EPS_TAU: f64 = 1e-8;

// Longest quadrature panel used when integrating λ or a tangent field.
const PANEL: f64 = 0.05;

/// Corresponding parameters on the two curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub s_a: f64,
    pub s_b: f64,
}

impl AnchorPair {
    pub fn new(s_a: f64, s_b: f64) -> Self {
        Self { s_a, s_b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stdev: f64,
}

impl LambdaStats {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len().max(1) as f64;
        Self {
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: xs.iter().sum::<f64>() / n,
            stdev: sample_stdev(xs),
        }
    }
}

/// Monotone map `s_a(s_b) = s_a0 + ∫ λ ds_b` on a grid of `s_b`.
#[derive(Clone)]
pub struct VariableTransformation {
    grid: ParameterGrid,
    s_a: Vec<f64>,
    lambda: Vec<f64>,
    density: Option<ScalarFn>,
    anchor: AnchorPair,
}

impl fmt::Debug for VariableTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VariableTransformation")
            .field("s_b", &(self.grid.start(), self.grid.end()))
            .field("s_a", &(self.s_a[0], self.s_a[self.s_a.len() - 1]))
            .field("points", &self.s_a.len())
            .field("analytic_density", &self.density.is_some())
            .field("anchor", &self.anchor)
            .finish()
    }
}

fn nearest(xs: &[f64], x: f64) -> usize {
    let i = interval_index(xs, x);
    if (x - xs[i]).abs() <= (xs[i + 1] - x).abs() {
        i
    } else {
        i + 1
    }
}

fn grid_slack(grid: &ParameterGrid) -> f64 {
    1e-9 * (1.0 + (grid.end() - grid.start()).abs())
}

fn in_grid(grid: &ParameterGrid, s: f64) -> bool {
    let slack = grid_slack(grid);
    s >= grid.start() - slack && s <= grid.end() + slack
}

fn check_positive(xs: &[f64], lambda: &[f64]) -> Result<()> {
    match xs
        .iter()
        .zip(lambda)
        .find(|(_, l)| !(**l > 0.0) || !l.is_finite())
    {
        Some((&s, &lambda)) => Err(Error::NonPositiveLambda { s, lambda }),
        None => Ok(()),
    }
}

fn check_domain(curve: &NullCurve, s_a: f64) -> Result<()> {
    if curve.in_domain(s_a) {
        Ok(())
    } else {
        let (min, max) = curve.domain();
        Err(Error::DomainOverflow { s_a, min, max })
    }
}

impl VariableTransformation {
    /// Transformation with analytic density `λ`, integrated outwards from the anchor.
    pub fn from_density(
        lambda: ScalarFn,
        grid: &ParameterGrid,
        anchor: AnchorPair,
    ) -> Result<Self> {
        if !in_grid(grid, anchor.s_b) {
            return Err(Error::BadInput(format!(
                "anchor s_b = {} outside [{}, {}]",
                anchor.s_b,
                grid.start(),
                grid.end()
            )));
        }
        let xs = grid.values();
        let lam: Vec<f64> = xs.iter().map(|&s| lambda(s)).collect();
        check_positive(xs, &lam)?;
        let n = xs.len();
        let j = nearest(xs, anchor.s_b);
        let mut s_a = vec![0.0; n];
        s_a[j] = anchor.s_a + composite(&*lambda, anchor.s_b, xs[j], PANEL);
        for i in j + 1..n {
            s_a[i] = s_a[i - 1] + composite(&*lambda, xs[i - 1], xs[i], PANEL);
        }
        for i in (0..j).rev() {
            s_a[i] = s_a[i + 1] - composite(&*lambda, xs[i], xs[i + 1], PANEL);
        }
        Ok(Self {
            grid: grid.clone(),
            s_a,
            lambda: lam,
            density: Some(lambda),
            anchor,
        })
    }

    /// Transformation known only at the grid nodes; off-node values use cubic
    /// Hermite interpolation with slopes λ.
    pub fn from_samples(
        grid: &ParameterGrid,
        s_a: Vec<f64>,
        lambda: Vec<f64>,
        anchor: AnchorPair,
    ) -> Result<Self> {
        if s_a.len() != grid.len() || lambda.len() != grid.len() {
            return Err(Error::BadInput(
                "transformation samples do not match the grid".into(),
            ));
        }
        check_positive(grid.values(), &lambda)?;
        if let Some(w) = s_a.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::BadInput(format!(
                "s_a is not strictly increasing near s_b = {}",
                grid.values()[w]
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            s_a,
            lambda,
            density: None,
            anchor,
        })
    }

    pub fn identity(grid: &ParameterGrid) -> Self {
        Self::from_density(
            crate::curve::constant_fn(1.0),
            grid,
            AnchorPair::new(grid.start(), grid.start()),
        )
        .expect("unit density is admissible")
    }

    pub fn grid(&self) -> &ParameterGrid {
        &self.grid
    }

    pub fn s_a(&self) -> &[f64] {
        &self.s_a
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn anchor(&self) -> AnchorPair {
        self.anchor
    }

    pub fn lambda_stats(&self) -> LambdaStats {
        LambdaStats::of(&self.lambda)
    }

    pub fn map(&self, s_b: f64) -> Result<f64> {
        let xs = self.grid.values();
        if !s_b.is_finite() || !in_grid(&self.grid, s_b) {
            return Err(Error::OutOfDomain {
                s: s_b,
                min: self.grid.start(),
                max: self.grid.end(),
            });
        }
        if let Some(i) = node_index(xs, s_b) {
            return Ok(self.s_a[i]);
        }
        Ok(match &self.density {
            Some(l) => {
                let i = nearest(xs, s_b);
                self.s_a[i] + composite(&**l, xs[i], s_b, PANEL)
            }
            None => {
                let k = interval_index(xs, s_b);
                HermiteSegment {
                    x0: xs[k],
                    x1: xs[k + 1],
                    y0: self.s_a[k],
                    y1: self.s_a[k + 1],
                    d0: self.lambda[k],
                    d1: self.lambda[k + 1],
                }
                .eval(s_b)
            }
        })
    }

    /// `λ(s_b) = ds_a/ds_b`.
    pub fn density(&self, s_b: f64) -> f64 {
        match &self.density {
            Some(l) => l(s_b),
            None => match node_index(self.grid.values(), s_b) {
                Some(i) => self.lambda[i],
                None => interpolate(self.grid.values(), &self.lambda, s_b, 0),
            },
        }
    }

    pub fn density_derivative(&self, s_b: f64) -> f64 {
        match &self.density {
            Some(l) => five_point_derivative(l, s_b),
            None => interpolate(self.grid.values(), &self.lambda, s_b, 1),
        }
    }
}

/// The `s_b` at which `s_a0 + ∫_{s_b0}^{s_b} λ` reaches `s_a_end`.
pub fn fit_end(lambda: &ScalarFn, anchor: AnchorPair, s_a_end: f64) -> Result<f64> {
    let l0 = lambda(anchor.s_b);
    if !(l0 > 0.0) {
        return Err(Error::NonPositiveLambda {
            s: anchor.s_b,
            lambda: l0,
        });
    }
    let target = s_a_end - anchor.s_a;
    let g = |x: f64| composite(&**lambda, anchor.s_b, x, PANEL) - target;
    let dir = target.signum();
    let mut step = target.abs() / l0;
    let (mut lo, mut hi) = (anchor.s_b, anchor.s_b + dir * step);
    let mut tries = 0;
    while g(hi) * dir < 0.0 {
        lo = hi;
        step *= 2.0;
        hi = anchor.s_b + dir * step;
        tries += 1;
        if tries > 60 {
            return Err(Error::BadInput(format!(
                "λ integral never reaches s_a = {s_a_end}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) * dir < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A synthesized similar curve together with the transformation it realizes.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub curve: Arc<NullCurve>,
    pub transformation: Arc<VariableTransformation>,
}

fn tangent_integral(a: &NullCurve, t: &VariableTransformation, x0: f64, x1: f64) -> Result<Vec3> {
    let panels = ((x1 - x0).abs() / PANEL).ceil().max(1.0) as usize;
    let h = (x1 - x0) / panels as f64;
    let mut acc = Vec3::ZERO;
    for k in 0..panels {
        let (u0, u1) = (x0 + h * k as f64, x0 + h * (k + 1) as f64);
        acc += try_gauss_legendre_vec(|u| a.evaluate(t.map(u)?, 1), u0, u1)?;
    }
    Ok(acc)
}

/// The curve `b(s_b) = anchor_point + ∫ α_a(s_a(u)) du` over the grid of `t`,
/// with `b(s_b0) = anchor_point`.
pub fn synthesize_from_curve(
    a: Arc<NullCurve>,
    t: Arc<VariableTransformation>,
    anchor_point: Vec3,
) -> Result<Synthesis> {
    for &sa in &t.s_a {
        check_domain(&a, sa)?;
    }
    let xs = t.grid.values().to_vec();
    let n = xs.len();
    let j = nearest(&xs, t.anchor.s_b);
    let mut pos = vec![Vec3::ZERO; n];
    pos[j] = anchor_point + tangent_integral(&a, &t, t.anchor.s_b, xs[j])?;
    for i in j + 1..n {
        pos[i] = pos[i - 1] + tangent_integral(&a, &t, xs[i - 1], xs[i])?;
    }
    for i in (0..j).rev() {
        pos[i] = pos[i + 1] - tangent_integral(&a, &t, xs[i], xs[i + 1])?;
    }
    let domain = (xs[0], xs[n - 1]);
    let (src, tr) = (Arc::clone(&a), Arc::clone(&t));
    let jet =
        move |s: f64, order: usize| -> Result<Vec3> {
            let s = s.clamp(domain.0, domain.1);
            match order {
                0 => match node_index(&xs, s) {
                    Some(i) => Ok(pos[i]),
                    None => {
                        let i = nearest(&xs, s);
                        Ok(pos[i] + tangent_integral(&src, &tr, xs[i], s)?)
                    }
                },
                1 => src.evaluate(tr.map(s)?, 1),
                2 => Ok(src.evaluate(tr.map(s)?, 2)? * tr.density(s)),
                3 => {
                    let sa = tr.map(s)?;
                    let l = tr.density(s);
                    Ok(src.evaluate(sa, 2)? * tr.density_derivative(s)
                        + src.evaluate(sa, 3)? * (l * l))
                }
                _ => Err(Error::DerivativeUnavailable { order, max: 3 }),
            }
        };
    let curve = NullCurve::analytic_fallible(domain, 3, jet)?;
    Ok(Synthesis {
        curve: Arc::new(curve),
        transformation: t,
    })
}

/// Synthesizes the curve similar to `fa` under density `λ` on `s_b_grid`.
pub fn synthesize_similar(
    fa: &FramedCurve,
    lambda: ScalarFn,
    s_b_grid: &ParameterGrid,
    anchor: AnchorPair,
    anchor_point: Vec3,
) -> Result<Synthesis> {
    let t = VariableTransformation::from_density(lambda, s_b_grid, anchor)?;
    synthesize_from_curve(Arc::clone(fa.curve()), Arc::new(t), anchor_point)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Tangent,
    Normal,
    Binormal,
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostic {
    pub s_b: f64,
    pub s_a: f64,
    pub deviation: f64,
}

/// Outcome of one similarity criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub criterion: Criterion,
    pub tolerance: f64,
    pub pass: bool,
    /// Max Euclidean deviation of the compared frame vectors.
    pub vector_deviation: f64,
    /// Max deviation of the compared scalar invariant, if any.
    pub scalar_deviation: Option<f64>,
    /// Internal consistency residuals; each one is part of the verdict.
    pub residuals: BTreeMap<String, f64>,
    pub lambda: LambdaStats,
    /// Ratio criterion only: whether `f_a = f_b` held, independently of the converse.
    pub ratio_equal: Option<bool>,
    pub anchor: Option<AnchorPair>,
    pub points: usize,
    pub worst: Diagnostic,
    pub samples: Vec<Diagnostic>,
}

impl SimilarityReport {
    /// All deviations recorded in the report.
    pub fn deviations(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.vector_deviation)
            .chain(self.scalar_deviation)
            .chain(self.residuals.values().copied())
    }

    fn finish(mut self) -> Self {
        let tol = self.tolerance;
        let pass = self.deviations().all(|d| d <= tol);
        self.pass = pass;
        self
    }
}

fn max_dev(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m: f64, v| {
        if v.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(v)
        }
    })
}

struct Row {
    s_b: f64,
    s_a: f64,
    vector: f64,
    scalar: f64,
    lambda: f64,
    extra: Vec<f64>,
}

fn assemble(
    criterion: Criterion,
    tol: f64,
    rows: &[Row],
    with_scalar: bool,
    extra_names: &[&str],
    anchor: Option<AnchorPair>,
) -> SimilarityReport {
    let n = rows.len();
    let diag = |r: &Row| Diagnostic {
        s_b: r.s_b,
        s_a: r.s_a,
        deviation: r.vector,
    };
    let mut worst = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.vector.is_nan() || r.vector > rows[worst].vector {
            worst = i;
            if r.vector.is_nan() {
                break;
            }
        }
    }
    let mut picks: Vec<usize> = (0..5).map(|k| k * (n - 1) / 4).collect();
    picks.dedup();
    let residuals = extra_names
        .iter()
        .enumerate()
        .map(|(k, name)| (name.to_string(), max_dev(rows.iter().map(|r| r.extra[k]))))
        .collect();
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    SimilarityReport {
        criterion,
        tolerance: tol,
        pass: false,
        vector_deviation: max_dev(rows.iter().map(|r| r.vector)),
        scalar_deviation: with_scalar.then(|| max_dev(rows.iter().map(|r| r.scalar))),
        residuals,
        lambda: LambdaStats::of(&lambdas),
        ratio_equal: None,
        anchor,
        points: n,
        worst: diag(&rows[worst]),
        samples: picks.into_iter().map(|i| diag(&rows[i])).collect(),
    }
}

/// Max over `b`'s grid of `‖α_a(s_a(s_b)) − α_b(s_b)‖`.
pub fn check_tangent_similarity(
    fa: &FramedCurve,
    fb: &FramedCurve,
    t: &VariableTransformation,
    tol: f64,
) -> Result<SimilarityReport> {
    let rows = fb
        .samples()
        .par_iter()
        .map(|b| {
            let s_a = t.map(b.s)?;
            check_domain(fa.curve(), s_a)?;
            let alpha_a = fa.curve().evaluate(s_a, 1)?;
            Ok(Row {
                s_b: b.s,
                s_a,
                vector: (alpha_a - b.alpha).euclid_norm(),
                scalar: 0.0,
                lambda: t.density(b.s),
                extra: Vec::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(Criterion::Tangent, tol, &rows, false, &[], Some(t.anchor)).finish())
}

#[derive(Debug, Clone, Copy)]
enum Invariant {
    Kappa,
    Tau,
}

impl Invariant {
    fn of(self, f: &FrameSample) -> f64 {
        match self {
            Invariant::Kappa => f.kappa,
            Invariant::Tau => f.tau,
        }
    }

    fn check(self, f: &FrameSample) -> Result<()> {
        match self {
            Invariant::Kappa if !(f.kappa.abs() >= EPS_KAPPA) => {
                Err(Error::KappaVanishes { s: f.s })
            }
            Invariant::Tau if !(f.tau.abs() >= EPS_TAU) => Err(Error::TauVanishes { s: f.s }),
            _ => Ok(()),
        }
    }
}

fn require_anchor(
    fa: &FramedCurve,
    fb: &FramedCurve,
    anchor: Option<AnchorPair>,
) -> Result<AnchorPair> {
    let anchor = anchor.ok_or(Error::AnchorRequired)?;
    check_domain(fa.curve(), anchor.s_a)?;
    if !in_grid(fb.grid(), anchor.s_b) {
        return Err(Error::OutOfDomain {
            s: anchor.s_b,
            min: fb.grid().start(),
            max: fb.grid().end(),
        });
    }
    Ok(anchor)
}

/// Solves `ds_a/ds_b = I_b(s_b) / I_a(s_a)` from the anchor over `b`'s grid,
/// where `I` is curvature or torsion.
///
/// An overshoot of `a`'s domain by at most `tol` is clamped to the domain end;
/// a larger one is a [`Error::DomainOverflow`].
fn infer_transformation(
    fa: &FramedCurve,
    fb: &FramedCurve,
    anchor: AnchorPair,
    which: Invariant,
    tol: f64,
) -> Result<VariableTransformation> {
    for f in fa.samples() {
        which.check(f)?;
    }
    let (lo, hi) = fa.curve().domain();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let rhs = |s_b: f64, y: &[f64; 1]| -> [f64; 1] {
        if failure.borrow().is_some() {
            return [0.0];
        }
        let eval = || -> Result<f64> {
            let fa_s = fa.frame_at(y[0].clamp(lo, hi))?;
            which.check(&fa_s)?;
            let fb_s = fb.frame_at(s_b.clamp(fb.grid().start(), fb.grid().end()))?;
            Ok(which.of(&fb_s) / which.of(&fa_s))
        };
        match eval() {
            Ok(l) => [l],
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                [0.0]
            }
        }
    };
    let xs = fb.grid().values();
    let split = xs.partition_point(|x| *x < anchor.s_b);
    let backward: Vec<f64> = xs[..split].iter().rev().copied().collect();
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-13,
        ..OdeOptions::default()
    };
    let back = integrate(rhs, anchor.s_b, [anchor.s_a], &backward, &opts, |_| {});
    let fwd = integrate(rhs, anchor.s_b, [anchor.s_a], &xs[split..], &opts, |_| {});
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let mut s_a: Vec<f64> = back?.iter().rev().map(|y| y[0]).collect();
    s_a.extend(fwd?.iter().map(|y| y[0]));
    for sa in s_a.iter_mut() {
        if *sa < lo - tol || *sa > hi + tol {
            return Err(Error::DomainOverflow {
                s_a: *sa,
                min: lo,
                max: hi,
            });
        }
        *sa = sa.clamp(lo, hi);
    }
    let lambda = xs
        .par_iter()
        .zip(&s_a)
        .zip(fb.samples())
        .map(|((&s_b, &sa), b)| {
            let a = fa.frame_at(sa)?;
            let l = which.of(b) / which.of(&a);
            if !(l > 0.0) {
                return Err(Error::NonPositiveLambda { s: s_b, lambda: l });
            }
            Ok(l)
        })
        .collect::<Result<Vec<f64>>>()?;
    VariableTransformation::from_samples(fb.grid(), s_a, lambda, anchor)
}

/// Principal-normal criterion with `λ = κ_b/κ_a`.
///
/// Compares `β_a(s_a(s_b))` with `β_b(s_b)`. Residuals: the scaled normal
/// identity `‖κ_a λ β_a − κ_b β_b‖` and the tangent cross-check; the scalar
/// deviation is `|τ_b − λ τ_a|`.
pub fn normal_criterion(
    fa: &FramedCurve,
    fb: &FramedCurve,
    anchor: Option<AnchorPair>,
    tol: f64,
) -> Result<(SimilarityReport, VariableTransformation)> {
    let anchor = require_anchor(fa, fb, anchor)?;
    let t = infer_transformation(fa, fb, anchor, Invariant::Kappa, tol)?;
    let rows = frame_rows(fa, fb, &t, |a, b, l| {
        (
            (a.beta - b.beta).euclid_norm(),
            (b.tau - l * a.tau).abs(),
            vec![
                (a.beta * (a.kappa * l) - b.beta * b.kappa).euclid_norm(),
                (a.alpha - b.alpha).euclid_norm(),
            ],
        )
    })?;
    let report = assemble(
        Criterion::Normal,
        tol,
        &rows,
        true,
        &["scaled_normal", "tangent"],
        Some(anchor),
    );
    Ok((report.finish(), t))
}

/// Binormal criterion with `λ = τ_b/τ_a`.
///
/// Compares `γ`; residuals are the normal equality and the recovery of `α`
/// from `(γ_b, β_b)`; the scalar deviation is `|κ_b − λ κ_a|`.
pub fn binormal_criterion(
    fa: &FramedCurve,
    fb: &FramedCurve,
    anchor: Option<AnchorPair>,
    tol: f64,
) -> Result<(SimilarityReport, VariableTransformation)> {
    let anchor = require_anchor(fa, fb, anchor)?;
    let t = infer_transformation(fa, fb, anchor, Invariant::Tau, tol)?;
    let rows = frame_rows(fa, fb, &t, |a, b, l| {
        (
            (a.gamma - b.gamma).euclid_norm(),
            (b.kappa - l * a.kappa).abs(),
            vec![
                (a.beta - b.beta).euclid_norm(),
                (complete_null_frame(&b.gamma, &b.beta) - a.alpha).euclid_norm(),
            ],
        )
    })?;
    let report = assemble(
        Criterion::Binormal,
        tol,
        &rows,
        true,
        &["normal", "tangent_recovery"],
        Some(anchor),
    );
    Ok((report.finish(), t))
}

fn frame_rows<F>(
    fa: &FramedCurve,
    fb: &FramedCurve,
    t: &VariableTransformation,
    cmp: F,
) -> Result<Vec<Row>>
where
    F: Fn(&FrameSample, &FrameSample, f64) -> (f64, f64, Vec<f64>) + Sync,
{
    fb.samples()
        .par_iter()
        .zip(t.s_a())
        .zip(t.lambda())
        .map(|((b, &s_a), &l)| {
            let a = fa.frame_at(s_a)?;
            let (vector, scalar, extra) = cmp(&a, b, l);
            Ok(Row {
                s_b: b.s,
                s_a,
                vector,
                scalar,
                lambda: l,
                extra,
            })
        })
        .collect()
}

fn frame_distance(a: &FrameSample, b: &FrameSample) -> f64 {
    [a.alpha - b.alpha, a.beta - b.beta, a.gamma - b.gamma]
        .iter()
        .map(Vec3::euclid_norm)
        .fold(0.0, f64::max)
}

/// Curvature-ratio criterion: points are matched by equal total curvature
/// from the anchor, and `f_a` is compared with `f_b`.
///
/// Equal ratios only imply equal tangents for equal initial data, so the
/// verdict also requires the frames to agree at the anchor; in that case the
/// tangent equation is solved from `b`'s anchor frame with `b`'s ratio and the
/// solution is compared with both tangent fields.
pub fn ratio_criterion(
    fa: &FramedCurve,
    fb: &FramedCurve,
    anchor: Option<AnchorPair>,
    tol: f64,
) -> Result<SimilarityReport> {
    let anchor = require_anchor(fa, fb, anchor)?;
    let ca = total_curvature(fa)?;
    let cb = total_curvature(fb)?;
    let fa0 = fa.frame_at(anchor.s_a)?;
    let fb0 = fb.frame_at(anchor.s_b)?;
    let l0 = fb0.kappa / fa0.kappa;
    if !(l0 > 0.0) {
        return Err(Error::NonPositiveLambda {
            s: anchor.s_b,
            lambda: l0,
        });
    }
    let (phi_a0, phi_b0) = (ca.phi_at(anchor.s_a), cb.phi_at(anchor.s_b));
    let (lo, hi) = fa.curve().domain();
    let matched = fb
        .samples()
        .par_iter()
        .zip(cb.phi())
        .map(|(_, &phi_b)| {
            let phi = phi_b - phi_b0 + phi_a0;
            let s_a = ca.s_at(phi).map_err(|_| Error::DomainOverflow {
                s_a: phi,
                min: lo,
                max: hi,
            })?;
            let a = fa.frame_at(s_a)?;
            Ok((s_a, a))
        })
        .collect::<Result<Vec<_>>>()?;

    let anchor_frame = frame_distance(&fa0, &fb0);
    let converse = if anchor_frame <= tol {
        let n = cb.phi().len();
        let ascending: Vec<f64> = if cb.direction() > 0.0 {
            cb.phi().to_vec()
        } else {
            cb.phi().iter().rev().copied().collect()
        };
        let (f, df) = ratio_functions(&cb)?;
        let field = solve_tangent_ode(
            &f,
            &df,
            &TangentInit::from_frame(&fb0, phi_b0),
            &ParameterGrid::new(ascending)?,
            &TangentOdeOptions::default(),
        )?;
        let k = |i: usize| if cb.direction() > 0.0 { i } else { n - 1 - i };
        Some(
            (0..n)
                .map(|i| {
                    let sol = field.alpha[k(i)];
                    (
                        (sol - matched[i].1.alpha).euclid_norm(),
                        (sol - fb.samples()[i].alpha).euclid_norm(),
                    )
                })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    let rows: Vec<Row> = fb
        .samples()
        .iter()
        .zip(&matched)
        .enumerate()
        .map(|(i, (b, (s_a, a)))| {
            let extra = match &converse {
                Some(c) => vec![c[i].0, c[i].1],
                None => Vec::new(),
            };
            Row {
                s_b: b.s,
                s_a: *s_a,
                vector: (b.ratio() - a.ratio()).abs(),
                scalar: (b.ratio() - a.ratio()).abs(),
                lambda: b.kappa / a.kappa,
                extra,
            }
        })
        .collect();
    let names: &[&str] = if converse.is_some() {
        &["converse_a", "converse_b"]
    } else {
        &[]
    };
    let mut report = assemble(Criterion::Ratio, tol, &rows, true, names, Some(anchor));
    let ratio_dev = report.scalar_deviation.unwrap_or(f64::NAN);
    report.ratio_equal = Some(ratio_dev <= tol);
    report.residuals.insert("anchor_frame".into(), anchor_frame);
    report.vector_deviation = max_dev(report.residuals.values().copied());
    Ok(report.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    /// max `|κ_b − λ κ_a|`.
    pub kappa_residual: f64,
    /// max `|τ_b − λ τ_a|`.
    pub tau_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub points: usize,
}

/// Checks `κ_b = λ κ_a` and `τ_b = λ τ_a` at corresponding points.
pub fn curvature_scaling_check(
    fa: &FramedCurve,
    fb: &FramedCurve,
    t: &VariableTransformation,
    tol: f64,
) -> Result<ScalingReport> {
    let rows = fb
        .samples()
        .par_iter()
        .map(|b| {
            let s_a = t.map(b.s)?;
            check_domain(fa.curve(), s_a)?;
            let a = fa.frame_at(s_a)?;
            let l = t.density(b.s);
            Ok(((b.kappa - l * a.kappa).abs(), (b.tau - l * a.tau).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa_residual = max_dev(rows.iter().map(|r| r.0));
    let tau_residual = max_dev(rows.iter().map(|r| r.1));
    Ok(ScalingReport {
        kappa_residual,
        tau_residual,
        tolerance: tol,
        pass: kappa_residual <= tol && tau_residual <= tol,
        points: rows.len(),
    })
}

/// Linear dependence of the principal normals at corresponding points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BertrandReport {
    /// `β_a ∧ β_b = 0` within tolerance everywhere.
    pub dependent: bool,
    /// Dependent with factor `+1` everywhere (`β_a = β_b`).
    pub unit_factor: bool,
    /// max `‖β_a ∧ β_b‖`.
    pub max_cross: f64,
    /// max `|c − 1|` over the pointwise factors.
    pub max_factor_deviation: f64,
    pub tolerance: f64,
    /// Pointwise factor `c = <β_a, β_b>` with `β_b ≈ c β_a`.
    pub factor: Vec<f64>,
}

pub fn is_bertrand_pair(
    fa: &FramedCurve,
    fb: &FramedCurve,
    t: &VariableTransformation,
    tol: f64,
) -> Result<BertrandReport> {
    let rows = fb
        .samples()
        .par_iter()
        .map(|b| {
            let s_a = t.map(b.s)?;
            check_domain(fa.curve(), s_a)?;
            let a = fa.frame_at(s_a)?;
            Ok((a.beta.cross(&b.beta).euclid_norm(), a.beta.dot(&b.beta)))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_cross = max_dev(rows.iter().map(|r| r.0));
    let max_factor_deviation = max_dev(rows.iter().map(|r| (r.1 - 1.0).abs()));
    let dependent = max_cross <= tol;
    Ok(BertrandReport {
        dependent,
        unit_factor: dependent && max_factor_deviation <= tol,
        max_cross,
        max_factor_deviation,
        tolerance: tol,
        factor: rows.into_iter().map(|r| r.1).collect(),
    })
}

/// Heuristic: the `s_a` whose frame is closest to `b`'s frame at `s_b0`,
/// from a coarse scan of `candidates` points refined by golden-section search.
pub fn search_anchor(
    fa: &FramedCurve,
    fb: &FramedCurve,
    s_b0: f64,
    candidates: usize,
) -> Result<AnchorPair> {
    let target = fb.frame_at(s_b0)?;
    let (lo, hi) = fa.curve().domain();
    let cost = |s: f64| {
        fa.frame_at(s)
            .map(|a| frame_distance(&a, &target))
            .unwrap_or(f64::INFINITY)
    };
    let m = candidates.max(2);
    let h = (hi - lo) / (m - 1) as f64;
    let best = (0..m)
        .map(|i| lo + h * i as f64)
        .map(|s| (s, cost(s)))
        .fold(
            (lo, f64::INFINITY),
            |acc, c| if c.1 < acc.1 { c } else { acc },
        );
    let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if cost(x1) <= cost(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(AnchorPair::new(0.5 * (a + b), s_b0))
}
