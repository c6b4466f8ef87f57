//! Null geodesics, null helices and torsion-free null curves, and checks that
//! each family is closed under similar-curve synthesis.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::curve::{constant_fn, straight_line, NullCurve, ScalarFn};
use crate::error::{Error, Result};
use crate::frame::{
    classify, classify_curve, frame_curve, integrate_frenet, sample_stdev, CurveClass, FrameSample,
    FramedCurve, FrenetOptions, EPS_KAPPA,
};
use crate::grid::ParameterGrid;
use crate::lorentz::{causal_character_relative, CausalCharacter, Vec3, DEFAULT_EPS_NULL};
use crate::profile::Profile;
use crate::similarity::{
    curvature_scaling_check, fit_end, synthesize_from_curve, AnchorPair, VariableTransformation,
};
use crate::stencil::derivative_stencil_vec;

/// `a(s) = p0 + s d` for a nonzero null direction `d`.
pub fn make_null_geodesic(p0: Vec3, d: Vec3, domain: (f64, f64)) -> Result<NullCurve> {
    if !d.is_finite() || causal_character_relative(&d, DEFAULT_EPS_NULL) != CausalCharacter::Null {
        return Err(Error::NotNullDirection(d.to_array()));
    }
    straight_line(p0, d, domain)
}

/// Null helix with constant curvature `kappa0` and torsion `tau0`, integrated
/// from `initial` at the first grid point.
pub fn make_null_helix(
    kappa0: f64,
    tau0: f64,
    initial: &FrameSample,
    origin: Vec3,
    grid: &ParameterGrid,
) -> Result<FramedCurve> {
    if !(kappa0.abs() >= EPS_KAPPA) {
        return Err(Error::KappaVanishes { s: grid.start() });
    }
    let init = FrameSample {
        s: grid.start(),
        kappa: kappa0,
        tau: tau0,
        ..*initial
    };
    integrate_frenet(
        constant_fn(kappa0),
        constant_fn(tau0),
        &init,
        origin,
        grid,
        &FrenetOptions::default(),
    )
}

/// Null curve with the given curvature and zero torsion.
pub fn make_torsion_free(
    kappa: ScalarFn,
    initial: &FrameSample,
    origin: Vec3,
    grid: &ParameterGrid,
) -> Result<FramedCurve> {
    let init = FrameSample {
        s: grid.start(),
        kappa: kappa(grid.start()),
        tau: 0.0,
        ..*initial
    };
    integrate_frenet(
        kappa,
        constant_fn(0.0),
        &init,
        origin,
        grid,
        &FrenetOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Geodesic,
    TorsionFree,
    Helix,
}

/// Generator parameters of a family member.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Geodesic {
        point: Vec3,
        direction: Vec3,
    },
    Helix {
        kappa: f64,
        tau: f64,
        initial: FrameSample,
        origin: Vec3,
    },
    TorsionFree {
        kappa: Profile,
        initial: FrameSample,
        origin: Vec3,
    },
}

/// A generated member: geodesics carry no Cartan frame.
#[derive(Debug, Clone)]
pub enum FamilyCurve {
    Line(Arc<NullCurve>),
    Framed(FramedCurve),
}

impl FamilyCurve {
    pub fn curve(&self) -> &Arc<NullCurve> {
        match self {
            FamilyCurve::Line(c) => c,
            FamilyCurve::Framed(f) => f.curve(),
        }
    }
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::Geodesic { .. } => FamilyKind::Geodesic,
            FamilySpec::Helix { .. } => FamilyKind::Helix,
            FamilySpec::TorsionFree { .. } => FamilyKind::TorsionFree,
        }
    }

    pub fn generate(&self, grid: &ParameterGrid) -> Result<FamilyCurve> {
        Ok(match self {
            FamilySpec::Geodesic { point, direction } => FamilyCurve::Line(Arc::new(
                make_null_geodesic(*point, *direction, (grid.start(), grid.end()))?,
            )),
            FamilySpec::Helix {
                kappa,
                tau,
                initial,
                origin,
            } => FamilyCurve::Framed(make_null_helix(*kappa, *tau, initial, *origin, grid)?),
            FamilySpec::TorsionFree {
                kappa,
                initial,
                origin,
            } => FamilyCurve::Framed(make_torsion_free(kappa.to_fn(), initial, *origin, grid)?),
        })
    }
}

/// Outcome of a closure check. `checks` enter the verdict, `info` is reported only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub kind: FamilyKind,
    pub constant_lambda: bool,
    pub tolerance: f64,
    pub pass: bool,
    pub checks: BTreeMap<String, f64>,
    pub info: BTreeMap<String, f64>,
    pub classes: Vec<CurveClass>,
    pub s_b_domain: (f64, f64),
}

/// Synthesizes `b` from the family member on `grid` under density `λ`
/// (anchored at the grid start, `b` covering the same `s_a` range) and checks
/// that `b` stays in the family.
///
/// Geodesic: `b''` vanishes (analytically and by differencing) and `b` is a
/// line. Torsion-free: `τ_b` vanishes. Helix with constant λ: `κ_b`, `τ_b`
/// constant. Helix with variable λ: only `f_b = f_a` is asserted.
pub fn closure_check(
    spec: &FamilySpec,
    grid: &ParameterGrid,
    lambda: ScalarFn,
    tol: f64,
) -> Result<ClosureReport> {
    let member = spec.generate(grid)?;
    let a = Arc::clone(member.curve());
    let anchor = AnchorPair::new(grid.start(), grid.start());
    let end = fit_end(&lambda, anchor, grid.end())?;
    let b_grid = ParameterGrid::uniform(grid.start(), end, grid.len())?;
    let t = Arc::new(VariableTransformation::from_density(
        lambda, &b_grid, anchor,
    )?);
    let lam = t.lambda();
    let (lmin, lmax) = lam
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
            (lo.min(*l), hi.max(*l))
        });
    let constant_lambda = lmax - lmin <= 1e-12 * lmax.abs();
    let b =
        synthesize_from_curve(Arc::clone(&a), Arc::clone(&t), a.evaluate(grid.start(), 0)?)?.curve;

    let mut checks = BTreeMap::new();
    let mut info = BTreeMap::new();
    let nullity = b.nullity_check(&b_grid, 1e-6)?;
    checks.insert("nullity".to_string(), nullity.max_residual);
    let classes = match &member {
        FamilyCurve::Line(_) => {
            let xs = b_grid.values();
            let mut d2 = 0.0f64;
            let mut pos = Vec::with_capacity(xs.len());
            let (p0, v0) = (b.evaluate(xs[0], 0)?, b.evaluate(xs[0], 1)?);
            let mut line = 0.0f64;
            for &s in xs {
                d2 = d2.max(b.evaluate(s, 2)?.max_abs());
                let p = b.evaluate(s, 0)?;
                line = line.max((p - (p0 + v0 * (s - xs[0]))).max_abs());
                pos.push(p);
            }
            let fd = derivative_stencil_vec(&pos, xs, 2)?
                .iter()
                .map(Vec3::max_abs)
                .fold(0.0, f64::max);
            checks.insert("second_derivative".into(), d2);
            checks.insert("second_derivative_fd".into(), fd);
            checks.insert("line_deviation".into(), line);
            classify_curve(Arc::clone(&b), &b_grid, tol)?
        }
        FamilyCurve::Framed(fa) => {
            let fb = frame_curve(Arc::clone(&b), &b_grid)?;
            let scaling = curvature_scaling_check(fa, &fb, &t, tol)?;
            info.insert("kappa_scaling".into(), scaling.kappa_residual);
            info.insert("tau_scaling".into(), scaling.tau_residual);
            let (kb, tb) = (fb.kappas(), fb.taus());
            let sk = sample_stdev(&kb);
            let st = sample_stdev(&tb);
            match spec {
                FamilySpec::TorsionFree { .. } => {
                    checks.insert(
                        "max_abs_tau".into(),
                        tb.iter().map(|x| x.abs()).fold(0.0, f64::max),
                    );
                }
                FamilySpec::Helix { .. } => {
                    let mut f_dev = 0.0f64;
                    for (smp, sa) in fb.samples().iter().zip(t.s_a()) {
                        f_dev = f_dev.max((smp.ratio() - fa.frame_at(*sa)?.ratio()).abs());
                    }
                    if constant_lambda {
                        checks.insert("stdev_kappa".into(), sk);
                        checks.insert("stdev_tau".into(), st);
                        info.insert("ratio_deviation".into(), f_dev);
                    } else {
                        checks.insert("ratio_deviation".into(), f_dev);
                        info.insert("stdev_kappa".into(), sk);
                        info.insert("stdev_tau".into(), st);
                    }
                }
                FamilySpec::Geodesic { .. } => unreachable!("geodesics have no frame"),
            }
            classify(&fb, tol)
        }
    };
    let pass = checks.values().all(|v| *v <= tol);
    Ok(ClosureReport {
        kind: spec.kind(),
        constant_lambda,
        tolerance: tol,
        pass,
        checks,
        info,
        classes,
        s_b_domain: (b_grid.start(), b_grid.end()),
    })
}
