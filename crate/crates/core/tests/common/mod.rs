#![allow(dead_code)]

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nullframe::curve::helix1;
use nullframe::frame::{frame_curve, integrate_frenet, FrameSample, FramedCurve, FrenetOptions};
use nullframe::lorentz::{LorentzTransform, Vec3};
use nullframe::profile::Profile;
use nullframe::similarity::{fit_end, synthesize_similar, AnchorPair, VariableTransformation};
use nullframe::ParameterGrid;

pub const A_SAMPLES: usize = 401;
pub const B_SAMPLES: usize = 301;

/// Values of H1 = (t, cos t, sin t) from the symbolic oracle.
pub mod h1 {
    use nullframe::lorentz::Vec3;

    pub const KAPPA: f64 = -1.0;
    pub const TAU: f64 = -0.5;
    pub const RATIO: f64 = 0.5;

    pub fn position(t: f64) -> Vec3 {
        Vec3::new(t, t.cos(), t.sin())
    }
    pub fn alpha(t: f64) -> Vec3 {
        Vec3::new(1.0, -t.sin(), t.cos())
    }
    pub fn beta(t: f64) -> Vec3 {
        Vec3::new(0.0, t.cos(), t.sin())
    }
    pub fn gamma(t: f64) -> Vec3 {
        Vec3::new(-0.5, -0.5 * t.sin(), 0.5 * t.cos())
    }
}

/// Source curves `a`, all on `[0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    H1,
    Helix(f64, f64),
    Frenet(Profile, Profile),
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::H1 => "H1".into(),
            Source::Helix(k, t) => format!("helix({k},{t})"),
            Source::Frenet(k, t) => format!("frenet({k};{t})"),
        }
    }

    pub fn build(&self) -> FramedCurve {
        let grid = ParameterGrid::uniform(0.0, TAU, A_SAMPLES).unwrap();
        match *self {
            Source::H1 => frame_curve(Arc::new(helix1((0.0, TAU)).unwrap()), &grid).unwrap(),
            Source::Helix(k, t) => frenet(Profile::Constant(k), Profile::Constant(t), &grid),
            Source::Frenet(k, t) => frenet(k, t, &grid),
        }
    }
}

fn frenet(kappa: Profile, tau: Profile, grid: &ParameterGrid) -> FramedCurve {
    let init = FrameSample::canonical(0.0, kappa.eval(0.0), tau.eval(0.0));
    integrate_frenet(
        kappa.to_fn(),
        tau.to_fn(),
        &init,
        Vec3::new(0.0, 1.0, 0.0),
        grid,
        &FrenetOptions::default(),
    )
    .unwrap()
}

pub const GENERIC_A: Source = Source::Frenet(
    Profile::Sine {
        a: 1.2,
        b: 0.3,
        c: 1.0,
    },
    Profile::Affine { a: 0.5, b: 0.1 },
);
pub const GENERIC_B: Source = Source::Frenet(
    Profile::Affine { a: -1.0, b: -0.1 },
    Profile::Sine {
        a: -0.6,
        b: 0.2,
        c: 2.0,
    },
);

/// Helix with `κτ < 0`.
pub const HYPERBOLIC: Source = Source::Helix(-1.5, 0.8);

pub const DENSITIES: [Profile; 6] = [
    Profile::Constant(1.0),
    Profile::Constant(2.0),
    Profile::Constant(0.5),
    Profile::TwoPlusSin,
    Profile::Affine { a: 1.0, b: 0.2 },
    Profile::Sine {
        a: 1.5,
        b: 0.4,
        c: 2.0,
    },
];

/// How `b` departs from an exact similar image of `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Twist {
    None,
    /// `b` is moved by a Lorentz transformation (rotated frames).
    Isometry(LorentzTransform),
    /// `b` is synthesized from a curve with the same curvature and initial
    /// frame but a different torsion, so `f_b ≠ f_a`.
    OtherRatio(Source),
}

#[derive(Debug, Clone, Copy)]
pub struct PairDef {
    pub source: Source,
    pub lambda: Profile,
    pub anchor: AnchorPair,
    /// `s_a` reached at the end of `b`'s grid.
    pub s_a_end: f64,
    pub twist: Twist,
}

pub struct Pair {
    pub label: String,
    pub similar: bool,
    pub fa: FramedCurve,
    pub fb: FramedCurve,
    pub anchor: AnchorPair,
    /// Transformation used to build `b` (for twisted pairs, the one applied
    /// to the undisturbed curve).
    pub t: Arc<VariableTransformation>,
    /// The curve `b` is actually a similar image of, when that is not `fa`.
    pub origin: Option<FramedCurve>,
}

fn similar_defs() -> Vec<PairDef> {
    let d = DENSITIES;
    // Frames of helices with f < 0 grow exponentially, so that source is
    // kept to a shorter stretch where absolute tolerances stay meaningful.
    let plain = |source, lambda: Profile, s_a0: f64, s_b0: f64| PairDef {
        source,
        lambda,
        anchor: AnchorPair::new(s_a0, s_b0),
        s_a_end: if source == HYPERBOLIC { 2.5 } else { 6.0 },
        twist: Twist::None,
    };
    vec![
        plain(Source::H1, d[1], 0.0, 0.0),
        plain(Source::H1, d[2], 0.0, 0.0),
        plain(Source::H1, d[3], 0.0, 0.0),
        plain(Source::H1, d[0], 1.0, 0.5),
        plain(Source::Helix(2.0, 1.0), d[1], 0.0, 0.0),
        plain(Source::Helix(2.0, 1.0), d[3], 1.2, 0.3),
        plain(Source::Helix(2.0, 1.0), d[4], 0.0, 0.0),
        plain(Source::Helix(1.0, 0.3), d[2], 0.5, 0.0),
        plain(Source::Helix(1.0, 0.3), d[5], 0.0, 0.0),
        plain(Source::Helix(1.0, 0.3), d[0], 0.0, 0.0),
        plain(HYPERBOLIC, d[1], 0.0, 0.0),
        plain(HYPERBOLIC, d[4], 1.0, 0.5),
        plain(HYPERBOLIC, d[5], 0.0, 0.0),
        plain(GENERIC_A, d[0], 0.0, 0.0),
        plain(GENERIC_A, d[3], 0.0, 0.0),
        plain(GENERIC_A, d[4], 0.8, 0.2),
        plain(GENERIC_A, d[2], 0.0, 0.0),
        plain(GENERIC_B, d[1], 0.0, 0.0),
        plain(GENERIC_B, d[5], 1.0, 0.4),
        plain(GENERIC_B, d[3], 0.0, 0.0),
    ]
}

fn non_similar_defs() -> Vec<PairDef> {
    let d = DENSITIES;
    let twisted = |source, lambda: Profile, twist| PairDef {
        source,
        lambda,
        anchor: AnchorPair::new(0.0, 0.0),
        s_a_end: 2.0,
        twist,
    };
    let iso = |l| Twist::Isometry(l);
    let rot = LorentzTransform::rotation;
    let other = Twist::OtherRatio;
    vec![
        twisted(Source::H1, d[1], iso(rot(0.7))),
        twisted(Source::H1, d[0], iso(rot(PI))),
        twisted(Source::H1, d[3], iso(LorentzTransform::boost_x2(0.4))),
        twisted(Source::Helix(2.0, 1.0), d[1], iso(rot(0.3))),
        twisted(
            Source::Helix(1.0, 0.3),
            d[4],
            iso(LorentzTransform::boost_x3(0.5)),
        ),
        twisted(HYPERBOLIC, d[0], iso(rot(1.5))),
        twisted(GENERIC_A, d[0], iso(rot(0.5))),
        twisted(GENERIC_A, d[3], iso(LorentzTransform::boost_x2(0.3))),
        twisted(GENERIC_B, d[2], iso(rot(2.5))),
        twisted(GENERIC_B, d[0], iso(LorentzTransform::boost_x3(-0.4))),
        twisted(Source::H1, d[0], other(Source::Helix(-1.0, -0.7))),
        twisted(Source::H1, d[1], other(Source::Helix(-1.0, -0.7))),
        twisted(
            Source::Helix(2.0, 1.0),
            d[0],
            other(Source::Helix(2.0, 1.5)),
        ),
        twisted(
            Source::Helix(2.0, 1.0),
            d[3],
            other(Source::Helix(2.0, 1.5)),
        ),
        twisted(
            Source::Helix(1.0, 0.3),
            d[2],
            other(Source::Helix(1.0, 0.4)),
        ),
        twisted(HYPERBOLIC, d[4], other(Source::Helix(-1.5, 0.4))),
        twisted(
            GENERIC_A,
            d[0],
            other(Source::Frenet(
                Profile::Sine {
                    a: 1.2,
                    b: 0.3,
                    c: 1.0,
                },
                Profile::Affine { a: 0.7, b: 0.1 },
            )),
        ),
        twisted(
            GENERIC_A,
            d[5],
            other(Source::Frenet(
                Profile::Sine {
                    a: 1.2,
                    b: 0.3,
                    c: 1.0,
                },
                Profile::Affine { a: 0.7, b: 0.1 },
            )),
        ),
        twisted(
            GENERIC_B,
            d[1],
            other(Source::Frenet(
                Profile::Affine { a: -1.0, b: -0.1 },
                Profile::Sine {
                    a: -0.75,
                    b: 0.2,
                    c: 2.0,
                },
            )),
        ),
        twisted(
            GENERIC_B,
            d[3],
            other(Source::Frenet(
                Profile::Affine { a: -1.0, b: -0.1 },
                Profile::Sine {
                    a: -0.75,
                    b: 0.2,
                    c: 2.0,
                },
            )),
        ),
    ]
}

pub fn build_pair(def: &PairDef) -> Pair {
    let fa = def.source.build();
    let lambda = def.lambda.to_fn();
    let end = fit_end(&lambda, def.anchor, def.s_a_end).unwrap();
    let b_grid = ParameterGrid::uniform(0.0, end, B_SAMPLES).unwrap();
    let image_of = |fc: &FramedCurve| {
        let p = fc.curve().evaluate(def.anchor.s_a, 0).unwrap();
        synthesize_similar(fc, lambda.clone(), &b_grid, def.anchor, p).unwrap()
    };
    let mut origin = None;
    let (b, t, similar, twist) = match def.twist {
        Twist::None => {
            let syn = image_of(&fa);
            (syn.curve, syn.transformation, true, String::new())
        }
        Twist::Isometry(l) => {
            let syn = image_of(&fa);
            let moved = syn.curve.transformed(l, Vec3::new(0.1, -0.2, 0.3));
            (Arc::new(moved), syn.transformation, false, " moved".into())
        }
        Twist::OtherRatio(other) => {
            let fo = other.build();
            let syn = image_of(&fo);
            origin = Some(fo);
            (
                syn.curve,
                syn.transformation,
                false,
                format!(" from {}", other.label()),
            )
        }
    };
    let fb = frame_curve(b, &b_grid).unwrap();
    Pair {
        label: format!(
            "{} λ={} anchor=({},{}){}",
            def.source.label(),
            def.lambda,
            def.anchor.s_a,
            def.anchor.s_b,
            twist
        ),
        similar,
        fa,
        fb,
        anchor: def.anchor,
        t,
        origin,
    }
}

pub fn pair_defs() -> (Vec<PairDef>, Vec<PairDef>) {
    (similar_defs(), non_similar_defs())
}
