//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::TAU;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use common::{build_pair, h1, pair_defs, Pair};
use nullframe::curve::{constant_fn, helix1, scalar_fn, NullCurve};
use nullframe::families::{closure_check, FamilySpec};
use nullframe::frame::{
    compute_frame_at, frame_curve, frenet_residuals, integrate_frenet, FrameSample, FramedCurve,
    FrenetOptions,
};
use nullframe::lorentz::{lorentz_cross, lorentz_dot, Vec3};
use nullframe::phi::{solve_tangent_ode, tangent_ode_residual, total_curvature, TangentInit};
use nullframe::profile::Profile;
use nullframe::similarity::{
    binormal_criterion, check_tangent_similarity, curvature_scaling_check, fit_end,
    is_bertrand_pair, normal_criterion, ratio_criterion, synthesize_similar, AnchorPair,
};
use nullframe::ParameterGrid;

const SUITE_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x) })
}

fn h1_grid() -> ParameterGrid {
    ParameterGrid::uniform(0.0, TAU, 2001).unwrap()
}

fn h1_analytic() -> FramedCurve {
    frame_curve(Arc::new(helix1((0.0, TAU)).unwrap()), &h1_grid()).unwrap()
}

fn h1_sampled() -> FramedCurve {
    let grid = h1_grid();
    let pts = grid.values().iter().map(|&t| h1::position(t)).collect();
    frame_curve(Arc::new(NullCurve::sampled(&grid, pts).unwrap()), &grid).unwrap()
}

fn cross_product() -> Outcome {
    let (e1, e2, e3) = (Vec3::E1, Vec3::E2, Vec3::E3);
    let table = lorentz_cross(&e1, &e2) == -e3
        && lorentz_cross(&e2, &e3) == e1
        && lorentz_cross(&e3, &e1) == -e2;
    let mut rng = StdRng::seed_from_u64(20_240_901);
    let mut anti: f64 = 0.0;
    let mut orth: f64 = 0.0;
    for _ in 0..10_000 {
        let mut v = || {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        };
        let (x, y) = (v(), v());
        let c = lorentz_cross(&x, &y);
        anti = anti.max((c + lorentz_cross(&y, &x)).max_abs());
        orth = orth.max(lorentz_dot(&c, &x).abs().max(lorentz_dot(&c, &y).abs()));
    }
    outcome(
        table && anti <= 1e-12 && orth <= 1e-12,
        format!("table exact={table} antisymmetry={anti:.2e} orthogonality={orth:.2e}"),
    )
}

fn frame_relations() -> Outcome {
    let a = h1_analytic().summary().relations.max_scalar();
    let s = h1_sampled().summary().relations.max_scalar();
    outcome(
        a <= 1e-9 && s <= 1e-5,
        format!("analytic {a:.2e} (<= 1e-9), sampled h=π/1000 {s:.2e} (<= 1e-5)"),
    )
}

fn helix_invariants() -> Outcome {
    let fc = h1_analytic();
    let dk = max_of(fc.samples().iter().map(|f| (f.kappa - h1::KAPPA).abs()));
    let dt = max_of(fc.samples().iter().map(|f| (f.tau - h1::TAU).abs()));
    let df = max_of(fc.samples().iter().map(|f| (f.ratio() - h1::RATIO).abs()));
    let dframe = max_of(fc.samples().iter().map(|f| {
        (f.alpha - h1::alpha(f.s))
            .max_abs()
            .max((f.beta - h1::beta(f.s)).max_abs())
            .max((f.gamma - h1::gamma(f.s)).max_abs())
    }));
    outcome(
        dk <= 1e-6 && dt <= 1e-6 && df <= 1e-6 && dframe <= 1e-6,
        format!("|κ+1|={dk:.2e} |τ+1/2|={dt:.2e} |f-1/2|={df:.2e} frame vs oracle {dframe:.2e}"),
    )
}

fn frenet_system() -> Outcome {
    let a = frenet_residuals(&h1_analytic()).unwrap().max_derivative();
    let s = frenet_residuals(&h1_sampled()).unwrap().max_derivative();
    outcome(
        a <= 1e-8 && s <= 1e-4,
        format!("analytic {a:.2e} (<= 1e-8), sampled {s:.2e} (<= 1e-4)"),
    )
}

fn tangent_equation() -> Outcome {
    let fc = h1_analytic();
    let chart = total_curvature(&fc).unwrap();
    let residual = tangent_ode_residual(&fc, &chart).unwrap();
    let init = TangentInit::from_frame(&fc.samples()[0], 0.0);
    let phi = ParameterGrid::uniform(0.0, TAU, 2001).unwrap();
    let field = solve_tangent_ode(&|_| 0.5, &|_| 0.0, &init, &phi, &Default::default()).unwrap();
    let dev = max_of(
        field
            .phi
            .iter()
            .zip(&field.alpha)
            .map(|(&p, a)| (*a - Vec3::new(1.0, p.sin(), p.cos())).max_abs()),
    );
    outcome(
        residual <= 1e-6 && dev <= 1e-7,
        format!("residual {residual:.2e} (<= 1e-6), α(φ) vs (1, sin φ, cos φ) {dev:.2e} (<= 1e-7)"),
    )
}

fn frenet_round_trip() -> Outcome {
    let grid = h1_grid();
    let h = helix1((0.0, TAU)).unwrap();
    let init = compute_frame_at(&h, 0.0).unwrap();
    let fc = integrate_frenet(
        constant_fn(-1.0),
        constant_fn(-0.5),
        &init,
        h1::position(0.0),
        &grid,
        &FrenetOptions::default(),
    )
    .unwrap();
    let pos = max_of(
        grid.values()
            .iter()
            .map(|&s| (fc.curve().evaluate(s, 0).unwrap() - h1::position(s)).max_abs()),
    );
    let again = frame_curve(Arc::clone(fc.curve()), &grid).unwrap();
    let inv = max_of(
        again
            .samples()
            .iter()
            .map(|f| (f.kappa + 1.0).abs().max((f.tau + 0.5).abs())),
    );
    outcome(
        pos <= 1e-7 && inv <= 1e-6,
        format!("positions {pos:.2e} (<= 1e-7), recovered κ, τ {inv:.2e} (<= 1e-6)"),
    )
}

fn tangent_soundness() -> Outcome {
    let fa = h1_analytic();
    let anchor = AnchorPair::new(0.0, 0.0);
    let mut parts = Vec::new();
    let mut pass = true;
    for p in [
        Profile::Constant(2.0),
        Profile::Constant(0.5),
        Profile::TwoPlusSin,
    ] {
        let end = fit_end(&p.to_fn(), anchor, TAU).unwrap();
        let grid = ParameterGrid::uniform(0.0, end, 1001).unwrap();
        let syn = synthesize_similar(&fa, p.to_fn(), &grid, anchor, h1::position(0.0)).unwrap();
        let fb = frame_curve(Arc::clone(&syn.curve), &grid).unwrap();
        let r = check_tangent_similarity(&fa, &fb, &syn.transformation, 1e-7).unwrap();
        pass &= r.pass;
        parts.push(format!("λ={p}: {:.2e}", r.vector_deviation));
        // closed forms from the oracle
        let oracle = match p {
            Profile::Constant(2.0) => Some(max_of(fb.samples().iter().map(|f| {
                let s = f.s;
                let b = Vec3::new(s, ((2.0 * s).cos() - 1.0) / 2.0, (2.0 * s).sin() / 2.0)
                    + h1::position(0.0);
                (syn.curve.evaluate(s, 0).unwrap() - b)
                    .max_abs()
                    .max((f.kappa + 2.0).abs())
                    .max((f.tau + 1.0).abs())
            }))),
            Profile::TwoPlusSin => Some(max_of(
                grid.values()
                    .iter()
                    .zip(syn.transformation.s_a())
                    .map(|(&s, &sa)| (sa - (2.0 * s + 1.0 - s.cos())).abs()),
            )),
            _ => None,
        };
        if let Some(d) = oracle {
            pass &= d <= 1e-7;
            parts.push(format!("oracle {d:.2e}"));
        }
    }
    outcome(pass, parts.join(", "))
}

/// Verdicts of tangent, normal, binormal and ratio criteria for one pair.
struct Verdicts {
    pass: [bool; 4],
    errors: Vec<String>,
    lambda_gap: Option<f64>,
    normal_pass: bool,
    bertrand_unit: Option<bool>,
    bertrand_dependent: Option<bool>,
}

fn judge(p: &Pair) -> Verdicts {
    let mut errors = Vec::new();
    let mut note = |name: &str, e: nullframe::Error| errors.push(format!("{name}: {}", e.name()));
    let normal = normal_criterion(&p.fa, &p.fb, Some(p.anchor), SUITE_TOL);
    let binormal = binormal_criterion(&p.fa, &p.fb, Some(p.anchor), SUITE_TOL);
    let ratio = ratio_criterion(&p.fa, &p.fb, Some(p.anchor), SUITE_TOL);
    let mut v = Verdicts {
        pass: [false; 4],
        errors: Vec::new(),
        lambda_gap: None,
        normal_pass: false,
        bertrand_unit: None,
        bertrand_dependent: None,
    };
    match &normal {
        Ok((r, t)) => {
            v.pass[1] = r.pass;
            v.normal_pass = r.pass;
            match check_tangent_similarity(&p.fa, &p.fb, t, SUITE_TOL) {
                Ok(r) => v.pass[0] = r.pass,
                Err(e) => note("tangent", e),
            }
            match is_bertrand_pair(&p.fa, &p.fb, t, SUITE_TOL) {
                Ok(b) => {
                    v.bertrand_unit = Some(b.unit_factor);
                    v.bertrand_dependent = Some(b.dependent);
                }
                Err(e) => note("bertrand", e),
            }
        }
        Err(e) => note("normal", e.clone()),
    }
    match &binormal {
        Ok((r, _)) => v.pass[2] = r.pass,
        Err(e) => note("binormal", e.clone()),
    }
    match ratio {
        Ok(r) => v.pass[3] = r.pass,
        Err(e) => note("ratio", e),
    }
    if let (Ok((_, tn)), Ok((_, tb))) = (&normal, &binormal) {
        v.lambda_gap = Some(max_of(
            tn.lambda()
                .iter()
                .zip(tb.lambda())
                .map(|(a, b)| (a - b).abs()),
        ));
    }
    v.errors = errors;
    v
}

struct Suite {
    pairs: Vec<Pair>,
    verdicts: Vec<Verdicts>,
    seconds: f64,
}

fn build_suite() -> Suite {
    let t = Instant::now();
    let (similar, other) = pair_defs();
    let defs: Vec<_> = similar.into_iter().chain(other).collect();
    let pairs: Vec<Pair> = defs.par_iter().map(build_pair).collect();
    let verdicts = pairs.par_iter().map(judge).collect();
    Suite {
        pairs,
        verdicts,
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn equivalence(suite: &Suite) -> Outcome {
    let mut bad = Vec::new();
    let mut gap: f64 = 0.0;
    let (mut n_sim, mut n_non) = (0, 0);
    for (p, v) in suite.pairs.iter().zip(&suite.verdicts) {
        if p.similar {
            n_sim += 1;
        } else {
            n_non += 1;
        }
        let agree = v.pass.iter().all(|&x| x == p.similar);
        if !agree || !v.errors.is_empty() {
            bad.push(format!(
                "{}: [tangent, normal, binormal, ratio] = {:?} expected {} {}",
                p.label,
                v.pass,
                p.similar,
                v.errors.join(" ")
            ));
        }
        if p.similar {
            match v.lambda_gap {
                Some(g) => gap = gap.max(g),
                None => gap = f64::NAN,
            }
        }
    }
    let pass = bad.is_empty() && gap <= 1e-5 && n_sim == 20 && n_non == 20;
    let mut detail = format!(
        "{n_sim} similar + {n_non} non-similar pairs (built and judged in {:.1}s), {} disagreements, max |λ_normal − λ_binormal| {gap:.2e} (<= 1e-5)",
        suite.seconds,
        bad.len()
    );
    for b in bad {
        detail.push_str("\n      ");
        detail.push_str(&b);
    }
    outcome(pass, detail)
}

fn scaling(suite: &Suite) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for p in &suite.pairs {
        let source = p.origin.as_ref().unwrap_or(&p.fa);
        match curvature_scaling_check(source, &p.fb, &p.t, 1e-5) {
            Ok(r) => {
                worst = worst.max(r.kappa_residual).max(r.tau_residual);
                if !r.pass {
                    bad.push(p.label.clone());
                }
            }
            Err(e) => bad.push(format!("{}: {e}", p.label)),
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} synthesized pairs, max residual {worst:.2e} (<= 1e-5){}",
            suite.pairs.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; failing: {}", bad.join(", "))
            }
        ),
    )
}

fn bertrand(suite: &Suite) -> Outcome {
    let mut bad = Vec::new();
    let mut dependent_only = 0;
    for (p, v) in suite.pairs.iter().zip(&suite.verdicts) {
        match v.bertrand_unit {
            Some(unit) if unit == v.normal_pass => {}
            other => bad.push(format!(
                "{}: unit factor {other:?}, normal {}",
                p.label, v.normal_pass
            )),
        }
        if v.bertrand_dependent == Some(true) && v.bertrand_unit == Some(false) {
            dependent_only += 1;
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} pairs, {} mismatches ({dependent_only} dependent with factor ≠ 1){}",
            suite.pairs.len(),
            bad.len(),
            if bad.is_empty() {
                String::new()
            } else {
                format!(": {}", bad.join("; "))
            }
        ),
    )
}

fn closure() -> Outcome {
    let canonical = |k, t| FrameSample::canonical(0.0, k, t);
    let origin = Vec3::new(0.0, 1.0, 0.0);
    let geodesic = FamilySpec::Geodesic {
        point: Vec3::new(1.0, 0.0, -1.0),
        direction: Vec3::new(1.0, 0.6, 0.8),
    };
    let torsion_free = FamilySpec::TorsionFree {
        kappa: Profile::Sine {
            a: 1.0,
            b: 0.2,
            c: 1.0,
        },
        initial: canonical(1.0, 0.0),
        origin,
    };
    let helix = FamilySpec::Helix {
        kappa: -1.0,
        tau: -0.5,
        initial: canonical(-1.0, -0.5),
        origin,
    };
    let g_grid = ParameterGrid::uniform(0.0, 2.0, 201).unwrap();
    let grid = ParameterGrid::uniform(0.0, TAU, 401).unwrap();
    let cases = [
        (
            "geodesic λ=1+s²/10",
            &geodesic,
            &g_grid,
            scalar_fn(|s| 1.0 + s * s / 10.0),
            1e-8,
            "second_derivative",
        ),
        (
            "geodesic λ=2+sin",
            &geodesic,
            &g_grid,
            Profile::TwoPlusSin.to_fn(),
            1e-8,
            "second_derivative",
        ),
        (
            "torsion-free λ=3",
            &torsion_free,
            &grid,
            constant_fn(3.0),
            1e-6,
            "max_abs_tau",
        ),
        (
            "helix λ=2",
            &helix,
            &grid,
            constant_fn(2.0),
            1e-6,
            "stdev_tau",
        ),
        (
            "helix λ=2+sin",
            &helix,
            &grid,
            Profile::TwoPlusSin.to_fn(),
            1e-5,
            "ratio_deviation",
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, spec, grid, lambda, tol, key) in cases {
        match closure_check(spec, grid, lambda, tol) {
            Ok(r) => {
                pass &= r.pass;
                let shown = if key == "stdev_tau" {
                    r.checks["stdev_kappa"].max(r.checks["stdev_tau"])
                } else {
                    r.checks[key]
                };
                parts.push(format!(
                    "{label}: {shown:.2e} (<= {tol:.0e}){}",
                    if r.pass { "" } else { " FAIL" }
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn nullframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullframe"))
        .args(args)
        .current_dir(data_dir())
        .output()
        .expect("run nullframe")
}

fn golden(name: &str) -> Vec<u8> {
    std::fs::read(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

fn column(csv: &[u8], name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_reader(csv);
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap();
    rdr.records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

fn cli_contract() -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |label: &str, ok: bool| {
        if !ok {
            failures.push(label.to_string());
        }
    };
    let code = |o: &Output| o.status.code().unwrap_or(-1);

    let frame = nullframe(&["frame", "--curve", "helix1_small.json"]);
    expect("frame exits 0", code(&frame) == 0);
    expect(
        "frame csv golden",
        frame.stdout == golden("frame_helix1_small.csv"),
    );
    let again = nullframe(&["frame", "--curve", "helix1_small.json"]);
    expect("frame byte-deterministic", again.stdout == frame.stdout);
    let json = nullframe(&["frame", "--curve", "helix1_small.json", "--format", "json"]);
    expect(
        "frame json golden",
        json.stdout == golden("frame_helix1_small.json"),
    );
    let check = nullframe(&[
        "check",
        "--curve-a",
        "helix1_small.json",
        "--curve-b",
        "helix1_small.json",
        "--mode",
        "ratio",
        "--anchor-a",
        "0",
        "--anchor-b",
        "0",
    ]);
    expect("check self exits 0", code(&check) == 0);
    expect(
        "check report golden",
        check.stdout == golden("check_ratio_self.json"),
    );

    let geo = nullframe(&["frame", "--curve", "geodesic.json"]);
    expect("geodesic exits 2", code(&geo) == 2);
    let bad = nullframe(&["frame", "--curve", "malformed.json"]);
    expect("malformed spec exits 1", code(&bad) == 1);
    let missing = nullframe(&["frame", "--curve", "no_such_file.json"]);
    expect("missing file exits 1", code(&missing) == 1);
    let no_anchor = nullframe(&[
        "check",
        "--curve-a",
        "helix1.json",
        "--curve-b",
        "helix1.json",
        "--mode",
        "normal",
    ]);
    expect("missing anchors exit 1", code(&no_anchor) == 1);
    let zero = nullframe(&["synthesize", "--curve", "helix1.json", "--lambda", "0"]);
    expect("λ=0 exits 1", code(&zero) == 1);
    let other = nullframe(&[
        "check",
        "--curve-a",
        "helix1.json",
        "--curve-b",
        "helix_f07.json",
        "--mode",
        "ratio",
        "--anchor-a",
        "0",
        "--anchor-b",
        "0",
    ]);
    expect("f mismatch exits 3", code(&other) == 3);

    let dir = tempfile::tempdir().unwrap();
    let b_csv = dir.path().join("b.csv");
    let b_spec = dir.path().join("b.json");
    let helix = data_dir().join("helix1.json");
    let syn = nullframe(&[
        "synthesize",
        "--curve",
        helix.to_str().unwrap(),
        "--lambda",
        "2",
        "--out",
        b_csv.to_str().unwrap(),
    ]);
    expect("synthesize exits 0", code(&syn) == 0);
    std::fs::write(&b_spec, r#"{"kind":"samples","path":"b.csv"}"#).unwrap();
    let framed = nullframe(&["frame", "--curve", b_spec.to_str().unwrap()]);
    expect("re-ingested frame exits 0", code(&framed) == 0);
    let written = std::fs::read(&b_csv).unwrap();
    let mut gap: f64 = 0.0;
    for col in [
        "x1", "x2", "x3", "alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "gamma1",
        "gamma2", "gamma3", "kappa", "tau", "f",
    ] {
        let (x, y) = (column(&written, col), column(&framed.stdout, col));
        if x.len() != y.len() {
            gap = f64::NAN;
            continue;
        }
        gap = gap.max(max_of(x.iter().zip(&y).map(|(a, b)| (a - b).abs())));
    }
    expect("round trip within 1e-4", gap <= 1e-4);
    let ratio = nullframe(&[
        "check",
        "--curve-a",
        helix.to_str().unwrap(),
        "--curve-b",
        b_spec.to_str().unwrap(),
        "--mode",
        "ratio",
        "--anchor-a",
        "0",
        "--anchor-b",
        "0",
        "--tol",
        "1e-4",
    ]);
    expect("re-ingested ratio check exits 0", code(&ratio) == 0);

    outcome(
        failures.is_empty(),
        format!(
            "exit codes 0/1/2/3, goldens, determinism, round trip {gap:.2e} (<= 1e-4){}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failures.join(", "))
            }
        ),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(o) => o,
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        }
    }
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = guarded(f);
        println!(
            "criterion {:>2} {:<28} {} ({:.1}s) {}",
            results.len() + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        results.push((name, o));
    };
    run("cross product", &cross_product);
    run("frame relations", &frame_relations);
    run("helix invariants", &helix_invariants);
    run("frenet residuals", &frenet_system);
    run("tangent equation", &tangent_equation);
    run("frenet round trip", &frenet_round_trip);
    run("tangent similarity", &tangent_soundness);
    let suite = panic::catch_unwind(build_suite).ok();
    let with_suite = |f: fn(&Suite) -> Outcome| -> Box<dyn Fn() -> Outcome + '_> {
        let suite = suite.as_ref();
        Box::new(move || match suite {
            Some(s) => f(s),
            None => outcome(false, "pair suite could not be built"),
        })
    };
    run("criteria equivalence", &*with_suite(equivalence));
    run("invariant scaling", &*with_suite(scaling));
    run("bertrand vs normal", &*with_suite(bertrand));
    run("family closure", &closure);
    run("cli contract", &cli_contract);
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
