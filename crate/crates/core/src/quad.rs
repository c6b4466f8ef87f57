//! Quadrature and piecewise cubic helpers.

use crate::lorentz::Vec3;

// 8-point Gauss-Legendre on [-1, 1].
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Integral of `f` over `[a, b]` by 8-point Gauss-Legendre (exact to degree 15).
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = 0.0;
    for (x, w) in GL8_X.iter().zip(&GL8_W) {
        acc += w * (f(m - r * x) + f(m + r * x));
    }
    acc * r
}

pub fn gauss_legendre_vec<F: Fn(f64) -> Vec3>(f: F, a: f64, b: f64) -> Vec3 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Vec3::ZERO;
    for (x, w) in GL8_X.iter().zip(&GL8_W) {
        acc += (f(m - r * x) + f(m + r * x)) * *w;
    }
    acc * r
}

/// Composite Gauss-Legendre with panels no longer than `max_panel`.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_panel: f64) -> f64 {
    let panels = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| gauss_legendre(&f, a + h * k as f64, a + h * (k + 1) as f64))
        .sum()
}

/// Gauss-Legendre for a fallible vector integrand.
pub fn try_gauss_legendre_vec<E, F: Fn(f64) -> Result<Vec3, E>>(
    f: F,
    a: f64,
    b: f64,
) -> Result<Vec3, E> {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Vec3::ZERO;
    for (x, w) in GL8_X.iter().zip(&GL8_W) {
        acc += (f(m - r * x)? + f(m + r * x)?) * *w;
    }
    Ok(acc * r)
}

/// Lagrange basis of the nodes `xs` evaluated at `x`.
fn lagrange_basis(xs: &[f64], x: f64) -> Vec<f64> {
    (0..xs.len())
        .map(|j| {
            xs.iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, xk)| (x - xk) / (xs[j] - xk))
                .product()
        })
        .collect()
}

/// Running integral `∫_{xs[0]}^{xs[i]} y` of sampled data.
///
/// Each interval is integrated exactly against the cubic through the four
/// surrounding samples, so the result is fourth-order accurate.
pub fn cumulative_integral(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let w = 4.min(n);
    for i in 0..n - 1 {
        let start = i.saturating_sub(1).min(n - w);
        let nodes = &xs[start..start + w];
        let vals = &ys[start..start + w];
        // two-point Gauss is exact for the cubic interpolant
        let (m, r) = (0.5 * (xs[i] + xs[i + 1]), 0.5 * (xs[i + 1] - xs[i]));
        let g = r / 3f64.sqrt();
        let seg: f64 = [m - g, m + g]
            .iter()
            .map(|&x| {
                lagrange_basis(nodes, x)
                    .iter()
                    .zip(vals)
                    .map(|(b, v)| b * v)
                    .sum::<f64>()
            })
            .sum::<f64>()
            * r;
        out[i + 1] = out[i] + seg;
    }
    out
}

/// Running integral of vector samples using endpoint derivatives
/// (cubic Hermite rule, fourth-order accurate).
pub fn cumulative_hermite_vec(xs: &[f64], ys: &[Vec3], dys: &[Vec3]) -> Vec<Vec3> {
    let n = xs.len();
    let mut out = vec![Vec3::ZERO; n];
    for i in 0..n.saturating_sub(1) {
        let h = xs[i + 1] - xs[i];
        out[i + 1] =
            out[i] + (ys[i] + ys[i + 1]) * (0.5 * h) + (dys[i] - dys[i + 1]) * (h * h / 12.0);
    }
    out
}

/// Cubic Hermite interpolant on `[x0, x1]` with values and slopes.
#[derive(Debug, Clone, Copy)]
pub struct HermiteSegment {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl HermiteSegment {
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.x1 - self.x0;
        let t = (x - self.x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y0
            + (t3 - 2.0 * t2 + t) * h * self.d0
            + (-2.0 * t3 + 3.0 * t2) * self.y1
            + (t3 - t2) * h * self.d1
    }

    pub fn slope(&self, x: f64) -> f64 {
        let h = self.x1 - self.x0;
        let t = (x - self.x0) / h;
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) * self.y0 / h
            + (3.0 * t2 - 4.0 * t + 1.0) * self.d0
            + (-6.0 * t2 + 6.0 * t) * self.y1 / h
            + (3.0 * t2 - 2.0 * t) * self.d1
    }

    /// Solves `eval(x) = y` on the segment, assuming the segment is monotone.
    pub fn invert(&self, y: f64) -> f64 {
        let (mut lo, mut hi) = (self.x0, self.x1);
        let increasing = self.y1 >= self.y0;
        let mut x = if self.y1 != self.y0 {
            self.x0 + (y - self.y0) / (self.y1 - self.y0) * (self.x1 - self.x0)
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..100 {
            let r = self.eval(x) - y;
            if (r > 0.0) == increasing {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.slope(x);
            let mut next = if d != 0.0 { x - r / d } else { 0.5 * (lo + hi) };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
                return next;
            }
            x = next;
        }
        x
    }
}
