//! Finite-difference stencils on (possibly nonuniform) grids.
//!
//! Weights come from Fornberg's recursion. Interior stencils are centered and
//! fourth-order accurate for derivatives of order 1 to 3; near the ends the
//! window slides inward and keeps fourth order with one extra point.

use crate::error::{Error, Result};
use crate::lorentz::Vec3;

pub const MIN_SAMPLES: usize = 5;
pub const MAX_ORDER: usize = 3;

/// Fornberg weights for derivatives `0..=max_order` at `x0` from nodes `xs`.
///
/// `weights[m][j]` multiplies `f(xs[j])` in the approximation of `f^(m)(x0)`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn centered_width(order: usize) -> usize {
    2 * ((order + 3) / 2) + 1
}

fn one_sided_width(order: usize) -> usize {
    order + 4
}

/// Window `[start, start + width)` used for the derivative at node `i`.
pub(crate) fn window(i: usize, len: usize, order: usize) -> (usize, usize) {
    let c = centered_width(order).min(len);
    let half = c / 2;
    if i >= half && i + half < len {
        return (i - half, c);
    }
    let w = one_sided_width(order).min(len);
    let start = i.saturating_sub(w / 2).min(len - w);
    (start, w)
}

fn check_inputs(len: usize, grid_len: usize, order: usize) -> Result<()> {
    if len != grid_len {
        return Err(Error::BadInput(format!(
            "{len} samples for a grid of {grid_len} points"
        )));
    }
    if len < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: len,
        });
    }
    if order > MAX_ORDER {
        return Err(Error::DerivativeUnavailable {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Derivative of the given order of scalar samples at every grid node.
pub fn derivative_stencil(samples: &[f64], grid: &[f64], order: usize) -> Result<Vec<f64>> {
    check_inputs(samples.len(), grid.len(), order)?;
    if order == 0 {
        return Ok(samples.to_vec());
    }
    Ok((0..grid.len())
        .map(|i| {
            let (start, w) = window(i, grid.len(), order);
            let wts = fornberg_weights(grid[i], &grid[start..start + w], order);
            wts[order]
                .iter()
                .zip(&samples[start..start + w])
                .map(|(c, f)| c * f)
                .sum()
        })
        .collect())
}

/// Componentwise [`derivative_stencil`] for vector samples.
pub fn derivative_stencil_vec(samples: &[Vec3], grid: &[f64], order: usize) -> Result<Vec<Vec3>> {
    check_inputs(samples.len(), grid.len(), order)?;
    if order == 0 {
        return Ok(samples.to_vec());
    }
    Ok((0..grid.len())
        .map(|i| {
            let (start, w) = window(i, grid.len(), order);
            let wts = fornberg_weights(grid[i], &grid[start..start + w], order);
            wts[order]
                .iter()
                .zip(&samples[start..start + w])
                .map(|(c, v)| *v * *c)
                .sum()
        })
        .collect())
}

/// Number of nodes used for off-grid Lagrange interpolation.
pub const INTERP_WIDTH: usize = 6;

fn interp_window(xs: &[f64], x: f64) -> (usize, usize) {
    let w = INTERP_WIDTH.min(xs.len());
    let i = crate::grid::interval_index(xs, x);
    let start = (i + 1).saturating_sub(w / 2).min(xs.len() - w);
    (start, w)
}

/// Local Lagrange interpolation (degree 5) of scalar samples; `deriv` selects
/// the derivative of the interpolant.
pub fn interpolate(xs: &[f64], ys: &[f64], x: f64, deriv: usize) -> f64 {
    let (start, w) = interp_window(xs, x);
    let wts = fornberg_weights(x, &xs[start..start + w], deriv);
    wts[deriv]
        .iter()
        .zip(&ys[start..start + w])
        .map(|(c, y)| c * y)
        .sum()
}

pub fn interpolate_vec(xs: &[f64], ys: &[Vec3], x: f64, deriv: usize) -> Vec3 {
    let (start, w) = interp_window(xs, x);
    let wts = fornberg_weights(x, &xs[start..start + w], deriv);
    wts[deriv]
        .iter()
        .zip(&ys[start..start + w])
        .map(|(c, v)| *v * *c)
        .sum()
}
