use crate::error::{Error, Result};

/// Largest admissible ratio between adjacent steps of a grid.
pub const MAX_STEP_RATIO: f64 = 2.0;

/// A strictly increasing, finite array of parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    values: Vec<f64>,
}

impl ParameterGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite value {v}")));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Self { values })
    }

    /// `n` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let h = (end - start) / (n - 1) as f64;
        let mut values: Vec<f64> = (0..n).map(|i| start + h * i as f64).collect();
        values[n - 1] = end;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.values[0]
    }

    pub fn end(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn stats(&self) -> StepStats {
        let steps: Vec<f64> = self.values.windows(2).map(|w| w[1] - w[0]).collect();
        let min_step = steps.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_step = steps.iter().cloned().fold(0.0, f64::max);
        let max_ratio = steps
            .windows(2)
            .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
            .fold(1.0, f64::max);
        StepStats {
            min_step,
            max_step,
            mean_step: (self.end() - self.start()) / steps.len() as f64,
            max_adjacent_ratio: max_ratio,
        }
    }

    /// Rejects grids whose adjacent steps differ by more than [`MAX_STEP_RATIO`].
    pub fn require_smooth(&self) -> Result<()> {
        let r = self.stats().max_adjacent_ratio;
        if r > MAX_STEP_RATIO {
            return Err(Error::InvalidGrid(format!(
                "adjacent step ratio {r} exceeds {MAX_STEP_RATIO}"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.start() && s <= self.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub min_step: f64,
    pub max_step: f64,
    pub mean_step: f64,
    pub max_adjacent_ratio: f64,
}

/// Index `i` such that `xs[i] <= x < xs[i + 1]`, clamped to a valid interval.
pub(crate) fn interval_index(xs: &[f64], x: f64) -> usize {
    debug_assert!(xs.len() >= 2);
    let p = xs.partition_point(|v| *v <= x);
    p.saturating_sub(1).min(xs.len() - 2)
}

/// Exact position of `x` in `xs`, if present.
pub(crate) fn node_index(xs: &[f64], x: f64) -> Option<usize> {
    xs.binary_search_by(|v| v.partial_cmp(&x).expect("finite grid"))
        .ok()
}
