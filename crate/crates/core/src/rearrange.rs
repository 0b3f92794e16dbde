//! Discrete decreasing rearrangement on a half-line grid and symmetric
//! decreasing rearrangement on a symmetric grid, with the norm-preservation
//! and Dirichlet-diminution properties the reduction arguments invoke.

use crate::error::{Error, Result};

/// Nonnegative samples on a uniform grid starting at `start`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub start: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(start: f64, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::NonpositiveWidth(spacing));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::ArgumentOutOfRange(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(SampledFunction {
            start,
            spacing,
            values,
        })
    }

    fn check_nonnegative(&self) -> Result<()> {
        if let Some((i, &v)) = self.values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeInput { index: i, value: v });
        }
        Ok(())
    }

    /// Sum |f|^p dx.
    pub fn lp_sum(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.spacing
    }

    /// Discrete Dirichlet energy Sum (df/dx)^2 dx of the samples viewed as a
    /// compactly supported function on the line: the grid is extended by a
    /// zero cell on both sides. Without the extension the energy comparison
    /// under rearrangement is false (mass parked at a free boundary has no
    /// jump there).
    pub fn dirichlet_energy(&self) -> f64 {
        let h = self.spacing;
        let mut sum = 0.0;
        let mut prev = 0.0;
        for &v in &self.values {
            let d = (v - prev) / h;
            sum += d * d;
            prev = v;
        }
        sum += (prev / h) * (prev / h);
        sum * h
    }

    /// Same energy with a reflecting (Neumann) boundary at the left end and
    /// zero extension on the right: the model for radial samples on [0, U].
    pub fn dirichlet_energy_neumann_left(&self) -> f64 {
        let h = self.spacing;
        let mut sum = 0.0;
        for w in self.values.windows(2) {
            let d = (w[1] - w[0]) / h;
            sum += d * d;
        }
        let last = *self.values.last().unwrap_or(&0.0);
        sum += (last / h) * (last / h);
        sum * h
    }
}

/// Decreasing rearrangement: the same multiset of values, sorted so the
/// largest sits at the left end of the grid.
pub fn decreasing_rearrangement(f: &SampledFunction) -> Result<SampledFunction> {
    f.check_nonnegative()?;
    let mut values = f.values.clone();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(SampledFunction {
        start: f.start,
        spacing: f.spacing,
        values,
    })
}

/// Symmetric decreasing rearrangement on a grid centered in its index range:
/// the largest value goes to the center, successive values alternate left
/// then right.
pub fn symmetric_decreasing(f: &SampledFunction) -> Result<SampledFunction> {
    f.check_nonnegative()?;
    let n = f.values.len();
    let mut sorted = f.values.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut out = vec![0.0; n];
    let center = n / 2;
    let mut left = center;
    let mut right = center;
    for (k, v) in sorted.into_iter().enumerate() {
        if k == 0 {
            out[center] = v;
        } else if k % 2 == 1 {
            left -= 1;
            out[left] = v;
        } else {
            right += 1;
            out[right] = v;
        }
    }
    Ok(SampledFunction {
        start: f.start,
        spacing: f.spacing,
        values: out,
    })
}

/// Sorted copies of the two value sets match exactly (equimeasurability).
pub fn equimeasurable(a: &SampledFunction, b: &SampledFunction) -> bool {
    if a.values.len() != b.values.len() {
        return false;
    }
    let mut x = a.values.clone();
    let mut y = b.values.clone();
    x.sort_by(|p, q| p.partial_cmp(q).unwrap());
    y.sort_by(|p, q| p.partial_cmp(q).unwrap());
    x == y
}
