use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Sampled arrival-time density Π(tᵢ) with its running integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToaSeries {
    /// Sample times, s, strictly increasing.
    pub times: Vec<f64>,
    /// Raw Π(tᵢ), s⁻¹. Small negative quadrature noise is kept.
    pub pi_values: Vec<f64>,
    /// Trapezoidal ∫Π dt from the first sample.
    pub cumulative: Vec<f64>,
    pub metadata: SeriesMetadata,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SeriesMetadata {
    pub source: String,
    /// Whatever produced the series, echoed verbatim.
    pub echo: serde_json::Value,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ToaSeries {
    pub fn new(times: Vec<f64>, pi_values: Vec<f64>, source: &str) -> Self {
        assert_eq!(times.len(), pi_values.len());
        let cumulative = trapezoid_cumulative(&times, &pi_values);
        Self {
            times,
            pi_values,
            cumulative,
            metadata: SeriesMetadata {
                source: source.to_owned(),
                ..Default::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Π with negative values set to zero; for reports only.
    pub fn clipped(&self) -> Vec<f64> {
        self.pi_values.iter().map(|&v| v.max(0.0)).collect()
    }

    /// `(t, Π)` at the largest sample.
    pub fn peak(&self) -> (f64, f64) {
        self.times.iter().zip(&self.pi_values).fold(
            (f64::NAN, f64::NEG_INFINITY),
            |acc, (&t, &v)| {
                if v > acc.1 {
                    (t, v)
                } else {
                    acc
                }
            },
        )
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Common spacing if the grid is uniform to 1e-9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        uniform_step(&self.times)
    }

    /// ∫|Π − Π_other| dt / ∫|Π_other| dt on a shared time grid.
    pub fn relative_l1(&self, reference: &ToaSeries) -> Result<f64> {
        if self.times.len() != reference.times.len()
            || self
                .times
                .iter()
                .zip(&reference.times)
                .any(|(a, b)| (a - b).abs() > 1e-9 * a.abs().max(b.abs()))
        {
            return Err(Error::GridMismatch(
                "L1 distance needs identical sample times".into(),
            ));
        }
        Ok(relative_l1(
            &self.times,
            &self.pi_values,
            &reference.pi_values,
        ))
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.metadata.diagnostics.insert(key.to_owned(), value);
        self
    }
}

pub fn trapezoid_cumulative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Trapezoidal ∫|a − b| / ∫|b|.
pub fn relative_l1(times: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    let base: Vec<f64> = b.iter().map(|y| y.abs()).collect();
    let num = trapezoid_cumulative(times, &diff)
        .last()
        .copied()
        .unwrap_or(0.0);
    let den = trapezoid_cumulative(times, &base)
        .last()
        .copied()
        .unwrap_or(0.0);
    num / den
}

pub fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 2 {
        return None;
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs());
    (uniform && dt > 0.0).then_some(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cumulative_is_trapezoidal() {
        let s = ToaSeries::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0], "t");
        assert_eq!(s.cumulative, vec![0.0, 1.0, 3.0]);
        assert_eq!(s.peak(), (1.0, 2.0));
    }

    #[test]
    fn clipping_only_in_report_copy() {
        let s = ToaSeries::new(vec![0.0, 1.0], vec![-1e-9, 1.0], "t");
        assert_eq!(s.clipped(), vec![0.0, 1.0]);
        assert_eq!(s.pi_values[0], -1e-9);
    }

    #[test]
    fn l1_requires_same_grid() {
        let a = ToaSeries::new(vec![0.0, 1.0], vec![1.0, 1.0], "a");
        let b = ToaSeries::new(vec![0.0, 2.0], vec![1.0, 1.0], "b");
        assert!(a.relative_l1(&b).is_err());
        let c = ToaSeries::new(vec![0.0, 1.0], vec![1.5, 1.5], "c");
        assert!((c.relative_l1(&a).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn detects_uniform_grid() {
        assert_eq!(uniform_step(&[0.0, 0.5, 1.0]), Some(0.5));
        assert_eq!(uniform_step(&[0.0, 0.5, 1.1]), None);
    }
}
