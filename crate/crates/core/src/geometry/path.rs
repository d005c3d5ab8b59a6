//! Piecewise-linear paths in chart parameter space.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{MaslovError, Result};
use crate::geometry::chart::LagrangianChart;
use crate::tolerance::Tolerances;

fn default_samples() -> usize {
    64
}

/// u(t), t ∈ [0, 1], linear between consecutive knots placed at equal parameter spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPath {
    pub knots: Vec<Vec<f64>>,
    /// Number of sampling intervals (refinement happens on top of these).
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl ParamPath {
    pub fn new(knots: Vec<Vec<f64>>, samples: usize) -> Result<Self> {
        let p = Self { knots, samples };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.len() < 2 {
            return Err(MaslovError::InvalidInput("a path needs at least two knots".into()));
        }
        if self.samples == 0 || self.samples > 1 << 20 {
            return Err(MaslovError::InvalidInput(format!("samples must be in 1..=2^20, got {}", self.samples)));
        }
        let n = self.knots[0].len();
        for k in &self.knots {
            if k.len() != n {
                return Err(MaslovError::Dimension { expected: n, found: k.len() });
            }
            if k.iter().any(|x| !x.is_finite()) {
                return Err(MaslovError::InvalidInput("non-finite knot".into()));
            }
        }
        Ok(())
    }

    /// Straight segment from u0 to u1.
    pub fn segment(u0: Vec<f64>, u1: Vec<f64>, samples: usize) -> Result<Self> {
        Self::new(vec![u0, u1], samples)
    }

    /// u(t) = base + 2πt·winding, a closed loop on a torus-type chart.
    pub fn torus_loop(base: &[f64], winding: &[i64], samples: usize) -> Result<Self> {
        if base.len() != winding.len() {
            return Err(MaslovError::Dimension { expected: base.len(), found: winding.len() });
        }
        let end = base.iter().zip(winding).map(|(b, &w)| b + 2.0 * PI * w as f64).collect();
        Self::segment(base.to_vec(), end, samples)
    }

    pub fn n(&self) -> usize {
        self.knots[0].len()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let segs = self.knots.len() - 1;
        let x = t.clamp(0.0, 1.0) * segs as f64;
        let k = (x.floor() as usize).min(segs - 1);
        let s = x - k as f64;
        self.knots[k].iter().zip(&self.knots[k + 1]).map(|(a, b)| a + s * (b - a)).collect()
    }

    /// Sample times: `samples` equal intervals, with every knot included.
    pub fn times(&self) -> Vec<f64> {
        let segs = self.knots.len() - 1;
        let mut ts: Vec<f64> = (0..=self.samples).map(|k| k as f64 / self.samples as f64).collect();
        ts.extend((1..segs).map(|k| k as f64 / segs as f64));
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts
    }

    pub fn reversed(&self) -> Self {
        let mut knots = self.knots.clone();
        knots.reverse();
        Self { knots, samples: self.samples }
    }

    /// Same path with twice the sampling density.
    pub fn refined(&self) -> Self {
        Self { knots: self.knots.clone(), samples: self.samples * 2 }
    }

    /// Whether the chart points at t = 0 and t = 1 coincide.
    pub fn is_closed(&self, chart: &LagrangianChart, tol: &Tolerances) -> Result<bool> {
        let a = chart.eval(&self.knots[0])?;
        let b = chart.eval(self.knots.last().expect("validated"))?;
        Ok(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol.residual_tol.max(1e-12 * x.abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_flags() {
        let t = Tolerances::default();
        let c = LagrangianChart::circle();
        assert!(ParamPath::torus_loop(&[0.3], &[1], 8).unwrap().is_closed(&c, &t).unwrap());
        assert!(!ParamPath::segment(vec![0.0], vec![PI / 2.0], 8).unwrap().is_closed(&c, &t).unwrap());
    }

    #[test]
    fn knots_are_sampled() {
        let p = ParamPath::new(vec![vec![0.0], vec![1.0], vec![3.0]], 3).unwrap();
        let ts = p.times();
        assert!(ts.iter().any(|&t| (t - 0.5).abs() < 1e-15));
        assert_eq!(p.eval(0.5), vec![1.0]);
        assert_eq!(p.eval(0.75), vec![2.0]);
        assert_eq!(p.reversed().eval(0.0), vec![3.0]);
    }

    #[test]
    fn bad_paths() {
        assert!(ParamPath::new(vec![vec![0.0]], 3).is_err());
        assert!(ParamPath::new(vec![vec![0.0], vec![0.0, 1.0]], 3).is_err());
        assert!(ParamPath::new(vec![vec![0.0], vec![f64::NAN]], 3).is_err());
        assert!(ParamPath::new(vec![vec![0.0], vec![1.0]], 0).is_err());
    }
}
