use std::collections::BTreeMap;

use serde::Serialize;

use super::graph::SpanningTree;
use crate::error::{Error, Result};

/// Nodes with degree strictly above this are hubs.
pub const DEFAULT_HUB_THRESHOLD: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub x_min: usize,
    pub n: usize,
    /// `1 + n / Σ ln(d / (x_min − ½))`.
    pub alpha: f64,
    /// `1 + n / Σ ln(d / x_min)`; undefined when every degree equals `x_min`.
    pub alpha_uncorrected: Option<f64>,
}

impl PowerLawFit {
    /// Probability of degree `d` under the fitted model, integrating the
    /// continuous density over `[d − ½, d + ½]`.
    pub fn pmf(&self, d: usize) -> f64 {
        if d < self.x_min {
            return 0.0;
        }
        let lo = self.x_min as f64 - 0.5;
        let e = 1.0 - self.alpha;
        ((d as f64 - 0.5) / lo).powf(e) - ((d as f64 + 0.5) / lo).powf(e)
    }
}

pub fn powerlaw_mle(degrees: &[usize], x_min: usize) -> Result<PowerLawFit> {
    if x_min == 0 {
        return Err(Error::invalid("x_min must be at least 1"));
    }
    if degrees.is_empty() {
        return Err(Error::invalid("no degrees to fit"));
    }
    if let Some(d) = degrees.iter().find(|&&d| d < x_min) {
        return Err(Error::invalid(format!("degree {d} below x_min = {x_min}")));
    }
    let n = degrees.len();
    let shifted = x_min as f64 - 0.5;
    let s_corr: f64 = degrees.iter().map(|&d| (d as f64 / shifted).ln()).sum();
    let s_raw: f64 = degrees.iter().map(|&d| (d as f64 / x_min as f64).ln()).sum();
    Ok(PowerLawFit {
        x_min,
        n,
        alpha: 1.0 + n as f64 / s_corr,
        alpha_uncorrected: (s_raw > 0.0).then(|| 1.0 + n as f64 / s_raw),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeDistribution {
    pub degrees: Vec<usize>,
    /// degree → node count.
    pub histogram: BTreeMap<usize, usize>,
    pub fit: PowerLawFit,
    pub hub_threshold: usize,
    pub hubs: Vec<usize>,
}

impl DegreeDistribution {
    pub fn empirical_pmf(&self, d: usize) -> f64 {
        self.histogram.get(&d).copied().unwrap_or(0) as f64 / self.degrees.len() as f64
    }
}

pub fn degree_distribution(tree: &SpanningTree, hub_threshold: usize) -> Result<DegreeDistribution> {
    let degrees = tree.degrees();
    let mut histogram = BTreeMap::new();
    for &d in &degrees {
        *histogram.entry(d).or_insert(0) += 1;
    }
    let fit = powerlaw_mle(&degrees, 1)?;
    let hubs = (0..degrees.len()).filter(|&v| degrees[v] > hub_threshold).collect();
    Ok(DegreeDistribution {
        degrees,
        histogram,
        fit,
        hub_threshold,
        hubs,
    })
}
