use std::sync::OnceLock;

use serde::Serialize;

use super::entropy::count_entropy;
use super::partition::{bin_of, grid_edges, ranks, reference_bins, sqrt_rule_bins, AdaptivePartition, PartitionCell};
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

pub const MIN_SAMPLES: usize = 50;
pub const DEFAULT_ESTIMATOR: &str = "adaptive";

/// Output of a mutual-information estimator. Entropies in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiEstimate {
    /// Estimate after clamping into `[0, min(hx, hy)]`.
    pub mi: f64,
    /// Estimator output before clamping.
    pub raw_mi: f64,
    pub joint_entropy: f64,
    pub hx: f64,
    pub hy: f64,
    pub partition: AdaptivePartition,
}

/// A rank-based mutual-information estimator.
///
/// Both inputs are rank vectors (a permutation of `0..n`); estimators only
/// see ranks, so every implementation is invariant under strictly monotone
/// transformations of either series.
pub trait MiEstimator: Named + Send + Sync {
    fn estimate(&self, rx: &[u32], ry: &[u32]) -> Result<MiEstimate>;

    /// The clamped MI alone; used on permutation nulls where the partition is not needed.
    fn statistic(&self, rx: &[u32], ry: &[u32]) -> f64;
}

fn check_ranks(rx: &[u32], ry: &[u32]) -> Result<()> {
    if rx.len() != ry.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", rx.len(), ry.len())));
    }
    if rx.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: rx.len(), need: MIN_SAMPLES });
    }
    Ok(())
}

/// Entropy of an equiprobable marginal with `bins` rank bins over `n` points.
fn equiprobable_entropy(bins: usize, n: usize) -> f64 {
    let counts = grid_edges(bins, n).windows(2).map(|w| (w[1] - w[0]) as u64).collect::<Vec<_>>();
    count_entropy(counts.into_iter(), n as u64)
}

/// Recursive adaptive partitioning of the rank plane.
///
/// Starting from the whole plane, every cell is split at its marginal
/// medians into four quadrants while its points are detectably
/// non-uniform: a chi-square test on the 2×2 quadrants, or on the 4×4
/// sub-quadrants so that symmetric dependence (where the quadrants alone look
/// uniform) is still resolved. MI is the divergence between the leaf
/// occupancies and the product of the uniform rank marginals.
///
/// Marginal entropies come from an equiprobable reference grid of
/// [`reference_bins`] bins per axis; the joint entropy is then
/// `H(X) + H(Y) - I`, and `I` is clamped to `min(H(X), H(Y))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RecursivePartitionEstimator;

// 95% quantiles of chi-square with 3 and 15 degrees of freedom.
const CHI2_3_95: f64 = 7.814_727_903_251_178;
const CHI2_15_95: f64 = 24.995_790_139_728_616;

#[derive(Clone, Copy)]
struct Cell {
    start: usize,
    end: usize,
    x0: u32,
    x1: u32,
    y0: u32,
    y1: u32,
}

fn partition_by<T>(items: &mut [T], pred: impl Fn(&T) -> bool) -> usize {
    let mut split = 0;
    for i in 0..items.len() {
        if pred(&items[i]) {
            items.swap(i, split);
            split += 1;
        }
    }
    split
}

fn chi_square(counts: &[u32], fx: &[f64], fy: &[f64], n: f64) -> f64 {
    let mut chi = 0.0;
    for (i, &px) in fx.iter().enumerate() {
        for (j, &py) in fy.iter().enumerate() {
            let e = n * px * py;
            let d = f64::from(counts[i * fy.len() + j]) - e;
            chi += d * d / e;
        }
    }
    chi
}

impl RecursivePartitionEstimator {
    fn should_split(points: &[(u32, u32)], c: &Cell) -> bool {
        let (wx, wy) = (c.x1 - c.x0, c.y1 - c.y0);
        if points.len() < 2 || wx < 2 || wy < 2 {
            return false;
        }
        let n = points.len() as f64;
        let (mx, my) = (c.x0 + wx / 2, c.y0 + wy / 2);
        let fine = wx >= 4 && wy >= 4;
        if !fine {
            let mut q = [0u32; 4];
            for &(a, b) in points {
                q[usize::from(a >= mx) * 2 + usize::from(b >= my)] += 1;
            }
            let fx = [f64::from(mx - c.x0) / f64::from(wx), f64::from(c.x1 - mx) / f64::from(wx)];
            let fy = [f64::from(my - c.y0) / f64::from(wy), f64::from(c.y1 - my) / f64::from(wy)];
            return chi_square(&q, &fx, &fy, n) > CHI2_3_95;
        }

        let cuts = |lo: u32, mid: u32, hi: u32| [lo, lo + (mid - lo) / 2, mid, mid + (hi - mid) / 2, hi];
        let xs = cuts(c.x0, mx, c.x1);
        let ys = cuts(c.y0, my, c.y1);
        let mut sub = [0u32; 16];
        for &(a, b) in points {
            let i = usize::from(a >= xs[1]) + usize::from(a >= xs[2]) + usize::from(a >= xs[3]);
            let j = usize::from(b >= ys[1]) + usize::from(b >= ys[2]) + usize::from(b >= ys[3]);
            sub[i * 4 + j] += 1;
        }
        let widths = |e: &[u32; 5], w: u32| -> [f64; 4] {
            std::array::from_fn(|i| f64::from(e[i + 1] - e[i]) / f64::from(w))
        };
        let fx4 = widths(&xs, wx);
        let fy4 = widths(&ys, wy);

        let mut q = [0u32; 4];
        for i in 0..4 {
            for j in 0..4 {
                q[(i / 2) * 2 + j / 2] += sub[i * 4 + j];
            }
        }
        let fx = [fx4[0] + fx4[1], fx4[2] + fx4[3]];
        let fy = [fy4[0] + fy4[1], fy4[2] + fy4[3]];
        chi_square(&q, &fx, &fy, n) > CHI2_3_95 || chi_square(&sub, &fx4, &fy4, n) > CHI2_15_95
    }

    /// Divergence of leaf occupancies from the uniform product measure.
    fn divergence(rx: &[u32], ry: &[u32], mut leaves: Option<&mut Vec<PartitionCell>>) -> f64 {
        let n = rx.len();
        let nf = n as f64;
        let mut points: Vec<(u32, u32)> = rx.iter().copied().zip(ry.iter().copied()).collect();
        let mut stack = vec![Cell { start: 0, end: n, x0: 0, x1: n as u32, y0: 0, y1: n as u32 }];
        let mut total = 0.0;

        while let Some(c) = stack.pop() {
            let count = c.end - c.start;
            if count == 0 {
                continue;
            }
            let slice = &mut points[c.start..c.end];
            if Self::should_split(slice, &c) {
                let mx = c.x0 + (c.x1 - c.x0) / 2;
                let my = c.y0 + (c.y1 - c.y0) / 2;
                let left = partition_by(slice, |p| p.0 < mx);
                let low_left = partition_by(&mut slice[..left], |p| p.1 < my);
                let low_right = partition_by(&mut slice[left..], |p| p.1 < my);
                let (s, l) = (c.start, c.start + left);
                stack.push(Cell { start: s, end: s + low_left, x0: c.x0, x1: mx, y0: c.y0, y1: my });
                stack.push(Cell { start: s + low_left, end: l, x0: c.x0, x1: mx, y0: my, y1: c.y1 });
                stack.push(Cell { start: l, end: l + low_right, x0: mx, x1: c.x1, y0: c.y0, y1: my });
                stack.push(Cell { start: l + low_right, end: c.end, x0: mx, x1: c.x1, y0: my, y1: c.y1 });
            } else {
                let area = f64::from(c.x1 - c.x0) * f64::from(c.y1 - c.y0);
                let k = count as f64;
                total += k / nf * (k * nf / area).ln();
                if let Some(out) = leaves.as_deref_mut() {
                    out.push(PartitionCell { x_range: (c.x0, c.x1), y_range: (c.y0, c.y1), count: count as u32 });
                }
            }
        }
        total.max(0.0)
    }
}

impl Named for RecursivePartitionEstimator {
    fn name(&self) -> &'static str {
        "adaptive"
    }
}

impl MiEstimator for RecursivePartitionEstimator {
    fn estimate(&self, rx: &[u32], ry: &[u32]) -> Result<MiEstimate> {
        check_ranks(rx, ry)?;
        let n = rx.len();
        let bins = reference_bins(n);
        let h = equiprobable_entropy(bins, n);
        let mut cells = Vec::new();
        let raw_mi = Self::divergence(rx, ry, Some(&mut cells));
        cells.sort_by_key(|c| (c.x_range, c.y_range));
        let mi = raw_mi.min(h);
        let mut partition = AdaptivePartition::grid(rx, ry, bins);
        partition.cells = cells;
        Ok(MiEstimate { mi, raw_mi, joint_entropy: 2.0 * h - mi, hx: h, hy: h, partition })
    }

    fn statistic(&self, rx: &[u32], ry: &[u32]) -> f64 {
        let n = rx.len();
        Self::divergence(rx, ry, None).min(equiprobable_entropy(reference_bins(n), n))
    }
}

/// Plug-in MI on a fixed equiprobable grid of `max(2, floor(sqrt(n/5)))` bins per axis.
#[derive(Debug, Clone, Copy, Default)]
pub struct EquiprobableGridEstimator;

impl EquiprobableGridEstimator {
    fn plug_in(counts: &[u64], bins: usize, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let marginal: Vec<f64> = grid_edges(bins, n).windows(2).map(|w| (w[1] - w[0]) as f64 / nf).collect();
        let mut mi = 0.0;
        let mut hxy = 0.0;
        for (idx, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = c as f64 / nf;
            mi += p * (p / (marginal[idx / bins] * marginal[idx % bins])).ln();
            hxy -= p * p.ln();
        }
        (mi, hxy)
    }
}

impl Named for EquiprobableGridEstimator {
    fn name(&self) -> &'static str {
        "equiprobable"
    }
}

impl MiEstimator for EquiprobableGridEstimator {
    fn estimate(&self, rx: &[u32], ry: &[u32]) -> Result<MiEstimate> {
        check_ranks(rx, ry)?;
        let n = rx.len();
        let bins = sqrt_rule_bins(n);
        let partition = AdaptivePartition::grid(rx, ry, bins);
        let h = equiprobable_entropy(bins, n);
        let (raw_mi, joint_entropy) = Self::plug_in(&partition.cell_counts, bins, n);
        Ok(MiEstimate {
            mi: raw_mi.clamp(0.0, h),
            raw_mi,
            joint_entropy,
            hx: h,
            hy: h,
            partition,
        })
    }

    fn statistic(&self, rx: &[u32], ry: &[u32]) -> f64 {
        let n = rx.len();
        let bins = sqrt_rule_bins(n);
        let mut counts = vec![0u64; bins * bins];
        for (&a, &b) in rx.iter().zip(ry) {
            counts[bin_of(a, bins, n) * bins + bin_of(b, bins, n)] += 1;
        }
        Self::plug_in(&counts, bins, n).0.clamp(0.0, equiprobable_entropy(bins, n))
    }
}

/// All built-in estimators, keyed by name.
pub fn estimators() -> &'static Registry<dyn MiEstimator> {
    static REGISTRY: OnceLock<Registry<dyn MiEstimator>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn MiEstimator> = Registry::new("mi estimator");
        r.register(Box::new(RecursivePartitionEstimator));
        r.register(Box::new(EquiprobableGridEstimator));
        r
    })
}

/// MI of two series with the default adaptive-partition estimator.
pub fn mutual_information_adaptive(x: &[f64], y: &[f64]) -> Result<MiEstimate> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    RecursivePartitionEstimator.estimate(&ranks(x), &ranks(y))
}
