use serde::Serialize;

/// Ranks `0..n`, ties broken by original index so the result is deterministic.
pub fn ranks(x: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..x.len() as u32).collect();
    order.sort_by(|&a, &b| x[a as usize].total_cmp(&x[b as usize]).then(a.cmp(&b)));
    let mut out = vec![0u32; x.len()];
    for (r, &i) in order.iter().enumerate() {
        out[i as usize] = r as u32;
    }
    out
}

/// Bins per axis of the reference marginal grid: `ceil(log2 n) + 1`.
pub fn reference_bins(n: usize) -> usize {
    let bits = usize::BITS - (n.max(1) - 1).leading_zeros();
    (bits as usize + 1).max(2)
}

/// `max(2, floor(sqrt(n / 5)))`: expected cell occupancy ≥ 5 under independence.
pub fn sqrt_rule_bins(n: usize) -> usize {
    ((n as f64 / 5.0).sqrt().floor() as usize).max(2)
}

/// A leaf rectangle of a recursive partition, in rank coordinates (half-open).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PartitionCell {
    pub x_range: (u32, u32),
    pub y_range: (u32, u32),
    pub count: u32,
}

/// Rank-based equiprobable partition of the plane.
///
/// `x_edges`/`y_edges` are rank boundaries of the marginal grid (length
/// `bins + 1`, from 0 to n); `cell_counts` is the row-major `bins × bins`
/// occupancy of that grid. `cells` holds the leaves of a recursive
/// refinement when the estimator produced one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaptivePartition {
    pub bins: usize,
    pub x_edges: Vec<usize>,
    pub y_edges: Vec<usize>,
    pub cell_counts: Vec<u64>,
    pub cells: Vec<PartitionCell>,
}

#[inline]
pub(crate) fn bin_of(rank: u32, bins: usize, n: usize) -> usize {
    (rank as usize * bins) / n
}

pub(crate) fn grid_edges(bins: usize, n: usize) -> Vec<usize> {
    (0..=bins).map(|b| (b * n).div_ceil(bins)).collect()
}

impl AdaptivePartition {
    pub fn grid(rx: &[u32], ry: &[u32], bins: usize) -> Self {
        let n = rx.len();
        let mut cell_counts = vec![0u64; bins * bins];
        for (&a, &b) in rx.iter().zip(ry) {
            cell_counts[bin_of(a, bins, n) * bins + bin_of(b, bins, n)] += 1;
        }
        let edges = grid_edges(bins, n);
        AdaptivePartition {
            bins,
            x_edges: edges.clone(),
            y_edges: edges,
            cell_counts,
            cells: Vec::new(),
        }
    }

    pub fn total(&self) -> u64 {
        self.cell_counts.iter().sum()
    }

    pub fn row_counts(&self) -> Vec<u64> {
        self.cell_counts.chunks(self.bins).map(|r| r.iter().sum()).collect()
    }

    pub fn col_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.bins];
        for row in self.cell_counts.chunks(self.bins) {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ties_broken_by_index() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![2, 0, 3, 1]);
    }

    #[test]
    fn bin_rules() {
        assert_eq!(reference_bins(50), 7);
        assert_eq!(reference_bins(64), 7);
        assert_eq!(reference_bins(65), 8);
        assert_eq!(reference_bins(100_000), 18);
        assert_eq!(sqrt_rule_bins(100_000), 141);
        assert_eq!(sqrt_rule_bins(10), 2);
    }

    proptest! {
        #[test]
        fn grid_is_equiprobable(xs in prop::collection::vec(-1e3f64..1e3, 12..400), bins in 2usize..12) {
            let ys: Vec<f64> = xs.iter().rev().copied().collect();
            let p = AdaptivePartition::grid(&ranks(&xs), &ranks(&ys), bins);
            prop_assert_eq!(p.total(), xs.len() as u64);
            for counts in [p.row_counts(), p.col_counts()] {
                let lo = counts.iter().min().unwrap();
                let hi = counts.iter().max().unwrap();
                prop_assert!(hi - lo <= 1);
            }
            for w in p.x_edges.windows(2) {
                prop_assert_eq!((w[1] - w[0]) as u64, p.row_counts()[p.x_edges.iter().position(|&e| e == w[0]).unwrap()]);
            }
        }
    }
}
