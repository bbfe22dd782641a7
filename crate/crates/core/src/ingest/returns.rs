use std::collections::{BTreeMap, BTreeSet};

use chrono::{NaiveDate, NaiveDateTime};
use nalgebra::DMatrix;
use serde::Serialize;

use super::bars::BarSeries;
use super::config::SessionConfig;
use crate::error::{Error, Result};

/// An m × k matrix of log returns for one analysis period.
///
/// Rows are windows, columns symbols. Returns never span a day boundary, so
/// each trading day contributes `windows_per_day - 1` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    pub period: String,
    pub symbols: Vec<String>,
    pub sectors: BTreeMap<String, String>,
    pub returns: DMatrix<f64>,
    /// Start of the window at which each return begins.
    pub timestamps: Vec<NaiveDateTime>,
    pub days: Vec<NaiveDate>,
    /// Row → index into `days`.
    pub day_index: Vec<usize>,
    pub windows_per_day: usize,
    /// `[day][symbol]` forward-filled window counts; empty when unknown.
    pub fill_counts: Vec<Vec<u32>>,
}

impl ReturnsPanel {
    pub fn rows(&self) -> usize {
        self.returns.nrows()
    }

    pub fn cols(&self) -> usize {
        self.returns.ncols()
    }

    pub fn sector_of(&self, symbol: &str) -> &str {
        self.sectors.get(symbol).map(String::as_str).unwrap_or("UNKNOWN")
    }

    pub fn sector_list(&self) -> Vec<String> {
        self.symbols.iter().map(|s| self.sector_of(s).to_string()).collect()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let m = self.rows();
        &self.returns.as_slice()[j * m..(j + 1) * m]
    }

    /// Fraction of forward-filled windows for column `j` over this panel's days.
    pub fn fill_fraction(&self, j: usize) -> f64 {
        if self.fill_counts.is_empty() || self.days.is_empty() {
            return 0.0;
        }
        let filled: u64 = self.fill_counts.iter().map(|d| u64::from(d[j])).sum();
        filled as f64 / (self.days.len() * self.windows_per_day) as f64
    }

    pub fn select_columns(&self, cols: &[usize]) -> ReturnsPanel {
        let symbols: Vec<String> = cols.iter().map(|&c| self.symbols[c].clone()).collect();
        let sectors = symbols
            .iter()
            .filter_map(|s| self.sectors.get(s).map(|v| (s.clone(), v.clone())))
            .collect();
        ReturnsPanel {
            period: self.period.clone(),
            symbols,
            sectors,
            returns: self.returns.select_columns(cols),
            timestamps: self.timestamps.clone(),
            days: self.days.clone(),
            day_index: self.day_index.clone(),
            windows_per_day: self.windows_per_day,
            fill_counts: self
                .fill_counts
                .iter()
                .map(|d| cols.iter().map(|&c| d[c]).collect())
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, k) = self.returns.shape();
        if self.symbols.len() != k {
            return Err(Error::invalid(format!("{} symbols for {k} columns", self.symbols.len())));
        }
        if self.timestamps.len() != m || self.day_index.len() != m {
            return Err(Error::invalid("row metadata length does not match returns"));
        }
        if self.day_index.iter().any(|&d| d >= self.days.len()) {
            return Err(Error::invalid("day index out of range"));
        }
        if let Some((idx, _)) = self.returns.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite return in column `{}`",
                self.symbols[idx / m.max(1)]
            )));
        }
        Ok(())
    }
}

/// Log returns `ln(v[t+1]) - ln(v[t])` within each day, for symbols sharing one window grid.
pub fn compute_log_returns(
    series: &[BarSeries],
    sectors: &BTreeMap<String, String>,
    days: &[NaiveDate],
    config: &SessionConfig,
) -> Result<ReturnsPanel> {
    let per_day = config.windows_per_day();
    let first = series.first().ok_or_else(|| Error::invalid("no bar series"))?;
    let expected = days.len() * per_day;
    for s in series {
        if s.bars.len() != expected {
            return Err(Error::invalid(format!(
                "series `{}` has {} bars, expected {expected}",
                s.symbol,
                s.bars.len()
            )));
        }
        if s.bars.iter().zip(&first.bars).any(|(a, b)| a.window_start != b.window_start) {
            return Err(Error::invalid(format!(
                "series `{}` does not share the window grid of `{}`",
                s.symbol, first.symbol
            )));
        }
    }

    let rows_per_day = per_day - 1;
    let m = days.len() * rows_per_day;
    let k = series.len();
    let mut data = Vec::with_capacity(m * k);
    for s in series {
        for day in s.bars.chunks(per_day) {
            for w in day.windows(2) {
                data.push(w[1].vwap.ln() - w[0].vwap.ln());
            }
        }
    }
    let returns = DMatrix::from_vec(m, k, data);

    let mut timestamps = Vec::with_capacity(m);
    let mut day_index = Vec::with_capacity(m);
    for (d, day) in first.bars.chunks(per_day).enumerate() {
        for b in &day[..rows_per_day] {
            timestamps.push(b.window_start);
            day_index.push(d);
        }
    }

    let per_series: Vec<Vec<u32>> = series.iter().map(|s| s.filled_per_day(per_day)).collect();
    let fill_counts = (0..days.len())
        .map(|d| per_series.iter().map(|c| c[d]).collect())
        .collect();

    let panel = ReturnsPanel {
        period: "all".into(),
        symbols: series.iter().map(|s| s.symbol.clone()).collect(),
        sectors: series
            .iter()
            .filter_map(|s| sectors.get(&s.symbol).map(|v| (s.symbol.clone(), v.clone())))
            .collect(),
        returns,
        timestamps,
        days: days.to_vec(),
        day_index,
        windows_per_day: per_day,
        fill_counts,
    };
    panel.validate()?;
    Ok(panel)
}

/// One panel per configured period, rows in original order.
pub fn split_periods(panel: &ReturnsPanel, config: &SessionConfig) -> Result<Vec<ReturnsPanel>> {
    if config.periods.is_empty() {
        return Ok(vec![panel.clone()]);
    }
    let mut assignment = Vec::with_capacity(panel.days.len());
    for day in &panel.days {
        let idx = config
            .periods
            .iter()
            .position(|p| p.contains(*day))
            .ok_or_else(|| Error::invalid(format!("trading day {day} is not covered by any period")))?;
        assignment.push(idx);
    }

    let mut out = Vec::with_capacity(config.periods.len());
    for (p_idx, period) in config.periods.iter().enumerate() {
        let day_ids: Vec<usize> = (0..panel.days.len()).filter(|&d| assignment[d] == p_idx).collect();
        let mut remap = vec![usize::MAX; panel.days.len()];
        for (new, &old) in day_ids.iter().enumerate() {
            remap[old] = new;
        }
        let rows: Vec<usize> = (0..panel.rows()).filter(|&r| assignment[panel.day_index[r]] == p_idx).collect();
        out.push(ReturnsPanel {
            period: period.name.clone(),
            symbols: panel.symbols.clone(),
            sectors: panel.sectors.clone(),
            returns: panel.returns.select_rows(&rows),
            timestamps: rows.iter().map(|&r| panel.timestamps[r]).collect(),
            days: day_ids.iter().map(|&d| panel.days[d]).collect(),
            day_index: rows.iter().map(|&r| remap[panel.day_index[r]]).collect(),
            windows_per_day: panel.windows_per_day,
            fill_counts: if panel.fill_counts.is_empty() {
                Vec::new()
            } else {
                day_ids.iter().map(|&d| panel.fill_counts[d].clone()).collect()
            },
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedSymbol {
    pub symbol: String,
    /// Fill fraction per period, in period order.
    pub fill_fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct DropReport {
    pub max_empty_fraction: f64,
    pub kept: Vec<String>,
    pub dropped: Vec<DroppedSymbol>,
}

/// Drop every symbol whose forward-filled fraction exceeds the threshold in
/// any period, from all periods alike.
pub fn filter_symbols(panels: &[ReturnsPanel], max_empty_fraction: f64) -> Result<(Vec<ReturnsPanel>, DropReport)> {
    if !(0.0..=1.0).contains(&max_empty_fraction) {
        return Err(Error::invalid("max_empty_fraction must lie in [0, 1]"));
    }
    let first = panels.first().ok_or_else(|| Error::invalid("no panels to filter"))?;
    if panels.iter().any(|p| p.symbols != first.symbols) {
        return Err(Error::invalid("panels do not share a symbol set"));
    }

    let mut drop = BTreeSet::new();
    let mut dropped = Vec::new();
    for (j, sym) in first.symbols.iter().enumerate() {
        let fractions: Vec<f64> = panels.iter().map(|p| p.fill_fraction(j)).collect();
        if fractions.iter().any(|&f| f > max_empty_fraction) {
            drop.insert(j);
            dropped.push(DroppedSymbol { symbol: sym.clone(), fill_fractions: fractions });
        }
    }
    let keep: Vec<usize> = (0..first.cols()).filter(|j| !drop.contains(j)).collect();
    if keep.is_empty() {
        return Err(Error::invalid("every symbol exceeded the empty-window threshold"));
    }
    let report = DropReport {
        max_empty_fraction,
        kept: keep.iter().map(|&j| first.symbols[j].clone()).collect(),
        dropped,
    };
    Ok((panels.iter().map(|p| p.select_columns(&keep)).collect(), report))
}
