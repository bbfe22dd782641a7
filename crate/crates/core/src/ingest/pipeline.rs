use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::NaiveDate;
use rayon::prelude::*;

use super::bars::{build_vwap_bars, BarSeries};
use super::config::SessionConfig;
use super::returns::{compute_log_returns, filter_symbols, split_periods, DropReport, ReturnsPanel};
use super::tick::{group_by_symbol, parse_ticks, ParseIssue};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOutput {
    /// One panel per configured period (a single `"all"` panel without periods).
    pub panels: Vec<ReturnsPanel>,
    pub drop_report: DropReport,
    pub issues: Vec<ParseIssue>,
    pub out_of_session: usize,
    /// Per symbol, days with no trades.
    pub empty_days: BTreeMap<String, Vec<NaiveDate>>,
}

/// Tick CSV to filtered per-period return panels.
///
/// The calendar is `config.trading_days` when set, otherwise every date that
/// has at least one in-session tick.
pub fn ingest_ticks<R: Read>(
    source: R,
    sectors: &BTreeMap<String, String>,
    config: &SessionConfig,
    strict: bool,
    max_empty_fraction: f64,
) -> Result<IngestOutput> {
    config.validate()?;
    let parsed = parse_ticks(source, config, strict)?;
    if parsed.ticks.is_empty() {
        return Err(Error::invalid("no in-session ticks"));
    }
    let days: Vec<NaiveDate> = if config.trading_days.is_empty() {
        parsed.ticks.iter().map(|t| t.timestamp.date()).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        config.trading_days.clone()
    };
    let groups: Vec<_> = group_by_symbol(&parsed.ticks).into_iter().collect();
    let series: Vec<BarSeries> = groups
        .par_iter()
        .map(|(_, ticks)| build_vwap_bars(ticks, &days, config))
        .collect::<Result<_>>()?;
    let empty_days = series
        .iter()
        .filter(|s| !s.empty_days.is_empty())
        .map(|s| (s.symbol.clone(), s.empty_days.clone()))
        .collect();
    let all = compute_log_returns(&series, sectors, &days, config)?;
    let periods = split_periods(&all, config)?;
    let (panels, drop_report) = filter_symbols(&periods, max_empty_fraction)?;
    Ok(IngestOutput {
        panels,
        drop_report,
        issues: parsed.issues,
        out_of_session: parsed.out_of_session,
        empty_days,
    })
}
