use chrono::{NaiveDate, NaiveDateTime};

use super::config::SessionConfig;
use super::tick::{Price, TickRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub window_start: NaiveDateTime,
    pub vwap: f64,
    /// True when the window had no trades and the price was carried over.
    pub filled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries {
    pub symbol: String,
    /// `days.len() * windows_per_day` bars, day-major.
    pub bars: Vec<Bar>,
    /// Days on which the symbol did not trade at all.
    pub empty_days: Vec<NaiveDate>,
}

impl BarSeries {
    pub fn filled_count(&self) -> usize {
        self.bars.iter().filter(|b| b.filled).count()
    }

    pub fn fill_fraction(&self) -> f64 {
        if self.bars.is_empty() {
            return 0.0;
        }
        self.filled_count() as f64 / self.bars.len() as f64
    }

    /// Forward-filled window count for each day.
    pub fn filled_per_day(&self, windows_per_day: usize) -> Vec<u32> {
        self.bars
            .chunks(windows_per_day)
            .map(|day| day.iter().filter(|b| b.filled).count() as u32)
            .collect()
    }
}

#[derive(Clone, Copy, Default)]
struct Accumulator {
    notional: i128,
    volume: u128,
}

impl Accumulator {
    fn is_empty(&self) -> bool {
        self.volume == 0
    }

    /// Exact integer quotient plus fractional remainder, then rescaled.
    fn vwap(&self) -> f64 {
        let den = self.volume as i128;
        let q = self.notional / den;
        let r = self.notional % den;
        (q as f64 + r as f64 / den as f64) / Price::SCALE as f64
    }
}

/// Aggregate one symbol's ticks into fixed-width VWAP bars over `days`.
///
/// Empty windows carry the previous VWAP forward. Windows before a day's
/// first trade take that trade's window VWAP. A day with no trades at all is
/// recorded in `empty_days` and filled from the previous close (or, for
/// leading empty days, from the first trade of the series).
pub fn build_vwap_bars(ticks: &[TickRecord], days: &[NaiveDate], config: &SessionConfig) -> Result<BarSeries> {
    let symbol = match ticks.first() {
        Some(t) => t.symbol.clone(),
        None => return Err(Error::invalid("no ticks for symbol")),
    };
    let per_day = config.windows_per_day();
    let mut acc = vec![Accumulator::default(); days.len() * per_day];

    for t in ticks {
        if t.symbol != symbol {
            return Err(Error::invalid(format!(
                "ticks for `{}` mixed into series `{symbol}`",
                t.symbol
            )));
        }
        let Ok(day) = days.binary_search(&t.timestamp.date()) else {
            continue;
        };
        let Some(w) = config.window_index(t.timestamp.time()) else {
            continue;
        };
        let a = &mut acc[day * per_day + w];
        a.notional += i128::from(t.price.units()) * i128::from(t.volume);
        a.volume += u128::from(t.volume);
    }

    let first_vwap = acc
        .iter()
        .find(|a| !a.is_empty())
        .map(Accumulator::vwap)
        .ok_or_else(|| Error::invalid(format!("symbol `{symbol}` has no trades inside the session")))?;

    let mut bars = Vec::with_capacity(acc.len());
    let mut empty_days = Vec::new();
    let mut carry: Option<f64> = None;

    for (d, date) in days.iter().enumerate() {
        let day = &acc[d * per_day..(d + 1) * per_day];
        let opening = day.iter().find(|a| !a.is_empty()).map(Accumulator::vwap);
        if opening.is_none() {
            empty_days.push(*date);
        }
        let mut last = opening.or(carry).unwrap_or(first_vwap);
        for (w, a) in day.iter().enumerate() {
            let filled = a.is_empty();
            if !filled {
                last = a.vwap();
            }
            bars.push(Bar {
                window_start: config.window_start(*date, w),
                vwap: last,
                filled,
            });
        }
        carry = Some(last);
    }

    Ok(BarSeries { symbol, bars, empty_days })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveTime;
    use proptest::prelude::*;

    fn session() -> SessionConfig {
        SessionConfig {
            session_open: NaiveTime::from_hms_opt(9, 30, 0).unwrap(),
            session_close: NaiveTime::from_hms_opt(9, 32, 0).unwrap(),
            bar_width_secs: 30,
            ..SessionConfig::default()
        }
    }

    fn day(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn tick(ts: &str, price: &str, volume: u64) -> TickRecord {
        TickRecord {
            timestamp: NaiveDateTime::parse_from_str(ts, "%Y-%m-%dT%H:%M:%S").unwrap(),
            symbol: "X".into(),
            price: price.parse().unwrap(),
            volume,
        }
    }

    #[test]
    fn equal_volume_window_is_plain_mean() {
        let ticks = [tick("2014-01-02T09:30:01", "10", 2), tick("2014-01-02T09:30:05", "20", 2)];
        let s = build_vwap_bars(&ticks, &[day("2014-01-02")], &session()).unwrap();
        assert_eq!(s.bars[0].vwap, 15.0);
        assert!(!s.bars[0].filled);
    }

    #[test]
    fn single_trade_window() {
        let ticks = [tick("2014-01-02T09:30:01", "12.5", 7)];
        let s = build_vwap_bars(&ticks, &[day("2014-01-02")], &session()).unwrap();
        assert_eq!(s.bars[0].vwap, 12.5);
    }

    #[test]
    fn empty_window_forward_fills() {
        let ticks = [tick("2014-01-02T09:30:10", "101.0", 3), tick("2014-01-02T09:31:40", "102.0", 3)];
        let s = build_vwap_bars(&ticks, &[day("2014-01-02")], &session()).unwrap();
        let got: Vec<_> = s.bars.iter().map(|b| (b.vwap, b.filled)).collect();
        assert_eq!(got, vec![(101.0, false), (101.0, true), (101.0, true), (102.0, false)]);
    }

    #[test]
    fn late_open_back_fills_from_first_trade() {
        let ticks = [tick("2014-01-02T09:31:10", "50", 1)];
        let s = build_vwap_bars(&ticks, &[day("2014-01-02")], &session()).unwrap();
        let got: Vec<_> = s.bars.iter().map(|b| (b.vwap, b.filled)).collect();
        assert_eq!(got, vec![(50.0, true), (50.0, true), (50.0, false), (50.0, true)]);
    }

    #[test]
    fn empty_day_is_flagged_and_carried() {
        let days = [day("2014-01-02"), day("2014-01-03"), day("2014-01-06")];
        let ticks = [tick("2014-01-02T09:31:59", "10", 1), tick("2014-01-06T09:30:00", "11", 1)];
        let s = build_vwap_bars(&ticks, &days, &session()).unwrap();
        assert_eq!(s.bars.len(), 12);
        assert_eq!(s.empty_days, vec![day("2014-01-03")]);
        assert!(s.bars[4..8].iter().all(|b| b.filled && b.vwap == 10.0));
        assert_eq!(s.filled_per_day(4), vec![3, 4, 3]);
    }

    #[test]
    fn leading_empty_day_uses_first_trade() {
        let days = [day("2014-01-02"), day("2014-01-03")];
        let ticks = [tick("2014-01-03T09:30:00", "7", 1)];
        let s = build_vwap_bars(&ticks, &days, &session()).unwrap();
        assert!(s.bars[..4].iter().all(|b| b.filled && b.vwap == 7.0));
        assert_eq!(s.empty_days, vec![day("2014-01-02")]);
    }

    #[test]
    fn no_ticks_is_an_error() {
        assert!(build_vwap_bars(&[], &[day("2014-01-02")], &session()).is_err());
    }

    proptest! {
        #[test]
        fn vwap_within_price_range_and_order_free(
            trades in prop::collection::vec((1i64..10_000_000_000_000, 1u64..1_000_000), 1..20),
            seed in any::<u64>(),
        ) {
            let mk = |&(p, v): &(i64, u64)| TickRecord {
                timestamp: NaiveDateTime::parse_from_str("2014-01-02T09:30:07", "%Y-%m-%dT%H:%M:%S").unwrap(),
                symbol: "X".into(),
                price: Price::from_units(p),
                volume: v,
            };
            let ticks: Vec<_> = trades.iter().map(mk).collect();
            let mut shuffled = ticks.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let days = [day("2014-01-02")];
            let a = build_vwap_bars(&ticks, &days, &session()).unwrap();
            let b = build_vwap_bars(&shuffled, &days, &session()).unwrap();
            prop_assert_eq!(a.bars[0].vwap, b.bars[0].vwap);
            let lo = trades.iter().map(|t| t.0).min().unwrap() as f64 / Price::SCALE as f64;
            let hi = trades.iter().map(|t| t.0).max().unwrap() as f64 / Price::SCALE as f64;
            prop_assert!(lo <= a.bars[0].vwap && a.bars[0].vwap <= hi);
            prop_assert_eq!(a.bars.len(), 4);
        }
    }
}
