use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::NaiveDateTime;
use serde::Serialize;

use super::config::SessionConfig;
use crate::error::{Error, Result};

/// Fixed-point price in units of 1e-8 currency units.
///
/// Prices stay exact through VWAP accumulation so window sums do not depend
/// on the order ticks arrive in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Price(i64);

impl Price {
    pub const SCALE: i64 = 100_000_000;
    const DECIMALS: usize = 8;

    pub fn from_units(units: i64) -> Self {
        Price(units)
    }

    pub fn units(self) -> i64 {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }
}

impl FromStr for Price {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(format!("invalid price `{s}`"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("invalid price `{s}`"));
        }
        if frac_part.len() > Self::DECIMALS {
            return Err(format!("price `{s}` has more than {} decimals", Self::DECIMALS));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| format!("price `{s}` out of range"))?
        };
        let mut frac: i64 = 0;
        for (i, b) in frac_part.bytes().enumerate() {
            frac += i64::from(b - b'0') * 10_i64.pow((Self::DECIMALS - 1 - i) as u32);
        }
        let units = int
            .checked_mul(Self::SCALE)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(|| format!("price `{s}` out of range"))?;
        Ok(Price(if neg { -units } else { units }))
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let scale = Self::SCALE as u64;
        write!(f, "{sign}{}.{:08}", abs / scale, abs % scale)
    }
}

/// One trade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TickRecord {
    pub timestamp: NaiveDateTime,
    pub symbol: String,
    pub price: Price,
    pub volume: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseIssue {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct TickParse {
    /// Grouped by symbol, time-ordered within a symbol.
    pub ticks: Vec<TickRecord>,
    /// Rows skipped in lenient mode.
    pub issues: Vec<ParseIssue>,
    /// Well-formed rows dropped because they fall outside the session or calendar.
    pub out_of_session: usize,
}

const HEADER: [&str; 4] = ["timestamp", "symbol", "price", "volume"];

fn parse_timestamp(s: &str) -> std::result::Result<NaiveDateTime, String> {
    let s = s.trim();
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .map_err(|_| format!("invalid timestamp `{s}`"))
}

fn parse_row(rec: &csv::StringRecord) -> std::result::Result<TickRecord, String> {
    if rec.len() != 4 {
        return Err(format!("expected 4 fields, found {}", rec.len()));
    }
    let timestamp = parse_timestamp(&rec[0])?;
    let symbol = rec[1].trim();
    if symbol.is_empty() {
        return Err("empty symbol".into());
    }
    let price: Price = rec[2].parse()?;
    if price.units() <= 0 {
        return Err(format!("non-positive price {}", rec[2].trim()));
    }
    let volume: i64 = rec[3]
        .trim()
        .parse()
        .map_err(|_| format!("invalid volume `{}`", rec[3].trim()))?;
    if volume < 1 {
        return Err(format!("non-positive volume {volume}"));
    }
    Ok(TickRecord {
        timestamp,
        symbol: symbol.to_string(),
        price,
        volume: volume as u64,
    })
}

/// Parse a tick CSV (`timestamp,symbol,price,volume`).
///
/// Rows outside `[session_open, session_close)`, or on dates missing from a
/// configured calendar, are discarded. In strict mode the first malformed
/// row aborts with its line number; otherwise it is recorded and skipped.
pub fn parse_ticks<R: Read>(source: R, config: &SessionConfig, strict: bool) -> Result<TickParse> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    if headers.iter().map(str::to_ascii_lowercase).ne(HEADER.iter().map(|s| s.to_string())) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", HEADER.join(",")),
        });
    }

    let mut out = TickParse::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if strict {
                    return Err(e.into());
                }
                out.issues.push(ParseIssue { line, message: e.to_string() });
                continue;
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(line);
        match parse_row(&record) {
            Ok(tick) => {
                let in_calendar = config.trading_days.is_empty()
                    || config.trading_days.binary_search(&tick.timestamp.date()).is_ok();
                if in_calendar && config.window_index(tick.timestamp.time()).is_some() {
                    out.ticks.push(tick);
                } else {
                    out.out_of_session += 1;
                }
            }
            Err(message) if strict => return Err(Error::Parse { line, message }),
            Err(message) => out.issues.push(ParseIssue { line, message }),
        }
    }

    out.ticks
        .sort_by(|a, b| a.symbol.cmp(&b.symbol).then(a.timestamp.cmp(&b.timestamp)));
    Ok(out)
}

/// Split a parsed tick list into per-symbol runs.
pub fn group_by_symbol(ticks: &[TickRecord]) -> BTreeMap<String, Vec<TickRecord>> {
    let mut out: BTreeMap<String, Vec<TickRecord>> = BTreeMap::new();
    for t in ticks {
        out.entry(t.symbol.clone()).or_default().push(t.clone());
    }
    out
}
