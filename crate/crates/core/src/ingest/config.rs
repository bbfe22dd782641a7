use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A named, inclusive date range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRange {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl PeriodRange {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

/// Trading session layout. Timestamps are exchange-local wall clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    #[serde(default = "default_open")]
    pub session_open: NaiveTime,
    #[serde(default = "default_close")]
    pub session_close: NaiveTime,
    #[serde(default = "default_bar_width")]
    pub bar_width_secs: u32,
    /// Explicit calendar. When empty, the days present in the tick data are used.
    #[serde(default)]
    pub trading_days: Vec<NaiveDate>,
    #[serde(default)]
    pub periods: Vec<PeriodRange>,
}

fn default_open() -> NaiveTime {
    NaiveTime::from_hms_opt(9, 30, 0).unwrap()
}

fn default_close() -> NaiveTime {
    NaiveTime::from_hms_opt(15, 30, 0).unwrap()
}

fn default_bar_width() -> u32 {
    30
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            session_open: default_open(),
            session_close: default_close(),
            bar_width_secs: default_bar_width(),
            trading_days: Vec::new(),
            periods: Vec::new(),
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.session_close <= self.session_open {
            return Err(Error::invalid("session_close must be after session_open"));
        }
        if self.bar_width_secs == 0 {
            return Err(Error::invalid("bar_width_secs must be positive"));
        }
        let len = self.session_seconds();
        if len % i64::from(self.bar_width_secs) != 0 {
            return Err(Error::invalid(format!(
                "session length {len}s is not a multiple of bar width {}s",
                self.bar_width_secs
            )));
        }
        if self.windows_per_day() < 2 {
            return Err(Error::invalid("session must contain at least two bars"));
        }
        if self.trading_days.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("trading_days must be strictly increasing"));
        }
        for p in &self.periods {
            if p.end < p.start {
                return Err(Error::invalid(format!("period `{}` ends before it starts", p.name)));
            }
        }
        for w in self.periods.windows(2) {
            if w[1].start <= w[0].end {
                return Err(Error::invalid(format!(
                    "periods `{}` and `{}` overlap or are out of order",
                    w[0].name, w[1].name
                )));
            }
        }
        Ok(())
    }

    fn session_seconds(&self) -> i64 {
        (self.session_close - self.session_open).num_seconds()
    }

    pub fn windows_per_day(&self) -> usize {
        (self.session_seconds() / i64::from(self.bar_width_secs)) as usize
    }

    /// Window index for a time of day, `None` outside `[open, close)`.
    pub fn window_index(&self, time: NaiveTime) -> Option<usize> {
        if time < self.session_open || time >= self.session_close {
            return None;
        }
        let secs = i64::from(time.num_seconds_from_midnight())
            - i64::from(self.session_open.num_seconds_from_midnight());
        Some((secs / i64::from(self.bar_width_secs)) as usize)
    }

    pub fn window_start(&self, date: NaiveDate, index: usize) -> NaiveDateTime {
        date.and_time(self.session_open) + Duration::seconds(index as i64 * i64::from(self.bar_width_secs))
    }

    pub fn period_of(&self, date: NaiveDate) -> Option<&PeriodRange> {
        self.periods.iter().find(|p| p.contains(date))
    }
}
