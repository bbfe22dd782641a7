//! Tick ingestion: CSV parsing, VWAP bars, log returns and period panels.

mod bars;
mod config;
mod pipeline;
mod returns;
mod tick;

pub use bars::{build_vwap_bars, Bar, BarSeries};
pub use config::{PeriodRange, SessionConfig};
pub use pipeline::{ingest_ticks, IngestOutput};
pub use returns::{compute_log_returns, filter_symbols, split_periods, DropReport, DroppedSymbol, ReturnsPanel};
pub use tick::{group_by_symbol, parse_ticks, ParseIssue, Price, TickParse, TickRecord};

/// Default fraction of forward-filled windows above which a symbol is dropped.
pub const DEFAULT_MAX_EMPTY_FRACTION: f64 = 0.2;
