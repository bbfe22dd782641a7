//! Synthetic markets with planted structure.
//!
//! Standardised returns follow a factor model
//! `z = β·g + √(1−β²)·(√c_s·f_s + √(1−c_s)·ε)`, so two members of sector `s`
//! correlate at `β² + (1−β²)·c_s` and members of different sectors at `β²`.
//! Returns are `volatility · z`. Nonlinear pairs then overwrite their target
//! column with a standardised function of the source column.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use nalgebra::{Cholesky, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PeriodRange, Price, ReturnsPanel, SessionConfig};
use crate::seed::SeedStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub name: String,
    pub size: usize,
    pub intra_correlation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// `y = (x² − 1)/√2`.
    Square,
    /// `y ∝ sin(4x) + σ·ε`.
    Sine,
}

/// Column `target` is replaced by a function of column `source`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearPair {
    pub source: usize,
    pub target: usize,
    pub form: Coupling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub name: String,
    pub days: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSpec {
    pub sectors: Vec<SectorSpec>,
    #[serde(default)]
    pub market_beta: f64,
    #[serde(default)]
    pub nonlinear_pairs: Vec<NonlinearPair>,
    /// Total trading days; ignored when `periods` is non-empty.
    #[serde(default)]
    pub days: usize,
    /// Consecutive blocks of the calendar.
    #[serde(default)]
    pub periods: Vec<PeriodSpec>,
    #[serde(default)]
    pub session: SessionConfig,
    #[serde(default = "default_start")]
    pub start_date: NaiveDate,
    #[serde(default = "default_volatility")]
    pub volatility: f64,
    /// Noise level of the sine coupling, in units of the source's deviation.
    #[serde(default = "default_sine_noise")]
    pub sine_noise: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 1, 1).unwrap()
}

fn default_volatility() -> f64 {
    1e-3
}

fn default_sine_noise() -> f64 {
    0.1
}

impl MarketSpec {
    /// Equal-sized sectors `SEC0..`, each with the same intra-sector correlation.
    /// The first `k mod sectors` sectors get one extra member.
    pub fn blocks(k: usize, sectors: usize, intra_correlation: f64, market_beta: f64) -> Self {
        let sectors = (0..sectors)
            .map(|s| SectorSpec {
                name: format!("SEC{s}"),
                size: k / sectors + usize::from(s < k % sectors),
                intra_correlation,
            })
            .collect();
        MarketSpec {
            sectors,
            market_beta,
            nonlinear_pairs: Vec::new(),
            days: 1,
            periods: Vec::new(),
            session: SessionConfig::default(),
            start_date: default_start(),
            volatility: default_volatility(),
            sine_noise: default_sine_noise(),
            seed: 0,
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.sectors.iter().map(|s| s.size).sum()
    }

    pub fn total_days(&self) -> usize {
        if self.periods.is_empty() {
            self.days
        } else {
            self.periods.iter().map(|p| p.days).sum()
        }
    }

    pub fn windows_per_day(&self) -> usize {
        self.session.windows_per_day()
    }

    /// `S000`, `S001`, … in generation order (which is also lexical order).
    pub fn symbols(&self) -> Vec<String> {
        (0..self.symbol_count()).map(|i| format!("S{i:03}")).collect()
    }

    /// Sector index of every symbol.
    pub fn membership(&self) -> Vec<usize> {
        self.sectors.iter().enumerate().flat_map(|(s, sec)| std::iter::repeat_n(s, sec.size)).collect()
    }

    pub fn sector_map(&self) -> BTreeMap<String, String> {
        let m = self.membership();
        self.symbols().into_iter().zip(m).map(|(sym, s)| (sym, self.sectors[s].name.clone())).collect()
    }

    /// Weekdays from `start_date`, with the session's trading days and periods filled in.
    pub fn calendar(&self) -> (Vec<NaiveDate>, SessionConfig) {
        let mut days = Vec::with_capacity(self.total_days());
        let mut d = self.start_date;
        while days.len() < self.total_days() {
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                days.push(d);
            }
            d += Duration::days(1);
        }
        let mut session = self.session.clone();
        session.trading_days = days.clone();
        let mut offset = 0;
        session.periods = self
            .periods
            .iter()
            .filter(|p| p.days > 0)
            .map(|p| {
                let r = PeriodRange {
                    name: p.name.clone(),
                    start: days[offset],
                    end: days[offset + p.days - 1],
                };
                offset += p.days;
                r
            })
            .collect();
        (days, session)
    }

    pub fn validate(&self) -> Result<()> {
        self.session.validate()?;
        if self.sectors.is_empty() || self.sectors.iter().any(|s| s.size == 0) {
            return Err(Error::invalid("every sector needs at least one member"));
        }
        if self.symbol_count() < 2 {
            return Err(Error::invalid("a market needs at least two symbols"));
        }
        if self.total_days() == 0 {
            return Err(Error::invalid("a market needs at least one day"));
        }
        if !(0.0..1.0).contains(&self.market_beta) {
            return Err(Error::invalid(format!("market_beta {} outside [0, 1)", self.market_beta)));
        }
        for s in &self.sectors {
            if !(0.0..1.0).contains(&s.intra_correlation) {
                return Err(Error::invalid(format!("sector `{}` intra_correlation outside [0, 1)", s.name)));
            }
        }
        if !(self.volatility > 0.0 && self.volatility.is_finite()) {
            return Err(Error::invalid("volatility must be positive"));
        }
        if self.sine_noise.is_nan() || self.sine_noise < 0.0 {
            return Err(Error::invalid("sine_noise must be non-negative"));
        }
        let k = self.symbol_count();
        let mut targets = vec![false; k];
        for p in &self.nonlinear_pairs {
            if p.source >= k || p.target >= k || p.source == p.target {
                return Err(Error::invalid(format!("nonlinear pair ({}, {}) is invalid", p.source, p.target)));
            }
            if std::mem::replace(&mut targets[p.target], true) {
                return Err(Error::invalid(format!("symbol {} is the target of two couplings", p.target)));
            }
        }
        if self.nonlinear_pairs.iter().any(|p| targets[p.source]) {
            return Err(Error::invalid("a coupling source may not itself be a coupling target"));
        }
        if Cholesky::new(self.factor_correlation()).is_none() {
            return Err(Error::invalid("implied correlation matrix is not positive definite"));
        }
        Ok(())
    }

    /// Correlation matrix of the linear factor model.
    pub fn factor_correlation(&self) -> DMatrix<f64> {
        let m = self.membership();
        let b2 = self.market_beta * self.market_beta;
        DMatrix::from_fn(m.len(), m.len(), |i, j| {
            if i == j {
                1.0
            } else if m[i] == m[j] {
                b2 + (1.0 - b2) * self.sectors[m[i]].intra_correlation
            } else {
                b2
            }
        })
    }

    /// Population correlation after nonlinear overwrites. Coupled targets are
    /// uncorrelated with everything (odd Gaussian moments vanish).
    pub fn implied_correlation(&self) -> DMatrix<f64> {
        let mut c = self.factor_correlation();
        for p in &self.nonlinear_pairs {
            let t = p.target;
            for j in 0..c.nrows() {
                if j != t {
                    c[(t, j)] = 0.0;
                    c[(j, t)] = 0.0;
                }
            }
        }
        c
    }
}

fn seed_of(spec: &MarketSpec) -> SeedStream {
    SeedStream::new(spec.seed).named("synth")
}

/// Returns panel (period `"all"`) for the full calendar.
pub fn generate_returns(spec: &MarketSpec) -> Result<ReturnsPanel> {
    spec.validate()?;
    let (days, session) = spec.calendar();
    let k = spec.symbol_count();
    let w = spec.windows_per_day();
    let rows_per_day = w - 1;
    let m = days.len() * rows_per_day;
    let member = spec.membership();
    let beta = spec.market_beta;
    let idio = (1.0 - beta * beta).sqrt();
    let loadings: Vec<(f64, f64)> = spec
        .sectors
        .iter()
        .map(|s| (s.intra_correlation.sqrt(), (1.0 - s.intra_correlation).sqrt()))
        .collect();

    let mut rng = seed_of(spec).named("returns").rng();
    let mut z = DMatrix::zeros(m, k);
    let mut sector_f = vec![0.0; spec.sectors.len()];
    for r in 0..m {
        let g: f64 = rng.sample(StandardNormal);
        for f in sector_f.iter_mut() {
            *f = rng.sample(StandardNormal);
        }
        for j in 0..k {
            let e: f64 = rng.sample(StandardNormal);
            let (a, b) = loadings[member[j]];
            z[(r, j)] = beta * g + idio * (a * sector_f[member[j]] + b * e);
        }
    }

    let sine_var = 0.5 * (1.0 - (-32f64).exp()) + spec.sine_noise * spec.sine_noise;
    let mut noise = seed_of(spec).named("couplings").rng();
    for p in &spec.nonlinear_pairs {
        for r in 0..m {
            let x = z[(r, p.source)];
            z[(r, p.target)] = match p.form {
                Coupling::Square => (x * x - 1.0) / std::f64::consts::SQRT_2,
                Coupling::Sine => {
                    let e: f64 = noise.sample(StandardNormal);
                    ((4.0 * x).sin() + spec.sine_noise * e) / sine_var.sqrt()
                }
            };
        }
    }

    let mut timestamps = Vec::with_capacity(m);
    let mut day_index = Vec::with_capacity(m);
    for (d, &day) in days.iter().enumerate() {
        for i in 0..rows_per_day {
            timestamps.push(session.window_start(day, i));
            day_index.push(d);
        }
    }
    let panel = ReturnsPanel {
        period: "all".into(),
        symbols: spec.symbols(),
        sectors: spec.sector_map(),
        returns: z * spec.volatility,
        timestamps,
        days: days.clone(),
        day_index,
        windows_per_day: w,
        fill_counts: vec![vec![0; k]; days.len()],
    };
    panel.validate()?;
    Ok(panel)
}

/// Log prices per symbol: the first window of day 0 sits at `ln(price_scale)`
/// and each day opens at the previous day's close.
fn price_path(panel: &ReturnsPanel, j: usize, price_scale: f64) -> Vec<f64> {
    let w = panel.windows_per_day;
    let col = panel.column(j);
    let mut out = Vec::with_capacity(panel.days.len() * w);
    let mut level = price_scale.ln();
    for day in col.chunks(w - 1) {
        out.push(level);
        for r in day {
            level += r;
            out.push(level);
        }
    }
    out
}

/// Writes one trade per window at the implied price, rounded to 8 decimals.
/// Rows are grouped by symbol.
pub fn write_ticks<W: Write>(spec: &MarketSpec, price_scale: f64, out: W) -> Result<ReturnsPanel> {
    if price_scale.is_nan() || price_scale < 100.0 {
        return Err(Error::invalid("price_scale must be at least 100"));
    }
    let panel = generate_returns(spec)?;
    let (days, session) = spec.calendar();
    let w = spec.windows_per_day();
    let mut out = std::io::BufWriter::new(out);
    out.write_all(b"timestamp,symbol,price,volume\n")?;
    let mut line = String::new();
    for (j, sym) in panel.symbols.iter().enumerate() {
        for (n, lp) in price_path(&panel, j, price_scale).into_iter().enumerate() {
            let ts = session.window_start(days[n / w], n % w);
            let price = Price::from_units((lp.exp() * Price::SCALE as f64).round() as i64);
            line.clear();
            let _ = writeln!(line, "{},{sym},{price},{}", ts.format("%Y-%m-%dT%H:%M:%S"), 100 + j % 5);
            out.write_all(line.as_bytes())?;
        }
    }
    out.flush()?;
    Ok(panel)
}

/// In-memory tick CSV.
pub fn generate_ticks(spec: &MarketSpec, price_scale: f64) -> Result<String> {
    let mut buf = Vec::new();
    write_ticks(spec, price_scale, &mut buf)?;
    Ok(String::from_utf8(buf).expect("tick CSV is ASCII"))
}

/// `symbol,sector` CSV for the market.
pub fn sector_csv(spec: &MarketSpec) -> String {
    let mut s = String::from("symbol,sector\n");
    for (sym, sec) in spec.sector_map() {
        let _ = writeln!(s, "{sym},{sec}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub market_beta: f64,
    pub volatility: f64,
    pub symbols: Vec<String>,
    /// Sector name → members.
    pub sectors: BTreeMap<String, Vec<String>>,
    pub intra_correlation: BTreeMap<String, f64>,
    pub nonlinear_pairs: Vec<TruthPair>,
    pub implied_correlation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthPair {
    pub source: String,
    pub target: String,
    pub form: Coupling,
}

pub fn truth(spec: &MarketSpec) -> Result<SynthTruth> {
    spec.validate()?;
    let symbols = spec.symbols();
    let mut sectors: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (sym, sec) in symbols.iter().zip(spec.membership()) {
        sectors.entry(spec.sectors[sec].name.clone()).or_default().push(sym.clone());
    }
    let c = spec.implied_correlation();
    Ok(SynthTruth {
        seed: spec.seed,
        market_beta: spec.market_beta,
        volatility: spec.volatility,
        sectors,
        intra_correlation: spec.sectors.iter().map(|s| (s.name.clone(), s.intra_correlation)).collect(),
        nonlinear_pairs: spec
            .nonlinear_pairs
            .iter()
            .map(|p| TruthPair {
                source: symbols[p.source].clone(),
                target: symbols[p.target].clone(),
                form: p.form,
            })
            .collect(),
        implied_correlation: c.row_iter().map(|r| r.iter().copied().collect()).collect(),
        symbols,
    })
}
