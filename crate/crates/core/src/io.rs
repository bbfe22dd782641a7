//! File formats shared by the pipeline stages.
//!
//! CSV outputs start with a `# ` provenance comment; readers skip `#` lines.
//! Floats are written in shortest round-trip form unless noted.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use chrono::{NaiveDate, NaiveDateTime};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infostats::PairMatrix;
use crate::ingest::ReturnsPanel;
use crate::netgraph::{CentralityReport, DegreeDistribution, SpanningTree};
use crate::rmt::{ComponentTable, HistogramBin, SpectrumFractions, SpectrumReport, SurrogateEnsemble};

/// Identifies the run that produced a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn comment(&self) -> String {
        format!("# config_hash={} seed={} version={}\n", self.config_hash, self.seed, self.version)
    }
}

fn csv_reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(source)
}

fn parse_f64(s: &str, line: u64) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number `{s}`"),
    })
}

/// `symbol,sector` pairs.
pub fn read_sectors<R: Read>(source: R) -> Result<BTreeMap<String, String>> {
    let mut rdr = csv_reader(source);
    let h = rdr.headers()?.clone();
    if h.len() < 2 || &h[0] != "symbol" || &h[1] != "sector" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `symbol,sector`".into(),
        });
    }
    let mut out = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        out.insert(rec[0].to_string(), rec[1].to_string());
    }
    Ok(out)
}

/// Sidecar for a panel CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelMeta {
    pub meta: Provenance,
    pub period: String,
    pub symbols: Vec<String>,
    pub sectors: BTreeMap<String, String>,
    pub days: Vec<NaiveDate>,
    pub windows_per_day: usize,
    pub fill_counts: Vec<Vec<u32>>,
}

const TS_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// Panel rows as `timestamp,day,<symbols…>`, where `day` indexes the sidecar's day list.
pub fn write_panel<W: Write, M: Write>(panel: &ReturnsPanel, prov: &Provenance, csv_out: W, meta_out: M) -> Result<()> {
    let mut w = std::io::BufWriter::new(csv_out);
    w.write_all(prov.comment().as_bytes())?;
    let mut line = String::from("timestamp,day");
    for s in &panel.symbols {
        line.push(',');
        line.push_str(s);
    }
    line.push('\n');
    w.write_all(line.as_bytes())?;
    for r in 0..panel.rows() {
        line.clear();
        let _ = write!(line, "{},{}", panel.timestamps[r].format(TS_FORMAT), panel.day_index[r]);
        for j in 0..panel.cols() {
            let _ = write!(line, ",{}", panel.returns[(r, j)]);
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    let meta = PanelMeta {
        meta: prov.clone(),
        period: panel.period.clone(),
        symbols: panel.symbols.clone(),
        sectors: panel.sectors.clone(),
        days: panel.days.clone(),
        windows_per_day: panel.windows_per_day,
        fill_counts: panel.fill_counts.clone(),
    };
    write_json(&meta, meta_out)
}

pub fn read_panel<R: Read, M: Read>(csv_in: R, meta_in: M) -> Result<ReturnsPanel> {
    let meta: PanelMeta = serde_json::from_reader(meta_in)?;
    let mut rdr = csv_reader(csv_in);
    let h = rdr.headers()?.clone();
    let k = meta.symbols.len();
    if h.len() != k + 2 || h.iter().skip(2).ne(meta.symbols.iter().map(String::as_str)) {
        return Err(Error::Parse {
            line: 1,
            message: "panel header does not match its sidecar".into(),
        });
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut timestamps = Vec::new();
    let mut day_index = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let ts = NaiveDateTime::parse_from_str(&rec[0], TS_FORMAT).map_err(|_| Error::Parse {
            line,
            message: format!("invalid timestamp `{}`", &rec[0]),
        })?;
        timestamps.push(ts);
        day_index.push(rec[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid day index `{}`", &rec[1]),
        })?);
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse_f64(&rec[j + 2], line)?);
        }
    }
    let m = timestamps.len();
    let panel = ReturnsPanel {
        period: meta.period,
        symbols: meta.symbols,
        sectors: meta.sectors,
        returns: DMatrix::from_vec(m, k, columns.concat()),
        timestamps,
        days: meta.days,
        day_index,
        windows_per_day: meta.windows_per_day,
        fill_counts: meta.fill_counts,
    };
    panel.validate()?;
    Ok(panel)
}

/// Square matrix with a `symbol` header column.
pub fn write_matrix<W: Write>(symbols: &[String], matrix: &DMatrix<f64>, prov: &Provenance, out: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    let mut line = prov.comment();
    line.push_str("symbol");
    for s in symbols {
        line.push(',');
        line.push_str(s);
    }
    line.push('\n');
    w.write_all(line.as_bytes())?;
    for (i, s) in symbols.iter().enumerate() {
        line.clear();
        line.push_str(s);
        for j in 0..symbols.len() {
            let _ = write!(line, ",{}", matrix[(i, j)]);
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(source: R) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut rdr = csv_reader(source);
    let h = rdr.headers()?.clone();
    let symbols: Vec<String> = h.iter().skip(1).map(String::from).collect();
    let k = symbols.len();
    let mut m = DMatrix::zeros(k, k);
    let mut i = 0;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if i >= k || rec.len() != k + 1 || rec[0] != symbols[i] {
            return Err(Error::Parse {
                line,
                message: "matrix rows do not match the header".into(),
            });
        }
        for j in 0..k {
            m[(i, j)] = parse_f64(&rec[j + 1], line)?;
        }
        i += 1;
    }
    if i != k {
        return Err(Error::invalid(format!("matrix has {i} rows for {k} columns")));
    }
    Ok((symbols, m))
}

/// Every `i < j` pair: `symbol_i,symbol_j,rho,nmi,mi,p_value,d_corr,d_mi`.
pub fn write_scatter<W: Write>(pairs: &PairMatrix, prov: &Provenance, out: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    w.write_all(prov.comment().as_bytes())?;
    w.write_all(b"symbol_i,symbol_j,rho,nmi,mi,p_value,d_corr,d_mi\n")?;
    let mut line = String::new();
    for p in pairs.pairs() {
        line.clear();
        let _ = writeln!(
            line,
            "{},{},{},{},{},{},{},{}",
            pairs.symbols[p.i], pairs.symbols[p.j], p.rho, p.nmi, p.mi, p.p_value, p.d_corr, p.d_mi
        );
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// `degree,count,empirical_pmf,fitted_pmf`, with the exponent in the comment header.
pub fn write_degree_csv<W: Write>(dist: &DegreeDistribution, prov: &Provenance, out: W) -> Result<()> {
    let mut s = prov.comment();
    let unc = dist.fit.alpha_uncorrected.map_or_else(|| "NA".to_string(), |a| a.to_string());
    let _ = writeln!(s, "# alpha={} alpha_uncorrected={unc} x_min={} n={}", dist.fit.alpha, dist.fit.x_min, dist.fit.n);
    s.push_str("degree,count,empirical_pmf,fitted_pmf\n");
    for (&d, &c) in &dist.histogram {
        let _ = writeln!(s, "{d},{c},{},{}", dist.empirical_pmf(d), dist.fit.pmf(d));
    }
    write_all(out, &s)
}

/// Reads the `alpha=` value from a degree CSV header.
pub fn read_degree_alpha<R: Read>(mut source: R) -> Result<f64> {
    let mut s = String::new();
    source.read_to_string(&mut s)?;
    s.lines()
        .filter(|l| l.starts_with('#'))
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| tok.strip_prefix("alpha="))
        .ok_or_else(|| Error::invalid("degree CSV has no alpha header"))
        .and_then(|v| parse_f64(v, 0))
}

/// `symbol,sector,degree,perron_pct,fiedler,community`, highest Perron score
/// first; percentages to 2 decimals.
pub fn write_centrality_csv<W: Write>(tree: &SpanningTree, c: &CentralityReport, prov: &Provenance, out: W) -> Result<()> {
    let degrees = tree.degrees();
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by(|&a, &b| c.perron[b].total_cmp(&c.perron[a]).then(a.cmp(&b)));
    let mut s = prov.comment();
    s.push_str("symbol,sector,degree,perron_pct,fiedler,community\n");
    for v in order {
        let node = &tree.nodes()[v];
        let _ = writeln!(
            s,
            "{},{},{},{:.2},{},{}",
            node.symbol,
            node.sector,
            degrees[v],
            c.perron_pct(v),
            c.fiedler.vector[v],
            c.fiedler.community[v]
        );
    }
    write_all(out, &s)
}

/// Serialised form of a spectrum and its surrogate check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumDocument<'a> {
    pub meta: &'a Provenance,
    pub period: &'a str,
    pub q_ratio: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub empirical_lambda_max: f64,
    pub fractions: SpectrumFractions,
    /// Fractions rendered as percentages to 2 decimals.
    pub percentages: BTreeMap<&'static str, String>,
    pub eigenvalues: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<SurrogateSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateSummary {
    pub trials: usize,
    pub pooled_frac_within: f64,
    pub per_trial_frac_within: Vec<f64>,
}

impl<'a> SpectrumDocument<'a> {
    pub fn new(report: &'a SpectrumReport, surrogate: Option<&SurrogateEnsemble>, meta: &'a Provenance) -> Self {
        let f = report.fractions;
        let percentages = [("within", f.within), ("above", f.above), ("below", f.below)]
            .into_iter()
            .map(|(k, v)| (k, format!("{:.2}", 100.0 * v)))
            .collect();
        SpectrumDocument {
            meta,
            period: &report.period,
            q_ratio: report.mp.q_ratio,
            lambda_min: report.mp.lambda_min,
            lambda_max: report.mp.lambda_max,
            empirical_lambda_max: report.empirical_lambda_max(),
            fractions: f,
            percentages,
            eigenvalues: &report.eigenvalues,
            surrogate: surrogate.map(|s| SurrogateSummary {
                trials: s.trials,
                pooled_frac_within: s.pooled_frac_within,
                per_trial_frac_within: s.per_trial_frac_within.clone(),
            }),
        }
    }
}

/// `bin_left,bin_right,empirical_density,mp_density`.
pub fn write_histogram_csv<W: Write>(bins: &[HistogramBin], prov: &Provenance, out: W) -> Result<()> {
    let mut s = prov.comment();
    s.push_str("bin_left,bin_right,empirical_density,mp_density\n");
    for b in bins {
        let _ = writeln!(s, "{},{},{},{}", b.bin_left, b.bin_right, b.empirical_density, b.mp_density);
    }
    write_all(out, &s)
}

/// `symbol,sector,ev1,ev2,…`.
pub fn write_components_csv<W: Write>(table: &ComponentTable, prov: &Provenance, out: W) -> Result<()> {
    let mut s = prov.comment();
    s.push_str("symbol,sector");
    for c in 1..=table.n_top {
        let _ = write!(s, ",ev{c}");
    }
    s.push('\n');
    for row in &table.rows {
        let _ = write!(s, "{},{}", row.symbol, row.sector);
        for v in &row.components {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    write_all(out, &s)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, out: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_all<W: Write>(mut out: W, s: &str) -> Result<()> {
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}
