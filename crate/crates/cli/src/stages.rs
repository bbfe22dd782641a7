use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stocknet::infostats::{correlation_matrix, pair_sweep, PairConfig};
use stocknet::ingest::{ingest_ticks, ReturnsPanel};
use stocknet::io::{self, Provenance, SpectrumDocument};
use stocknet::netgraph::{analyze_distances, exporters, network_methods};
use stocknet::rmt::{eigen_histogram, spectrum_report, surrogate_ensemble, top_eigenvector_components};
use stocknet::seed::SeedStream;
use stocknet::synth::{sector_csv, truth, write_ticks};

use crate::config::PipelineConfig;

/// Resolved run settings shared by every stage.
pub struct Run {
    pub config: PipelineConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub period: Option<String>,
    pub methods: Vec<String>,
    pub strict: bool,
    pub prov: Provenance,
}

impl Run {
    pub fn new(config: PipelineConfig, out: PathBuf, seed: u64, period: Option<String>, method: Option<String>, strict: bool) -> Self {
        let methods = method.map_or_else(|| config.network.methods.clone(), |m| vec![m]);
        let strict = strict || config.ingest.strict;
        let prov = Provenance {
            config_hash: config.hash(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        Self {
            config,
            out,
            seed,
            period,
            methods,
            strict,
            prov,
        }
    }

    fn master(&self) -> SeedStream {
        SeedStream::new(self.seed)
    }

    fn path(&self, parts: &[&str]) -> Result<PathBuf> {
        let mut p = self.out.clone();
        p.extend(parts);
        if let Some(dir) = p.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        Ok(p)
    }

    fn create(&self, parts: &[&str]) -> Result<File> {
        let p = self.path(parts)?;
        File::create(&p).with_context(|| format!("creating {}", p.display()))
    }

    fn open(&self, parts: &[&str]) -> Result<File> {
        let mut p = self.out.clone();
        p.extend(parts);
        File::open(&p).with_context(|| format!("opening {} (has the previous stage run?)", p.display()))
    }

    fn periods(&self) -> Result<Vec<String>> {
        let index: PanelIndex = serde_json::from_reader(self.open(&["panels", "index.json"])?)?;
        let periods: Vec<String> = index
            .periods
            .into_iter()
            .filter(|p| self.period.as_ref().is_none_or(|want| want == p))
            .collect();
        if periods.is_empty() {
            bail!("no panel matches period {:?}", self.period.as_deref().unwrap_or("*"));
        }
        Ok(periods)
    }

    fn read_panel(&self, period: &str) -> Result<ReturnsPanel> {
        let csv = self.open(&["panels", &format!("{period}.csv")])?;
        let meta = self.open(&["panels", &format!("{period}.json")])?;
        Ok(io::read_panel(csv, meta)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PanelIndex {
    meta: Provenance,
    periods: Vec<String>,
}

pub fn synth(run: &Run) -> Result<()> {
    let (market, price_scale) = run.config.market(run.seed);
    info!("synth: {} symbols over {} days", market.symbol_count(), market.total_days());
    write_ticks(&market, price_scale, run.create(&["synth", "ticks.csv"])?)?;
    fs::write(run.path(&["synth", "sectors.csv"])?, sector_csv(&market))?;
    #[derive(Serialize)]
    struct Truth<'a> {
        meta: &'a Provenance,
        #[serde(flatten)]
        truth: stocknet::synth::SynthTruth,
    }
    io::write_json(
        &Truth {
            meta: &run.prov,
            truth: truth(&market)?,
        },
        run.create(&["synth", "truth.json"])?,
    )?;
    Ok(())
}

pub fn ingest(run: &Run) -> Result<()> {
    let (ticks, sectors) = if run.config.uses_synth() {
        (run.out.join("synth").join("ticks.csv"), Some(run.out.join("synth").join("sectors.csv")))
    } else {
        (run.config.input.ticks.clone().unwrap(), run.config.input.sectors.clone())
    };
    let sectors = match sectors {
        Some(p) => io::read_sectors(File::open(&p).with_context(|| format!("opening {}", p.display()))?)?,
        None => BTreeMap::new(),
    };
    let session = run.config.effective_session(run.seed);
    let source = File::open(&ticks).with_context(|| format!("opening {}", ticks.display()))?;
    let out = ingest_ticks(source, &sectors, &session, run.strict, run.config.ingest.max_empty_fraction)
        .with_context(|| format!("ingesting {}", ticks.display()))?;
    if !out.issues.is_empty() {
        log::warn!("ingest: skipped {} malformed rows", out.issues.len());
    }
    let mut periods = Vec::new();
    for p in &out.panels {
        if run.period.as_ref().is_some_and(|want| want != &p.period) {
            continue;
        }
        info!("ingest: period {} has {} rows x {} symbols", p.period, p.rows(), p.cols());
        io::write_panel(
            p,
            &run.prov,
            run.create(&["panels", &format!("{}.csv", p.period)])?,
            run.create(&["panels", &format!("{}.json", p.period)])?,
        )?;
        periods.push(p.period.clone());
    }
    if periods.is_empty() {
        bail!("no period named {:?}", run.period.as_deref().unwrap_or_default());
    }
    io::write_json(
        &PanelIndex {
            meta: run.prov.clone(),
            periods,
        },
        run.create(&["panels", "index.json"])?,
    )?;
    #[derive(Serialize)]
    struct Report<'a> {
        meta: &'a Provenance,
        panels: Vec<(String, usize, usize)>,
        drop_report: &'a stocknet::ingest::DropReport,
        skipped_rows: usize,
        first_issues: &'a [stocknet::ingest::ParseIssue],
        out_of_session: usize,
        empty_days: &'a BTreeMap<String, Vec<chrono::NaiveDate>>,
    }
    io::write_json(
        &Report {
            meta: &run.prov,
            panels: out.panels.iter().map(|p| (p.period.clone(), p.rows(), p.cols())).collect(),
            drop_report: &out.drop_report,
            skipped_rows: out.issues.len(),
            first_issues: &out.issues[..out.issues.len().min(100)],
            out_of_session: out.out_of_session,
            empty_days: &out.empty_days,
        },
        run.create(&["panels", "ingest_report.json"])?,
    )?;
    Ok(())
}

pub fn pairs(run: &Run) -> Result<()> {
    let params = &run.config.pairs;
    for period in run.periods()? {
        let panel = run.read_panel(&period)?;
        info!("pairs: period {period}, {} pairs", panel.cols() * (panel.cols() - 1) / 2);
        let cfg = PairConfig {
            estimator: params.estimator.clone(),
            trials: params.trials,
            alpha: params.alpha,
            seed: run.master().named("pairs").named(&period),
        };
        let pm = pair_sweep(&panel, &cfg)?;
        for (name, m) in pm.fields() {
            io::write_matrix(&pm.symbols, m, &run.prov, run.create(&["pairs", &period, &format!("{name}.csv")])?)?;
        }
        io::write_scatter(&pm, &run.prov, run.create(&["pairs", &period, "scatter.csv"])?)?;
    }
    Ok(())
}

pub fn rmt(run: &Run) -> Result<()> {
    let params = &run.config.rmt;
    for period in run.periods()? {
        let panel = run.read_panel(&period)?;
        let corr = correlation_matrix(&panel)?;
        let report = spectrum_report(&corr, panel.rows(), &period)?;
        let surrogate = if params.surrogate_trials > 0 {
            Some(surrogate_ensemble(
                &panel,
                params.surrogate_trials,
                run.master().named("rmt").named(&period),
                params.histogram_bins,
            )?)
        } else {
            None
        };
        info!(
            "rmt: period {period}, lambda_max {:.4} vs empirical {:.4}",
            report.mp.lambda_max,
            report.empirical_lambda_max()
        );
        io::write_json(
            &SpectrumDocument::new(&report, surrogate.as_ref(), &run.prov),
            run.create(&["rmt", &period, "spectrum.json"])?,
        )?;
        let hist = eigen_histogram(&report.eigenvalues, &report.mp, params.histogram_bins);
        io::write_histogram_csv(&hist, &run.prov, run.create(&["rmt", &period, "histogram.csv"])?)?;
        if let Some(s) = &surrogate {
            io::write_histogram_csv(&s.histogram, &run.prov, run.create(&["rmt", &period, "surrogate_histogram.csv"])?)?;
        }
        let n_top = params.top_eigenvectors.min(panel.cols());
        let table = top_eigenvector_components(&report, n_top, &panel.symbols, &panel.sector_list())?;
        io::write_components_csv(&table, &run.prov, run.create(&["rmt", &period, "components.csv"])?)?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub method: String,
    pub period: String,
    pub nodes: usize,
    pub total_weight: f64,
    pub alpha: f64,
    pub alpha_uncorrected: Option<f64>,
    pub hubs: Vec<String>,
    pub intra_sector_edge_fraction: f64,
    pub mean_hub_same_sector_fraction: Option<f64>,
    pub algebraic_connectivity: f64,
}

pub fn network(run: &Run) -> Result<()> {
    let params = &run.config.network;
    let formats = params
        .formats
        .iter()
        .map(|f| exporters().get(f).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let mut summaries = Vec::new();
    for method in &run.methods {
        let m = network_methods().get(method)?;
        for period in run.periods()? {
            let meta: io::PanelMeta = serde_json::from_reader(run.open(&["panels", &format!("{period}.json")])?)?;
            let (symbols, d) = io::read_matrix(run.open(&["pairs", &period, &format!("{}.csv", m.distance_field())])?)?;
            if symbols != meta.symbols {
                return Err(anyhow!("pair matrices for {period} do not match its panel"));
            }
            let sectors: Vec<String> = symbols
                .iter()
                .map(|s| meta.sectors.get(s).cloned().unwrap_or_else(|| "UNKNOWN".into()))
                .collect();
            let a = analyze_distances(&d, &symbols, &sectors, m.name(), params.hub_threshold)
                .with_context(|| format!("{method} network for {period}"))?;
            info!("network: {method}/{period}, alpha {:.3}, {} hubs", a.degrees.fit.alpha, a.degrees.hubs.len());
            let dir = ["network", m.name(), period.as_str()];
            for f in &formats {
                let doc = f.export(&a.tree, &a.centrality);
                let comment = format!("?>\n<!-- {} -->\n", run.prov.comment().trim_start_matches("# ").trim_end());
                let doc = doc.replacen("?>\n", &comment, 1);
                fs::write(run.path(&[&dir[..], &[&format!("tree.{}", f.extension())]].concat())?, doc)?;
            }
            io::write_degree_csv(&a.degrees, &run.prov, run.create(&[&dir[..], &["degree.csv"]].concat())?)?;
            io::write_centrality_csv(&a.tree, &a.centrality, &run.prov, run.create(&[&dir[..], &["centrality.csv"]].concat())?)?;
            #[derive(Serialize)]
            struct Hubs<'a> {
                meta: &'a Provenance,
                #[serde(flatten)]
                report: &'a stocknet::netgraph::HubReport,
            }
            io::write_json(
                &Hubs {
                    meta: &run.prov,
                    report: &a.hubs,
                },
                run.create(&[&dir[..], &["hubs.json"]].concat())?,
            )?;
            summaries.push(NetworkSummary {
                method: m.name().to_string(),
                period: period.clone(),
                nodes: symbols.len(),
                total_weight: a.tree.total_weight(),
                alpha: a.degrees.fit.alpha,
                alpha_uncorrected: a.degrees.fit.alpha_uncorrected,
                hubs: a.degrees.hubs.iter().map(|&v| symbols[v].clone()).collect(),
                intra_sector_edge_fraction: a.intra_sector_edge_fraction(),
                mean_hub_same_sector_fraction: a.hubs.mean_same_sector_fraction(),
                algebraic_connectivity: a.centrality.fiedler.algebraic_connectivity,
            });
        }
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        meta: &'a Provenance,
        networks: &'a [NetworkSummary],
    }
    io::write_json(
        &Summary {
            meta: &run.prov,
            networks: &summaries,
        },
        run.create(&["network", "summary.json"])?,
    )?;
    Ok(())
}

/// Every stage in order, then a manifest hashing each output file.
pub fn report(run: &Run) -> Result<()> {
    if run.config.uses_synth() {
        synth(run)?;
    }
    ingest(run)?;
    pairs(run)?;
    rmt(run)?;
    network(run)?;
    write_manifest(run)
}

#[derive(Debug, Serialize)]
struct ManifestEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

fn write_manifest(run: &Run) -> Result<()> {
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(&run.out).sort_by_file_name() {
        let entry = entry?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(&run.out)?;
        if rel == Path::new("manifest.json") {
            continue;
        }
        let bytes = fs::read(entry.path())?;
        files.push(ManifestEntry {
            path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        meta: &'a Provenance,
        files: Vec<ManifestEntry>,
    }
    io::write_json(&Manifest { meta: &run.prov, files }, run.create(&["manifest.json"])?)?;
    Ok(())
}
