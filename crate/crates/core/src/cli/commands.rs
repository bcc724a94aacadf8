//! The figure, peak and sweep commands, independent of argument parsing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{detect_events, DetectorConfig, EventKind, EventReport, Sample};
use crate::cli::config::{Column, RunConfig};
use crate::cli::format::{format_g12, render_csv};
use crate::error::{Error, Result};
use crate::model::InitialKind;
use crate::simulation::Simulation;

/// Columns written for the mutual-entropy figure.
pub const FIGURE2_COLUMNS: [Column; 7] = [
    Column::T,
    Column::Inv,
    Column::I,
    Column::SP,
    Column::SC,
    Column::InvGround,
    Column::InvExcited,
];

/// Columns written for the entropy figure.
pub const FIGURE1_COLUMNS: [Column; 3] = [Column::T, Column::SPaper, Column::SVn];

/// Runs `cfg` and renders its CSV.
pub fn run_simulation(cfg: &RunConfig) -> Result<String> {
    cfg.validate()?;
    let sim = Simulation::new(cfg.system_params()?)?;
    let records = sim.records(cfg.initial, &cfg.grid(), cfg.needs_branches())?;
    Ok(render_csv(&records, &cfg.emit))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, contents)?;
    Ok(())
}

/// The three entropy runs: ground product at `taus[0]`, cat at `taus[0]`,
/// cat at `taus[1]`. Other parameters come from `base`.
pub fn figure1_configs(base: &RunConfig, taus: [f64; 2]) -> [(&'static str, RunConfig); 3] {
    let derive = |initial, tau| RunConfig {
        initial,
        tau,
        emit: FIGURE1_COLUMNS.to_vec(),
        output_path: None,
        ..base.clone()
    };
    [
        ("fig1a.csv", derive(InitialKind::Ground, taus[0])),
        ("fig1b.csv", derive(InitialKind::Cat, taus[0])),
        ("fig1c.csv", derive(InitialKind::Cat, taus[1])),
    ]
}

pub fn cmd_figure1(base: &RunConfig, dir: &Path, taus: [f64; 2]) -> Result<Vec<PathBuf>> {
    figure1_configs(base, taus)
        .into_iter()
        .map(|(name, cfg)| {
            let path = dir.join(name);
            write_file(&path, &run_simulation(&cfg)?)?;
            Ok(path)
        })
        .collect()
}

pub fn figure2_config(base: &RunConfig) -> RunConfig {
    RunConfig {
        initial: InitialKind::Cat,
        emit: FIGURE2_COLUMNS.to_vec(),
        ..base.clone()
    }
}

pub fn cmd_figure2(base: &RunConfig, path: &Path) -> Result<()> {
    write_file(path, &run_simulation(&figure2_config(base))?)
}

/// Where `peaks` takes its series from.
#[derive(Debug, Clone)]
pub enum PeakSource {
    /// A CSV with `t` and `SP` columns, plus the named inversion column
    /// (`Inv_g` if present, else `Inv`, when unspecified).
    Csv { path: PathBuf, inv_column: Option<String> },
    /// Simulate the mutual-entropy run for this configuration.
    Config(RunConfig),
}

fn parse_cell(cell: &str, row: usize) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse()
        .map(Some)
        .map_err(|_| Error::Malformed(format!("row {row}: `{cell}` is not a number")))
}

/// Reads `(t, SP)` and `(t, inversion)` series from CSV text. Rows with an
/// empty cell are skipped for that series.
pub fn read_event_series(text: &str, inv_column: Option<&str>) -> Result<(Vec<Sample>, Vec<Sample>)> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let t_col = find("t")?;
    let sp_col = find("SP")?;
    let inv_col = match inv_column {
        Some(name) => find(name)?,
        None => find("Inv_g").or_else(|_| find("Inv"))?,
    };
    let (mut sp, mut inv) = (Vec::new(), Vec::new());
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let cell = |c: usize| parse_cell(row.get(c).unwrap_or(""), i + 2);
        let Some(t) = cell(t_col)? else { continue };
        if let Some(v) = cell(sp_col)? {
            sp.push((t, v));
        }
        if let Some(v) = cell(inv_col)? {
            inv.push((t, v));
        }
    }
    Ok((sp, inv))
}

pub fn cmd_peaks(source: &PeakSource, detector: &DetectorConfig) -> Result<EventReport> {
    match source {
        PeakSource::Csv { path, inv_column } => {
            let text = std::fs::read_to_string(path)?;
            let (sp, inv) = read_event_series(&text, inv_column.as_deref())?;
            if sp.is_empty() {
                return Ok(EventReport::default());
            }
            detect_events(&sp, &inv, detector)
        }
        PeakSource::Config(cfg) => {
            cfg.validate()?;
            Simulation::new(cfg.system_params()?)?.detect(&cfg.grid(), detector)
        }
    }
}

pub fn report_text(report: &EventReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} events ({} collapses, {} revivals)",
        report.events.len(),
        report.count(EventKind::Collapse),
        report.count(EventKind::Revival)
    )
    .unwrap();
    for e in &report.events {
        writeln!(out, "{:<9} t = {:>8}  S(P) = {}", e.kind, format_g12(e.t), format_g12(e.sp_value)).unwrap();
    }
    writeln!(out, "{} intervals with S(P) at zero", report.onsets.len()).unwrap();
    out
}

pub fn report_csv(report: &EventReport) -> String {
    let mut out = String::from("t,SP,kind\n");
    for e in &report.events {
        writeln!(out, "{},{},{}", format_g12(e.t), format_g12(e.sp_value), e.kind).unwrap();
    }
    out
}

/// Result of one sweep point.
#[derive(Debug)]
pub struct SweepOutcome {
    pub tau: f64,
    pub csv_path: Option<PathBuf>,
    pub result: Result<EventReport>,
}

pub fn sweep_file_name(tau: f64) -> String {
    format!("tau_{}.csv", format_g12(tau))
}

fn sweep_point(base: &RunConfig, tau: f64, dir: &Path, detector: &DetectorConfig) -> SweepOutcome {
    let cfg = RunConfig {
        tau,
        ..base.clone()
    };
    let path = dir.join(sweep_file_name(tau));
    let run = || -> Result<EventReport> {
        write_file(&path, &run_simulation(&cfg)?)?;
        Simulation::new(cfg.system_params()?)?.detect(&cfg.grid(), detector)
    };
    let result = run();
    SweepOutcome {
        tau,
        csv_path: path.exists().then_some(path),
        result,
    }
}

/// Independent runs per deformation, executed concurrently. A failing
/// point is reported in its outcome and does not stop the others.
pub fn cmd_sweep(base: &RunConfig, taus: &[f64], dir: &Path, detector: &DetectorConfig) -> Result<Vec<SweepOutcome>> {
    std::fs::create_dir_all(dir)?;
    let outcomes: Vec<SweepOutcome> = taus
        .par_iter()
        .map(|&tau| sweep_point(base, tau, dir, detector))
        .collect();
    write_file(&dir.join("summary.csv"), &sweep_summary(&outcomes))?;
    Ok(outcomes)
}

pub fn sweep_summary(outcomes: &[SweepOutcome]) -> String {
    let mut out = String::from("tau,status,collapses,revivals,events\n");
    for o in outcomes {
        match &o.result {
            Ok(report) => {
                let events: Vec<String> = report
                    .events
                    .iter()
                    .map(|e| format!("{}:{}", format_g12(e.t), e.kind))
                    .collect();
                writeln!(
                    out,
                    "{},ok,{},{},{}",
                    format_g12(o.tau),
                    report.count(EventKind::Collapse),
                    report.count(EventKind::Revival),
                    events.join(";")
                )
                .unwrap();
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], " ");
                writeln!(out, "{},error: {msg},,,", format_g12(o.tau)).unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_series_and_skips_empty_cells() {
        let text = "t,Inv,SP,Inv_g\n0,0,0.5,1\n0.1,0.1,,0.9\n0.2,0.2,0.4,\n";
        let (sp, inv) = read_event_series(text, None).unwrap();
        assert_eq!(sp, vec![(0.0, 0.5), (0.2, 0.4)]);
        assert_eq!(inv, vec![(0.0, 1.0), (0.1, 0.9)]);
        let (_, inv) = read_event_series(text, Some("Inv")).unwrap();
        assert_eq!(inv.len(), 3);
    }

    #[test]
    fn missing_columns_are_usage_errors() {
        assert!(matches!(
            read_event_series("t,Inv\n0,1\n", None),
            Err(Error::MissingColumn(c)) if c == "SP"
        ));
        assert!(matches!(
            read_event_series("t,SP\n0,1\n", None),
            Err(Error::MissingColumn(c)) if c == "Inv"
        ));
        assert!(matches!(
            read_event_series("t,SP,Inv\n0,x,1\n", None),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn summary_lists_errors_inline() {
        let outcomes = vec![
            SweepOutcome {
                tau: 0.0,
                csv_path: None,
                result: Ok(EventReport::default()),
            },
            SweepOutcome {
                tau: f64::NAN,
                csv_path: None,
                result: Err(Error::invalid("tau", "must be finite, got NaN")),
            },
        ];
        let s = sweep_summary(&outcomes);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[1], "0,ok,0,0,");
        assert!(lines[2].starts_with("nan,error: invalid value for `tau`"));
    }
}
