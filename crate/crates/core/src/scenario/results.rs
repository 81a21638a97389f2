use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Column order of `results.csv`.
pub const RESULTS_COLUMNS: [&str; 13] = [
    "scenario",
    "lat_deg",
    "lon_deg",
    "bw_az_deg",
    "bw_el_deg",
    "sll_db",
    "eirp_dbw",
    "active_chains",
    "active_elements",
    "cost",
    "generations",
    "wall_s",
    "status",
];

/// Achieved figures for a beam that completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMetrics {
    pub bw_az_deg: f64,
    pub bw_el_deg: f64,
    /// Minimum over the two cuts.
    pub sll_db: f64,
    pub eirp_dbw: f64,
    pub active_chains: usize,
    pub active_elements: usize,
    pub cost: f64,
    pub generations: usize,
}

impl RowMetrics {
    pub fn max_beamwidth_deg(&self) -> f64 {
        self.bw_az_deg.max(self.bw_el_deg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// `None` for beams that failed.
    pub metrics: Option<RowMetrics>,
    pub wall_s: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(Error::Config(format!("unknown report format {s:?} (csv | markdown)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultsTable {
    pub rows: Vec<ResultRow>,
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ResultsTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(RESULTS_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            let m = r.metrics.as_ref();
            let status = match &r.status {
                RowStatus::Ok => "ok".to_string(),
                RowStatus::Error(msg) => format!("error: {msg}"),
            };
            w.write_record([
                r.scenario.clone(),
                r.lat_deg.to_string(),
                r.lon_deg.to_string(),
                opt(m.map(|m| m.bw_az_deg)),
                opt(m.map(|m| m.bw_el_deg)),
                opt(m.map(|m| m.sll_db)),
                opt(m.map(|m| m.eirp_dbw)),
                opt(m.map(|m| m.active_chains)),
                opt(m.map(|m| m.active_elements)),
                opt(m.map(|m| m.cost)),
                opt(m.map(|m| m.generations)),
                opt(r.wall_s),
                status,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = rd
            .headers()
            .map_err(|e| Error::parse("line 1", e.to_string()))?
            .clone();
        if header.iter().ne(RESULTS_COLUMNS.iter().copied()) {
            return Err(Error::parse(
                "line 1",
                format!("expected header {:?}", RESULTS_COLUMNS.join(",")),
            ));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::parse(format!("line {line}"), e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            rows.push(parse_row(&rec, line)?);
        }
        Ok(Self { rows })
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => self.to_markdown(),
        }
    }

    /// Table laid out like the published results table.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "| Scenario | lat,lon | θ−3dB (°) | SLL (dB) | EIRP (dBW) | Active |\n|---|---|---|---|---|---|\n",
        );
        for r in &self.rows {
            let _ = match &r.metrics {
                Some(m) => writeln!(
                    out,
                    "| {} | {}, {} | {:.3} | {:.3} | {:.3} | {} |",
                    r.scenario,
                    r.lat_deg,
                    r.lon_deg,
                    m.max_beamwidth_deg(),
                    m.sll_db,
                    m.eirp_dbw,
                    m.active_chains
                ),
                None => writeln!(out, "| {} | {}, {} | failed | | | |", r.scenario, r.lat_deg, r.lon_deg),
            };
        }
        out
    }
}

fn parse_row(rec: &csv::StringRecord, line: u64) -> Result<ResultRow> {
    if rec.len() != RESULTS_COLUMNS.len() {
        return Err(Error::parse(
            format!("line {line}"),
            format!("expected {} fields, found {}", RESULTS_COLUMNS.len(), rec.len()),
        ));
    }
    let field = |k: usize| rec.get(k).unwrap_or("");
    let num = |k: usize| -> Result<Option<f64>> {
        let s = field(k);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<f64>()
            .map(Some)
            .map_err(|e| Error::parse(format!("line {line}, field {}", RESULTS_COLUMNS[k]), format!("{e}: {s:?}")))
    };
    let count = |k: usize| -> Result<Option<usize>> {
        let s = field(k);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<usize>()
            .map(Some)
            .map_err(|e| Error::parse(format!("line {line}, field {}", RESULTS_COLUMNS[k]), format!("{e}: {s:?}")))
    };
    let required = |k: usize| -> Result<f64> {
        num(k)?.ok_or_else(|| Error::parse(format!("line {line}, field {}", RESULTS_COLUMNS[k]), "missing value"))
    };

    let status = match field(12) {
        "ok" => RowStatus::Ok,
        s => match s.strip_prefix("error: ") {
            Some(msg) => RowStatus::Error(msg.to_string()),
            None => {
                return Err(Error::parse(
                    format!("line {line}, field status"),
                    format!("expected `ok` or `error: …`, found {s:?}"),
                ))
            }
        },
    };
    let values = (
        num(3)?,
        num(4)?,
        num(5)?,
        num(6)?,
        count(7)?,
        count(8)?,
        num(9)?,
        count(10)?,
    );
    let metrics = match values {
        (Some(bw_az_deg), Some(bw_el_deg), Some(sll_db), Some(eirp_dbw), Some(active_chains), Some(active_elements), Some(cost), Some(generations)) => {
            Some(RowMetrics {
                bw_az_deg,
                bw_el_deg,
                sll_db,
                eirp_dbw,
                active_chains,
                active_elements,
                cost,
                generations,
            })
        }
        (None, None, None, None, None, None, None, None) => None,
        _ => {
            return Err(Error::parse(
                format!("line {line}"),
                "metric columns must be all present or all empty",
            ))
        }
    };
    if metrics.is_none() && status == RowStatus::Ok {
        return Err(Error::parse(format!("line {line}"), "row marked ok has no metrics"));
    }
    Ok(ResultRow {
        scenario: field(0).to_string(),
        lat_deg: required(1)?,
        lon_deg: required(2)?,
        metrics,
        wall_s: num(11)?,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultsTable {
        ResultsTable {
            rows: vec![
                ResultRow {
                    scenario: "1".into(),
                    lat_deg: 39.3,
                    lon_deg: -5.3,
                    metrics: Some(RowMetrics {
                        bw_az_deg: 0.8971234567891234,
                        bw_el_deg: 0.9,
                        sll_db: 17.319,
                        eirp_dbw: 62.204,
                        active_chains: 484,
                        active_elements: 7744,
                        cost: 0.0123,
                        generations: 150,
                    }),
                    wall_s: Some(12.5),
                    status: RowStatus::Ok,
                },
                ResultRow {
                    scenario: "two".into(),
                    lat_deg: 49.0,
                    lon_deg: 17.4,
                    metrics: None,
                    wall_s: None,
                    status: RowStatus::Error("metric error: no −3 dB crossing, \"quoted\"".into()),
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let text = t.to_csv();
        assert!(text.starts_with(&RESULTS_COLUMNS.join(",")));
        assert_eq!(ResultsTable::from_csv(&text).unwrap(), t);
    }

    #[test]
    fn markdown_layout() {
        let md = sample().to_markdown();
        let lines: Vec<&str> = md.lines().collect();
        assert!(lines[0].contains("Scenario | lat,lon | θ−3dB"));
        assert!(lines[0].contains("| SLL (dB) | EIRP (dBW) | Active |"));
        assert_eq!(lines[2], "| 1 | 39.3, -5.3 | 0.900 | 17.319 | 62.204 | 484 |");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultsTable::default();
        assert_eq!(t.to_markdown().lines().count(), 2);
        assert_eq!(t.to_csv().lines().count(), 1);
        assert_eq!(ResultsTable::from_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn malformed_rows_rejected() {
        let head = RESULTS_COLUMNS.join(",");
        for body in [
            "1,39.3,-5.3,0.9,0.9,15,60,10,160,0.1,3,,maybe",
            "1,39.3,-5.3,0.9,,15,60,10,160,0.1,3,,ok",
            "1,39.3,-5.3,0.9,0.9,15,60,x,160,0.1,3,,ok",
            "1,39.3,-5.3",
        ] {
            let text = format!("{head}\n{body}\n");
            assert!(matches!(ResultsTable::from_csv(&text), Err(Error::Parse { .. })), "{body}");
        }
        assert!(ResultsTable::from_csv("a,b\n").is_err());
    }
}
