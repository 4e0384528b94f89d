//! Measurement traces: CSV ingestion and per-frequency averaging.
//!
//! The trace format is a CSV file with the exact header `block,freq_ghz,latency_ms`.
//! `block` is a 1-based block index or the literal `total`. Repeated rows for the
//! same block and frequency are averaged before fitting.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::TraceError;

pub const TRACE_HEADER: [&str; 3] = ["block", "freq_ghz", "latency_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TraceKey {
    /// 1-based block index.
    Block(usize),
    Total,
}

impl fmt::Display for TraceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceKey::Block(i) => write!(f, "{i}"),
            TraceKey::Total => f.write_str("total"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub freq_ghz: f64,
    pub latency_ms: f64,
}

/// Latency samples of one block (or the whole network) across frequencies.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub points: Vec<TracePoint>,
}

impl TraceSeries {
    pub fn new(points: Vec<TracePoint>) -> Self {
        Self { points }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self::new(
            pairs
                .into_iter()
                .map(|(freq_ghz, latency_ms)| TracePoint { freq_ghz, latency_ms })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distinct_frequencies(&self) -> usize {
        let mut freqs: Vec<f64> = self.points.iter().map(|p| p.freq_ghz).collect();
        freqs.sort_by(f64::total_cmp);
        freqs.dedup();
        freqs.len()
    }

    /// One point per distinct frequency, holding the unweighted mean latency,
    /// ordered by frequency.
    pub fn averaged(&self) -> TraceSeries {
        let mut groups: Vec<(f64, f64, usize)> = Vec::new();
        let mut sorted = self.points.clone();
        sorted.sort_by(|a, b| a.freq_ghz.total_cmp(&b.freq_ghz));
        for p in sorted {
            match groups.last_mut() {
                Some((f, sum, n)) if *f == p.freq_ghz => {
                    *sum += p.latency_ms;
                    *n += 1;
                }
                _ => groups.push((p.freq_ghz, p.latency_ms, 1)),
            }
        }
        TraceSeries::from_pairs(groups.into_iter().map(|(f, sum, n)| (f, sum / n as f64)))
    }
}

/// A parsed trace file, grouped per block and averaged per frequency.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub series: BTreeMap<TraceKey, TraceSeries>,
}

impl Trace {
    pub fn read_path(path: &Path) -> Result<Self, TraceError> {
        let file = std::fs::File::open(path)?;
        Self::read(file)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, TraceError> {
        Self::read(text.as_bytes())
    }

    pub fn read(reader: impl Read) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);
        let mut records = rdr.records();

        let header = match records.next() {
            None => return Err(TraceError::Empty),
            Some(rec) => rec.map_err(|e| csv_error(e, 1))?,
        };
        if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
            return Err(TraceError::Malformed {
                line: 1,
                message: format!("expected header `{}`", TRACE_HEADER.join(",")),
            });
        }

        let mut raw: BTreeMap<TraceKey, TraceSeries> = BTreeMap::new();
        for rec in records {
            let rec = rec.map_err(|e| csv_error(e, 0))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != 3 {
                return Err(TraceError::Malformed { line, message: format!("expected 3 fields, found {}", rec.len()) });
            }
            let key = parse_key(&rec[0]).ok_or_else(|| TraceError::Malformed {
                line,
                message: format!("invalid block `{}` (expected a 1-based index or `total`)", &rec[0]),
            })?;
            let freq_ghz = parse_number(&rec[1], line, "freq_ghz")?;
            if freq_ghz <= 0.0 {
                return Err(TraceError::Malformed { line, message: format!("freq_ghz must be positive, got {freq_ghz}") });
            }
            let latency_ms = parse_number(&rec[2], line, "latency_ms")?;
            if latency_ms < 0.0 {
                return Err(TraceError::Malformed {
                    line,
                    message: format!("latency_ms must be non-negative, got {latency_ms}"),
                });
            }
            raw.entry(key).or_default().points.push(TracePoint { freq_ghz, latency_ms });
        }

        if raw.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(Trace { series: raw.into_iter().map(|(k, s)| (k, s.averaged())).collect() })
    }
}

fn csv_error(e: csv::Error, fallback_line: u64) -> TraceError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    TraceError::Malformed { line, message: e.to_string() }
}

fn parse_key(s: &str) -> Option<TraceKey> {
    if s.eq_ignore_ascii_case("total") {
        return Some(TraceKey::Total);
    }
    match s.parse::<usize>() {
        Ok(i) if i >= 1 => Some(TraceKey::Block(i)),
        _ => None,
    }
}

fn parse_number(s: &str, line: u64, field: &str) -> Result<f64, TraceError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(TraceError::Malformed { line, message: format!("invalid {field} `{s}`") }),
    }
}
