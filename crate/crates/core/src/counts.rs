//! Count data: frequency-of-frequencies tables and per-subject event logs.
//!
//! A [`FrequencyTable`] maps a multiplicity `k >= 1` to `n_k`, the number of
//! subjects seen exactly `k` times. The unseen count `n_0` never appears in a
//! table. An [`EventLog`] keeps the raw event times per subject so a table can
//! be rebuilt at any cut-off time with [`from_events`].
//!
//! CSV formats:
//!
//! - frequency table: header `k,count`, rows with ascending positive `k`;
//!   zero counts are not written.
//! - event log: header `id,time`, one row per event.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Read access to frequency-of-frequencies data with real-valued counts.
///
/// Implemented by observed tables ([`FrequencyTable`]) and by expectation-level
/// tables produced by the simulator, so every estimator runs on both.
pub trait Frequencies {
    /// `(k, n_k)` in ascending `k`. Explicitly stored zero counts are included.
    fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_>;

    /// `n_k`, zero when absent.
    fn count(&self, k: u64) -> f64;

    /// Integer `(N1, n)` when the counts are integral.
    fn integral_totals(&self) -> Option<(u64, u64)> {
        None
    }

    /// `N1 = sum n_k`, the number of observed subjects.
    fn observed(&self) -> f64 {
        self.entries().map(|(_, c)| c).sum()
    }

    /// `n = sum k n_k`, the number of observed events.
    fn events(&self) -> f64 {
        self.entries().map(|(k, c)| k as f64 * c).sum()
    }

    /// Largest stored multiplicity.
    fn max_multiplicity(&self) -> Option<u64> {
        self.entries().map(|(k, _)| k).last()
    }
}

/// Observed frequency-of-frequencies table with integer counts.
///
/// Multiplicities with an explicit zero count may be stored (they extend the
/// support used by the heterogeneity sequence) but are never serialized.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    counts: BTreeMap<u64, u64>,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from `(k, n_k)` pairs. Rejects `k = 0` and repeated `k`.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut counts = BTreeMap::new();
        for (k, c) in pairs {
            if k == 0 {
                return Err(Error::domain("multiplicity k must be >= 1"));
            }
            if counts.insert(k, c).is_some() {
                return Err(Error::domain(format!("multiplicity {k} given twice")));
            }
        }
        Ok(Self { counts })
    }

    pub fn get(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Stored `(k, n_k)` pairs in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// True when no multiplicity has a positive count.
    pub fn is_empty(&self) -> bool {
        self.counts.values().all(|&c| c == 0)
    }

    /// `(N1, n)`: observed subjects and observed events.
    pub fn totals(&self) -> (u64, u64) {
        self.iter().fold((0, 0), |(subjects, events), (k, c)| {
            (subjects + c, events + k * c)
        })
    }

    /// Every count multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            counts: self.counts.iter().map(|(&k, &c)| (k, c * factor)).collect(),
        }
    }

    /// Parses the `k,count` CSV format. Errors carry the 1-based line number.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        check_header(&mut rdr, &["k", "count"])?;
        let mut counts = BTreeMap::new();
        let mut last_k = 0;
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let k: u64 = parse_field(&record[0], line, "k")?;
            let c: u64 = parse_field(&record[1], line, "count")?;
            if k == 0 {
                return Err(Error::Parse {
                    line,
                    message: "k must be a positive integer".into(),
                });
            }
            if k <= last_k {
                return Err(Error::Parse {
                    line,
                    message: format!("k = {k} is not ascending"),
                });
            }
            last_k = k;
            counts.insert(k, c);
        }
        Ok(Self { counts })
    }

    /// Writes the `k,count` CSV format, skipping zero counts.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "k,count")?;
        for (k, c) in self.iter().filter(|&(_, c)| c > 0) {
            writeln!(writer, "{k},{c}")?;
        }
        Ok(())
    }
}

impl Frequencies for FrequencyTable {
    fn entries(&self) -> Box<dyn Iterator<Item = (u64, f64)> + '_> {
        Box::new(self.iter().map(|(k, c)| (k, c as f64)))
    }

    fn count(&self, k: u64) -> f64 {
        self.get(k) as f64
    }

    fn integral_totals(&self) -> Option<(u64, u64)> {
        Some(self.totals())
    }
}

/// Per-subject event times over an observation horizon `T`.
///
/// Each list is sorted ascending; subjects without events are not stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    horizon: f64,
    records: BTreeMap<String, Vec<f64>>,
}

impl EventLog {
    /// Validates and normalizes the records: every time must be finite and in
    /// `[0, horizon]`; lists are sorted and empty lists dropped.
    pub fn new(horizon: f64, records: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let mut kept = BTreeMap::new();
        for (id, mut times) in records {
            if let Some(&bad) = times
                .iter()
                .find(|t| !(t.is_finite() && **t >= 0.0 && **t <= horizon))
            {
                return Err(Error::domain(format!(
                    "event time {bad} of subject {id} outside [0, {horizon}]"
                )));
            }
            if times.is_empty() {
                continue;
            }
            times.sort_by(f64::total_cmp);
            kept.insert(id, times);
        }
        Ok(Self {
            horizon,
            records: kept,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn records(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.records
    }

    pub fn subjects(&self) -> usize {
        self.records.len()
    }

    pub fn total_events(&self) -> usize {
        self.records.values().map(Vec::len).sum()
    }

    /// Parses the `id,time` CSV format. Without an explicit `horizon` the
    /// latest observed time is used.
    pub fn read_csv<R: Read>(reader: R, horizon: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        check_header(&mut rdr, &["id", "time"])?;
        let mut records: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let time: f64 = parse_field(&record[1], line, "time")?;
            if !(time.is_finite() && time >= 0.0) {
                return Err(Error::Parse {
                    line,
                    message: format!("time must be a non-negative number, got {time}"),
                });
            }
            records.entry(record[0].to_string()).or_default().push(time);
        }
        let horizon = match horizon {
            Some(h) => h,
            None => records
                .values()
                .flatten()
                .copied()
                .fold(None, |acc: Option<f64>, t| {
                    Some(acc.map_or(t, |a| a.max(t)))
                })
                .ok_or(Error::EmptyTable)?,
        };
        Self::new(horizon, records)
    }

    /// Writes the `id,time` CSV format, subjects in id order.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "id,time")?;
        for (id, times) in &self.records {
            for t in times {
                writeln!(writer, "{id},{t}")?;
            }
        }
        Ok(())
    }
}

/// Frequency table of the log truncated at time `t` (events at exactly `t` count).
pub fn from_events(log: &EventLog, t: f64) -> Result<FrequencyTable> {
    if !(t.is_finite() && t > 0.0 && t <= log.horizon) {
        return Err(Error::domain(format!(
            "cut-off time must lie in (0, {}], got {t}",
            log.horizon
        )));
    }
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for times in log.records.values() {
        let k = times.partition_point(|&x| x <= t) as u64;
        if k > 0 {
            *counts.entry(k).or_default() += 1;
        }
    }
    Ok(FrequencyTable { counts })
}

/// `(N1, n)` of a table; `(0, 0)` for an empty table.
pub fn totals(table: &FrequencyTable) -> (u64, u64) {
    table.totals()
}

/// Applicability of one estimator on a table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applicability {
    pub estimator: String,
    /// Violated preconditions; empty means the estimator can run.
    pub blockers: Vec<String>,
    /// Conditions under which the estimator runs but returns a boundary value.
    pub degenerate: Vec<String>,
}

impl Applicability {
    pub fn is_applicable(&self) -> bool {
        self.blockers.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub checks: Vec<Applicability>,
}

impl Diagnostics {
    pub fn get(&self, estimator: &str) -> Option<&Applicability> {
        self.checks.iter().find(|c| c.estimator == estimator)
    }

    pub fn applicable(&self) -> impl Iterator<Item = &str> {
        self.checks
            .iter()
            .filter(|c| c.is_applicable())
            .map(|c| c.estimator.as_str())
    }
}

/// Reports which estimators a table supports, without running them.
///
/// Estimator names match the default catalogue of
/// [`crate::estimators::EstimatorId::catalogue`].
pub fn validate(table: &FrequencyTable) -> Diagnostics {
    let (subjects, events) = table.totals();
    let n1 = table.get(1);
    let n2 = table.get(2);
    let n3 = table.get(3);

    let mut checks = Vec::new();
    let mut push = |name: &str, blockers: Vec<&str>, degenerate: Vec<&str>| {
        checks.push(Applicability {
            estimator: name.to_string(),
            blockers: blockers.into_iter().map(String::from).collect(),
            degenerate: degenerate.into_iter().map(String::from).collect(),
        });
    };
    let need = |ok: bool, msg: &'static str| if ok { None } else { Some(msg) };

    let chao: Vec<&str> = need(n2 > 0, "n_2 = 0").into_iter().collect();
    let chao_degenerate: Vec<&str> = if n1 == 0 && n2 > 0 {
        vec!["n_1 = 0"]
    } else {
        vec![]
    };
    for name in [
        "ambartsumian",
        "ambartsumian-upper",
        "ambartsumian-total",
        "ambartsumian-total-upper",
    ] {
        push(name, chao.clone(), chao_degenerate.clone());
    }
    push(
        "robust-1-2",
        need(n3 > 0, "n_3 = 0").into_iter().collect(),
        vec![],
    );
    push(
        "mean-rate",
        need(n1 > 0, "n_1 = 0").into_iter().collect(),
        if n1 > 0 && n2 == 0 {
            vec!["n_2 = 0"]
        } else {
            vec![]
        },
    );
    let mle: Vec<&str> = need(events > subjects, "n = N1").into_iter().collect();
    push("mle-rate", mle.clone(), vec![]);
    push("mle-total", mle.clone(), vec![]);
    let plackett: Vec<&str> = need(events > n1, "n - n_1 = 0").into_iter().collect();
    push("plackett-0", plackett.clone(), vec![]);
    push("plackett-total-0", plackett, vec![]);
    push("stirling-total", mle, vec![]);
    push(
        "zelterman-1",
        [need(n1 > 0, "n_1 = 0"), need(n2 > 0, "n_2 = 0")]
            .into_iter()
            .flatten()
            .collect(),
        vec![],
    );
    push(
        "good-turing-p0",
        need(events > 0, "n = 0").into_iter().collect(),
        if events > 0 && n1 == 0 {
            vec!["n_1 = 0: p0 = 0"]
        } else {
            vec![]
        },
    );
    let computable = (2..=table.iter().map(|(k, _)| k).last().unwrap_or(0))
        .filter(|&k| table.get(k - 1) > 0)
        .count();
    push(
        "heterogeneity",
        need(computable >= 2, "fewer than two computable ratios")
            .into_iter()
            .collect(),
        vec![],
    );
    push(
        "solow-polasky",
        [need(n1 > 0, "n_1 = 0"), need(n2 > 0, "n_2 = 0")]
            .into_iter()
            .flatten()
            .collect(),
        vec![],
    );

    Diagnostics { checks }
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(csv_error)?;
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: u64, name: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {name} from `{raw}`"),
    })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}
