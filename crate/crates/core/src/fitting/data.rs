//! Daily-incidence series read from `date,cases` CSV files.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_SMOOTHING_WINDOW: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesFormat {
    Daily,
    Cumulative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceSeries {
    pub region: String,
    pub population: Option<f64>,
    /// Contiguous calendar days.
    pub dates: Vec<NaiveDate>,
    /// New cases per day, nonnegative.
    pub raw: Vec<f64>,
    /// Centered moving average; `None` where the window is incomplete.
    pub smoothed: Vec<Option<f64>>,
    /// Negative daily values set to zero.
    pub clamped: usize,
    /// Missing dates inserted.
    pub gap_filled: usize,
}

impl IncidenceSeries {
    /// Builds a series from daily counts starting at `start`.
    pub fn from_daily(region: impl Into<String>, start: NaiveDate, raw: Vec<f64>) -> Result<Self> {
        let region = region.into();
        if raw.is_empty() {
            return Err(Error::EmptySeries(region));
        }
        if let Some(v) = raw.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "daily count {v} must be finite and nonnegative"
            )));
        }
        let dates = start.iter_days().take(raw.len()).collect();
        let smoothed = moving_average(&raw, DEFAULT_SMOOTHING_WINDOW)?;
        Ok(Self {
            region,
            population: None,
            dates,
            raw,
            smoothed,
            clamped: 0,
            gap_filled: 0,
        })
    }

    pub fn with_population(mut self, population: f64) -> Self {
        self.population = Some(population);
        self
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Recomputes the smoothed series with another odd window.
    pub fn resmooth(&mut self, window: usize) -> Result<()> {
        self.smoothed = moving_average(&self.raw, window)?;
        Ok(())
    }
}

/// Centered moving average; positions without a full window are `None`.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<Option<f64>>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "smoothing window {window} must be odd and positive"
        )));
    }
    let half = window / 2;
    Ok((0..values.len())
        .map(|k| {
            (k >= half && k + half < values.len())
                .then(|| values[k - half..=k + half].iter().sum::<f64>() / window as f64)
        })
        .collect())
}

pub fn load_incidence(path: impl AsRef<Path>, format: SeriesFormat) -> Result<IncidenceSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let region = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_incidence(file, &path.display().to_string(), &region, format)
}

/// Parses CSV with a header containing `date` (ISO-8601) and `cases`
/// columns. `source` names the input in error messages.
pub fn parse_incidence<R: Read>(
    reader: R,
    source: &str,
    region: &str,
    format: SeriesFormat,
) -> Result<IncidenceSeries> {
    let data_err = |line: usize, message: String| Error::Data {
        path: source.to_string(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| data_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| data_err(1, format!("missing `{name}` column")))
    };
    let (date_col, cases_col) = (column("date")?, column("cases")?);

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut counts: Vec<f64> = Vec::new();
    let mut gap_filled = 0;
    for (k, record) in rdr.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| data_err(line, e.to_string()))?;
        let field = |col: usize| {
            record
                .get(col)
                .ok_or_else(|| data_err(line, "too few fields".into()))
        };
        let date = NaiveDate::parse_from_str(field(date_col)?, "%Y-%m-%d").map_err(|e| {
            data_err(
                line,
                format!("bad date `{}`: {e}", field(date_col).unwrap_or("")),
            )
        })?;
        let cases: f64 = field(cases_col)?.parse().map_err(|_| {
            data_err(
                line,
                format!("bad case count `{}`", field(cases_col).unwrap_or("")),
            )
        })?;
        if !cases.is_finite() {
            return Err(data_err(line, format!("non-finite case count {cases}")));
        }
        if let Some(&prev) = dates.last() {
            if date <= prev {
                return Err(data_err(
                    line,
                    format!("date {date} does not follow {prev}"),
                ));
            }
            let missing = (date - prev).num_days() - 1;
            if missing > 0 {
                log::warn!("{source}: {missing} missing day(s) before {date} (line {line}) filled");
                let fill = match format {
                    SeriesFormat::Daily => 0.0,
                    SeriesFormat::Cumulative => *counts.last().unwrap_or(&0.0),
                };
                for d in prev.iter_days().skip(1).take(missing as usize) {
                    dates.push(d);
                    counts.push(fill);
                }
                gap_filled += missing as usize;
            }
        }
        dates.push(date);
        counts.push(cases);
    }

    let (dates, mut raw) = match format {
        SeriesFormat::Daily => (dates, counts),
        SeriesFormat::Cumulative => {
            let daily = counts.windows(2).map(|w| w[1] - w[0]).collect();
            (dates.into_iter().skip(1).collect(), daily)
        }
    };
    if raw.is_empty() {
        return Err(Error::EmptySeries(source.to_string()));
    }
    let mut clamped = 0;
    for v in raw.iter_mut().filter(|v| **v < 0.0) {
        *v = 0.0;
        clamped += 1;
    }
    if clamped > 0 {
        log::warn!("{source}: {clamped} negative daily value(s) clamped to zero");
    }
    let smoothed = moving_average(&raw, DEFAULT_SMOOTHING_WINDOW)?;
    Ok(IncidenceSeries {
        region: region.to_string(),
        population: None,
        dates,
        raw,
        smoothed,
        clamped,
        gap_filled,
    })
}
