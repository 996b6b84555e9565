use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{DiagnosticsError, Result};
use crate::dataframe::{DataError, DMU_ID_COLUMN};

/// Gini coefficient with the population convention,
/// `Σᵢ Σⱼ |vᵢ - vⱼ| / (2 n² v̄)`, evaluated in `O(n log n)` from the sorted
/// series as `Σ (2i - n - 1) v₍ᵢ₎ / (n Σ v)`.
pub fn gini(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(DiagnosticsError::TooFew {
            what: "values",
            needed: 1,
            got: 0,
        });
    }
    for (i, &v) in series.iter().enumerate() {
        if !v.is_finite() {
            return Err(DiagnosticsError::NonFinite(i));
        }
        if v < 0.0 {
            return Err(DiagnosticsError::NegativeValue { index: i, value: v });
        }
    }
    let total: f64 = series.iter().sum();
    if total <= 0.0 {
        return Err(DiagnosticsError::ZeroSum);
    }
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * (i as f64 + 1.0) - n - 1.0) * v)
        .sum();
    Ok((weighted / (n * total)).max(0.0))
}

/// Per-unit traffic counts over equal periods (e.g. 12 months).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodCounts {
    pub periods: Vec<String>,
    pub units: Vec<(String, Vec<f64>)>,
}

/// Reads a `dmu_id,<period>,<period>,...` CSV.
pub fn load_period_counts(path: impl AsRef<Path>) -> Result<PeriodCounts> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .clone();
    match headers.get(0) {
        Some(DMU_ID_COLUMN) => {}
        other => return Err(DataError::MissingIdColumn(other.unwrap_or("").to_string()).into()),
    }
    let periods: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    if periods.is_empty() {
        return Err(DiagnosticsError::TooFew {
            what: "period columns",
            needed: 1,
            got: 0,
        });
    }
    let mut units = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        let id = record.get(0).unwrap_or_default().to_string();
        if units.iter().any(|(u, _)| *u == id) {
            return Err(DataError::DuplicateDmu(id).into());
        }
        let values = record
            .iter()
            .skip(1)
            .zip(&periods)
            .map(|(cell, period)| {
                cell.parse::<f64>().map_err(|_| DataError::NonNumeric {
                    column: period.clone(),
                    dmu: id.clone(),
                    value: cell.to_string(),
                })
            })
            .collect::<Result<Vec<f64>, DataError>>()?;
        units.push((id, values));
    }
    Ok(PeriodCounts { periods, units })
}

/// Gini of each unit's period counts, in file order.
pub fn gini_by_unit(counts: &PeriodCounts) -> Result<Vec<(String, f64)>> {
    counts
        .units
        .iter()
        .map(|(id, v)| Ok((id.clone(), gini(v)?)))
        .collect()
}
