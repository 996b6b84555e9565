//! Cross-sectional observation frames and the variable catalog.
//!
//! A [`Dataset`] holds one year of observations: one row per decision-making
//! unit, one numeric column per variable. Columns are validated against a
//! [`VariableCatalog`] on load, so downstream estimators can assume finite
//! values, unique identifiers and dummy columns restricted to {0, 1}.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DMU_ID_COLUMN: &str = "dmu_id";
pub const YEAR_COLUMN: &str = "year";

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("malformed catalog: {0}")]
    Catalog(String),
    #[error("first column must be `{DMU_ID_COLUMN}`, found `{0}`")]
    MissingIdColumn(String),
    #[error("unknown column `{0}` (not in the variable catalog)")]
    UnknownColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("duplicate dmu_id `{0}`")]
    DuplicateDmu(String),
    #[error("non-numeric cell in column `{column}` for dmu `{dmu}`: `{value}`")]
    NonNumeric {
        column: String,
        dmu: String,
        value: String,
    },
    #[error("missing value in column `{column}` for dmu `{dmu}`")]
    MissingValue { column: String, dmu: String },
    #[error("dummy column `{column}` holds {value} for dmu `{dmu}` (expected 0 or 1)")]
    InvalidDummy {
        column: String,
        dmu: String,
        value: f64,
    },
    #[error("log-scaled column `{column}` holds non-positive value {value} for dmu `{dmu}`")]
    NonPositiveLog {
        column: String,
        dmu: String,
        value: f64,
    },
    #[error("file holds several years {0:?}; select one")]
    MultipleYears(Vec<i32>),
    #[error("no rows for year {0}")]
    YearNotFound(i32),
    #[error("dataset is empty")]
    Empty,
    #[error("column `{0}` not found")]
    NoSuchColumn(String),
    #[error("column `{name}` has length {got}, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("column `{0}` holds a non-finite value")]
    NonFinite(String),
    #[error("dataset has already been transformed")]
    AlreadyTransformed,
    #[error("variable list is empty")]
    EmptyVariableList,
    #[error("unknown dmu_id `{0}`")]
    UnknownDmu(String),
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Endogenous,
    #[serde(alias = "partially_exogenous", alias = "partly_endogenous")]
    PartlyExogenous,
    Exogenous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedSign {
    #[serde(alias = "+")]
    Positive,
    #[serde(alias = "-")]
    Negative,
    #[serde(alias = "?")]
    Ambiguous,
}

/// Metadata for one explanatory or measurement variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub category: Category,
    pub metric: String,
    #[serde(default)]
    pub is_dummy: bool,
    #[serde(default)]
    pub log_scale: bool,
    pub expected_sign: ExpectedSign,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableCatalog {
    specs: Vec<VariableSpec>,
}

impl VariableCatalog {
    pub fn new(specs: Vec<VariableSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for spec in &specs {
            if !seen.insert(spec.name.as_str()) {
                return Err(DataError::Catalog(format!("duplicate variable `{}`", spec.name)));
            }
            if spec.is_dummy && spec.log_scale {
                return Err(DataError::Catalog(format!(
                    "variable `{}` cannot be both a dummy and log-scaled",
                    spec.name
                )));
            }
            if spec.name == DMU_ID_COLUMN || spec.name == YEAR_COLUMN {
                return Err(DataError::Catalog(format!("reserved variable name `{}`", spec.name)));
            }
        }
        Ok(Self { specs })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let specs: Vec<VariableSpec> =
            serde_json::from_str(text).map_err(|e| DataError::Catalog(e.to_string()))?;
        Self::new(specs)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.specs).expect("catalog serializes")
    }

    pub fn get(&self, name: &str) -> Option<&VariableSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    pub fn specs(&self) -> &[VariableSpec] {
        &self.specs
    }

    pub fn iter(&self) -> impl Iterator<Item = &VariableSpec> {
        self.specs.iter()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    /// The factor short list used for the ANSP study: 22 variables with
    /// their unit, log-scaling and expected effect on performance.
    pub fn ansp_factors() -> Self {
        use Category::*;
        use ExpectedSign::*;
        let rows: [(&str, Category, &str, bool, bool, ExpectedSign); 22] = [
            ("TIME", Endogenous, "h", false, true, Positive),
            ("NONA", Endogenous, "%", false, false, Negative),
            ("DELATM", Endogenous, "0/1", true, false, Ambiguous),
            ("MET", Endogenous, "0/1", true, false, Positive),
            ("AIRP", Endogenous, "0/1", true, false, Positive),
            ("JSC", Endogenous, "0/1", true, false, Positive),
            ("STATE", Endogenous, "0/1", true, false, Negative),
            ("SIZE", PartlyExogenous, "km2", false, true, Positive),
            ("OCEAN", PartlyExogenous, "0/1", true, false, Ambiguous),
            ("COORD", PartlyExogenous, "Nb", false, false, Negative),
            ("L_AIRP", PartlyExogenous, "Nb", false, false, Negative),
            ("NOFAB", PartlyExogenous, "0/1", true, false, Ambiguous),
            ("OVER", PartlyExogenous, "%", false, false, Positive),
            ("DOM", PartlyExogenous, "%", false, false, Negative),
            ("GINI", PartlyExogenous, "%", false, false, Negative),
            ("DENS", PartlyExogenous, "score", false, false, Negative),
            ("VI", PartlyExogenous, "score", false, false, Negative),
            ("HI", PartlyExogenous, "score", false, false, Negative),
            ("SI", PartlyExogenous, "score", false, false, Negative),
            ("COSTS", Exogenous, "EUR", false, false, Positive),
            ("RES", Exogenous, "Nb", false, false, Positive),
            ("WEALTH", Exogenous, "EUR", false, true, Positive),
        ];
        let specs = rows
            .iter()
            .map(|&(name, category, metric, is_dummy, log_scale, expected_sign)| VariableSpec {
                name: name.to_string(),
                category,
                metric: metric.to_string(),
                is_dummy,
                log_scale,
                expected_sign,
            })
            .collect();
        Self::new(specs).expect("built-in catalog is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    #[default]
    DropRow,
    Fail,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub missing_policy: MissingPolicy,
    /// Keep only rows of this year when the file has a `year` column.
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub dropped_dmus: Vec<String>,
}

/// One cross-section of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dmu_ids: Vec<String>,
    year: Option<i32>,
    columns: IndexMap<String, Vec<f64>>,
    provenance: String,
    transformed: bool,
}

impl Dataset {
    pub fn new(
        dmu_ids: Vec<String>,
        year: Option<i32>,
        columns: IndexMap<String, Vec<f64>>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if dmu_ids.is_empty() {
            return Err(DataError::Empty);
        }
        let mut seen = HashSet::new();
        for id in &dmu_ids {
            if !seen.insert(id.as_str()) {
                return Err(DataError::DuplicateDmu(id.clone()));
            }
        }
        for (name, values) in &columns {
            if values.len() != dmu_ids.len() {
                return Err(DataError::LengthMismatch {
                    name: name.clone(),
                    got: values.len(),
                    expected: dmu_ids.len(),
                });
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(DataError::NonFinite(name.clone()));
            }
        }
        Ok(Self {
            dmu_ids,
            year,
            columns,
            provenance: provenance.into(),
            transformed: false,
        })
    }

    pub fn n(&self) -> usize {
        self.dmu_ids.len()
    }

    pub fn dmu_ids(&self) -> &[String] {
        &self.dmu_ids
    }

    pub fn year(&self) -> Option<i32> {
        self.year
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| DataError::NoSuchColumn(name.to_string()))
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.contains_key(name)
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.keys().map(String::as_str)
    }

    pub fn row_index(&self, dmu: &str) -> Option<usize> {
        self.dmu_ids.iter().position(|d| d == dmu)
    }

    /// Adds or replaces a column, returning the extended dataset.
    pub fn with_column(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.len() != self.n() {
            return Err(DataError::LengthMismatch {
                name,
                got: values.len(),
                expected: self.n(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DataError::NonFinite(name));
        }
        self.columns.insert(name, values);
        Ok(self)
    }

    /// Keeps only the rows whose ids are not listed in `exclude`.
    pub fn without_dmus(&self, exclude: &[String]) -> Result<Self> {
        for id in exclude {
            if self.row_index(id).is_none() {
                return Err(DataError::UnknownDmu(id.clone()));
            }
        }
        let keep: Vec<usize> = (0..self.n())
            .filter(|&i| !exclude.contains(&self.dmu_ids[i]))
            .collect();
        if keep.is_empty() {
            return Err(DataError::Empty);
        }
        Ok(self.select_rows(&keep))
    }

    fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            dmu_ids: rows.iter().map(|&i| self.dmu_ids[i].clone()).collect(),
            year: self.year,
            columns: self
                .columns
                .iter()
                .map(|(k, v)| (k.clone(), rows.iter().map(|&i| v[i]).collect()))
                .collect(),
            provenance: self.provenance.clone(),
            transformed: self.transformed,
        }
    }

    /// Writes the frame back to CSV. Values use the shortest decimal form that
    /// parses back to the identical `f64`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path).map_err(|e| DataError::Csv(e.to_string()))?;
        let mut header = vec![DMU_ID_COLUMN.to_string()];
        if self.year.is_some() {
            header.push(YEAR_COLUMN.to_string());
        }
        header.extend(self.columns.keys().cloned());
        writer.write_record(&header).map_err(|e| DataError::Csv(e.to_string()))?;
        for (row, id) in self.dmu_ids.iter().enumerate() {
            let mut record = vec![id.clone()];
            if let Some(year) = self.year {
                record.push(year.to_string());
            }
            record.extend(self.columns.values().map(|col| format!("{:?}", col[row])));
            writer.write_record(&record).map_err(|e| DataError::Csv(e.to_string()))?;
        }
        writer.flush().map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Reads a UTF-8, comma-separated observation file and validates it against
/// the catalog.
pub fn load_csv(
    path: impl AsRef<Path>,
    catalog: &VariableCatalog,
    options: &LoadOptions,
) -> Result<(Dataset, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(&text, catalog, options, &path.display().to_string())
}

pub fn parse_csv(
    text: &str,
    catalog: &VariableCatalog,
    options: &LoadOptions,
    provenance: &str,
) -> Result<(Dataset, LoadReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();

    match headers.first() {
        Some(h) if h == DMU_ID_COLUMN => {}
        Some(h) => return Err(DataError::MissingIdColumn(h.clone())),
        None => return Err(DataError::MissingIdColumn(String::new())),
    }
    let mut year_idx = None;
    let mut var_cols: Vec<(usize, &VariableSpec)> = Vec::new();
    let mut seen = HashSet::new();
    for (i, h) in headers.iter().enumerate().skip(1) {
        if !seen.insert(h.as_str()) {
            return Err(DataError::DuplicateColumn(h.clone()));
        }
        if h == YEAR_COLUMN {
            year_idx = Some(i);
            continue;
        }
        let spec = catalog.get(h).ok_or_else(|| DataError::UnknownColumn(h.clone()))?;
        var_cols.push((i, spec));
    }

    let mut report = LoadReport::default();
    let mut ids = Vec::new();
    let mut years = Vec::new();
    let mut columns: IndexMap<String, Vec<f64>> =
        var_cols.iter().map(|(_, s)| (s.name.clone(), Vec::new())).collect();
    let mut id_set = HashSet::new();
    let mut duplicate: Option<String> = None;

    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv(e.to_string()))?;
        report.rows_read += 1;
        let dmu = record.get(0).unwrap_or_default().to_string();
        if dmu.is_empty() {
            return Err(DataError::Csv(format!("row {} has an empty dmu_id", report.rows_read)));
        }
        let year = match year_idx {
            Some(i) => {
                let cell = record.get(i).unwrap_or_default();
                Some(cell.parse::<i32>().map_err(|_| DataError::NonNumeric {
                    column: YEAR_COLUMN.into(),
                    dmu: dmu.clone(),
                    value: cell.into(),
                })?)
            }
            None => None,
        };
        if let (Some(want), Some(got)) = (options.year, year) {
            if want != got {
                continue;
            }
        }

        let mut row = Vec::with_capacity(var_cols.len());
        let mut missing = None;
        for &(i, spec) in &var_cols {
            let cell = record.get(i).unwrap_or_default();
            if cell.is_empty() {
                missing.get_or_insert_with(|| spec.name.clone());
                row.push(f64::NAN);
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| DataError::NonNumeric {
                column: spec.name.clone(),
                dmu: dmu.clone(),
                value: cell.into(),
            })?;
            if !value.is_finite() {
                return Err(DataError::NonNumeric {
                    column: spec.name.clone(),
                    dmu,
                    value: cell.into(),
                });
            }
            if spec.is_dummy && value != 0.0 && value != 1.0 {
                return Err(DataError::InvalidDummy {
                    column: spec.name.clone(),
                    dmu,
                    value,
                });
            }
            row.push(value);
        }
        if let Some(column) = missing {
            match options.missing_policy {
                MissingPolicy::Fail => return Err(DataError::MissingValue { column, dmu }),
                MissingPolicy::DropRow => {
                    report.rows_dropped += 1;
                    report.dropped_dmus.push(dmu);
                    continue;
                }
            }
        }
        if !id_set.insert(dmu.clone()) && duplicate.is_none() {
            duplicate = Some(dmu.clone());
        }
        ids.push(dmu);
        years.push(year);
        for ((_, col), v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }

    // A repeated id across several years is a panel, not a duplicate.
    let year = match (year_idx, options.year) {
        (None, want) => want,
        (Some(_), Some(want)) => {
            if ids.is_empty() {
                return Err(DataError::YearNotFound(want));
            }
            Some(want)
        }
        (Some(_), None) => {
            let mut distinct: Vec<i32> = years.iter().flatten().copied().collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() > 1 {
                return Err(DataError::MultipleYears(distinct));
            }
            distinct.first().copied()
        }
    };
    if let Some(dmu) = duplicate {
        return Err(DataError::DuplicateDmu(dmu));
    }

    let ds = Dataset::new(ids, year, columns, provenance)?;
    Ok((ds, report))
}

/// Replaces every log-scaled column by its natural logarithm.
pub fn apply_transforms(ds: &Dataset, catalog: &VariableCatalog) -> Result<Dataset> {
    if ds.transformed {
        return Err(DataError::AlreadyTransformed);
    }
    let mut out = ds.clone();
    for (name, values) in out.columns.iter_mut() {
        let Some(spec) = catalog.get(name) else { continue };
        if !spec.log_scale {
            continue;
        }
        if let Some((row, &value)) = values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(DataError::NonPositiveLog {
                column: name.clone(),
                dmu: ds.dmu_ids[row].clone(),
                value,
            });
        }
        values.iter_mut().for_each(|v| *v = v.ln());
    }
    out.transformed = true;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub variable: String,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn descriptive_stats<S: AsRef<str>>(ds: &Dataset, vars: &[S]) -> Result<Vec<StatsRow>> {
    if vars.is_empty() {
        return Err(DataError::EmptyVariableList);
    }
    vars.iter()
        .map(|name| {
            let name = name.as_ref();
            let mut sorted = ds.column(name)?.to_vec();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
            };
            Ok(StatsRow {
                variable: name.to_string(),
                min: sorted[0],
                median,
                max: sorted[n - 1],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> VariableCatalog {
        VariableCatalog::ansp_factors()
    }

    fn load(text: &str, policy: MissingPolicy) -> Result<(Dataset, LoadReport)> {
        let opts = LoadOptions {
            missing_policy: policy,
            year: None,
        };
        parse_csv(text, &catalog(), &opts, "inline")
    }

    #[test]
    fn builtin_catalog_has_22_factors() {
        let cat = catalog();
        assert_eq!(cat.len(), 22);
        let logs: Vec<_> = cat.iter().filter(|s| s.log_scale).map(|s| s.name.as_str()).collect();
        assert_eq!(logs, ["TIME", "SIZE", "WEALTH"]);
        assert_eq!(cat.get("GINI").unwrap().expected_sign, ExpectedSign::Negative);
        assert_eq!(cat.get("DELATM").unwrap().expected_sign, ExpectedSign::Ambiguous);
    }

    #[test]
    fn catalog_json_accepts_symbol_signs() {
        let cat = VariableCatalog::from_json_str(
            r#"[{"name":"X","category":"partly_exogenous","metric":"h","is_dummy":false,"log_scale":true,"expected_sign":"+"}]"#,
        )
        .unwrap();
        assert_eq!(cat.get("X").unwrap().expected_sign, ExpectedSign::Positive);
        let round = VariableCatalog::from_json_str(&cat.to_json_string()).unwrap();
        assert_eq!(round, cat);
    }

    #[test]
    fn catalog_rejects_dummy_log() {
        let err = VariableCatalog::from_json_str(
            r#"[{"name":"X","category":"exogenous","metric":"","is_dummy":true,"log_scale":true,"expected_sign":"?"}]"#,
        );
        assert!(matches!(err, Err(DataError::Catalog(_))));
    }

    #[test]
    fn single_row_of_zeros_is_valid() {
        let (ds, rep) = load("dmu_id,NONA,MET,COORD\nA,0,0,0\n", MissingPolicy::Fail).unwrap();
        assert_eq!(ds.n(), 1);
        assert_eq!(rep.rows_dropped, 0);
    }

    #[test]
    fn drop_row_policy_counts_dropped() {
        let text = "dmu_id,COSTS,RES\nA,1,2\nB,,3\nC,4,5\n";
        let (ds, rep) = load(text, MissingPolicy::DropRow).unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(rep.rows_dropped, 1);
        assert_eq!(rep.dropped_dmus, ["B"]);
        assert!(matches!(
            load(text, MissingPolicy::Fail),
            Err(DataError::MissingValue { .. })
        ));
    }

    #[test]
    fn load_errors() {
        assert!(matches!(
            load("id,COSTS\nA,1\n", MissingPolicy::Fail),
            Err(DataError::MissingIdColumn(_))
        ));
        assert!(matches!(
            load("dmu_id,FOO\nA,1\n", MissingPolicy::Fail),
            Err(DataError::UnknownColumn(c)) if c == "FOO"
        ));
        assert!(matches!(
            load("dmu_id,COSTS\nA,1\nA,2\n", MissingPolicy::Fail),
            Err(DataError::DuplicateDmu(_))
        ));
        assert!(matches!(
            load("dmu_id,COSTS\nA,abc\n", MissingPolicy::Fail),
            Err(DataError::NonNumeric { .. })
        ));
        assert!(matches!(
            load("dmu_id,MET\nA,2\n", MissingPolicy::Fail),
            Err(DataError::InvalidDummy { .. })
        ));
        assert!(matches!(
            load("dmu_id,COSTS\nA,1,2\n", MissingPolicy::Fail),
            Err(DataError::Csv(_))
        ));
    }

    #[test]
    fn multi_year_requires_selection() {
        let text = "dmu_id,year,COSTS\nA,2016,1\nB,2017,2\nA,2017,3\n";
        assert!(matches!(
            load(text, MissingPolicy::Fail),
            Err(DataError::MultipleYears(_))
        ));
        let opts = LoadOptions {
            missing_policy: MissingPolicy::Fail,
            year: Some(2017),
        };
        let (ds, _) = parse_csv(text, &catalog(), &opts, "inline").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.year(), Some(2017));
        assert_eq!(ds.column("COSTS").unwrap(), [2.0, 3.0]);
    }

    #[test]
    fn log_transform() {
        let e = std::f64::consts::E;
        let (ds, _) = load(
            &format!("dmu_id,SIZE,COSTS\nA,{e:?},5\nB,{:?},6\n", e * e),
            MissingPolicy::Fail,
        )
        .unwrap();
        let t = apply_transforms(&ds, &catalog()).unwrap();
        let size = t.column("SIZE").unwrap();
        assert!((size[0] - 1.0).abs() < 1e-15);
        assert!((size[1] - 2.0).abs() < 1e-15);
        assert_eq!(t.column("COSTS").unwrap(), ds.column("COSTS").unwrap());
        assert_eq!(t.dmu_ids(), ds.dmu_ids());
        assert!(matches!(
            apply_transforms(&t, &catalog()),
            Err(DataError::AlreadyTransformed)
        ));
    }

    #[test]
    fn transform_without_log_columns_is_identity() {
        let (ds, _) = load("dmu_id,COSTS\nA,5\n", MissingPolicy::Fail).unwrap();
        let t = apply_transforms(&ds, &catalog()).unwrap();
        assert_eq!(t.column("COSTS").unwrap(), ds.column("COSTS").unwrap());
    }

    #[test]
    fn transform_rejects_zero() {
        let (ds, _) = load("dmu_id,SIZE\nA,0\n", MissingPolicy::Fail).unwrap();
        assert!(matches!(
            apply_transforms(&ds, &catalog()),
            Err(DataError::NonPositiveLog { .. })
        ));
    }

    #[test]
    fn order_statistics() {
        let (ds, _) = load("dmu_id,COSTS,RES\nA,3,1\nB,1,2\nC,2,3\nD,9,4\n", MissingPolicy::Fail)
            .unwrap();
        let rows = descriptive_stats(&ds, &["RES"]).unwrap();
        assert_eq!((rows[0].min, rows[0].median, rows[0].max), (1.0, 2.5, 4.0));
        let three = ds.without_dmus(&["D".to_string()]).unwrap();
        let rows = descriptive_stats(&three, &["COSTS"]).unwrap();
        assert_eq!((rows[0].min, rows[0].median, rows[0].max), (1.0, 2.0, 3.0));
        assert!(matches!(
            descriptive_stats::<&str>(&ds, &[]),
            Err(DataError::EmptyVariableList)
        ));
        assert!(matches!(
            descriptive_stats(&ds, &["NOPE"]),
            Err(DataError::NoSuchColumn(_))
        ));
    }
}
