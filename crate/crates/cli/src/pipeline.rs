//! The end-to-end run: every analysis requested by a config, in pipeline
//! order, with failures of independent analyses collected instead of
//! aborting the run.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use frontier_core::dataframe::{apply_transforms, descriptive_stats, load_csv, DataError, Dataset, LoadOptions, LoadReport, VariableCatalog};
use frontier_core::dea::{solve_envelopment, EfficiencyScore};
use frontier_core::diagnostics::{
    correlation_matrix, gini_by_unit, load_period_counts, pca, productivity, sign_check, DiagnosticsError, Retain,
};
use frontier_core::regress::{fit, FitOptions, DEFAULT_SEED};
use frontier_core::selection::{backward_eliminate, compare_models, staged_inclusion, SelectionError};

use crate::config::LoadedConfig;
use crate::report::*;
use crate::{CliError, EXIT_ANALYSIS, EXIT_OK};

pub const GINI_COLUMN: &str = "GINI";

/// A finished run held in memory; nothing is written until
/// [`write_outputs`].
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub tables: String,
    /// `(file name, contents)` for the per-model score files.
    pub dea_csv: Vec<(String, String)>,
    pub correlation_csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_ANALYSIS
        }
    }
}

pub fn load_catalog(cfg: &LoadedConfig) -> Result<VariableCatalog, CliError> {
    match cfg.catalog_path() {
        None => Ok(VariableCatalog::ansp_factors()),
        Some(p) => VariableCatalog::from_json_file(&p).map_err(|e| match e {
            DataError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Config(format!("{}: {other}", p.display())),
        }),
    }
}

pub fn load_data(cfg: &LoadedConfig, catalog: &VariableCatalog) -> Result<(Dataset, LoadReport), CliError> {
    let opts = LoadOptions {
        missing_policy: cfg.config.missing_policy,
        year: cfg.config.year,
    };
    load_csv(cfg.data_path(), catalog, &opts).map_err(|e| match e {
        DataError::Io { path, source } => CliError::Io { path, source },
        other => CliError::Fatal {
            step: "load".into(),
            message: other.to_string(),
        },
    })
}

/// Checks that every variable a config names is a data column or a column
/// the run derives.
pub fn check_references(cfg: &LoadedConfig, ds: &Dataset) -> Result<(), CliError> {
    let c = &cfg.config;
    let mut known: HashSet<String> = ds.column_names().map(str::to_string).collect();
    for m in &c.dea {
        if known.contains(&m.name) {
            return Err(CliError::Config(format!(
                "DEA model name `{}` collides with a data column",
                m.name
            )));
        }
    }
    if c.monthly_counts.is_some() {
        known.insert(GINI_COLUMN.into());
    }
    if let Some(p) = &c.productivity {
        known.insert(p.name.clone());
    }
    known.extend(c.dea.iter().map(|m| m.name.clone()));
    let mut refs: Vec<(&str, &String)> = Vec::new();
    for m in &c.dea {
        refs.extend(m.inputs.iter().chain(&m.outputs).map(|v| ("DEA model", v)));
        for id in &m.excluded_dmus {
            if ds.row_index(id).is_none() {
                return Err(CliError::Config(format!("DEA model `{}` excludes unknown unit `{id}`", m.name)));
            }
        }
    }
    refs.extend(c.describe.iter().map(|v| ("describe", v)));
    refs.extend(c.correlation.iter().map(|v| ("correlation", v)));
    if let Some(p) = &c.pca {
        refs.extend(p.variables.iter().map(|v| ("pca", v)));
    }
    if let Some(p) = &c.productivity {
        refs.push(("productivity", &p.output));
        refs.push(("productivity", &p.labour_hours));
    }
    for r in &c.regressions {
        refs.push(("regression", &r.dependent));
        refs.extend(r.regressors.iter().map(|v| ("regression", v)));
    }
    for s in &c.selection.staged {
        refs.push(("staged run", &s.dependent));
        refs.extend(s.regressors.iter().map(|v| ("staged run", v)));
        let m = &s.membership;
        refs.extend(m.dummy_groups.values().flatten().chain(&m.airspace).chain(&m.demand).map(|v| ("stage membership", v)));
    }
    for (what, v) in refs {
        if !known.contains(v) {
            return Err(CliError::Config(format!("{what} refers to unknown variable `{v}`")));
        }
    }
    Ok(())
}

fn timestamp() -> String {
    let t = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Columns derived during the run that cover only some units, such as
/// scores of a DEA model with excluded units.
struct Derived {
    name: String,
    ids: Vec<String>,
    values: Vec<f64>,
}

struct Run<'a> {
    cfg: &'a LoadedConfig,
    catalog: VariableCatalog,
    raw: Dataset,
    data: Dataset,
    derived: Vec<Derived>,
    failures: Vec<Failure>,
    fit_options: FitOptions,
}

impl Run<'_> {
    fn fail(&mut self, step: &str, item: &str, message: impl ToString) {
        self.failures.push(Failure {
            step: step.into(),
            item: item.into(),
            message: message.to_string(),
        });
    }

    /// The transformed dataset restricted to the units that carry
    /// `dependent`.
    fn view(&self, dependent: &str) -> Result<Dataset, DataError> {
        match self.derived.iter().find(|d| d.name == dependent) {
            None => Ok(self.data.clone()),
            Some(d) => {
                let drop: Vec<String> = self
                    .data
                    .dmu_ids()
                    .iter()
                    .filter(|id| !d.ids.contains(id))
                    .cloned()
                    .collect();
                let base = if drop.is_empty() { self.data.clone() } else { self.data.without_dmus(&drop)? };
                let values = base
                    .dmu_ids()
                    .iter()
                    .map(|id| d.values[d.ids.iter().position(|x| x == id).expect("unit retained")])
                    .collect();
                base.with_column(dependent, values)
            }
        }
    }

    fn add_column(&mut self, name: &str, values: Vec<f64>) -> Result<(), DataError> {
        self.raw = self.raw.clone().with_column(name, values.clone())?;
        self.data = self.data.clone().with_column(name, values)?;
        Ok(())
    }
}

/// Runs every analysis of `cfg`. Errors are returned only when the run
/// cannot start; analysis failures land in `report.failures`.
pub fn execute(cfg: &LoadedConfig, seed: Option<u64>) -> Result<Outcome, CliError> {
    let c = &cfg.config;
    let catalog = load_catalog(cfg)?;
    let (raw, load_report) = load_data(cfg, &catalog)?;
    check_references(cfg, &raw)?;
    let seed = seed.or(c.seed).unwrap_or(DEFAULT_SEED);
    let fit_options = FitOptions { seed, ..FitOptions::default() };

    let data = apply_transforms(&raw, &catalog).map_err(|e| CliError::Fatal {
        step: "transform".into(),
        message: e.to_string(),
    })?;
    let mut run = Run {
        cfg,
        catalog,
        raw,
        data,
        derived: Vec::new(),
        failures: Vec::new(),
        fit_options,
    };

    // descriptive statistics on the untransformed data
    let describe: Vec<String> = if c.describe.is_empty() {
        run.raw.column_names().map(str::to_string).collect()
    } else {
        c.describe.clone()
    };
    let descriptive_statistics = match descriptive_stats(&run.raw, &describe) {
        Ok(rows) => rows,
        Err(e) => {
            run.fail("descriptive statistics", "", e);
            Vec::new()
        }
    };

    let gini = match run.cfg.monthly_path() {
        None => None,
        Some(path) => gini_section(&mut run, &path)?,
    };

    if let Some(p) = &c.productivity {
        let values = run
            .raw
            .column(&p.output)
            .and_then(|o| Ok((o, run.raw.column(&p.labour_hours)?)))
            .map_err(|e| e.to_string())
            .and_then(|(o, h)| productivity(o, h).map_err(|e| e.to_string()));
        match values {
            Ok(v) => {
                if let Err(e) = run.add_column(&p.name, v) {
                    run.fail("productivity", &p.name, e);
                }
            }
            Err(e) => run.fail("productivity", &p.name, e),
        }
    }

    let mut dea = Vec::new();
    let mut dea_csv = Vec::new();
    for model in &c.dea {
        match solve_envelopment(model, &run.raw) {
            Ok(scores) => {
                dea_csv.push((format!("dea_{}.csv", file_stem(&model.name)), scores_csv(&scores)));
                run.derived.push(Derived {
                    name: model.name.clone(),
                    ids: scores.iter().map(|s| s.dmu_id.clone()).collect(),
                    values: scores.iter().map(|s| s.score).collect(),
                });
                dea.push(DeaSection {
                    model: model.clone(),
                    column: model.name.clone(),
                    scores,
                });
            }
            Err(e) => run.fail("dea", &model.name, e),
        }
    }

    let (correlation, correlation_csv) = if c.correlation.is_empty() {
        (None, None)
    } else {
        match correlation_matrix(&run.data, &c.correlation) {
            Ok(m) => {
                let csv = m.to_csv();
                let ranked_pairs = m.ranked_pairs();
                (Some(CorrelationSection { matrix: m, ranked_pairs }), Some(csv))
            }
            Err(e) => {
                run.fail("correlation", "", e);
                (None, None)
            }
        }
    };
    let pca_result = c.pca.as_ref().and_then(|p| match pca(&run.data, &p.variables, Retain::Share(p.retain_share)) {
        Ok(r) => Some(r),
        Err(e) => {
            run.fail("pca", "", e);
            None
        }
    });

    let mut regressions = Vec::new();
    for r in &c.regressions {
        let ds = match run.view(&r.dependent) {
            Ok(ds) => ds,
            Err(e) => {
                run.fail("regression", &r.label, e);
                continue;
            }
        };
        for &method in &r.methods {
            let label = r.result_label(method);
            match fit(&r.spec(method), &ds, &run.fit_options) {
                Ok(result) => regressions.push(RegressionEntry {
                    label,
                    regression: r.label.clone(),
                    method,
                    result,
                }),
                Err(e) => run.fail("regression", &label, e),
            }
        }
    }

    let sel = &c.selection;
    let mut reduction_traces = Vec::new();
    if sel.backward {
        for r in &c.regressions {
            let Ok(ds) = run.view(&r.dependent) else { continue };
            for &method in &r.methods {
                let label = r.result_label(method);
                match backward_eliminate(&r.spec(method), &ds, sel.threshold, sel.vif_threshold, &run.fit_options) {
                    Ok(trace) => reduction_traces.push(TraceEntry { label, trace }),
                    Err(e) => run.fail("backward elimination", &label, e),
                }
            }
        }
    }
    let mut staged_runs = Vec::new();
    for s in &sel.staged {
        let ds = match run.view(&s.dependent) {
            Ok(ds) => ds,
            Err(e) => {
                run.fail("staged inclusion", &s.label, e);
                continue;
            }
        };
        match staged_inclusion(&run.catalog, &s.membership, &s.spec(), &ds, sel.vif_threshold, &run.fit_options) {
            Ok(r) => staged_runs.push(StagedEntry { label: s.label.clone(), run: r }),
            Err(SelectionError::StageFailed { stage, source, partial }) => {
                run.fail("staged inclusion", &format!("{} [{stage}]", s.label), source);
                staged_runs.push(StagedEntry {
                    label: s.label.clone(),
                    run: *partial,
                });
            }
            Err(e) => run.fail("staged inclusion", &s.label, e),
        }
    }

    let comparison = if regressions.len() >= 2 {
        let models = regressions.iter().map(|r| (r.label.clone(), r.result.clone())).collect();
        match compare_models(models) {
            Ok(t) => Some(t),
            Err(e) => {
                run.fail("comparison", "", e);
                None
            }
        }
    } else {
        None
    };

    let mut sign_checks = Vec::new();
    for r in &regressions {
        match sign_check(&r.result, &run.catalog) {
            Ok(check) => sign_checks.push(SignEntry {
                label: r.label.clone(),
                check,
            }),
            Err(DiagnosticsError::UnknownTerm(_)) => {
                // regressors outside the catalog carry no expectation
                let check = sign_check_known(&r.result, &run.catalog);
                sign_checks.push(SignEntry {
                    label: r.label.clone(),
                    check,
                });
            }
            Err(e) => run.fail("sign check", &r.label, e),
        }
    }

    let metadata = Metadata {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: timestamp(),
        config_path: cfg.path.display().to_string(),
        config_digest: cfg.digest.clone(),
        data_path: cfg.data_path().display().to_string(),
        year: run.raw.year(),
        n: run.raw.n(),
        rows_read: load_report.rows_read,
        rows_dropped: load_report.rows_dropped,
        dropped_dmus: load_report.dropped_dmus,
        seed,
        render: c.render.clone(),
    };
    let report = Report {
        metadata,
        descriptive_statistics,
        gini,
        dea,
        correlation,
        pca: pca_result,
        regressions,
        reduction_traces,
        staged_runs,
        comparison,
        sign_checks,
        failures: run.failures,
    };
    let tables = report.render_tables();
    Ok(Outcome {
        report,
        tables,
        dea_csv,
        correlation_csv,
    })
}

fn gini_section(run: &mut Run, path: &Path) -> Result<Option<GiniSection>, CliError> {
    let counts = match load_period_counts(path) {
        Ok(c) => c,
        Err(DiagnosticsError::Data(DataError::Io { path, source })) => return Err(CliError::Io { path, source }),
        Err(e) => {
            run.fail("gini", "", e);
            return Ok(None);
        }
    };
    let values = match gini_by_unit(&counts) {
        Ok(v) => v,
        Err(e) => {
            run.fail("gini", "", e);
            return Ok(None);
        }
    };
    let mut column = Vec::with_capacity(run.raw.n());
    for id in run.raw.dmu_ids().to_vec() {
        match values.iter().find(|(u, _)| *u == id) {
            Some((_, g)) => column.push(*g),
            None => {
                run.fail("gini", &id, "unit has no period counts");
                return Ok(None);
            }
        }
    }
    if let Err(e) = run.add_column(GINI_COLUMN, column) {
        run.fail("gini", "", e);
    }
    Ok(Some(GiniSection {
        convention: GINI_CONVENTION.into(),
        periods: counts.periods.clone(),
        values: values
            .into_iter()
            .map(|(dmu_id, value)| UnitValue { dmu_id, value })
            .collect(),
    }))
}

fn sign_check_known(
    result: &frontier_core::RegressionResult,
    catalog: &VariableCatalog,
) -> frontier_core::diagnostics::SignCheck {
    let mut known = result.clone();
    known.terms.retain(|t| t.name == frontier_core::regress::INTERCEPT || catalog.get(&t.name).is_some());
    sign_check(&known, catalog).expect("only catalog terms remain")
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|ch| if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' { ch } else { '_' })
        .collect()
}

fn scores_csv(scores: &[EfficiencyScore]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dmu_id", "score", "peers"]).expect("in-memory write");
    for s in scores {
        let peers: Vec<String> = s.reference_set.iter().map(|p| format!("{}:{}", p.dmu_id, p.lambda)).collect();
        w.write_record([s.dmu_id.as_str(), &s.score.to_string(), &peers.join(";")])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Writes the run's files into `dir`, returning the paths written.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut files: Vec<(String, &str)> = vec![
        ("report.json".into(), ""),
        ("tables.txt".into(), outcome.tables.as_str()),
    ];
    let json = outcome.report.to_json();
    files[0].1 = &json;
    for (name, body) in &outcome.dea_csv {
        files.push((name.clone(), body));
    }
    if let Some(c) = &outcome.correlation_csv {
        files.push(("correlation.csv".into(), c));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
