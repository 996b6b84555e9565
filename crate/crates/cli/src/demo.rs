//! Synthetic 38-unit ANSP cross-section with a catalog, monthly traffic
//! counts and a config exercising every analysis.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use frontier_core::dataframe::{Category, Dataset, ExpectedSign, VariableCatalog, VariableSpec};
use frontier_core::diagnostics::gini;
use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::CliError;

pub const DEMO_UNITS: usize = 38;
pub const DEMO_SEED: u64 = 2016;
pub const DEMO_YEAR: i32 = 2016;

pub const DATA_FILE: &str = "ansp_demo.csv";
pub const CATALOG_FILE: &str = "catalog.json";
pub const COUNTS_FILE: &str = "monthly_counts.csv";
pub const CONFIG_FILE: &str = "demo_config.json";

/// Second-stage regressors of the demo models.
const MODEL_REGRESSORS: [&str; 12] = [
    "TIME", "NONA", "MET", "JSC", "STATE", "SIZE", "COORD", "OVER", "DOM", "GINI", "DENS", "COSTS",
];

pub struct DemoData {
    pub dataset: Dataset,
    /// `(dmu_id, 12 monthly flight counts)`.
    pub counts: Vec<(String, Vec<f64>)>,
}

/// The 22 study factors plus the DEA measurement columns of the demo file.
pub fn demo_catalog() -> VariableCatalog {
    let mut specs = VariableCatalog::ansp_factors().specs().to_vec();
    for (name, metric) in [("ATCO_HOURS", "h"), ("CFH", "h"), ("COST_ATM", "EUR")] {
        specs.push(VariableSpec {
            name: name.into(),
            category: Category::Endogenous,
            metric: metric.into(),
            is_dummy: false,
            log_scale: false,
            expected_sign: ExpectedSign::Ambiguous,
        });
    }
    VariableCatalog::new(specs).expect("demo catalog is valid")
}

fn round(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

fn z(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    v.iter().map(|x| (x - m) / sd).collect()
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn unif(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

fn draw(rng: &mut ChaCha8Rng, n: usize, mut f: impl FnMut(&mut ChaCha8Rng) -> f64) -> Vec<f64> {
    (0..n).map(|_| f(rng)).collect()
}

pub fn generate(seed: u64) -> DemoData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = DEMO_UNITS;
    let ids: Vec<String> = (1..=n).map(|i| format!("ANSP{i:02}")).collect();
    let mut cols: IndexMap<String, Vec<f64>> = IndexMap::new();

    let time = draw(&mut rng, n, |r| round(unif(r, 934.0, 1990.0), 0));
    let nona = draw(&mut rng, n, |r| round(unif(r, 38.0, 87.0), 1));
    let delatm = draw(&mut rng, n, |r| f64::from(r.random_bool(0.4)));
    let met = draw(&mut rng, n, |r| f64::from(r.random_bool(0.5)));
    let dom = draw(&mut rng, n, |r| round(unif(r, 0.0, 50.0), 1));
    let airp: Vec<f64> = {
        let noise = draw(&mut rng, n, normal);
        dom.iter().zip(&noise).map(|(d, e)| f64::from(d + 8.0 * e > 20.0)).collect()
    };
    let jsc = draw(&mut rng, n, |r| f64::from(r.random_bool(0.25)));
    let state = draw(&mut rng, n, |r| f64::from(r.random_bool(0.5)));
    let size = draw(&mut rng, n, |r| round(unif(r, 20_400f64.ln(), 2_190_000f64.ln()).exp(), -2));
    let ocean = draw(&mut rng, n, |r| f64::from(r.random_bool(0.15)));
    let coord = draw(&mut rng, n, |r| r.random_range(2..=11) as f64);
    let l_airp = draw(&mut rng, n, |r| r.random_range(0..=3) as f64);
    let nofab = draw(&mut rng, n, |r| f64::from(r.random_bool(0.6)));
    let over = draw(&mut rng, n, |r| round(unif(r, 10.0, 100.0), 1));
    let dens = draw(&mut rng, n, |r| round(unif(r, 0.69, 11.47), 2));
    let vi = draw(&mut rng, n, |r| round(unif(r, 0.04, 0.38), 3));
    let hi = draw(&mut rng, n, |r| round(unif(r, 0.27, 0.63), 3));
    let si = draw(&mut rng, n, |r| round(unif(r, 0.04, 0.45), 3));
    let costs = draw(&mut rng, n, |r| round(unif(r, 11.0, 225.0), 1));
    let (w_lo, w_hi) = (2_074f64.ln(), 181_647f64.ln());
    let wealth = draw(&mut rng, n, |r| round(unif(r, w_lo, w_hi).exp(), 0));
    // technology proxy tracks log wealth closely
    let res: Vec<f64> = {
        let noise = draw(&mut rng, n, normal);
        wealth
            .iter()
            .zip(&noise)
            .map(|(w, e)| round((0.26 + 95.5 * (w.ln() - w_lo) / (w_hi - w_lo) + 2.0 * e).clamp(0.26, 95.76), 2))
            .collect()
    };

    // a sinusoidal season whose amplitude sets the traffic Gini
    let counts: Vec<(String, Vec<f64>)> = {
        let targets = draw(&mut rng, n, |r| unif(r, 0.025, 0.255));
        let noise: Vec<Vec<f64>> = (0..n).map(|_| (0..12).map(|_| normal(&mut rng)).collect()).collect();
        ids.iter()
            .enumerate()
            .map(|(i, id)| {
                let base = size[i].sqrt() * 40.0;
                let amp = (targets[i] / 0.41).min(0.9);
                let months = (0..12)
                    .map(|m| {
                        let season = 1.0 + amp * (2.0 * PI * (m as f64 - 3.0) / 12.0).sin();
                        (base * (season + 0.01 * noise[i][m])).round().max(1.0)
                    })
                    .collect();
                (id.clone(), months)
            })
            .collect()
    };
    let g: Vec<f64> = counts.iter().map(|(_, c)| gini(c).expect("positive counts")).collect();

    let shift = draw(&mut rng, n, normal);
    let (zt, zn, zg, zd) = (z(&time.iter().map(|v| v.ln()).collect::<Vec<_>>()), z(&nona), z(&g), z(&dens));
    let latent: Vec<f64> = (0..n)
        .map(|i| {
            0.2 + 0.5 * zt[i] - 0.4 * zn[i] + 0.3 * met[i] - 0.5 * zg[i] - 0.3 * zd[i] + 0.2 * jsc[i]
                - 0.2 * state[i]
                + 0.25 * shift[i]
        })
        .collect();
    let eff: Vec<f64> = latent.iter().map(|l| 1.0 / (1.0 + (-l).exp())).collect();
    let staff = draw(&mut rng, n, |r| (0.45 * unif(r, 20_400f64.ln(), 2_190_000f64.ln()) - 1.5 + 0.3 * normal(r)).exp());
    let atco_hours: Vec<f64> = (0..n).map(|i| round(time[i] * staff[i], 0)).collect();
    let out_noise = draw(&mut rng, n, normal);
    let cfh: Vec<f64> = (0..n)
        .map(|i| round(eff[i] * atco_hours[i] * 0.9 * (0.05 * out_noise[i]).exp(), 1))
        .collect();
    let cost_noise = draw(&mut rng, n, normal);
    let cost_atm: Vec<f64> = (0..n)
        .map(|i| round(atco_hours[i] * costs[i] * (0.1 * cost_noise[i]).exp(), 0))
        .collect();

    for (name, v) in [
        ("TIME", time),
        ("NONA", nona),
        ("DELATM", delatm),
        ("MET", met),
        ("AIRP", airp),
        ("JSC", jsc),
        ("STATE", state),
        ("SIZE", size),
        ("OCEAN", ocean),
        ("COORD", coord),
        ("L_AIRP", l_airp),
        ("NOFAB", nofab),
        ("OVER", over),
        ("DOM", dom),
        ("DENS", dens),
        ("VI", vi),
        ("HI", hi),
        ("SI", si),
        ("COSTS", costs),
        ("RES", res),
        ("WEALTH", wealth),
        ("ATCO_HOURS", atco_hours),
        ("CFH", cfh),
        ("COST_ATM", cost_atm),
    ] {
        cols.insert(name.into(), v);
    }
    let dataset = Dataset::new(ids, Some(DEMO_YEAR), cols, "synthetic demo").expect("generated data is valid");
    DemoData { dataset, counts }
}

pub fn demo_config() -> serde_json::Value {
    let all: Vec<String> = VariableCatalog::ansp_factors().iter().map(|v| v.name.clone()).collect();
    let regressors = MODEL_REGRESSORS.to_vec();
    json!({
        "data": DATA_FILE,
        "catalog": CATALOG_FILE,
        "monthly_counts": COUNTS_FILE,
        "year": DEMO_YEAR,
        "output_dir": "out",
        "seed": DEMO_SEED,
        "correlation": all,
        "pca": { "variables": ["DENS", "VI", "HI", "SI"], "retain_share": 0.8 },
        "productivity": { "name": "PRU", "output": "CFH", "labour_hours": "ATCO_HOURS" },
        "dea": [
            { "name": "M1", "inputs": ["ATCO_HOURS"], "outputs": ["CFH"], "rts": "CRS", "orientation": "input" },
            { "name": "M2", "inputs": ["ATCO_HOURS", "COST_ATM"], "outputs": ["CFH"], "rts": "VRS", "orientation": "input" },
            { "name": "M2A", "inputs": ["ATCO_HOURS", "COST_ATM"], "outputs": ["CFH"], "rts": "VRS", "orientation": "input", "exclude": ["ANSP38"] }
        ],
        "regressions": [
            {
                "label": "M1",
                "dependent": "M1",
                "regressors": regressors,
                "methods": ["OLS", "Tobit", "Truncated"],
                "lower": 0.0,
                "upper": 1.0,
                "truncated_lower": 0.0
            },
            { "label": "M2A", "dependent": "M2A", "regressors": regressors, "methods": ["OLS"] },
            { "label": "PRU", "dependent": "PRU", "regressors": regressors, "methods": ["OLS"] }
        ],
        "selection": {
            "threshold": 0.33,
            "vif_threshold": 10.0,
            "backward": true,
            "staged": [
                {
                    "label": "M1 staged",
                    "dependent": "M1",
                    "regressors": all,
                    "method": "OLS",
                    "membership": {
                        "dummy_groups": { "organisation": ["OCEAN", "NOFAB"] },
                        "airspace": ["SIZE", "COORD", "L_AIRP", "DENS", "VI", "HI", "SI"],
                        "demand": ["OVER", "DOM", "GINI"]
                    }
                }
            ]
        },
        "render": { "decimals": 3, "decimal_separator": ".", "minus": "\u{2212}" }
    })
}

/// Writes the demo bundle into `dir` and returns the config path.
pub fn write_demo(dir: &Path) -> Result<PathBuf, CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let data = generate(DEMO_SEED);
    let data_path = dir.join(DATA_FILE);
    data.dataset.write_csv(&data_path).map_err(|e| CliError::Fatal {
        step: "demo".into(),
        message: e.to_string(),
    })?;

    let mut counts = String::from("dmu_id");
    for m in 1..=12 {
        counts.push_str(&format!(",M{m:02}"));
    }
    counts.push('\n');
    for (id, months) in &data.counts {
        counts.push_str(id);
        for v in months {
            counts.push_str(&format!(",{v}"));
        }
        counts.push('\n');
    }
    let counts_path = dir.join(COUNTS_FILE);
    fs::write(&counts_path, counts).map_err(io(&counts_path))?;

    let catalog_path = dir.join(CATALOG_FILE);
    fs::write(&catalog_path, demo_catalog().to_json_string() + "\n").map_err(io(&catalog_path))?;

    let config_path = dir.join(CONFIG_FILE);
    let text = serde_json::to_string_pretty(&demo_config()).expect("config serializes") + "\n";
    fs::write(&config_path, text).map_err(io(&config_path))?;
    Ok(config_path)
}
