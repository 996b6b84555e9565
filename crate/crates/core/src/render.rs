//! Fixed-width text tables for fitted models: coefficient over "(se)" with
//! significance stars, then Adj. R², Akaike, Log-Lik. and N.

use serde::{Deserialize, Serialize};

use crate::regress::{RegressionResult, TermEstimate};
use crate::selection::ComparisonTable;

const STAR_SLOT: usize = 3;
const GAP: &str = "  ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSettings {
    pub decimals: usize,
    pub decimal_separator: char,
    /// Glyph for negative numbers; U+2212 by default.
    pub minus: String,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            decimals: 3,
            decimal_separator: '.',
            minus: "\u{2212}".to_string(),
        }
    }
}

impl RenderSettings {
    pub fn comma() -> Self {
        Self {
            decimal_separator: ',',
            ..Self::default()
        }
    }

    pub fn with_decimals(mut self, decimals: usize) -> Self {
        self.decimals = decimals;
        self
    }
}

/// Rounds to the configured decimals. A value that rounds to zero carries
/// no minus sign.
pub fn format_number(value: f64, settings: &RenderSettings) -> String {
    if value.is_nan() {
        return "NaN".to_string();
    }
    if value.is_infinite() {
        let inf = "inf".to_string();
        return if value < 0.0 { format!("{}{inf}", settings.minus) } else { inf };
    }
    let body = format!("{:.*}", settings.decimals, value.abs());
    let body = if settings.decimal_separator == '.' {
        body
    } else {
        body.replace('.', &settings.decimal_separator.to_string())
    };
    let is_zero = body.chars().all(|c| c == '0' || !c.is_ascii_digit());
    if value < 0.0 && !is_zero {
        format!("{}{body}", settings.minus)
    } else {
        body
    }
}

/// The coefficient line and the "(se)stars" line for one term.
pub fn format_term(term: &TermEstimate, settings: &RenderSettings) -> (String, String) {
    (
        format_number(term.coefficient, settings),
        format!("({}){}", format_number(term.std_error, settings), term.stars.as_str()),
    )
}

struct Column {
    header: String,
    /// Per row: (coefficient, "(se)", stars).
    cells: Vec<Option<(String, String, &'static str)>>,
    footer: Vec<String>,
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad_left(s: &str, w: usize) -> String {
    format!("{}{s}", " ".repeat(w.saturating_sub(width(s))))
}

fn pad_right(s: &str, w: usize) -> String {
    format!("{s}{}", " ".repeat(w.saturating_sub(width(s))))
}

const FOOTER_LABELS: [&str; 4] = ["Adj. R\u{b2}", "Akaike", "Log-Lik.", "N"];

fn layout(stub_header: &str, terms: &[String], columns: &[Column], notes: &[String]) -> String {
    let stub = terms
        .iter()
        .map(String::as_str)
        .chain(FOOTER_LABELS)
        .chain([stub_header])
        .map(width)
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| {
            let cells = c
                .cells
                .iter()
                .flatten()
                .flat_map(|(a, b, _)| [width(a), width(b)]);
            let footer = c.footer.iter().map(|f| width(f));
            cells.chain(footer).chain([width(&c.header)]).max().unwrap_or(0)
        })
        .collect();
    let total = stub + widths.iter().map(|w| GAP.len() + w + STAR_SLOT).sum::<usize>();

    let line = |first: &str, cells: Vec<(String, &str)>| -> String {
        let mut s = pad_right(first, stub);
        for ((value, stars), w) in cells.into_iter().zip(&widths) {
            s.push_str(GAP);
            s.push_str(&pad_left(&value, *w));
            s.push_str(&pad_right(stars, STAR_SLOT));
        }
        s.trim_end().to_string()
    };

    let mut lines = vec![line(stub_header, columns.iter().map(|c| (c.header.clone(), "")).collect())];
    let rule = "-".repeat(total);
    let mut body: Vec<(String, Vec<(String, &str)>)> = Vec::new();
    for (r, term) in terms.iter().enumerate() {
        let coef = columns
            .iter()
            .map(|c| match &c.cells[r] {
                Some((a, _, _)) => (a.clone(), ""),
                None => (String::new(), ""),
            })
            .collect();
        let se = columns
            .iter()
            .map(|c| match &c.cells[r] {
                Some((_, b, stars)) => (b.clone(), *stars),
                None => (String::new(), ""),
            })
            .collect();
        body.push((term.clone(), coef));
        body.push((String::new(), se));
    }
    let footer: Vec<(String, Vec<(String, &str)>)> = FOOTER_LABELS
        .iter()
        .enumerate()
        .map(|(i, label)| {
            (
                label.to_string(),
                columns.iter().map(|c| (c.footer[i].clone(), "")).collect(),
            )
        })
        .collect();

    lines.push(rule.clone());
    lines.extend(body.into_iter().map(|(first, cells)| line(&first, cells)));
    lines.push(rule.clone());
    lines.extend(footer.into_iter().map(|(first, cells)| line(&first, cells)));
    lines.push(rule);
    lines.extend(notes.iter().cloned());
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

/// Splits the "(se)stars" cell so stars sit in their own slot.
fn split_cell(term: &TermEstimate, settings: &RenderSettings) -> (String, String, &'static str) {
    let (coef, _) = format_term(term, settings);
    let se = format!("({})", format_number(term.std_error, settings));
    (coef, se, term.stars.as_str())
}

fn footer(adj_r2: Option<f64>, aic: f64, log_lik: f64, n: usize, settings: &RenderSettings) -> Vec<String> {
    vec![
        adj_r2.map(|v| format_number(v, settings)).unwrap_or_default(),
        format_number(aic, settings),
        format_number(log_lik, settings),
        n.to_string(),
    ]
}

const STAR_NOTE: &str = "Standard errors in parentheses. *** p<0.01, ** p<0.05, * p<0.1";

/// Renders one fitted model.
pub fn render_result(result: &RegressionResult, settings: &RenderSettings) -> String {
    let terms: Vec<String> = result.terms.iter().map(|t| t.name.clone()).collect();
    let column = Column {
        header: result.method.to_string(),
        cells: result.terms.iter().map(|t| Some(split_cell(t, settings))).collect(),
        footer: footer(result.adj_r2, result.aic, result.log_lik, result.n, settings),
    };
    layout(&result.dependent, &terms, &[column], &[STAR_NOTE.to_string()])
}

/// Renders a comparison table with one column per labelled model.
pub fn render_comparison(table: &ComparisonTable, settings: &RenderSettings) -> String {
    let terms: Vec<String> = table.rows.iter().map(|r| r.term.clone()).collect();
    let columns: Vec<Column> = table
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| Column {
            header: c.label.clone(),
            cells: table
                .rows
                .iter()
                .map(|r| r.cells[i].as_ref().map(|t| split_cell(t, settings)))
                .collect(),
            footer: footer(c.adj_r2, c.aic, c.log_lik, c.n, settings),
        })
        .collect();
    let notes = vec![
        STAR_NOTE.to_string(),
        format!(
            "Best Akaike: {}. Best Log-Lik.: {}.",
            table.columns[table.best_aic].label, table.columns[table.best_log_lik].label
        ),
    ];
    layout("", &terms, &columns, &notes)
}
