//! Table-producing front end: single-point reports, `y`-grid sweeps and Monte
//! Carlo checks, with CSV and JSON rendering.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::bounds::{
    bo_lower, chernoff_upper, lower_bound_new_with, saddlepoint_tail_with, stroock_lower,
    BoundResult, BoundStatus, NewBoundOptions, SaddlepointEstimate, Tail, DEFAULT_TRUNCATION_NATS,
};
use crate::cumulant::{exact_tail, CumulantModel, DistributionSpec};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_tail, McEstimate, DEFAULT_CONFIDENCE};

/// Column names in output order.
pub const COLUMNS: [&str; 15] = [
    "y",
    "exact",
    "chernoff",
    "new_lower",
    "new_alpha",
    "new_delta",
    "new_alpha_hat",
    "stroock",
    "stroock_alpha",
    "bo",
    "bo_alpha",
    "saddlepoint",
    "mc_p_hat",
    "mc_ci_lo",
    "mc_ci_hi",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Exact,
    Chernoff,
    New,
    Stroock,
    Bo,
    Saddlepoint,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Exact,
        Method::Chernoff,
        Method::New,
        Method::Stroock,
        Method::Bo,
        Method::Saddlepoint,
    ];
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Method::Exact,
            "chernoff" => Method::Chernoff,
            "new" | "new_lower" => Method::New,
            "stroock" => Method::Stroock,
            "bo" | "b-o" => Method::Bo,
            "saddlepoint" | "saddle" => Method::Saddlepoint,
            other => return Err(Error::Argument(format!(
                "unknown bound `{other}` (expected exact, chernoff, new, stroock, bo, saddlepoint)"
            ))),
        })
    }
}

/// Which methods populate their columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection(BTreeSet<Method>);

impl Selection {
    pub fn all() -> Self {
        Self(Method::ALL.into_iter().collect())
    }

    pub fn contains(&self, m: Method) -> bool {
        self.0.contains(&m)
    }
}

impl Default for Selection {
    fn default() -> Self {
        Self::all()
    }
}

impl FromStr for Selection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(Self::all());
        }
        let set = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<_>>>()?;
        if set.is_empty() {
            return Err(Error::Argument("empty bound selection".into()));
        }
        Ok(Self(set))
    }
}

/// Linear grid `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(Error::Argument(format!(
                "grid needs min < max, got {min}:{max}"
            )));
        }
        if steps < 2 {
            return Err(Error::Argument(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self { min, max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| match i {
                0 => self.min,
                i if i == self.steps - 1 => self.max,
                i => self.min + (self.max - self.min) * i as f64 / last,
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("cannot parse grid `{s}` (expected min:max:steps)"));
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, steps] = parts.as_slice() else {
            return Err(bad());
        };
        Self::new(
            min.trim().parse().map_err(|_| bad())?,
            max.trim().parse().map_err(|_| bad())?,
            steps.trim().parse().map_err(|_| bad())?,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub confidence: f64,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64, confidence: f64) -> Result<Self> {
        if samples < 100 {
            return Err(Error::Argument(format!(
                "samples must be at least 100, got {samples}"
            )));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::Argument(format!(
                "confidence must lie in (0, 1), got {confidence}"
            )));
        }
        Ok(Self {
            samples,
            seed,
            confidence,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub bounds: Selection,
    /// Golden-section tolerance for the new bound.
    pub tol: f64,
    pub trunc_nats: f64,
    pub mc: Option<McConfig>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bounds: Selection::all(),
            tol: NewBoundOptions::default().tol_x,
            trunc_nats: DEFAULT_TRUNCATION_NATS,
            mc: None,
        }
    }
}

/// One table cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Value(f64),
    /// The method exists but its applicability condition fails.
    Na,
    /// Not computed or no reference available.
    Empty,
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            _ => None,
        }
    }

    fn from_opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Value)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Value(v) => sci6(*v),
            Cell::Na => "NA".into(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Value(v) => s.serialize_f64(*v),
            Cell::Na => s.serialize_str("NA"),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// Six significant digits in scientific notation, e.g. `8.58793e-02`.
pub fn sci6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.5e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// One row of a sweep; the columns are [`COLUMNS`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub y: f64,
    pub exact: Cell,
    pub chernoff: Cell,
    pub new_lower: Cell,
    pub new_alpha: Cell,
    pub new_delta: Cell,
    pub new_alpha_hat: Cell,
    pub stroock: Cell,
    pub stroock_alpha: Cell,
    pub bo: Cell,
    pub bo_alpha: Cell,
    pub saddlepoint: Cell,
    pub mc_p_hat: Cell,
    pub mc_ci_lo: Cell,
    pub mc_ci_hi: Cell,
}

impl SweepRow {
    fn cells(&self) -> [Cell; 14] {
        [
            self.exact,
            self.chernoff,
            self.new_lower,
            self.new_alpha,
            self.new_delta,
            self.new_alpha_hat,
            self.stroock,
            self.stroock_alpha,
            self.bo,
            self.bo_alpha,
            self.saddlepoint,
            self.mc_p_hat,
            self.mc_ci_lo,
            self.mc_ci_hi,
        ]
    }

    /// CSV fields in column order.
    pub fn record(&self) -> Vec<String> {
        std::iter::once(self.y.to_string())
            .chain(self.cells().iter().map(Cell::csv))
            .collect()
    }

    /// `new_lower ≤ exact ≤ chernoff` on whatever is present, strict when both
    /// ends are present.
    pub fn sandwich_holds(&self) -> bool {
        let (l, e, c) = (
            self.new_lower.value(),
            self.exact.value(),
            self.chernoff.value(),
        );
        let le = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => a < b,
            _ => true,
        };
        le(l, e) && le(e, c) && le(l, c)
    }
}

impl Serialize for SweepRow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(COLUMNS.len()))?;
        map.serialize_entry(COLUMNS[0], &self.y)?;
        for (name, cell) in COLUMNS[1..].iter().zip(self.cells()) {
            map.serialize_entry(name, &cell)?;
        }
        map.end()
    }
}

/// Full results behind one row.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub row: SweepRow,
    pub new: Option<BoundResult>,
    pub stroock: Option<BoundResult>,
    pub bo: Option<BoundResult>,
    pub saddlepoint: Option<SaddlepointEstimate>,
    pub mc: Option<McEstimate>,
}

fn lower_cells(r: &BoundResult) -> (Cell, Cell) {
    match r.status {
        BoundStatus::Ok => (
            Cell::from_opt(r.value.map(|v| v.clamp(0.0, 1.0))),
            Cell::from_opt(r.alpha_opt),
        ),
        _ => (Cell::Na, Cell::Na),
    }
}

/// Evaluates every selected method at `y`. `stream` picks the Monte Carlo substream.
pub fn evaluate_point(
    model: &CumulantModel,
    y: f64,
    stream: u64,
    settings: &Settings,
) -> Result<PointReport> {
    if !(y > model.mean) {
        return Err(Error::Argument(format!(
            "y must exceed the mean ({})",
            model.mean
        )));
    }
    let on = |m| settings.bounds.contains(m);
    let mut row = SweepRow {
        y,
        exact: Cell::Empty,
        chernoff: Cell::Empty,
        new_lower: Cell::Empty,
        new_alpha: Cell::Empty,
        new_delta: Cell::Empty,
        new_alpha_hat: Cell::Empty,
        stroock: Cell::Empty,
        stroock_alpha: Cell::Empty,
        bo: Cell::Empty,
        bo_alpha: Cell::Empty,
        saddlepoint: Cell::Empty,
        mc_p_hat: Cell::Empty,
        mc_ci_lo: Cell::Empty,
        mc_ci_hi: Cell::Empty,
    };
    if on(Method::Exact) {
        row.exact = Cell::Value(exact_tail(model, y));
    }
    if on(Method::Chernoff) {
        row.chernoff = Cell::Value(chernoff_upper(model, y, Tail::Right)?);
    }
    let new = if on(Method::New) {
        let r = lower_bound_new_with(
            model,
            y,
            &NewBoundOptions {
                tol_x: settings.tol,
            },
        )?;
        (row.new_lower, row.new_alpha) = lower_cells(&r);
        row.new_delta = Cell::from_opt(r.delta_opt);
        row.new_alpha_hat = Cell::from_opt(r.alpha_hat);
        Some(r)
    } else {
        None
    };
    let stroock = if on(Method::Stroock) {
        let r = stroock_lower(model, y)?;
        (row.stroock, row.stroock_alpha) = lower_cells(&r);
        Some(r)
    } else {
        None
    };
    let bo = if on(Method::Bo) {
        let r = bo_lower(model, y)?;
        (row.bo, row.bo_alpha) = lower_cells(&r);
        Some(r)
    } else {
        None
    };
    let saddlepoint = if on(Method::Saddlepoint) {
        let s = saddlepoint_tail_with(model, y, settings.trunc_nats)?;
        row.saddlepoint = Cell::Value(s.value);
        Some(s)
    } else {
        None
    };
    let mc = match settings.mc {
        Some(cfg) => {
            let e = estimate_tail(model.spec, cfg.seed, stream, cfg.samples, y, cfg.confidence)?;
            row.mc_p_hat = Cell::Value(e.p_hat);
            row.mc_ci_lo = Cell::Value(e.ci_lo);
            row.mc_ci_hi = Cell::Value(e.ci_hi);
            Some(e)
        }
        None => None,
    };
    Ok(PointReport {
        row,
        new,
        stroock,
        bo,
        saddlepoint,
        mc,
    })
}

/// One row per grid point. `parallel > 1` computes rows on that many threads;
/// output is identical to the serial result.
pub fn sweep(
    model: &CumulantModel,
    grid: &Grid,
    settings: &Settings,
    parallel: usize,
) -> Result<Vec<SweepRow>> {
    if !(grid.min > model.mean) {
        return Err(Error::Argument(format!(
            "y must exceed the mean ({})",
            model.mean
        )));
    }
    let points = grid.points();
    let row = |(i, &y): (usize, &f64)| evaluate_point(model, y, i as u64, settings).map(|p| p.row);
    if parallel <= 1 {
        return points.iter().enumerate().map(row).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(|| points.par_iter().enumerate().map(row).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Argument(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

fn io_err(e: impl fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS).map_err(io_err)?;
            for r in rows {
                w.write_record(r.record()).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
    }
}

/// Renders a single-point report as `key = value` lines.
pub fn render_point(model: &CumulantModel, report: &PointReport) -> String {
    let mut s = String::new();
    let row = &report.row;
    let mut line = |k: &str, v: String| s.push_str(&format!("{k:<16}{v}\n"));
    line("dist", model.name.clone());
    line("mean", model.mean.to_string());
    line("y", row.y.to_string());
    for (name, cell) in COLUMNS[1..12].iter().zip(row.cells()) {
        if cell != Cell::Empty {
            line(name, cell.csv());
        }
    }
    if let Some(r) = &report.new {
        if let Some(c) = &r.cross_check {
            line("cross_alpha", sci6(c.alpha));
            line("cross_g", sci6(c.g));
            line("cross_agrees", c.agrees.to_string());
        }
        line("new_evals", r.evals.to_string());
    }
    if let Some(sp) = &report.saddlepoint {
        if sp.truncation_warning {
            line(
                "warning",
                format!("saddlepoint truncated at T = {}", sp.upper_limit),
            );
        }
        if sp.depth_limited {
            line("warning", "saddlepoint quadrature hit its depth cap".into());
        }
    }
    if let Some(e) = &report.mc {
        line("mc_p_hat", sci6(e.p_hat));
        line("mc_ci", format!("[{}, {}]", sci6(e.ci_lo), sci6(e.ci_hi)));
    }
    s
}

/// Monte Carlo estimate with consistency verdicts against the bounds.
///
/// Bounds and verdicts are absent when `y` is not above the mean.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct McReport {
    pub dist: String,
    pub estimate: McEstimate,
    pub exact: f64,
    pub chernoff: Option<f64>,
    pub new_lower: Option<f64>,
    /// `ci_lo ≤ chernoff`.
    pub upper_consistent: Option<bool>,
    /// `ci_hi ≥ new_lower`.
    pub lower_consistent: Option<bool>,
    pub exact_in_interval: bool,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.upper_consistent != Some(false) && self.lower_consistent != Some(false)
    }
}

pub fn mc_report(spec: DistributionSpec, y: f64, cfg: &McConfig) -> Result<McReport> {
    let model = CumulantModel::new(spec)?;
    let (chernoff, new_lower) = if y > model.mean {
        let new = lower_bound_new_with(&model, y, &NewBoundOptions::default())?;
        (Some(chernoff_upper(&model, y, Tail::Right)?), new.value)
    } else {
        (None, None)
    };
    let estimate = estimate_tail(spec, cfg.seed, 0, cfg.samples, y, cfg.confidence)?;
    let exact = exact_tail(&model, y);
    Ok(McReport {
        dist: model.name.clone(),
        exact,
        chernoff,
        new_lower,
        upper_consistent: chernoff.map(|c| estimate.ci_lo <= c),
        lower_consistent: new_lower.map(|l| estimate.ci_hi >= l),
        exact_in_interval: estimate.contains(exact),
        estimate,
    })
}

pub fn render_mc(r: &McReport) -> String {
    let e = &r.estimate;
    let verdict = |b: bool| if b { "pass" } else { "FAIL" };
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k:<16}{v}\n"));
    line("dist", r.dist.clone());
    line("y", e.y.to_string());
    line("samples", e.n.to_string());
    line("hits", e.hits.to_string());
    line("p_hat", sci6(e.p_hat));
    line(
        "ci",
        format!("[{}, {}] at {}", sci6(e.ci_lo), sci6(e.ci_hi), e.confidence),
    );
    line("exact", sci6(r.exact));
    if let Some(c) = r.chernoff {
        line("chernoff", sci6(c));
    }
    if let Some(l) = r.new_lower {
        line("new_lower", sci6(l));
    }
    if let Some(b) = r.upper_consistent {
        line("ci_lo<=chernoff", verdict(b).into());
    }
    if let Some(b) = r.lower_consistent {
        line("ci_hi>=new", verdict(b).into());
    }
    line("exact_in_ci", verdict(r.exact_in_interval).into());
    s
}

pub fn default_mc(samples: usize, seed: u64) -> Result<McConfig> {
    McConfig::new(samples, seed, DEFAULT_CONFIDENCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci6_format() {
        assert_eq!(sci6(0.0858793), "8.58793e-02");
        assert_eq!(sci6(1.0), "1.00000e+00");
        assert_eq!(sci6(1.234567e-120), "1.23457e-120");
        assert_eq!(sci6(0.0), "0.00000e+00");
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "10:40:61".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 61);
        assert_eq!((p[0], p[60]), (10.0, 40.0));
        assert!((p[1] - 10.5).abs() < 1e-12);
        assert_eq!("1:2:2".parse::<Grid>().unwrap().points(), vec![1.0, 2.0]);
        assert!("1:2:1".parse::<Grid>().is_err());
        assert!("2:1:5".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
    }

    #[test]
    fn selection_parsing() {
        let s: Selection = "chernoff,new".parse().unwrap();
        assert!(s.contains(Method::Chernoff) && s.contains(Method::New));
        assert!(!s.contains(Method::Stroock));
        assert!("chernoff,foo".parse::<Selection>().is_err());
        assert_eq!("all".parse::<Selection>().unwrap(), Selection::all());
    }

    #[test]
    fn gamma_point_row() {
        let m: CumulantModel = "gamma:8,1".parse().unwrap();
        let p = evaluate_point(&m, 16.0, 0, &Settings::default()).unwrap();
        assert!(p.row.sandwich_holds());
        assert!((p.row.chernoff.value().unwrap() - 0.085879).abs() < 1e-6);
        assert_eq!(p.row.mc_p_hat, Cell::Empty);
        let rec = p.row.record();
        assert_eq!(rec.len(), COLUMNS.len());
        assert_eq!(rec[12], "");
    }

    #[test]
    fn exponential_stroock_is_na() {
        let m: CumulantModel = "exp:1".parse().unwrap();
        let p = evaluate_point(&m, 5.0, 0, &Settings::default()).unwrap();
        assert_eq!(p.row.stroock, Cell::Na);
        assert_eq!(p.row.record()[7], "NA");
        assert!(p.row.new_lower.value().unwrap() > 0.0);
    }

    #[test]
    fn column_selection_leaves_others_empty() {
        let m: CumulantModel = "gamma:8,1".parse().unwrap();
        let settings = Settings {
            bounds: "chernoff,new".parse().unwrap(),
            ..Settings::default()
        };
        let r = evaluate_point(&m, 16.0, 0, &settings).unwrap().row;
        assert!(r.chernoff.value().is_some() && r.new_lower.value().is_some());
        for c in [r.exact, r.stroock, r.bo, r.saddlepoint] {
            assert_eq!(c, Cell::Empty);
        }
    }

    #[test]
    fn json_row_uses_column_names() {
        let m: CumulantModel = "exp:1".parse().unwrap();
        let r = evaluate_point(&m, 3.0, 0, &Settings::default())
            .unwrap()
            .row;
        let v = serde_json::to_value(&r).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.len(), COLUMNS.len());
        assert_eq!(obj["stroock"], "NA");
        assert!(obj["mc_p_hat"].is_null());
        assert_eq!(
            obj["chernoff"].as_f64().unwrap(),
            r.chernoff.value().unwrap()
        );
    }

    #[test]
    fn below_mean_rejected() {
        let m: CumulantModel = "gamma:8,1".parse().unwrap();
        let e = evaluate_point(&m, 8.0, 0, &Settings::default()).unwrap_err();
        assert_eq!(e.to_string(), "y must exceed the mean (8)");
        assert!(McConfig::new(99, 1, 0.999).is_err());
    }
}
