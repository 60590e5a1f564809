//! Run configuration: one JSON document, every field defaulted, plus the
//! small text formats the command line accepts (grids and curve CSV).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::curvekit::builtin::{cubic, example31, fuzz_curve, FuzzParams};
use crate::curvekit::spline::SplineCurve;
use crate::curvekit::{linspace, reparameterize_by_arclength, CurveSpec};
use crate::error::GeomError;
use crate::semialgebra::{MetricContext, SemiQuaternion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(String),
    #[error("invalid grid '{text}': {reason}")]
    Grid { text: String, reason: String },
    #[error("tolerance '{name}' must be positive and finite, got {value}")]
    Tolerance { name: String, value: f64 },
    #[error("unknown curve '{0}' (expected example31, cubic, fuzz:<seed>, or a .csv path)")]
    UnknownCurve(String),
    #[error("curve CSV line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{0}")]
    Geometry(#[from] GeomError),
    #[error("invalid value for {field}: {reason}")]
    Value { field: &'static str, reason: String },
}

/// Sample grid `min:max:count`, both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self, ConfigError> {
        let text = format!("{min}:{max}:{count}");
        let bad = |reason: &str| ConfigError::Grid { text: text.clone(), reason: reason.into() };
        if !min.is_finite() || !max.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        if min >= max {
            return Err(bad("need min < max"));
        }
        if count < 2 {
            return Err(bad("need at least 2 samples"));
        }
        Ok(Self { min, max, count })
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.count)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self { min: -1.0, max: 1.0, count: 21 }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}

/// Parses `a:b:n`.
pub fn parse_grid(text: &str) -> Result<Grid, ConfigError> {
    let bad = |reason: &str| ConfigError::Grid { text: text.to_string(), reason: reason.into() };
    let parts: Vec<&str> = text.trim().split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(bad("expected three fields a:b:n"));
    };
    let a: f64 = a.trim().parse().map_err(|_| bad("lower bound is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| bad("upper bound is not a number"))?;
    let n: usize = n.trim().parse().map_err(|_| bad("count is not a non-negative integer"))?;
    Grid::new(a, b, n)
}

impl FromStr for Grid {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grid(s)
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_grid(&text).map_err(serde::de::Error::custom)
    }
}

/// `"default"`, `"paper24"`, or an explicit metric object.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSetting(pub MetricContext);

impl Default for MetricSetting {
    fn default() -> Self {
        Self(MetricContext::default())
    }
}

impl MetricSetting {
    pub fn named(name: &str) -> Result<Self, ConfigError> {
        match name {
            "default" => Ok(Self(MetricContext::default())),
            "paper24" => Ok(Self(MetricContext::paper24())),
            other => Err(ConfigError::Value { field: "metric", reason: format!("unknown preset '{other}'") }),
        }
    }
}

impl Serialize for MetricSetting {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MetricSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Explicit(MetricContext),
        }
        match Raw::deserialize(d)? {
            Raw::Name(n) => Self::named(&n).map_err(serde::de::Error::custom),
            Raw::Explicit(m) => Ok(Self(m)),
        }
    }
}

/// Which curve to run on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveChoice {
    /// `example31`, `cubic`, or `fuzz:<seed>`.
    Builtin(String),
    Csv {
        csv: PathBuf,
        /// Reparameterize by arc length after interpolation.
        #[serde(default)]
        reparameterize: bool,
        /// Finite-difference step; defaults from the sample spacing.
        #[serde(default)]
        step: Option<f64>,
    },
}

impl Default for CurveChoice {
    fn default() -> Self {
        Self::Builtin("example31".into())
    }
}

impl CurveChoice {
    /// A `--curve` argument: names ending in `.csv` are files.
    pub fn from_arg(arg: &str) -> Self {
        if arg.to_ascii_lowercase().ends_with(".csv") {
            Self::Csv { csv: arg.into(), reparameterize: false, step: None }
        } else {
            Self::Builtin(arg.into())
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Builtin(n) => n.clone(),
            Self::Csv { csv, .. } => csv.display().to_string(),
        }
    }

    pub fn build(&self, ctx: &MetricContext) -> Result<CurveSpec, ConfigError> {
        match self {
            Self::Builtin(name) => builtin_curve(name, ctx),
            Self::Csv { csv, reparameterize, step } => {
                let text = read_text(csv)?;
                let spline = parse_curve_csv(&text)?;
                let curve = spline.into_curve(*step)?;
                if *reparameterize {
                    Ok(reparameterize_by_arclength(&curve, 1e-10, ctx, *step)?.curve)
                } else {
                    Ok(curve)
                }
            }
        }
    }
}

fn builtin_curve(name: &str, ctx: &MetricContext) -> Result<CurveSpec, ConfigError> {
    match name {
        "example31" => Ok(example31()),
        "cubic" => Ok(cubic()),
        _ => match name.strip_prefix("fuzz:").map(str::parse::<u64>) {
            Some(Ok(seed)) => Ok(fuzz_curve(FuzzParams::from_seed(seed, ctx), ctx)),
            _ => Err(ConfigError::UnknownCurve(name.into())),
        },
    }
}

fn read_text(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })
}

/// Parses curve samples with header `s,q1,q2,q3,q4` into an interpolating
/// spline.
pub fn parse_curve_csv(text: &str) -> Result<SplineCurve, ConfigError> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| ConfigError::Csv { line: 1, reason: e.to_string() })?;
    if header.iter().collect::<Vec<_>>() != ["s", "q1", "q2", "q3", "q4"] {
        return Err(ConfigError::Csv { line: 1, reason: "header must be s,q1,q2,q3,q4".into() });
    }
    let mut s = Vec::new();
    let mut q = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            ConfigError::Csv { line, reason: e.to_string() }
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let mut vals = [0.0; 5];
        for (i, v) in vals.iter_mut().enumerate() {
            let field = &rec[i];
            *v = field
                .parse()
                .ok()
                .filter(|x: &f64| x.is_finite())
                .ok_or_else(|| ConfigError::Csv { line, reason: format!("'{field}' is not a finite number") })?;
        }
        s.push(vals[0]);
        q.push(SemiQuaternion::new(vals[1], vals[2], vals[3], vals[4]));
    }
    SplineCurve::new(s, q).map_err(|e| ConfigError::Csv { line: 0, reason: e.to_string() })
}

/// Writes `s,q1,q2,q3,q4` rows for a curve over a grid.
pub fn write_curve_csv<W: std::io::Write>(curve: &CurveSpec, grid: &[f64], out: W) -> Result<(), ConfigError> {
    let io = |e: csv::Error| ConfigError::Io { path: "<output>".into(), reason: e.to_string() };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "q1", "q2", "q3", "q4"]).map_err(io)?;
    for &s in grid {
        let p = curve.position(s)?;
        w.write_record([s, p.q1, p.q2, p.q3, p.q4].map(crate::format_real)).map_err(io)?;
    }
    w.flush().map_err(|e| ConfigError::Io { path: "<output>".into(), reason: e.to_string() })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(ConfigError::Value { field: "format", reason: format!("'{s}' is not csv or json") }),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Target file or directory; standard output when absent.
    pub path: Option<PathBuf>,
    /// Absent means the command's own default: JSON for reports, CSV for tables.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl OutputSpec {
    pub fn format_or(&self, default: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(default)
    }
}

/// Named tolerances of the verification suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub apparatus_analytic: f64,
    pub apparatus_fd: f64,
    pub distance_analytic: f64,
    pub distance_fd: f64,
    pub tangency: f64,
    pub ode_analytic: f64,
    pub ode_fd: f64,
    pub transfer_frame: f64,
    pub transfer_curvature: f64,
    pub w_curve_frame: f64,
    pub orthogonality: f64,
    pub h_t_tstar: f64,
    pub associated_shape: f64,
    pub spatial_curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            apparatus_analytic: 1e-9,
            apparatus_fd: 1e-4,
            distance_analytic: 1e-8,
            distance_fd: 1e-5,
            tangency: 1e-8,
            ode_analytic: 1e-8,
            ode_fd: 1e-4,
            transfer_frame: 1e-4,
            transfer_curvature: 1e-3,
            w_curve_frame: 1e-6,
            orthogonality: 1e-8,
            h_t_tstar: 1e-6,
            associated_shape: 1e-4,
            spatial_curvature: 1e-6,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), ConfigError> {
        let value = serde_json::to_value(self).map_err(|e| ConfigError::Json(e.to_string()))?;
        for (name, v) in value.as_object().into_iter().flatten() {
            let x = v.as_f64().unwrap_or(f64::NAN);
            if !(x.is_finite() && x > 0.0) {
                return Err(ConfigError::Tolerance { name: name.clone(), value: x });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub metric: MetricSetting,
    pub curve: CurveChoice,
    /// Involute constant.
    pub c: f64,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub output: OutputSpec,
    /// α at s = `anchor_s`.
    pub alpha_anchor: [f64; 3],
    /// β at s = `anchor_s`; `(c, c, c)` when absent.
    pub beta_anchor: Option<[f64; 3]>,
    pub anchor_s: f64,
    /// Random fuzz curves in the verification suites.
    pub fuzz_count: usize,
    pub fuzz_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            metric: MetricSetting::default(),
            curve: CurveChoice::default(),
            c: 2.0,
            grid: Grid::default(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
            alpha_anchor: [0.0, 0.0, -std::f64::consts::SQRT_2],
            beta_anchor: None,
            anchor_s: 0.0,
            fuzz_count: 10,
            fuzz_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        Grid::new(self.grid.min, self.grid.max, self.grid.count)?;
        self.tolerances.validate()?;
        if !self.c.is_finite() {
            return Err(ConfigError::Value { field: "c", reason: "must be finite".into() });
        }
        let finite = |a: &[f64]| a.iter().all(|x| x.is_finite());
        if !finite(&self.alpha_anchor) || !self.beta_anchor.map_or(true, |b| finite(&b)) || !self.anchor_s.is_finite() {
            return Err(ConfigError::Value { field: "anchor", reason: "must be finite".into() });
        }
        Ok(())
    }

    pub fn ctx(&self) -> MetricContext {
        self.metric.0
    }

    pub fn build_curve(&self) -> Result<CurveSpec, ConfigError> {
        self.curve.build(&self.ctx())
    }

    pub fn alpha_anchor(&self) -> SemiQuaternion {
        let [a, b, c] = self.alpha_anchor;
        SemiQuaternion::spatial(a, b, c)
    }

    pub fn beta_anchor(&self) -> SemiQuaternion {
        let [a, b, c] = self.beta_anchor.unwrap_or([self.c; 3]);
        SemiQuaternion::spatial(a, b, c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(RunConfig::from_json("{}").unwrap(), cfg);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-1:1:21").unwrap(), Grid { min: -1.0, max: 1.0, count: 21 });
        assert_eq!(parse_grid(" 0 : 2.5 : 2 ").unwrap().points(), vec![0.0, 2.5]);
        for bad in ["", "1:2", "1:2:3:4", "2:1:5", "0:1:1", "0:1:-3", "a:1:3", "0:inf:3", "0:1:2.5"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn metric_presets_and_explicit() {
        let cfg = RunConfig::from_json(r#"{"metric": "paper24"}"#).unwrap();
        assert_eq!(cfg.ctx(), MetricContext::paper24());
        let cfg = RunConfig::from_json(r#"{"metric": {"ambient_signs": [1, -1, -1, 1]}}"#).unwrap();
        assert_eq!(cfg.ctx().ambient_signs(), [1, -1, -1, 1]);
        assert!(RunConfig::from_json(r#"{"metric": "euclid"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"metric": {"ambient_signs": [1, 1, 1, 1]}}"#).is_err());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(RunConfig::from_json(r#"{"grid": "1:0:4"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"tolerances": {"tangency": 0}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"tolerances": {"tangency": -1e-3}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour": 1}"#).is_err());
        assert!(RunConfig::from_json("[1, 2]").is_err());
    }

    #[test]
    fn curve_names() {
        let ctx = MetricContext::default();
        assert!(CurveChoice::from_arg("example31").build(&ctx).is_ok());
        assert!(CurveChoice::from_arg("fuzz:7").build(&ctx).is_ok());
        assert!(matches!(CurveChoice::from_arg("fuzz:x").build(&ctx), Err(ConfigError::UnknownCurve(_))));
        assert!(matches!(CurveChoice::from_arg("data/x.CSV"), CurveChoice::Csv { .. }));
        let cfg = RunConfig::from_json(r#"{"curve": {"csv": "nope.csv", "reparameterize": true}}"#).unwrap();
        assert!(matches!(cfg.build_curve(), Err(ConfigError::Io { .. })));
    }

    #[test]
    fn csv_parsing() {
        let mut text = String::from("s,q1,q2,q3,q4\n");
        for i in 0..8 {
            let s = i as f64 * 0.1;
            text.push_str(&format!("{s},{},{},{},1\n", s.cosh(), s, s.sinh()));
        }
        let sp = parse_curve_csv(&text).unwrap();
        assert_eq!(sp.knots().len(), 8);
        assert!(matches!(parse_curve_csv("s,x,q2,q3,q4\n"), Err(ConfigError::Csv { line: 1, .. })));
        let bad = text.replace("0.2,", "0.2x,");
        assert!(matches!(parse_curve_csv(&bad), Err(ConfigError::Csv { line: 4, .. })), "{:?}", parse_curve_csv(&bad));
        let short = "s,q1,q2,q3,q4\n0,1,2,3\n";
        assert!(parse_curve_csv(short).is_err());
        assert!(parse_curve_csv("s,q1,q2,q3,q4\n0,0,0,0,NaN\n").is_err());
    }
}
