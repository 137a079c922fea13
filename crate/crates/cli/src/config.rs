//! Run configuration: a flat JSON document, overridable from the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use ncilw::cms::{Form, IntegratorConfig, Method};
use ncilw::harness::{Experiment, Tolerances};
use ncilw::special::DispersionKind;
use ncilw::spectral::{Dealias, Scheme, SolverConfig};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const OUTPUT_DIR_ENV: &str = "NCILW_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "ncilw-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Simulate,
    Compare,
    Poles,
    Conserve,
    Dispersion,
    Selftest,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// A complex number written as `"re+imi"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLit(pub Complex64);

impl FromStr for ComplexLit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(ComplexLit)
    }
}

impl fmt::Display for ComplexLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        if im.is_sign_negative() {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

impl Serialize for ComplexLit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ComplexLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `a+bi`, `a-bi`, `bi`, `a`, `i`, `-i` with optional whitespace.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex literal `{s}` (expected e.g. \"-4+3.77i\")");
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let b = body.as_bytes();
    let split = (1..b.len())
        .rev()
        .find(|&j| (b[j] == b'+' || b[j] == b'-') && !matches!(b[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (num(&body[..j])?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => num(x)?,
    };
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Every parameter of a run. Unset optional keys take mode-dependent defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    /// Strip width.
    pub delta: f64,
    /// Spatial period; selects the elliptic kernel when set.
    pub period: Option<f64>,
    /// Pole seeds `a_j`.
    pub a: Vec<ComplexLit>,
    /// Output times, strictly increasing.
    pub times: Vec<f64>,
    /// Grid length; defaults to `period` when that is set.
    pub length: Option<f64>,
    /// Grid points `2N`.
    pub points: usize,
    pub dt: f64,
    pub scheme: Scheme,
    pub dealias: Dealias,
    /// End of a solver run measured from its initial time.
    pub t_end: Option<f64>,
    /// Solver steps between stored snapshots.
    pub output_stride: Option<usize>,
    pub form: Form,
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    /// Field JSON used as initial data instead of the pole seeds.
    pub initial: Option<PathBuf>,
    pub dispersion: DispersionKind,
    pub k: Vec<f64>,
    pub experiments: Vec<Experiment>,
    pub output_dir: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        let integ = IntegratorConfig::default();
        RunConfig {
            mode: None,
            delta: 1.0,
            period: None,
            a: Vec::new(),
            times: Vec::new(),
            length: None,
            points: 1024,
            dt: 5e-4,
            scheme: Scheme::Ifrk4,
            dealias: Dealias::ConvolutionB4,
            t_end: None,
            output_stride: None,
            form: Form::Backlund,
            method: integ.method,
            rtol: 1e-12,
            atol: 1e-12,
            initial: None,
            dispersion: DispersionKind::Ilw,
            k: Vec::new(),
            experiments: Vec::new(),
            output_dir: None,
            tolerances: Tolerances::default(),
        }
    }
}

fn field_err(field: &str, msg: impl fmt::Display) -> anyhow::Error {
    anyhow!("config field `{field}`: {msg}")
}

impl RunConfig {
    /// Parses a JSON document; errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| anyhow!("config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn seeds(&self) -> Vec<Complex64> {
        self.a.iter().map(|c| c.0).collect()
    }

    pub fn grid_length(&self) -> f64 {
        self.length.or(self.period).unwrap_or(200.0)
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            method: self.method,
            rtol: self.rtol,
            atol: self.atol,
            dt_init: if self.method == Method::FixedRk4 {
                self.dt
            } else {
                IntegratorConfig::default().dt_init
            },
            ..Default::default()
        }
    }

    pub fn solver(&self) -> SolverConfig {
        let d = SolverConfig::default();
        let t_end = self
            .t_end
            .or_else(|| self.times.last().copied())
            .unwrap_or(d.t_end);
        SolverConfig {
            dt: self.dt,
            scheme: self.scheme,
            dealias: self.dealias,
            t_end,
            output_stride: self
                .output_stride
                .unwrap_or_else(|| ((t_end / self.dt).ceil() as usize / 8).max(1)),
        }
    }

    /// Sets one tolerance from `name=value`.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<()> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| anyhow!("tolerance override `{assignment}` is not name=value"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("tolerance `{name}`: `{value}` is not a number"))?;
        let mut map = serde_json::to_value(&self.tolerances)?;
        let slot = map
            .get_mut(name.trim())
            .ok_or_else(|| anyhow!("unknown tolerance `{name}`"))?;
        *slot = serde_json::json!(value);
        self.tolerances = serde_json::from_value(map)?;
        Ok(())
    }

    /// Physical and numerical constraints independent of the mode.
    pub fn validate(&self) -> Result<()> {
        let d = self.delta;
        if !(d.is_finite() && d > 0.0) {
            return Err(field_err("delta", format!("must be positive, got {d}")));
        }
        if let Some(p) = self.period {
            if !(p.is_finite() && p > 0.0) {
                return Err(field_err("period", format!("must be positive, got {p}")));
            }
            if let Some(l) = self.length {
                if l != p {
                    return Err(field_err(
                        "length",
                        format!("must equal the period {p} for periodic solutions, got {l}"),
                    ));
                }
            }
        }
        if let Some(l) = self.length {
            if !(l.is_finite() && l > 0.0) {
                return Err(field_err("length", format!("must be positive, got {l}")));
            }
        }
        if !(self.points >= 4 && self.points.is_power_of_two()) {
            return Err(field_err(
                "points",
                format!("must be a power of two >= 4, got {}", self.points),
            ));
        }
        for (j, c) in self.a.iter().enumerate() {
            let z = c.0;
            if !(z.im > 0.5 * d && z.im < 1.5 * d) {
                return Err(field_err(
                    &format!("a[{j}]"),
                    format!("Im {} outside the window ({}, {})", z.im, 0.5 * d, 1.5 * d),
                ));
            }
            if let Some(p) = self.period {
                if !(z.re >= -0.5 * p && z.re < 0.5 * p) {
                    return Err(field_err(
                        &format!("a[{j}]"),
                        format!("Re {} outside [{}, {})", z.re, -0.5 * p, 0.5 * p),
                    ));
                }
            }
            if self.a[..j].iter().any(|b| b.0 == z) {
                return Err(field_err(&format!("a[{j}]"), "duplicate seed"));
            }
        }
        if !self.times.iter().all(|t| t.is_finite()) {
            return Err(field_err("times", "must be finite"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(field_err("times", "must be strictly increasing"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(field_err(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if let Some(t) = self.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return Err(field_err("t_end", format!("must be non-negative, got {t}")));
            }
        }
        if self.output_stride == Some(0) {
            return Err(field_err("output_stride", "must be at least 1"));
        }
        for (name, x) in [("rtol", self.rtol), ("atol", self.atol)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(field_err(name, format!("must be positive, got {x}")));
            }
        }
        if !self.k.iter().all(|k| k.is_finite()) {
            return Err(field_err("k", "must be finite"));
        }
        Ok(())
    }

    /// Requirements specific to `mode`.
    pub fn validate_for(&self, mode: Mode) -> Result<()> {
        let need_seeds = matches!(mode, Mode::Exact | Mode::Compare | Mode::Poles)
            || (matches!(mode, Mode::Simulate | Mode::Conserve) && self.initial.is_none());
        if need_seeds && self.a.is_empty() {
            bail!("{mode}: no pole seeds given (use --a or the `a` key)");
        }
        if mode == Mode::Dispersion && self.k.is_empty() {
            bail!("dispersion: no wavenumbers given (use --k or the `k` key)");
        }
        Ok(())
    }

    /// Flag value, then the environment, then the config file, then the default.
    pub fn resolve_output_dir(&mut self, flag: Option<PathBuf>) -> PathBuf {
        let env = std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        let dir = flag
            .or(env)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        self.output_dir = Some(dir.clone());
        dir
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("-4+3.77i", c(-4.0, 3.77)),
            ("3 + 2.67i", c(3.0, 2.67)),
            (" 1.5 - 2i ", c(1.5, -2.0)),
            ("2i", c(0.0, 2.0)),
            ("-i", c(0.0, -1.0)),
            ("1+i", c(1.0, 1.0)),
            ("7", c(7.0, 0.0)),
            ("1e-3-2.5E+1i", c(1e-3, -25.0)),
            ("-1e2+1e-2i", c(-100.0, 0.01)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "i2", "1+2j", "abc", "1++2i", "nan+1i"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn literal_round_trip() {
        for z in [
            c(-4.0, 1.2 * std::f64::consts::PI),
            c(0.1, -0.0),
            c(1e-300, 3e10),
        ] {
            let s = ComplexLit(z).to_string();
            let back = parse_complex(&s).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits(), "{s}");
            assert_eq!(back.im.to_bits(), z.im.to_bits(), "{s}");
        }
    }

    #[test]
    fn config_echoes_back() {
        let text = r#"{"mode": "exact", "delta": 3.14159, "a": ["-4+3.77i", "3 + 2.67i"],
                       "times": [0, 2.25], "tolerances": {"swap": 0.01}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.a[1].0, c(3.0, 2.67));
        assert_eq!(cfg.tolerances.swap, 0.01);
        let again = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_json(), cfg.to_json());
    }

    #[test]
    fn parse_errors_name_the_location() {
        let e = RunConfig::from_json("{\n  \"delta\": 1,\n  \"bogus\": 2\n}").unwrap_err();
        let msg = format!("{e:#}");
        assert!(msg.contains("bogus") && msg.contains("line 3"), "{msg}");
        let e = RunConfig::from_json(r#"{"a": ["1+2j"]}"#).unwrap_err();
        assert!(format!("{e:#}").contains("1+2j"));
    }

    #[test]
    fn physical_constraints() {
        let bad = [
            (r#"{"delta": 0}"#, "delta"),
            (r#"{"delta": -1}"#, "delta"),
            (r#"{"points": 1000}"#, "points"),
            (r#"{"delta": 1, "a": ["0+0.4i"]}"#, "a[0]"),
            (r#"{"delta": 1, "a": ["0+1.2i", "0+1.6i"]}"#, "a[1]"),
            (r#"{"delta": 1, "period": 10, "a": ["5+1i"]}"#, "a[0]"),
            (r#"{"delta": 1, "a": ["1+1i", "1+1i"]}"#, "a[1]"),
            (r#"{"times": [0, 1, 1]}"#, "times"),
            (r#"{"period": 10, "length": 20}"#, "length"),
        ];
        for (text, field) in bad {
            let e = RunConfig::from_json(text).unwrap_err().to_string();
            assert!(e.contains(&format!("`{field}`")), "{text}: {e}");
        }
    }

    #[test]
    fn tolerance_overrides() {
        let mut cfg = RunConfig::default();
        cfg.set_tolerance("residual=1e-6").unwrap();
        assert_eq!(cfg.tolerances.residual, 1e-6);
        assert!(cfg.set_tolerance("nonsense=1").is_err());
        assert!(cfg.set_tolerance("residual").is_err());
        assert!(cfg.set_tolerance("residual=x").is_err());
    }
}
