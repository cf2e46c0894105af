//! JSON run configuration: parsing with strict key checking (unknown keys
//! are errors, with a nearest-match suggestion), documented defaults, and
//! assembly into a ready-to-run simulation.
//!
//! Minimal config:
//!
//! ```json
//! { "form": "nh", "gamma": 1.5, "lambda": 1.0 }
//! ```
//!
//! fills in the reference grid (`dim 1, n 2048, half_width 30`), stepping
//! (`dt 5e-4, t_final 1, stride 10`), and the reference wave packet
//! (Gaussian at center 1 with wavenumber 0.5 and width `1/sqrt(2)`, i.e.
//! `exp(i x / 2) exp(-(x-1)^2)`).

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use crate::grid::{Grid, Vec2, WaveField};
use crate::io;
use crate::kernels::PotentialSpec;
use crate::solver::{to_com_frame, EquationSpec, SimulationRun, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown key `{key}` at {at}{}", suggestion.as_deref().map(|s| format!("; did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey {
        at: String,
        key: String,
        suggestion: Option<String>,
    },
    #[error("missing key `{key}` at {at}")]
    MissingKey { at: String, key: String },
    #[error("key `{at}` has the wrong type; expected {expected}")]
    WrongType { at: String, expected: &'static str },
    #[error("value {value} for `{at}` is out of range; admissible: {admissible}")]
    Range {
        at: String,
        value: String,
        admissible: String,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Snapshot(#[from] io::IoError),
}

/// Equation selector, as written in the `form` key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormName {
    Nh,
    Gh,
    Mgh,
    Harmonic,
    Log,
}

impl FormName {
    fn parse(s: &str, at: &str) -> Result<Self, ConfigError> {
        match s.to_ascii_lowercase().as_str() {
            "nh" => Ok(FormName::Nh),
            "gh" => Ok(FormName::Gh),
            "mgh" => Ok(FormName::Mgh),
            "harmonic" | "2h" => Ok(FormName::Harmonic),
            "log" | "logh" => Ok(FormName::Log),
            other => Err(ConfigError::Range {
                at: at.into(),
                value: format!("\"{other}\""),
                admissible: "one of \"nh\", \"gh\", \"mgh\", \"harmonic\", \"log\"".into(),
            }),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            FormName::Nh => "nh",
            FormName::Gh => "gh",
            FormName::Mgh => "mgh",
            FormName::Harmonic => "harmonic",
            FormName::Log => "log",
        }
    }
}

/// Initial datum: a Gaussian wave packet or a stored snapshot.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Gaussian {
        center: Vec2,
        wavenumber: Vec2,
        width: f64,
    },
    Snapshot {
        path: String,
    },
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub form: FormName,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub eta: Option<f64>,
    pub zeta: Option<f64>,
    pub initial: InitialData,
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub snapshot_stride: Option<usize>,
    pub output_dir: String,
    pub preset: Option<String>,
}

pub const DEFAULT_N: usize = 2048;
pub const DEFAULT_HALF_WIDTH: f64 = 30.0;
pub const DEFAULT_DT: f64 = 5e-4;
pub const DEFAULT_T_FINAL: f64 = 1.0;
pub const DEFAULT_STRIDE: usize = 10;

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn suggest(key: &str, known: &[&str]) -> Option<String> {
    known
        .iter()
        .map(|k| (levenshtein(key, k), *k))
        .min()
        .filter(|(d, _)| *d <= 3)
        .map(|(_, k)| k.to_string())
}

fn check_keys(
    obj: &serde_json::Map<String, Value>,
    known: &[&str],
    at: &str,
) -> Result<(), ConfigError> {
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey {
                at: at.into(),
                key: key.clone(),
                suggestion: suggest(key, known),
            });
        }
    }
    Ok(())
}

fn get_f64(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    at: &str,
) -> Result<Option<f64>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or(ConfigError::WrongType {
            at: format!("{at}.{key}"),
            expected: "number",
        }),
    }
}

fn get_usize(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    at: &str,
) -> Result<Option<usize>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or(ConfigError::WrongType {
                at: format!("{at}.{key}"),
                expected: "nonnegative integer",
            }),
    }
}

fn get_str<'a>(
    obj: &'a serde_json::Map<String, Value>,
    key: &str,
    at: &str,
) -> Result<Option<&'a str>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v.as_str().map(Some).ok_or(ConfigError::WrongType {
            at: format!("{at}.{key}"),
            expected: "string",
        }),
    }
}

fn get_vec2(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    at: &str,
    dim: usize,
) -> Result<Option<Vec2>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Array(items)) => {
            if items.len() != dim {
                return Err(ConfigError::Range {
                    at: format!("{at}.{key}"),
                    value: format!("array of {}", items.len()),
                    admissible: format!("array of length dim = {dim}"),
                });
            }
            let mut out = [0.0; 2];
            for (i, item) in items.iter().enumerate() {
                out[i] = item.as_f64().ok_or(ConfigError::WrongType {
                    at: format!("{at}.{key}[{i}]"),
                    expected: "number",
                })?;
            }
            Ok(Some(out))
        }
        Some(_) => Err(ConfigError::WrongType {
            at: format!("{at}.{key}"),
            expected: "array of numbers",
        }),
    }
}

const TOP_KEYS: &[&str] = &[
    "form",
    "gamma",
    "lambda",
    "eta",
    "zeta",
    "initial",
    "grid",
    "solver",
    "output_dir",
    "preset",
];
const INITIAL_KEYS: &[&str] = &["type", "center", "wavenumber", "width", "path"];
const GRID_KEYS: &[&str] = &["dim", "n", "half_width"];
const SOLVER_KEYS: &[&str] = &["dt", "t_final", "stride", "snapshot_stride"];

/// Parses and validates a config from JSON text.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or(ConfigError::WrongType {
        at: "$".into(),
        expected: "object",
    })?;
    check_keys(obj, TOP_KEYS, "$")?;

    let form_str = get_str(obj, "form", "$")?.ok_or(ConfigError::MissingKey {
        at: "$".into(),
        key: "form".into(),
    })?;
    let form = FormName::parse(form_str, "$.form")?;

    let gamma = get_f64(obj, "gamma", "$")?;
    let lambda = get_f64(obj, "lambda", "$")?;
    let eta = get_f64(obj, "eta", "$")?;
    let zeta = get_f64(obj, "zeta", "$")?;

    match form {
        FormName::Nh | FormName::Gh | FormName::Mgh => {
            let g = gamma.ok_or(ConfigError::MissingKey {
                at: "$".into(),
                key: "gamma".into(),
            })?;
            if !(g > 0.0 && g <= 2.0) {
                return Err(ConfigError::Range {
                    at: "$.gamma".into(),
                    value: g.to_string(),
                    admissible: "the interval (0, 2]".into(),
                });
            }
            let l = lambda.ok_or(ConfigError::MissingKey {
                at: "$".into(),
                key: "lambda".into(),
            })?;
            if l == 0.0 {
                return Err(ConfigError::Range {
                    at: "$.lambda".into(),
                    value: "0".into(),
                    admissible: "any nonzero real".into(),
                });
            }
        }
        FormName::Harmonic => {
            if eta.is_none() || zeta.is_none() {
                return Err(ConfigError::MissingKey {
                    at: "$".into(),
                    key: if eta.is_none() {
                        "eta".into()
                    } else {
                        "zeta".into()
                    },
                });
            }
        }
        FormName::Log => {
            let l = lambda.ok_or(ConfigError::MissingKey {
                at: "$".into(),
                key: "lambda".into(),
            })?;
            if l == 0.0 {
                return Err(ConfigError::Range {
                    at: "$.lambda".into(),
                    value: "0".into(),
                    admissible: "any nonzero real".into(),
                });
            }
        }
    }

    let (dim, n, half_width) = match obj.get("grid") {
        None => (1, DEFAULT_N, DEFAULT_HALF_WIDTH),
        Some(Value::Object(g)) => {
            check_keys(g, GRID_KEYS, "$.grid")?;
            let dim = get_usize(g, "dim", "$.grid")?.unwrap_or(1);
            if dim != 1 && dim != 2 {
                return Err(ConfigError::Range {
                    at: "$.grid.dim".into(),
                    value: dim.to_string(),
                    admissible: "1 or 2".into(),
                });
            }
            let n = get_usize(g, "n", "$.grid")?.unwrap_or(DEFAULT_N);
            if !n.is_power_of_two() || n < 8 {
                return Err(ConfigError::Range {
                    at: "$.grid.n".into(),
                    value: n.to_string(),
                    admissible: "a power of two, at least 8".into(),
                });
            }
            let half_width = get_f64(g, "half_width", "$.grid")?.unwrap_or(DEFAULT_HALF_WIDTH);
            if !(half_width > 0.0) {
                return Err(ConfigError::Range {
                    at: "$.grid.half_width".into(),
                    value: half_width.to_string(),
                    admissible: "positive reals".into(),
                });
            }
            (dim, n, half_width)
        }
        Some(_) => {
            return Err(ConfigError::WrongType {
                at: "$.grid".into(),
                expected: "object",
            })
        }
    };

    let (dt, t_final, stride, snapshot_stride) = match obj.get("solver") {
        None => (DEFAULT_DT, DEFAULT_T_FINAL, DEFAULT_STRIDE, None),
        Some(Value::Object(s)) => {
            check_keys(s, SOLVER_KEYS, "$.solver")?;
            let dt = get_f64(s, "dt", "$.solver")?.unwrap_or(DEFAULT_DT);
            let t_final = get_f64(s, "t_final", "$.solver")?.unwrap_or(DEFAULT_T_FINAL);
            let stride = get_usize(s, "stride", "$.solver")?.unwrap_or(DEFAULT_STRIDE);
            let snapshot_stride = get_usize(s, "snapshot_stride", "$.solver")?;
            if !(dt > 0.0) {
                return Err(ConfigError::Range {
                    at: "$.solver.dt".into(),
                    value: dt.to_string(),
                    admissible: "positive reals".into(),
                });
            }
            if t_final < 0.0 {
                return Err(ConfigError::Range {
                    at: "$.solver.t_final".into(),
                    value: t_final.to_string(),
                    admissible: "nonnegative reals".into(),
                });
            }
            if stride == 0 {
                return Err(ConfigError::Range {
                    at: "$.solver.stride".into(),
                    value: "0".into(),
                    admissible: "integers >= 1".into(),
                });
            }
            (dt, t_final, stride, snapshot_stride)
        }
        Some(_) => {
            return Err(ConfigError::WrongType {
                at: "$.solver".into(),
                expected: "object",
            })
        }
    };

    let initial = match obj.get("initial") {
        None => InitialData::Gaussian {
            center: [1.0, 0.0],
            wavenumber: [0.5, 0.0],
            width: std::f64::consts::FRAC_1_SQRT_2,
        },
        Some(Value::Object(init)) => {
            check_keys(init, INITIAL_KEYS, "$.initial")?;
            match get_str(init, "type", "$.initial")?.unwrap_or("gaussian") {
                "gaussian" => {
                    let width = get_f64(init, "width", "$.initial")?
                        .unwrap_or(std::f64::consts::FRAC_1_SQRT_2);
                    if !(width > 0.0) {
                        return Err(ConfigError::Range {
                            at: "$.initial.width".into(),
                            value: width.to_string(),
                            admissible: "positive reals".into(),
                        });
                    }
                    InitialData::Gaussian {
                        center: get_vec2(init, "center", "$.initial", dim)?.unwrap_or([1.0, 0.0]),
                        wavenumber: get_vec2(init, "wavenumber", "$.initial", dim)?
                            .unwrap_or([0.5, 0.0]),
                        width,
                    }
                }
                "snapshot" => {
                    let path =
                        get_str(init, "path", "$.initial")?.ok_or(ConfigError::MissingKey {
                            at: "$.initial".into(),
                            key: "path".into(),
                        })?;
                    InitialData::Snapshot {
                        path: path.to_string(),
                    }
                }
                other => {
                    return Err(ConfigError::Range {
                        at: "$.initial.type".into(),
                        value: format!("\"{other}\""),
                        admissible: "\"gaussian\" or \"snapshot\"".into(),
                    })
                }
            }
        }
        Some(_) => {
            return Err(ConfigError::WrongType {
                at: "$.initial".into(),
                expected: "object",
            })
        }
    };

    Ok(RunConfig {
        form,
        gamma,
        lambda,
        eta,
        zeta,
        initial,
        dim,
        n,
        half_width,
        dt,
        t_final,
        stride,
        snapshot_stride,
        output_dir: get_str(obj, "output_dir", "$")?
            .unwrap_or("nhsim_out")
            .to_string(),
        preset: get_str(obj, "preset", "$")?.map(str::to_string),
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}

/// Serializes a config back to JSON with every resolved value explicit;
/// `parse(emit(c))` reproduces `c` (key order aside).
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut top = BTreeMap::new();
    top.insert("form".to_string(), Value::from(cfg.form.as_str()));
    if let Some(g) = cfg.gamma {
        top.insert("gamma".into(), Value::from(g));
    }
    if let Some(l) = cfg.lambda {
        top.insert("lambda".into(), Value::from(l));
    }
    if let Some(e) = cfg.eta {
        top.insert("eta".into(), Value::from(e));
    }
    if let Some(z) = cfg.zeta {
        top.insert("zeta".into(), Value::from(z));
    }
    let initial = match &cfg.initial {
        InitialData::Gaussian {
            center,
            wavenumber,
            width,
        } => serde_json::json!({
            "type": "gaussian",
            "center": center[..cfg.dim],
            "wavenumber": wavenumber[..cfg.dim],
            "width": width,
        }),
        InitialData::Snapshot { path } => serde_json::json!({
            "type": "snapshot",
            "path": path,
        }),
    };
    top.insert("initial".into(), initial);
    top.insert(
        "grid".into(),
        serde_json::json!({ "dim": cfg.dim, "n": cfg.n, "half_width": cfg.half_width }),
    );
    let mut solver = serde_json::json!({
        "dt": cfg.dt,
        "t_final": cfg.t_final,
        "stride": cfg.stride,
    });
    if let Some(ss) = cfg.snapshot_stride {
        solver["snapshot_stride"] = Value::from(ss);
    }
    top.insert("solver".into(), solver);
    top.insert("output_dir".into(), Value::from(cfg.output_dir.clone()));
    if let Some(p) = &cfg.preset {
        top.insert("preset".into(), Value::from(p.clone()));
    }
    serde_json::to_string_pretty(&top).expect("config serializes")
}

impl RunConfig {
    /// Builds the grid, initial field, equation, and stepping parameters.
    /// For the modified form the datum is moved to its center-of-mass
    /// frame first (the form requires neutral data).
    pub fn build(&self) -> Result<SimulationRun, ConfigError> {
        let grid = Grid::new(self.dim, self.n, self.half_width).map_err(SolverError::from)?;
        let initial = match &self.initial {
            InitialData::Gaussian {
                center,
                wavenumber,
                width,
            } => WaveField::gaussian(grid, *center, *wavenumber, *width),
            InitialData::Snapshot { path } => io::read_snapshot(Path::new(path))?,
        };
        let equation = match self.form {
            FormName::Nh => EquationSpec::nh_direct(
                PotentialSpec::power(self.gamma.unwrap(), self.lambda.unwrap())
                    .map_err(SolverError::from)?,
            )?,
            FormName::Gh => EquationSpec::gh(
                PotentialSpec::power(self.gamma.unwrap(), self.lambda.unwrap())
                    .map_err(SolverError::from)?,
            )?,
            FormName::Mgh => {
                let pot = PotentialSpec::power(self.gamma.unwrap(), self.lambda.unwrap())
                    .map_err(SolverError::from)?;
                let (v0, frame) = to_com_frame(&initial)?;
                let spec = EquationSpec::mgh(pot, frame.mass, frame)?;
                let config = SolverConfig {
                    dt: self.dt,
                    t_final: self.t_final,
                    stride: self.stride,
                    snapshot_stride: self.snapshot_stride,
                    boundary_fraction: crate::observables::BOUNDARY_MASS_FRACTION,
                };
                return Ok(SimulationRun {
                    initial: v0,
                    equation: spec,
                    config,
                });
            }
            FormName::Harmonic => EquationSpec::harmonic(self.eta.unwrap(), self.zeta.unwrap()),
            FormName::Log => EquationSpec::logarithmic(self.lambda.unwrap())?,
        };
        let mut config = SolverConfig::new(self.dt, self.t_final, self.stride)?;
        config.snapshot_stride = self.snapshot_stride;
        Ok(SimulationRun {
            initial,
            equation,
            config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config_str(r#"{"form": "nh", "gamma": 1.5, "lambda": 1.0}"#).unwrap();
        assert_eq!(cfg.n, 2048);
        assert_eq!(cfg.half_width, 30.0);
        assert_eq!(cfg.dt, 5e-4);
        assert_eq!(cfg.stride, 10);
        assert!(matches!(cfg.initial, InitialData::Gaussian { .. }));
        let run = cfg.build().unwrap();
        assert_eq!(run.config.steps(), 2000);
    }

    #[test]
    fn gamma_out_of_range_names_the_interval() {
        let err = parse_config_str(r#"{"form": "nh", "gamma": 2.5, "lambda": 1.0}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2.5") && msg.contains("(0, 2]"), "{msg}");
    }

    #[test]
    fn unknown_key_gets_a_suggestion() {
        let err = parse_config_str(r#"{"form": "nh", "gamm": 1.5, "lambda": 1.0}"#).unwrap_err();
        match err {
            ConfigError::UnknownKey {
                key, suggestion, ..
            } => {
                assert_eq!(key, "gamm");
                assert_eq!(suggestion.as_deref(), Some("gamma"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn nested_unknown_key_is_reported_with_path() {
        let err = parse_config_str(
            r#"{"form": "nh", "gamma": 1.5, "lambda": 1.0, "solver": {"dtt": 1e-3}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("$.solver") && msg.contains("dtt"), "{msg}");
    }

    #[test]
    fn harmonic_form_needs_its_coefficients() {
        assert!(parse_config_str(r#"{"form": "harmonic", "eta": 1.0}"#).is_err());
        assert!(parse_config_str(r#"{"form": "harmonic", "eta": 1.0, "zeta": 0.5}"#).is_ok());
    }

    #[test]
    fn config_round_trips_through_emit() {
        let cfg = parse_config_str(
            r#"{
                "form": "gh", "gamma": 0.75, "lambda": -1.0,
                "grid": {"dim": 1, "n": 512, "half_width": 18.0},
                "solver": {"dt": 1e-3, "t_final": 2.0, "stride": 5},
                "initial": {"type": "gaussian", "center": [0.5], "wavenumber": [0.25], "width": 1.0},
                "output_dir": "out"
            }"#,
        )
        .unwrap();
        let emitted = emit_config(&cfg);
        let back = parse_config_str(&emitted).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let err = parse_config_str(r#"{"form": "log", "lambda": 0.0}"#).unwrap_err();
        assert!(err.to_string().contains("nonzero"));
    }
}
