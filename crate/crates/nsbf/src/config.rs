//! Problem configuration: a flat `key = value` file plus `--set` overrides.
//!
//! ```text
//! # u' = (1 - λ) v, v' = (λ + x) u, u(0) = u(1) = 0
//! b = 1
//! M = 2000
//! N = 16
//! p_expr = -x          # with gauge_phi: diagonal entries of the potential
//! q_expr = 1
//! gauge_phi = x*(x-2)/4
//! bc_left = 1, 0, 0, 0
//! bc_right = 0, 0, 1, 0
//! lambda_min = -331.2
//! lambda_max = 422.8
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use nsbf_core::expr::{parse, Expr};
use nsbf_core::{Complex64, ComplexMat2};

/// Every recognised key.
pub const KEYS: [&str; 15] = [
    "b",
    "M",
    "N",
    "tol",
    "p_expr",
    "q_expr",
    "nu_expr",
    "potential_file",
    "gauge_phi",
    "bc_left",
    "bc_right",
    "lambda_min",
    "lambda_max",
    "scan_step",
    "out",
];

pub const DEFAULT_INTERVALS: usize = 2000;
pub const DEFAULT_ORDER: usize = 16;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_OUT: &str = "nsbf-out";
/// Largest order tried by `N = auto`.
pub const AUTO_MAX_ORDER: usize = 64;

/// Configuration problems; all map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{origin}:{line}: expected `key = value`, found `{text}`")]
    Syntax { origin: String, line: usize, text: String },
    #[error("unknown key `{0}` (known keys: {keys})", keys = KEYS.join(", "))]
    UnknownKey(String),
    #[error("{origin}: key `{key}` given twice")]
    DuplicateKey { origin: String, key: String },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("missing {0}")]
    Missing(String),
    #[error("conflicting potential sources: {0}; give exactly one of p_expr/q_expr, nu_expr, potential_file")]
    ConflictingSources(String),
    #[error("potential file {path}: {message}")]
    PotentialFile { path: PathBuf, message: String },
}

impl ConfigError {
    pub fn invalid(key: &str, message: impl fmt::Display) -> Self {
        ConfigError::InvalidValue {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

/// Unvalidated key/value pairs in the order of precedence they were applied.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses configuration text; `origin` labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax {
                    origin: origin.into(),
                    line: i + 1,
                    text: line.trim().into(),
                });
            };
            let key = key.trim();
            check_key(key)?;
            if raw.entries.insert(key.into(), value.trim().into()).is_some() {
                return Err(ConfigError::DuplicateKey {
                    origin: origin.into(),
                    key: key.into(),
                });
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::invalid("--set", format!("expected key=value, found `{assignment}`")))?;
        let key = key.trim();
        check_key(key)?;
        self.entries.insert(key.into(), value.trim().into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn check_key(key: &str) -> Result<(), ConfigError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.into()))
    }
}

/// An expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    pub text: String,
    pub tree: Expr,
}

impl Expression {
    pub fn parse(key: &str, text: &str) -> Result<Self, ConfigError> {
        let tree = parse(text).map_err(|e| ConfigError::invalid(key, format!("`{text}`: {e}")))?;
        Ok(Self {
            text: text.into(),
            tree,
        })
    }

    pub fn zero() -> Self {
        Self::parse("", "0").expect("literal zero")
    }
}

/// Where the potential comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSource {
    /// `p` and `q` (or, with a gauge, the diagonal entries) as expressions.
    Expressions { p: Expression, q: Expression },
    /// The Zakharov–Shabat potential `ν` as an expression.
    ZakharovShabat(Expression),
    /// Tabulated samples; the header decides between `p, q` and `ν`.
    File(PathBuf),
}

/// How the truncation order is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrderSetting {
    Fixed(usize),
    /// Smallest probed order whose Goursat residuals are below `tol`.
    Auto {
        tol: f64,
    },
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub length: f64,
    /// `None` when not given: the default, or the row count of a potential file.
    pub intervals: Option<usize>,
    pub order: OrderSetting,
    pub source: PotentialSource,
    pub gauge_phi: Option<Expression>,
    pub boundary: Option<(ComplexMat2, ComplexMat2)>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub scan_step: Option<f64>,
    pub out: PathBuf,
}

/// `p = sin(πx)`, `q = cos(πx)`: the smooth test potential used when
/// `validate` runs without a potential source.
pub fn default_validation_source() -> PotentialSource {
    PotentialSource::Expressions {
        p: Expression::parse("p_expr", "sin(pi*x)").expect("valid"),
        q: Expression::parse("q_expr", "cos(pi*x)").expect("valid"),
    }
}

fn real_value(key: &str, text: &str) -> Result<f64, ConfigError> {
    let e = Expression::parse(key, text)?;
    let v = e
        .tree
        .evaluate(0.0)
        .map_err(|err| ConfigError::invalid(key, format!("`{text}`: {err}")))?;
    if v.im != 0.0 {
        return Err(ConfigError::invalid(key, format!("`{text}` must be real")));
    }
    Ok(v.re)
}

fn positive_integer(key: &str, text: &str) -> Result<usize, ConfigError> {
    text.parse::<usize>()
        .map_err(|_| ConfigError::invalid(key, format!("`{text}` is not a nonnegative integer")))
}

/// Parses four comma-separated constant expressions into a row-major block.
pub fn parse_block(key: &str, text: &str) -> Result<ComplexMat2, ConfigError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(ConfigError::invalid(
            key,
            format!(
                "expected four comma-separated entries a11, a12, a21, a22, found {}",
                parts.len()
            ),
        ));
    }
    let mut entries = [Complex64::new(0.0, 0.0); 4];
    for (slot, part) in entries.iter_mut().zip(&parts) {
        let e = Expression::parse(key, part.trim())?;
        *slot = e
            .tree
            .evaluate(0.0)
            .map_err(|err| ConfigError::invalid(key, format!("`{}`: {err}", part.trim())))?;
    }
    Ok(ComplexMat2::new(entries[0], entries[1], entries[2], entries[3]))
}

impl ProblemConfig {
    /// Validates `raw`. Without a potential source `fallback` is used, or the
    /// configuration is rejected when there is none.
    pub fn from_raw(raw: &RawConfig, fallback: Option<PotentialSource>) -> Result<Self, ConfigError> {
        let length = match raw.get("b") {
            Some(t) => real_value("b", t)?,
            None => 1.0,
        };
        if !(length > 0.0 && length.is_finite()) {
            return Err(ConfigError::invalid("b", "the interval length must be positive"));
        }
        let intervals = raw.get("M").map(|t| positive_integer("M", t)).transpose()?;
        if let Some(m) = intervals {
            if m < nsbf_core::grid::MIN_INTERVALS {
                return Err(ConfigError::invalid(
                    "M",
                    format!("at least {} intervals are required", nsbf_core::grid::MIN_INTERVALS),
                ));
            }
        }
        let tol = match raw.get("tol") {
            Some(t) => real_value("tol", t)?,
            None => DEFAULT_TOLERANCE,
        };
        if !(tol > 0.0) {
            return Err(ConfigError::invalid("tol", "must be positive"));
        }
        let order = match raw.get("N") {
            None => OrderSetting::Fixed(DEFAULT_ORDER),
            Some("auto") => OrderSetting::Auto { tol },
            Some(t) => OrderSetting::Fixed(positive_integer("N", t)?),
        };

        let has_pq = raw.get("p_expr").is_some() || raw.get("q_expr").is_some();
        let given: Vec<&str> = [
            has_pq.then_some("p_expr/q_expr"),
            raw.get("nu_expr").map(|_| "nu_expr"),
            raw.get("potential_file").map(|_| "potential_file"),
        ]
        .into_iter()
        .flatten()
        .collect();
        if given.len() > 1 {
            return Err(ConfigError::ConflictingSources(given.join(" and ")));
        }
        let source = if has_pq {
            let expr = |key: &str| match raw.get(key) {
                Some(t) => Expression::parse(key, t),
                None => Ok(Expression::zero()),
            };
            PotentialSource::Expressions {
                p: expr("p_expr")?,
                q: expr("q_expr")?,
            }
        } else if let Some(t) = raw.get("nu_expr") {
            PotentialSource::ZakharovShabat(Expression::parse("nu_expr", t)?)
        } else if let Some(t) = raw.get("potential_file") {
            PotentialSource::File(PathBuf::from(t))
        } else {
            fallback.ok_or_else(|| {
                ConfigError::Missing("potential source: set p_expr/q_expr, nu_expr or potential_file".into())
            })?
        };

        let gauge_phi = raw
            .get("gauge_phi")
            .map(|t| Expression::parse("gauge_phi", t))
            .transpose()?;
        if gauge_phi.is_some() && !matches!(source, PotentialSource::Expressions { .. }) {
            return Err(ConfigError::invalid(
                "gauge_phi",
                "a gauge needs the diagonal entries as p_expr and q_expr",
            ));
        }

        let left = raw.get("bc_left").map(|t| parse_block("bc_left", t)).transpose()?;
        let right = raw.get("bc_right").map(|t| parse_block("bc_right", t)).transpose()?;
        let boundary = match (left, right) {
            (Some(l), Some(r)) => Some((l, r)),
            (None, None) => None,
            (Some(_), None) => return Err(ConfigError::Missing("bc_right (bc_left is set)".into())),
            (None, Some(_)) => return Err(ConfigError::Missing("bc_left (bc_right is set)".into())),
        };

        let optional = |key: &str| raw.get(key).map(|t| real_value(key, t)).transpose();
        let scan_step = optional("scan_step")?;
        if let Some(step) = scan_step {
            if !(step > 0.0) {
                return Err(ConfigError::invalid("scan_step", "must be positive"));
            }
        }

        Ok(Self {
            length,
            intervals,
            order,
            source,
            gauge_phi,
            boundary,
            lambda_min: optional("lambda_min")?,
            lambda_max: optional("lambda_max")?,
            scan_step,
            out: PathBuf::from(raw.get("out").unwrap_or(DEFAULT_OUT)),
        })
    }

    /// The `λ` window, required by `spectrum`.
    pub fn window(&self) -> Result<(f64, f64), ConfigError> {
        match (self.lambda_min, self.lambda_max) {
            (Some(lo), Some(hi)) if lo < hi => Ok((lo, hi)),
            (Some(_), Some(_)) => Err(ConfigError::invalid("lambda_max", "must exceed lambda_min")),
            _ => Err(ConfigError::Missing("lambda_min and lambda_max".into())),
        }
    }

    /// The boundary blocks, required by `spectrum`.
    pub fn boundary_blocks(&self) -> Result<(ComplexMat2, ComplexMat2), ConfigError> {
        self.boundary
            .ok_or_else(|| ConfigError::Missing("bc_left and bc_right".into()))
    }
}
