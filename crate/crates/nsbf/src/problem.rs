//! Turning a [`ProblemConfig`] into sampled potentials and boundary conditions.

use std::path::Path;

use nsbf_core::dirac::Potential;
use nsbf_core::grid::{Grid, SampledScalar};
use nsbf_core::spectral::BoundaryCondition;
use nsbf_core::zs::{zs_boundary, zs_to_dirac, ZsPotential, CONJUGATOR, CONJUGATOR_INV};
use nsbf_core::{c64, CVec2, Complex64, ComplexMat2};

use crate::config::{ConfigError, Expression, PotentialSource, ProblemConfig, DEFAULT_INTERVALS};

/// Header of a tabulated canonical potential.
pub const CANONICAL_HEADER: [&str; 5] = ["x", "p_re", "p_im", "q_re", "q_im"];
/// Header of a tabulated Zakharov–Shabat potential.
pub const ZS_HEADER: [&str; 3] = ["x", "nu_re", "nu_im"];

/// Allowed mismatch between tabulated and grid nodes, relative to `b`.
const NODE_TOLERANCE: f64 = 1e-12;
/// Allowed violation of the gauge trace condition, relative to the potential size.
const TRACE_TOLERANCE: f64 = 1e-6;

/// How the user's unknown relates to the canonical solution `Y`.
#[derive(Clone, Debug)]
pub enum Model {
    /// The user's system is the canonical one.
    Canonical,
    /// `V = A^{-1} Y` solves the Zakharov–Shabat system for `nu`.
    ZakharovShabat(ZsPotential),
    /// `Z = R(φ) Y` solves `B Z' + diag(m1, m2) Z = λ Z`.
    Gauged { phi: SampledScalar },
}

/// A fully sampled problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: ProblemConfig,
    pub potential: Potential,
    pub model: Model,
}

impl Problem {
    pub fn build(config: ProblemConfig) -> Result<Self, ConfigError> {
        let (potential, model) = match &config.source {
            PotentialSource::Expressions { p, q } => {
                let grid = grid_for(&config, config.intervals.unwrap_or(DEFAULT_INTERVALS))?;
                let first = sample("p_expr", p, &grid)?;
                let second = sample("q_expr", q, &grid)?;
                match &config.gauge_phi {
                    None => (canonical(first, second)?, Model::Canonical),
                    Some(phi) => {
                        let phi = sample("gauge_phi", phi, &grid)?;
                        let potential = gauge_potential(&first, &second, &phi)?;
                        (potential, Model::Gauged { phi })
                    }
                }
            }
            PotentialSource::ZakharovShabat(nu) => {
                let grid = grid_for(&config, config.intervals.unwrap_or(DEFAULT_INTERVALS))?;
                zs_model(sample("nu_expr", nu, &grid)?)?
            }
            PotentialSource::File(path) => load_potential_file(path, &config)?,
        };
        Ok(Self {
            config,
            potential,
            model,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.potential.grid()
    }

    /// Boundary condition acting on the canonical `Y`, with the blocks of the
    /// configuration read in the user's variables.
    pub fn boundary_condition(&self) -> Result<BoundaryCondition, ConfigError> {
        let (left, right) = self.config.boundary_blocks()?;
        let bc = BoundaryCondition::constant(left, right);
        let transformed = match &self.model {
            Model::Canonical => Ok(bc),
            Model::ZakharovShabat(_) => zs_boundary(bc),
            Model::Gauged { phi } => bc.with_rotation_gauge(phi.value(0).re, phi.last().re),
        };
        transformed.map_err(|e| ConfigError::invalid("bc_left", e))
    }

    /// Initial value of `Y` for the user's initial vector.
    pub fn canonical_initial(&self, c: CVec2) -> CVec2 {
        self.to_canonical(0) * c
    }

    /// Maps `Y(x_i)` to the user's unknown.
    pub fn from_canonical(&self, i: usize, y: CVec2) -> CVec2 {
        match &self.model {
            Model::Canonical => y,
            Model::ZakharovShabat(_) => CONJUGATOR_INV * y,
            Model::Gauged { phi } => ComplexMat2::rotation(phi.value(i)) * y,
        }
    }

    fn to_canonical(&self, i: usize) -> ComplexMat2 {
        match &self.model {
            Model::Canonical => ComplexMat2::IDENTITY,
            Model::ZakharovShabat(_) => CONJUGATOR,
            Model::Gauged { phi } => ComplexMat2::rotation(-phi.value(i)),
        }
    }
}

fn grid_for(config: &ProblemConfig, intervals: usize) -> Result<Grid, ConfigError> {
    Grid::new(config.length, intervals).map_err(|e| ConfigError::invalid("M", e))
}

fn sample(key: &str, e: &Expression, grid: &Grid) -> Result<SampledScalar, ConfigError> {
    e.tree
        .evaluate_on_grid(grid)
        .map_err(|err| ConfigError::invalid(key, format!("`{}`: {err}", e.text)))
}

fn canonical(p: SampledScalar, q: SampledScalar) -> Result<Potential, ConfigError> {
    Potential::new(p, q).map_err(|e| ConfigError::invalid("p_expr", e))
}

fn zs_model(nu: SampledScalar) -> Result<(Potential, Model), ConfigError> {
    let nu = ZsPotential::new(nu).map_err(|e| ConfigError::invalid("nu_expr", e))?;
    let potential = zs_to_dirac(&nu).map_err(|e| ConfigError::invalid("nu_expr", e))?;
    Ok((potential, Model::ZakharovShabat(nu)))
}

/// Canonical potential of `B Z' + diag(m1, m2) Z = λ Z` under `Z = R(φ) Y`:
/// `p = ((m1 - m2)/2) cos 2φ`, `q = -((m1 - m2)/2) sin 2φ`, which requires
/// `(m1 + m2)/2 + φ' = 0`.
pub fn gauge_potential(m1: &SampledScalar, m2: &SampledScalar, phi: &SampledScalar) -> Result<Potential, ConfigError> {
    if phi.values().iter().any(|v| v.im != 0.0) {
        return Err(ConfigError::invalid("gauge_phi", "the gauge angle must be real"));
    }
    let dphi = phi.derivative();
    let scale = 1.0 + m1.max_abs() + m2.max_abs();
    let mut worst: f64 = 0.0;
    for i in 0..phi.len() {
        worst = worst.max(((m1.value(i) + m2.value(i)) * 0.5 + dphi.value(i)).norm());
    }
    if worst > TRACE_TOLERANCE * scale {
        return Err(ConfigError::invalid(
            "gauge_phi",
            format!("trace condition (p + q)/2 + phi' = 0 violated by {worst:.3e}; choose phi' = -(p_expr + q_expr)/2"),
        ));
    }
    let half = m1.sub(m2).map_err(|e| ConfigError::invalid("gauge_phi", e))?;
    let p = half
        .zip_with(phi, |_, d, a| d * 0.5 * (a * 2.0).cos())
        .expect("same grid");
    let q = half
        .zip_with(phi, |_, d, a| -d * 0.5 * (a * 2.0).sin())
        .expect("same grid");
    canonical(p, q)
}

fn file_error(path: &Path, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::PotentialFile {
        path: path.into(),
        message: message.to_string(),
    }
}

/// Reads a tabulated potential. The nodes fix `M` (and `b` unless given),
/// and must coincide with the uniform grid.
pub fn load_potential_file(path: &Path, config: &ProblemConfig) -> Result<(Potential, Model), ConfigError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| file_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| file_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let is_zs = if header == ZS_HEADER {
        true
    } else if header == CANONICAL_HEADER {
        false
    } else {
        return Err(file_error(
            path,
            format!(
                "header must be `{}` or `{}`, found `{}`",
                CANONICAL_HEADER.join(","),
                ZS_HEADER.join(","),
                header.join(",")
            ),
        ));
    };
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| file_error(path, e))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| file_error(path, format!("row {}: `{field}` is not a number", line + 2)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(file_error(path, "at least two rows are required"));
    }
    let intervals = rows.len() - 1;
    if let Some(m) = config.intervals {
        if m != intervals {
            return Err(file_error(
                path,
                format!("M = {m} but the file has {intervals} intervals"),
            ));
        }
    }
    if intervals % nsbf_core::grid::BLOCK != 0 {
        return Err(file_error(
            path,
            format!(
                "{intervals} intervals; the count must be a multiple of {}",
                nsbf_core::grid::BLOCK
            ),
        ));
    }
    let length = rows[intervals][0];
    if (length - config.length).abs() > NODE_TOLERANCE * config.length {
        return Err(file_error(
            path,
            format!("last node {length} differs from b = {}", config.length),
        ));
    }
    let grid = Grid::new(config.length, intervals).map_err(|e| file_error(path, e))?;
    for (i, row) in rows.iter().enumerate() {
        if (row[0] - grid.node(i)).abs() > NODE_TOLERANCE * config.length {
            return Err(file_error(
                path,
                format!("row {}: x = {} but the grid node is {}", i + 2, row[0], grid.node(i)),
            ));
        }
    }
    let column = |re: usize| SampledScalar::from_indexed(grid, |i| c64(rows[i][re], rows[i][re + 1]));
    if is_zs {
        zs_model(column(1))
    } else {
        Ok((canonical(column(1), column(3))?, Model::Canonical))
    }
}

/// Parses a `λ` list: comma-separated constant expressions, complex allowed.
pub fn parse_lambda_list(text: &str) -> Result<Vec<Complex64>, ConfigError> {
    text.split(',')
        .map(|part| {
            let e = Expression::parse("--lambda", part.trim())?;
            let v = e
                .tree
                .evaluate(0.0)
                .map_err(|err| ConfigError::invalid("--lambda", format!("`{}`: {err}", part.trim())))?;
            Ok(v)
        })
        .collect()
}

/// Parses the initial vector `c1,c2`.
pub fn parse_initial_vector(text: &str) -> Result<CVec2, ConfigError> {
    let values = parse_lambda_list(text).map_err(|e| ConfigError::invalid("--c", e))?;
    match values.as_slice() {
        [a, b] => Ok([*a, *b]),
        _ => Err(ConfigError::invalid(
            "--c",
            format!("expected two entries, found {}", values.len()),
        )),
    }
}
