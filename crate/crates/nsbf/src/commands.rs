//! The four batch commands. Each returns a serialisable report; printing is
//! left to the caller.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nsbf_core::dirac::{
    free_solution, fundamental_solution_zero, fundamental_solution_zero_with, FundamentalOptions, HomogeneousSolution,
    Potential,
};
use nsbf_core::kernel::{
    auto_truncation, build_coefficients, goursat_residuals_at, probe_orders, KernelCoefficients, DEFAULT_ORDER,
};
use nsbf_core::mapping::MappingOracle;
use nsbf_core::solution::NsbfEvaluator;
use nsbf_core::spectral::{finalize_records, sample_points, scan_samples, ScanOptions, ScanWarning};
use nsbf_core::{c64, CVec2, Complex64, ComplexMat2};
use serde::Serialize;

use crate::cache::{self, CacheKey};
use crate::config::{ConfigError, OrderSetting, AUTO_MAX_ORDER};
use crate::format::g17;
use crate::problem::{Model, Problem};
use crate::table::{write_matrix_functions, Table};

/// Highest order compared against the formal-powers construction.
pub const MAPPING_MAX_ORDER: usize = 8;

/// Failures of a command, with the process exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] nsbf_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CommandError + '_ {
    move |source| CommandError::Io {
        path: path.into(),
        source,
    }
}

fn prepare_out(out: &Path) -> Result<(), CommandError> {
    std::fs::create_dir_all(out).map_err(io_error(out))
}

/// How the coefficients of a run were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientOrigin {
    Built,
    Cached,
}

/// Coefficients plus timing information.
pub struct Coefficients {
    pub coefficients: KernelCoefficients,
    pub origin: CoefficientOrigin,
    pub seconds: f64,
    /// `Some(false)` when `N = auto` did not reach the tolerance.
    pub converged: Option<bool>,
}

impl Coefficients {
    /// The line reported on stderr.
    pub fn timing_line(&self) -> String {
        let what = match self.origin {
            CoefficientOrigin::Built => "built",
            CoefficientOrigin::Cached => "loaded from cache",
        };
        format!(
            "coefficients: N={} M={} {what} in {:.3} s",
            self.coefficients.order(),
            self.coefficients.grid().intervals(),
            self.seconds
        )
    }
}

fn build(problem: &Problem, hom: &HomogeneousSolution) -> Result<(KernelCoefficients, Option<bool>), CommandError> {
    let q = &problem.potential;
    Ok(match problem.config.order {
        OrderSetting::Fixed(n) => (build_coefficients(q, hom, n)?, None),
        OrderSetting::Auto { tol } => {
            let t = auto_truncation(q, hom, tol, AUTO_MAX_ORDER)?;
            (t.coefficients, Some(t.converged))
        }
    })
}

/// Builds the coefficients, or loads them from `<out>/.cache` when an
/// identical build was stored there.
pub fn obtain_coefficients(problem: &Problem, use_cache: bool) -> Result<Coefficients, CommandError> {
    let start = Instant::now();
    let key = CacheKey::new(&problem.potential, problem.config.order);
    let path = cache::cache_path(&problem.config.out, key);
    if use_cache && path.exists() {
        if let Ok(coefficients) = cache::load(&path, &problem.potential) {
            return Ok(Coefficients {
                coefficients,
                origin: CoefficientOrigin::Cached,
                seconds: start.elapsed().as_secs_f64(),
                converged: None,
            });
        }
    }
    let hom = fundamental_solution_zero(&problem.potential)?;
    let (coefficients, converged) = build(problem, &hom)?;
    if use_cache {
        cache::store(&path, &coefficients).map_err(io_error(&path))?;
    }
    Ok(Coefficients {
        coefficients,
        origin: CoefficientOrigin::Built,
        seconds: start.elapsed().as_secs_f64(),
        converged,
    })
}

// ---------------------------------------------------------------- kernel

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    #[serde(rename = "N")]
    pub order: usize,
    pub sup_delta_q: f64,
    pub sup_delta_0: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingComparison {
    pub file: PathBuf,
    /// Relative grid-L² difference for `n = 0, 1, …`.
    pub relative_differences: Vec<f64>,
    pub max_relative_difference: f64,
    pub calibration_phi: [f64; 2],
    pub calibration_psi: [f64; 2],
    pub calibration_is_verbatim: bool,
    pub particular_combination: [[f64; 2]; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub order: usize,
    pub intervals: usize,
    pub length: f64,
    pub coefficients_file: PathBuf,
    pub residuals_file: PathBuf,
    pub residuals: Vec<ResidualRow>,
    pub auto_converged: Option<bool>,
    pub mapping: Option<MappingComparison>,
}

impl fmt::Display for KernelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wrote {}", self.coefficients_file.display())?;
        writeln!(f, "N,sup_deltaQ,sup_delta0")?;
        for r in &self.residuals {
            writeln!(f, "{},{},{}", r.order, g17(r.sup_delta_q), g17(r.sup_delta_0))?;
        }
        if self.auto_converged == Some(false) {
            writeln!(f, "warning: no order up to {AUTO_MAX_ORDER} met the tolerance")?;
        }
        if let Some(m) = &self.mapping {
            writeln!(f, "wrote {}", m.file.display())?;
            writeln!(
                f,
                "sign calibration: phi = [{}, {}], psi = [{}, {}]{}",
                m.calibration_phi[0],
                m.calibration_phi[1],
                m.calibration_psi[0],
                m.calibration_psi[1],
                if m.calibration_is_verbatim { " (verbatim)" } else { "" }
            )?;
            writeln!(
                f,
                "mapping vs recursion: max relative L2 difference {} (n = 0..{})",
                g17(m.max_relative_difference),
                m.relative_differences.len() - 1
            )?;
        }
        Ok(())
    }
}

/// Builds the coefficients and writes `kernel.csv` and `residuals.csv`;
/// with `mapping` also `kernel_mapping.csv` from the formal powers.
pub fn run_kernel(problem: &Problem, mapping: bool) -> Result<KernelReport, CommandError> {
    let out = &problem.config.out;
    prepare_out(out)?;
    let hom = fundamental_solution_zero(&problem.potential)?;
    let (coeffs, auto_converged) = build(problem, &hom)?;
    let key = CacheKey::new(&problem.potential, problem.config.order);
    let cache_file = cache::cache_path(out, key);
    cache::store(&cache_file, &coeffs).map_err(io_error(&cache_file))?;

    let coefficients_file = out.join("kernel.csv");
    write_matrix_functions(
        &coefficients_file,
        coeffs.k_nonnegative().iter().enumerate().map(|(n, k)| (n as i64, k)),
    )
    .map_err(io_error(&coefficients_file))?;

    let residuals = probe_orders(coeffs.order())
        .into_iter()
        .map(|n| {
            let r = goursat_residuals_at(&coeffs, n)?;
            Ok(ResidualRow {
                order: n,
                sup_delta_q: r.sup_delta_q,
                sup_delta_0: r.sup_delta_0,
            })
        })
        .collect::<Result<Vec<_>, nsbf_core::Error>>()?;
    let residuals_file = out.join("residuals.csv");
    let mut table =
        Table::create(&residuals_file, &["N", "sup_deltaQ", "sup_delta0"]).map_err(io_error(&residuals_file))?;
    for r in &residuals {
        table
            .labelled(r.order as i64, &[r.sup_delta_q, r.sup_delta_0])
            .map_err(io_error(&residuals_file))?;
    }
    table.finish().map_err(io_error(&residuals_file))?;

    let mapping = if mapping {
        Some(compare_with_mapping(
            &problem.potential,
            &hom,
            &coeffs,
            &out.join("kernel_mapping.csv"),
        )?)
    } else {
        None
    };
    Ok(KernelReport {
        order: coeffs.order(),
        intervals: coeffs.grid().intervals(),
        length: coeffs.grid().length(),
        coefficients_file,
        residuals_file,
        residuals,
        auto_converged,
        mapping,
    })
}

/// Relative grid-L² differences between recursion and mapping coefficients
/// for `n ≤ min(N, max_order)`.
pub fn mapping_differences(
    q: &Potential,
    hom: &HomogeneousSolution,
    coeffs: &KernelCoefficients,
    max_order: usize,
) -> Result<(MappingOracle, Vec<nsbf_core::grid::SampledMat2Fn>, Vec<f64>), CommandError> {
    let order = coeffs.order().min(max_order);
    let oracle = MappingOracle::new(q, hom, order)?;
    let mut mapped = Vec::with_capacity(order + 1);
    let mut diffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let reference = coeffs.k(n as isize)?;
        let k = oracle.kernel_coefficient(n)?;
        let scale = reference.l2_norm();
        let diff = reference.sub(&k)?.l2_norm();
        diffs.push(if scale > 0.0 { diff / scale } else { diff });
        mapped.push(k);
    }
    Ok((oracle, mapped, diffs))
}

fn compare_with_mapping(
    q: &Potential,
    hom: &HomogeneousSolution,
    coeffs: &KernelCoefficients,
    file: &Path,
) -> Result<MappingComparison, CommandError> {
    let (oracle, mapped, diffs) = mapping_differences(q, hom, coeffs, MAPPING_MAX_ORDER)?;
    write_matrix_functions(file, mapped.iter().enumerate().map(|(n, k)| (n as i64, k))).map_err(io_error(file))?;
    let c = oracle.particular().combination();
    let cal = oracle.calibration();
    Ok(MappingComparison {
        file: file.into(),
        max_relative_difference: diffs.iter().fold(0.0, |m: f64, &d| m.max(d)),
        relative_differences: diffs,
        calibration_phi: cal.phi,
        calibration_psi: cal.psi,
        calibration_is_verbatim: cal.is_verbatim(),
        particular_combination: [[c[0].re, c[0].im], [c[1].re, c[1].im]],
    })
}

// ----------------------------------------------------------------- solve

#[derive(Clone, Debug, Serialize)]
pub struct SolutionSummary {
    pub lambda: [f64; 2],
    pub file: PathBuf,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub coefficients: CoefficientOrigin,
    pub coefficient_seconds: f64,
    pub solve_seconds: f64,
    pub solutions: Vec<SolutionSummary>,
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.solutions {
            writeln!(
                f,
                "lambda = {}{:+}i: {} (max residual {})",
                g17(s.lambda[0]),
                s.lambda[1],
                s.file.display(),
                g17(s.max_residual)
            )?;
        }
        Ok(())
    }
}

/// Solves the initial-value problem `Y(0) = c` for every `λ` and writes
/// `solution_<k>.csv` in the user's variables.
pub fn run_solve(
    problem: &Problem,
    lambdas: &[Complex64],
    c: CVec2,
) -> Result<(SolveReport, Coefficients), CommandError> {
    let out = &problem.config.out;
    prepare_out(out)?;
    let coeffs = obtain_coefficients(problem, true)?;
    let ev = NsbfEvaluator::new(&coeffs.coefficients);
    let start = Instant::now();
    let y0 = problem.canonical_initial(c);
    let mut solutions = Vec::with_capacity(lambdas.len());
    for (k, &lambda) in lambdas.iter().enumerate() {
        let sol = ev.solve_ivp(lambda, y0)?;
        let file = out.join(format!("solution_{k}.csv"));
        let mut table =
            Table::create(&file, &["x", "re_y1", "im_y1", "re_y2", "im_y2", "residual"]).map_err(io_error(&file))?;
        for (i, (y, r)) in sol.values().iter().zip(sol.residuals()).enumerate() {
            let v = problem.from_canonical(i, *y);
            let fields = [problem.grid().node(i), v[0].re, v[0].im, v[1].re, v[1].im, *r];
            table.row(fields.iter().map(|&x| g17(x))).map_err(io_error(&file))?;
        }
        table.finish().map_err(io_error(&file))?;
        solutions.push(SolutionSummary {
            lambda: [lambda.re, lambda.im],
            file,
            max_residual: sol.max_residual(),
        });
    }
    let report = SolveReport {
        coefficients: coeffs.origin,
        coefficient_seconds: coeffs.seconds,
        solve_seconds: start.elapsed().as_secs_f64(),
        solutions,
    };
    Ok((report, coeffs))
}

// -------------------------------------------------------------- spectrum

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub file: PathBuf,
    pub count: usize,
    pub first_index: Option<i64>,
    pub last_index: Option<i64>,
    pub max_residual: f64,
    pub seconds: f64,
    pub coefficients: CoefficientOrigin,
    pub warnings: Vec<String>,
}

impl fmt::Display for SpectrumReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut range = String::new();
        if let (Some(a), Some(b)) = (self.first_index, self.last_index) {
            let _ = write!(range, ", indices {a}..{b}");
        }
        writeln!(
            f,
            "{} eigenvalues{range}, max residual {}, {:.3} s -> {}",
            self.count,
            g17(self.max_residual),
            self.seconds,
            self.file.display()
        )
    }
}

fn describe(w: &ScanWarning) -> String {
    match w {
        ScanWarning::NonRealCharacteristic { lambda, imag } => {
            format!("characteristic function not real at lambda = {lambda} (Im = {imag:e})")
        }
        ScanWarning::Unconverged { lambda, residual } => {
            format!("refinement did not converge near lambda = {lambda} (residual {residual:e})")
        }
    }
}

/// Number of scan workers.
fn worker_count(intervals: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    available.min(intervals).max(1)
}

/// Eigenvalues in `[lambda_min, lambda_max]`, written to `eigenvalues.csv`.
/// The sample intervals are split among worker threads.
pub fn run_spectrum(problem: &Problem) -> Result<(SpectrumReport, Coefficients), CommandError> {
    let out = &problem.config.out;
    let (lo, hi) = problem.config.window()?;
    let bc = problem.boundary_condition()?;
    prepare_out(out)?;
    let coeffs = obtain_coefficients(problem, true)?;
    let start = Instant::now();
    let ev = NsbfEvaluator::new(&coeffs.coefficients);
    let (left, right) = problem.config.boundary_blocks()?;
    let real_blocks = [left, right].iter().all(|m| m.entries().iter().all(|v| v.im == 0.0));
    let opts = ScanOptions {
        step: problem.config.scan_step,
        self_adjoint: problem.potential.is_real()
            && real_blocks
            && matches!(problem.model, Model::Canonical | Model::Gauged { .. }),
        ..ScanOptions::default()
    };
    let samples = sample_points(lo, hi, opts.step_for(problem.grid().length()))?;
    let intervals = samples.len() - 1;
    let workers = worker_count(intervals);
    let chunk = intervals.div_ceil(workers);
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(intervals)..((w + 1) * chunk).min(intervals);
                let (ev, bc, samples, opts) = (&ev, &bc, &samples, &opts);
                s.spawn(move || scan_samples(ev, bc, samples, range, opts))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut roots = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        let (found, w) = r?;
        roots.extend(found);
        warnings.extend(w.iter().map(describe));
    }
    let records = finalize_records(roots);
    if records.is_empty() {
        warnings.push(format!("no eigenvalues in [{lo}, {hi}]"));
    }

    let file = out.join("eigenvalues.csv");
    let mut table = Table::create(&file, &["index", "lambda", "residual", "iterations"]).map_err(io_error(&file))?;
    for r in &records {
        let fields = [
            r.index.to_string(),
            g17(r.lambda.re),
            g17(r.residual),
            r.iterations.to_string(),
        ];
        table.row(fields).map_err(io_error(&file))?;
    }
    table.finish().map_err(io_error(&file))?;

    let report = SpectrumReport {
        file,
        count: records.len(),
        first_index: records.first().map(|r| r.index),
        last_index: records.last().map(|r| r.index),
        max_residual: records.iter().fold(0.0, |m: f64, r| m.max(r.residual)),
        seconds: start.elapsed().as_secs_f64(),
        coefficients: coeffs.origin,
        warnings,
    };
    Ok((report, coeffs))
}

// -------------------------------------------------------------- validate

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub order: usize,
    pub intervals: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation at N={} M={}", self.order, self.intervals)?;
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<24} {:.3e} (threshold {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed {
                "all checks passed"
            } else {
                "validation FAILED"
            }
        )
    }
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        passed: value <= threshold,
    }
}

/// Sample points `x` used by the pointwise checks: a few nodes spread over the grid.
fn probe_nodes(len: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = [1, len / 7, len / 3, len / 2, 4 * len / 5, len - 1].to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Runs the built-in property suite on the configured potential.
pub fn run_validate(problem: &Problem) -> Result<ValidationReport, CommandError> {
    let q = &problem.potential;
    let grid = *q.grid();
    let b = grid.length();
    let order = match problem.config.order {
        OrderSetting::Fixed(n) => n,
        OrderSetting::Auto { .. } => DEFAULT_ORDER,
    };
    let nodes = probe_nodes(grid.len());
    let lambdas = [-37.5, -4.0, 0.0, 2.5, 21.0];
    let mut checks = Vec::new();

    let free = Potential::zero(grid);
    let free_hom = fundamental_solution_zero(&free)?;
    let free_coeffs = build_coefficients(&free, &free_hom, order)?;
    let k_max = free_coeffs
        .k_nonnegative()
        .iter()
        .fold(0.0, |m: f64, k| m.max(k.max_norm()));
    checks.push(check("free_kernel_zero", k_max, 1e-13));
    let free_ev = NsbfEvaluator::new(&free_coeffs);
    let mut free_err: f64 = 0.0;
    for &l in &lambdas {
        for &i in &nodes {
            let x = grid.node(i);
            let l = c64(l, 0.0);
            free_err = free_err.max((free_ev.evaluate_u(l, x)? - free_solution(l, x)).norm());
        }
    }
    checks.push(check("free_solution_exact", free_err, 1e-13));

    let opts = FundamentalOptions {
        check_residual: false,
        ..FundamentalOptions::default()
    };
    let hom = fundamental_solution_zero_with(q, &opts)?;
    checks.push(check("fundamental_det", hom.max_det_error(), 1e-10));
    checks.push(check(
        "fundamental_residual",
        hom.residual(),
        1e-8 * (1.0 + q.sup_norm() * b),
    ));

    let coeffs = build_coefficients(q, &hom, order)?;
    let ev = NsbfEvaluator::new(&coeffs);
    let k0 = coeffs.k(0)?;
    let mut closure: f64 = 0.0;
    for i in 0..grid.len() {
        let expected = ComplexMat2::IDENTITY + k0.value(i) * 2.0;
        closure = closure.max((hom.u().value(i) - expected).norm());
        let series = ev.evaluate_u(c64(0.0, 0.0), grid.node(i))?;
        closure = closure.max((series - hom.u().value(i)).norm());
    }
    checks.push(check("lambda_zero_closure", closure, 1e-12));

    let mut det_err: f64 = 0.0;
    for &l in &lambdas {
        for &i in &nodes {
            det_err = det_err.max((ev.evaluate_u(c64(l, 0.0), grid.node(i))?.det() - 1.0).norm());
        }
    }
    checks.push(check("nsbf_det", det_err, 1e-8));

    let g = goursat_residuals_at(&coeffs, coeffs.order())?;
    checks.push(check("goursat_residual", g.worst(), 1e-6));

    let (_, _, diffs) = mapping_differences(q, &hom, &coeffs, 4)?;
    checks.push(check(
        "mapping_vs_recursion",
        diffs.iter().fold(0.0, |m: f64, &d| m.max(d)),
        1e-8,
    ));

    let h = 1e-5;
    let mut deriv: f64 = 0.0;
    for l in [0.0, -7.3, 12.1] {
        for &i in &nodes {
            let x = grid.node(i);
            let dl = ev.evaluate_du_dlambda(c64(l, 0.0), x)?;
            let fd = (ev.evaluate_u(c64(l + h, 0.0), x)? - ev.evaluate_u(c64(l - h, 0.0), x)?) * (0.5 / h);
            deriv = deriv.max((dl - fd).norm());
        }
    }
    checks.push(check("dlambda_vs_fd", deriv, 1e-6));

    let sol = ev.solve_ivp(c64(10.0, 0.0), [c64(1.0, 0.0), c64(0.0, 0.0)])?;
    checks.push(check("ivp_residual", sol.max_residual(), 1e-6));

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        order,
        intervals: grid.intervals(),
        checks,
        passed,
    })
}
