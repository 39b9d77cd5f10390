//! End-to-end checks of the numerical core on problems with known answers.

use core::f64::consts::PI;

use nsbf_core::dirac::{free_solution, fundamental_solution_zero, Potential};
use nsbf_core::expr::parse;
use nsbf_core::grid::Grid;
use nsbf_core::kernel::{build_coefficients, goursat_residuals_at, KernelCoefficients};
use nsbf_core::mapping::MappingOracle;
use nsbf_core::solution::NsbfEvaluator;
use nsbf_core::spectral::{scan_eigenvalues, BoundaryCondition, ScanOptions};
use nsbf_core::zs::{zs_residual, zs_to_dirac, ZsEvaluator, ZsPotential};
use nsbf_core::{c64, Complex64, ComplexMat2};

/// `exp(A)` by scaling and squaring of the Taylor series.
fn expm(a: ComplexMat2) -> ComplexMat2 {
    let mut squarings = 0;
    let mut scaled = a;
    while scaled.norm() > 0.25 {
        scaled = scaled * 0.5;
        squarings += 1;
    }
    let mut term = ComplexMat2::IDENTITY;
    let mut sum = ComplexMat2::IDENTITY;
    for k in 1..30 {
        term = term * scaled * (1.0 / k as f64);
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

fn coefficients(q: &Potential, order: usize) -> KernelCoefficients {
    let hom = fundamental_solution_zero(q).unwrap();
    build_coefficients(q, &hom, order).unwrap()
}

fn potential_from(p: &str, q: &str, grid: Grid) -> Potential {
    let p = parse(p).unwrap().evaluate_on_grid(&grid).unwrap();
    let q = parse(q).unwrap().evaluate_on_grid(&grid).unwrap();
    Potential::new(p, q).unwrap()
}

#[test]
fn free_system_is_reproduced_exactly() {
    let grid = Grid::new(2.0, 100).unwrap();
    let coeffs = coefficients(&Potential::zero(grid), 12);
    assert!(coeffs.k_nonnegative().iter().all(|k| k.max_norm() == 0.0));
    let ev = NsbfEvaluator::new(&coeffs);
    for lambda in [-40.0, -1.5, 0.0, 3.0, 77.0] {
        for x in [0.0, 0.37, 1.0, 2.0] {
            let l = c64(lambda, 0.0);
            let err = (ev.evaluate_u(l, x).unwrap() - free_solution(l, x)).norm();
            assert!(err <= 1e-13, "λ={lambda} x={x}: {err:e}");
        }
    }
}

#[test]
fn constant_potential_against_matrix_exponential() {
    let grid = Grid::new(1.0, 1000).unwrap();
    let q = potential_from("0", "1", grid);
    let ev = NsbfEvaluator::new(&coefficients(&q, 20));
    let qm = ComplexMat2::real(0.0, 1.0, 1.0, 0.0);
    for lambda in [-60.0, -7.0, 0.0, 0.5, 12.0, 95.0] {
        let generator = ComplexMat2::B * ComplexMat2::scalar(c64(-lambda, 0.0)) + ComplexMat2::B * qm;
        for x in [0.25, 0.6, 1.0] {
            let expected = expm(generator * x);
            let got = ev.evaluate_u(c64(lambda, 0.0), x).unwrap();
            assert!((got - expected).norm() <= 1e-8, "λ={lambda} x={x}");
        }
    }
}

#[test]
fn goursat_residuals_decay_with_order() {
    let grid = Grid::new(1.0, 1000).unwrap();
    let q = potential_from("sin(pi*x)", "cos(pi*x)", grid);
    let coeffs = coefficients(&q, 16);
    let low = goursat_residuals_at(&coeffs, 4).unwrap();
    let high = goursat_residuals_at(&coeffs, 16).unwrap();
    assert!(high.sup_delta_q * 1e3 <= low.sup_delta_q);
    assert!(high.sup_delta_0 * 1e3 <= low.sup_delta_0);
}

#[test]
fn free_dirichlet_eigenvalues_are_multiples_of_pi() {
    let grid = Grid::new(1.0, 200).unwrap();
    let ev = NsbfEvaluator::new(&coefficients(&Potential::zero(grid), 4));
    let report = scan_eigenvalues(
        &ev,
        &BoundaryCondition::dirichlet(),
        -20.5 * PI,
        20.5 * PI,
        &ScanOptions::default(),
    )
    .unwrap();
    assert_eq!(report.records.len(), 41);
    for r in &report.records {
        assert!((r.lambda.re - r.index as f64 * PI).abs() <= 1e-10, "{r:?}");
    }
}

#[test]
fn zakharov_shabat_constant_potential() {
    let grid = Grid::new(1.0, 1000).unwrap();
    let nu = ZsPotential::from_fn(grid, |_| c64(0.5, 0.0)).unwrap();
    let q = zs_to_dirac(&nu).unwrap();
    let zs = ZsEvaluator::new(&coefficients(&q, 20));
    let lambda = c64(3.0, 0.0);
    let i = Complex64::i();
    let generator = ComplexMat2::new(i * lambda, c64(0.5, 0.0), c64(0.5, 0.0), -i * lambda);
    let err = (zs.evaluate_z(lambda, 1.0).unwrap() - expm(generator)).norm();
    assert!(err <= 1e-8, "{err:e}");
    let z = zs.evaluate_z_on_grid(lambda).unwrap();
    assert!(zs_residual(&z, &nu, lambda).unwrap() <= 1e-6);
}

#[test]
fn mapping_and_recursion_agree_for_polynomial_potential() {
    let grid = Grid::new(1.0, 1000).unwrap();
    let q = potential_from("x", "x", grid);
    let hom = fundamental_solution_zero(&q).unwrap();
    let coeffs = build_coefficients(&q, &hom, 4).unwrap();
    let oracle = MappingOracle::new(&q, &hom, 4).unwrap();
    for n in 0..=4 {
        let reference = coeffs.k(n as isize).unwrap();
        let diff = reference.sub(&oracle.kernel_coefficient(n).unwrap()).unwrap().l2_norm();
        assert!(diff <= 1e-8 * reference.l2_norm(), "n={n}");
    }
}
