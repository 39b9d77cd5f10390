//! Spherical Bessel functions and Legendre coefficients against
//! high-precision reference values (mpmath, 40 digits).
#![allow(clippy::excessive_precision)]

use nsbf_core::special::{legendre_monomial_coeffs, spherical_bessel_over_arg, spherical_bessel_seq};
use nsbf_core::Complex64;

/// `(Re z, Im z, n, Re j_n(z), Im j_n(z))`.
const REFERENCE: &[(f64, f64, usize, f64, f64)] = &[
    (0.5, 0.0, 0, 0.95885107720840600055, 0.0),
    (0.5, 0.0, 1, 0.16253703063606656886, 0.0),
    (0.5, 0.0, 2, 0.016371106607993412617, 0.0),
    (0.5, 0.0, 5, 2.9774668754574455816e-6, 0.0),
    (0.5, 0.0, 10, 7.064123963661878184e-14, 0.0),
    (0.5, 0.0, 20, 7.2515880810153971263e-32, 0.0),
    (0.5, 0.0, 40, 1.4053298053951285017e-73, 0.0),
    (2.0, 0.0, 0, 0.4546487134128408477, 0.0),
    (2.0, 0.0, 1, 0.43539777497999161735, 0.0),
    (2.0, 0.0, 2, 0.19844794905714657832, 0.0),
    (2.0, 0.0, 5, 0.002635169770244117349, 0.0),
    (2.0, 0.0, 10, 6.8253008649747254692e-8, 0.0),
    (2.0, 0.0, 20, 7.6326411008876086676e-20, 0.0),
    (2.0, 0.0, 40, 1.6609787786381113935e-49, 0.0),
    (10.0, 0.0, 0, -0.05440211108893698134, 0.0),
    (10.0, 0.0, 1, 0.078466941798751547092, 0.0),
    (10.0, 0.0, 2, 0.077942193628562445468, 0.0),
    (10.0, 0.0, 5, -0.055534511621452180909, 0.0),
    (10.0, 0.0, 10, 0.064605154492564264271, 0.0),
    (10.0, 0.0, 20, 2.3083719613194687167e-6, 0.0),
    (10.0, 0.0, 40, 8.435671634459208707e-22, 0.0),
    (50.5, 0.0, 0, 0.0046014606268412778993, 0.0),
    (50.5, 0.0, 1, -0.019168813947478235761, 0.0),
    (50.5, 0.0, 2, -0.0057402020494637473505, 0.0),
    (50.5, 0.0, 5, -0.017117974654484442062, 0.0),
    (50.5, 0.0, 10, -0.019431024639740760907, 0.0),
    (50.5, 0.0, 20, -0.020014150592606909407, 0.0),
    (50.5, 0.0, 40, -0.024468801483179787243, 0.0),
    (300.0, 0.0, 0, -0.0033325194663371650374, 0.0),
    (300.0, 0.0, 1, 0.000062546999374489258839, 0.0),
    (300.0, 0.0, 2, 0.00333314493633090993, 0.0),
    (300.0, 0.0, 5, -0.000093004660529591486426, 0.0),
    (300.0, 0.0, 10, 0.0032910958936502991566, 0.0),
    (300.0, 0.0, 20, -0.0025987769646236496359, 0.0),
    (300.0, 0.0, 40, 0.0030491307300798529756, 0.0),
    (1.5, 2.0, 0, 0.9827623876639857572, -1.1393138794916598145),
    (1.5, 2.0, 1, 0.96510002838761841943, 0.36550742511549381478),
    (1.5, 2.0, 2, 0.062996760885973566979, 0.47598319832270167851),
    (1.5, 2.0, 5, -0.003022416685706805228, -0.0096164117244817489096),
    (1.5, 2.0, 10, -6.92506845877020044e-7, 2.0052656929698542553e-7),
    (1.5, 2.0, 20, 6.5913800990187713095e-18, -2.5820321278457725367e-18),
    (1.5, 2.0, 40, 1.0349689310489660831e-45, -7.7612581646512906462e-46),
    (20.0, -3.0, 0, 0.47943479038050162667, -0.1324905342112306231),
    (20.0, -3.0, 1, -0.10940137866800959471, -0.48032330037887534921),
    (20.0, -3.0, 2, -0.48491443100805834437, 0.059620093060265813067),
    (20.0, -3.0, 5, 0.20545844493760582571, -0.40159832136271667956),
    (20.0, -3.0, 10, 0.27887198055845438697, -0.20628388042556029818),
    (20.0, -3.0, 20, 0.028141631664479136934, -0.056876598633352946343),
    (20.0, -3.0, 40, 1.0827589858733677975e-10, 2.1030969910473288387e-10),
    (0.001, 0.0, 0, 0.99999983333334166667, 0.0),
    (0.001, 0.0, 1, 0.00033333330000000119742, 0.0),
    (0.001, 0.0, 2, 6.6666661904762039813e-8, 0.0),
    (0.001, 0.0, 5, 9.6200092500092571772e-20, 0.0),
    (0.001, 0.0, 10, 7.2730917874467316029e-41, 0.0),
    (0.001, 0.0, 20, 7.6259789162179717734e-86, 0.0),
    (0.001, 0.0, 40, 1.5475053200435518491e-181, 0.0),
];

#[test]
fn bessel_matches_reference() {
    for &(re, im, n, want_re, want_im) in REFERENCE {
        let z = Complex64::new(re, im);
        let seq = spherical_bessel_seq(z, 40).unwrap();
        let want = Complex64::new(want_re, want_im);
        let got = seq.get(n);
        let err = (got - want).norm();
        // in the oscillatory range values pass through zero; compare with the envelope 1/|z|
        let envelope = if (n as f64) < z.norm() { 1.0 / z.norm() } else { 0.0 };
        assert!(
            err <= 1e-13 * (want.norm() + envelope) + 1e-300,
            "j_{n}({z}) = {got}, expected {want} (error {err:e})"
        );
    }
}

#[test]
fn bessel_over_argument_at_two() {
    // j_1(2)/2 = (sin 2/4 - cos 2/2)/2
    let v = spherical_bessel_over_arg(Complex64::new(2.0, 0.0), 3).unwrap();
    assert!((v[1].re - 0.2176988874899958).abs() < 1e-15);
}

#[test]
fn legendre_rows_against_exact_values() {
    let t = legendre_monomial_coeffs(8).unwrap();
    // P_8 = (6435 x^8 - 12012 x^6 + 6930 x^4 - 1260 x^2 + 35)/128
    let p8 = [35.0, 0.0, -1260.0, 0.0, 6930.0, 0.0, -12012.0, 0.0, 6435.0];
    for (k, c) in p8.iter().enumerate() {
        assert_eq!(t.coeff(k, 8), c / 128.0);
    }
    let sum: f64 = t.row(8).iter().map(|c| c.abs()).sum();
    assert!((sum - 26672.0 / 128.0).abs() < 1e-12);
}
