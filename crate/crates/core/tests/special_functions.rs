use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use thermoprobe::special::{digamma, exp_integral, gamma_fn, ExpIntegralKind};
use thermoprobe::Error;

const EULER: f64 = 0.577_215_664_901_532_9;

/// ψ(z) = −γ + Σ_{n<N} [1/(n+1) − 1/(n+z)] with an Euler-Maclaurin tail.
fn digamma_series(z: Complex64) -> Complex64 {
    let n = 2000usize;
    let mut s = Complex64::new(-EULER, 0.0);
    for k in 0..n {
        s += 1.0 / (k as f64 + 1.0) - 1.0 / (k as f64 + z);
    }
    let nn = n as f64;
    let f = |x: f64| 1.0 / (x + 1.0) - 1.0 / (x + z);
    let df = |x: f64| -1.0 / ((x + 1.0) * (x + 1.0)) + 1.0 / ((x + z) * (x + z));
    let d3f = |x: f64| -6.0 / (x + 1.0).powi(4) + 6.0 / (x + z).powi(4);
    s + ((nn + z) / (nn + 1.0)).ln() + f(nn) / 2.0 - df(nn) / 12.0 + d3f(nn) / 720.0
}

/// Ei(x) = γ + ln|x| + Σ xⁿ/(n·n!)
fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 1..400 {
        term *= x / n as f64;
        let add = term / n as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    EULER + x.abs().ln() + sum
}

fn ei(x: f64) -> f64 {
    if x < 0.0 {
        exp_integral(x, ExpIntegralKind::NegativeArg).unwrap()
    } else {
        exp_integral(x, ExpIntegralKind::PrincipalValue).unwrap()
    }
}

#[test]
fn digamma_examples() {
    let one = digamma(Complex64::new(1.0, 0.0)).unwrap();
    assert_relative_eq!(one.re, -EULER, max_relative = 1e-15);
    let two = digamma(Complex64::new(2.0, 0.0)).unwrap();
    assert_relative_eq!(two.re, one.re + 1.0, max_relative = 1e-14);
    let half = digamma(Complex64::new(0.5, 0.0)).unwrap();
    assert_relative_eq!(half.re, -EULER - 2.0 * 2f64.ln(), max_relative = 1e-14);
}

#[test]
fn digamma_matches_series_oracle() {
    let points = [
        Complex64::new(0.3, 0.0),
        Complex64::new(1.0, 1.0),
        Complex64::new(-2.5, 0.7),
        Complex64::new(-0.5, -3.0),
        Complex64::new(4.2, 12.0),
        Complex64::new(25.0, -1.0),
        Complex64::new(-7.3, 0.01),
    ];
    for z in points {
        let got = digamma(z).unwrap();
        let want = digamma_series(z);
        assert!((got - want).norm() < 1e-10 * want.norm().max(1.0), "z = {z}: {got} vs {want}");
    }
}

#[test]
fn digamma_known_imaginary_part() {
    // Im ψ(1 + iy) = −1/(2y) + (π/2) coth(πy)
    for y in [0.1, 1.0, 3.0, 10.0] {
        let got = digamma(Complex64::new(1.0, y)).unwrap().im;
        let want = -0.5 / y + std::f64::consts::FRAC_PI_2 / (std::f64::consts::PI * y).tanh();
        assert_relative_eq!(got, want, max_relative = 1e-13);
    }
}

#[test]
fn digamma_pole_error() {
    for k in 0..5 {
        let z = Complex64::new(-(k as f64), 0.0);
        assert!(matches!(digamma(z), Err(Error::Pole { .. })));
    }
    assert!(digamma(Complex64::new(-3.0 + 1e-6, 0.0)).is_ok());
}

#[test]
fn ei_examples() {
    assert_relative_eq!(ei(-1.0), -0.219_383_934_395_520_26, max_relative = 1e-14);
    assert_relative_eq!(ei(1.0), 1.895_117_816_355_936_8, max_relative = 1e-14);
    assert!(ei(-50.0).abs() < 1e-20);
    assert!(ei(-50.0) < 0.0);
}

#[test]
fn ei_matches_series_oracle() {
    // the series loses digits to cancellation for large negative x
    for x in [-8.0, -3.0, -0.5, -0.01, 0.01, 0.5, 2.0, 7.0, 15.0, 30.0] {
        let tol = if x < -5.0 { 1e-9 } else { 1e-13 };
        assert_relative_eq!(ei(x), ei_series(x), max_relative = tol);
    }
}

#[test]
fn ei_domain_errors() {
    assert!(matches!(
        exp_integral(0.0, ExpIntegralKind::NegativeArg),
        Err(Error::Domain { .. })
    ));
    assert!(exp_integral(0.0, ExpIntegralKind::PrincipalValue).is_err());
    assert!(exp_integral(1.0, ExpIntegralKind::NegativeArg).is_err());
    assert!(exp_integral(-1.0, ExpIntegralKind::PrincipalValue).is_err());
}

/// Γ(s) = 2∫₀^∞ u^{2s−1} e^{−u²} du by composite Simpson.
fn gamma_quadrature(s: f64) -> f64 {
    let (n, b) = (200_000usize, 12.0);
    let h = b / n as f64;
    let f = |u: f64| if u == 0.0 { if s == 0.5 { 1.0 } else { 0.0 } } else { u.powf(2.0 * s - 1.0) * (-u * u).exp() };
    let mut sum = f(0.0) + f(b);
    for i in 1..n {
        sum += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * sum * h / 3.0
}

#[test]
fn gamma_examples_and_quadrature_oracle() {
    assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-15);
    assert_relative_eq!(gamma_fn(2.0).unwrap(), 1.0, max_relative = 1e-15);
    assert_relative_eq!(gamma_fn(0.5).unwrap(), std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    for s in [0.5, 1.5, 2.5, 3.7] {
        assert_relative_eq!(gamma_fn(s).unwrap(), gamma_quadrature(s), max_relative = 1e-10);
    }
    assert!(gamma_fn(0.0).is_err());
    assert!(gamma_fn(-1.5).is_err());
}

fn away_from_poles() -> impl Strategy<Value = Complex64> {
    (0.1f64..50.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(r, th)| Complex64::from_polar(r, th))
        .prop_filter("pole", |z| {
            let nearest = z.re.round();
            nearest > 0.0 || (z - Complex64::new(nearest, 0.0)).norm() > 0.05
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn digamma_recurrence(z in away_from_poles()) {
        let d = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - 1.0 / z;
        prop_assert!(d.norm() < 1e-12, "z = {}: residual {:e}", z, d.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn digamma_conjugation(z in away_from_poles()) {
        let d = digamma(z.conj()).unwrap() - digamma(z).unwrap().conj();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn ei_derivative_identity(x in prop_oneof![-60.0f64..-0.05, 0.05f64..60.0]) {
        // d/dx Ei(x) = eˣ/x, by a fourth-order central difference
        let h = 1e-3 * x.abs().max(1.0);
        let h = h.min(0.25 * x.abs());
        let d = (-ei(x + 2.0 * h) + 8.0 * ei(x + h) - 8.0 * ei(x - h) + ei(x - 2.0 * h)) / (12.0 * h);
        let want = x.exp() / x;
        prop_assert!(((d - want) / want).abs() < 1e-6, "x = {}: {} vs {}", x, d, want);
    }

    #[test]
    fn gamma_recurrence(s in 0.05f64..20.0) {
        let lhs = gamma_fn(s + 1.0).unwrap();
        let rhs = s * gamma_fn(s).unwrap();
        prop_assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }
}
