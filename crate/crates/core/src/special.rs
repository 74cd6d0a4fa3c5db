//! Special functions needed by the closed-form kernels and covariances:
//! complex digamma, exponential integrals and Euler's Gamma function.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Re z at which the digamma recurrence hands over to the asymptotic series.
const DIGAMMA_ASYMPTOTIC_FROM: f64 = 12.0;

/// Below this real part the reflection formula is used instead of a long
/// upward recurrence.
const DIGAMMA_REFLECT_BELOW: f64 = -64.0;

/// B_{2k} / (2k) for k = 1..=8.
const DIGAMMA_BERNOULLI: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const POLE_TOLERANCE: f64 = 1e-12;

/// Complex digamma ψ(z) = d/dz ln Γ(z).
///
/// Upward recurrence ψ(z) = ψ(z+1) − 1/z until Re z ≥ 12, then the
/// Bernoulli asymptotic series. Arguments far in the left half-plane go
/// through the reflection formula first.
pub fn digamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite("digamma argument"));
    }
    let tol = T::lit(POLE_TOLERANCE);
    if z.re <= tol && z.im.abs() < tol && (z.re - z.re.round()).abs() < tol {
        return Err(Error::Pole {
            function: "digamma",
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }

    if z.re < T::lit(DIGAMMA_REFLECT_BELOW) {
        // ψ(z) = ψ(1 − z) − π cot(πz)
        let pi = T::PI();
        let w = Complex::new(T::one(), T::zero()) - z;
        let pz = z * pi;
        let cot = pz.cos() / pz.sin();
        let value = digamma(w)? - cot * pi;
        return finite(value);
    }

    let one = T::one();
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut w = z;
    let threshold = T::lit(DIGAMMA_ASYMPTOTIC_FROM);
    while w.re < threshold {
        acc = acc - w.inv();
        w.re = w.re + one;
    }

    let inv = w.inv();
    let inv2 = inv * inv;
    // Horner in 1/w^2 over the Bernoulli tail.
    let mut tail = Complex::new(T::zero(), T::zero());
    for &b in DIGAMMA_BERNOULLI.iter().rev() {
        tail = (tail + T::lit(b)) * inv2;
    }
    let value = acc + w.ln() - inv * T::lit(0.5) - tail;
    finite(value)
}

fn finite<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite("digamma"))
    }
}

/// Which branch of the exponential integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpIntegralKind {
    /// Ei(x) for x < 0, i.e. −E₁(−x).
    NegativeArg,
    /// Cauchy principal value Ēi(x) for x > 0.
    PrincipalValue,
}

/// Exponential integral Ei(x) = −∫_{−x}^∞ e^{−t}/t dt.
pub fn exp_integral<T: Real>(x: T, kind: ExpIntegralKind) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::NonFinite("exp_integral argument"));
    }
    if x == T::zero() {
        return Err(Error::Domain {
            function: "exp_integral",
            arg: 0.0,
            reason: "logarithmic singularity at the origin",
        });
    }
    match kind {
        ExpIntegralKind::NegativeArg => {
            if x > T::zero() {
                return Err(Error::Domain {
                    function: "exp_integral",
                    arg: x.as_f64(),
                    reason: "Ei for negative arguments requires x < 0",
                });
            }
            let a = -x;
            Ok(-(e1_scaled(a) * (-a).exp()))
        }
        ExpIntegralKind::PrincipalValue => {
            if x < T::zero() {
                return Err(Error::Domain {
                    function: "exp_integral",
                    arg: x.as_f64(),
                    reason: "principal value Ei requires x > 0",
                });
            }
            let value = ei_scaled(x) * x.exp();
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite("exp_integral"))
            }
        }
    }
}

/// e^{x} E₁(x) = −e^{x} Ei(−x) for x > 0.
pub(crate) fn e1_scaled<T: Real>(x: T) -> T {
    debug_assert!(x > T::zero());
    let one = T::one();
    if x <= one {
        // E₁(x) = −γ − ln x − Σ (−x)^n / (n n!)
        let mut sum = T::zero();
        let mut term = one;
        let mut n = 1;
        loop {
            let nf = T::lit(n as f64);
            term = term * (-x) / nf;
            let contrib = term / nf;
            sum = sum + contrib;
            if contrib.abs() <= T::epsilon() * sum.abs().max(T::min_positive_value()) || n > 200 {
                break;
            }
            n += 1;
        }
        (-T::euler_gamma() - x.ln() - sum) * x.exp()
    } else {
        // Modified Lentz evaluation of
        // e^x E₁(x) = 1/(x+1 − 1²/(x+3 − 2²/(x+5 − ...)))
        let tiny = T::min_positive_value() / T::epsilon();
        let two = T::lit(2.0);
        let mut b = x + one;
        let mut c = one / tiny;
        let mut d = one / b;
        let mut h = d;
        for i in 1..1000 {
            let fi = T::lit(i as f64);
            let an = -fi * fi;
            b = b + two;
            d = one / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h = h * del;
            if (del - one).abs() <= T::epsilon() {
                break;
            }
        }
        h
    }
}

/// Largest argument for which the Ēi power series is used.
const EI_SERIES_MAX: f64 = 40.0;

/// e^{−x} Ēi(x) for x > 0.
pub(crate) fn ei_scaled<T: Real>(x: T) -> T {
    debug_assert!(x > T::zero());
    let one = T::one();
    if x <= T::lit(EI_SERIES_MAX) {
        // Ēi(x) = γ + ln x + Σ x^n / (n n!)
        let mut sum = T::zero();
        let mut term = one;
        let mut n = 1;
        loop {
            let nf = T::lit(n as f64);
            term = term * x / nf;
            let contrib = term / nf;
            sum = sum + contrib;
            if contrib <= T::epsilon() * sum || n > 500 {
                break;
            }
            n += 1;
        }
        (T::euler_gamma() + x.ln() + sum) * (-x).exp()
    } else {
        // e^{−x} Ēi(x) ~ Σ k!/x^{k+1}, truncated at the smallest term.
        let mut sum = T::zero();
        let mut term = one / x;
        let mut k = 0;
        loop {
            sum = sum + term;
            let next = term * T::lit((k + 1) as f64) / x;
            if next >= term || next <= T::epsilon() * sum {
                break;
            }
            term = next;
            k += 1;
        }
        sum
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler's Gamma function for real s > 0 (Lanczos, g = 7, n = 9).
pub fn gamma_fn<T: Real>(s: T) -> Result<T> {
    if !s.is_finite() {
        return Err(Error::NonFinite("gamma_fn argument"));
    }
    if s <= T::zero() {
        return Err(Error::Domain {
            function: "gamma_fn",
            arg: s.as_f64(),
            reason: "requires a positive argument",
        });
    }
    let value = gamma_positive(s);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("gamma_fn"))
    }
}

fn gamma_positive<T: Real>(s: T) -> T {
    let half = T::lit(0.5);
    if s < half {
        // Γ(s) Γ(1 − s) = π / sin(πs)
        let pi = T::PI();
        return pi / ((pi * s).sin() * gamma_positive(T::one() - s));
    }
    let x = s - T::one();
    let mut acc = T::lit(LANCZOS_COEFFS[0]);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    let sqrt_two_pi = (T::lit(2.0) * T::PI()).sqrt();
    sqrt_two_pi * t.powf(x + half) * (-t).exp() * acc
}
