//! Bath spectral densities and the Fourier-space dissipation kernel χ̃(ω).

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::scalar::Real;
use crate::special::{e1_scaled, ei_scaled, gamma_fn};

/// Above this ω/ω_c the exponential-cutoff kernels switch to their
/// large-argument expansions, which avoid the γω_c − γω_c cancellation.
const KERNEL_ASYMPTOTIC_FROM: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum SpectralKind<T> {
    /// J(ω) = 2γω ω_c² / (ω² + ω_c²)
    LorentzDrude,
    /// J(ω) = (π/2) γ ω^s ω_c^{1−s} e^{−ω/ω_c}
    ExpCutoff { s: T },
}

/// Coupling spectrum of the sample, an immutable value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralModel<T> {
    pub kind: SpectralKind<T>,
    pub gamma: T,
    pub omega_c: T,
    /// Re χ̃ is obtained from the principal-value integral instead of a
    /// closed form (exponential cutoff with s ∉ {1, 2}).
    pub numeric_kernel: bool,
}

fn check_positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(name, v.as_f64(), "must be positive and finite"))
    }
}

impl<T: Real> SpectralModel<T> {
    pub fn lorentz_drude(gamma: T, omega_c: T) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("omega_c", omega_c)?;
        Ok(Self {
            kind: SpectralKind::LorentzDrude,
            gamma,
            omega_c,
            numeric_kernel: false,
        })
    }

    /// Exponential cutoff with Ohmicity s ∈ {1, 2}, the two cases with a
    /// closed-form Re χ̃.
    pub fn exp_cutoff(gamma: T, omega_c: T, s: T) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("omega_c", omega_c)?;
        if s != T::one() && s != T::lit(2.0) {
            return Err(Error::invalid(
                "s",
                s.as_f64(),
                "closed-form kernels exist for s = 1 and s = 2 only; use exp_cutoff_numeric",
            ));
        }
        Ok(Self {
            kind: SpectralKind::ExpCutoff { s },
            gamma,
            omega_c,
            numeric_kernel: false,
        })
    }

    /// Exponential cutoff with any s ≥ 1; Re χ̃ comes from the
    /// Kramers-Kronig integral at every frequency (slow).
    pub fn exp_cutoff_numeric(gamma: T, omega_c: T, s: T) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("omega_c", omega_c)?;
        if !(s.is_finite() && s >= T::one()) {
            return Err(Error::invalid("s", s.as_f64(), "Ohmicity must satisfy s >= 1"));
        }
        Ok(Self {
            kind: SpectralKind::ExpCutoff { s },
            gamma,
            omega_c,
            numeric_kernel: true,
        })
    }

    /// Same spectrum shape with a different dissipation strength.
    pub fn with_gamma(&self, gamma: T) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(Self { gamma, ..*self })
    }

    pub fn is_lorentz_drude(&self) -> bool {
        matches!(self.kind, SpectralKind::LorentzDrude)
    }

    /// Short identifier used in output files.
    pub fn id(&self) -> String {
        match self.kind {
            SpectralKind::LorentzDrude => "lorentz-drude".to_string(),
            SpectralKind::ExpCutoff { s } => format!("exp-cutoff-s{}", s),
        }
    }

    fn density(&self, omega: T) -> T {
        let (g, wc) = (self.gamma, self.omega_c);
        match self.kind {
            SpectralKind::LorentzDrude => T::lit(2.0) * g * omega * wc * wc / (omega * omega + wc * wc),
            SpectralKind::ExpCutoff { s } => {
                if omega == T::zero() {
                    return T::zero();
                }
                let x = omega / wc;
                T::FRAC_PI_2() * g * wc * x.powf(s) * (-x).exp()
            }
        }
    }

    /// J(ω) for ω ≥ 0.
    pub fn spectral_density(&self, omega: T) -> Result<T> {
        if !(omega >= T::zero()) {
            return Err(Error::Domain {
                function: "spectral_density",
                arg: omega.as_f64(),
                reason: "frequency must be non-negative",
            });
        }
        Ok(self.density(omega))
    }

    /// Im χ̃(ω) = J(ω)Θ(ω) − J(−ω)Θ(−ω), an odd function.
    pub fn chi_imag(&self, omega: T) -> T {
        if omega >= T::zero() {
            self.density(omega)
        } else {
            -self.density(-omega)
        }
    }

    /// Re χ̃(ω), an even function with Re χ̃(0) = ω_R².
    pub fn chi_real(&self, omega: T) -> Result<T> {
        if self.numeric_kernel {
            return self.kramers_kronig_numeric(omega);
        }
        Ok(self.chi_real_closed(omega.abs()))
    }

    fn chi_real_closed(&self, w: T) -> T {
        let (g, wc) = (self.gamma, self.omega_c);
        let half = T::lit(0.5);
        match self.kind {
            SpectralKind::LorentzDrude => T::lit(2.0) * g * wc * wc * wc / (wc * wc + w * w),
            SpectralKind::ExpCutoff { s } => {
                let x = w / wc;
                if x == T::zero() {
                    return g * wc;
                }
                let ohmic = s == T::one();
                if x > T::lit(KERNEL_ASYMPTOTIC_FROM) {
                    return -g * wc * exp_kernel_tail(x, ohmic);
                }
                // e^{-x} Ēi(x) and e^{x} Ei(−x) = −e^{x} E₁(x)
                let a = ei_scaled(x);
                let b = e1_scaled(x);
                if ohmic {
                    g * wc - half * g * w * (a + b)
                } else {
                    g * wc - half * g / wc * w * w * (a - b)
                }
            }
        }
    }

    /// ω_R² − Re χ̃(ω), evaluated without subtracting the two large terms.
    pub(crate) fn counterterm_residual(&self, omega: T) -> Result<T> {
        let w = omega.abs();
        if self.numeric_kernel {
            return Ok(self.renormalization_freq_sq() - self.kramers_kronig_numeric(w)?);
        }
        let (g, wc) = (self.gamma, self.omega_c);
        let half = T::lit(0.5);
        Ok(match self.kind {
            SpectralKind::LorentzDrude => T::lit(2.0) * g * wc * w * w / (wc * wc + w * w),
            SpectralKind::ExpCutoff { s } => {
                let x = w / wc;
                if x == T::zero() {
                    return Ok(T::zero());
                }
                let ohmic = s == T::one();
                if x > T::lit(KERNEL_ASYMPTOTIC_FROM) {
                    return Ok(g * wc * (T::one() + exp_kernel_tail(x, ohmic)));
                }
                let a = ei_scaled(x);
                let b = e1_scaled(x);
                if ohmic {
                    half * g * w * (a + b)
                } else {
                    half * g / wc * w * w * (a - b)
                }
            }
        })
    }

    /// χ̃(ω) = Re χ̃(ω) + i Im χ̃(ω).
    pub fn chi_fourier(&self, omega: T) -> Result<Complex<T>> {
        Ok(Complex::new(self.chi_real(omega)?, self.chi_imag(omega)))
    }

    /// ω_R² = (2/π) ∫₀^∞ J(ω)/ω dω.
    pub fn renormalization_freq_sq(&self) -> T {
        match self.kind {
            SpectralKind::LorentzDrude => T::lit(2.0) * self.gamma * self.omega_c,
            SpectralKind::ExpCutoff { s } => {
                // s ≥ 1 is enforced at construction, so Γ(s) is finite.
                self.gamma * self.omega_c * gamma_fn(s).expect("s >= 1")
            }
        }
    }

    /// Re χ̃(ω) from the Kramers-Kronig principal-value integral
    /// (1/π) P∫ dω′ Im χ̃(ω′)/(ω′ − ω), folded onto ω′ > 0.
    ///
    /// A window of half-width ε = 1e-4·max(1, |ω|) around the pole is cut
    /// out and replaced by its leading contribution 2ε f′(ω), where f is the
    /// regular part of the integrand; f′ comes from a central difference of
    /// J. Only J enters, never the closed-form kernels.
    pub fn kramers_kronig_numeric(&self, omega: T) -> Result<T> {
        let w = omega.abs();
        let tol = Tolerance::new(T::lit(1e-15) * self.gamma * self.omega_c, T::lit(1e-12));
        let two = T::lit(2.0);
        let wc = self.omega_c;
        if w == T::zero() {
            let f = |x: T| if x == T::zero() { T::zero() } else { self.density(x) / x };
            let head = integrate(f, &[T::zero(), wc, T::lit(10.0) * wc], &tol)?;
            let tail = integrate_to_infinity(f, T::lit(10.0) * wc, &tol)?;
            return Ok(two / T::PI() * (head.value + tail.value));
        }

        let mut eps = T::lit(1e-4) * w.max(T::one());
        if eps > w * T::lit(0.5) {
            eps = w * T::lit(0.5);
        }
        // regular part: f(x) = 2x J(x) / (x + ω), integrand f(x)/(x − ω)
        let regular = |x: T| two * x * self.density(x) / (x + w);
        let integrand = |x: T| regular(x) / (x - w);

        let left_end = w - eps;
        let mut left_pts = vec![T::zero()];
        if wc < left_end {
            left_pts.push(wc);
        }
        left_pts.push(left_end);
        let left = integrate(integrand, &left_pts, &tol)?;

        let right_start = w + eps;
        let far_start = (two * w + eps).max(T::lit(10.0) * wc);
        let mut right_pts = vec![right_start, two * w + eps, far_start];
        if wc > right_start {
            right_pts.push(wc);
        }
        right_pts.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
        right_pts.dedup();
        let near = integrate(integrand, &right_pts, &tol)?;
        let far = integrate_to_infinity(integrand, far_start, &tol)?;

        let derivative = (regular(w + eps) - regular(w - eps)) / (two * eps);
        let window = two * eps * derivative;
        Ok((left.value + near.value + far.value + window) / T::PI())
    }
}

/// −Re χ̃/(γω_c) for x = ω/ω_c ≫ 1 from the large-argument expansions of
/// e^{∓x}Ēi(±x): Σ_{k even ≥ 2} k!/x^k (s = 1) and Σ_{k odd ≥ 3} k!/x^{k−1}
/// (s = 2), truncated at the smallest term.
fn exp_kernel_tail<T: Real>(x: T, ohmic: bool) -> T {
    let inv = x.recip();
    let inv2 = inv * inv;
    // first term: 2!/x² (s = 1) or 3!/x² (s = 2)
    let (mut term, mut k) = if ohmic { (T::lit(2.0) * inv2, 2u32) } else { (T::lit(6.0) * inv2, 3u32) };
    let mut sum = T::zero();
    loop {
        sum = sum + term;
        let next = term * T::lit(((k + 1) * (k + 2)) as f64) * inv2;
        if next >= term || next <= T::epsilon() * sum {
            break;
        }
        term = next;
        k += 2;
    }
    sum
}
