//! Temperature-estimation precision: Gaussian fidelity, quantum Fisher
//! information and the thermal sensitivities of H_p and x².

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SpectralModel;
use crate::steady_state::{CovarianceMatrix, ProbeSpec, Route, SteadyState};

/// Steady states as a smooth function of temperature near a reference point.
pub trait ThermalFamily<T: Real> {
    fn reference_temperature(&self) -> T;
    fn reference_covariance(&self) -> CovarianceMatrix<T>;
    fn covariance_at(&self, temp: T) -> Result<CovarianceMatrix<T>>;
    fn omega0(&self) -> T;
}

impl<T: Real> ThermalFamily<T> for SteadyState<T> {
    fn reference_temperature(&self) -> T {
        self.reference_temperature
    }
    fn reference_covariance(&self) -> CovarianceMatrix<T> {
        self.covariance
    }
    fn covariance_at(&self, temp: T) -> Result<CovarianceMatrix<T>> {
        self.at(temp)
    }
    fn omega0(&self) -> T {
        self.probe.omega0
    }
}

/// Relative temperature step of the finite differences.
pub const STEP_REL: f64 = 1e-3;

/// Absolute floor of the QFI step, in units of ω₀.
pub const STEP_FLOOR: f64 = 1e-7;

/// Agreement required between the two Richardson estimates.
pub const RICHARDSON_AGREEMENT: f64 = 1e-3;

/// Slack of the bound F_T(O) ≤ 𝓕_T.
pub const BOUND_SLACK: f64 = 1e-3;

/// 1 − 𝔽(σ₁, σ₂), computed from the differences of the two matrices.
///
/// With p_i = 4 det σ_i − 1, u = √(Δ + Λ) and v = √Λ,
/// 1 − 𝔽 = 4K / ((u + v + 2)(u − v)) where
/// K = (√p₁ − √p₂)²/2 − det(σ₁ − σ₂).
pub fn fidelity_deficit<T: Real>(s1: &CovarianceMatrix<T>, s2: &CovarianceMatrix<T>) -> Result<T> {
    s1.check_physical()?;
    s2.check_physical()?;
    let four = T::lit(4.0);
    let p1 = (four * s1.det() - T::one()).max(T::zero());
    let p2 = (four * s2.det() - T::one()).max(T::zero());
    let dxx = s1.sigma_xx - s2.sigma_xx;
    let dpp = s1.sigma_pp - s2.sigma_pp;
    let dxp = s1.sigma_xp - s2.sigma_xp;
    // p₁ − p₂ = 4(det σ₁ − det σ₂), expanded in the differences
    let ddet = s1.sigma_xx * dpp + s2.sigma_pp * dxx - dxp * (s1.sigma_xp + s2.sigma_xp);
    let root_sum = p1.sqrt() + p2.sqrt();
    let root_diff = if root_sum > T::zero() { four * ddet / root_sum } else { T::zero() };
    let k = T::lit(0.5) * root_diff * root_diff - (dxx * dpp - dxp * dxp);

    let sum = CovarianceMatrix::new(
        s1.sigma_xx + s2.sigma_xx,
        s1.sigma_pp + s2.sigma_pp,
        s1.sigma_xp + s2.sigma_xp,
    );
    let delta = four * sum.det();
    let lambda = p1 * p2;
    let u = (delta + lambda).sqrt();
    let v = lambda.sqrt();
    let deficit = four * k / ((u + v + T::lit(2.0)) * (u - v));
    if deficit.is_finite() {
        Ok(deficit)
    } else {
        Err(Error::NonFinite("fidelity"))
    }
}

/// Uhlmann fidelity 𝔽 = 2/(√(Δ + Λ) − √Λ) of two zero-mean single-mode
/// Gaussian states, Δ = 4 det(σ₁ + σ₂), Λ = (4 det σ₁ − 1)(4 det σ₂ − 1).
pub fn gaussian_fidelity<T: Real>(s1: &CovarianceMatrix<T>, s2: &CovarianceMatrix<T>) -> Result<T> {
    Ok(T::one() - fidelity_deficit(s1, s2)?)
}

/// 𝓕_T^{eq}(ω) = (ω²/4T⁴) csch²(ω/2T), the QFI of a thermal oscillator.
pub fn qfi_equilibrium<T: Real>(omega: T, temp: T) -> Result<T> {
    for (name, v) in [("omega", omega), ("temperature", temp)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(name, v.as_f64(), "must be positive and finite"));
        }
    }
    let x = omega / (T::lit(2.0) * temp);
    let t2 = temp * temp;
    // csch²x = 4e^{−2x}/(1 − e^{−2x})², safe for large x
    let e = (-T::lit(2.0) * x).exp();
    let csch2 = T::lit(4.0) * e / ((T::one() - e) * (T::one() - e));
    Ok(omega * omega / (T::lit(4.0) * t2 * t2) * csch2)
}

/// δT/T = 1/(T√𝓕_T); infinite when the QFI vanishes.
pub fn relative_error<T: Real>(qfi: T, temp: T) -> Result<T> {
    if !(qfi >= T::zero()) {
        return Err(Error::invalid("qfi", qfi.as_f64(), "must be non-negative"));
    }
    if !(temp > T::zero()) {
        return Err(Error::invalid("temperature", temp.as_f64(), "must be positive"));
    }
    if qfi == T::zero() {
        return Ok(T::infinity());
    }
    Ok((temp * qfi.sqrt()).recip())
}

/// Observables whose thermal sensitivity is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// H_p = ½(ω₀² x² + p²)
    Energy,
    XSquared,
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Observable::Energy => "H_p",
            Observable::XSquared => "x^2",
        }
    }

    pub fn mean<T: Real>(&self, sigma: &CovarianceMatrix<T>, omega0: T) -> T {
        match self {
            Observable::Energy => T::lit(0.5) * (omega0 * omega0 * sigma.sigma_xx + sigma.sigma_pp),
            Observable::XSquared => sigma.sigma_xx,
        }
    }

    /// Variance in a zero-mean Gaussian state with σ_xp = 0.
    pub fn variance<T: Real>(&self, sigma: &CovarianceMatrix<T>, omega0: T) -> T {
        let half = T::lit(0.5);
        match self {
            Observable::Energy => {
                let w2 = omega0 * omega0;
                half * (w2 * w2 * sigma.sigma_xx * sigma.sigma_xx + sigma.sigma_pp * sigma.sigma_pp)
                    - w2 / T::lit(4.0)
            }
            Observable::XSquared => T::lit(2.0) * sigma.sigma_xx * sigma.sigma_xx,
        }
    }
}

/// Steady states at T ± h, T ± h/2, T ± h/4 around a reference point.
struct Stencil<T> {
    temp: T,
    step: T,
    center: CovarianceMatrix<T>,
    /// (σ(T + h/2^k), σ(T − h/2^k)) for k = 0, 1, 2
    pairs: [(CovarianceMatrix<T>, CovarianceMatrix<T>); 3],
}

impl<T: Real> Stencil<T> {
    fn new<F: ThermalFamily<T> + ?Sized>(family: &F, step: T) -> Result<Self> {
        let temp = family.reference_temperature();
        if !(step > T::zero() && step < temp) {
            return Err(Error::invalid("step", step.as_f64(), "must lie in (0, T)"));
        }
        let center = family.reference_covariance();
        let mut pairs = [(center, center); 3];
        for (k, pair) in pairs.iter_mut().enumerate() {
            let h = step / T::lit((1u32 << k) as f64);
            *pair = (family.covariance_at(temp + h)?, family.covariance_at(temp - h)?);
        }
        Ok(Self {
            temp,
            step,
            center,
            pairs,
        })
    }

    fn h(&self, k: usize) -> T {
        self.step / T::lit((1u32 << k) as f64)
    }
}

/// Two Richardson estimates from three step sizes, accepted when they
/// agree; returns the first estimate and the gap between the two.
fn richardson<T: Real>(q: [T; 3], step: T, noise: T) -> Result<(T, T)> {
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let first = (four * q[1] - q[0]) / three;
    let second = (four * q[2] - q[1]) / three;
    let gap = (first - second).abs();
    if gap <= T::lit(RICHARDSON_AGREEMENT) * first.abs() || gap <= noise {
        Ok((first, gap))
    } else {
        Err(Error::StepNotConverged {
            first: first.as_f64(),
            second: second.as_f64(),
            step: step.as_f64(),
        })
    }
}

fn qfi_from_stencil<T: Real>(s: &Stencil<T>) -> Result<(T, T)> {
    let mut q = [T::zero(); 3];
    for (k, (plus, minus)) in s.pairs.iter().enumerate() {
        let h = s.h(k);
        let d = fidelity_deficit(&s.center, plus)? + fidelity_deficit(&s.center, minus)?;
        q[k] = T::lit(2.0) * d / (h * h);
    }
    // estimates below ε/T² carry no information and are pure rounding
    let noise = T::epsilon() / (s.temp * s.temp);
    richardson(q, s.step, noise)
}

fn derivative_from_stencil<T: Real>(s: &Stencil<T>, f: impl Fn(&CovarianceMatrix<T>) -> T) -> Result<T> {
    let mut d = [T::zero(); 3];
    for (k, (plus, minus)) in s.pairs.iter().enumerate() {
        d[k] = (f(plus) - f(minus)) / (T::lit(2.0) * s.h(k));
    }
    let noise = T::lit(64.0) * T::epsilon() * f(&s.center).abs() / s.h(2);
    richardson(d, s.step, noise).map(|r| r.0)
}

fn qfi_step<T: Real>(temp: T, omega0: T) -> T {
    (T::lit(STEP_REL) * temp).max(T::lit(STEP_FLOOR) * omega0)
}

/// 𝓕_T from the fidelity between steady states at T and T ± δ:
/// 𝓕_T ≈ 2[(1 − 𝔽₊) + (1 − 𝔽₋)]/δ², Richardson-extrapolated over
/// δ, δ/2 and checked against δ/2, δ/4.
pub fn qfi_of_family<T: Real, F: ThermalFamily<T> + ?Sized>(family: &F) -> Result<T> {
    let step = qfi_step(family.reference_temperature(), family.omega0());
    Ok(qfi_from_stencil(&Stencil::new(family, step)?)?.0.max(T::zero()))
}

/// [`qfi_of_family`] on the preferred route for `model`.
pub fn qfi_from_fidelity<T: Real>(model: &SpectralModel<T>, probe: &ProbeSpec<T>, temp: T) -> Result<T> {
    qfi_of_family(&SteadyState::new(model, probe, temp, Route::preferred(model))?)
}

/// F_T(O) = |∂_T⟨O⟩|²/Var(O) for a steady-state family.
pub fn sensitivity_of_family<T: Real, F: ThermalFamily<T> + ?Sized>(observable: Observable, family: &F) -> Result<T> {
    let step = T::lit(STEP_REL) * family.reference_temperature();
    sensitivity_from_stencil(observable, &Stencil::new(family, step)?, family.omega0())
}

fn sensitivity_from_stencil<T: Real>(observable: Observable, s: &Stencil<T>, omega0: T) -> Result<T> {
    let slope = derivative_from_stencil(s, |c| observable.mean(c, omega0))?;
    let var = observable.variance(&s.center, omega0);
    if !(var > T::zero()) {
        return Err(Error::VanishingVariance);
    }
    Ok(slope * slope / var)
}

/// [`sensitivity_of_family`] on the preferred route for `model`.
pub fn sensitivity<T: Real>(
    observable: Observable,
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    temp: T,
) -> Result<T> {
    sensitivity_of_family(observable, &SteadyState::new(model, probe, temp, Route::preferred(model))?)
}

/// QFI, both sensitivities and δT/T at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport<T> {
    pub model: String,
    pub gamma: T,
    pub omega_c: T,
    pub omega0: T,
    pub temperature: T,
    pub sigma_xx: T,
    pub sigma_pp: T,
    pub qfi: T,
    /// Gap between the two Richardson estimates of the QFI.
    pub qfi_error: T,
    pub f_energy: T,
    pub f_xsq: T,
    pub rel_error: T,
}

impl<T: Real> SensitivityReport<T> {
    /// Both sensitivities within [`BOUND_SLACK`] of the QFI.
    pub fn check_bound_chain(&self) -> Result<()> {
        let limit = self.qfi * (T::one() + T::lit(BOUND_SLACK)) + T::epsilon() / (self.temperature * self.temperature);
        for (name, f) in [(Observable::Energy.name(), self.f_energy), (Observable::XSquared.name(), self.f_xsq)] {
            if f > limit {
                return Err(Error::BoundChain {
                    observable: name,
                    sensitivity: f.as_f64(),
                    qfi: self.qfi.as_f64(),
                });
            }
        }
        Ok(())
    }
}

/// Full report for one steady-state family; fails if the bound chain
/// F_T(O) ≤ 𝓕_T is violated beyond numerical slack.
pub fn report_of_state<T: Real>(state: &SteadyState<T>) -> Result<SensitivityReport<T>> {
    let temp = state.reference_temperature;
    let w0 = state.probe.omega0;
    let sens_step = T::lit(STEP_REL) * temp;
    let qfi_stencil = Stencil::new(state, qfi_step(temp, w0))?;
    let (qfi, qfi_error) = qfi_from_stencil(&qfi_stencil)?;
    let qfi = qfi.max(T::zero());
    let sens_stencil = if qfi_stencil.step == sens_step {
        qfi_stencil
    } else {
        Stencil::new(state, sens_step)?
    };
    let report = SensitivityReport {
        model: state.model.id(),
        gamma: state.model.gamma,
        omega_c: state.model.omega_c,
        omega0: w0,
        temperature: temp,
        sigma_xx: state.covariance.sigma_xx,
        sigma_pp: state.covariance.sigma_pp,
        qfi,
        qfi_error,
        f_energy: sensitivity_from_stencil(Observable::Energy, &sens_stencil, w0)?,
        f_xsq: sensitivity_from_stencil(Observable::XSquared, &sens_stencil, w0)?,
        rel_error: relative_error(qfi, temp)?,
    };
    report.check_bound_chain()?;
    Ok(report)
}

/// [`report_of_state`] for a parameter point.
pub fn sensitivity_report<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    temp: T,
    route: Route,
) -> Result<SensitivityReport<T>> {
    report_of_state(&SteadyState::new(model, probe, temp, route)?)
}
