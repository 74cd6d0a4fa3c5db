//! Stationary second moments of the probe.
//!
//! Two exact routes are provided: adaptive quadrature of the
//! fluctuation-dissipation integral (any spectral model) and, for the
//! Lorentz-Drude bath, a Matsubara sum resummed into complex digamma
//! functions. A low-temperature approximation and the Gibbs-state
//! moments complete the set of references.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Partition, Tolerance};
use crate::scalar::Real;
use crate::special::digamma;
use crate::spectral::SpectralModel;

/// Slack on the uncertainty relation det σ ≥ 1/4.
pub const PHYSICALITY_SLACK: f64 = 1e-9;

/// Upper end of the finite quadrature panel, in units of ω_c.
const FINITE_PANEL_CUTOFFS: f64 = 20.0;

/// Below ω = 1e-3·T, coth(ω/2T) is replaced by its Laurent expansion.
const COTH_LAURENT_BELOW: f64 = 1e-3;

const QUADRATURE_REL: f64 = 1e-11;

/// Relative separation under which cubic roots count as degenerate.
const ROOT_SEPARATION: f64 = 1e-10;

const CUBIC_RESIDUAL: f64 = 1e-9;

const IMAGINARY_RESIDUE: f64 = 1e-9;

/// Bare probe: unit mass, frequency ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSpec<T> {
    pub omega0: T,
}

impl<T: Real> ProbeSpec<T> {
    pub fn new(omega0: T) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > T::zero()) {
            return Err(Error::invalid("omega0", omega0.as_f64(), "must be positive and finite"));
        }
        Ok(Self { omega0 })
    }
}

/// Symmetrized second moments of an undisplaced single-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceMatrix<T> {
    pub sigma_xx: T,
    pub sigma_pp: T,
    pub sigma_xp: T,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn new(sigma_xx: T, sigma_pp: T, sigma_xp: T) -> Self {
        Self {
            sigma_xx,
            sigma_pp,
            sigma_xp,
        }
    }

    pub fn diagonal(sigma_xx: T, sigma_pp: T) -> Self {
        Self::new(sigma_xx, sigma_pp, T::zero())
    }

    pub fn det(&self) -> T {
        self.sigma_xx * self.sigma_pp - self.sigma_xp * self.sigma_xp
    }

    /// Positive diagonal and det σ ≥ 1/4 up to [`PHYSICALITY_SLACK`].
    pub fn is_physical(&self) -> bool {
        self.sigma_xx > T::zero()
            && self.sigma_pp > T::zero()
            && self.det() >= T::lit(0.25 - PHYSICALITY_SLACK)
    }

    pub fn check_physical(&self) -> Result<Self> {
        if !(self.sigma_xx.is_finite() && self.sigma_pp.is_finite() && self.sigma_xp.is_finite()) {
            return Err(Error::NonFinite("covariance matrix"));
        }
        if self.is_physical() {
            Ok(*self)
        } else {
            Err(Error::Unphysical {
                det: self.det().as_f64(),
            })
        }
    }

    /// Largest relative deviation between corresponding entries, with the
    /// off-diagonal measured against the diagonal scale.
    pub fn max_rel_diff(&self, other: &Self) -> T {
        let rel = |a: T, b: T| (a - b).abs() / a.abs().max(b.abs());
        let scale = (self.sigma_xx * self.sigma_pp).sqrt();
        rel(self.sigma_xx, other.sigma_xx)
            .max(rel(self.sigma_pp, other.sigma_pp))
            .max((self.sigma_xp - other.sigma_xp).abs() / scale)
    }
}

fn check_temperature<T: Real>(temp: T) -> Result<()> {
    if temp.is_finite() && temp > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid("temperature", temp.as_f64(), "must be positive and finite"))
    }
}

/// coth(ω/2T) for ω > 0.
fn coth_half<T: Real>(omega: T, temp: T) -> T {
    if omega < T::lit(COTH_LAURENT_BELOW) * temp {
        T::lit(2.0) * temp / omega + omega / (T::lit(6.0) * temp)
    } else {
        (omega / (T::lit(2.0) * temp)).tanh().recip()
    }
}

/// α(ω) = ω₀² + ω_R² − ω² − χ̃(ω).
pub fn alpha<T: Real>(model: &SpectralModel<T>, probe: &ProbeSpec<T>, omega: T) -> Result<Complex<T>> {
    let w0 = probe.omega0;
    let re = (w0 - omega) * (w0 + omega) + model.counterterm_residual(omega)?;
    Ok(Complex::new(re, -model.chi_imag(omega)))
}

/// Which moment an integrand computes.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Moment {
    Position,
    Momentum,
}

/// Integrand of σ_xx or σ_pp; `temp = None` means coth → 1.
fn integrand<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    moment: Moment,
    temp: Option<T>,
    omega: T,
) -> Result<T> {
    // The integrand is finite at ω = 0; nudge off the endpoint so that the
    // J(ω)·coth(ω/2T) product is formed from a nonzero ω.
    let w = omega.max(T::min_positive_value().sqrt());
    let a = alpha(model, probe, w)?;
    let j = model.chi_imag(w);
    let thermal = match temp {
        Some(t) => coth_half(w, t),
        None => T::one(),
    };
    let base = j * thermal / a.norm_sqr();
    Ok(match moment {
        Moment::Position => base,
        Moment::Momentum => base * w * w,
    } * T::FRAC_1_PI())
}

/// Zero of Re α(ω) on ω > 0, the position of the resonance peak.
fn resonance<T: Real>(model: &SpectralModel<T>, probe: &ProbeSpec<T>) -> Result<T> {
    let re_alpha = |w: T| -> Result<T> { Ok(alpha(model, probe, w)?.re) };
    let mut lo = T::zero();
    let mut hi = probe.omega0;
    let mut grow = 0;
    while re_alpha(hi)? > T::zero() {
        lo = hi;
        hi = hi * T::lit(2.0);
        grow += 1;
        if grow > 200 {
            return Err(Error::NonFinite("resonance search"));
        }
    }
    for _ in 0..200 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if re_alpha(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}

/// Breakpoints of the finite panel [0, 20ω_c].
fn breakpoints<T: Real>(model: &SpectralModel<T>, probe: &ProbeSpec<T>, temp: Option<T>) -> Result<Vec<T>> {
    let top = T::lit(FINITE_PANEL_CUTOFFS) * model.omega_c;
    let peak = resonance(model, probe)?;
    let width = (model.chi_imag(peak) / (T::lit(2.0) * peak)).max(T::epsilon() * peak);
    let mut pts = vec![T::zero(), top, peak, model.omega_c];
    for k in [1.0, 10.0, 100.0] {
        pts.push(peak - T::lit(k) * width);
        pts.push(peak + T::lit(k) * width);
    }
    if let Some(t) = temp {
        pts.push(t);
        pts.push(T::lit(10.0) * t);
    }
    pts.retain(|&p| p >= T::zero() && p <= top);
    pts.sort_by(|a, b| a.as_f64().total_cmp(&b.as_f64()));
    pts.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12) * top);
    Ok(pts)
}

/// Adaptive partitions of one moment, frozen for re-evaluation.
#[derive(Debug, Clone)]
struct FrozenMoment<T> {
    finite: Partition<T>,
    tail: Partition<T>,
}

/// Result of the quadrature route, with its frozen partitions.
///
/// [`NumericCovariance::at_temperature`] re-applies the same rule on the
/// same segments at another temperature, which makes the result a smooth
/// function of T, as finite differences require.
#[derive(Debug, Clone)]
pub struct NumericCovariance<T> {
    pub covariance: CovarianceMatrix<T>,
    /// Absolute error estimates of σ_xx and σ_pp.
    pub error_xx: T,
    pub error_pp: T,
    pub evaluations: usize,
    model: SpectralModel<T>,
    probe: ProbeSpec<T>,
    xx: FrozenMoment<T>,
    pp: FrozenMoment<T>,
}

impl<T: Real> NumericCovariance<T> {
    /// σ at `temp` on the frozen partitions (`None` for T = 0).
    pub fn at_temperature(&self, temp: Option<T>) -> Result<CovarianceMatrix<T>> {
        if let Some(t) = temp {
            check_temperature(t)?;
        }
        let xx = self.frozen_moment(&self.xx, Moment::Position, temp)?;
        let pp = self.frozen_moment(&self.pp, Moment::Momentum, temp)?;
        Ok(CovarianceMatrix::diagonal(xx, pp))
    }

    fn frozen_moment(&self, frozen: &FrozenMoment<T>, moment: Moment, temp: Option<T>) -> Result<T> {
        let mut failure = None;
        let mut f = |w: T| match integrand(&self.model, &self.probe, moment, temp, w) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        };
        let value = frozen.finite.evaluate(&mut f) + frozen.tail.evaluate(&mut f);
        match failure {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

fn integrate_moment<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    moment: Moment,
    temp: Option<T>,
    points: &[T],
) -> Result<(T, T, usize, FrozenMoment<T>)> {
    let mut failure = None;
    let mut f = |w: T| match integrand(model, probe, moment, temp, w) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            T::zero()
        }
    };
    let rel = T::lit(QUADRATURE_REL);
    let finite = integrate(&mut f, points, &Tolerance::new(T::zero(), rel))?;
    let top = *points.last().expect("nonempty breakpoints");
    let tail_tol = Tolerance::new(rel * finite.value.abs(), rel);
    let tail = integrate_to_infinity(&mut f, top, &tail_tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((
        finite.value + tail.value,
        finite.error + tail.error,
        finite.evaluations + tail.evaluations,
        FrozenMoment {
            finite: finite.partition,
            tail: tail.partition,
        },
    ))
}

fn numeric_route<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    temp: Option<T>,
) -> Result<NumericCovariance<T>> {
    let points = breakpoints(model, probe, temp)?;
    let (xx, exx, nxx, fxx) = integrate_moment(model, probe, Moment::Position, temp, &points)?;
    let (pp, epp, npp, fpp) = integrate_moment(model, probe, Moment::Momentum, temp, &points)?;
    let covariance = CovarianceMatrix::diagonal(xx, pp).check_physical()?;
    Ok(NumericCovariance {
        covariance,
        error_xx: exx,
        error_pp: epp,
        evaluations: nxx + npp,
        model: *model,
        probe: *probe,
        xx: fxx,
        pp: fpp,
    })
}

/// σ_xx = (1/π)∫₀^∞ J(ω) coth(ω/2T)/|α(ω)|² dω and σ_pp with an extra ω²,
/// by adaptive Gauss-Kronrod quadrature.
pub fn covariance_numeric<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    temp: T,
) -> Result<NumericCovariance<T>> {
    check_temperature(temp)?;
    numeric_route(model, probe, Some(temp))
}

/// The T → 0 limit of [`covariance_numeric`] (coth → 1).
pub fn covariance_numeric_zero_temperature<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
) -> Result<NumericCovariance<T>> {
    numeric_route(model, probe, None)
}

/// Ingredients of the digamma representation of the Lorentz-Drude moments.
///
/// With ν₁ = 2πT the moments read
/// σ_xx = T/ω₀² − Re Σ c_m ψ(−d_m) and σ_pp = T − Re Σ c′_m ψ(−d_m),
/// where y_m = ν₁(d_m + 1) are the roots of
/// y³ + ω_c y² + (ω₀² + 2γω_c) y + ω₀²ω_c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticLdSolution<T> {
    pub roots: [Complex<T>; 3],
    pub coeffs_x: [Complex<T>; 3],
    pub coeffs_p: [Complex<T>; 3],
    pub matsubara_nu1: T,
}

/// Roots y of y³ + ω_c y² + (ω₀² + 2γω_c) y + ω₀²ω_c = 0.
///
/// Cardano for a real root, deflation to a quadratic, then one Newton step
/// on every root. Fails on (nearly) repeated roots.
pub fn ld_cubic_roots<T: Real>(gamma: T, omega_c: T, omega0: T) -> Result<[Complex<T>; 3]> {
    let a = omega_c;
    let b = omega0 * omega0 + T::lit(2.0) * gamma * omega_c;
    let c = omega0 * omega0 * omega_c;
    let three = T::lit(3.0);
    let shift = a / three;
    let p = b - a * a / three;
    let q = T::lit(2.0) * a * a * a / T::lit(27.0) - a * b / three + c;
    let disc = q * q / T::lit(4.0) + p * p * p / T::lit(27.0);

    let mut roots = if disc > T::zero() {
        let u = (-q / T::lit(2.0) - q.signum() * disc.sqrt()).cbrt();
        let t = if u == T::zero() { T::zero() } else { u - p / (three * u) };
        let r = t - shift;
        // y³ + a y² + b y + c = (y − r)(y² + B y + C), C = −c/r
        let big_b = a + r;
        let big_c = if r != T::zero() { -c / r } else { b };
        let qd = big_b * big_b - T::lit(4.0) * big_c;
        let half = T::lit(0.5);
        let pair = if qd < T::zero() {
            let im = half * (-qd).sqrt();
            [Complex::new(-half * big_b, im), Complex::new(-half * big_b, -im)]
        } else {
            let s = -half * (big_b + big_b.signum() * qd.sqrt());
            [Complex::new(s, T::zero()), Complex::new(big_c / s, T::zero())]
        };
        [Complex::new(r, T::zero()), pair[0], pair[1]]
    } else {
        let m = T::lit(2.0) * (-p / three).sqrt();
        let arg = (three * q / (T::lit(2.0) * p) * (-three / p).sqrt()).max(-T::one()).min(T::one());
        let theta = arg.acos() / three;
        let tau = T::lit(2.0) * T::PI() / three;
        [0.0, 1.0, 2.0].map(|k| Complex::new(m * (theta - tau * T::lit(k)).cos() - shift, T::zero()))
    };

    let cubic = |y: Complex<T>| ((y + a) * y + b) * y + c;
    let slope = |y: Complex<T>| (y * three + a * T::lit(2.0)) * y + b;
    for y in roots.iter_mut() {
        let d = slope(*y);
        if d.norm() > T::zero() {
            *y = *y - cubic(*y) / d;
        }
        let scale = ((y.norm() + a) * y.norm() + b) * y.norm() + c;
        let residual = cubic(*y).norm() / scale;
        if !(residual < T::lit(CUBIC_RESIDUAL)) {
            return Err(Error::NonFinite("cubic root residual"));
        }
    }
    let size = roots.iter().fold(T::zero(), |m, y| m.max(y.norm()));
    let mut separation = T::infinity();
    for i in 0..3 {
        for j in i + 1..3 {
            separation = separation.min((roots[i] - roots[j]).norm());
        }
    }
    if separation < T::lit(ROOT_SEPARATION) * size {
        return Err(Error::DegenerateRoots {
            separation: (separation / size).as_f64(),
        });
    }
    Ok(roots)
}

/// Digamma route for the Lorentz-Drude bath.
pub fn covariance_analytic_ld<T: Real>(
    gamma: T,
    omega_c: T,
    probe: &ProbeSpec<T>,
    temp: T,
) -> Result<(CovarianceMatrix<T>, AnalyticLdSolution<T>)> {
    // validates γ and ω_c
    SpectralModel::lorentz_drude(gamma, omega_c)?;
    check_temperature(temp)?;
    let roots = ld_cubic_roots(gamma, omega_c, probe.omega0)?;
    analytic_from_roots(gamma, omega_c, probe, temp, roots)
}

fn analytic_from_roots<T: Real>(
    gamma: T,
    omega_c: T,
    probe: &ProbeSpec<T>,
    temp: T,
    y: [Complex<T>; 3],
) -> Result<(CovarianceMatrix<T>, AnalyticLdSolution<T>)> {
    let w02 = probe.omega0 * probe.omega0;
    let b = w02 + T::lit(2.0) * gamma * omega_c;
    let nu1 = T::lit(2.0) * T::PI() * temp;
    let one = Complex::new(T::one(), T::zero());

    let mut roots = [Complex::new(T::zero(), T::zero()); 3];
    let mut coeffs_x = roots;
    let mut coeffs_p = roots;
    let mut sum_x = Complex::new(T::zero(), T::zero());
    let mut sum_p = sum_x;
    let mut mag_x = T::zero();
    let mut mag_p = T::zero();
    for m in 0..3 {
        let ym = y[m];
        let slope = (ym * T::lit(3.0) + omega_c * T::lit(2.0)) * ym + b;
        let denom = slope * T::PI();
        coeffs_x[m] = (ym + omega_c) / denom;
        coeffs_p[m] = (ym * b + w02 * omega_c) / denom;
        roots[m] = ym / nu1 - one;
        let psi = digamma(-roots[m])?;
        let tx = coeffs_x[m] * psi;
        let tp = coeffs_p[m] * psi;
        sum_x = sum_x + tx;
        sum_p = sum_p + tp;
        mag_x = mag_x + tx.norm();
        mag_p = mag_p + tp.norm();
    }
    let tol = T::lit(IMAGINARY_RESIDUE);
    for (s, mag) in [(sum_x, mag_x), (sum_p, mag_p)] {
        if s.im.abs() > tol * mag.max(T::one()) {
            return Err(Error::ImaginaryResidue {
                residue: s.im.abs().as_f64(),
            });
        }
    }
    let covariance = CovarianceMatrix::diagonal(temp / w02 - sum_x.re, temp - sum_p.re).check_physical()?;
    Ok((
        covariance,
        AnalyticLdSolution {
            roots,
            coeffs_x,
            coeffs_p,
            matsubara_nu1: nu1,
        },
    ))
}

/// First-order low-temperature, large-cutoff approximation of the
/// Lorentz-Drude moments, valid for γ/ω_c, T/ω₀, ω₀/ω_c ≪ 1.
pub fn covariance_low_temperature_approx<T: Real>(
    gamma: T,
    omega_c: T,
    probe: &ProbeSpec<T>,
    temp: T,
) -> Result<CovarianceMatrix<T>> {
    SpectralModel::lorentz_drude(gamma, omega_c)?;
    check_temperature(temp)?;
    let w0 = probe.omega0;
    let two = T::lit(2.0);
    let pi = T::PI();
    let log = (omega_c / w0).ln();
    let xx = (T::one()
        - (two * gamma / (pi * w0) + two * temp / w0 + T::lit(4.0) * gamma * w0 / (pi * omega_c * omega_c) * log))
        / (two * w0);
    let pp = w0 / two
        * (T::one() + T::lit(4.0) * gamma / (pi * w0) * log + T::lit(3.0) * gamma / omega_c
            - (two * temp / w0 + two * gamma / (pi * w0)));
    Ok(CovarianceMatrix::diagonal(xx, pp))
}

/// Gibbs-state moments of the bare probe.
pub fn thermal_covariance<T: Real>(probe: &ProbeSpec<T>, temp: T) -> Result<CovarianceMatrix<T>> {
    check_temperature(temp)?;
    let w0 = probe.omega0;
    let c = coth_half(w0, temp);
    Ok(CovarianceMatrix::diagonal(c / (T::lit(2.0) * w0), w0 * c / T::lit(2.0)))
}

/// Exact route used to produce a temperature family of steady states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Numeric,
    Analytic,
}

impl Route {
    /// Analytic for the Lorentz-Drude bath, quadrature otherwise.
    pub fn preferred<T: Real>(model: &SpectralModel<T>) -> Self {
        if model.is_lorentz_drude() {
            Route::Analytic
        } else {
            Route::Numeric
        }
    }
}

#[derive(Debug, Clone)]
enum Family<T> {
    Numeric(Box<NumericCovariance<T>>),
    Analytic { roots: [Complex<T>; 3] },
}

/// Steady states of one (model, probe) pair as a smooth function of T
/// around a reference temperature.
#[derive(Debug, Clone)]
pub struct SteadyState<T> {
    pub model: SpectralModel<T>,
    pub probe: ProbeSpec<T>,
    pub reference_temperature: T,
    pub covariance: CovarianceMatrix<T>,
    family: Family<T>,
}

impl<T: Real> SteadyState<T> {
    pub fn new(model: &SpectralModel<T>, probe: &ProbeSpec<T>, temp: T, route: Route) -> Result<Self> {
        check_temperature(temp)?;
        let (covariance, family) = match route {
            Route::Numeric => {
                let n = covariance_numeric(model, probe, temp)?;
                (n.covariance, Family::Numeric(Box::new(n)))
            }
            Route::Analytic => {
                if !model.is_lorentz_drude() {
                    return Err(Error::invalid(
                        "route",
                        0.0,
                        "the analytic route exists for the Lorentz-Drude bath only",
                    ));
                }
                let roots = ld_cubic_roots(model.gamma, model.omega_c, probe.omega0)?;
                let (cov, _) = analytic_from_roots(model.gamma, model.omega_c, probe, temp, roots)?;
                (cov, Family::Analytic { roots })
            }
        };
        Ok(Self {
            model: *model,
            probe: *probe,
            reference_temperature: temp,
            covariance,
            family,
        })
    }

    /// σ at a nearby temperature, computed consistently with the reference.
    pub fn at(&self, temp: T) -> Result<CovarianceMatrix<T>> {
        check_temperature(temp)?;
        match &self.family {
            Family::Numeric(n) => n.at_temperature(Some(temp)),
            Family::Analytic { roots } => {
                analytic_from_roots(self.model.gamma, self.model.omega_c, &self.probe, temp, *roots).map(|r| r.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn probe() -> ProbeSpec<f64> {
        ProbeSpec::new(1.0).unwrap()
    }

    #[test]
    fn alpha_cancels_counterterm_at_zero() {
        let m = SpectralModel::lorentz_drude(0.3, 100.0).unwrap();
        assert_eq!(alpha(&m, &probe(), 0.0).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn alpha_direct_complex_arithmetic() {
        let m = SpectralModel::lorentz_drude(1.0, 100.0).unwrap();
        let chi = Complex::new(2.0, 0.0) * 100.0 * 100.0 / Complex::new(100.0, -1.0);
        let want = Complex::new(1.0 + 200.0 - 1.0, 0.0) - chi;
        let got = alpha(&m, &probe(), 1.0).unwrap();
        assert_relative_eq!(got.re, want.re, max_relative = 1e-12);
        assert_relative_eq!(got.im, want.im, max_relative = 1e-12);
        let conj = alpha(&m, &probe(), -1.0).unwrap();
        assert_relative_eq!(conj.im, -got.im, max_relative = 1e-14);
    }

    #[test]
    fn coth_laurent_branch_is_continuous() {
        let t: f64 = 2.0;
        let w = 1e-3 * t;
        let below = coth_half(w * (1.0 - 1e-12), t);
        let exact = 1.0 / (w / (2.0 * t)).tanh();
        assert_relative_eq!(below, exact, max_relative = 1e-11);
    }

    #[test]
    fn cubic_roots_satisfy_vieta() {
        for &(g, wc) in &[(0.1, 100.0), (5.0, 100.0), (1e-6, 100.0), (0.3, 3.0)] {
            let r = ld_cubic_roots(g, wc, 1.0).unwrap();
            let sum = r[0] + r[1] + r[2];
            let prod = r[0] * r[1] * r[2];
            assert_relative_eq!(sum.re, -wc, max_relative = 1e-12);
            assert_relative_eq!(prod.re, -wc, max_relative = 1e-10);
        }
    }

    #[test]
    fn thermal_reference() {
        let c = thermal_covariance(&probe(), 1.0).unwrap();
        assert_relative_eq!(c.sigma_xx, 1.0819767068693265, max_relative = 1e-14);
        assert_relative_eq!(c.sigma_pp, 1.0819767068693265, max_relative = 1e-14);
        let v = thermal_covariance(&probe(), 1e-6).unwrap();
        assert_eq!((v.sigma_xx, v.sigma_pp), (0.5, 0.5));
    }

    #[test]
    fn frozen_partition_reproduces_reference() {
        let m = SpectralModel::lorentz_drude(0.1, 100.0).unwrap();
        let n = covariance_numeric(&m, &probe(), 0.1).unwrap();
        let again = n.at_temperature(Some(0.1)).unwrap();
        assert_relative_eq!(again.sigma_xx, n.covariance.sigma_xx, max_relative = 1e-14);
    }
}
