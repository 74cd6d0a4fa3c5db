//! Finite star-system surrogate of probe and sample: one central oscillator
//! coupled to N − 1 bath oscillators, prepared in a global Gibbs state.
//!
//! The interaction matrix is an arrowhead matrix, so its spectrum comes from
//! the secular equation, one bracketed root per interlacing interval. Each
//! root is stored as an offset from its nearest pole, which keeps λ − ω_k²
//! accurate to working precision; eigenvectors use the Gu-Eisenstat
//! recomputed couplings so the mode matrix stays orthogonal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrology::{qfi_equilibrium, ThermalFamily};
use crate::scalar::Real;
use crate::spectral::SpectralModel;
use crate::steady_state::{CovarianceMatrix, ProbeSpec};

/// Relative jitter applied to repeated bath frequencies.
pub const DEGENERACY_JITTER: f64 = 1e-9;

/// Relative distance to a bath pole below which ∂_Gλ is refused.
pub const DERIVATIVE_POLE_TOLERANCE: f64 = 1e-8;

const MAX_SECULAR_ITERATIONS: usize = 400;

/// Central oscillator ω₀ coupled with strengths G·g_μ to bath modes ω_μ.
///
/// Bath modes are kept sorted by frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSystem<T> {
    pub omega0: T,
    pub bath_freqs: Vec<T>,
    pub couplings: Vec<T>,
    pub scale: T,
    /// Number of bath frequencies moved apart by [`DEGENERACY_JITTER`].
    pub jittered: usize,
}

impl<T: Real> StarSystem<T> {
    pub fn new(omega0: T, bath_freqs: Vec<T>, couplings: Vec<T>, scale: T) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > T::zero()) {
            return Err(Error::invalid("omega0", omega0.as_f64(), "must be positive and finite"));
        }
        if bath_freqs.len() != couplings.len() {
            return Err(Error::invalid(
                "couplings",
                couplings.len() as f64,
                "length must match the number of bath frequencies",
            ));
        }
        if !(scale.is_finite() && scale >= T::zero()) {
            return Err(Error::invalid("scale", scale.as_f64(), "must be non-negative and finite"));
        }
        if let Some(w) = bath_freqs.iter().find(|w| !(w.is_finite() && **w > T::zero())) {
            return Err(Error::invalid("bath_freqs", w.as_f64(), "must be positive and finite"));
        }
        if let Some(g) = couplings.iter().find(|g| !g.is_finite()) {
            return Err(Error::invalid("couplings", g.as_f64(), "must be finite"));
        }
        let mut modes: Vec<(T, T)> = bath_freqs.into_iter().zip(couplings).collect();
        modes.sort_by(|a, b| a.0.as_f64().total_cmp(&b.0.as_f64()));
        let mut jittered = 0;
        let jitter = T::lit(DEGENERACY_JITTER);
        for i in 1..modes.len() {
            if modes[i].0 <= modes[i - 1].0 * (T::one() + T::epsilon() * T::lit(4.0)) {
                modes[i].0 = modes[i - 1].0 * (T::one() + jitter);
                jittered += 1;
            }
        }
        let (bath_freqs, couplings) = modes.into_iter().unzip();
        Ok(Self {
            omega0,
            bath_freqs,
            couplings,
            scale,
            jittered,
        })
    }

    pub fn with_scale(&self, scale: T) -> Result<Self> {
        Self::new(self.omega0, self.bath_freqs.clone(), self.couplings.clone(), scale)
    }

    /// Total number of oscillators, probe included.
    pub fn n_modes(&self) -> usize {
        self.bath_freqs.len() + 1
    }

    /// Σ g_μ²/ω_μ², the discrete counterpart of ω_R².
    pub fn discrete_renormalization(&self) -> T {
        self.bath_freqs
            .iter()
            .zip(&self.couplings)
            .fold(T::zero(), |s, (&w, &g)| s + g * g / (w * w))
    }

    /// Ω₀² = ω₀² + G² Σ g_μ²/ω_μ².
    pub fn shifted_frequency_sq(&self) -> T {
        self.omega0 * self.omega0 + self.scale * self.scale * self.discrete_renormalization()
    }

    /// Row-major N×N matrix with V₀₀ = Ω₀², V_μμ = ω_μ², V₀μ = V_μ0 = G g_μ.
    pub fn interaction_matrix(&self) -> Vec<T> {
        let n = self.n_modes();
        let mut v = vec![T::zero(); n * n];
        v[0] = self.shifted_frequency_sq();
        for (k, (&w, &g)) in self.bath_freqs.iter().zip(&self.couplings).enumerate() {
            let i = k + 1;
            v[i * n + i] = w * w;
            v[i] = self.scale * g;
            v[i * n] = self.scale * g;
        }
        v
    }

    /// Eigen-decomposition of the interaction matrix.
    pub fn normal_modes(&self) -> Result<NormalModes<T>> {
        NormalModes::solve(self)
    }

    /// ∂_Gλ_i = −2G Σ g_k²/(ω_k² − λ_i) / (1 + G² Σ g_k²/(ω_k² − λ_i)²),
    /// the derivative at fixed V₀₀, in ascending eigenvalue order.
    pub fn eigenvalue_coupling_derivatives(&self) -> Result<Vec<T>> {
        let modes = self.normal_modes()?;
        self.derivatives_of(&modes).into_iter().collect()
    }

    fn derivatives_of(&self, modes: &NormalModes<T>) -> Vec<Result<T>> {
        if self.scale == T::zero() {
            return vec![Ok(T::zero()); modes.eigenvalues.len()];
        }
        let g2 = self.scale * self.scale;
        let tol = T::lit(DERIVATIVE_POLE_TOLERANCE);
        (0..modes.eigenvalues.len())
            .map(|i| {
                if modes.deflated[i] {
                    // a decoupled bath mode does not move with G
                    return Ok(T::zero());
                }
                let mut s1 = T::zero();
                let mut s2 = T::zero();
                for (k, &g) in self.couplings.iter().enumerate() {
                    let gap = -modes.offset(i, k);
                    if gap.abs() <= tol * modes.poles[k] {
                        return Err(Error::SingularDerivative {
                            eigenvalue: modes.eigenvalues[i].as_f64(),
                            pole: modes.poles[k].as_f64(),
                        });
                    }
                    let t = g * g / gap;
                    s1 = s1 + t;
                    s2 = s2 + t / gap;
                }
                Ok(-T::lit(2.0) * self.scale * s1 / (T::one() + g2 * s2))
            })
            .collect()
    }

    /// Checks sign(∂_Gλ_i) = sign(λ_i − Ω₀²) on every coupled eigenvalue.
    pub fn derivative_sign_summary(&self) -> Result<SignSummary> {
        let modes = self.normal_modes()?;
        let shift = self.shifted_frequency_sq();
        let mut summary = SignSummary::default();
        for (i, d) in self.derivatives_of(&modes).into_iter().enumerate() {
            if modes.deflated[i] || self.scale == T::zero() {
                continue;
            }
            match d {
                Ok(d) => {
                    summary.checked += 1;
                    let expected = modes.eigenvalues[i] > shift;
                    if (d > T::zero()) != expected || d == T::zero() {
                        summary.violations += 1;
                    }
                }
                Err(Error::SingularDerivative { .. }) => summary.singular += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(summary)
    }

    /// Probe marginal of the global Gibbs state at temperature T.
    pub fn reduced_probe_covariance(&self, temp: T) -> Result<CovarianceMatrix<T>> {
        self.normal_modes()?.reduced_probe_covariance(temp)
    }

    /// Σ_i 𝓕_T^{eq}(√λ_i), the QFI of the global Gibbs state.
    pub fn star_qfi(&self, temp: T) -> Result<T> {
        self.normal_modes()?.star_qfi(temp)
    }
}

/// Outcome of the derivative sign-law check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SignSummary {
    pub checked: usize,
    pub violations: usize,
    /// Eigenvalues too close to a bath pole for the formula.
    pub singular: usize,
}

/// Probe marginal of the star Gibbs state as a function of temperature.
#[derive(Debug, Clone)]
pub struct StarMarginal<T> {
    pub modes: NormalModes<T>,
    pub omega0: T,
    pub temperature: T,
    pub covariance: CovarianceMatrix<T>,
}

impl<T: Real> StarMarginal<T> {
    pub fn new(star: &StarSystem<T>, temp: T) -> Result<Self> {
        let modes = star.normal_modes()?;
        let covariance = modes.reduced_probe_covariance(temp)?;
        Ok(Self {
            modes,
            omega0: star.omega0,
            temperature: temp,
            covariance,
        })
    }
}

impl<T: Real> ThermalFamily<T> for StarMarginal<T> {
    fn reference_temperature(&self) -> T {
        self.temperature
    }
    fn reference_covariance(&self) -> CovarianceMatrix<T> {
        self.covariance
    }
    fn covariance_at(&self, temp: T) -> Result<CovarianceMatrix<T>> {
        self.modes.reduced_probe_covariance(temp)
    }
    fn omega0(&self) -> T {
        self.omega0
    }
}

/// Placement of bath frequencies on a uniform grid of spacing Δω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BathGrid {
    /// ω_μ = (μ − ½)Δω
    #[default]
    Midpoint,
    /// ω_μ = μΔω
    RightEndpoint,
}

/// Midpoint-grid discretization, see [`discretize_bath_on`].
pub fn discretize_bath<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    n_modes: usize,
    omega_max: T,
) -> Result<StarSystem<T>> {
    discretize_bath_on(model, probe, n_modes, omega_max, BathGrid::Midpoint)
}

/// n bath modes on a uniform grid over (0, ω_max] with
/// g_μ² = (2/π) ω_μ J(ω_μ) Δω and unit masses; G = 1.
pub fn discretize_bath_on<T: Real>(
    model: &SpectralModel<T>,
    probe: &ProbeSpec<T>,
    n_modes: usize,
    omega_max: T,
    grid: BathGrid,
) -> Result<StarSystem<T>> {
    if n_modes == 0 {
        return Err(Error::invalid("n_modes", 0.0, "need at least one bath mode"));
    }
    if !(omega_max.is_finite() && omega_max > T::zero()) {
        return Err(Error::invalid("omega_max", omega_max.as_f64(), "must be positive and finite"));
    }
    let dw = omega_max / T::lit(n_modes as f64);
    let offset = match grid {
        BathGrid::Midpoint => T::lit(0.5),
        BathGrid::RightEndpoint => T::zero(),
    };
    let mut freqs = Vec::with_capacity(n_modes);
    let mut couplings = Vec::with_capacity(n_modes);
    for mu in 1..=n_modes {
        let w = dw * (T::lit(mu as f64) - offset);
        let j = model.spectral_density(w)?;
        freqs.push(w);
        couplings.push((T::lit(2.0) * T::FRAC_1_PI() * w * j * dw).sqrt());
    }
    StarSystem::new(probe.omega0, freqs, couplings, T::one())
}

/// Default bath bandwidth: 20 ω_c.
pub fn default_omega_max<T: Real>(model: &SpectralModel<T>) -> T {
    T::lit(20.0) * model.omega_c
}

/// Where an eigenvalue sits: next to an active pole or on a deflated one.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Anchor<T> {
    /// λ = d[pole] + tau, with d the active (coupled) poles
    Secular { pole: usize, tau: T },
    /// exactly the bath frequency of mode `bath`
    Deflated { bath: usize },
    /// the probe itself when no bath mode couples to it
    Isolated { value: T },
}

/// Normal modes of a star system, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct NormalModes<T> {
    pub eigenvalues: Vec<T>,
    /// O₀ᵢ, the probe component of each normalized mode.
    pub probe_weights: Vec<T>,
    /// Whether eigenvalue i belongs to a decoupled bath mode.
    pub deflated: Vec<bool>,
    poles: Vec<T>,
    active: Vec<usize>,
    zhat: Vec<T>,
    anchors: Vec<Anchor<T>>,
}

impl<T: Real> NormalModes<T> {
    fn solve(star: &StarSystem<T>) -> Result<Self> {
        let poles: Vec<T> = star.bath_freqs.iter().map(|&w| w * w).collect();
        let z: Vec<T> = star.couplings.iter().map(|&g| star.scale * g).collect();
        let alpha = star.shifted_frequency_sq();

        let norm = z
            .iter()
            .fold(alpha.abs().max(poles.last().copied().unwrap_or(T::zero())), |m, v| m.max(v.abs()));
        let small = T::lit(8.0) * T::epsilon() * norm;
        let active: Vec<usize> = (0..z.len()).filter(|&k| z[k].abs() > small).collect();
        let d: Vec<T> = active.iter().map(|&k| poles[k]).collect();
        let za: Vec<T> = active.iter().map(|&k| z[k]).collect();

        let mut anchors: Vec<Anchor<T>> = (0..=d.len())
            .map(|r| secular_root(alpha, &d, &za, r))
            .collect::<Result<_>>()?;
        let mut zhat = vec![T::zero(); z.len()];
        for (k, &bath) in active.iter().enumerate() {
            zhat[bath] = gu_eisenstat(&d, &anchors, k) * za[k].signum();
        }
        anchors.extend((0..z.len()).filter(|k| !active.contains(k)).map(|bath| Anchor::Deflated { bath }));

        let value = |a: &Anchor<T>| match *a {
            Anchor::Secular { pole, tau } => d[pole] + tau,
            Anchor::Deflated { bath } => poles[bath],
            Anchor::Isolated { value } => value,
        };
        anchors.sort_by(|a, b| value(a).as_f64().total_cmp(&value(b).as_f64()));
        let eigenvalues: Vec<T> = anchors.iter().map(value).collect();
        if let Some(&lowest) = eigenvalues.first() {
            if !(lowest > T::zero()) {
                return Err(Error::NotPositiveDefinite {
                    lowest: lowest.as_f64(),
                });
            }
        }
        let mut modes = Self {
            probe_weights: Vec::new(),
            deflated: anchors.iter().map(|a| matches!(a, Anchor::Deflated { .. })).collect(),
            eigenvalues,
            poles,
            active,
            zhat,
            anchors,
        };
        modes.probe_weights = (0..modes.eigenvalues.len())
            .map(|i| if modes.deflated[i] { T::zero() } else { modes.column_norm(i).recip() })
            .collect();
        Ok(modes)
    }

    /// λ_i − ω_k² for bath mode k, accurate even when λ_i sits on the pole.
    fn offset(&self, i: usize, bath: usize) -> T {
        match self.anchors[i] {
            Anchor::Secular { pole, tau } => {
                let origin = self.poles[self.active[pole]];
                (origin - self.poles[bath]) + tau
            }
            Anchor::Deflated { bath: b } => self.poles[b] - self.poles[bath],
            Anchor::Isolated { value } => value - self.poles[bath],
        }
    }

    fn column_norm(&self, i: usize) -> T {
        let mut sq = T::one();
        for &bath in &self.active {
            let c = self.zhat[bath] / self.offset(i, bath);
            sq = sq + c * c;
        }
        sq.sqrt()
    }

    /// Mode matrix O (row-major N×N); column i is the normalized eigenvector
    /// of eigenvalue i, row 0 the probe and row k + 1 bath mode k.
    pub fn mode_matrix(&self) -> Vec<T> {
        let n = self.eigenvalues.len();
        let mut o = vec![T::zero(); n * n];
        for i in 0..n {
            match self.anchors[i] {
                Anchor::Deflated { bath } => o[(bath + 1) * n + i] = T::one(),
                Anchor::Secular { .. } | Anchor::Isolated { .. } => {
                    let w = self.probe_weights[i];
                    o[i] = w;
                    for &bath in &self.active {
                        o[(bath + 1) * n + i] = w * self.zhat[bath] / self.offset(i, bath);
                    }
                }
            }
        }
        o
    }

    pub fn frequencies(&self) -> Vec<T> {
        self.eigenvalues.iter().map(|l| l.sqrt()).collect()
    }

    /// Gibbs-state moments of the probe coordinate.
    pub fn reduced_probe_covariance(&self, temp: T) -> Result<CovarianceMatrix<T>> {
        if !(temp.is_finite() && temp > T::zero()) {
            return Err(Error::invalid("temperature", temp.as_f64(), "must be positive and finite"));
        }
        let two = T::lit(2.0);
        let mut xx = T::zero();
        let mut pp = T::zero();
        for (&lambda, &w) in self.eigenvalues.iter().zip(&self.probe_weights) {
            let omega = lambda.sqrt();
            let coth = (omega / (two * temp)).tanh().recip();
            let w2 = w * w;
            xx = xx + w2 * coth / (two * omega);
            pp = pp + w2 * omega * coth / two;
        }
        CovarianceMatrix::diagonal(xx, pp).check_physical()
    }

    pub fn star_qfi(&self, temp: T) -> Result<T> {
        self.eigenvalues
            .iter()
            .try_fold(T::zero(), |s, &l| Ok(s + qfi_equilibrium(l.sqrt(), temp)?))
    }
}

/// Secular function f(τ) = (α − d_p) − τ − Σ z_j²/(δ_j − τ) around pole p,
/// and its derivative.
fn secular<T: Real>(alpha_off: T, delta: &[T], z: &[T], tau: T) -> (T, T) {
    let mut f = alpha_off - tau;
    let mut df = -T::one();
    for (&dj, &zj) in delta.iter().zip(z) {
        let r = zj / (dj - tau);
        f = f - zj * r;
        df = df - r * r;
    }
    (f, df)
}

/// Root r of the secular equation, r = 0 below the first pole and r = m
/// above the last; root r lies between poles r − 1 and r.
fn secular_root<T: Real>(alpha: T, d: &[T], z: &[T], r: usize) -> Result<Anchor<T>> {
    let m = d.len();
    if m == 0 {
        return Ok(Anchor::Isolated { value: alpha });
    }
    let zsum = z.iter().fold(T::zero(), |s, v| s + v.abs());
    let half = T::lit(0.5);
    // bracket in λ, then choose the closer pole as origin
    let (pole, lo, hi) = if r == 0 {
        let lower = d
            .iter()
            .zip(z)
            .fold(alpha - zsum, |b, (&dk, &zk)| b.min(dk - zk.abs()));
        (0, lower - d[0], T::zero())
    } else if r == m {
        let upper = d
            .iter()
            .zip(z)
            .fold(alpha + zsum, |b, (&dk, &zk)| b.max(dk + zk.abs()));
        (m - 1, T::zero(), upper - d[m - 1])
    } else {
        let gap = d[r] - d[r - 1];
        let delta: Vec<T> = d.iter().map(|&v| v - d[r - 1]).collect();
        let (fmid, _) = secular(alpha - d[r - 1], &delta, z, half * gap);
        if fmid >= T::zero() {
            (r, -half * gap, T::zero())
        } else {
            (r - 1, T::zero(), half * gap)
        }
    };
    let delta: Vec<T> = d.iter().map(|&v| v - d[pole]).collect();
    let alpha_off = alpha - d[pole];
    let (mut a, mut b) = (lo, hi);
    let mut tau = half * (a + b);
    for _ in 0..MAX_SECULAR_ITERATIONS {
        let (f, df) = secular(alpha_off, &delta, z, tau);
        if f == T::zero() {
            break;
        }
        if f > T::zero() {
            a = tau;
        } else {
            b = tau;
        }
        // fit c − w/τ to f and f′ at τ, step to its root
        let w = df * tau * tau;
        let c = f + w / tau;
        let mut next = if c != T::zero() { w / c } else { T::nan() };
        if !(next > a && next < b) {
            next = half * (a + b);
        }
        let scale = (d[pole] + next).abs().max(next.abs());
        let done = (next - tau).abs() <= T::lit(2.0) * T::epsilon() * next.abs()
            || (b - a) <= T::lit(2.0) * T::epsilon() * next.abs()
            || (b - a) <= T::epsilon() * T::epsilon() * scale;
        tau = next;
        if done {
            break;
        }
    }
    if !tau.is_finite() {
        return Err(Error::NonFinite("secular root"));
    }
    Ok(Anchor::Secular { pole, tau })
}

/// |ẑ_k| with ẑ_k² = ∏_r (λ_r − d_k) / ∏_{j≠k} (d_j − d_k), formed as
/// paired ratios to stay within range.
fn gu_eisenstat<T: Real>(d: &[T], roots: &[Anchor<T>], k: usize) -> T {
    let diff = |r: usize| match roots[r] {
        Anchor::Secular { pole, tau } => (d[pole] - d[k]) + tau,
        _ => unreachable!("only secular roots are paired"),
    };
    let mut prod = (diff(0) * diff(k + 1)).abs();
    for j in 0..d.len() {
        if j != k {
            prod = prod * (diff(j + 1) / (d[j] - d[k]));
        }
    }
    prod.abs().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_mode_example() {
        let s = StarSystem::new(1.0, vec![1.0], vec![0.5], 1.0).unwrap();
        assert_eq!(s.interaction_matrix(), vec![1.25, 0.5, 0.5, 1.0]);
        let m = s.normal_modes().unwrap();
        let mean = (1.25 + 1.0) / 2.0;
        let rad = (((1.25f64 - 1.0) / 2.0).powi(2) + 0.25).sqrt();
        assert_relative_eq!(m.eigenvalues[0], mean - rad, max_relative = 1e-14);
        assert_relative_eq!(m.eigenvalues[1], mean + rad, max_relative = 1e-14);
    }

    #[test]
    fn decoupled_star_is_diagonal() {
        let s = StarSystem::new(1.5, vec![2.0, 0.5], vec![0.3, 0.7], 0.0).unwrap();
        let m = s.normal_modes().unwrap();
        assert_eq!(m.eigenvalues, vec![0.25, 2.25, 4.0]);
        assert_eq!(m.probe_weights, vec![0.0, 1.0, 0.0]);
        assert_eq!(s.eigenvalue_coupling_derivatives().unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn repeated_frequencies_are_jittered() {
        let s = StarSystem::new(1.0, vec![2.0, 2.0, 2.0], vec![0.1, 0.2, 0.3], 1.0).unwrap();
        assert_eq!(s.jittered, 2);
        assert!(s.bath_freqs.windows(2).all(|w| w[0] < w[1]));
        let m = s.normal_modes().unwrap();
        let trace: f64 = s.shifted_frequency_sq() + s.bath_freqs.iter().map(|w| w * w).sum::<f64>();
        assert_relative_eq!(m.eigenvalues.iter().sum::<f64>(), trace, max_relative = 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(StarSystem::new(1.0, vec![1.0, 2.0], vec![0.1], 1.0).is_err());
    }
}
