//! Single-mode Gaussian moments computed in a truncated number basis.

use nalgebra::DMatrix;

/// Moments of a Gibbs state of ½(a x² + b p²), evaluated by exact
/// diagonalization with `cutoff` number states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub sigma_xx: f64,
    pub sigma_pp: f64,
    pub var_x2: f64,
    pub mean_energy: f64,
    pub var_energy: f64,
}

pub struct Basis {
    x2: DMatrix<f64>,
    p2: DMatrix<f64>,
}

impl Basis {
    pub fn new(cutoff: usize) -> Self {
        let mut a = DMatrix::zeros(cutoff, cutoff);
        for n in 1..cutoff {
            a[(n - 1, n)] = (n as f64).sqrt();
        }
        let ad = a.transpose();
        let x = (&a + &ad) / 2f64.sqrt();
        // p = i(a† − a)/√2, so p² = −(a† − a)²/2 is real
        let d = &ad - &a;
        Self {
            x2: &x * &x,
            p2: -(&d * &d) / 2.0,
        }
    }

    /// Moments of ρ ∝ exp(−½(a x² + b p²)); H = ½(ω₀² x² + p²).
    pub fn gibbs_moments(&self, a: f64, b: f64, omega0: f64) -> FockMoments {
        let k = (&self.x2 * a + &self.p2 * b) * 0.5;
        let eig = k.symmetric_eigen();
        let e0 = eig.eigenvalues.min();
        let w = eig.eigenvalues.map(|e| (-(e - e0)).exp());
        let rho = &eig.eigenvectors * DMatrix::from_diagonal(&w) * eig.eigenvectors.transpose();
        let rho = &rho / rho.trace();
        let ev = |op: &DMatrix<f64>| (&rho * op).trace();

        let sigma_xx = ev(&self.x2);
        let sigma_pp = ev(&self.p2);
        let h = (&self.x2 * (omega0 * omega0) + &self.p2) * 0.5;
        let mean_energy = ev(&h);
        FockMoments {
            sigma_xx,
            sigma_pp,
            var_x2: ev(&(&self.x2 * &self.x2)) - sigma_xx * sigma_xx,
            mean_energy,
            var_energy: ev(&(&h * &h)) - mean_energy * mean_energy,
        }
    }
}
