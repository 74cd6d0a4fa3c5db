//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero when any
//! criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use thermoprobe::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thermoprobe::figures::{self, Axis, Grid, SweepSpec};
use thermoprobe::metrology::{qfi_equilibrium, qfi_from_fidelity, sensitivity_report, Observable};
use thermoprobe::scalar::rel_diff;
use thermoprobe::special::{digamma, exp_integral, ExpIntegralKind};
use thermoprobe::spectral::SpectralModel;
use thermoprobe::star::discretize_bath;
use thermoprobe::steady_state::{
    covariance_analytic_ld, covariance_numeric, thermal_covariance, CovarianceMatrix, ProbeSpec, Route,
};
use thermoprobe_validation::{dense, fock, hilbert, random};

type Verdict = Result<String, String>;

fn probe() -> ProbeSpec<f64> {
    ProbeSpec::new(1.0).unwrap()
}

fn ld(gamma: f64) -> SpectralModel<f64> {
    SpectralModel::lorentz_drude(gamma, 100.0).unwrap()
}

fn require(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn route_equivalence() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for g in [0.1, 1.0, 5.0] {
        for t in [0.01, 0.1, 1.0] {
            let n = covariance_numeric(&ld(g), &probe(), t).map_err(|e| e.to_string())?;
            let (a, _) = covariance_analytic_ld(g, 100.0, &probe(), t).map_err(|e| e.to_string())?;
            worst = worst.max(n.covariance.max_rel_diff(&a));
        }
    }
    let elapsed = start.elapsed();
    require(
        worst < 1e-6 && elapsed < Duration::from_secs(10),
        format!("max rel diff {worst:.2e} (< 1e-6), {:.2} s (< 10 s)", elapsed.as_secs_f64()),
    )
}

fn thermalization() -> Verdict {
    let m = ld(1e-6);
    let mut cov: f64 = 0.0;
    for t in [0.01, 0.1, 0.2, 0.5, 1.0] {
        let th = thermal_covariance(&probe(), t).unwrap();
        let n = covariance_numeric(&m, &probe(), t).map_err(|e| e.to_string())?;
        let (a, _) = covariance_analytic_ld(1e-6, 100.0, &probe(), t).map_err(|e| e.to_string())?;
        cov = cov.max(n.covariance.max_rel_diff(&th)).max(a.max_rel_diff(&th));
    }
    let mut qfi: f64 = 0.0;
    for t in [0.2, 0.5, 1.0] {
        let q = qfi_from_fidelity(&m, &probe(), t).map_err(|e| e.to_string())?;
        qfi = qfi.max(rel_diff(q, qfi_equilibrium(1.0, t).unwrap()));
    }
    require(
        cov < 1e-3 && qfi < 1e-3,
        format!("covariance {cov:.2e} at T in [0.01, 1], QFI {qfi:.2e} at T in {{0.2, 0.5, 1}} (< 1e-3)"),
    )
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

fn fig1a_shape() -> Verdict {
    let start = Instant::now();
    let grid = Grid::log(1e-3, 1.0, 31).unwrap();
    let table = figures::fig1a(&figures::FIG1A_GAMMAS, 100.0, &grid).map_err(|e| e.to_string())?;
    let (block, axis) = (table.column("block").unwrap(), table.column("axis").unwrap());
    let (rel, rel_eq) = (table.column("rel_error").unwrap(), table.column("rel_error_eq").unwrap());
    let mut exponents = Vec::new();
    let mut eq_slopes = (0.0, 0.0);
    for label in ["gamma=0.1", "gamma=1", "gamma=5"] {
        let rows: Vec<_> = table
            .rows
            .iter()
            .filter(|r| matches!(&r[block], figures::Cell::Text(b) if b == label))
            .map(|r| (r[axis].as_number().unwrap(), r[rel].as_number().unwrap(), r[rel_eq].as_number().unwrap()))
            .filter(|(t, _, _)| *t <= 1e-2 * (1.0 + 1e-12))
            .collect();
        exponents.push(slope(&rows.iter().map(|(t, r, _)| (*t, *r)).collect::<Vec<_>>()));
        let eq: Vec<(f64, f64)> = rows.iter().map(|(t, _, e)| (*t, *e)).collect();
        let half = eq.len() / 2;
        eq_slopes = (slope(&eq[..=half]), slope(&eq[half..]));
    }
    // exponential growth: the equilibrium log-log slope steepens without bound
    let exponential = eq_slopes.0 < -100.0 && eq_slopes.0 < 2.0 * eq_slopes.1;
    let polynomial = exponents.iter().all(|e| (e + 2.0).abs() <= 0.3);

    let at = |g: f64| sensitivity_report(&ld(g), &probe(), 0.01, Route::Analytic).map(|r| r.rel_error);
    let (r5, r1, r01) = (at(5.0).map_err(|e| e.to_string())?, at(1.0).unwrap(), at(0.1).unwrap());
    let ordered = r5 < r1 && r1 < r01;
    let elapsed = start.elapsed();
    require(
        exponential && polynomial && ordered && elapsed < Duration::from_secs(120),
        format!(
            "exponents of dT/T on [1e-3, 1e-2] {:.3}/{:.3}/{:.3} (gamma 0.1/1/5, want -2 +- 0.3); \
             equilibrium slopes {:.0} then {:.0}; at T=0.01 dT/T {r5:.4e} < {r1:.4e} < {r01:.4e}; {:.2} s",
            exponents[0],
            exponents[1],
            exponents[2],
            eq_slopes.0,
            eq_slopes.1,
            elapsed.as_secs_f64()
        ),
    )
}

fn fig1b_monotone() -> Verdict {
    let mut detail = Vec::new();
    let mut ok = true;
    for t in [0.01, 0.1] {
        let spec = SweepSpec {
            model: ld(1.0),
            probe: probe(),
            axis: Axis::Gamma,
            temperature: t,
            grid: Grid::log(1.0, 10.0, 20).unwrap(),
            route: None,
        };
        let q: Vec<f64> = figures::sweep(&spec)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.report.qfi)
            .collect();
        let increasing = q.windows(2).all(|w| w[1] > w[0]);
        ok &= increasing;
        detail.push(format!("T={t}: QFI {:.4e} -> {:.4e} increasing={increasing}", q[0], q[19]));
    }
    require(ok, detail.join("; "))
}

fn fig2_behavior() -> Verdict {
    let spec = SweepSpec {
        model: ld(5e-3),
        probe: probe(),
        axis: Axis::Temperature,
        temperature: 0.0,
        grid: Grid::log(0.01, 1.0, 20).unwrap(),
        route: None,
    };
    let weak = figures::sweep(&spec).map_err(|e| e.to_string())?;
    let (t_min, min_ratio) = weak
        .iter()
        .map(|r| (r.axis, r.report.f_energy / r.report.qfi))
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let energy_ok = min_ratio >= 0.95;

    let strong = sensitivity_report(&ld(0.5), &probe(), 0.01, Route::Analytic).map_err(|e| e.to_string())?;
    let (sx, se) = (strong.f_xsq / strong.qfi, strong.f_energy / strong.qfi);
    let weak_x = weak[0].report.f_xsq / weak[0].report.qfi;
    let xsq_ok = sx > se && sx > weak_x;
    require(
        energy_ok && xsq_ok,
        format!(
            "gamma=5e-3: min F(H_p)/QFI {min_ratio:.4} at T={t_min:.3} (want >= 0.95) [{}]; \
             gamma=0.5, T=0.01: F(x^2)/QFI {sx:.4} vs F(H_p)/QFI {se:.4} and {weak_x:.4} at gamma=5e-3 [{}]",
            if energy_ok { "ok" } else { "violated" },
            if xsq_ok { "ok" } else { "violated" }
        ),
    )
}

fn fig3_ordering() -> Verdict {
    let grid = Grid::log(1e-3, 0.1, 20).unwrap();
    let table = figures::fig3(0.1, 100.0, &figures::FIG3_OHMICITIES, &grid).map_err(|e| e.to_string())?;
    let q: Vec<f64> = table.numbers("qfi").unwrap().into_iter().map(Option::unwrap).collect();
    let (ohmic, sup) = q.split_at(20);
    let worst = ohmic
        .iter()
        .zip(sup)
        .map(|(a, b)| a / b)
        .fold(f64::INFINITY, f64::min);
    require(
        ohmic.iter().zip(sup).all(|(a, b)| a > b),
        format!("min QFI(s=1)/QFI(s=2) over T in [1e-3, 0.1] = {worst:.4e} (> 1)"),
    )
}

fn kramers_kronig() -> Verdict {
    let models = [
        ld(1.0),
        SpectralModel::exp_cutoff(0.1, 100.0, 1.0).unwrap(),
        SpectralModel::exp_cutoff(0.1, 100.0, 2.0).unwrap(),
    ];
    let freqs = [0.01, 0.03, 0.1, 0.3, 0.7, 1.0, 2.0, 3.5, 6.0, 10.0];
    let (mut pv, mut independent): (f64, f64) = (0.0, 0.0);
    for m in &models {
        for w in freqs {
            let closed = m.chi_real(w).map_err(|e| e.to_string())?;
            let numeric = m.kramers_kronig_numeric(w).map_err(|e| e.to_string())?;
            pv = pv.max(rel_diff(closed, numeric));
            let oracle = hilbert::real_part(|x| m.spectral_density(x).unwrap(), w, m.omega_c);
            independent = independent.max(rel_diff(closed, oracle));
        }
    }
    require(
        pv < 1e-5 && independent < 1e-5,
        format!("3 variants x 10 frequencies: PV integral {pv:.2e}, pole-subtracted transform {independent:.2e} (< 1e-5)"),
    )
}

fn star_oracle() -> Verdict {
    let (t, n) = (0.1, 2048);
    let continuum = covariance_numeric(&ld(1.0), &probe(), t).map_err(|e| e.to_string())?.covariance;
    let star = discretize_bath(&ld(1.0), &probe(), n, 2000.0).map_err(|e| e.to_string())?;
    let c = star.reduced_probe_covariance(t).map_err(|e| e.to_string())?;
    let cov_err = rel_diff(c.sigma_xx, continuum.sigma_xx).max(rel_diff(c.sigma_pp, continuum.sigma_pp));

    let mut rng = StdRng::seed_from_u64(2024);
    let (mut checked, mut violations, mut singular) = (0, 0, 0);
    for _ in 0..100 {
        let size = rng.gen_range(2..40);
        let s = random::star(&mut rng, size).derivative_sign_summary().map_err(|e| e.to_string())?;
        checked += s.checked;
        violations += s.violations;
        singular += s.singular;
    }

    let mut fd_err: f64 = 0.0;
    for _ in 0..10 {
        let s = random::star(&mut rng, 20);
        let analytic = s.eigenvalue_coupling_derivatives().map_err(|e| e.to_string())?;
        let shift = s.shifted_frequency_sq();
        let size = s.n_modes();
        let at = |g: f64| {
            let mut v = s.interaction_matrix();
            for (k, c) in s.couplings.iter().enumerate() {
                v[k + 1] = g * c;
                v[(k + 1) * size] = g * c;
            }
            v[0] = shift;
            dense::eigenvalues(dense::from_row_major(&v))
        };
        let h = 1e-5;
        let (up, down) = (at(s.scale + h), at(s.scale - h));
        for i in 0..analytic.len() {
            fd_err = fd_err.max(rel_diff(analytic[i], (up[i] - down[i]) / (2.0 * h)));
        }
    }
    require(
        cov_err < 0.01 && violations == 0 && checked > 0 && fd_err < 1e-4,
        format!(
            "{n} bath modes: covariance error {cov_err:.2e} (< 1e-2); sign law {violations} violations in {checked} \
             eigenvalues ({singular} singular) over 100 systems; finite differences {fd_err:.2e} (< 1e-4)"
        ),
    )
}

fn moment_identities() -> Verdict {
    let basis = fock::Basis::new(60);
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let nu: f64 = rng.gen_range(0.7..3.0);
        let ratio: f64 = rng.gen_range(0.6..1.7);
        let w0: f64 = rng.gen_range(0.3..3.0);
        let f = basis.gibbs_moments(nu / ratio, nu * ratio, w0);
        let sigma = CovarianceMatrix::diagonal(f.sigma_xx, f.sigma_pp);
        if !sigma.is_physical() {
            return Err(format!("oracle produced an unphysical state {sigma:?}"));
        }
        worst = worst
            .max(rel_diff(Observable::XSquared.variance(&sigma, w0), f.var_x2))
            .max(rel_diff(Observable::Energy.variance(&sigma, w0), f.var_energy));
    }
    require(worst < 1e-6, format!("20 random states, cutoff 60: max rel error {worst:.2e} (< 1e-6)"))
}

fn special_functions() -> Verdict {
    let mut rng = StdRng::seed_from_u64(1);
    let (mut rec, mut conj): (f64, f64) = (0.0, 0.0);
    let mut samples = 0;
    while samples < 10_000 {
        let z = Complex64::from_polar(rng.gen_range(0.1..50.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let nearest = z.re.round();
        if nearest <= 0.0 && (z - nearest).norm() < 0.05 {
            continue;
        }
        samples += 1;
        let psi = digamma(z).map_err(|e| e.to_string())?;
        rec = rec.max((digamma(z + 1.0).unwrap() - psi - 1.0 / z).norm());
        conj = conj.max((digamma(z.conj()).unwrap() - psi.conj()).norm());
    }
    let ei = |x: f64| {
        let kind = if x < 0.0 { ExpIntegralKind::NegativeArg } else { ExpIntegralKind::PrincipalValue };
        exp_integral(x, kind).unwrap()
    };
    let mut deriv: f64 = 0.0;
    for _ in 0..2_000 {
        let x: f64 = rng.gen_range(0.05..60.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h = (1e-3 * x.abs().max(1.0)).min(0.25 * x.abs());
        let d = (-ei(x + 2.0 * h) + 8.0 * ei(x + h) - 8.0 * ei(x - h) + ei(x - 2.0 * h)) / (12.0 * h);
        deriv = deriv.max(rel_diff(d, x.exp() / x));
    }
    require(
        rec < 1e-12 && conj < 1e-12 && deriv < 1e-6,
        format!("digamma recurrence {rec:.2e}, conjugation {conj:.2e} (< 1e-12, 1e4 samples); Ei derivative {deriv:.2e} (< 1e-6)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("route equivalence", route_equivalence),
        ("thermalization limit", thermalization),
        ("fig 1(a) shape", fig1a_shape),
        ("fig 1(b) monotonicity", fig1b_monotone),
        ("fig 2 behavior", fig2_behavior),
        ("fig 3 ordering", fig3_ordering),
        ("kramers-kronig oracle", kramers_kronig),
        ("star-system oracle", star_oracle),
        ("moment-identity oracle", moment_identities),
        ("special functions", special_functions),
    ];
    println!();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status} {name} [{secs:.2} s]: {detail}", i + 1);
    }
    println!("\nacceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
