use thermoprobe::figures::*;
use thermoprobe::metrology::BOUND_SLACK;
use thermoprobe::spectral::SpectralModel;
use thermoprobe::steady_state::{thermal_covariance, ProbeSpec, Route};

fn probe() -> ProbeSpec<f64> {
    ProbeSpec::new(1.0).unwrap()
}

fn numbers(t: &Table, name: &str) -> Vec<f64> {
    t.numbers(name).unwrap().into_iter().map(Option::unwrap).collect()
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let spec = SweepSpec {
        model: SpectralModel::lorentz_drude(1.0, 100.0).unwrap(),
        probe: probe(),
        axis: Axis::Temperature,
        temperature: f64::NAN,
        grid: Grid::log(1e-2, 1.0, 9).unwrap(),
        route: None,
    };
    let a = sweep_table(&spec, "test").unwrap();
    assert_eq!(numbers(&a, "axis"), spec.grid.values());
    assert_eq!(numbers(&a, "temperature"), spec.grid.values());
    assert_eq!(a.to_csv(), sweep_table(&spec, "test").unwrap().to_csv());

    let numeric = sweep_table(&SweepSpec { route: Some(Route::Numeric), ..spec }, "test").unwrap();
    for (x, y) in numbers(&a, "qfi").iter().zip(numbers(&numeric, "qfi")) {
        assert!((x - y).abs() < 1e-4 * x);
    }
}

#[test]
fn gamma_sweep_holds_temperature() {
    let spec = SweepSpec {
        model: SpectralModel::exp_cutoff(1.0, 100.0, 2.0).unwrap(),
        probe: probe(),
        axis: Axis::Gamma,
        temperature: 0.05,
        grid: Grid::log(0.1, 10.0, 3).unwrap(),
        route: None,
    };
    let recs = sweep(&spec).unwrap();
    for (r, g) in recs.iter().zip(spec.grid.values()) {
        assert_eq!(r.report.gamma, g);
        assert_eq!(r.report.temperature, 0.05);
        assert!(r.report.f_energy <= r.report.qfi * (1.0 + BOUND_SLACK));
    }
    let bad = SweepSpec { route: Some(Route::Analytic), ..spec };
    assert!(sweep(&bad).is_err());
}

#[test]
fn figure_tables_have_one_block_per_curve() {
    let grid = Grid::log(1e-2, 1.0, 4).unwrap();
    let t = fig1a(&FIG1A_GAMMAS, DEFAULT_OMEGA_C, &grid).unwrap();
    assert_eq!(t.rows.len(), 12);
    let i = t.column("block").unwrap();
    assert_eq!(t.rows.iter().filter(|r| r[i] == t.rows[0][i]).count(), 4);
    let (rel, qfi, temp) = (numbers(&t, "rel_error"), numbers(&t, "qfi"), numbers(&t, "temperature"));
    for k in 0..12 {
        assert!((rel[k] - 1.0 / (temp[k] * qfi[k].sqrt())).abs() < 1e-12 * rel[k]);
    }

    let t = fig2(&FIG2_GAMMAS, DEFAULT_OMEGA_C, &grid).unwrap();
    for (r, (fe, q)) in numbers(&t, "ratio_energy").iter().zip(numbers(&t, "f_energy").iter().zip(numbers(&t, "qfi"))) {
        assert!((r - fe / q).abs() < 1e-12);
        assert!(*r <= 1.0 + BOUND_SLACK);
    }

    let t = fig3(FIG3_GAMMA, DEFAULT_OMEGA_C, &FIG3_OHMICITIES, &grid).unwrap();
    assert_eq!(t.rows.len(), 8);
    assert!(numbers(&t, "j_s_at_axis").iter().all(|&j| j > 0.0));

    let gammas = Grid::log(0.1, 10.0, 3).unwrap();
    let t = fig1b(&[0.1], DEFAULT_OMEGA_C, &gammas).unwrap();
    assert_eq!(numbers(&t, "gamma"), gammas.values());
}

#[test]
fn star_sweep_starts_thermal() {
    let sweep = StarSweep {
        model: SpectralModel::lorentz_drude(1.0, 100.0).unwrap(),
        probe: probe(),
        temperature: 0.2,
        n_modes: 128,
        omega_max: 2000.0,
        grid: Grid::new(0.0, 1.0, 3, false).unwrap(),
    };
    let t = star_sweep(&sweep).unwrap();
    let th = thermal_covariance(&probe(), 0.2).unwrap();
    assert_eq!(numbers(&t, "sigma_xx")[0], th.sigma_xx);
    assert_eq!(numbers(&t, "sigma_pp")[0], th.sigma_pp);
    assert!(numbers(&t, "sign_violations").iter().all(|&v| v == 0.0));
    let star = numbers(&t, "star_qfi");
    assert!(star.windows(2).all(|w| w[1] > w[0]));
}
