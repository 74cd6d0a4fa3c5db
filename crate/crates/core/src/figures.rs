//! Parameter sweeps behind the figures, evaluated in parallel and returned
//! as ordered tables.

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{Error, Result};
use crate::metrology::{qfi_equilibrium, qfi_of_family, report_of_state, SensitivityReport};
use crate::scalar::rel_diff;
use crate::spectral::SpectralModel;
use crate::star::{discretize_bath, StarMarginal};
use crate::steady_state::{thermal_covariance, CovarianceMatrix, ProbeSpec, Route, SteadyState};

pub const FIG1A_GAMMAS: [f64; 3] = [0.1, 1.0, 5.0];
pub const FIG1B_TEMPERATURES: [f64; 3] = [1.0, 0.1, 0.01];
pub const FIG2_GAMMAS: [f64; 3] = [5e-3, 5e-2, 0.5];
pub const FIG3_GAMMA: f64 = 0.1;
pub const FIG3_OHMICITIES: [f64; 2] = [1.0, 2.0];
pub const DEFAULT_OMEGA_C: f64 = 100.0;
pub const DEFAULT_POINTS: usize = 40;

/// Sampling of a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize, log: bool) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::invalid("stop", stop, "grid needs finite start < stop"));
        }
        if points < 2 {
            return Err(Error::invalid("points", points as f64, "grid needs at least two points"));
        }
        if log && start <= 0.0 {
            return Err(Error::invalid("start", start, "log spacing needs positive endpoints"));
        }
        Ok(Self {
            start,
            stop,
            points,
            log,
        })
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(start, stop, points, true)
    }

    /// Grid values; both endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n {
                    return self.stop;
                }
                let u = i as f64 / n as f64;
                if self.log {
                    (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + u * (self.stop - self.start)
                }
            })
            .collect()
    }
}

/// Table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Number(f64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Number(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Number(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Number(v) => format!("{:.16e}", v),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Text(t) => s.serialize_str(t),
            Cell::Number(v) => s.serialize_f64(*v),
        }
    }
}

/// Rows of named columns plus `key = value` metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column, `None` for text cells.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| r[i].as_number()).collect())
    }

    /// `#`-prefixed metadata, one header row, then the data rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {} = {}\n", k, v));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows as maps from column name to cell, in column order.
    pub fn records(&self) -> Vec<Record<'_>> {
        self.rows
            .iter()
            .map(|cells| Record {
                columns: &self.columns,
                cells,
            })
            .collect()
    }
}

pub struct Record<'a> {
    columns: &'a [String],
    cells: &'a [Cell],
}

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(c, v)?;
        }
        map.end()
    }
}

/// Quantity varied along a sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Temperature,
    Gamma,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Temperature => "temperature",
            Axis::Gamma => "gamma",
        }
    }
}

/// Sensitivity sweep along one axis, the other parameters held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: SpectralModel<f64>,
    pub probe: ProbeSpec<f64>,
    pub axis: Axis,
    /// Temperature of a γ sweep; ignored along T.
    pub temperature: f64,
    pub grid: Grid,
    /// `None` picks [`Route::preferred`].
    pub route: Option<Route>,
}

/// One point of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRecord {
    pub axis: f64,
    #[serde(flatten)]
    pub report: SensitivityReport<f64>,
}

fn report_at(model: &SpectralModel<f64>, probe: &ProbeSpec<f64>, temp: f64, route: Option<Route>) -> Result<SensitivityReport<f64>> {
    let route = route.unwrap_or_else(|| Route::preferred(model));
    let state = SteadyState::new(model, probe, temp, route)?;
    state.covariance.check_physical()?;
    report_of_state(&state)
}

/// Every point of the sweep, in axis order; fails on the first bad point.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.grid
        .values()
        .into_par_iter()
        .map(|x| {
            let report = match spec.axis {
                Axis::Temperature => report_at(&spec.model, &spec.probe, x, spec.route)?,
                Axis::Gamma => report_at(&spec.model.with_gamma(x)?, &spec.probe, spec.temperature, spec.route)?,
            };
            Ok(SweepRecord { axis: x, report })
        })
        .collect()
}

const REPORT_COLUMNS: [&str; 11] = [
    "model",
    "gamma",
    "omega_c",
    "temperature",
    "sigma_xx",
    "sigma_pp",
    "qfi",
    "qfi_error",
    "f_energy",
    "f_xsq",
    "rel_error",
];

fn report_cells(r: &SensitivityReport<f64>) -> Vec<Cell> {
    vec![
        r.model.clone().into(),
        r.gamma.into(),
        r.omega_c.into(),
        r.temperature.into(),
        r.sigma_xx.into(),
        r.sigma_pp.into(),
        r.qfi.into(),
        r.qfi_error.into(),
        r.f_energy.into(),
        r.f_xsq.into(),
        r.rel_error.into(),
    ]
}

fn columns(lead: &[&str], extra: &[&str]) -> Vec<String> {
    lead.iter()
        .chain(REPORT_COLUMNS.iter())
        .chain(extra.iter())
        .map(|c| c.to_string())
        .collect()
}

fn header(table: Table, command: &str) -> Table {
    table.meta("thermoprobe", env!("CARGO_PKG_VERSION")).meta("command", command)
}

/// Single sweep as a table with columns `axis`, the report fields.
pub fn sweep_table(spec: &SweepSpec, command: &str) -> Result<Table> {
    let records = sweep(spec)?;
    let mut t = header(Table::default(), command)
        .meta("model", spec.model.id())
        .meta("omega0", spec.probe.omega0)
        .meta("axis", spec.axis.name());
    if spec.axis == Axis::Gamma {
        t = t.meta("temperature", spec.temperature);
    } else {
        t = t.meta("gamma", spec.model.gamma);
    }
    t.columns = columns(&["axis"], &[]);
    for r in &records {
        let mut row = vec![Cell::Number(r.axis)];
        row.extend(report_cells(&r.report));
        t.push(row);
    }
    Ok(t)
}

/// Blocks of sweeps sharing one grid; `(label, spec)` pairs in output order.
fn block_sweeps(blocks: &[(String, SweepSpec)]) -> Result<Vec<Vec<SweepRecord>>> {
    blocks.par_iter().map(|(_, spec)| sweep(spec)).collect()
}

fn probe() -> ProbeSpec<f64> {
    ProbeSpec { omega0: 1.0 }
}

pub fn default_fig1a_grid() -> Grid {
    Grid {
        start: 1e-3,
        stop: 1.0,
        points: DEFAULT_POINTS,
        log: true,
    }
}

/// δT/T against T for each γ, with the equilibrium reference
/// δT/T_eq = 2T sinh(ω₀/2T)/ω₀.
pub fn fig1a(gammas: &[f64], omega_c: f64, grid: &Grid) -> Result<Table> {
    let blocks = gammas
        .iter()
        .map(|&g| {
            Ok((
                format!("gamma={}", g),
                SweepSpec {
                    model: SpectralModel::lorentz_drude(g, omega_c)?,
                    probe: probe(),
                    axis: Axis::Temperature,
                    temperature: 0.0,
                    grid: *grid,
                    route: None,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = block_sweeps(&blocks)?;
    let mut t = header(Table::default(), "fig1a")
        .meta("omega_c", omega_c)
        .meta("omega0", 1.0);
    t.columns = columns(&["block", "axis"], &["qfi_eq", "rel_error_eq"]);
    for ((label, _), records) in blocks.iter().zip(results) {
        for r in records {
            let w0 = r.report.omega0;
            let temp = r.axis;
            let mut row = vec![Cell::Text(label.clone()), Cell::Number(temp)];
            row.extend(report_cells(&r.report));
            row.push(qfi_equilibrium(w0, temp)?.into());
            row.push((2.0 * temp * (w0 / (2.0 * temp)).sinh() / w0).into());
            t.push(row);
        }
    }
    Ok(t)
}

pub fn default_fig1b_grid() -> Grid {
    Grid {
        start: 1e-3,
        stop: 10.0,
        points: DEFAULT_POINTS,
        log: true,
    }
}

/// 𝓕_T against γ at each temperature.
pub fn fig1b(temperatures: &[f64], omega_c: f64, grid: &Grid) -> Result<Table> {
    let model = SpectralModel::lorentz_drude(1.0, omega_c)?;
    let blocks: Vec<_> = temperatures
        .iter()
        .map(|&temp| {
            (
                format!("T={}", temp),
                SweepSpec {
                    model,
                    probe: probe(),
                    axis: Axis::Gamma,
                    temperature: temp,
                    grid: *grid,
                    route: None,
                },
            )
        })
        .collect();
    let results = block_sweeps(&blocks)?;
    let mut t = header(Table::default(), "fig1b")
        .meta("omega_c", omega_c)
        .meta("omega0", 1.0);
    t.columns = columns(&["block", "axis"], &[]);
    for ((label, _), records) in blocks.iter().zip(results) {
        for r in records {
            let mut row = vec![Cell::Text(label.clone()), Cell::Number(r.axis)];
            row.extend(report_cells(&r.report));
            t.push(row);
        }
    }
    Ok(t)
}

pub fn default_fig2_grid() -> Grid {
    Grid {
        start: 1e-2,
        stop: 1.0,
        points: DEFAULT_POINTS,
        log: true,
    }
}

/// 𝓕_T, F_T(H_p) and F_T(x²) against T for each γ, with the two ratios.
pub fn fig2(gammas: &[f64], omega_c: f64, grid: &Grid) -> Result<Table> {
    let blocks = gammas
        .iter()
        .map(|&g| {
            Ok((
                format!("gamma={}", g),
                SweepSpec {
                    model: SpectralModel::lorentz_drude(g, omega_c)?,
                    probe: probe(),
                    axis: Axis::Temperature,
                    temperature: 0.0,
                    grid: *grid,
                    route: None,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = block_sweeps(&blocks)?;
    let mut t = header(Table::default(), "fig2")
        .meta("omega_c", omega_c)
        .meta("omega0", 1.0);
    t.columns = columns(&["block", "axis"], &["ratio_energy", "ratio_xsq"]);
    for ((label, _), records) in blocks.iter().zip(results) {
        for r in records {
            let mut row = vec![Cell::Text(label.clone()), Cell::Number(r.axis)];
            row.extend(report_cells(&r.report));
            row.push((r.report.f_energy / r.report.qfi).into());
            row.push((r.report.f_xsq / r.report.qfi).into());
            t.push(row);
        }
    }
    Ok(t)
}

pub fn default_fig3_grid() -> Grid {
    default_fig1a_grid()
}

/// 𝓕_T against T for the Ohmic and super-Ohmic exponential cutoffs.
/// `j_s_at_axis` is J_s(ω) at ω equal to the axis value, for the
/// spectral-density comparison.
pub fn fig3(gamma: f64, omega_c: f64, ohmicities: &[f64], grid: &Grid) -> Result<Table> {
    let blocks = ohmicities
        .iter()
        .map(|&s| {
            Ok((
                format!("s={}", s),
                SweepSpec {
                    model: SpectralModel::exp_cutoff(gamma, omega_c, s)?,
                    probe: probe(),
                    axis: Axis::Temperature,
                    temperature: 0.0,
                    grid: *grid,
                    route: None,
                },
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = block_sweeps(&blocks)?;
    let mut t = header(Table::default(), "fig3")
        .meta("gamma", gamma)
        .meta("omega_c", omega_c)
        .meta("omega0", 1.0);
    t.columns = columns(&["block", "axis"], &["j_s_at_axis"]);
    for ((label, spec), records) in blocks.iter().zip(results) {
        for r in records {
            let mut row = vec![Cell::Text(label.clone()), Cell::Number(r.axis)];
            row.extend(report_cells(&r.report));
            row.push(spec.model.spectral_density(r.axis)?.into());
            t.push(row);
        }
    }
    Ok(t)
}

/// Star-system sweep over the coupling scale G.
#[derive(Debug, Clone, PartialEq)]
pub struct StarSweep {
    pub model: SpectralModel<f64>,
    pub probe: ProbeSpec<f64>,
    pub temperature: f64,
    pub n_modes: usize,
    pub omega_max: f64,
    pub grid: Grid,
}

/// Continuum steady state matching a star with couplings scaled by G:
/// J scales with G², so γ → G²γ.
fn continuum_reference(sweep: &StarSweep, g: f64) -> Result<CovarianceMatrix<f64>> {
    if g == 0.0 {
        return thermal_covariance(&sweep.probe, sweep.temperature);
    }
    let model = sweep.model.with_gamma(g * g * sweep.model.gamma)?;
    Ok(SteadyState::new(&model, &sweep.probe, sweep.temperature, Route::preferred(&model))?.covariance)
}

/// Reduced covariance, star QFI and marginal QFI of the discretized bath at
/// each G, with the continuum reference and the derivative sign summary.
pub fn star_sweep(sweep: &StarSweep) -> Result<Table> {
    let base = discretize_bath(&sweep.model, &sweep.probe, sweep.n_modes, sweep.omega_max)?;
    let rows = sweep
        .grid
        .values()
        .into_par_iter()
        .map(|g| -> Result<Vec<Cell>> {
            let star = base.with_scale(g)?;
            let marginal = StarMarginal::new(&star, sweep.temperature)?;
            let cov = marginal.covariance.check_physical()?;
            let star_qfi = marginal.modes.star_qfi(sweep.temperature)?;
            let qfi = qfi_of_family(&marginal)?;
            if qfi > star_qfi * (1.0 + crate::metrology::BOUND_SLACK) {
                return Err(Error::BoundChain {
                    observable: "probe marginal",
                    sensitivity: qfi,
                    qfi: star_qfi,
                });
            }
            let reference = continuum_reference(sweep, g)?;
            let signs = star.derivative_sign_summary()?;
            Ok(vec![
                g.into(),
                cov.sigma_xx.into(),
                cov.sigma_pp.into(),
                star_qfi.into(),
                qfi.into(),
                reference.sigma_xx.into(),
                reference.sigma_pp.into(),
                rel_diff(cov.sigma_xx, reference.sigma_xx).into(),
                rel_diff(cov.sigma_pp, reference.sigma_pp).into(),
                star.shifted_frequency_sq().into(),
                signs.checked.into(),
                signs.violations.into(),
                signs.singular.into(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = header(
        Table::new(&[
            "scale",
            "sigma_xx",
            "sigma_pp",
            "star_qfi",
            "marginal_qfi",
            "continuum_sigma_xx",
            "continuum_sigma_pp",
            "rel_diff_xx",
            "rel_diff_pp",
            "shifted_freq_sq",
            "sign_checked",
            "sign_violations",
            "sign_singular",
        ]),
        "star",
    )
    .meta("model", sweep.model.id())
    .meta("gamma", sweep.model.gamma)
    .meta("omega_c", sweep.model.omega_c)
    .meta("omega0", sweep.probe.omega0)
    .meta("temperature", sweep.temperature)
    .meta("n_modes", sweep.n_modes)
    .meta("omega_max", sweep.omega_max);
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_exact() {
        let g = Grid::log(1e-3, 1.0, 7).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[6], 1.0);
        assert!((v[3] - 10f64.powf(-1.5)).abs() < 1e-15);
        assert_eq!(Grid::new(0.0, 1.0, 3, false).unwrap().values(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_rejects_bad_specs() {
        assert!(Grid::new(1.0, 1.0, 3, false).is_err());
        assert!(Grid::new(0.0, 1.0, 1, false).is_err());
        assert!(Grid::new(0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]).meta("k", 1);
        t.push(vec!["x".into(), 0.5.into()]);
        assert_eq!(t.to_csv(), "# k = 1\na,b\nx,5.0000000000000000e-1\n");
    }
}
