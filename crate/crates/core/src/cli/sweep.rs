//! Point evaluation and Cartesian parameter sweeps.

use rayon::prelude::*;

use super::config::{check_axis_value, AbsorptionChoice, AxisName, Metric, Param, Scenario, SweepSection};
use super::table::{Cell, Table};
use super::CliError;
use crate::antenna::CosinePattern;
use crate::capacity::{budget_from_p_over_no_db, evaluate_capacity, CapacityInputs};
use crate::channel::{evaluate, path_gain_db, SurfacePattern};

/// Metric values of one point; `None` for metrics not requested.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricValues {
    pub pattern: Option<f64>,
    pub h_abs: Option<f64>,
    pub pathgain_db: Option<f64>,
    pub snr_min: Option<f64>,
    pub snr_mean: Option<f64>,
    pub snr_max: Option<f64>,
    pub capacity_bps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    /// A leg is shorter than the Fraunhofer distance; `None` if the
    /// geometry itself is invalid.
    pub far_field_warning: Option<bool>,
    pub values: Result<MetricValues, CliError>,
}

/// Evaluates the requested metrics at one scenario.
pub fn evaluate_point(s: &Scenario, metrics: &[Metric]) -> PointOutcome {
    let far_field_warning = match (s.grid(), s.link.geometry()) {
        (Ok(grid), Ok(link)) => Some(link.inside_far_field(&grid, s.wavelength())),
        _ => None,
    };
    PointOutcome {
        far_field_warning,
        values: metric_values(s, metrics),
    }
}

fn metric_values(s: &Scenario, metrics: &[Metric]) -> Result<MetricValues, CliError> {
    s.validate()?;
    let link = s.link.geometry()?;
    let mut out = MetricValues::default();
    if metrics.contains(&Metric::Pattern) {
        let pattern =
            CosinePattern::from_gain_db(s.tx_gain_db).map_err(|e| CliError::validation("antennas.tx_gain_db", e))?;
        out.pattern = Some(pattern.value(link.theta_tx, link.phi_tx));
    }
    if metrics
        .iter()
        .any(|m| matches!(m, Metric::PathgainDb | Metric::Snr | Metric::CapacityBps))
    {
        let cfg = s.channel_config()?;
        if metrics.contains(&Metric::PathgainDb) {
            let h = evaluate(&cfg, &link, s.evaluator).map_err(|e| CliError::from_channel("channel", e))?;
            out.h_abs = Some(h.magnitude());
            out.pathgain_db = Some(path_gain_db(&h).map_err(|e| CliError::from_channel("channel", e))?);
        }
        if metrics.iter().any(|m| matches!(m, Metric::Snr | Metric::CapacityBps)) {
            let (total_power_w, noise) = budget_from_p_over_no_db(s.p_over_no_db)
                .map_err(|e| CliError::validation("capacity.p_over_no_db", e))?;
            let inputs = CapacityInputs {
                f_lo_hz: s.f_lo_hz,
                f_hi_hz: s.f_hi_hz,
                subbands: s.subbands,
                total_power_w,
                noise,
                evaluator: s.evaluator,
            };
            let report = evaluate_capacity(&cfg, &link, &inputs).map_err(CliError::from_capacity)?;
            if metrics.contains(&Metric::Snr) {
                let snrs = &report.snrs;
                out.snr_min = snrs.iter().copied().reduce(f64::min);
                out.snr_max = snrs.iter().copied().reduce(f64::max);
                out.snr_mean = Some(crate::numeric::neumaier_sum(snrs.iter().copied()) / snrs.len() as f64);
            }
            if metrics.contains(&Metric::CapacityBps) {
                out.capacity_bps = Some(report.capacity_bps);
            }
        }
    }
    Ok(out)
}

fn metric_columns(metrics: &[Metric]) -> Vec<&'static str> {
    let mut cols = Vec::new();
    for m in metrics {
        match m {
            Metric::Pattern => cols.push("pattern"),
            Metric::PathgainDb => cols.extend(["h_abs", "pathgain_db"]),
            Metric::Snr => cols.extend(["snr_min", "snr_mean", "snr_max"]),
            Metric::CapacityBps => cols.push("capacity_bps"),
        }
    }
    cols
}

fn metric_cells(metrics: &[Metric], v: Option<&MetricValues>) -> Vec<Cell> {
    let cell = |x: Option<f64>| x.map_or(Cell::Empty, Cell::Num);
    let mut cells = Vec::new();
    for m in metrics {
        match (m, v) {
            (Metric::Pattern, Some(v)) => cells.push(cell(v.pattern)),
            (Metric::PathgainDb, Some(v)) => cells.extend([cell(v.h_abs), cell(v.pathgain_db)]),
            (Metric::Snr, Some(v)) => cells.extend([cell(v.snr_min), cell(v.snr_mean), cell(v.snr_max)]),
            (Metric::CapacityBps, Some(v)) => cells.push(cell(v.capacity_bps)),
            (m, None) => cells.extend(metric_columns(&[*m]).iter().map(|_| Cell::Empty)),
        }
    }
    cells
}

fn normalize_metrics(metrics: &[Metric]) -> Vec<Metric> {
    let mut m = metrics.to_vec();
    m.sort();
    m.dedup();
    m
}

/// Every metric at one scenario, with the resolved parameters in the notes.
/// Any failure aborts (a point has nowhere else to report it).
pub fn run_point(s: &Scenario) -> Result<Table, CliError> {
    let metrics = super::config::all_metrics();
    let outcome = evaluate_point(s, &metrics);
    let values = outcome.values?;
    let mut columns = vec!["absorption".to_string()];
    columns.extend(metric_columns(&metrics).into_iter().map(String::from));
    columns.push("far_field_warning".into());
    let mut row = vec![Cell::Text(s.absorption.label())];
    row.extend(metric_cells(&metrics, Some(&values)));
    row.push(flag_cell(outcome.far_field_warning));
    Ok(Table {
        notes: scenario_notes(s),
        columns,
        rows: vec![row],
    })
}

fn flag_cell(flag: Option<bool>) -> Cell {
    flag.map_or(Cell::Empty, |f| Cell::Int(f as i64))
}

/// Resolved parameters of a scenario, one `key: value` line each.
pub fn scenario_notes(s: &Scenario) -> Vec<String> {
    let q = |db: f64| CosinePattern::from_gain_db(db).map_or(f64::NAN, |p| p.exponent());
    let lambda = s.wavelength();
    let mut notes = vec![
        format!(
            "ris: {}x{} cells, pitch_x_m={}, pitch_y_m={}, amplitude={}, phase_deg={}",
            s.rows, s.cols, s.pitch_x_m, s.pitch_y_m, s.amplitude, s.phase_deg
        ),
        format!(
            "link: d1_m={}, d2_m={}, theta_tx_deg={}, phi_tx_deg={}, theta_rx_deg={}, phi_rx_deg={}",
            s.link.d1_m, s.link.d2_m, s.link.theta_tx_deg, s.link.phi_tx_deg, s.link.theta_rx_deg, s.link.phi_rx_deg
        ),
        format!(
            "antennas: tx_gain_db={} (q={:.6}), rx_gain_db={} (q={:.6}), cell_gain_db={} (q={:.6}); pattern cos^q(theta), gain 2(q+1)",
            s.tx_gain_db,
            q(s.tx_gain_db),
            s.rx_gain_db,
            q(s.rx_gain_db),
            s.cell_gain_db,
            q(s.cell_gain_db)
        ),
        format!(
            "transceivers_aimed={} (true: transceiver patterns taken as 1 toward every cell)",
            s.transceivers_aimed
        ),
        format!(
            "surface_pattern={} (pattern evaluated at the surface-side angles)",
            match s.surface_pattern {
                SurfacePattern::Transceiver => "transceiver",
                SurfacePattern::Cell => "cell",
            }
        ),
        format!("channel: frequency_hz={}, wavelength_m={:.9}, evaluator={}", s.frequency_hz, lambda, s.evaluator.name()),
        absorption_note(s),
        format!(
            "capacity: [{}, {}] Hz in W={} equal sub-bands, equal power split, N_o=1, P=10^(p_over_no_db/10), p_over_no_db={}",
            s.f_lo_hz, s.f_hi_hz, s.subbands, s.p_over_no_db
        ),
        "pathgain_db = 20*log10|h|".into(),
    ];
    if let Ok(grid) = s.grid() {
        notes.push(format!(
            "far_field: boundary 2D^2/lambda={:.6} m (D={:.6} m); far_field_warning=1 when d1 or d2 is shorter",
            grid.far_field_boundary(lambda),
            grid.diagonal()
        ));
        if !grid.pitch_in_design_range(lambda) {
            notes.push(format!(
                "warning: pitch outside the design range [lambda/10, lambda/2] = [{:.6e}, {:.6e}] m",
                lambda / 10.0,
                lambda / 2.0
            ));
        }
    }
    notes
}

fn absorption_note(s: &Scenario) -> String {
    let (lo, hi) = s.spectrum.domain();
    let state = s.spectrum.state().map_or(String::new(), |st| format!(", {st}"));
    if s.spectrum.is_vacuum() {
        format!(
            "absorption={} (kappa=0, tau=1 over [{lo}, {hi}] Hz)",
            s.absorption.label()
        )
    } else {
        format!(
            "absorption={} (table over [{lo}, {hi}] Hz{state})",
            s.absorption.label()
        )
    }
}

/// One sweep dimension. Each point sets every parameter in `params`;
/// presets use this to pair pitch with cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub params: Vec<Param>,
    pub points: Vec<Vec<f64>>,
}

impl Axis {
    /// `steps` evenly spaced values, endpoints exact.
    pub fn linear(param: Param, start: f64, stop: f64, steps: usize) -> Self {
        let values = (0..steps)
            .map(|i| {
                if i + 1 == steps && steps > 1 {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (steps.max(2) - 1) as f64
                }
            })
            .collect();
        Self::list(param, values)
    }

    pub fn list(param: Param, values: Vec<f64>) -> Self {
        Self {
            params: vec![param],
            points: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn paired(params: Vec<Param>, points: Vec<Vec<f64>>) -> Self {
        debug_assert!(points.iter().all(|p| p.len() == params.len()));
        Self { params, points }
    }
}

/// Axes (outer first), metrics and absorption variants of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub metrics: Vec<Metric>,
    /// Outermost dimension; empty means the base scenario's table only.
    pub absorptions: Vec<AbsorptionChoice>,
}

impl SweepSpec {
    /// Checks a `[sweep]` section: one or two distinct axes, `steps >= 2`,
    /// every value inside its parameter's domain.
    pub fn from_section(section: &SweepSection) -> Result<Self, CliError> {
        if section.axes.is_empty() || section.axes.len() > 2 {
            return Err(CliError::validation(
                "sweep.axes",
                format!("expected 1 or 2 axes, got {}", section.axes.len()),
            ));
        }
        if section.axes.len() == 2 && section.axes[0].name == section.axes[1].name {
            return Err(CliError::validation("sweep.axes[1].name", "duplicates axis 0"));
        }
        if section.metrics.is_empty() {
            return Err(CliError::validation("sweep.metrics", "at least one metric required"));
        }
        let mut axes = Vec::new();
        for (i, a) in section.axes.iter().enumerate() {
            if a.steps < 2 {
                return Err(CliError::validation(
                    &format!("sweep.axes[{i}].steps"),
                    format!("{} < 2", a.steps),
                ));
            }
            for (key, v) in [("start", a.start), ("stop", a.stop)] {
                check_axis_value(a.name, v).map_err(|e| CliError::validation(&format!("sweep.axes[{i}].{key}"), e))?;
            }
            axes.push(Axis::linear(a.name.into(), a.start, a.stop, a.steps));
        }
        Ok(Self {
            axes,
            metrics: normalize_metrics(&section.metrics),
            absorptions: Vec::new(),
        })
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.points.len()).product::<usize>() * self.absorptions.len().max(1)
    }
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub absorption: String,
    pub settings: Vec<(Param, f64)>,
    pub outcome: PointOutcome,
}

impl SweepPoint {
    pub fn setting(&self, param: Param) -> Option<f64> {
        self.settings.iter().find(|(p, _)| *p == param).map(|&(_, v)| v)
    }
}

/// Parameter settings of every grid point, outer axis major.
fn grid_settings(axes: &[Axis]) -> Vec<Vec<(Param, f64)>> {
    let mut rows: Vec<Vec<(Param, f64)>> = vec![Vec::new()];
    for axis in axes {
        rows = rows
            .into_iter()
            .flat_map(|prefix| {
                axis.points.iter().map(move |point| {
                    let mut row = prefix.clone();
                    row.extend(axis.params.iter().copied().zip(point.iter().copied()));
                    row
                })
            })
            .collect();
    }
    rows
}

/// Evaluates every grid point on a pool of `jobs` threads (`0` = one per
/// core). Row order is fixed by the axes, not by completion order.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepPoint>, CliError> {
    let bases = if spec.absorptions.is_empty() {
        vec![base.clone()]
    } else {
        spec.absorptions
            .iter()
            .map(|a| base.clone().with_absorption(a.clone()))
            .collect::<Result<Vec<_>, _>>()?
    };
    let settings = grid_settings(&spec.axes);
    let work: Vec<(&Scenario, &Vec<(Param, f64)>)> = bases
        .iter()
        .flat_map(|b| settings.iter().map(move |s| (b, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let metrics = normalize_metrics(&spec.metrics);
    Ok(pool.install(|| {
        work.par_iter()
            .map(|(b, setting)| {
                let mut s = (*b).clone();
                for &(p, v) in setting.iter() {
                    s.apply(p, v);
                }
                SweepPoint {
                    absorption: s.absorption.label(),
                    settings: setting.to_vec(),
                    outcome: evaluate_point(&s, &metrics),
                }
            })
            .collect()
    }))
}

/// Table of sweep results: absorption, axis columns, metrics, far-field
/// flag and a row-local error message.
pub fn sweep_table(spec: &SweepSpec, points: &[SweepPoint], notes: Vec<String>) -> Table {
    let metrics = normalize_metrics(&spec.metrics);
    let params: Vec<Param> = spec.axes.iter().flat_map(|a| a.params.iter().copied()).collect();
    let mut columns = vec!["absorption".to_string()];
    columns.extend(params.iter().map(|p| p.column().to_string()));
    columns.extend(metric_columns(&metrics).into_iter().map(String::from));
    columns.extend(["far_field_warning".to_string(), "error".to_string()]);
    let rows = points
        .iter()
        .map(|pt| {
            let mut row = vec![Cell::Text(pt.absorption.clone())];
            row.extend(params.iter().map(|&p| match p {
                Param::CellsPerSide | Param::Subbands => pt.setting(p).map_or(Cell::Empty, |v| Cell::Int(v as i64)),
                _ => pt.setting(p).map_or(Cell::Empty, Cell::Num),
            }));
            row.extend(metric_cells(&metrics, pt.outcome.values.as_ref().ok()));
            row.push(flag_cell(pt.outcome.far_field_warning));
            row.push(match &pt.outcome.values {
                Ok(_) => Cell::Empty,
                Err(e) => Cell::Text(e.to_string()),
            });
            row
        })
        .collect();
    Table { notes, columns, rows }
}

/// Sweep driven by a scenario file's `[sweep]` section.
pub fn run_config_sweep(base: &Scenario, section: &SweepSection, jobs: usize) -> Result<Table, CliError> {
    let spec = SweepSpec::from_section(section)?;
    let points = run_sweep(base, &spec, jobs)?;
    let mut notes = scenario_notes(base);
    for (i, a) in section.axes.iter().enumerate() {
        notes.push(format!(
            "sweep axis {i}: {} from {} to {} in {} steps ({})",
            a.name.column(),
            a.start,
            a.stop,
            a.steps,
            axis_meaning(a.name)
        ));
    }
    Ok(sweep_table(&spec, &points, notes))
}

fn axis_meaning(name: AxisName) -> &'static str {
    match name {
        AxisName::ThetaDeg => "sets theta_tx = theta_rx",
        AxisName::GainDb => "sets tx_gain_db = rx_gain_db",
        AxisName::DM => "sets d1 = d2",
        AxisName::PitchM => "sets pitch_x = pitch_y, cell counts fixed",
        AxisName::POverNoDb => "sets p_over_no_db",
        AxisName::FrequencyHz => "sets the carrier for pattern/pathgain metrics",
    }
}
