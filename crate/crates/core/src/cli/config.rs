//! TOML scenario files and their resolution into validated parameters.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use super::CliError;
use crate::antenna::CosinePattern;
use crate::atmosphere::AbsorptionSpectrum;
use crate::channel::{wavelength, ChannelConfig, Evaluator, Reflection, ReflectionCoefficient, SurfacePattern};
use crate::geometry::{LinkGeometry, NodePosition, RisGrid};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub ris: RisSection,
    pub link: LinkSection,
    #[serde(default)]
    pub antennas: AntennaSection,
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub capacity: CapacitySection,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSection {
    pub rows: usize,
    /// Defaults to `rows`.
    pub cols: Option<usize>,
    pub pitch_x_m: f64,
    /// Defaults to `pitch_x_m`.
    pub pitch_y_m: Option<f64>,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkSection {
    Specular {
        distance_m: f64,
        theta_deg: f64,
        #[serde(default)]
        phi_deg: f64,
    },
    Angles {
        d1_m: f64,
        d2_m: f64,
        theta_tx_deg: f64,
        #[serde(default)]
        phi_tx_deg: f64,
        theta_rx_deg: f64,
        #[serde(default = "half_turn_deg")]
        phi_rx_deg: f64,
    },
    Positions {
        tx_m: [f64; 3],
        rx_m: [f64; 3],
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSection {
    #[serde(default = "default_transceiver_gain")]
    pub tx_gain_db: f64,
    #[serde(default = "default_transceiver_gain")]
    pub rx_gain_db: f64,
    #[serde(default = "default_cell_gain")]
    pub cell_gain_db: f64,
    #[serde(default = "yes")]
    pub transceivers_aimed: bool,
    #[serde(default)]
    pub surface_pattern: SurfacePatternName,
}

impl Default for AntennaSection {
    fn default() -> Self {
        Self {
            tx_gain_db: default_transceiver_gain(),
            rx_gain_db: default_transceiver_gain(),
            cell_gain_db: default_cell_gain(),
            transceivers_aimed: true,
            surface_pattern: SurfacePatternName::Transceiver,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfacePatternName {
    #[default]
    Transceiver,
    Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorName {
    Exact,
    FarField,
    #[default]
    Specular,
}

impl From<EvaluatorName> for Evaluator {
    fn from(e: EvaluatorName) -> Self {
        match e {
            EvaluatorName::Exact => Evaluator::Exact,
            EvaluatorName::FarField => Evaluator::FarField,
            EvaluatorName::Specular => Evaluator::Specular,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    #[serde(default = "default_frequency")]
    pub frequency_hz: f64,
    #[serde(default)]
    pub evaluator: EvaluatorName,
    /// `vacuum`, `default`, or a path to a CSV table.
    #[serde(default = "default_absorption")]
    pub absorption: String,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            frequency_hz: default_frequency(),
            evaluator: EvaluatorName::Specular,
            absorption: default_absorption(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapacitySection {
    #[serde(default = "default_f_lo")]
    pub f_lo_hz: f64,
    #[serde(default = "default_f_hi")]
    pub f_hi_hz: f64,
    #[serde(default = "default_subbands")]
    pub subbands: usize,
    #[serde(default = "default_p_over_no")]
    pub p_over_no_db: f64,
}

impl Default for CapacitySection {
    fn default() -> Self {
        Self {
            f_lo_hz: default_f_lo(),
            f_hi_hz: default_f_hi(),
            subbands: default_subbands(),
            p_over_no_db: default_p_over_no(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<AxisSection>,
    #[serde(default = "all_metrics")]
    pub metrics: Vec<Metric>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

/// Parameters a sweep axis can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    /// `θ_TX = θ_RX`.
    ThetaDeg,
    /// `G_t = G_r`.
    GainDb,
    /// `d1 = d2`.
    DM,
    /// `d_x = d_y`.
    PitchM,
    POverNoDb,
    FrequencyHz,
}

impl AxisName {
    pub fn column(&self) -> &'static str {
        Param::from(*self).column()
    }
}

/// Every scenario parameter a sweep point can set, including the cell
/// count that presets pair with the pitch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    ThetaDeg,
    GainDb,
    DM,
    PitchM,
    CellsPerSide,
    POverNoDb,
    FrequencyHz,
    Subbands,
}

impl From<AxisName> for Param {
    fn from(a: AxisName) -> Self {
        match a {
            AxisName::ThetaDeg => Param::ThetaDeg,
            AxisName::GainDb => Param::GainDb,
            AxisName::DM => Param::DM,
            AxisName::PitchM => Param::PitchM,
            AxisName::POverNoDb => Param::POverNoDb,
            AxisName::FrequencyHz => Param::FrequencyHz,
        }
    }
}

impl Param {
    pub fn column(&self) -> &'static str {
        match self {
            Param::ThetaDeg => "theta_deg",
            Param::GainDb => "gain_db",
            Param::DM => "d_m",
            Param::PitchM => "pitch_m",
            Param::CellsPerSide => "cells_per_side",
            Param::POverNoDb => "p_over_no_db",
            Param::FrequencyHz => "frequency_hz",
            Param::Subbands => "subbands",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Pattern,
    PathgainDb,
    Snr,
    CapacityBps,
}

pub fn all_metrics() -> Vec<Metric> {
    vec![Metric::Pattern, Metric::PathgainDb, Metric::Snr, Metric::CapacityBps]
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn half_turn_deg() -> f64 {
    180.0
}
fn default_transceiver_gain() -> f64 {
    30.0
}
fn default_cell_gain() -> f64 {
    10.0
}
fn default_frequency() -> f64 {
    110e9
}
fn default_absorption() -> String {
    "default".into()
}
fn default_f_lo() -> f64 {
    110e9
}
fn default_f_hi() -> f64 {
    170e9
}
fn default_subbands() -> usize {
    60
}
fn default_p_over_no() -> f64 {
    25.0
}

/// Source of the absorption coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsorptionChoice {
    Vacuum,
    Default,
    File(PathBuf),
}

impl AbsorptionChoice {
    pub fn parse(s: &str) -> Self {
        match s {
            "vacuum" => Self::Vacuum,
            "default" => Self::Default,
            path => Self::File(PathBuf::from(path)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Vacuum => "vacuum".into(),
            Self::Default => "default".into(),
            Self::File(p) => p.display().to_string(),
        }
    }

    /// The vacuum spectrum spans `[f_min, f_max]`, widened to cover the
    /// D-band.
    pub fn load(&self, f_min: f64, f_max: f64) -> Result<AbsorptionSpectrum, CliError> {
        match self {
            Self::Vacuum => AbsorptionSpectrum::vacuum(f_min.min(110e9), f_max.max(170e9))
                .map_err(|e| CliError::validation("channel.absorption", e)),
            Self::Default => Ok(AbsorptionSpectrum::standard_dband()),
            Self::File(path) => {
                let file = std::fs::File::open(path)
                    .map_err(|e| CliError::validation("channel.absorption", format!("{}: {e}", path.display())))?;
                AbsorptionSpectrum::load(file)
                    .map_err(|e| CliError::validation("channel.absorption", format!("{}: {e}", path.display())))
            }
        }
    }
}

/// How the link is described; sweeps edit it in angle form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub d1_m: f64,
    pub d2_m: f64,
    pub theta_tx_deg: f64,
    pub phi_tx_deg: f64,
    pub theta_rx_deg: f64,
    pub phi_rx_deg: f64,
}

impl LinkParams {
    pub fn geometry(&self) -> Result<LinkGeometry, CliError> {
        check_elevation("link.theta_tx_deg", self.theta_tx_deg)?;
        check_elevation("link.theta_rx_deg", self.theta_rx_deg)?;
        LinkGeometry::new(
            self.d1_m,
            self.d2_m,
            self.theta_tx_deg.to_radians(),
            self.phi_tx_deg.to_radians(),
            self.theta_rx_deg.to_radians(),
            self.phi_rx_deg.to_radians(),
        )
        .map_err(|e| CliError::validation("link", e))
    }
}

fn check_elevation(path: &str, deg: f64) -> Result<(), CliError> {
    if (0.0..=90.0).contains(&deg) {
        Ok(())
    } else {
        Err(CliError::validation(
            path,
            format!("elevation {deg} deg outside [0, 90]"),
        ))
    }
}

/// A fully resolved scenario: plain numbers in CLI units (degrees, dB).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub rows: usize,
    pub cols: usize,
    pub pitch_x_m: f64,
    pub pitch_y_m: f64,
    pub amplitude: f64,
    pub phase_deg: f64,
    pub link: LinkParams,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub cell_gain_db: f64,
    pub transceivers_aimed: bool,
    pub surface_pattern: SurfacePattern,
    pub frequency_hz: f64,
    pub evaluator: Evaluator,
    pub absorption: AbsorptionChoice,
    pub spectrum: Arc<AbsorptionSpectrum>,
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub subbands: usize,
    pub p_over_no_db: f64,
}

impl Scenario {
    /// Resolves and validates a parsed file. `absorption_override` replaces
    /// `channel.absorption`.
    pub fn resolve(file: &ScenarioFile, absorption_override: Option<&AbsorptionChoice>) -> Result<Self, CliError> {
        let ris = &file.ris;
        let link = match file.link {
            LinkSection::Specular {
                distance_m,
                theta_deg,
                phi_deg,
            } => LinkParams {
                d1_m: distance_m,
                d2_m: distance_m,
                theta_tx_deg: theta_deg,
                phi_tx_deg: phi_deg,
                theta_rx_deg: theta_deg,
                phi_rx_deg: phi_deg + 180.0,
            },
            LinkSection::Angles {
                d1_m,
                d2_m,
                theta_tx_deg,
                phi_tx_deg,
                theta_rx_deg,
                phi_rx_deg,
            } => LinkParams {
                d1_m,
                d2_m,
                theta_tx_deg,
                phi_tx_deg,
                theta_rx_deg,
                phi_rx_deg,
            },
            LinkSection::Positions { tx_m, rx_m } => {
                let tx = NodePosition::transceiver(tx_m[0], tx_m[1], tx_m[2])
                    .map_err(|e| CliError::validation("link.tx_m", e))?;
                let rx = NodePosition::transceiver(rx_m[0], rx_m[1], rx_m[2])
                    .map_err(|e| CliError::validation("link.rx_m", e))?;
                let g = LinkGeometry::from_positions(&tx, &rx).map_err(|e| CliError::validation("link", e))?;
                LinkParams {
                    d1_m: g.d1,
                    d2_m: g.d2,
                    theta_tx_deg: g.theta_tx.to_degrees(),
                    phi_tx_deg: g.phi_tx.to_degrees(),
                    theta_rx_deg: g.theta_rx.to_degrees(),
                    phi_rx_deg: g.phi_rx.to_degrees(),
                }
            }
        };
        if let LinkSection::Specular {
            theta_deg, distance_m, ..
        } = file.link
        {
            check_elevation("link.theta_deg", theta_deg)?;
            if !(distance_m > 0.0 && distance_m.is_finite()) {
                return Err(CliError::validation(
                    "link.distance_m",
                    format!("{distance_m} must be positive"),
                ));
            }
        }

        let absorption = absorption_override
            .cloned()
            .unwrap_or_else(|| AbsorptionChoice::parse(&file.channel.absorption));
        let cap = &file.capacity;
        let spectrum = Arc::new(absorption.load(
            cap.f_lo_hz.min(file.channel.frequency_hz),
            cap.f_hi_hz.max(file.channel.frequency_hz),
        )?);

        let scenario = Self {
            rows: ris.rows,
            cols: ris.cols.unwrap_or(ris.rows),
            pitch_x_m: ris.pitch_x_m,
            pitch_y_m: ris.pitch_y_m.unwrap_or(ris.pitch_x_m),
            amplitude: ris.amplitude,
            phase_deg: ris.phase_deg,
            link,
            tx_gain_db: file.antennas.tx_gain_db,
            rx_gain_db: file.antennas.rx_gain_db,
            cell_gain_db: file.antennas.cell_gain_db,
            transceivers_aimed: file.antennas.transceivers_aimed,
            surface_pattern: match file.antennas.surface_pattern {
                SurfacePatternName::Transceiver => SurfacePattern::Transceiver,
                SurfacePatternName::Cell => SurfacePattern::Cell,
            },
            frequency_hz: file.channel.frequency_hz,
            evaluator: file.channel.evaluator.into(),
            absorption,
            spectrum,
            f_lo_hz: cap.f_lo_hz,
            f_hi_hz: cap.f_hi_hz,
            subbands: cap.subbands,
            p_over_no_db: cap.p_over_no_db,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parameter checks with field paths. Errors that depend on the
    /// absorption table's domain surface at evaluation time.
    pub fn validate(&self) -> Result<(), CliError> {
        RisGrid::new(self.rows, self.cols, self.pitch_x_m, self.pitch_y_m)
            .map_err(|e| CliError::validation("ris", e))?;
        ReflectionCoefficient::new(self.amplitude, self.phase_deg.to_radians())
            .map_err(|e| CliError::validation("ris.amplitude", e))?;
        self.link.geometry()?;
        for (path, db) in [
            ("antennas.tx_gain_db", self.tx_gain_db),
            ("antennas.rx_gain_db", self.rx_gain_db),
            ("antennas.cell_gain_db", self.cell_gain_db),
        ] {
            CosinePattern::from_gain_db(db).map_err(|e| CliError::validation(path, e))?;
        }
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(CliError::validation(
                "channel.frequency_hz",
                format!("{} must be positive", self.frequency_hz),
            ));
        }
        if !(self.f_lo_hz > 0.0 && self.f_lo_hz < self.f_hi_hz && self.f_hi_hz.is_finite()) {
            return Err(CliError::validation(
                "capacity.f_lo_hz",
                format!(
                    "band [{}, {}] Hz must satisfy 0 < f_lo < f_hi",
                    self.f_lo_hz, self.f_hi_hz
                ),
            ));
        }
        if self.subbands == 0 {
            return Err(CliError::validation("capacity.subbands", "must be >= 1"));
        }
        if !self.p_over_no_db.is_finite() {
            return Err(CliError::validation("capacity.p_over_no_db", "must be finite"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<RisGrid, CliError> {
        RisGrid::new(self.rows, self.cols, self.pitch_x_m, self.pitch_y_m).map_err(|e| CliError::validation("ris", e))
    }

    pub fn channel_config(&self) -> Result<ChannelConfig, CliError> {
        let reflection = ReflectionCoefficient::new(self.amplitude, self.phase_deg.to_radians())
            .map_err(|e| CliError::validation("ris.amplitude", e))?;
        let cfg = ChannelConfig::new(self.grid()?, self.frequency_hz, self.spectrum.clone())
            .map_err(|e| CliError::validation("channel.frequency_hz", e))?
            .with_transceiver_gains_db(self.tx_gain_db, self.rx_gain_db)
            .map_err(|e| CliError::validation("antennas", e))?
            .with_cell_gain_db(self.cell_gain_db)
            .map_err(|e| CliError::validation("antennas.cell_gain_db", e))?
            .with_reflection(Reflection::Uniform(reflection))
            .map_err(|e| CliError::validation("ris", e))?
            .with_transceivers_aimed(self.transceivers_aimed)
            .with_surface_pattern(self.surface_pattern);
        Ok(cfg)
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    /// Sets one parameter; `Param` values use CLI units.
    pub fn apply(&mut self, param: Param, value: f64) {
        match param {
            Param::ThetaDeg => {
                self.link.theta_tx_deg = value;
                self.link.theta_rx_deg = value;
            }
            Param::GainDb => {
                self.tx_gain_db = value;
                self.rx_gain_db = value;
            }
            Param::DM => {
                self.link.d1_m = value;
                self.link.d2_m = value;
            }
            Param::PitchM => {
                self.pitch_x_m = value;
                self.pitch_y_m = value;
            }
            Param::CellsPerSide => {
                self.rows = value as usize;
                self.cols = value as usize;
            }
            Param::POverNoDb => self.p_over_no_db = value,
            Param::FrequencyHz => self.frequency_hz = value,
            Param::Subbands => self.subbands = value as usize,
        }
    }

    pub fn with_absorption(mut self, choice: AbsorptionChoice) -> Result<Self, CliError> {
        self.spectrum =
            Arc::new(choice.load(self.f_lo_hz.min(self.frequency_hz), self.f_hi_hz.max(self.frequency_hz))?);
        self.absorption = choice;
        Ok(self)
    }
}

/// Validity domain of a swept parameter.
pub fn check_axis_value(name: AxisName, value: f64) -> Result<(), String> {
    let ok = match name {
        AxisName::ThetaDeg => (0.0..=90.0).contains(&value),
        // the cos^q family starts at 2 (3.0103 dB)
        AxisName::GainDb => value.is_finite() && 10f64.powf(value / 10.0) >= 2.0,
        AxisName::DM | AxisName::PitchM | AxisName::FrequencyHz => value > 0.0 && value.is_finite(),
        AxisName::POverNoDb => value.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{} value {value} outside its valid range", name.column()))
    }
}

pub fn parse_file(path: &Path) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ScenarioFile, CliError> {
    toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.to_string().trim_end())))
}
