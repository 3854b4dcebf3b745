//! Channel gain of the RIS-relayed link.
//!
//! Three evaluators share one [`ChannelConfig`]:
//!
//! * [`channel_gain_exact`] sums the contribution of every unit cell with its
//!   own distances, angles, phase and absorption.
//! * [`channel_gain_far_field`] is the factorized far-field form: a common
//!   amplitude times the two array-factor ratios `Φ/X` and `Ψ/Ω`.
//! * [`channel_gain_specular`] drops the array factors, which are exactly 1
//!   under specular reflection.
//!
//! Path gain is reported as `20·log10|h|`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::antenna::{AntennaError, CosinePattern, GainValue};
use crate::atmosphere::{AbsorptionSpectrum, AtmosphereError};
use crate::geometry::{CellIndex, GeometryError, LinkGeometry, NodePosition, RisGrid, SpecularViolation};
use crate::numeric::{sinc_ratio, ComplexSum};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Absolute tolerance on the specular relations.
pub const SPECULAR_TOLERANCE: f64 = 1e-9;

pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Antenna(#[from] AntennaError),
    #[error(transparent)]
    Atmosphere(#[from] AtmosphereError),
    #[error("frequency {0} Hz must be positive and finite")]
    BadFrequency(f64),
    #[error("reflection amplitude {0} outside [0, 1]")]
    BadAmplitude(f64),
    #[error("reflection phase {0} is not finite")]
    BadPhase(f64),
    #[error("per-cell reflection map has {got} entries, grid has {expected} cells")]
    ReflectionSize { expected: usize, got: usize },
    #[error("the {0} evaluator requires a uniform reflection coefficient")]
    NonUniformReflection(&'static str),
    #[error("geometry is not specular: violates {0}")]
    NotSpecular(SpecularViolation),
    #[error("path gain undefined for |h| = 0")]
    ZeroGain,
}

/// `Λ = A·exp(jφ)` of one unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionCoefficient {
    amplitude: f64,
    phase: f64,
}

impl ReflectionCoefficient {
    pub fn new(amplitude: f64, phase: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(ChannelError::BadAmplitude(amplitude));
        }
        if !phase.is_finite() {
            return Err(ChannelError::BadPhase(phase));
        }
        Ok(Self { amplitude, phase })
    }

    /// Lossless, zero phase.
    pub fn unity() -> Self {
        Self {
            amplitude: 1.0,
            phase: 0.0,
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reflection {
    Uniform(ReflectionCoefficient),
    /// Row-major in the order of [`RisGrid::indices`].
    PerCell(Vec<ReflectionCoefficient>),
}

impl Reflection {
    /// Builds a per-cell map by evaluating `f` at every cell.
    pub fn per_cell<F>(grid: &RisGrid, mut f: F) -> Self
    where
        F: FnMut(CellIndex) -> ReflectionCoefficient,
    {
        Self::PerCell(grid.indices().map(&mut f).collect())
    }

    pub fn uniform(&self) -> Option<ReflectionCoefficient> {
        match self {
            Self::Uniform(r) => Some(*r),
            Self::PerCell(_) => None,
        }
    }
}

/// An antenna described by its gain and the `cos^q` pattern with that gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antenna {
    gain: GainValue,
    pattern: CosinePattern,
}

impl Antenna {
    pub fn from_gain(gain: GainValue) -> Result<Self, AntennaError> {
        Ok(Self {
            gain,
            pattern: CosinePattern::from_gain(gain)?,
        })
    }

    pub fn from_gain_db(db: f64) -> Result<Self, AntennaError> {
        Self::from_gain(GainValue::from_db(db)?)
    }

    pub fn gain(&self) -> GainValue {
        self.gain
    }

    pub fn pattern(&self) -> CosinePattern {
        self.pattern
    }
}

/// Which pattern is evaluated at the elevation angles seen from the surface
/// (`θ_TX`, `θ_RX` in the reduced forms; the per-cell angles in the exact sum).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurfacePattern {
    /// TX pattern on the incident side, RX pattern on the reflected side.
    #[default]
    Transceiver,
    /// The unit-cell pattern on both sides.
    Cell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub grid: RisGrid,
    pub frequency_hz: f64,
    pub tx: Antenna,
    pub rx: Antenna,
    pub cell: Antenna,
    pub reflection: Reflection,
    pub spectrum: Arc<AbsorptionSpectrum>,
    /// Transceivers point at the surface centre and their patterns are taken
    /// as 1 toward every cell. When false the exact sum evaluates them.
    pub transceivers_aimed: bool,
    pub surface_pattern: SurfacePattern,
}

impl ChannelConfig {
    /// Defaults: `G_t = G_r = 30 dB`, `G = 10 dB`, `Λ = 1`, aimed
    /// transceivers, transceiver patterns at the surface angles.
    pub fn new(grid: RisGrid, frequency_hz: f64, spectrum: Arc<AbsorptionSpectrum>) -> Result<Self, ChannelError> {
        let cfg = Self {
            grid,
            frequency_hz,
            tx: Antenna::from_gain_db(30.0)?,
            rx: Antenna::from_gain_db(30.0)?,
            cell: Antenna::from_gain_db(10.0)?,
            reflection: Reflection::Uniform(ReflectionCoefficient::unity()),
            spectrum,
            transceivers_aimed: true,
            surface_pattern: SurfacePattern::Transceiver,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_transceiver_gains_db(mut self, tx_db: f64, rx_db: f64) -> Result<Self, ChannelError> {
        self.tx = Antenna::from_gain_db(tx_db)?;
        self.rx = Antenna::from_gain_db(rx_db)?;
        Ok(self)
    }

    pub fn with_cell_gain_db(mut self, db: f64) -> Result<Self, ChannelError> {
        self.cell = Antenna::from_gain_db(db)?;
        Ok(self)
    }

    pub fn with_reflection(mut self, reflection: Reflection) -> Result<Self, ChannelError> {
        self.reflection = reflection;
        self.validate()?;
        Ok(self)
    }

    pub fn with_frequency(mut self, frequency_hz: f64) -> Result<Self, ChannelError> {
        self.frequency_hz = frequency_hz;
        self.validate()?;
        Ok(self)
    }

    pub fn with_surface_pattern(mut self, surface_pattern: SurfacePattern) -> Self {
        self.surface_pattern = surface_pattern;
        self
    }

    pub fn with_transceivers_aimed(mut self, aimed: bool) -> Self {
        self.transceivers_aimed = aimed;
        self
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(ChannelError::BadFrequency(self.frequency_hz));
        }
        if let Reflection::PerCell(cells) = &self.reflection {
            if cells.len() != self.grid.cell_count() {
                return Err(ChannelError::ReflectionSize {
                    expected: self.grid.cell_count(),
                    got: cells.len(),
                });
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    /// Exchanges the roles of the transmit and receive antennas.
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.tx, &mut out.rx);
        out
    }

    fn surface_patterns(&self) -> (CosinePattern, CosinePattern) {
        match self.surface_pattern {
            SurfacePattern::Transceiver => (self.tx.pattern(), self.rx.pattern()),
            SurfacePattern::Cell => (self.cell.pattern(), self.cell.pattern()),
        }
    }

    fn gain_product(&self) -> f64 {
        self.tx.gain().linear() * self.rx.gain().linear() * self.cell.gain().linear()
    }

    /// `sqrt(G_t G_r G d_x d_y / 64π³)·λ`, the prefactor of the per-cell sum.
    pub fn exact_prefactor(&self) -> f64 {
        (self.gain_product() * self.grid.pitch_x() * self.grid.pitch_y() / (64.0 * PI.powi(3))).sqrt()
            * self.wavelength()
    }

    /// `B(f) = G_t G_r G M² N² d_x d_y λ² A² τ(f, d1 + d2)`.
    pub fn b_factor(&self, link: &LinkGeometry) -> Result<f64, ChannelError> {
        let amplitude = self
            .reflection
            .uniform()
            .ok_or(ChannelError::NonUniformReflection("far-field"))?
            .amplitude();
        let tau = self.spectrum.transmittance(self.frequency_hz, link.d1 + link.d2)?;
        let m = self.grid.cols() as f64;
        let n = self.grid.rows() as f64;
        let lambda = self.wavelength();
        Ok(self.gain_product()
            * m
            * m
            * n
            * n
            * self.grid.pitch_x()
            * self.grid.pitch_y()
            * lambda
            * lambda
            * amplitude
            * amplitude
            * tau)
    }
}

/// A channel coefficient. The exact evaluator also carries the complex value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGain {
    magnitude: f64,
    value: Option<Complex64>,
}

impl ComplexGain {
    pub fn from_magnitude(magnitude: f64) -> Self {
        Self { magnitude, value: None }
    }

    pub fn from_complex(value: Complex64) -> Self {
        Self {
            magnitude: value.norm(),
            value: Some(value),
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn value(&self) -> Option<Complex64> {
        self.value
    }

    /// `|h|²`.
    pub fn power(&self) -> f64 {
        self.magnitude * self.magnitude
    }

    pub fn path_gain_db(&self) -> Result<f64, ChannelError> {
        path_gain_db(self)
    }
}

/// `20·log10|h|`.
pub fn path_gain_db(h: &ComplexGain) -> Result<f64, ChannelError> {
    if h.magnitude() > 0.0 {
        Ok(20.0 * h.magnitude().log10())
    } else {
        Err(ChannelError::ZeroGain)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evaluator {
    Exact,
    FarField,
    Specular,
}

impl Evaluator {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::FarField => "far_field",
            Self::Specular => "specular",
        }
    }
}

/// Dispatches to one of the three evaluators. The exact sum places the
/// transceivers at the positions reconstructed from `link`.
pub fn evaluate(cfg: &ChannelConfig, link: &LinkGeometry, evaluator: Evaluator) -> Result<ComplexGain, ChannelError> {
    match evaluator {
        Evaluator::Exact => channel_gain_exact(cfg, &link.tx_position(), &link.rx_position()),
        Evaluator::FarField => channel_gain_far_field(cfg, link),
        Evaluator::Specular => channel_gain_specular(cfg, link),
    }
}

struct CellContext<'a> {
    cfg: &'a ChannelConfig,
    tx: NodePosition,
    rx: NodePosition,
    tx_norm: f64,
    rx_norm: f64,
    kappa: f64,
    wavenumber: f64,
    surface_tx: CosinePattern,
    surface_rx: CosinePattern,
}

impl CellContext<'_> {
    /// Per-cell summand `sqrt(F_c)·Λ·exp(−j2π(d_tx + d_rx)/λ)·sqrt(τ_tx τ_rx) / (d_tx d_rx)`.
    fn term(&self, idx: CellIndex, lambda: Complex64) -> Complex64 {
        let c = self.cfg.grid.cell_center_unchecked(idx);
        let d_tx = self.tx.distance_to(&c);
        let d_rx = self.rx.distance_to(&c);

        // elevation of each transceiver seen from the cell centre
        let theta_t = (self.tx.z / d_tx).clamp(-1.0, 1.0).acos();
        let theta_r = (self.rx.z / d_rx).clamp(-1.0, 1.0).acos();
        let mut f_c = self.surface_tx.value(theta_t, 0.0) * self.surface_rx.value(theta_r, 0.0);
        if !self.cfg.transceivers_aimed {
            f_c *= self
                .cfg
                .tx
                .pattern()
                .value(off_boresight(&self.tx, self.tx_norm, &c, d_tx), 0.0)
                * self
                    .cfg
                    .rx
                    .pattern()
                    .value(off_boresight(&self.rx, self.rx_norm, &c, d_rx), 0.0);
        }

        let tau = ((-self.kappa * d_tx).exp() * (-self.kappa * d_rx).exp()).sqrt();
        let phase = Complex64::from_polar(1.0, -self.wavenumber * (d_tx + d_rx));
        lambda * phase * (f_c.sqrt() * tau / (d_tx * d_rx))
    }

    fn reflection(&self, linear: usize) -> Complex64 {
        match &self.cfg.reflection {
            Reflection::Uniform(r) => r.to_complex(),
            Reflection::PerCell(cells) => cells[linear].to_complex(),
        }
    }
}

/// Angle between a transceiver's boresight (toward the surface centre) and
/// the direction from the transceiver to cell centre `c`.
fn off_boresight(node: &NodePosition, node_norm: f64, c: &NodePosition, d: f64) -> f64 {
    let dot = (c.x - node.x) * (-node.x) + (c.y - node.y) * (-node.y) + (c.z - node.z) * (-node.z);
    (dot / (d * node_norm)).clamp(-1.0, 1.0).acos()
}

fn exact_context<'a>(
    cfg: &'a ChannelConfig,
    tx: &NodePosition,
    rx: &NodePosition,
) -> Result<CellContext<'a>, ChannelError> {
    cfg.validate()?;
    tx.check_above_surface()?;
    rx.check_above_surface()?;
    let kappa = cfg.spectrum.at(cfg.frequency_hz)?.kappa_per_m;
    let (surface_tx, surface_rx) = cfg.surface_patterns();
    Ok(CellContext {
        cfg,
        tx: *tx,
        rx: *rx,
        tx_norm: tx.norm(),
        rx_norm: rx.norm(),
        kappa,
        wavenumber: TAU / cfg.wavelength(),
        surface_tx,
        surface_rx,
    })
}

/// Per-row compensated partial sums, reduced in row order. The partition is
/// fixed, so the result does not depend on the thread count.
fn row_sums<F>(grid: &RisGrid, f: F) -> Complex64
where
    F: Fn(CellIndex, usize) -> Complex64 + Sync,
{
    let (nlo, nhi) = grid.row_range();
    let (mlo, mhi) = grid.col_range();
    let cols = grid.cols();
    let rows: Vec<Complex64> = (nlo..=nhi)
        .into_par_iter()
        .map(|n| {
            let row_offset = (n - nlo) as usize * cols;
            (mlo..=mhi)
                .map(|m| f(CellIndex { n, m }, row_offset + (m - mlo) as usize))
                .collect::<ComplexSum>()
                .value()
        })
        .collect();
    rows.into_iter().collect::<ComplexSum>().value()
}

/// Full per-cell channel sum for transceivers at `tx` and `rx`.
pub fn channel_gain_exact(
    cfg: &ChannelConfig,
    tx: &NodePosition,
    rx: &NodePosition,
) -> Result<ComplexGain, ChannelError> {
    let ctx = exact_context(cfg, tx, rx)?;
    let sum = row_sums(&cfg.grid, |idx, linear| ctx.term(idx, ctx.reflection(linear)));
    Ok(ComplexGain::from_complex(sum * cfg.exact_prefactor()))
}

/// The exact sum with every phase term dropped: `prefactor·Σ|term|`, an
/// upper bound on `|channel_gain_exact|`.
pub fn channel_gain_incoherent_bound(
    cfg: &ChannelConfig,
    tx: &NodePosition,
    rx: &NodePosition,
) -> Result<f64, ChannelError> {
    let ctx = exact_context(cfg, tx, rx)?;
    let sum = row_sums(&cfg.grid, |idx, linear| {
        Complex64::new(ctx.term(idx, ctx.reflection(linear)).norm(), 0.0)
    });
    Ok(sum.re * cfg.exact_prefactor())
}

/// `sqrt(B·F(θ_TX)·F(θ_RX) / (64π³ d1² d2²))`, shared by both reduced forms.
fn specular_magnitude(cfg: &ChannelConfig, link: &LinkGeometry) -> Result<f64, ChannelError> {
    cfg.validate()?;
    let b = cfg.b_factor(link)?;
    let (surface_tx, surface_rx) = cfg.surface_patterns();
    let f_tx = surface_tx.value(link.theta_tx, link.phi_tx);
    let f_rx = surface_rx.value(link.theta_rx, link.phi_rx);
    // square roots taken per factor: F² products underflow at wide angles
    Ok(b.sqrt() * f_tx.sqrt() * f_rx.sqrt() / ((64.0 * PI.powi(3)).sqrt() * link.d1 * link.d2))
}

/// Arguments `(π/λ)(sin θ_TX cos φ_TX + sin θ_RX cos φ_RX)·d_x` and its `y`
/// counterpart; the array-factor ratios are `sinc(M·a)/sinc(a)` and
/// `sinc(N·b)/sinc(b)`.
pub fn array_factor_arguments(cfg: &ChannelConfig, link: &LinkGeometry) -> (f64, f64) {
    let (sx, sy) = link.direction_sums();
    let k = PI / cfg.wavelength();
    (k * sx * cfg.grid.pitch_x(), k * sy * cfg.grid.pitch_y())
}

/// Factorized far-field gain `sqrt(B F F / 64π³d1²d2²)·|Φ/X|·|Ψ/Ω|`.
/// `Ψ` here is the same quantity written `Y` in the `y`-direction ratio.
pub fn channel_gain_far_field(cfg: &ChannelConfig, link: &LinkGeometry) -> Result<ComplexGain, ChannelError> {
    let base = specular_magnitude(cfg, link)?;
    let (ax, ay) = array_factor_arguments(cfg, link);
    let phi_over_x = sinc_ratio(cfg.grid.cols(), ax);
    let psi_over_omega = sinc_ratio(cfg.grid.rows(), ay);
    Ok(ComplexGain::from_magnitude(base * (phi_over_x * psi_over_omega).abs()))
}

/// Closed form for a surface acting as a specular reflector.
pub fn channel_gain_specular(cfg: &ChannelConfig, link: &LinkGeometry) -> Result<ComplexGain, ChannelError> {
    if let Some(v) = link.specular_violation(SPECULAR_TOLERANCE) {
        return Err(ChannelError::NotSpecular(v));
    }
    Ok(ComplexGain::from_magnitude(specular_magnitude(cfg, link)?))
}

/// `Ξ = |h|²` of the specular closed form.
pub fn specular_power_gain(cfg: &ChannelConfig, link: &LinkGeometry) -> Result<f64, ChannelError> {
    Ok(channel_gain_specular(cfg, link)?.power())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum() -> Arc<AbsorptionSpectrum> {
        Arc::new(AbsorptionSpectrum::vacuum(100e9, 200e9).unwrap())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn cfg(side: usize, pitch: f64, f: f64) -> ChannelConfig {
        ChannelConfig::new(RisGrid::square(side, pitch).unwrap(), f, vacuum()).unwrap()
    }

    #[test]
    fn single_lit_cell_reduces_to_one_term() {
        let c = cfg(2, 0.001, 140e9)
            .with_transceiver_gains_db(25.0, 25.0)
            .unwrap()
            .with_reflection(Reflection::per_cell(&RisGrid::square(2, 0.001).unwrap(), |idx| {
                if idx == CellIndex::new(1, 1) {
                    ReflectionCoefficient::unity()
                } else {
                    ReflectionCoefficient::new(0.0, 0.0).unwrap()
                }
            }))
            .unwrap();
        let tx = NodePosition::new(0.0, 0.0, 1.0);
        let rx = NodePosition::new(0.0, 0.0, 2.0);
        let h = channel_gain_exact(&c, &tx, &rx).unwrap();

        let centre = NodePosition::new(0.0005, 0.0005, 0.0);
        let (d_tx, d_rx) = (tx.distance_to(&centre), rx.distance_to(&centre));
        let f_t = c.tx.pattern().value((1.0 / d_tx).acos(), 0.0);
        let f_r = c.rx.pattern().value((2.0 / d_rx).acos(), 0.0);
        let expected = c.exact_prefactor() * (f_t * f_r).sqrt() / (d_tx * d_rx);
        assert!(rel(h.magnitude(), expected) < 1e-14);
    }

    #[test]
    fn dark_surface_has_zero_gain() {
        let c = cfg(4, 0.001, 140e9)
            .with_reflection(Reflection::Uniform(ReflectionCoefficient::new(0.0, 0.3).unwrap()))
            .unwrap();
        let link = LinkGeometry::specular(2.0, 0.1, 0.0).unwrap();
        let h = evaluate(&c, &link, Evaluator::Exact).unwrap();
        assert_eq!(h.magnitude(), 0.0);
        assert_eq!(channel_gain_specular(&c, &link).unwrap().magnitude(), 0.0);
        assert_eq!(h.path_gain_db(), Err(ChannelError::ZeroGain));
    }

    #[test]
    fn specular_boresight_closed_form() {
        let (gt, gr, g) = (25.0, 28.0, 10.0);
        let c = cfg(16, 0.0005, 120e9).with_transceiver_gains_db(gt, gr).unwrap();
        let d = 3.0;
        let h = channel_gain_specular(&c, &LinkGeometry::specular(d, 0.0, 0.0).unwrap()).unwrap();
        let lin = |db: f64| 10f64.powf(db / 10.0);
        let expected =
            (lin(gt) * lin(gr) * lin(g) / (64.0 * PI.powi(3))).sqrt() * 256.0 * 0.0005 * c.wavelength() / (d * d);
        assert!(rel(h.magnitude(), expected) < 1e-14);
    }

    #[test]
    fn doubling_distance_divides_power_by_sixteen() {
        let c = cfg(16, 0.0005, 120e9);
        let p1 = specular_power_gain(&c, &LinkGeometry::specular(1.0, 0.01, 0.4).unwrap()).unwrap();
        let p2 = specular_power_gain(&c, &LinkGeometry::specular(2.0, 0.01, 0.4).unwrap()).unwrap();
        assert!(rel(p1 / p2, 16.0) < 1e-13);
    }

    #[test]
    fn specular_rejects_non_specular_geometry() {
        let c = cfg(4, 0.001, 140e9);
        let link = LinkGeometry::new(1.0, 1.0, 0.1, 0.0, 0.2, PI).unwrap();
        let err = channel_gain_specular(&c, &link).unwrap_err();
        assert_eq!(err, ChannelError::NotSpecular(SpecularViolation::Elevation));
        assert!(err.to_string().contains("theta_rx = theta_tx"));
    }

    #[test]
    fn reduced_forms_need_uniform_reflection() {
        let grid = RisGrid::square(4, 0.001).unwrap();
        let c = cfg(4, 0.001, 140e9)
            .with_reflection(Reflection::per_cell(&grid, |_| ReflectionCoefficient::unity()))
            .unwrap();
        let link = LinkGeometry::specular(1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            channel_gain_far_field(&c, &link),
            Err(ChannelError::NonUniformReflection(_))
        ));
        assert!(channel_gain_exact(&c, &link.tx_position(), &link.rx_position()).is_ok());
    }

    #[test]
    fn per_cell_map_size_is_checked() {
        let err = cfg(4, 0.001, 140e9)
            .with_reflection(Reflection::PerCell(vec![ReflectionCoefficient::unity(); 3]))
            .unwrap_err();
        assert_eq!(err, ChannelError::ReflectionSize { expected: 16, got: 3 });
    }

    #[test]
    fn reflection_bounds() {
        assert!(ReflectionCoefficient::new(1.1, 0.0).is_err());
        assert!(ReflectionCoefficient::new(-0.1, 0.0).is_err());
        assert!(ReflectionCoefficient::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn path_gain_examples() {
        assert_eq!(path_gain_db(&ComplexGain::from_magnitude(1.0)).unwrap(), 0.0);
        assert!((path_gain_db(&ComplexGain::from_magnitude(0.1)).unwrap() + 20.0).abs() < 1e-12);
        let h = ComplexGain::from_magnitude(10f64.powf(-35.86 / 20.0));
        assert!((path_gain_db(&h).unwrap() + 35.86).abs() < 1e-12);
    }

    #[test]
    fn far_field_equals_specular_at_boresight_any_azimuth() {
        let c = cfg(20, 0.0004, 150e9);
        let link = LinkGeometry::new(2.0, 3.0, 0.0, 0.3, 0.0, 2.0).unwrap();
        let ff = channel_gain_far_field(&c, &link).unwrap().magnitude();
        let sp = specular_magnitude(&c, &link).unwrap();
        assert_eq!(ff, sp);
    }

    #[test]
    fn out_of_band_frequency_is_rejected() {
        let c = ChannelConfig::new(
            RisGrid::square(4, 0.001).unwrap(),
            100e9,
            Arc::new(AbsorptionSpectrum::standard_dband()),
        )
        .unwrap();
        let link = LinkGeometry::specular(1.0, 0.0, 0.0).unwrap();
        for e in [Evaluator::Exact, Evaluator::FarField, Evaluator::Specular] {
            assert!(matches!(
                evaluate(&c, &link, e),
                Err(ChannelError::Atmosphere(AtmosphereError::OutOfDomain { .. }))
            ));
        }
    }

    #[test]
    fn unaimed_transceivers_only_lower_the_gain() {
        let c = cfg(16, 0.0005, 120e9).with_transceiver_gains_db(37.0, 37.0).unwrap();
        let link = LinkGeometry::specular(1.0, 0.05, 0.0).unwrap();
        let aimed = evaluate(&c, &link, Evaluator::Exact).unwrap().magnitude();
        let raw = evaluate(&c.clone().with_transceivers_aimed(false), &link, Evaluator::Exact)
            .unwrap()
            .magnitude();
        assert!(raw <= aimed);
        assert!(rel(raw, aimed) < 0.05);
    }

    #[test]
    fn exact_is_bounded_by_incoherent_sum() {
        let c = cfg(16, 0.0005, 120e9);
        let link = LinkGeometry::new(0.2, 0.3, 0.2, 0.0, 0.5, 0.7).unwrap();
        let (tx, rx) = (link.tx_position(), link.rx_position());
        let h = channel_gain_exact(&c, &tx, &rx).unwrap().magnitude();
        let bound = channel_gain_incoherent_bound(&c, &tx, &rx).unwrap();
        assert!(h <= bound * (1.0 + 1e-12));
        assert!(h < 0.9 * bound);
    }
}
