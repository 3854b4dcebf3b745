//! Sub-band decomposition and wideband Shannon capacity.
//!
//! The band is split into `W` contiguous sub-bands, each treated as flat.
//! Wavelength and absorption are re-evaluated at every band centre; antenna
//! gains and pattern exponents stay fixed across the band.

use thiserror::Error;

use crate::channel::{evaluate, ChannelConfig, ChannelError, Evaluator};
use crate::geometry::LinkGeometry;
use crate::numeric::neumaier_sum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("band [{0}, {1}] Hz must satisfy 0 < f_lo < f_hi")]
    BadBand(f64, f64),
    #[error("sub-band count must be >= 1")]
    NoBands,
    #[error("sub-band {index}: width {width} Hz must be positive")]
    BadWidth { index: usize, width: f64 },
    #[error("sub-band {index} starts at {start} Hz, expected {expected} Hz (bands must be contiguous)")]
    NotContiguous { index: usize, start: f64, expected: f64 },
    #[error("total power {0} W must be positive and finite")]
    BadTotalPower(f64),
    #[error("band {index}: power {value} W must be >= 0")]
    NegativePower { index: usize, value: f64 },
    #[error("allocated power {allocated} W exceeds total {total} W")]
    OverBudget { allocated: f64, total: f64 },
    #[error("noise level {0} must be positive and finite")]
    BadNoise(f64),
    #[error("band {index}: SNR {value} must be >= 0")]
    NegativeSnr { index: usize, value: f64 },
    #[error("{what}: expected {expected} entries, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("band {index} at {frequency_hz} Hz: {source}")]
    Channel {
        index: usize,
        frequency_hz: f64,
        #[source]
        source: ChannelError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubBand {
    pub center_hz: f64,
    pub width_hz: f64,
}

impl SubBand {
    pub fn lower_edge(&self) -> f64 {
        self.center_hz - 0.5 * self.width_hz
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubBandPlan {
    bands: Vec<SubBand>,
    f_lo: f64,
    f_hi: f64,
}

impl SubBandPlan {
    /// `W` equal-width contiguous bands over `[f_lo, f_hi]`.
    pub fn uniform(f_lo: f64, f_hi: f64, count: usize) -> Result<Self, CapacityError> {
        if !(f_lo > 0.0 && f_lo < f_hi && f_hi.is_finite()) {
            return Err(CapacityError::BadBand(f_lo, f_hi));
        }
        if count == 0 {
            return Err(CapacityError::NoBands);
        }
        let span = f_hi - f_lo;
        let bands = (0..count)
            .map(|i| {
                let lo = f_lo + span * i as f64 / count as f64;
                let hi = f_lo + span * (i + 1) as f64 / count as f64;
                SubBand {
                    center_hz: 0.5 * (lo + hi),
                    width_hz: hi - lo,
                }
            })
            .collect();
        Ok(Self { bands, f_lo, f_hi })
    }

    /// Arbitrary contiguous bands given as `(width_hz)` from `f_lo` upward.
    pub fn from_widths(f_lo: f64, widths: &[f64]) -> Result<Self, CapacityError> {
        if widths.is_empty() {
            return Err(CapacityError::NoBands);
        }
        let mut bands = Vec::with_capacity(widths.len());
        let mut edge = f_lo;
        for (index, &width) in widths.iter().enumerate() {
            if !(width > 0.0 && width.is_finite()) {
                return Err(CapacityError::BadWidth { index, width });
            }
            bands.push(SubBand {
                center_hz: edge + 0.5 * width,
                width_hz: width,
            });
            edge += width;
        }
        if !(f_lo > 0.0 && edge.is_finite()) {
            return Err(CapacityError::BadBand(f_lo, edge));
        }
        Ok(Self {
            bands,
            f_lo,
            f_hi: edge,
        })
    }

    pub fn bands(&self) -> &[SubBand] {
        &self.bands
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.f_lo, self.f_hi)
    }

    pub fn total_width(&self) -> f64 {
        neumaier_sum(self.bands.iter().map(|b| b.width_hz))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    per_band_w: Vec<f64>,
    total_w: f64,
}

impl PowerAllocation {
    /// Checks `Σ P_i ≤ P` (up to a relative rounding slack of 1e-12) and `P_i ≥ 0`.
    pub fn new(per_band_w: Vec<f64>, total_w: f64) -> Result<Self, CapacityError> {
        if !(total_w > 0.0 && total_w.is_finite()) {
            return Err(CapacityError::BadTotalPower(total_w));
        }
        for (index, &value) in per_band_w.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(CapacityError::NegativePower { index, value });
            }
        }
        let allocated = neumaier_sum(per_band_w.iter().copied());
        if allocated > total_w * (1.0 + 1e-12) {
            return Err(CapacityError::OverBudget {
                allocated,
                total: total_w,
            });
        }
        Ok(Self { per_band_w, total_w })
    }

    pub fn per_band(&self) -> &[f64] {
        &self.per_band_w
    }

    pub fn total(&self) -> f64 {
        self.total_w
    }

    pub fn allocated(&self) -> f64 {
        neumaier_sum(self.per_band_w.iter().copied())
    }
}

/// `P_i = P / W` for every band.
pub fn equal_power_allocation(total_w: f64, plan: &SubBandPlan) -> Result<PowerAllocation, CapacityError> {
    let share = total_w / plan.len() as f64;
    PowerAllocation::new(vec![share; plan.len()], total_w)
}

/// Noise in the SNR denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    /// One noise level `N_o` for every band, whatever its width.
    PerBand(f64),
    /// Noise power spectral density; band `i` sees `N_o·Δf_i`.
    Density(f64),
}

impl NoiseSpec {
    pub fn per_band(noise: f64) -> Result<Self, CapacityError> {
        check_noise(noise)?;
        Ok(Self::PerBand(noise))
    }

    pub fn density(psd: f64) -> Result<Self, CapacityError> {
        check_noise(psd)?;
        Ok(Self::Density(psd))
    }

    fn level(&self, band: &SubBand) -> f64 {
        match *self {
            Self::PerBand(n) => n,
            Self::Density(psd) => psd * band.width_hz,
        }
    }
}

fn check_noise(noise: f64) -> Result<(), CapacityError> {
    if noise > 0.0 && noise.is_finite() {
        Ok(())
    } else {
        Err(CapacityError::BadNoise(noise))
    }
}

/// Total power and noise from a `P/N_o` ratio in dB: `N_o = 1`,
/// `P = 10^(dB/10)`.
pub fn budget_from_p_over_no_db(p_over_no_db: f64) -> Result<(f64, NoiseSpec), CapacityError> {
    let p = 10f64.powf(p_over_no_db / 10.0);
    if !(p > 0.0 && p.is_finite()) {
        return Err(CapacityError::BadTotalPower(p));
    }
    Ok((p, NoiseSpec::PerBand(1.0)))
}

/// `|h(f_i)|²` at every band centre.
pub fn power_gain_per_band(
    cfg: &ChannelConfig,
    link: &LinkGeometry,
    plan: &SubBandPlan,
    evaluator: Evaluator,
) -> Result<Vec<f64>, CapacityError> {
    plan.bands()
        .iter()
        .enumerate()
        .map(|(index, band)| {
            let wrap = |source| CapacityError::Channel {
                index,
                frequency_hz: band.center_hz,
                source,
            };
            let band_cfg = cfg.clone().with_frequency(band.center_hz).map_err(wrap)?;
            evaluate(&band_cfg, link, evaluator).map(|h| h.power()).map_err(wrap)
        })
        .collect()
}

/// `SNR_i = |h(f_i)|²·P_i / N_o`.
pub fn snr_per_band(
    cfg: &ChannelConfig,
    link: &LinkGeometry,
    plan: &SubBandPlan,
    alloc: &PowerAllocation,
    noise: NoiseSpec,
    evaluator: Evaluator,
) -> Result<Vec<f64>, CapacityError> {
    if alloc.per_band().len() != plan.len() {
        return Err(CapacityError::LengthMismatch {
            what: "power allocation",
            expected: plan.len(),
            got: alloc.per_band().len(),
        });
    }
    let gains = power_gain_per_band(cfg, link, plan, evaluator)?;
    Ok(snr_from_gains(&gains, plan, alloc, noise))
}

pub(crate) fn snr_from_gains(gains: &[f64], plan: &SubBandPlan, alloc: &PowerAllocation, noise: NoiseSpec) -> Vec<f64> {
    gains
        .iter()
        .zip(alloc.per_band())
        .zip(plan.bands())
        .map(|((g, p), band)| g * p / noise.level(band))
        .collect()
}

/// `C = Σ Δf_i·log2(1 + SNR_i)` in bit/s.
pub fn capacity(plan: &SubBandPlan, snrs: &[f64]) -> Result<f64, CapacityError> {
    if snrs.len() != plan.len() {
        return Err(CapacityError::LengthMismatch {
            what: "SNR list",
            expected: plan.len(),
            got: snrs.len(),
        });
    }
    for (index, &value) in snrs.iter().enumerate() {
        if value.is_nan() || value < 0.0 {
            return Err(CapacityError::NegativeSnr { index, value });
        }
    }
    Ok(neumaier_sum(
        plan.bands()
            .iter()
            .zip(snrs)
            .map(|(b, &snr)| b.width_hz * snr.ln_1p() / std::f64::consts::LN_2),
    ))
}

/// Everything needed to turn a channel into a capacity figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityInputs {
    pub f_lo_hz: f64,
    pub f_hi_hz: f64,
    pub subbands: usize,
    pub total_power_w: f64,
    pub noise: NoiseSpec,
    pub evaluator: Evaluator,
}

impl CapacityInputs {
    /// D-band, `W = 60`, equal split with `P/N_o` in dB, specular evaluator.
    pub fn dband(p_over_no_db: f64) -> Result<Self, CapacityError> {
        let (total_power_w, noise) = budget_from_p_over_no_db(p_over_no_db)?;
        Ok(Self {
            f_lo_hz: 110e9,
            f_hi_hz: 170e9,
            subbands: 60,
            total_power_w,
            noise,
            evaluator: Evaluator::Specular,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub plan: SubBandPlan,
    pub power_gains: Vec<f64>,
    pub snrs: Vec<f64>,
    pub capacity_bps: f64,
}

/// Equal power split over a uniform plan, then per-band SNR and capacity.
pub fn evaluate_capacity(
    cfg: &ChannelConfig,
    link: &LinkGeometry,
    inputs: &CapacityInputs,
) -> Result<CapacityReport, CapacityError> {
    let plan = SubBandPlan::uniform(inputs.f_lo_hz, inputs.f_hi_hz, inputs.subbands)?;
    let alloc = equal_power_allocation(inputs.total_power_w, &plan)?;
    let power_gains = power_gain_per_band(cfg, link, &plan, inputs.evaluator)?;
    let snrs = snr_from_gains(&power_gains, &plan, &alloc, inputs.noise);
    let capacity_bps = capacity(&plan, &snrs)?;
    Ok(CapacityReport {
        plan,
        power_gains,
        snrs,
        capacity_bps,
    })
}

/// Doubles the sub-band count from `start` until capacity changes by less
/// than `rel_tol`, up to `max_bands`. Returns `(W, capacity)` at the first
/// converged `W`, or the last one tried.
pub fn refine_subband_count(
    cfg: &ChannelConfig,
    link: &LinkGeometry,
    inputs: &CapacityInputs,
    start: usize,
    rel_tol: f64,
    max_bands: usize,
) -> Result<(usize, f64, bool), CapacityError> {
    let mut w = start.max(1);
    let mut current = evaluate_capacity(cfg, link, &CapacityInputs { subbands: w, ..*inputs })?.capacity_bps;
    while w * 2 <= max_bands {
        let next = evaluate_capacity(
            cfg,
            link,
            &CapacityInputs {
                subbands: w * 2,
                ..*inputs
            },
        )?
        .capacity_bps;
        let change = (next - current).abs() / current.abs().max(f64::MIN_POSITIVE);
        if change < rel_tol {
            return Ok((w, current, true));
        }
        w *= 2;
        current = next;
    }
    Ok((w, current, false))
}
