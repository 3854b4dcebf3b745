//! Normalized `cos^q` power radiation patterns and their gains.
//!
//! Over the forward hemisphere the gain of a `cos^q` pattern is exactly
//! `2(q + 1)`; [`CosinePattern::gain`] uses that closed form and
//! [`gain_by_quadrature`] integrates the pattern numerically.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::quadrature::{self, QuadratureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AntennaError {
    #[error("pattern exponent {0} must be finite and >= 0")]
    BadExponent(f64),
    #[error("gain {0} (linear) must be finite and positive")]
    BadGain(f64),
    #[error("gain {linear} ({db:.3} dB) is below 2 (3.01 dB), the floor of the hemispheric cos^q family")]
    BelowHemisphericFloor { linear: f64, db: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Power gain, stored linear.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GainValue(f64);

impl GainValue {
    pub fn from_linear(linear: f64) -> Result<Self, AntennaError> {
        if linear > 0.0 && linear.is_finite() {
            Ok(Self(linear))
        } else {
            Err(AntennaError::BadGain(linear))
        }
    }

    pub fn from_db(db: f64) -> Result<Self, AntennaError> {
        Self::from_linear(10f64.powf(db / 10.0))
    }

    pub fn linear(&self) -> f64 {
        self.0
    }

    pub fn db(&self) -> f64 {
        10.0 * self.0.log10()
    }
}

/// `F(θ, φ) = cos^q θ` on `[0, π/2]`, zero behind the aperture plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosinePattern {
    exponent: f64,
}

impl CosinePattern {
    pub fn new(exponent: f64) -> Result<Self, AntennaError> {
        if exponent >= 0.0 && exponent.is_finite() {
            Ok(Self { exponent })
        } else {
            Err(AntennaError::BadExponent(exponent))
        }
    }

    /// The pattern whose hemispheric gain equals `gain`: `q = G/2 − 1`.
    pub fn from_gain(gain: GainValue) -> Result<Self, AntennaError> {
        let linear = gain.linear();
        if linear < 2.0 {
            return Err(AntennaError::BelowHemisphericFloor { linear, db: gain.db() });
        }
        Self::new(linear / 2.0 - 1.0)
    }

    pub fn from_gain_db(db: f64) -> Result<Self, AntennaError> {
        Self::from_gain(GainValue::from_db(db)?)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Pattern value; independent of `phi`.
    pub fn value(&self, theta: f64, _phi: f64) -> f64 {
        let theta = theta.abs();
        if theta > FRAC_PI_2 {
            0.0
        } else {
            theta.cos().powf(self.exponent)
        }
    }

    /// Hemispheric gain `4π / ∫∫ F sin θ dθ dφ = 2(q + 1)`.
    pub fn gain(&self) -> GainValue {
        GainValue(4.0 * PI / (TAU / (self.exponent + 1.0)))
    }
}

/// The gain of `pattern` from direct numerical integration of
/// `∫_0^{2π} ∫_0^{π/2} F(θ, φ) sin θ dθ dφ` to relative tolerance `rel_tol`.
pub fn gain_by_quadrature(pattern: &CosinePattern, rel_tol: f64) -> Result<GainValue, AntennaError> {
    const MAX_INTERVALS: usize = 4096;
    let inner_tol = rel_tol * 0.1;
    let inner = |phi: f64| -> Result<f64, QuadratureError> {
        quadrature::integrate(
            |theta| pattern.value(theta, phi) * theta.sin(),
            0.0,
            FRAC_PI_2,
            0.0,
            inner_tol,
            MAX_INTERVALS,
        )
        .map(|r| r.value)
    };
    // the outer integrand cannot return a Result, so stash the first failure
    let failure = std::cell::RefCell::new(None);
    let outer = quadrature::integrate(
        |phi| match inner(phi) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        TAU,
        0.0,
        inner_tol,
        MAX_INTERVALS,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    let solid = outer?.value;
    GainValue::from_linear(4.0 * PI / solid)
}
