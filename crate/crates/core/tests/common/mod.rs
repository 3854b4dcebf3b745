#![allow(dead_code)]

use std::sync::Arc;

use dband_ris::atmosphere::AbsorptionSpectrum;
use dband_ris::channel::{wavelength, ChannelConfig};
use dband_ris::geometry::RisGrid;

pub const F110: f64 = 110e9;

pub fn vacuum() -> Arc<AbsorptionSpectrum> {
    Arc::new(AbsorptionSpectrum::vacuum(110e9, 170e9).unwrap())
}

pub fn standard() -> Arc<AbsorptionSpectrum> {
    Arc::new(AbsorptionSpectrum::standard_dband())
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Square grid at `λ/10` of 110 GHz.
pub fn dband_cfg(side: usize, spectrum: Arc<AbsorptionSpectrum>) -> ChannelConfig {
    let grid = RisGrid::square(side, wavelength(F110) / 10.0).unwrap();
    ChannelConfig::new(grid, F110, spectrum).unwrap()
}
