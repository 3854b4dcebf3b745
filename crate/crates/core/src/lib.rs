//! Channel gain, path gain and wideband capacity of a D-band link relayed by
//! a reconfigurable intelligent surface (RIS).
//!
//! The surface is an `N × M` grid of unit cells in the `x–y` plane. The
//! channel coefficient can be evaluated by summing every cell
//! ([`channel::channel_gain_exact`]), by the factorized far-field form
//! ([`channel::channel_gain_far_field`]), or by the specular closed form
//! ([`channel::channel_gain_specular`]). [`capacity`] splits the band into
//! flat-fading sub-bands and sums their Shannon capacities.

pub mod antenna;
pub mod atmosphere;
pub mod capacity;
pub mod channel;
pub mod cli;
pub mod geometry;
pub mod numeric;
pub mod quadrature;
