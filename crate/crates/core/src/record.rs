//! One directional capture: pointing, polarization, PDP, and system state.

use serde::{Deserialize, Serialize};

use crate::band::Polarization;
use crate::pdp::PowerDelayProfile;
use crate::units::Azimuth;

/// One directional capture at a T-R location.
///
/// PDP powers are calibrated (antenna-port dBm equivalents on a linear mW
/// scale) and delays are absolute propagation delays; `system_gain_db`
/// records the correction that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub location_id: String,
    pub polarization: Polarization,
    pub wall_time_s: f64,
    pub tx_azimuth: Azimuth,
    pub rx_azimuth: Azimuth,
    pub tx_tilt_hpbw: i8,
    pub rx_tilt_hpbw: i8,
    pub pdp: PowerDelayProfile,
    pub system_gain_db: f64,
    #[serde(default)]
    pub is_reference_recapture: bool,
}

impl MeasurementRecord {
    /// Key identifying the pointing cell: (AOD index, TX tilt, AOA index,
    /// RX tilt) on the band's azimuth grid. None when an azimuth is off-grid.
    pub fn pointing_key(&self, hpbw_deg: f64) -> Option<(usize, i8, usize, i8)> {
        let aod = self.tx_azimuth.grid_index(hpbw_deg)?;
        let aoa = self.rx_azimuth.grid_index(hpbw_deg)?;
        Some((aod, self.tx_tilt_hpbw, aoa, self.rx_tilt_hpbw))
    }
}
