//! Unit conversions and angle/delay primitives shared by every module.
//!
//! Power is handled linearly (mW) inside profiles and spectra; dB only
//! appears at interfaces. Delays are absolute propagation delays in ns.

use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};

/// Exact SI speed of light.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Powers at or below this level are treated as zero when formatted in dB.
/// Keeps file formats free of `-inf`, which JSON cannot represent.
pub const MIN_POWER_DBM: f64 = -350.0;

/// dB ratio to linear ratio: `10^(x/10)`.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear ratio to dB: `10*log10(x)`. Zero maps to `-inf`.
#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// dBm to milliwatts.
#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    if dbm <= MIN_POWER_DBM {
        0.0
    } else {
        db_to_linear(dbm)
    }
}

/// Milliwatts to dBm, floored at [`MIN_POWER_DBM`].
#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    if mw <= 0.0 {
        MIN_POWER_DBM
    } else {
        linear_to_db(mw).max(MIN_POWER_DBM)
    }
}

/// Azimuth angle in degrees, wrapped to `[0, 360)`. 0 deg is geographic North.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Azimuth(f64);

impl Azimuth {
    /// Wrap an angle into `[0, 360)`, preserving its equivalence class mod 360.
    pub fn wrap(degrees: f64) -> Result<Self> {
        if !degrees.is_finite() {
            return Err(ChanError::NonFiniteAngle(degrees));
        }
        let mut wrapped = degrees.rem_euclid(360.0);
        // rem_euclid of a tiny negative value can round up to exactly 360.0
        if wrapped >= 360.0 {
            wrapped = 0.0;
        }
        Ok(Self(wrapped))
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    /// Index of this azimuth on a grid with `step_deg` spacing, if it lies on
    /// the grid (within 1e-6 deg).
    pub fn grid_index(self, step_deg: f64) -> Option<usize> {
        if step_deg <= 0.0 {
            return None;
        }
        let steps = (360.0 / step_deg).round() as usize;
        let idx = (self.0 / step_deg).round();
        if (self.0 - idx * step_deg).abs() < 1e-6 {
            Some(idx as usize % steps)
        } else {
            None
        }
    }

    /// Smallest absolute angular distance to `other`, in `[0, 180]` degrees.
    pub fn separation(self, other: Azimuth) -> f64 {
        let d = (self.0 - other.0).rem_euclid(360.0);
        d.min(360.0 - d)
    }
}

/// Free-space propagation delay over `distance_m`, in ns.
pub fn free_space_delay_ns(distance_m: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(ChanError::NonPositiveDistance(distance_m));
    }
    Ok(distance_m / SPEED_OF_LIGHT_M_PER_S * 1e9)
}
