//! Power and time calibration against the 4 m free-space reference capture.
//!
//! Calibration captures a single LOS path at 4 m separation (beyond five far
//! fields of the horns, clear of reflections). The power phase ties raw
//! digitizer readings back to antenna-port power via the known free-space
//! loss; the time phase circularly shifts the PDP so the LOS peak sits at the
//! 4 m free-space delay.

use crate::error::{ChanError, Result};
use crate::pathloss::fspl_1m;
use crate::pdp::PowerDelayProfile;
use crate::units::{free_space_delay_ns, linear_to_db};

/// Free-space reference separation used for calibration, in meters.
pub const CALIBRATION_DISTANCE_M: f64 = 4.0;

/// Recovered path loss may deviate from free space by at most this much
/// before the RF chain is flagged as nonlinear.
pub const NONLINEARITY_LIMIT_DB: f64 = 1.0;

/// A secondary peak within this window of the main peak marks reflection
/// contamination.
pub const PEAK_DOMINANCE_WINDOW_DB: f64 = 10.0;

/// Result of the power-calibration phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCalibration {
    /// Correction added to raw dBm readings to obtain antenna-port power.
    pub system_gain_db: f64,
    /// Path loss recovered with the nominal correction applied.
    pub recovered_pl_db: f64,
    /// True when the recovered loss deviates from free space by more than
    /// [`NONLINEARITY_LIMIT_DB`].
    pub nonlinear: bool,
}

/// Derive the system gain correction from a 4 m free-space capture.
///
/// `nominal_system_gain_db` is the correction currently configured in the
/// receiver; the recovered path loss is computed with it so a drifted or
/// compressed chain shows up as a nonlinearity flag.
pub fn power_calibrate(
    pdp: &PowerDelayProfile,
    tx_power_dbm: f64,
    antenna_gains_dbi: f64,
    nominal_system_gain_db: f64,
    carrier_ghz: f64,
) -> Result<PowerCalibration> {
    let (peak_bin, peak_mw) = pdp.peak();
    if peak_mw <= 0.0 {
        return Err(ChanError::NoPeak);
    }
    ensure_single_peak(pdp, peak_bin, peak_mw)?;

    let expected_pl_db = free_space_pl_at_4m(carrier_ghz)?;
    let expected_rx_dbm = tx_power_dbm + antenna_gains_dbi - expected_pl_db;
    let raw_peak_dbm = linear_to_db(peak_mw);
    let system_gain_db = expected_rx_dbm - raw_peak_dbm;
    let recovered_pl_db =
        tx_power_dbm + antenna_gains_dbi - (raw_peak_dbm + nominal_system_gain_db);
    Ok(PowerCalibration {
        system_gain_db,
        recovered_pl_db,
        nonlinear: (recovered_pl_db - expected_pl_db).abs() > NONLINEARITY_LIMIT_DB,
    })
}

/// Free-space path loss at the 4 m calibration distance.
pub fn free_space_pl_at_4m(carrier_ghz: f64) -> Result<f64> {
    Ok(fspl_1m(carrier_ghz)? + 20.0 * CALIBRATION_DISTANCE_M.log10())
}

/// Circularly shift the PDP so its peak lands on the expected delay bin.
///
/// Returns the shift in bins (positive toward later delays) and the shifted
/// profile. The peak must clear the noise floor by 5 dB.
pub fn time_calibrate(
    pdp: &PowerDelayProfile,
    expected_delay_ns: f64,
) -> Result<(i64, PowerDelayProfile)> {
    let (peak_bin, peak_mw) = pdp.peak();
    let peak_dbm = linear_to_db(peak_mw);
    if peak_mw <= 0.0 || peak_dbm < pdp.noise_floor_dbm() + 5.0 {
        return Err(ChanError::NoPeak);
    }
    let target_bin =
        ((expected_delay_ns - pdp.start_delay_ns()) / pdp.bin_width_ns()).round() as i64;
    let n = pdp.len() as i64;
    let target_bin = target_bin.rem_euclid(n);
    let shift = target_bin - peak_bin as i64;
    Ok((shift, pdp.circular_shift_bins(shift)))
}

/// Expected LOS delay of the calibration capture (4 m over free space).
pub fn calibration_delay_ns() -> f64 {
    free_space_delay_ns(CALIBRATION_DISTANCE_M).expect("positive distance")
}

fn ensure_single_peak(pdp: &PowerDelayProfile, peak_bin: usize, peak_mw: f64) -> Result<()> {
    // Local maxima within 10 dB of the main peak and more than one chip away
    // indicate a reflection path, which violates the calibration criterion.
    let powers = pdp.powers_mw();
    let guard_bins = 4; // two chips at half-chip sampling
    let limit = peak_mw / 10f64.powf(PEAK_DOMINANCE_WINDOW_DB / 10.0);
    for i in 0..powers.len() {
        if (i as i64 - peak_bin as i64).abs() <= guard_bins {
            continue;
        }
        let left = if i == 0 { 0.0 } else { powers[i - 1] };
        let right = if i + 1 == powers.len() {
            0.0
        } else {
            powers[i + 1]
        };
        if powers[i] >= limit && powers[i] >= left && powers[i] >= right {
            return Err(ChanError::MultiplePeaks);
        }
    }
    Ok(())
}
