//! Per-PDP processing: noise estimation, thresholding, multipath extraction,
//! and delay-spread moments.

use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::pdp::PowerDelayProfile;
use crate::units::{db_to_linear, dbm_to_mw, mw_to_dbm, MIN_POWER_DBM};

/// Bins survive when they clear the noise floor by this margin...
pub const NOISE_MARGIN_DB: f64 = 5.0;
/// ...or sit within this window below the PDP peak, whichever threshold is
/// higher.
pub const PEAK_WINDOW_DB: f64 = 25.0;
/// Leading noise-only bins required for a floor estimate.
pub const MIN_LEADING_NOISE_BINS: usize = 50;

/// Noise floor estimated from the leading noise-only region of a PDP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseFloorEstimate {
    pub floor_dbm: f64,
    /// Set when the leading region carries no power at all (noiseless
    /// simulation); the floor is pinned at the numeric minimum.
    pub degenerate: bool,
}

/// Estimate the noise floor as the median power of the bins before the first
/// arrival (the first bin within [`PEAK_WINDOW_DB`] of the peak).
pub fn estimate_noise_floor(pdp: &PowerDelayProfile) -> Result<NoiseFloorEstimate> {
    let (_, peak_mw) = pdp.peak();
    if peak_mw <= 0.0 {
        return Err(ChanError::ZeroTotalPower);
    }
    let arrival_level = peak_mw / db_to_linear(PEAK_WINDOW_DB);
    let first_arrival = pdp
        .powers_mw()
        .iter()
        .position(|&p| p >= arrival_level)
        .unwrap_or(pdp.len());
    if first_arrival < MIN_LEADING_NOISE_BINS {
        return Err(ChanError::PdpTooShort {
            leading: first_arrival,
            required: MIN_LEADING_NOISE_BINS,
        });
    }
    let mut leading: Vec<f64> = pdp.powers_mw()[..first_arrival].to_vec();
    leading.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if leading.len() % 2 == 1 {
        leading[leading.len() / 2]
    } else {
        (leading[leading.len() / 2 - 1] + leading[leading.len() / 2]) / 2.0
    };
    if median <= 0.0 {
        return Ok(NoiseFloorEstimate {
            floor_dbm: MIN_POWER_DBM,
            degenerate: true,
        });
    }
    Ok(NoiseFloorEstimate {
        floor_dbm: mw_to_dbm(median),
        degenerate: false,
    })
}

/// Threshold used when processing a PDP into channel statistics: the higher
/// of (noise floor + 5 dB) and (peak - 25 dB), in dBm.
pub fn pdp_threshold_dbm(peak_dbm: f64, noise_floor_dbm: f64) -> f64 {
    (noise_floor_dbm + NOISE_MARGIN_DB).max(peak_dbm - PEAK_WINDOW_DB)
}

/// Zero every bin below the processing threshold. The PDP's own noise floor
/// field supplies the floor. Fails when nothing survives.
pub fn threshold_pdp(pdp: &PowerDelayProfile) -> Result<PowerDelayProfile> {
    let threshold_mw = dbm_to_mw(pdp_threshold_dbm(pdp.peak_dbm(), pdp.noise_floor_dbm()));
    let powers: Vec<f64> = pdp
        .powers_mw()
        .iter()
        .map(|&p| if p >= threshold_mw { p } else { 0.0 })
        .collect();
    if powers.iter().all(|&p| p == 0.0) {
        return Err(ChanError::EmptyAfterThreshold);
    }
    Ok(pdp.with_powers(powers))
}

/// A discrete multipath component: delay at the bin center, linear power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mpc {
    pub delay_ns: f64,
    pub power_mw: f64,
}

/// Local maxima of a thresholded PDP. A plateau of equal bins yields a single
/// component at its earliest bin.
pub fn extract_mpcs(pdp: &PowerDelayProfile) -> Vec<Mpc> {
    let powers = pdp.powers_mw();
    let n = powers.len();
    let mut mpcs = Vec::new();
    let mut i = 0;
    while i < n {
        if powers[i] == 0.0 {
            i += 1;
            continue;
        }
        // extend over a plateau of equal powers
        let mut j = i;
        while j + 1 < n && powers[j + 1] == powers[i] {
            j += 1;
        }
        let rising = i == 0 || powers[i - 1] < powers[i];
        let falling = j + 1 >= n || powers[j + 1] < powers[i];
        if rising && falling {
            mpcs.push(Mpc {
                delay_ns: pdp.delay_ns(i),
                power_mw: powers[i],
            });
        }
        i = j + 1;
    }
    mpcs
}

/// Power-weighted mean delay of the surviving bins, in ns.
pub fn mean_excess_delay(pdp: &PowerDelayProfile) -> Result<f64> {
    let total: f64 = pdp.total_power_mw();
    if total <= 0.0 {
        return Err(ChanError::ZeroTotalPower);
    }
    let first_moment: f64 = pdp
        .powers_mw()
        .iter()
        .enumerate()
        .map(|(i, &p)| p * pdp.delay_ns(i))
        .sum();
    Ok(first_moment / total)
}

/// RMS delay spread: square root of the second central moment of the
/// (already thresholded) PDP.
pub fn rms_delay_spread(pdp: &PowerDelayProfile) -> Result<f64> {
    let total: f64 = pdp.total_power_mw();
    if total <= 0.0 {
        return Err(ChanError::ZeroTotalPower);
    }
    let mut first = 0.0;
    let mut second = 0.0;
    for (i, &p) in pdp.powers_mw().iter().enumerate() {
        let tau = pdp.delay_ns(i);
        first += p * tau;
        second += p * tau * tau;
    }
    let mean = first / total;
    Ok((second / total - mean * mean).max(0.0).sqrt())
}
