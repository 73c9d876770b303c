//! Campaign planning: sweep schedules, AOD selection, and cross-polarization
//! rules.

pub mod drop;

pub use drop::{
    drop_capture_set, ensemble_stats, generate_drop, DropConfig, DropStats, EnsembleSummary,
    StatSummary, SyntheticDrop,
};

use serde::{Deserialize, Serialize};

use crate::band::FrequencyBand;
use crate::error::{ChanError, Result};
use crate::tables::xpd_db;
use crate::units::Azimuth;

/// AOD selection keeps directions within this window of the strongest AOD...
pub const AOD_PEAK_WINDOW_DB: f64 = 30.0;
/// ...or above this margin over the noise floor, whichever rule is lower.
pub const AOD_NOISE_MARGIN_DB: f64 = 10.0;
/// Cross-polarized sweeps only re-measure AODs whose co-polarized peak
/// cleared the floor by this much.
pub const XPOL_MIN_MARGIN_DB: f64 = 30.0;

/// One RX azimuthal sweep of the five-sweep elevation pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_index: u8,
    /// TX elevation tilt in HPBW units (0 boresight, -1 downtilt).
    pub tx_tilt_hpbw: i8,
    /// RX elevation tilt in HPBW units.
    pub rx_tilt_hpbw: i8,
    pub rx_azimuth_steps: usize,
}

/// The five RX azimuthal sweeps performed per selected TX AOD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub hpbw_deg: f64,
    pub sweeps: [SweepRow; 5],
}

impl SweepPlan {
    /// Total pointing tuples per AOD (sweeps times azimuth steps).
    pub fn pointing_tuples(&self) -> usize {
        self.sweeps.iter().map(|s| s.rx_azimuth_steps).sum()
    }
}

/// Build the five-sweep elevation plan for a band: boresight, RX down, RX up,
/// TX down, and both down, each swept 360 degrees in HPBW steps.
pub fn plan_sweeps(band: &FrequencyBand) -> Result<SweepPlan> {
    band.validate()?;
    let steps = band.azimuth_steps();
    let tilts: [(i8, i8); 5] = [(0, 0), (0, -1), (0, 1), (-1, 0), (-1, -1)];
    let mut sweeps = [SweepRow {
        sweep_index: 0,
        tx_tilt_hpbw: 0,
        rx_tilt_hpbw: 0,
        rx_azimuth_steps: steps,
    }; 5];
    for (i, &(tx, rx)) in tilts.iter().enumerate() {
        sweeps[i] = SweepRow {
            sweep_index: (i + 1) as u8,
            tx_tilt_hpbw: tx,
            rx_tilt_hpbw: rx,
            rx_azimuth_steps: steps,
        };
    }
    Ok(SweepPlan {
        hpbw_deg: band.hpbw_deg,
        sweeps,
    })
}

/// Peak received power seen during the rapid scan of one TX AOD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AodPeak {
    pub aod: Azimuth,
    pub peak_dbm: f64,
}

/// Select the TX AODs to sweep: threshold at the minimum of (global maximum
/// minus 30 dB) and (noise floor plus 10 dB), keeping AODs whose rapid-scan
/// peak exceeds it.
pub fn select_aods(peaks: &[AodPeak], noise_floor_dbm: f64) -> Result<Vec<Azimuth>> {
    if peaks.is_empty() {
        return Err(ChanError::EmptyInput("rapid-scan peaks"));
    }
    let max_peak = peaks
        .iter()
        .map(|p| p.peak_dbm)
        .fold(f64::NEG_INFINITY, f64::max);
    let threshold = (max_peak - AOD_PEAK_WINDOW_DB).min(noise_floor_dbm + AOD_NOISE_MARGIN_DB);
    Ok(peaks
        .iter()
        .filter(|p| p.peak_dbm > threshold)
        .map(|p| p.aod)
        .collect())
}

/// AODs to re-measure in the cross-polarized configuration: co-polarized
/// rapid-scan peak at least 30 dB above the noise floor.
pub fn select_xpol_aods(vv_peaks: &[AodPeak], noise_floor_dbm: f64) -> Vec<Azimuth> {
    vv_peaks
        .iter()
        .filter(|p| p.peak_dbm >= noise_floor_dbm + XPOL_MIN_MARGIN_DB)
        .map(|p| p.aod)
        .collect()
}

/// Expected cross-polarized power from a co-polarized level, applying the
/// band's measured cross-polarization discrimination.
pub fn apply_xpd(vv_power_dbm: f64, band: &FrequencyBand) -> Result<f64> {
    let xpd = xpd_db(band.carrier_ghz).ok_or_else(|| ChanError::UnknownParams {
        freq_ghz: band.carrier_ghz,
        env: "-".into(),
        aggregation: "xpd".into(),
    })?;
    Ok(vv_power_dbm - xpd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn peak(deg: f64, dbm: f64) -> AodPeak {
        AodPeak {
            aod: Azimuth::wrap(deg).unwrap(),
            peak_dbm: dbm,
        }
    }

    #[test]
    fn five_sweeps_match_the_elevation_pattern() {
        let plan = plan_sweeps(&FrequencyBand::FR3).unwrap();
        assert_eq!(plan.sweeps.len(), 5);
        let tilts: Vec<(i8, i8)> = plan
            .sweeps
            .iter()
            .map(|s| (s.tx_tilt_hpbw, s.rx_tilt_hpbw))
            .collect();
        assert_eq!(tilts, vec![(0, 0), (0, -1), (0, 1), (-1, 0), (-1, -1)]);
        assert!(plan.sweeps.iter().all(|s| s.rx_azimuth_steps == 24));
        assert_eq!(plan.pointing_tuples(), 120);

        let plan = plan_sweeps(&FrequencyBand::FR1C).unwrap();
        assert!(plan.sweeps.iter().all(|s| s.rx_azimuth_steps == 12));
        assert_eq!(plan.pointing_tuples(), 60);
    }

    #[test]
    fn hypothetical_20_deg_band_gets_18_steps() {
        let mut band = FrequencyBand::FR1C;
        band.hpbw_deg = 20.0;
        let plan = plan_sweeps(&band).unwrap();
        assert!(plan.sweeps.iter().all(|s| s.rx_azimuth_steps == 18));

        band.hpbw_deg = 25.0;
        assert!(plan_sweeps(&band).is_err());
    }

    #[test]
    fn aod_threshold_takes_the_minimum_rule() {
        // max -50, floor -95: min(-80, -85) = -85, so -82 is kept
        let peaks = [peak(0.0, -50.0), peak(30.0, -82.0), peak(60.0, -90.0)];
        let kept = select_aods(&peaks, -95.0).unwrap();
        assert_eq!(kept.len(), 2);

        // max -50, floor -70: min(-80, -60) = -80, so -75 is kept
        let peaks = [peak(0.0, -50.0), peak(30.0, -75.0), peak(60.0, -81.0)];
        let kept = select_aods(&peaks, -70.0).unwrap();
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn equal_aods_are_all_kept() {
        let peaks = [peak(0.0, -60.0), peak(30.0, -60.0), peak(60.0, -60.0)];
        let kept = select_aods(&peaks, -65.0).unwrap();
        assert_eq!(kept.len(), 3);
        assert!(select_aods(&[], -95.0).is_err());
    }

    #[test]
    fn aod_selection_matches_bruteforce_filter() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        for _ in 0..300 {
            let floor = rng.random_range(-100.0..-60.0);
            let peaks: Vec<AodPeak> = (0..rng.random_range(1..16))
                .map(|i| peak(i as f64 * 15.0, rng.random_range(-100.0..-30.0)))
                .collect();
            let kept = select_aods(&peaks, floor).unwrap();
            let max = peaks
                .iter()
                .map(|p| p.peak_dbm)
                .fold(f64::NEG_INFINITY, f64::max);
            let brute: Vec<Azimuth> = peaks
                .iter()
                .filter(|p| {
                    let rule_a = p.peak_dbm > max - AOD_PEAK_WINDOW_DB;
                    let rule_b = p.peak_dbm > floor + AOD_NOISE_MARGIN_DB;
                    // threshold is min(A, B): exceeding either rule suffices
                    rule_a || rule_b
                })
                .map(|p| p.aod)
                .collect();
            assert_eq!(kept, brute);
        }
    }

    #[test]
    fn xpol_rule_and_xpd_constants() {
        let floor = -95.0;
        let kept = select_xpol_aods(&[peak(0.0, floor + 35.0)], floor);
        assert_eq!(kept.len(), 1);
        let kept = select_xpol_aods(&[peak(0.0, floor + 25.0)], floor);
        assert!(kept.is_empty());

        let vh1 = apply_xpd(-60.0, &FrequencyBand::FR1C).unwrap();
        assert!((vh1 - (-60.0 - 35.7)).abs() < 1e-12);
        let vh2 = apply_xpd(-60.0, &FrequencyBand::FR3).unwrap();
        assert!((vh2 - (-60.0 - 38.4)).abs() < 1e-12);
    }
}
