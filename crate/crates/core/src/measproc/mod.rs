//! Measurement processing: thresholds, omni synthesis, spatial lobes, and
//! delay/angle spread statistics for one T-R location.

pub mod angular;
pub mod omni;
pub mod pdp_ops;

pub use angular::{
    build_pas, lobe_angular_spread, omni_angular_spread, segment_lobes, PasSide,
    PowerAngularSpectrum, SpatialLobe, SLT_DB,
};
pub use omni::{omni_path_loss, synthesize_omni_pdp};
pub use pdp_ops::{
    estimate_noise_floor, extract_mpcs, mean_excess_delay, pdp_threshold_dbm, rms_delay_spread,
    threshold_pdp, Mpc, NoiseFloorEstimate, MIN_LEADING_NOISE_BINS, NOISE_MARGIN_DB,
    PEAK_WINDOW_DB,
};

use serde::{Deserialize, Serialize};

use crate::band::{FrequencyBand, Polarization};
use crate::error::{ChanError, Result};
use crate::record::MeasurementRecord;

/// All directional captures of one location and polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalCaptureSet {
    location_id: String,
    polarization: Polarization,
    band: FrequencyBand,
    records: Vec<MeasurementRecord>,
}

impl DirectionalCaptureSet {
    /// Validate and build a capture set: azimuths must sit on the band's HPBW
    /// grid and (AOD, AOA, tilt) tuples must be unique among ordinary sweeps
    /// (reference recaptures repeat one pointing by design).
    pub fn new(
        location_id: String,
        polarization: Polarization,
        band: FrequencyBand,
        records: Vec<MeasurementRecord>,
    ) -> Result<Self> {
        band.validate()?;
        let mut seen = std::collections::HashSet::new();
        for record in &records {
            let key =
                record
                    .pointing_key(band.hpbw_deg)
                    .ok_or_else(|| ChanError::GridViolation {
                        azimuth_deg: record.rx_azimuth.degrees(),
                        step_deg: band.hpbw_deg,
                    })?;
            if !record.is_reference_recapture && !seen.insert(key) {
                return Err(ChanError::DuplicatePointing(format!(
                    "AOD index {}, TX tilt {}, AOA index {}, RX tilt {}",
                    key.0, key.1, key.2, key.3
                )));
            }
        }
        Ok(Self {
            location_id,
            polarization,
            band,
            records,
        })
    }

    /// Build without the uniqueness check, for synthesis paths that handle
    /// duplicates themselves.
    pub fn new_unchecked(
        location_id: String,
        polarization: Polarization,
        band: FrequencyBand,
        records: Vec<MeasurementRecord>,
    ) -> Self {
        Self {
            location_id,
            polarization,
            band,
            records,
        }
    }

    pub fn location_id(&self) -> &str {
        &self.location_id
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn band(&self) -> &FrequencyBand {
        &self.band
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }
}

/// Spatio-temporal statistics of one location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    /// RMS delay spread per beam with a nonempty thresholded PDP, in ns.
    pub directional_rms_ds_ns: Vec<f64>,
    /// Mean of the per-beam values; absent when no beam survives.
    pub mean_directional_rms_ds_ns: Option<f64>,
    pub omni_rms_ds_ns: f64,
    pub mean_excess_delay_ns: f64,
    pub omni_pl_db: f64,
    pub lobe_as_deg: Vec<f64>,
    pub omni_as_deg: f64,
}

/// Run the full processing pipeline for one capture set.
///
/// Directional statistics are computed per beam over beams whose thresholded
/// PDP is nonempty; empty beams are excluded rather than counted as zeros.
pub fn process_capture_set(set: &DirectionalCaptureSet, tx_power_dbm: f64) -> Result<ChannelStats> {
    let mut directional = Vec::new();
    for record in set.records() {
        match threshold_pdp(&record.pdp) {
            Ok(cut) => directional.push(rms_delay_spread(&cut)?),
            Err(ChanError::EmptyAfterThreshold) => continue,
            Err(e) => return Err(e),
        }
    }
    let mean_directional = if directional.is_empty() {
        None
    } else {
        Some(directional.iter().sum::<f64>() / directional.len() as f64)
    };

    let omni = synthesize_omni_pdp(set)?;
    let omni_cut = threshold_pdp(&omni)?;
    let omni_rms_ds_ns = rms_delay_spread(&omni_cut)?;
    let mean_excess_delay_ns = mean_excess_delay(&omni_cut)?;
    let omni_pl_db = omni_path_loss(set, tx_power_dbm)?;

    let pas = build_pas(set, PasSide::Aoa)?;
    let omni_as_deg = omni_angular_spread(&pas)?;
    let lobes = segment_lobes(&pas);
    let lobe_as_deg = lobes
        .iter()
        .map(lobe_angular_spread)
        .collect::<Result<Vec<f64>>>()?;

    let stats = ChannelStats {
        directional_rms_ds_ns: directional,
        mean_directional_rms_ds_ns: mean_directional,
        omni_rms_ds_ns,
        mean_excess_delay_ns,
        omni_pl_db,
        lobe_as_deg,
        omni_as_deg,
    };
    debug_assert!(stats.omni_as_deg <= 360.0 / 12f64.sqrt() * 1.01);
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdp::PowerDelayProfile;
    use crate::units::{dbm_to_mw, Azimuth};

    fn record(aod_deg: f64, aoa_deg: f64, bins: &[(usize, f64)]) -> MeasurementRecord {
        let mut powers = vec![0.0; 128];
        for &(i, dbm) in bins {
            powers[i] = dbm_to_mw(dbm);
        }
        MeasurementRecord {
            location_id: "L1".into(),
            polarization: Polarization::Vv,
            wall_time_s: 0.0,
            tx_azimuth: Azimuth::wrap(aod_deg).unwrap(),
            rx_azimuth: Azimuth::wrap(aoa_deg).unwrap(),
            tx_tilt_hpbw: 0,
            rx_tilt_hpbw: 0,
            pdp: PowerDelayProfile::new(40.0, 1.0, powers, -200.0).unwrap(),
            system_gain_db: 0.0,
            is_reference_recapture: false,
        }
    }

    #[test]
    fn capture_set_rejects_duplicates_and_off_grid() {
        let band = FrequencyBand::FR1C;
        let dup = vec![
            record(0.0, 30.0, &[(10, -60.0)]),
            record(0.0, 30.0, &[(10, -62.0)]),
        ];
        assert!(matches!(
            DirectionalCaptureSet::new("L1".into(), Polarization::Vv, band, dup),
            Err(ChanError::DuplicatePointing(_))
        ));

        let off_grid = vec![record(0.0, 17.0, &[(10, -60.0)])];
        assert!(matches!(
            DirectionalCaptureSet::new("L1".into(), Polarization::Vv, band, off_grid),
            Err(ChanError::GridViolation { .. })
        ));
    }

    #[test]
    fn reference_recaptures_may_repeat() {
        let band = FrequencyBand::FR1C;
        let mut a = record(0.0, 30.0, &[(10, -60.0)]);
        a.is_reference_recapture = true;
        let mut b = a.clone();
        b.wall_time_s = 100.0;
        assert!(
            DirectionalCaptureSet::new("L1".into(), Polarization::Vv, band, vec![a, b]).is_ok()
        );
    }

    #[test]
    fn pas_requires_full_aoa_coverage() {
        let band = FrequencyBand::FR1C;
        let mut records: Vec<MeasurementRecord> = (0..12)
            .map(|k| record(0.0, k as f64 * 30.0, &[(40, -70.0)]))
            .collect();
        let set = DirectionalCaptureSet::new(
            "L1".into(),
            Polarization::Vv,
            band,
            records.clone(),
        )
        .unwrap();
        assert_eq!(build_pas(&set, PasSide::Aoa).unwrap().len(), 12);

        records.remove(5);
        let partial =
            DirectionalCaptureSet::new("L1".into(), Polarization::Vv, band, records).unwrap();
        assert!(matches!(
            build_pas(&partial, PasSide::Aoa),
            Err(ChanError::IncompleteAzimuthCoverage(5))
        ));
        // the AOD grid only carries the swept directions; others stay zero
        let aod_pas = build_pas(&partial, PasSide::Aod).unwrap();
        assert_eq!(aod_pas.len(), 12);
        assert!(aod_pas.powers_mw[0] > 0.0);
        assert!(aod_pas.powers_mw[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn pipeline_produces_consistent_stats() {
        let band = FrequencyBand::FR1C;
        // cover all 12 AOAs; two of them carry real multipath
        let mut records = Vec::new();
        for k in 0..12 {
            let aoa = k as f64 * 30.0;
            let bins: Vec<(usize, f64)> = match k {
                0 => vec![(40, -60.0), (60, -66.0)],
                3 => vec![(45, -70.0)],
                _ => vec![(50, -100.0)],
            };
            records.push(record(0.0, aoa, &bins));
        }
        let set = DirectionalCaptureSet::new("L1".into(), Polarization::Vv, band, records).unwrap();
        let stats = process_capture_set(&set, band.tx_power_dbm()).unwrap();
        assert_eq!(stats.directional_rms_ds_ns.len(), 12);
        assert!(stats.omni_rms_ds_ns >= 0.0);
        assert!(stats.omni_pl_db > 0.0);
        assert!(!stats.lobe_as_deg.is_empty());
        assert!(stats.omni_as_deg >= 0.0);
        // the secondary AOA falls below the SLT, so the spread stays narrow
        assert!(stats.omni_as_deg < 90.0);
    }
}
