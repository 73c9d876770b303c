//! Omnidirectional synthesis from directional captures.
//!
//! Directional received powers are superposed linearly across unique
//! non-overlapping pointing cells after dividing out the horn gains. A cell
//! is identified by its (AOD index, TX tilt, AOA index, RX tilt) grid tuple;
//! re-measurements of the same cell keep the strongest capture so overlapping
//! sweeps never double-count energy.

use std::collections::BTreeMap;

use crate::error::{ChanError, Result};
use crate::pdp::PowerDelayProfile;
use crate::units::{db_to_linear, linear_to_db, mw_to_dbm, MIN_POWER_DBM};

use super::DirectionalCaptureSet;

/// Synthesize the omnidirectional PDP of a capture set.
pub fn synthesize_omni_pdp(set: &DirectionalCaptureSet) -> Result<PowerDelayProfile> {
    let records = set.records();
    let first = records
        .first()
        .ok_or(ChanError::EmptyInput("capture set"))?;
    if records.iter().any(|r| !r.pdp.same_grid(&first.pdp)) {
        return Err(ChanError::InconsistentBinGrids);
    }

    let hpbw = set.band().hpbw_deg;
    // ordered map: the summation order must not depend on hash state, or
    // repeated runs would differ in the last ulp
    let mut strongest: BTreeMap<(usize, i8, usize, i8), usize> = BTreeMap::new();
    for (idx, record) in records.iter().enumerate() {
        let key = record
            .pointing_key(hpbw)
            .ok_or_else(|| ChanError::GridViolation {
                azimuth_deg: record.rx_azimuth.degrees(),
                step_deg: hpbw,
            })?;
        let entry = strongest.entry(key).or_insert(idx);
        if record.pdp.total_power_mw() > records[*entry].pdp.total_power_mw() {
            *entry = idx;
        }
    }

    // both horns are de-embedded: TX and RX gain
    let gain_linear = db_to_linear(2.0 * set.band().antenna_gain_dbi);
    let mut powers = vec![0.0f64; first.pdp.len()];
    let mut floor_mw = 0.0f64;
    for &idx in strongest.values() {
        let pdp = &records[idx].pdp;
        for (acc, &p) in powers.iter_mut().zip(pdp.powers_mw()) {
            *acc += p / gain_linear;
        }
        floor_mw += db_to_linear(pdp.noise_floor_dbm()) / gain_linear;
    }
    let floor_dbm = if floor_mw > 0.0 {
        linear_to_db(floor_mw).max(MIN_POWER_DBM)
    } else {
        MIN_POWER_DBM
    };
    PowerDelayProfile::new(
        first.pdp.start_delay_ns(),
        first.pdp.bin_width_ns(),
        powers,
        floor_dbm,
    )
}

/// Omnidirectional path loss: transmit power minus the total synthesized
/// received power.
pub fn omni_path_loss(set: &DirectionalCaptureSet, tx_power_dbm: f64) -> Result<f64> {
    let omni = synthesize_omni_pdp(set)?;
    let total = omni.total_power_mw();
    if total <= 0.0 {
        return Err(ChanError::ZeroTotalPower);
    }
    Ok(tx_power_dbm - mw_to_dbm(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{FrequencyBand, Polarization};
    use crate::measproc::DirectionalCaptureSet;
    use crate::record::MeasurementRecord;
    use crate::units::{dbm_to_mw, Azimuth};

    fn record(aoa_deg: f64, rx_tilt: i8, bins_mw: Vec<f64>) -> MeasurementRecord {
        MeasurementRecord {
            location_id: "L1".into(),
            polarization: Polarization::Vv,
            wall_time_s: 0.0,
            tx_azimuth: Azimuth::wrap(0.0).unwrap(),
            rx_azimuth: Azimuth::wrap(aoa_deg).unwrap(),
            tx_tilt_hpbw: 0,
            rx_tilt_hpbw: rx_tilt,
            pdp: PowerDelayProfile::new(40.0, 1.0, bins_mw, -200.0).unwrap(),
            system_gain_db: 0.0,
            is_reference_recapture: false,
        }
    }

    fn set_of(records: Vec<MeasurementRecord>) -> DirectionalCaptureSet {
        DirectionalCaptureSet::new("L1".into(), Polarization::Vv, FrequencyBand::FR1C, records)
            .unwrap()
    }

    fn bins_with(at: usize, mw: f64) -> Vec<f64> {
        let mut v = vec![0.0; 64];
        v[at] = mw;
        v
    }

    #[test]
    fn single_direction_removes_antenna_gain() {
        let set = set_of(vec![record(0.0, 0, bins_with(10, 2.0))]);
        let omni = synthesize_omni_pdp(&set).unwrap();
        let expected = 2.0 / db_to_linear(30.0); // 2x 15 dBi removed
        assert!((omni.powers_mw()[10] - expected).abs() < 1e-15);
    }

    #[test]
    fn disjoint_directions_superpose_linearly() {
        let set = set_of(vec![
            record(0.0, 0, bins_with(10, 1.0)),
            record(90.0, 0, bins_with(10, 1.0)),
        ]);
        let omni = synthesize_omni_pdp(&set).unwrap();
        let expected = 2.0 / db_to_linear(30.0);
        assert!((omni.powers_mw()[10] - expected).abs() < 1e-15);
    }

    #[test]
    fn duplicate_cell_counts_once_keeping_strongest() {
        // same pointing cell captured twice (tilt sweep overlapping boresight)
        let weak = record(30.0, 0, bins_with(12, 0.5));
        let strong = record(30.0, 0, bins_with(12, 0.8));
        let total_of_all: f64 = weak.pdp.total_power_mw() + strong.pdp.total_power_mw();
        let set = DirectionalCaptureSet::new_unchecked(
            "L1".into(),
            Polarization::Vv,
            FrequencyBand::FR1C,
            vec![weak, strong],
        );
        let omni = synthesize_omni_pdp(&set).unwrap();
        let g2 = db_to_linear(30.0);
        assert!((omni.powers_mw()[12] - 0.8 / g2).abs() < 1e-15);
        assert!(omni.total_power_mw() <= total_of_all / g2);
    }

    #[test]
    fn tilted_remeasurement_is_a_distinct_cell() {
        let set = set_of(vec![
            record(30.0, 0, bins_with(12, 0.5)),
            record(30.0, -1, bins_with(12, 0.5)),
        ]);
        let omni = synthesize_omni_pdp(&set).unwrap();
        let g2 = db_to_linear(30.0);
        assert!((omni.powers_mw()[12] - 1.0 / g2).abs() < 1e-15);
    }

    #[test]
    fn total_power_monotone_in_directions() {
        let mut records = Vec::new();
        let mut last_total = 0.0;
        for k in 0..6 {
            records.push(record(k as f64 * 30.0, 0, bins_with(5 + k, 1.0)));
            let set = set_of(records.clone());
            let total = synthesize_omni_pdp(&set).unwrap().total_power_mw();
            assert!(total > last_total);
            last_total = total;
        }
    }

    #[test]
    fn inconsistent_grids_are_rejected() {
        let a = record(0.0, 0, bins_with(4, 1.0));
        let mut b = record(30.0, 0, bins_with(4, 1.0));
        b.pdp = PowerDelayProfile::new(41.0, 1.0, bins_with(4, 1.0), -200.0).unwrap();
        let set = set_of(vec![a, b]);
        assert!(matches!(
            synthesize_omni_pdp(&set),
            Err(ChanError::InconsistentBinGrids)
        ));
    }

    #[test]
    fn closed_loop_path_loss() {
        // single free-space path: recovered PL equals the injected loss
        let band = FrequencyBand::FR1C;
        let tx_power = band.tx_power_dbm();
        let pl_db = 70.0;
        let rx_dbm = tx_power + 2.0 * band.antenna_gain_dbi - pl_db;
        let set = set_of(vec![record(0.0, 0, bins_with(20, dbm_to_mw(rx_dbm)))]);
        let recovered = omni_path_loss(&set, tx_power).unwrap();
        assert!((recovered - pl_db).abs() < 0.1);

        // doubling every bin lowers the loss by 3.01 dB
        let set2 = set_of(vec![record(0.0, 0, bins_with(20, 2.0 * dbm_to_mw(rx_dbm)))]);
        let recovered2 = omni_path_loss(&set2, tx_power).unwrap();
        assert!((recovered - recovered2 - 3.0103).abs() < 0.001);
    }
}
