//! Dual-band sliding-correlation channel sounder simulation.
//!
//! Covers the full bench loop: PN generation, channel convolution, sliding
//! correlation with time dilation, power/time calibration against the 4 m
//! free-space reference, rubidium clock drift, and successive drift
//! correction from reference-MPC recaptures. The simulation runs at complex
//! baseband; the heterodyne up/down-conversion chain is treated as ideal and
//! appears only as the carrier label.

pub mod calibration;
pub mod correlator;
pub mod drift;
pub mod pn;

pub use calibration::{power_calibrate, time_calibrate, PowerCalibration};
pub use correlator::{
    capture_pdp, channel_convolve, dilation_factor, sliding_correlate, ChannelTap,
    CorrelatorConfig, DilatedPdp,
};
pub use drift::{apply_drift, drift_correct, CaptureEvent, ClockModel, DriftReport};
pub use pn::PnSequence;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::band::BandLabel;
use crate::error::{ChanError, Result};
use crate::units::Azimuth;

/// Default PN register order: 2047 chips, roughly 33 dB of correlation gain.
pub const DEFAULT_PN_ORDER: u32 = 11;

/// One scheduled pointing in a scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub wall_time_s: f64,
    pub tx_azimuth_deg: f64,
    pub rx_azimuth_deg: f64,
    #[serde(default)]
    pub tx_tilt_hpbw: i8,
    #[serde(default)]
    pub rx_tilt_hpbw: i8,
    #[serde(default)]
    pub is_reference_recapture: bool,
    /// Channel override for this pointing; the scenario taps apply otherwise.
    #[serde(default)]
    pub taps: Option<Vec<ChannelTap>>,
}

/// Scenario config consumed by the sounder simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SounderScenario {
    pub band: BandLabel,
    pub location_id: String,
    pub distance_m: f64,
    #[serde(default = "default_environment")]
    pub environment: crate::tables::Environment,
    pub clock: ClockModel,
    pub taps: Vec<ChannelTap>,
    pub snr_db: f64,
    #[serde(default)]
    pub correlator: CorrelatorConfig,
    #[serde(default = "default_pn_order")]
    pub pn_order: u32,
    pub schedule: Vec<ScheduleEntry>,
    pub seed: u64,
}

fn default_pn_order() -> u32 {
    DEFAULT_PN_ORDER
}

fn default_environment() -> crate::tables::Environment {
    crate::tables::Environment::Los
}

/// Simulated captures plus the ground-truth clock trajectory.
#[derive(Debug, Clone)]
pub struct SimulatedSchedule {
    pub events: Vec<CaptureEvent>,
    pub true_offsets_ns: Vec<f64>,
}

/// Run a scenario: capture a PDP per schedule entry, then inject clock drift.
pub fn simulate_schedule<R: Rng + ?Sized>(
    scenario: &SounderScenario,
    rng: &mut R,
) -> Result<SimulatedSchedule> {
    if scenario.schedule.is_empty() {
        return Err(ChanError::InvalidConfig("schedule is empty".into()));
    }
    let pn = PnSequence::max_length(scenario.pn_order, scenario.correlator.fast_rate_mcps)?;
    let mut events = Vec::with_capacity(scenario.schedule.len());
    for entry in &scenario.schedule {
        let taps = entry.taps.as_deref().unwrap_or(&scenario.taps);
        let pdp = capture_pdp(&pn, taps, scenario.snr_db, &scenario.correlator, rng)?;
        events.push(CaptureEvent {
            wall_time_s: entry.wall_time_s,
            tx_azimuth: Azimuth::wrap(entry.tx_azimuth_deg)?,
            rx_azimuth: Azimuth::wrap(entry.rx_azimuth_deg)?,
            tx_tilt_hpbw: entry.tx_tilt_hpbw,
            rx_tilt_hpbw: entry.rx_tilt_hpbw,
            pdp,
            is_reference_recapture: entry.is_reference_recapture,
        });
    }
    let (events, true_offsets_ns) = apply_drift(&events, &scenario.clock, rng)?;
    Ok(SimulatedSchedule {
        events,
        true_offsets_ns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn scenario_roundtrip_through_json() {
        let scenario = SounderScenario {
            band: BandLabel::Fr3,
            location_id: "TX1-RX2".into(),
            distance_m: 27.0,
            environment: crate::tables::Environment::Nlos,
            clock: ClockModel {
                frequency_offset_ppb: 10.0,
                initial_phase_offset_ns: 0.0,
                random_walk_ns_per_sqrt_s: 0.0,
            },
            taps: vec![ChannelTap {
                delay_ns: 90.0,
                gain_db: -70.0,
                phase_rad: 0.0,
            }],
            snr_db: 35.0,
            correlator: CorrelatorConfig::default(),
            pn_order: 9,
            schedule: vec![ScheduleEntry {
                wall_time_s: 0.0,
                tx_azimuth_deg: 0.0,
                rx_azimuth_deg: 90.0,
                tx_tilt_hpbw: 0,
                rx_tilt_hpbw: 0,
                is_reference_recapture: true,
                taps: None,
            }],
            seed: 3,
        };
        let json = serde_json::to_string(&scenario).unwrap();
        let back: SounderScenario = serde_json::from_str(&json).unwrap();
        assert_eq!(back.schedule.len(), 1);
        assert_eq!(back.pn_order, 9);

        let mut rng = ChaCha12Rng::seed_from_u64(back.seed);
        let sim = simulate_schedule(&back, &mut rng).unwrap();
        assert_eq!(sim.events.len(), 1);
        let peak_delay = sim.events[0].peak_delay_ns();
        assert!((peak_delay - 90.0).abs() <= 1.0, "peak at {peak_delay} ns");
    }
}
