//! Clock drift between the untethered TX/RX rubidium references, and its
//! correction from reference-MPC recaptures.
//!
//! The apparent propagation delay drifts with the frequency and phase offset
//! between the two clocks. The schedule re-points at a fixed reference
//! AOD-AOA pair after every azimuthal sweep and recaptures its PDP; the
//! observed displacement of the reference peak anchors a piecewise-linear
//! correction that is subtracted from every capture in between.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::pdp::PowerDelayProfile;
use crate::units::Azimuth;

/// Clock offset model: a linear term from the frequency offset plus an
/// optional random-walk jitter.
///
/// The delay offset at elapsed time `t` seconds is
/// `initial_phase_offset_ns + frequency_offset_ppb * t + W(t)` ns, where `W`
/// is a Wiener process with `random_walk_ns_per_sqrt_s` scale (ppb times
/// seconds is ns directly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockModel {
    pub frequency_offset_ppb: f64,
    pub initial_phase_offset_ns: f64,
    #[serde(default)]
    pub random_walk_ns_per_sqrt_s: f64,
}

impl ClockModel {
    pub fn ideal() -> Self {
        Self {
            frequency_offset_ppb: 0.0,
            initial_phase_offset_ns: 0.0,
            random_walk_ns_per_sqrt_s: 0.0,
        }
    }

    /// Sample the offset trajectory at the given (ordered) times.
    pub fn offset_trajectory<R: Rng + ?Sized>(&self, times_s: &[f64], rng: &mut R) -> Vec<f64> {
        let mut offsets = Vec::with_capacity(times_s.len());
        let mut walk = 0.0;
        let mut prev_t = times_s.first().copied().unwrap_or(0.0);
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        for &t in times_s {
            if self.random_walk_ns_per_sqrt_s > 0.0 {
                let dt = (t - prev_t).max(0.0);
                walk += self.random_walk_ns_per_sqrt_s * dt.sqrt() * unit.sample(rng);
            }
            prev_t = t;
            offsets.push(self.initial_phase_offset_ns + self.frequency_offset_ppb * t + walk);
        }
        offsets
    }
}

/// One directional capture in a measurement schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureEvent {
    pub wall_time_s: f64,
    pub tx_azimuth: Azimuth,
    pub rx_azimuth: Azimuth,
    pub tx_tilt_hpbw: i8,
    pub rx_tilt_hpbw: i8,
    pub pdp: PowerDelayProfile,
    /// Set on the fixed reference AOD-AOA pair captures used for drift
    /// correction.
    pub is_reference_recapture: bool,
}

impl CaptureEvent {
    /// Delay of the strongest path.
    pub fn peak_delay_ns(&self) -> f64 {
        self.pdp.delay_ns(self.pdp.peak().0)
    }
}

fn ensure_time_ordered(schedule: &[CaptureEvent]) -> Result<()> {
    if schedule
        .windows(2)
        .any(|w| w[1].wall_time_s < w[0].wall_time_s)
    {
        return Err(ChanError::UnorderedEvents);
    }
    Ok(())
}

/// Shift every event's PDP by the clock offset at its wall time.
///
/// Returns the drifted schedule together with the true offset trajectory,
/// which simulations keep as ground truth for evaluating correction quality.
pub fn apply_drift<R: Rng + ?Sized>(
    schedule: &[CaptureEvent],
    clock: &ClockModel,
    rng: &mut R,
) -> Result<(Vec<CaptureEvent>, Vec<f64>)> {
    ensure_time_ordered(schedule)?;
    let times: Vec<f64> = schedule.iter().map(|e| e.wall_time_s).collect();
    let offsets = clock.offset_trajectory(&times, rng);
    let mut drifted = Vec::with_capacity(schedule.len());
    for (event, &offset) in schedule.iter().zip(offsets.iter()) {
        let mut e = event.clone();
        e.pdp = e.pdp.wrapped_shift(offset);
        drifted.push(e);
    }
    Ok((drifted, offsets))
}

/// Per-recapture drift observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftAnchor {
    pub wall_time_s: f64,
    /// Reference-peak delay observed at the recapture.
    pub observed_delay_ns: f64,
    /// Displacement relative to the initial reference capture.
    pub displacement_ns: f64,
}

/// Result of successive drift correction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub anchors: Vec<DriftAnchor>,
    /// Correction subtracted from each event, in schedule order.
    pub corrections_ns: Vec<f64>,
    /// Largest residual displacement left at the recaptures themselves.
    pub max_recapture_residual_ns: f64,
}

/// Correct clock drift from the reference-MPC recaptures.
///
/// The first event must be the initial reference capture (its peak delay
/// defines the reference truth) and every sweep must be followed by a
/// recapture. Corrections between consecutive recaptures are linearly
/// interpolated from the observed reference-peak displacements, which cancels
/// any pure linear drift exactly.
pub fn drift_correct(schedule: &[CaptureEvent]) -> Result<(Vec<CaptureEvent>, DriftReport)> {
    if schedule.is_empty() {
        return Err(ChanError::EmptyInput("capture schedule"));
    }
    ensure_time_ordered(schedule)?;
    if !schedule[0].is_reference_recapture {
        return Err(ChanError::MissingRecapture);
    }
    if !schedule[schedule.len() - 1].is_reference_recapture {
        return Err(ChanError::MissingRecapture);
    }

    // every recapture must re-point at the one fixed reference AOD-AOA pair
    let reference = &schedule[0];
    for event in schedule.iter().filter(|e| e.is_reference_recapture) {
        if event.tx_azimuth != reference.tx_azimuth
            || event.rx_azimuth != reference.rx_azimuth
            || event.tx_tilt_hpbw != reference.tx_tilt_hpbw
            || event.rx_tilt_hpbw != reference.rx_tilt_hpbw
        {
            return Err(ChanError::InvalidConfig(
                "reference recaptures must repeat the initial AOD-AOA pair".into(),
            ));
        }
    }

    let reference_delay_ns = schedule[0].peak_delay_ns();
    let anchors: Vec<DriftAnchor> = schedule
        .iter()
        .filter(|e| e.is_reference_recapture)
        .map(|e| {
            let observed = e.peak_delay_ns();
            DriftAnchor {
                wall_time_s: e.wall_time_s,
                observed_delay_ns: observed,
                displacement_ns: observed - reference_delay_ns,
            }
        })
        .collect();

    let mut corrected = Vec::with_capacity(schedule.len());
    let mut corrections = Vec::with_capacity(schedule.len());
    let mut residual_max = 0.0f64;
    let mut segment = 0usize;
    for event in schedule {
        while segment + 1 < anchors.len() - 1
            && event.wall_time_s > anchors[segment + 1].wall_time_s
        {
            segment += 1;
        }
        let a = &anchors[segment];
        let b = &anchors[(segment + 1).min(anchors.len() - 1)];
        let correction = if b.wall_time_s > a.wall_time_s {
            let u = ((event.wall_time_s - a.wall_time_s) / (b.wall_time_s - a.wall_time_s))
                .clamp(0.0, 1.0);
            a.displacement_ns + u * (b.displacement_ns - a.displacement_ns)
        } else {
            a.displacement_ns
        };
        let mut e = event.clone();
        e.pdp = e.pdp.wrapped_shift(-correction);
        if e.is_reference_recapture {
            residual_max = residual_max.max((e.peak_delay_ns() - reference_delay_ns).abs());
        }
        corrections.push(correction);
        corrected.push(e);
    }

    Ok((
        corrected,
        DriftReport {
            anchors,
            corrections_ns: corrections,
            max_recapture_residual_ns: residual_max,
        },
    ))
}
