//! Power angular spectra, spatial lobes, and azimuth spread.
//!
//! A spatial lobe is a run of circularly contiguous pointing directions whose
//! power stays within the spatial lobe threshold (10 dB below the PAS peak);
//! powers below the SLT are ignored for angular statistics. The spread is the
//! rotation-minimized power-weighted standard deviation of the wrapped
//! angles: because the weighted variance is invariant under a common angle
//! shift, scanning the cut point over the occupied directions is exhaustive.

use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::units::{db_to_linear, Azimuth};

use super::DirectionalCaptureSet;

/// Spatial lobe threshold below the PAS peak, in dB.
pub const SLT_DB: f64 = 10.0;

/// Which side's azimuth the spectrum is resolved over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PasSide {
    #[serde(rename = "AOA")]
    Aoa,
    #[serde(rename = "AOD")]
    Aod,
}

/// Per-azimuth-direction integrated power at one T-R location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAngularSpectrum {
    pub side: PasSide,
    pub step_deg: f64,
    pub powers_mw: Vec<f64>,
}

impl PowerAngularSpectrum {
    pub fn len(&self) -> usize {
        self.powers_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers_mw.is_empty()
    }

    pub fn direction_deg(&self, idx: usize) -> f64 {
        idx as f64 * self.step_deg
    }

    pub fn peak(&self) -> (usize, f64) {
        let mut best = (0usize, self.powers_mw[0]);
        for (i, &p) in self.powers_mw.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (i, p);
            }
        }
        best
    }

    pub fn total_power_mw(&self) -> f64 {
        self.powers_mw.iter().sum()
    }

    /// (direction, power) pairs above the SLT.
    pub fn above_slt(&self) -> Vec<(f64, f64)> {
        let (_, peak) = self.peak();
        let cut = peak / db_to_linear(SLT_DB);
        self.powers_mw
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > cut)
            .map(|(i, &p)| (self.direction_deg(i), p))
            .collect()
    }
}

/// Build the PAS over one side: per azimuth direction, linear power summed
/// over delay and over the other side's angles and tilts. Re-measurements of
/// an identical pointing tuple keep the strongest capture.
///
/// The swept AOA side must cover the full circle in HPBW steps; the AOD grid
/// carries zero power at directions the rapid scan did not select.
pub fn build_pas(set: &DirectionalCaptureSet, side: PasSide) -> Result<PowerAngularSpectrum> {
    let records = set.records();
    if records.is_empty() {
        return Err(ChanError::EmptyInput("capture set"));
    }
    let hpbw = set.band().hpbw_deg;
    let steps = set.band().azimuth_steps();

    let mut strongest: std::collections::BTreeMap<(usize, i8, usize, i8), usize> =
        std::collections::BTreeMap::new();
    for (idx, record) in records.iter().enumerate() {
        let key = record
            .pointing_key(hpbw)
            .ok_or_else(|| ChanError::GridViolation {
                azimuth_deg: record.rx_azimuth.degrees(),
                step_deg: hpbw,
            })?;
        let entry = strongest.entry(key).or_insert(idx);
        if records[idx].pdp.total_power_mw() > records[*entry].pdp.total_power_mw() {
            *entry = idx;
        }
    }

    let mut powers = vec![0.0f64; steps];
    let mut covered = vec![false; steps];
    for (key, &idx) in &strongest {
        let dir = match side {
            PasSide::Aoa => key.2,
            PasSide::Aod => key.0,
        };
        powers[dir] += records[idx].pdp.total_power_mw();
        covered[dir] = true;
    }
    if side == PasSide::Aoa {
        if let Some(missing) = covered.iter().position(|&c| !c) {
            return Err(ChanError::IncompleteAzimuthCoverage(missing));
        }
    }
    Ok(PowerAngularSpectrum {
        side,
        step_deg: hpbw,
        powers_mw: powers,
    })
}

/// Contiguous pointing directions with power above the SLT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialLobe {
    /// Grid indices in arc order from the lobe start.
    pub member_indices: Vec<usize>,
    pub member_directions_deg: Vec<f64>,
    pub powers_mw: Vec<f64>,
    pub peak_direction: Azimuth,
}

impl SpatialLobe {
    pub fn entries(&self) -> Vec<(f64, f64)> {
        self.member_directions_deg
            .iter()
            .zip(self.powers_mw.iter())
            .map(|(&d, &p)| (d, p))
            .collect()
    }
}

/// Group the above-SLT directions of a PAS into circularly contiguous lobes.
pub fn segment_lobes(pas: &PowerAngularSpectrum) -> Vec<SpatialLobe> {
    let n = pas.len();
    if n == 0 || pas.total_power_mw() <= 0.0 {
        return Vec::new();
    }
    let (_, peak) = pas.peak();
    let cut = peak / db_to_linear(SLT_DB);
    let above: Vec<bool> = pas.powers_mw.iter().map(|&p| p > cut).collect();

    if above.iter().all(|&a| a) {
        // a single lobe spanning the whole circle
        return vec![make_lobe(pas, (0..n).collect())];
    }

    // walk the circle starting just after a gap so wrap-around runs stay whole
    let start = above.iter().position(|&a| !a).unwrap();
    let mut lobes = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    for step in 1..=n {
        let idx = (start + step) % n;
        if above[idx] {
            run.push(idx);
        } else if !run.is_empty() {
            lobes.push(make_lobe(pas, std::mem::take(&mut run)));
        }
    }
    if !run.is_empty() {
        lobes.push(make_lobe(pas, run));
    }
    lobes
}

fn make_lobe(pas: &PowerAngularSpectrum, indices: Vec<usize>) -> SpatialLobe {
    let powers: Vec<f64> = indices.iter().map(|&i| pas.powers_mw[i]).collect();
    let peak_pos = powers
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    SpatialLobe {
        member_directions_deg: indices.iter().map(|&i| pas.direction_deg(i)).collect(),
        peak_direction: Azimuth::wrap(pas.direction_deg(indices[peak_pos])).expect("finite"),
        member_indices: indices,
        powers_mw: powers,
    }
}

/// Rotation-minimized circular RMS spread of weighted angles, in degrees.
///
/// For every occupied direction as the cut point, angles are wrapped into
/// `[0, 360)` relative to the cut and the power-weighted standard deviation
/// is evaluated; the minimum over cuts is returned.
pub fn angular_spread(entries: &[(f64, f64)]) -> Result<f64> {
    let occupied: Vec<(f64, f64)> = entries.iter().copied().filter(|&(_, p)| p > 0.0).collect();
    let total: f64 = occupied.iter().map(|&(_, p)| p).sum();
    if total <= 0.0 {
        return Err(ChanError::ZeroTotalPower);
    }
    let mut best = f64::INFINITY;
    for &(cut, _) in &occupied {
        let mut first = 0.0;
        let mut second = 0.0;
        for &(angle, power) in &occupied {
            let phi = (angle - cut).rem_euclid(360.0);
            first += power * phi;
            second += power * phi * phi;
        }
        let mean = first / total;
        let var = (second / total - mean * mean).max(0.0);
        best = best.min(var.sqrt());
    }
    Ok(best)
}

/// Spread of a single lobe (members already above the SLT).
pub fn lobe_angular_spread(lobe: &SpatialLobe) -> Result<f64> {
    angular_spread(&lobe.entries())
}

/// Omnidirectional spread of a PAS; powers below the SLT are ignored.
pub fn omni_angular_spread(pas: &PowerAngularSpectrum) -> Result<f64> {
    angular_spread(&pas.above_slt())
}
