//! Power delay profiles: received power vs absolute propagation delay.

use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::units::{dbm_to_mw, mw_to_dbm};

/// Sampled received power vs absolute propagation delay for one pointing
/// direction.
///
/// Powers are stored linearly in mW on a uniform delay grid:
/// `delay(i) = start_delay_ns + i * bin_width_ns`. dB appears only at
/// interfaces (files, reports).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PdpWire", into = "PdpWire")]
pub struct PowerDelayProfile {
    start_delay_ns: f64,
    bin_width_ns: f64,
    powers_mw: Vec<f64>,
    noise_floor_dbm: f64,
}

impl PowerDelayProfile {
    pub fn new(
        start_delay_ns: f64,
        bin_width_ns: f64,
        powers_mw: Vec<f64>,
        noise_floor_dbm: f64,
    ) -> Result<Self> {
        if powers_mw.is_empty() {
            return Err(ChanError::InvalidPdp("no delay bins".into()));
        }
        if !(bin_width_ns > 0.0) || !bin_width_ns.is_finite() {
            return Err(ChanError::InvalidPdp(format!(
                "bin width {bin_width_ns} ns must be positive"
            )));
        }
        if !(start_delay_ns >= 0.0) || !start_delay_ns.is_finite() {
            return Err(ChanError::InvalidPdp(format!(
                "start delay {start_delay_ns} ns must be nonnegative"
            )));
        }
        if powers_mw.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(ChanError::InvalidPdp(
                "powers must be finite and nonnegative".into(),
            ));
        }
        if !noise_floor_dbm.is_finite() {
            return Err(ChanError::InvalidPdp("noise floor must be finite".into()));
        }
        Ok(Self {
            start_delay_ns,
            bin_width_ns,
            powers_mw,
            noise_floor_dbm,
        })
    }

    pub fn start_delay_ns(&self) -> f64 {
        self.start_delay_ns
    }

    pub fn bin_width_ns(&self) -> f64 {
        self.bin_width_ns
    }

    pub fn powers_mw(&self) -> &[f64] {
        &self.powers_mw
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        self.noise_floor_dbm
    }

    pub fn len(&self) -> usize {
        self.powers_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers_mw.is_empty()
    }

    pub fn delay_ns(&self, bin: usize) -> f64 {
        self.start_delay_ns + bin as f64 * self.bin_width_ns
    }

    pub fn delays(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.delay_ns(i))
    }

    /// Index and power of the strongest bin (first bin wins ties).
    pub fn peak(&self) -> (usize, f64) {
        let mut best = (0usize, self.powers_mw[0]);
        for (i, &p) in self.powers_mw.iter().enumerate().skip(1) {
            if p > best.1 {
                best = (i, p);
            }
        }
        best
    }

    pub fn peak_dbm(&self) -> f64 {
        mw_to_dbm(self.peak().1)
    }

    pub fn total_power_mw(&self) -> f64 {
        self.powers_mw.iter().sum()
    }

    /// Same grid (start, width, length) as `other`, within 1e-9 ns.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && (self.start_delay_ns - other.start_delay_ns).abs() < 1e-9
            && (self.bin_width_ns - other.bin_width_ns).abs() < 1e-9
    }

    /// Translate the delay axis by `delta_ns`. Fails if the start would go
    /// negative (absolute delays cannot precede the transmit instant).
    pub fn shifted(&self, delta_ns: f64) -> Result<Self> {
        let start = self.start_delay_ns + delta_ns;
        if start < 0.0 {
            return Err(ChanError::NegativeDelayShift { shift_ns: delta_ns });
        }
        Ok(Self {
            start_delay_ns: start,
            ..self.clone()
        })
    }

    /// Translate the delay axis by `delta_ns`, wrapping circularly over the
    /// profile span when the start would go negative.
    ///
    /// The correlator window is periodic over the PN period, so an apparent
    /// delay below zero reappears at the top of the span: the integer-bin
    /// part of the shift rotates the bins and the sub-bin remainder lands in
    /// the start delay, which stays in `[0, bin_width)`.
    pub fn wrapped_shift(&self, delta_ns: f64) -> Self {
        let mut total = self.start_delay_ns + delta_ns;
        // float noise around zero must not rotate a whole bin
        if total < 0.0 && total > -1e-9 {
            total = 0.0;
        }
        if total >= 0.0 {
            return Self {
                start_delay_ns: total,
                ..self.clone()
            };
        }
        let k = total.div_euclid(self.bin_width_ns);
        let remainder = (total - k * self.bin_width_ns).max(0.0);
        let shifted = self.circular_shift_bins(k as i64);
        Self {
            start_delay_ns: remainder,
            ..shifted
        }
    }

    /// Rotate powers circularly by `bins` (positive moves power to later
    /// delays). The delay axis is unchanged.
    pub fn circular_shift_bins(&self, bins: i64) -> Self {
        let n = self.len() as i64;
        let k = bins.rem_euclid(n) as usize;
        let mut powers = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let src = (i as i64 - k as i64).rem_euclid(n) as usize;
            powers.push(self.powers_mw[src]);
        }
        Self {
            powers_mw: powers,
            ..self.clone()
        }
    }

    /// Scale every bin by a linear factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            powers_mw: self.powers_mw.iter().map(|p| p * factor).collect(),
            ..self.clone()
        }
    }

    /// Replace bin powers, keeping the grid and floor.
    pub(crate) fn with_powers(&self, powers_mw: Vec<f64>) -> Self {
        debug_assert_eq!(powers_mw.len(), self.len());
        Self {
            powers_mw,
            ..self.clone()
        }
    }
}

/// On-disk shape: powers in dBm for human readability. Powers at or below
/// -350 dBm are floored to zero mW on load.
#[derive(Serialize, Deserialize)]
struct PdpWire {
    start_delay_ns: f64,
    bin_width_ns: f64,
    noise_floor_dbm: f64,
    powers_dbm: Vec<f64>,
}

impl From<PowerDelayProfile> for PdpWire {
    fn from(pdp: PowerDelayProfile) -> Self {
        PdpWire {
            start_delay_ns: pdp.start_delay_ns,
            bin_width_ns: pdp.bin_width_ns,
            noise_floor_dbm: pdp.noise_floor_dbm,
            powers_dbm: pdp.powers_mw.iter().map(|&p| mw_to_dbm(p)).collect(),
        }
    }
}

impl TryFrom<PdpWire> for PowerDelayProfile {
    type Error = ChanError;

    fn try_from(wire: PdpWire) -> Result<Self> {
        let powers_mw = wire.powers_dbm.iter().map(|&d| dbm_to_mw(d)).collect();
        PowerDelayProfile::new(
            wire.start_delay_ns,
            wire.bin_width_ns,
            powers_mw,
            wire.noise_floor_dbm,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pdp(powers: Vec<f64>) -> PowerDelayProfile {
        PowerDelayProfile::new(10.0, 1.0, powers, -95.0).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(PowerDelayProfile::new(0.0, 1.0, vec![], -95.0).is_err());
        assert!(PowerDelayProfile::new(0.0, 0.0, vec![1.0], -95.0).is_err());
        assert!(PowerDelayProfile::new(-1.0, 1.0, vec![1.0], -95.0).is_err());
        assert!(PowerDelayProfile::new(0.0, 1.0, vec![-1.0], -95.0).is_err());
        assert!(PowerDelayProfile::new(0.0, 1.0, vec![f64::NAN], -95.0).is_err());
    }

    #[test]
    fn delay_axis_is_uniform() {
        let p = pdp(vec![0.0, 1.0, 2.0]);
        let delays: Vec<f64> = p.delays().collect();
        assert_eq!(delays, vec![10.0, 11.0, 12.0]);
    }

    #[test]
    fn peak_breaks_ties_early() {
        let p = pdp(vec![1.0, 5.0, 5.0, 0.0]);
        assert_eq!(p.peak(), (1, 5.0));
    }

    #[test]
    fn circular_shift_wraps() {
        let p = pdp(vec![1.0, 2.0, 3.0, 4.0]);
        let s = p.circular_shift_bins(1);
        assert_eq!(s.powers_mw(), &[4.0, 1.0, 2.0, 3.0]);
        let s = p.circular_shift_bins(-1);
        assert_eq!(s.powers_mw(), &[2.0, 3.0, 4.0, 1.0]);
        let s = p.circular_shift_bins(4);
        assert_eq!(s.powers_mw(), p.powers_mw());
    }

    #[test]
    fn shifted_rejects_negative_start() {
        let p = pdp(vec![1.0]);
        assert!(p.shifted(-10.0).is_ok());
        assert!(p.shifted(-10.1).is_err());
    }

    #[test]
    fn wire_roundtrip_handles_zero_power() {
        let p = PowerDelayProfile::new(0.0, 1.0, vec![0.0, 1e-6, 2.5], -90.0).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: PowerDelayProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.powers_mw()[0], 0.0);
        assert!((back.powers_mw()[1] / 1e-6 - 1.0).abs() < 1e-12);
        assert!((back.powers_mw()[2] / 2.5 - 1.0).abs() < 1e-12);
    }
}
