//! Frequency-band descriptions of the two measured mid-band campaigns.

use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};

/// Campaign band identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandLabel {
    #[serde(rename = "FR1C")]
    Fr1c,
    #[serde(rename = "FR3")]
    Fr3,
    #[serde(rename = "reference")]
    Reference,
}

impl std::fmt::Display for BandLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandLabel::Fr1c => write!(f, "FR1C"),
            BandLabel::Fr3 => write!(f, "FR3"),
            BandLabel::Reference => write!(f, "reference"),
        }
    }
}

/// Antenna polarization of a capture: co-polarized V-V or cross-polarized V-H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "VV")]
    Vv,
    #[serde(rename = "VH")]
    Vh,
}

/// One measured band: carrier, horn beamwidth, gain, EIRP, and link margin.
///
/// The azimuth sweep grid step equals the half-power beamwidth, so 360 must
/// be an integer multiple of `hpbw_deg` for a sweepable band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub label: BandLabel,
    pub carrier_ghz: f64,
    pub hpbw_deg: f64,
    pub antenna_gain_dbi: f64,
    pub eirp_dbm: f64,
    pub link_margin_db: f64,
}

impl FrequencyBand {
    /// 6.75 GHz campaign: 30 deg horns, 15 dBi, 31 dBm EIRP, 156 dB margin.
    pub const FR1C: FrequencyBand = FrequencyBand {
        label: BandLabel::Fr1c,
        carrier_ghz: 6.75,
        hpbw_deg: 30.0,
        antenna_gain_dbi: 15.0,
        eirp_dbm: 31.0,
        link_margin_db: 156.0,
    };

    /// 16.95 GHz campaign: 15 deg horns, 20 dBi, 31 dBm EIRP, 159 dB margin.
    pub const FR3: FrequencyBand = FrequencyBand {
        label: BandLabel::Fr3,
        carrier_ghz: 16.95,
        hpbw_deg: 15.0,
        antenna_gain_dbi: 20.0,
        eirp_dbm: 31.0,
        link_margin_db: 159.0,
    };

    pub fn from_label(label: BandLabel) -> Result<Self> {
        match label {
            BandLabel::Fr1c => Ok(Self::FR1C),
            BandLabel::Fr3 => Ok(Self::FR3),
            BandLabel::Reference => Err(ChanError::InvalidBand(
                "reference bands carry table constants only".into(),
            )),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "FR1C" | "FR1(C)" | "6.75" => Ok(Self::FR1C),
            "FR3" | "16.95" => Ok(Self::FR3),
            other => Err(ChanError::InvalidBand(format!("unknown band `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_ghz > 0.0) {
            return Err(ChanError::NonPositiveFrequency(self.carrier_ghz));
        }
        if !(self.hpbw_deg > 0.0 && self.hpbw_deg <= 360.0) {
            return Err(ChanError::InvalidBand(format!(
                "HPBW {} deg out of range",
                self.hpbw_deg
            )));
        }
        let steps = 360.0 / self.hpbw_deg;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(ChanError::HpbwNotDivisor(self.hpbw_deg));
        }
        Ok(())
    }

    /// Number of azimuth grid steps in a full sweep (24 at FR3, 12 at FR1C).
    pub fn azimuth_steps(&self) -> usize {
        (360.0 / self.hpbw_deg).round() as usize
    }

    /// Transmit power before the TX horn: EIRP minus antenna gain.
    pub fn tx_power_dbm(&self) -> f64 {
        self.eirp_dbm - self.antenna_gain_dbi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_bands_match_campaign() {
        let b = FrequencyBand::FR1C;
        assert_eq!(b.carrier_ghz, 6.75);
        assert_eq!(b.hpbw_deg, 30.0);
        assert_eq!(b.antenna_gain_dbi, 15.0);
        assert_eq!(b.eirp_dbm, 31.0);
        assert_eq!(b.link_margin_db, 156.0);
        assert_eq!(b.azimuth_steps(), 12);

        let b = FrequencyBand::FR3;
        assert_eq!(b.carrier_ghz, 16.95);
        assert_eq!(b.hpbw_deg, 15.0);
        assert_eq!(b.antenna_gain_dbi, 20.0);
        assert_eq!(b.link_margin_db, 159.0);
        assert_eq!(b.azimuth_steps(), 24);

        b.validate().unwrap();
        FrequencyBand::FR1C.validate().unwrap();
    }

    #[test]
    fn validate_rejects_non_divisor_hpbw() {
        let mut b = FrequencyBand::FR1C;
        b.hpbw_deg = 25.0;
        assert!(matches!(b.validate(), Err(ChanError::HpbwNotDivisor(_))));
    }

    #[test]
    fn parse_accepts_common_spellings() {
        assert_eq!(FrequencyBand::parse("fr3").unwrap().carrier_ghz, 16.95);
        assert_eq!(FrequencyBand::parse("FR1C").unwrap().carrier_ghz, 6.75);
        assert!(FrequencyBand::parse("FR2").is_err());
    }
}
