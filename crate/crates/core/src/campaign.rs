//! Campaign files and reports.
//!
//! A campaign is stored as line-delimited JSON: a header line, one line per
//! measurement record, and a footer line carrying the calibration log. This
//! keeps large sweep sets (120 pointing tuples per AOD, times AODs and
//! locations) streamable. PDP powers are dBm in the file and linear mW in
//! memory.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::band::{FrequencyBand, Polarization};
use crate::error::{ChanError, Result};
use crate::measproc::{
    process_capture_set, ChannelStats, DirectionalCaptureSet, NOISE_MARGIN_DB, PEAK_WINDOW_DB,
    SLT_DB,
};
use crate::pathloss::{ci_fit, CiParams, PathLossSample};
use crate::record::MeasurementRecord;
use crate::tables::{Aggregation, Environment, RX_HEIGHT_M, TX_HEIGHT_M};

/// Campaign/report format version.
pub const FORMAT_VERSION: u32 = 1;

/// Geometry and condition of one T-R location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationInfo {
    pub id: String,
    pub tx: String,
    pub rx: String,
    pub distance_m: f64,
    pub environment: Environment,
}

/// Campaign header: site, band, geometry, polarization, locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignHeader {
    pub format_version: u32,
    pub band: FrequencyBand,
    pub site: String,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub polarization: Polarization,
    pub locations: Vec<LocationInfo>,
}

impl CampaignHeader {
    pub fn new(
        band: FrequencyBand,
        site: impl Into<String>,
        polarization: Polarization,
        locations: Vec<LocationInfo>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            band,
            site: site.into(),
            tx_height_m: TX_HEIGHT_M,
            rx_height_m: RX_HEIGHT_M,
            polarization,
            locations,
        }
    }
}

/// One drift recapture observation in the calibration log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftLogEntry {
    pub wall_time_s: f64,
    pub observed_delay_ns: f64,
    pub correction_ns: f64,
}

/// Calibration log stored in the campaign footer.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CalibrationLog {
    pub system_gain_db: f64,
    pub drift_recaptures: Vec<DriftLogEntry>,
}

/// A validated in-memory campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignFile {
    pub header: CampaignHeader,
    pub records: Vec<MeasurementRecord>,
    pub footer: CalibrationLog,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header(CampaignHeader),
    Record(MeasurementRecord),
    Footer(CalibrationLog),
}

impl CampaignFile {
    pub fn new(
        header: CampaignHeader,
        records: Vec<MeasurementRecord>,
        footer: CalibrationLog,
    ) -> Result<Self> {
        let campaign = Self {
            header,
            records,
            footer,
        };
        campaign.validate()?;
        Ok(campaign)
    }

    /// Check the file invariants: supported version, azimuths on the band's
    /// grid, known locations, record polarization matching the header, and
    /// unique pointing tuples per location (reference recaptures exempt).
    pub fn validate(&self) -> Result<()> {
        if self.header.format_version != FORMAT_VERSION {
            return Err(ChanError::VersionMismatch {
                found: self.header.format_version,
                expected: FORMAT_VERSION,
            });
        }
        self.header.band.validate()?;
        let hpbw = self.header.band.hpbw_deg;
        let known: BTreeSet<&str> = self
            .header
            .locations
            .iter()
            .map(|l| l.id.as_str())
            .collect();
        let mut seen = BTreeSet::new();
        for record in &self.records {
            if !known.contains(record.location_id.as_str()) {
                return Err(ChanError::CampaignInvariant(format!(
                    "record references unknown location `{}`",
                    record.location_id
                )));
            }
            if record.polarization != self.header.polarization {
                return Err(ChanError::CampaignInvariant(format!(
                    "record polarization differs from the header (location `{}`); \
                     co- and cross-polarized sweeps live in separate campaigns",
                    record.location_id
                )));
            }
            let key = record
                .pointing_key(hpbw)
                .ok_or_else(|| ChanError::GridViolation {
                    azimuth_deg: record.rx_azimuth.degrees(),
                    step_deg: hpbw,
                })?;
            if !record.is_reference_recapture {
                let full = (record.location_id.clone(), key);
                if !seen.insert(full) {
                    return Err(ChanError::DuplicateRecord(format!(
                        "location {} pointing {:?}",
                        record.location_id, key
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serialize to the line-delimited JSON form.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&Line::Header(self.header.clone()))?);
        out.push('\n');
        for record in &self.records {
            out.push_str(&serde_json::to_string(&Line::Record(record.clone()))?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&Line::Footer(self.footer.clone()))?);
        out.push('\n');
        Ok(out)
    }

    /// Parse and validate the line-delimited JSON form.
    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut header = None;
        let mut footer = None;
        let mut records = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line =
                serde_json::from_str(line).map_err(|e| ChanError::MalformedCampaign {
                    line: lineno + 1,
                    message: e.to_string(),
                })?;
            match parsed {
                Line::Header(h) => {
                    if header.replace(h).is_some() {
                        return Err(ChanError::MalformedCampaign {
                            line: lineno + 1,
                            message: "duplicate header line".into(),
                        });
                    }
                }
                Line::Record(r) => records.push(r),
                Line::Footer(f) => {
                    if footer.replace(f).is_some() {
                        return Err(ChanError::MalformedCampaign {
                            line: lineno + 1,
                            message: "duplicate footer line".into(),
                        });
                    }
                }
            }
        }
        let header = header.ok_or(ChanError::MalformedCampaign {
            line: 0,
            message: "missing header line".into(),
        })?;
        let footer = footer.unwrap_or_default();
        Self::new(header, records, footer)
    }

    /// Records of one location and polarization as a capture set.
    pub fn capture_set(
        &self,
        location_id: &str,
        polarization: Polarization,
    ) -> Result<DirectionalCaptureSet> {
        let records: Vec<MeasurementRecord> = self
            .records
            .iter()
            .filter(|r| r.location_id == location_id && r.polarization == polarization)
            .cloned()
            .collect();
        if records.is_empty() {
            return Err(ChanError::EmptyInput("no records for location"));
        }
        DirectionalCaptureSet::new(
            location_id.to_string(),
            polarization,
            self.header.band,
            records,
        )
    }

    pub fn location(&self, id: &str) -> Option<&LocationInfo> {
        self.header.locations.iter().find(|l| l.id == id)
    }
}

/// Save a campaign atomically (write to a temp file, then rename).
pub fn save_campaign(campaign: &CampaignFile, path: &Path) -> Result<()> {
    campaign.validate()?;
    let text = campaign.to_jsonl()?;
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(text.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Load and validate a campaign file.
pub fn load_campaign(path: &Path) -> Result<CampaignFile> {
    let text = fs::read_to_string(path)?;
    CampaignFile::from_jsonl(&text)
}

/// Thresholds that produced a report, recorded verbatim so every number is
/// reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub format_version: u32,
    pub noise_margin_db: f64,
    pub peak_window_db: f64,
    pub slt_db: f64,
    pub aod_peak_window_db: f64,
    pub aod_noise_margin_db: f64,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION,
            noise_margin_db: NOISE_MARGIN_DB,
            peak_window_db: PEAK_WINDOW_DB,
            slt_db: SLT_DB,
            aod_peak_window_db: crate::changen::AOD_PEAK_WINDOW_DB,
            aod_noise_margin_db: crate::changen::AOD_NOISE_MARGIN_DB,
        }
    }
}

/// Channel statistics of one processed location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationStats {
    pub location_id: String,
    pub distance_m: f64,
    pub environment: Environment,
    pub stats: ChannelStats,
}

/// Campaign-level CI fit over the omni path losses of one environment class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignCiFit {
    pub environment: Environment,
    pub aggregation: Aggregation,
    pub sample_count: usize,
    pub params: Option<CiParams>,
}

/// Full per-campaign statistics report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub provenance: Provenance,
    pub band: FrequencyBand,
    pub polarization: Polarization,
    pub locations: Vec<LocationStats>,
    pub ci_fits: Vec<CampaignCiFit>,
}

/// Process every location of a campaign and fit the CI model per
/// environment class over the recovered omni path losses.
pub fn build_stats_report(campaign: &CampaignFile) -> Result<StatsReport> {
    let tx_power_dbm = campaign.header.band.tx_power_dbm();
    let mut locations = Vec::new();
    for info in &campaign.header.locations {
        let set = campaign.capture_set(&info.id, campaign.header.polarization)?;
        let stats = process_capture_set(&set, tx_power_dbm)?;
        locations.push(LocationStats {
            location_id: info.id.clone(),
            distance_m: info.distance_m,
            environment: info.environment,
            stats,
        });
    }

    let mut ci_fits = Vec::new();
    for env in [Environment::Los, Environment::Nlos] {
        let samples: Vec<PathLossSample> = locations
            .iter()
            .filter(|l| l.environment == env)
            .map(|l| PathLossSample {
                distance_m: l.distance_m,
                path_loss_db: l.stats.omni_pl_db,
            })
            .collect();
        let params = if samples.len() >= 2 {
            Some(ci_fit(
                &samples,
                campaign.header.band.carrier_ghz,
                env,
                Aggregation::Omni,
            )?)
        } else {
            None
        };
        ci_fits.push(CampaignCiFit {
            environment: env,
            aggregation: Aggregation::Omni,
            sample_count: samples.len(),
            params,
        });
    }

    Ok(StatsReport {
        provenance: Provenance::default(),
        band: campaign.header.band,
        polarization: campaign.header.polarization,
        locations,
        ci_fits,
    })
}
