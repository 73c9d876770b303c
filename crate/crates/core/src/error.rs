use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants are grouped by origin: input validation (bad arguments, malformed
/// files, invariant violations) and computation failures (degenerate data that
/// makes a result undefined). The CLI maps these groups to distinct exit codes.
#[derive(Debug, Error)]
pub enum ChanError {
    // --- validation ---
    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("carrier frequency must be positive, got {0} GHz")]
    NonPositiveFrequency(f64),
    #[error("shadow-fading sigma must be nonnegative, got {0} dB")]
    NegativeSigma(f64),
    #[error("distance {0} m is below the 1 m reference distance")]
    BelowReferenceDistance(f64),
    #[error("invalid PDP: {0}")]
    InvalidPdp(String),
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("360 is not an integer multiple of HPBW {0} deg")]
    HpbwNotDivisor(f64),
    #[error("invalid LFSR taps: {0}")]
    InvalidTaps(String),
    #[error("taps are not primitive: order {order} gives period {period}, expected {expected}")]
    NonPrimitiveTaps {
        order: u32,
        period: u64,
        expected: u64,
    },
    #[error("slow chip rate {slow} Mcps must be below fast rate {fast} Mcps")]
    InvalidChipRates { fast: f64, slow: f64 },
    #[error("PN chip rate {pn} Mcps does not match correlator fast rate {cfg} Mcps")]
    ChipRateMismatch { pn: f64, cfg: f64 },
    #[error("channel tap list is empty")]
    EmptyTapList,
    #[error("tap delay must be nonnegative, got {0} ns")]
    NegativeTapDelay(f64),
    #[error("capture events are not ordered by wall time")]
    UnorderedEvents,
    #[error("schedule is missing a reference-MPC recapture after a sweep")]
    MissingRecapture,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("duplicate pointing tuple in capture set: {0}")]
    DuplicatePointing(String),
    #[error("azimuth {azimuth_deg} deg is not on the {step_deg} deg grid")]
    GridViolation { azimuth_deg: f64, step_deg: f64 },
    #[error("unsupported parameter tuple: {freq_ghz} GHz / {env} / {aggregation}")]
    UnknownParams {
        freq_ghz: f64,
        env: String,
        aggregation: String,
    },
    #[error("campaign format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("record band/grid mismatch: {0}")]
    CampaignInvariant(String),
    #[error("duplicate record: {0}")]
    DuplicateRecord(String),
    #[error("malformed campaign file at line {line}: {message}")]
    MalformedCampaign { line: usize, message: String },
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),

    // --- computation ---
    #[error("fit is degenerate: all sample distances are at the 1 m reference")]
    DegenerateFit,
    #[error("maximum path loss {max_pl_db} dB is below the 1 m FSPL {fspl_db} dB")]
    MarginBelowFspl { max_pl_db: f64, fspl_db: f64 },
    #[error("PDP has only {leading} leading noise bins, need at least {required}")]
    PdpTooShort { leading: usize, required: usize },
    #[error("no PDP bin survives the threshold")]
    EmptyAfterThreshold,
    #[error("no peak found above the noise threshold")]
    NoPeak,
    #[error("multiple comparable peaks in calibration PDP (reflection contamination)")]
    MultiplePeaks,
    #[error("total power is zero")]
    ZeroTotalPower,
    #[error("capture PDPs are on inconsistent delay-bin grids")]
    InconsistentBinGrids,
    #[error("incomplete azimuth coverage: direction index {0} has no capture")]
    IncompleteAzimuthCoverage(usize),
    #[error("delay shift of {shift_ns} ns would move the PDP start below zero")]
    NegativeDelayShift { shift_ns: f64 },

    // --- passthrough ---
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ChanError {
    /// True for errors caused by invalid inputs rather than degenerate data.
    pub fn is_validation(&self) -> bool {
        use ChanError::*;
        !matches!(
            self,
            DegenerateFit
                | MarginBelowFspl { .. }
                | PdpTooShort { .. }
                | EmptyAfterThreshold
                | NoPeak
                | MultiplePeaks
                | ZeroTotalPower
                | InconsistentBinGrids
                | IncompleteAzimuthCoverage(_)
                | NegativeDelayShift { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ChanError>;
