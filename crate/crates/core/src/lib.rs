//! Mid-band indoor radio channel toolkit.
//!
//! Four pieces fit together around a shared set of domain types:
//!
//! - [`pathloss`]: the close-in 1 m reference path-loss model with embedded
//!   campaign parameters, MMSE fitting, and shadow-fading sampling.
//! - [`sounder`]: a sliding-correlation channel sounder simulation with PN
//!   generation, time dilation, calibration, and clock-drift correction.
//! - [`measproc`]: the measurement pipeline from raw directional PDPs to
//!   omni synthesis, spatial lobes, and delay/angle spread statistics.
//! - [`changen`]: sweep planning and drop-based statistical channel
//!   generation targeting the measured statistics.
//!
//! [`campaign`] ties them together with a streamable file format and
//! reports; the `midchan` binary exposes the workflows as subcommands.
//!
//! ```
//! use midchan::changen::{drop_capture_set, generate_drop, DropConfig};
//! use midchan::measproc::process_capture_set;
//! use midchan::{Environment, FrequencyBand};
//!
//! let cfg = DropConfig {
//!     band: FrequencyBand::FR3,
//!     environment: Environment::Nlos,
//!     distance_m: Some(27.0),
//!     seed: 42,
//! };
//! let drop = generate_drop(&cfg).unwrap();
//! let set = drop_capture_set(&drop, "TX1-RX2").unwrap();
//! let stats = process_capture_set(&set, cfg.band.tx_power_dbm()).unwrap();
//! assert!((stats.omni_pl_db - drop.path_loss_db).abs() < 0.5);
//! ```

pub mod band;
pub mod campaign;
pub mod changen;
pub mod error;
pub mod measproc;
pub mod pathloss;
pub mod pdp;
pub mod record;
pub mod sounder;
pub mod tables;
pub mod units;

pub use band::{BandLabel, FrequencyBand, Polarization};
pub use error::{ChanError, Result};
pub use pdp::PowerDelayProfile;
pub use record::MeasurementRecord;
pub use tables::{Aggregation, Environment};
pub use units::Azimuth;
