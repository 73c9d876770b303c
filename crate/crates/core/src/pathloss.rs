//! Close-in free-space-reference path-loss model.
//!
//! `PL(fc, d) = FSPL(fc, 1 m) + 10 n log10(d / 1 m) + X_sigma`, with the
//! FSPL anchor `32.4 + 20 log10(fc / 1 GHz)` dB. The model has a single free
//! slope parameter `n`; the fit is anchored through the 1 m intercept, and
//! sigma is the RMS of the fit residuals.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::tables::{self, Aggregation, Environment};

/// CI reference distance, fixed at 1 m.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// CI model parameters for one (carrier, environment, aggregation) tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiParams {
    pub carrier_ghz: f64,
    pub environment: Environment,
    pub aggregation: Aggregation,
    /// Path-loss exponent.
    pub n: f64,
    /// Shadow-fading standard deviation in dB.
    pub sigma_db: f64,
}

impl CiParams {
    pub fn new(
        carrier_ghz: f64,
        environment: Environment,
        aggregation: Aggregation,
        n: f64,
        sigma_db: f64,
    ) -> Result<Self> {
        if !(carrier_ghz > 0.0) {
            return Err(ChanError::NonPositiveFrequency(carrier_ghz));
        }
        if !(n > 0.0) {
            return Err(ChanError::InvalidConfig(format!(
                "path-loss exponent must be positive, got {n}"
            )));
        }
        if !(sigma_db >= 0.0) {
            return Err(ChanError::NegativeSigma(sigma_db));
        }
        Ok(Self {
            carrier_ghz,
            environment,
            aggregation,
            n,
            sigma_db,
        })
    }
}

/// One measured path-loss sample at a given T-R separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossSample {
    pub distance_m: f64,
    pub path_loss_db: f64,
}

/// Free-space path loss at the 1 m reference distance, in dB.
pub fn fspl_1m(carrier_ghz: f64) -> Result<f64> {
    if !(carrier_ghz > 0.0) {
        return Err(ChanError::NonPositiveFrequency(carrier_ghz));
    }
    Ok(32.4 + 20.0 * carrier_ghz.log10())
}

/// Evaluate the CI model at `distance_m` with an explicit shadowing term.
pub fn ci_predict(params: &CiParams, distance_m: f64, shadowing_db: f64) -> Result<f64> {
    if distance_m < REFERENCE_DISTANCE_M {
        return Err(ChanError::BelowReferenceDistance(distance_m));
    }
    let fspl = fspl_1m(params.carrier_ghz)?;
    Ok(fspl + 10.0 * params.n * (distance_m / REFERENCE_DISTANCE_M).log10() + shadowing_db)
}

/// Fit the CI model to path-loss samples.
///
/// Closed-form least squares through the 1 m FSPL anchor:
/// `n = sum((PL_i - FSPL) * D_i) / sum(D_i^2)` with `D_i = 10 log10(d_i)`,
/// and `sigma` the RMS of the residuals (no Bessel correction).
pub fn ci_fit(
    samples: &[PathLossSample],
    carrier_ghz: f64,
    environment: Environment,
    aggregation: Aggregation,
) -> Result<CiParams> {
    if samples.is_empty() {
        return Err(ChanError::EmptyInput("path-loss samples"));
    }
    let fspl = fspl_1m(carrier_ghz)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for s in samples {
        if s.distance_m < REFERENCE_DISTANCE_M {
            return Err(ChanError::BelowReferenceDistance(s.distance_m));
        }
        let d10 = 10.0 * s.distance_m.log10();
        num += (s.path_loss_db - fspl) * d10;
        den += d10 * d10;
    }
    if den == 0.0 {
        return Err(ChanError::DegenerateFit);
    }
    let n = num / den;
    let mse = samples
        .iter()
        .map(|s| {
            let r = s.path_loss_db - fspl - n * 10.0 * s.distance_m.log10();
            r * r
        })
        .sum::<f64>()
        / samples.len() as f64;
    CiParams::new(carrier_ghz, environment, aggregation, n, mse.sqrt())
}

/// Draw a zero-mean Gaussian shadow-fading value with s.d. `sigma_db`.
pub fn sample_shadowing<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> Result<f64> {
    if !(sigma_db >= 0.0) {
        return Err(ChanError::NegativeSigma(sigma_db));
    }
    if sigma_db == 0.0 {
        return Ok(0.0);
    }
    let normal = Normal::new(0.0, sigma_db)
        .map_err(|e| ChanError::InvalidConfig(format!("shadowing distribution: {e}")))?;
    Ok(normal.sample(rng))
}

/// Largest distance at which the median CI path loss stays within
/// `max_path_loss_db`: the algebraic inverse of `ci_predict` at zero
/// shadowing.
pub fn max_range_m(params: &CiParams, max_path_loss_db: f64) -> Result<f64> {
    let fspl = fspl_1m(params.carrier_ghz)?;
    if max_path_loss_db < fspl {
        return Err(ChanError::MarginBelowFspl {
            max_pl_db: max_path_loss_db,
            fspl_db: fspl,
        });
    }
    Ok(10f64.powf((max_path_loss_db - fspl) / (10.0 * params.n)))
}

/// Embedded CI parameters for a measured or reference campaign, exactly as
/// printed.
pub fn table3_params(
    carrier_ghz: f64,
    environment: Environment,
    aggregation: Aggregation,
) -> Result<CiParams> {
    let entry = tables::ci_lookup(carrier_ghz, environment, aggregation).ok_or_else(|| {
        ChanError::UnknownParams {
            freq_ghz: carrier_ghz,
            env: environment.to_string(),
            aggregation: aggregation.to_string(),
        }
    })?;
    CiParams::new(
        carrier_ghz,
        environment,
        aggregation,
        entry.n,
        entry.sigma_db,
    )
}
