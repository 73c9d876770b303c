//! Browser bindings for the channel toolkit.
//!
//! Three interactive operations, each returning a JSON string the page
//! renders onto canvases: the CI path-loss explorer, the statistical drop
//! generator, and a sliding-correlator sounder capture. All randomness is
//! seeded, so the page is fully reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

use midchan::band::FrequencyBand;
use midchan::changen::{generate_drop, DropConfig};
use midchan::pathloss::{ci_predict, fspl_1m, sample_shadowing, table3_params};
use midchan::sounder::{capture_pdp, ChannelTap, CorrelatorConfig, PnSequence};
use midchan::tables::{Aggregation, Environment};
use midchan::units::mw_to_dbm;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_env(name: &str) -> Result<Environment, String> {
    Environment::parse(name).ok_or_else(|| format!("unknown environment `{name}`"))
}

fn parse_agg(name: &str) -> Result<Aggregation, String> {
    Aggregation::parse(name).ok_or_else(|| format!("unknown aggregation `{name}`"))
}

#[derive(Serialize)]
struct CurveOut {
    n: f64,
    sigma_db: f64,
    fspl_1m_db: f64,
    curve: Vec<(f64, f64)>,
    scatter: Vec<(f64, f64)>,
}

/// CI path-loss curve with shadow-fading scatter for one embedded parameter
/// row: `(freq_ghz, env, aggregation)` must exist in the campaign tables.
#[wasm_bindgen]
pub fn path_loss_curve(
    freq_ghz: f64,
    env: &str,
    aggregation: &str,
    max_distance_m: f64,
    scatter_points: usize,
    seed: u32,
) -> Result<String, JsValue> {
    path_loss_curve_impl(
        freq_ghz,
        env,
        aggregation,
        max_distance_m,
        scatter_points,
        seed,
    )
    .map_err(|e| JsValue::from_str(&e))
}

fn path_loss_curve_impl(
    freq_ghz: f64,
    env: &str,
    aggregation: &str,
    max_distance_m: f64,
    scatter_points: usize,
    seed: u32,
) -> Result<String, String> {
    let params = table3_params(freq_ghz, parse_env(env)?, parse_agg(aggregation)?).map_err(err)?;
    let max_d = max_distance_m.clamp(2.0, 10_000.0);
    let mut curve = Vec::with_capacity(201);
    for i in 0..=200 {
        // log-spaced distances from 1 m to max
        let d = 10f64.powf((max_d.log10()) * i as f64 / 200.0);
        let pl = ci_predict(&params, d, 0.0).map_err(err)?;
        curve.push((d, pl));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed as u64);
    let mut scatter = Vec::with_capacity(scatter_points.min(2000));
    for i in 0..scatter_points.min(2000) {
        let d = 10f64.powf(max_d.log10() * (i as f64 + 0.5) / scatter_points.min(2000) as f64);
        let chi = sample_shadowing(params.sigma_db, &mut rng).map_err(err)?;
        scatter.push((d, ci_predict(&params, d, chi).map_err(err)?));
    }
    let out = CurveOut {
        n: params.n,
        sigma_db: params.sigma_db,
        fspl_1m_db: fspl_1m(freq_ghz).map_err(err)?,
        curve,
        scatter,
    };
    serde_json::to_string(&out).map_err(err)
}

#[derive(Serialize)]
struct DropOut {
    distance_m: f64,
    path_loss_db: f64,
    shadowing_db: f64,
    pdp_delays_ns: Vec<f64>,
    pdp_powers_dbm: Vec<f64>,
    pas_step_deg: f64,
    pas_powers_db_rel: Vec<f64>,
    lobe_count: usize,
    realized_rms_ds_ns: f64,
    realized_asa_deg: f64,
    target_rms_ds_ns: f64,
    target_asa_deg: f64,
}

/// Generate one synthetic channel drop and return its omni PDP, AOA
/// spectrum, and realized statistics.
#[wasm_bindgen]
pub fn synth_drop(band: &str, env: &str, distance_m: f64, seed: u32) -> Result<String, JsValue> {
    synth_drop_impl(band, env, distance_m, seed).map_err(|e| JsValue::from_str(&e))
}

fn synth_drop_impl(band: &str, env: &str, distance_m: f64, seed: u32) -> Result<String, String> {
    let band = FrequencyBand::parse(band).map_err(err)?;
    let cfg = DropConfig {
        band,
        environment: parse_env(env)?,
        distance_m: if distance_m > 0.0 {
            Some(distance_m)
        } else {
            None
        },
        seed: seed as u64,
    };
    let drop = generate_drop(&cfg).map_err(err)?;
    let pas_peak = drop.aoa_pas.peak().1;
    let out = DropOut {
        distance_m: drop.distance_m,
        path_loss_db: drop.path_loss_db,
        shadowing_db: drop.shadowing_db,
        pdp_delays_ns: drop.omni_pdp.delays().collect(),
        pdp_powers_dbm: drop
            .omni_pdp
            .powers_mw()
            .iter()
            .map(|&p| mw_to_dbm(p))
            .collect(),
        pas_step_deg: drop.aoa_pas.step_deg,
        pas_powers_db_rel: drop
            .aoa_pas
            .powers_mw
            .iter()
            .map(|&p| 10.0 * (p / pas_peak).max(1e-12).log10())
            .collect(),
        lobe_count: drop.lobes.len(),
        realized_rms_ds_ns: drop.realized.omni_rms_ds_ns,
        realized_asa_deg: drop.realized.omni_asa_deg,
        target_rms_ds_ns: drop.target.omni_rms_ds_ns,
        target_asa_deg: drop.target.omni_asa_deg,
    };
    serde_json::to_string(&out).map_err(err)
}

#[derive(Serialize)]
struct CaptureOut {
    delays_ns: Vec<f64>,
    powers_dbm: Vec<f64>,
    noise_floor_dbm: f64,
    taps: Vec<(f64, f64)>,
    recovered_peak_ns: f64,
    slide_factor: f64,
}

/// Run one sounder capture over a comma-separated tap list and return the
/// averaged, undilated PDP.
#[wasm_bindgen]
pub fn sounder_capture(
    tap_delays_ns: &str,
    tap_gains_db: &str,
    snr_db: f64,
    seed: u32,
) -> Result<String, JsValue> {
    sounder_capture_impl(tap_delays_ns, tap_gains_db, snr_db, seed)
        .map_err(|e| JsValue::from_str(&e))
}

fn sounder_capture_impl(
    tap_delays_ns: &str,
    tap_gains_db: &str,
    snr_db: f64,
    seed: u32,
) -> Result<String, String> {
    let delays: Vec<f64> = tap_delays_ns
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| err(format!("tap delays: {e}")))?;
    let gains: Vec<f64> = tap_gains_db
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| err(format!("tap gains: {e}")))?;
    if delays.len() != gains.len() {
        return Err("tap delay and gain lists differ in length".to_string());
    }
    let taps: Vec<ChannelTap> = delays
        .iter()
        .zip(gains.iter())
        .enumerate()
        .map(|(i, (&delay_ns, &gain_db))| ChannelTap {
            delay_ns,
            gain_db,
            phase_rad: i as f64,
        })
        .collect();
    // order 10 keeps the browser round-trip light (2046 bins)
    let cfg = CorrelatorConfig::default();
    let pn = PnSequence::max_length(10, cfg.fast_rate_mcps).map_err(err)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed as u64);
    let pdp = capture_pdp(&pn, &taps, snr_db, &cfg, &mut rng).map_err(err)?;
    let (peak_bin, _) = pdp.peak();
    let out = CaptureOut {
        delays_ns: pdp.delays().collect(),
        powers_dbm: pdp.powers_mw().iter().map(|&p| mw_to_dbm(p)).collect(),
        noise_floor_dbm: pdp.noise_floor_dbm(),
        taps: delays.into_iter().zip(gains).collect(),
        recovered_peak_ns: pdp.delay_ns(peak_bin),
        slide_factor: cfg.slide_factor().map_err(err)?,
    };
    serde_json::to_string(&out).map_err(err)
}
