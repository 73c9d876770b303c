//! Sliding-correlation receiver model.
//!
//! The receiver correlates against a replica PN clocked slightly slower than
//! the transmit sequence, so the two slide past one another and trace out the
//! channel correlation on a time axis dilated by `fast / (fast - slow)`. The
//! simulation computes that correlation profile directly, one lag per slow
//! sweep step, and presents it on the dilated axis; `undilate` compresses it
//! back to absolute delay.
//!
//! Samples run at two per chip, giving 1 ns delay bins at 500 Mcps.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ChanError, Result};
use crate::pdp::PowerDelayProfile;
use crate::units::{db_to_linear, mw_to_dbm, MIN_POWER_DBM};

use super::pn::PnSequence;

/// Samples per chip in the baseband simulation (half-chip sampling).
pub const SAMPLES_PER_CHIP: usize = 2;

/// Chip rates of the transmit and receive PN generators, in Mcps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorConfig {
    pub fast_rate_mcps: f64,
    pub slow_rate_mcps: f64,
    /// Instantaneous PDPs averaged per capture.
    pub pdp_averages: usize,
}

impl Default for CorrelatorConfig {
    fn default() -> Self {
        // 500 vs 499.9375 Mcps: slide factor 8000, 20-PDP averaging
        Self {
            fast_rate_mcps: 500.0,
            slow_rate_mcps: 499.9375,
            pdp_averages: 20,
        }
    }
}

impl CorrelatorConfig {
    /// Time-dilation (slide) factor `fast / (fast - slow)`.
    pub fn slide_factor(&self) -> Result<f64> {
        dilation_factor(self)
    }

    /// Delay-bin width after undilation, in ns.
    pub fn bin_width_ns(&self) -> f64 {
        1e3 / self.fast_rate_mcps / SAMPLES_PER_CHIP as f64
    }
}

/// Slide factor of a correlator config; errors when the receive clock is not
/// strictly slower.
pub fn dilation_factor(cfg: &CorrelatorConfig) -> Result<f64> {
    if !(cfg.slow_rate_mcps < cfg.fast_rate_mcps) || !(cfg.slow_rate_mcps > 0.0) {
        return Err(ChanError::InvalidChipRates {
            fast: cfg.fast_rate_mcps,
            slow: cfg.slow_rate_mcps,
        });
    }
    Ok(cfg.fast_rate_mcps / (cfg.fast_rate_mcps - cfg.slow_rate_mcps))
}

/// One discrete propagation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelTap {
    pub delay_ns: f64,
    /// Received power of this path in dBm (after antennas, before the RF chain).
    pub gain_db: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

/// Complex-baseband received samples: delayed, scaled sequence replicas plus
/// white Gaussian noise at `snr_db` relative to the strongest tap
/// (`f64::INFINITY` disables noise). Tap delays are quantized to the
/// half-chip sample grid and wrap circularly over the sequence period.
pub fn channel_convolve<R: Rng + ?Sized>(
    pn: &PnSequence,
    taps: &[ChannelTap],
    snr_db: f64,
    rng: &mut R,
) -> Result<Vec<Complex<f64>>> {
    if taps.is_empty() {
        return Err(ChanError::EmptyTapList);
    }
    let sample_period_ns = pn.chip_period_ns() / SAMPLES_PER_CHIP as f64;
    let base = pn.upsampled(SAMPLES_PER_CHIP);
    let n = base.len();
    let mut rx = vec![Complex::new(0.0, 0.0); n];
    let mut peak_power_mw: f64 = 0.0;
    for tap in taps {
        if tap.delay_ns < 0.0 {
            return Err(ChanError::NegativeTapDelay(tap.delay_ns));
        }
        let power_mw = db_to_linear(tap.gain_db);
        peak_power_mw = peak_power_mw.max(power_mw);
        let coeff = Complex::from_polar(power_mw.sqrt(), tap.phase_rad);
        let shift = (tap.delay_ns / sample_period_ns).round() as usize % n;
        for (i, sample) in rx.iter_mut().enumerate() {
            let src = (i + n - shift) % n;
            *sample += coeff * base[src];
        }
    }
    if snr_db.is_finite() {
        let noise_power = peak_power_mw / db_to_linear(snr_db);
        let per_component = Normal::new(0.0, (noise_power / 2.0).sqrt())
            .map_err(|e| ChanError::InvalidConfig(format!("noise distribution: {e}")))?;
        for sample in &mut rx {
            *sample += Complex::new(per_component.sample(rng), per_component.sample(rng));
        }
    }
    Ok(rx)
}

/// Correlator output before time-axis compression: per-lag power on the
/// dilated (wall-clock) time axis.
#[derive(Debug, Clone)]
pub struct DilatedPdp {
    powers_mw: Vec<f64>,
    sample_period_ns: f64,
    slide_factor: f64,
    noise_floor_dbm: f64,
}

impl DilatedPdp {
    pub fn powers_mw(&self) -> &[f64] {
        &self.powers_mw
    }

    /// Dilated time of lag bin `i` in microseconds of receiver wall time.
    pub fn dilated_time_us(&self, i: usize) -> f64 {
        i as f64 * self.sample_period_ns * self.slide_factor * 1e-3
    }

    pub fn slide_factor(&self) -> f64 {
        self.slide_factor
    }

    /// Compress the dilated axis by the slide factor, yielding a PDP on an
    /// absolute delay grid starting at zero.
    pub fn undilate(&self) -> PowerDelayProfile {
        PowerDelayProfile::new(
            0.0,
            self.sample_period_ns,
            self.powers_mw.clone(),
            self.noise_floor_dbm,
        )
        .expect("correlator output is a valid profile")
    }
}

/// Correlate received samples against the reference PN over one full slide
/// sweep. Output bin `k` is `|(1/N) sum_n rx[n] conj(s[n-k])|^2`.
pub fn sliding_correlate(
    rx: &[Complex<f64>],
    pn: &PnSequence,
    cfg: &CorrelatorConfig,
) -> Result<DilatedPdp> {
    let slide = dilation_factor(cfg)?;
    if (pn.chip_rate_mcps() - cfg.fast_rate_mcps).abs() > 1e-9 {
        return Err(ChanError::ChipRateMismatch {
            pn: pn.chip_rate_mcps(),
            cfg: cfg.fast_rate_mcps,
        });
    }
    let n = pn.len() * SAMPLES_PER_CHIP;
    if rx.len() != n {
        return Err(ChanError::InvalidConfig(format!(
            "received block has {} samples, expected {n}",
            rx.len()
        )));
    }
    let corr = circular_cross_correlation(rx, &pn.upsampled(SAMPLES_PER_CHIP));
    let scale = 1.0 / n as f64;
    let powers = corr.iter().map(|c| (c * scale).norm_sqr()).collect();
    Ok(DilatedPdp {
        powers_mw: powers,
        sample_period_ns: pn.chip_period_ns() / SAMPLES_PER_CHIP as f64,
        slide_factor: slide,
        noise_floor_dbm: MIN_POWER_DBM,
    })
}

/// Full capture: convolve, correlate, and average `cfg.pdp_averages`
/// instantaneous PDPs with independent noise.
pub fn capture_pdp<R: Rng + ?Sized>(
    pn: &PnSequence,
    taps: &[ChannelTap],
    snr_db: f64,
    cfg: &CorrelatorConfig,
    rng: &mut R,
) -> Result<PowerDelayProfile> {
    let averages = cfg.pdp_averages.max(1);
    let n = pn.len() * SAMPLES_PER_CHIP;
    let mut acc = vec![0.0f64; n];
    let mut slide_ok = None;
    for _ in 0..averages {
        let rx = channel_convolve(pn, taps, snr_db, rng)?;
        let dilated = sliding_correlate(&rx, pn, cfg)?;
        slide_ok.get_or_insert(dilated.slide_factor());
        for (a, p) in acc.iter_mut().zip(dilated.powers_mw()) {
            *a += p / averages as f64;
        }
    }
    // Per-bin correlator noise power is the sample noise divided by the
    // integration length; stamp it as the known floor.
    let floor_dbm = if snr_db.is_finite() {
        let peak_mw = taps
            .iter()
            .map(|t| db_to_linear(t.gain_db))
            .fold(0.0f64, f64::max);
        mw_to_dbm(peak_mw / db_to_linear(snr_db) / n as f64)
    } else {
        MIN_POWER_DBM
    };
    let sample_period_ns = pn.chip_period_ns() / SAMPLES_PER_CHIP as f64;
    PowerDelayProfile::new(0.0, sample_period_ns, acc, floor_dbm)
}

fn circular_cross_correlation(rx: &[Complex<f64>], reference: &[f64]) -> Vec<Complex<f64>> {
    let n = rx.len();
    debug_assert_eq!(reference.len(), n);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut rx_f: Vec<Complex<f64>> = rx.to_vec();
    fft.process(&mut rx_f);
    let mut ref_f: Vec<Complex<f64>> = reference.iter().map(|&s| Complex::new(s, 0.0)).collect();
    fft.process(&mut ref_f);

    let mut prod: Vec<Complex<f64>> = rx_f
        .iter()
        .zip(ref_f.iter())
        .map(|(a, b)| a * b.conj())
        .collect();
    ifft.process(&mut prod);
    // rustfft leaves the inverse unnormalized
    let scale = 1.0 / n as f64;
    for c in &mut prod {
        *c *= scale;
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn pn11() -> PnSequence {
        PnSequence::max_length(11, 500.0).unwrap()
    }

    #[test]
    fn dilation_factor_anchors() {
        let cfg = CorrelatorConfig::default();
        assert_eq!(dilation_factor(&cfg).unwrap(), 8000.0);
        let cfg = CorrelatorConfig {
            fast_rate_mcps: 500.0,
            slow_rate_mcps: 250.0,
            pdp_averages: 1,
        };
        assert_eq!(dilation_factor(&cfg).unwrap(), 2.0);
        let cfg = CorrelatorConfig {
            fast_rate_mcps: 500.0,
            slow_rate_mcps: 500.0,
            pdp_averages: 1,
        };
        assert!(dilation_factor(&cfg).is_err());
    }

    #[test]
    fn single_tap_at_zero_is_scaled_input() {
        let pn = pn11();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let taps = [ChannelTap {
            delay_ns: 0.0,
            gain_db: -20.0,
            phase_rad: 0.0,
        }];
        let rx = channel_convolve(&pn, &taps, f64::INFINITY, &mut rng).unwrap();
        let amp = db_to_linear(-20.0).sqrt();
        let base = pn.upsampled(SAMPLES_PER_CHIP);
        for (s, b) in rx.iter().zip(base.iter()) {
            assert!((s.re - amp * b).abs() < 1e-12);
            assert!(s.im.abs() < 1e-12);
        }
    }

    #[test]
    fn empty_taps_rejected() {
        let pn = pn11();
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        assert!(matches!(
            channel_convolve(&pn, &[], 30.0, &mut rng),
            Err(ChanError::EmptyTapList)
        ));
    }

    #[test]
    fn impulse_at_zero_peaks_at_bin_zero() {
        let pn = pn11();
        let cfg = CorrelatorConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let taps = [ChannelTap {
            delay_ns: 0.0,
            gain_db: -30.0,
            phase_rad: 0.4,
        }];
        let rx = channel_convolve(&pn, &taps, f64::INFINITY, &mut rng).unwrap();
        let pdp = sliding_correlate(&rx, &pn, &cfg).unwrap().undilate();
        assert_eq!(pdp.peak().0, 0);
        assert!((mw_to_dbm(pdp.peak().1) - -30.0).abs() < 0.01);
    }

    #[test]
    fn impulse_at_100ns_lands_at_800us_dilated() {
        let pn = pn11();
        let cfg = CorrelatorConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let taps = [ChannelTap {
            delay_ns: 100.0,
            gain_db: -30.0,
            phase_rad: 0.0,
        }];
        let rx = channel_convolve(&pn, &taps, 40.0, &mut rng).unwrap();
        let dilated = sliding_correlate(&rx, &pn, &cfg).unwrap();
        let peak_bin = dilated
            .powers_mw()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!((dilated.dilated_time_us(peak_bin) - 800.0).abs() < 8.0);
        let pdp = dilated.undilate();
        assert!((pdp.delay_ns(peak_bin) - 100.0).abs() <= 1.0);
    }

    #[test]
    fn recovered_delay_within_half_chip_at_40db() {
        let pn = pn11();
        let cfg = CorrelatorConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let true_delay = 36.69; // 11 m
        let taps = [ChannelTap {
            delay_ns: true_delay,
            gain_db: -60.0,
            phase_rad: 1.1,
        }];
        let pdp = capture_pdp(&pn, &taps, 40.0, &cfg, &mut rng).unwrap();
        let (peak_bin, _) = pdp.peak();
        assert!((pdp.delay_ns(peak_bin) - true_delay).abs() <= 1.0);
    }

    #[test]
    fn two_taps_keep_their_power_ratio() {
        let pn = pn11();
        let cfg = CorrelatorConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let taps = [
            ChannelTap {
                delay_ns: 20.0,
                gain_db: -40.0,
                phase_rad: 0.0,
            },
            ChannelTap {
                delay_ns: 180.0,
                gain_db: -60.0,
                phase_rad: 2.0,
            },
        ];
        let pdp = capture_pdp(&pn, &taps, 60.0, &cfg, &mut rng).unwrap();
        let p1 = pdp.powers_mw()[20];
        let p2 = pdp.powers_mw()[180];
        let ratio_db = 10.0 * (p1 / p2).log10();
        assert!((ratio_db - 20.0).abs() < 0.5, "ratio {ratio_db} dB");
    }

    #[test]
    fn processing_gain_matches_integration_length() {
        // correlation averages noise over N samples: output floor = sigma^2/N
        let pn = pn11();
        let cfg = CorrelatorConfig {
            pdp_averages: 50,
            ..CorrelatorConfig::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let taps = [ChannelTap {
            delay_ns: 50.0,
            gain_db: -50.0,
            phase_rad: 0.0,
        }];
        let snr_db = 10.0;
        let pdp = capture_pdp(&pn, &taps, snr_db, &cfg, &mut rng).unwrap();
        let n = (pn.len() * SAMPLES_PER_CHIP) as f64;
        // measured floor: median of bins away from the peak
        let mut noise: Vec<f64> = pdp
            .powers_mw()
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as i64 - 50).abs() > 10)
            .map(|(_, &p)| p)
            .collect();
        noise.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let measured_floor = noise[noise.len() / 2];
        let expected_floor = db_to_linear(-50.0 - snr_db) / n;
        let err_db = 10.0 * (measured_floor / expected_floor).log10();
        assert!(err_db.abs() < 1.0, "floor off by {err_db} dB");
        assert!((pdp.noise_floor_dbm() - mw_to_dbm(expected_floor)).abs() < 1e-9);
    }

    #[test]
    fn noise_only_false_alarm_rate() {
        // with 20-PDP averaging no bin should exceed the floor by 10 dB
        let pn = PnSequence::max_length(9, 500.0).unwrap();
        let cfg = CorrelatorConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let taps = [ChannelTap {
            delay_ns: 0.0,
            gain_db: -300.0, // vanishing signal: noise-only input
            phase_rad: 0.0,
        }];
        let mut passes = 0;
        let trials = 1000;
        for _ in 0..trials {
            let pdp = capture_pdp(&pn, &taps, -250.0, &cfg, &mut rng).unwrap();
            let mut sorted: Vec<f64> = pdp.powers_mw().to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let floor = sorted[sorted.len() / 2];
            let max = *sorted.last().unwrap();
            if max < floor * db_to_linear(10.0) {
                passes += 1;
            }
        }
        assert!(
            passes >= trials * 99 / 100,
            "{passes}/{trials} trials passed"
        );
    }

    #[test]
    fn correlate_rejects_rate_mismatch() {
        let pn = PnSequence::max_length(9, 400.0).unwrap();
        let cfg = CorrelatorConfig::default();
        let rx = vec![Complex::new(0.0, 0.0); pn.len() * SAMPLES_PER_CHIP];
        assert!(matches!(
            sliding_correlate(&rx, &pn, &cfg),
            Err(ChanError::ChipRateMismatch { .. })
        ));
    }
}
