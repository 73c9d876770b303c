//! Command-line interface for the mid-band indoor channel toolkit.
//!
//! Exit codes: 0 success, 2 usage errors, 3 input validation failures,
//! 4 computation failures on degenerate data.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use midchan::band::{FrequencyBand, Polarization};
use midchan::campaign::{
    build_stats_report, load_campaign, save_campaign, CalibrationLog, CampaignFile, CampaignHeader,
    DriftLogEntry, LocationInfo,
};
use midchan::changen::{drop_capture_set, ensemble_stats, generate_drop, plan_sweeps, DropConfig};
use midchan::error::ChanError;
use midchan::measproc::{build_pas, synthesize_omni_pdp, PasSide};
use midchan::pathloss::{ci_fit, table3_params, PathLossSample};
use midchan::sounder::{drift_correct, simulate_schedule, SounderScenario};
use midchan::tables::{xpd_db, Aggregation, Environment, CI_PARAMS, OMNI_ASA_MEANS, RMS_DS_MEANS};
use midchan::units::mw_to_dbm;

/// Environment variable naming the default output directory for relative
/// `--out` paths.
const OUT_DIR_ENV: &str = "MIDCHAN_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "midchan",
    about = "Mid-band indoor channel toolkit: CI path loss, sounder simulation, measurement processing, drop generation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the CI path-loss model to samples
    Fit(FitArgs),
    /// Process a campaign into per-location channel statistics
    Stats(StatsArgs),
    /// Synthesize the omni PDP of one location as CSV
    SynthOmni(SynthOmniArgs),
    /// Print the five-sweep elevation schedule of a band
    SweepPlan(SweepPlanArgs),
    /// Simulate the sliding-correlator sounder over a scenario
    SimulateSounder(SimulateArgs),
    /// Generate synthetic channel drops and an ensemble summary
    Generate(GenerateArgs),
    /// Export the embedded campaign parameter tables as JSON
    ExportParams(ExportArgs),
}

#[derive(Args)]
struct FitArgs {
    /// JSON file: array of {"distance_m": .., "path_loss_db": ..}
    #[arg(long)]
    input: PathBuf,
    /// Carrier frequency in GHz
    #[arg(long)]
    freq: f64,
    #[arg(long, default_value = "NLOS")]
    env: String,
    #[arg(long, default_value = "omni")]
    agg: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    campaign: PathBuf,
    /// Directory for per-location PAS CSV exports
    #[arg(long)]
    pas_csv_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthOmniArgs {
    #[arg(long)]
    campaign: PathBuf,
    #[arg(long)]
    location: String,
    #[arg(long, default_value = "VV")]
    polarization: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepPlanArgs {
    /// FR1C or FR3
    #[arg(long)]
    band: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario config JSON
    #[arg(long)]
    scenario: PathBuf,
    /// Apply successive drift correction before writing the campaign
    #[arg(long)]
    correct_drift: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    band: String,
    #[arg(long)]
    env: String,
    /// Number of drops
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed T-R separation in meters (sampled over 11..97 m when omitted)
    #[arg(long)]
    distance: Option<f64>,
    /// Write the drops as a campaign file for pipeline reuse
    #[arg(long)]
    out_campaign: Option<PathBuf>,
    /// Ensemble summary output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    freq: Option<f64>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    agg: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                ExitCode::from(3)
            } else {
                ExitCode::from(4)
            }
        }
    }
}

fn run(cli: Cli) -> midchan::Result<()> {
    match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Stats(args) => cmd_stats(args),
        Command::SynthOmni(args) => cmd_synth_omni(args),
        Command::SweepPlan(args) => cmd_sweep_plan(args),
        Command::SimulateSounder(args) => cmd_simulate(args),
        Command::Generate(args) => cmd_generate(args),
        Command::ExportParams(args) => cmd_export(args),
    }
}

fn parse_env(name: &str) -> midchan::Result<Environment> {
    Environment::parse(name)
        .ok_or_else(|| ChanError::InvalidConfig(format!("unknown environment `{name}`")))
}

fn parse_agg(name: &str) -> midchan::Result<Aggregation> {
    Aggregation::parse(name)
        .ok_or_else(|| ChanError::InvalidConfig(format!("unknown aggregation `{name}`")))
}

fn parse_polarization(name: &str) -> midchan::Result<Polarization> {
    match name.to_ascii_uppercase().as_str() {
        "VV" | "V-V" => Ok(Polarization::Vv),
        "VH" | "V-H" => Ok(Polarization::Vh),
        other => Err(ChanError::InvalidConfig(format!(
            "unknown polarization `{other}`"
        ))),
    }
}

/// Resolve an output path: relative paths are joined onto `MIDCHAN_OUT_DIR`
/// when the variable is set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

/// Write to `--out` (atomically) or stdout.
fn emit(out: Option<&Path>, content: &str) -> midchan::Result<()> {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            let tmp = path.with_extension("tmp");
            {
                let mut file = fs::File::create(&tmp)?;
                file.write_all(content.as_bytes())?;
                file.sync_all()?;
            }
            fs::rename(&tmp, &path)?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            if !content.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> midchan::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn cmd_fit(args: FitArgs) -> midchan::Result<()> {
    let text = fs::read_to_string(&args.input)?;
    let samples: Vec<PathLossSample> = serde_json::from_str(&text)?;
    let params = ci_fit(
        &samples,
        args.freq,
        parse_env(&args.env)?,
        parse_agg(&args.agg)?,
    )?;
    emit(args.out.as_deref(), &to_pretty_json(&params)?)
}

fn cmd_stats(args: StatsArgs) -> midchan::Result<()> {
    let campaign = load_campaign(&args.campaign)?;
    let report = build_stats_report(&campaign)?;
    if let Some(dir) = &args.pas_csv_dir {
        let dir = resolve_out(dir);
        fs::create_dir_all(&dir)?;
        for info in &campaign.header.locations {
            let set = campaign.capture_set(&info.id, campaign.header.polarization)?;
            let pas = build_pas(&set, PasSide::Aoa)?;
            let mut csv = String::from("azimuth_deg,power_dBm\n");
            for (k, &p) in pas.powers_mw.iter().enumerate() {
                csv.push_str(&format!(
                    "{:.1},{:.6}\n",
                    pas.direction_deg(k),
                    mw_to_dbm(p)
                ));
            }
            fs::write(dir.join(format!("{}_aoa_pas.csv", info.id)), csv)?;
        }
    }
    emit(args.out.as_deref(), &to_pretty_json(&report)?)
}

fn cmd_synth_omni(args: SynthOmniArgs) -> midchan::Result<()> {
    let campaign = load_campaign(&args.campaign)?;
    let set = campaign.capture_set(&args.location, parse_polarization(&args.polarization)?)?;
    let omni = synthesize_omni_pdp(&set)?;
    let mut csv = String::from("delay_ns,power_dBm\n");
    for (i, &p) in omni.powers_mw().iter().enumerate() {
        csv.push_str(&format!("{:.3},{:.6}\n", omni.delay_ns(i), mw_to_dbm(p)));
    }
    emit(args.out.as_deref(), &csv)
}

fn cmd_sweep_plan(args: SweepPlanArgs) -> midchan::Result<()> {
    let band = FrequencyBand::parse(&args.band)?;
    let plan = plan_sweeps(&band)?;
    emit(args.out.as_deref(), &to_pretty_json(&plan)?)
}

fn cmd_simulate(args: SimulateArgs) -> midchan::Result<()> {
    let text = fs::read_to_string(&args.scenario)?;
    let scenario: SounderScenario =
        serde_json::from_str(&text).map_err(|e| ChanError::InvalidConfig(e.to_string()))?;
    let band = FrequencyBand::from_label(scenario.band)?;
    let mut rng = ChaCha12Rng::seed_from_u64(scenario.seed);
    let sim = simulate_schedule(&scenario, &mut rng)?;

    let (events, drift_log) = if args.correct_drift {
        let (mut corrected, report) = drift_correct(&sim.events)?;
        // sub-bin correction residuals leave events on slightly different
        // grids; these captures are circular over the PN period, so fold the
        // integer-bin part of each start into a rotation and discard the
        // sub-half-bin remainder, putting every PDP on the start-zero grid
        for event in &mut corrected {
            let start = event.pdp.start_delay_ns();
            if start != 0.0 {
                let bins = (start / event.pdp.bin_width_ns()).round() as i64;
                event.pdp = event
                    .pdp
                    .circular_shift_bins(bins)
                    .shifted(-start)
                    .expect("snap to zero start");
            }
        }
        let log: Vec<DriftLogEntry> = report
            .anchors
            .iter()
            .map(|a| DriftLogEntry {
                wall_time_s: a.wall_time_s,
                observed_delay_ns: a.observed_delay_ns,
                correction_ns: a.displacement_ns,
            })
            .collect();
        (corrected, log)
    } else {
        (sim.events, Vec::new())
    };

    let records = events
        .into_iter()
        .map(|e| midchan::MeasurementRecord {
            location_id: scenario.location_id.clone(),
            polarization: Polarization::Vv,
            wall_time_s: e.wall_time_s,
            tx_azimuth: e.tx_azimuth,
            rx_azimuth: e.rx_azimuth,
            tx_tilt_hpbw: e.tx_tilt_hpbw,
            rx_tilt_hpbw: e.rx_tilt_hpbw,
            pdp: e.pdp,
            system_gain_db: 0.0,
            is_reference_recapture: e.is_reference_recapture,
        })
        .collect();

    let header = CampaignHeader::new(
        band,
        "simulated",
        Polarization::Vv,
        vec![LocationInfo {
            id: scenario.location_id.clone(),
            tx: "TX".into(),
            rx: "RX".into(),
            distance_m: scenario.distance_m,
            environment: scenario.environment,
        }],
    );
    let campaign = CampaignFile::new(
        header,
        records,
        CalibrationLog {
            system_gain_db: 0.0,
            drift_recaptures: drift_log,
        },
    )?;

    match args.out {
        Some(path) => {
            save_campaign(&campaign, &resolve_out(&path))?;
            Ok(())
        }
        None => emit(None, &campaign.to_jsonl()?),
    }
}

fn cmd_generate(args: GenerateArgs) -> midchan::Result<()> {
    let band = FrequencyBand::parse(&args.band)?;
    let env = parse_env(&args.env)?;
    if args.n == 0 {
        return Err(ChanError::EmptyInput("drop count"));
    }

    let mut drops = Vec::with_capacity(args.n);
    for i in 0..args.n {
        let cfg = DropConfig {
            band,
            environment: env,
            distance_m: args.distance,
            seed: args.seed.wrapping_add(i as u64),
        };
        drops.push(generate_drop(&cfg)?);
    }
    let summary = ensemble_stats(&drops)?;

    if let Some(path) = &args.out_campaign {
        let mut locations = Vec::with_capacity(drops.len());
        let mut records = Vec::new();
        for (i, drop) in drops.iter().enumerate() {
            let id = format!("drop-{i:05}");
            locations.push(LocationInfo {
                id: id.clone(),
                tx: "TX".into(),
                rx: "RX".into(),
                distance_m: drop.distance_m,
                environment: drop.environment,
            });
            let set = drop_capture_set(drop, &id)?;
            records.extend(set.records().iter().cloned());
        }
        let header = CampaignHeader::new(band, "generated", Polarization::Vv, locations);
        let campaign = CampaignFile::new(header, records, CalibrationLog::default())?;
        save_campaign(&campaign, &resolve_out(path))?;
    }

    emit(args.out.as_deref(), &to_pretty_json(&summary)?)
}

#[derive(Serialize)]
struct CiExportRow {
    #[serde(rename = "freq_GHz")]
    freq_ghz: f64,
    env: String,
    aggregation: String,
    n: f64,
    #[serde(rename = "sigma_dB")]
    sigma_db: f64,
}

#[derive(Serialize)]
struct DsExportRow {
    #[serde(rename = "freq_GHz")]
    freq_ghz: f64,
    env: String,
    aggregation: String,
    mean_ns: f64,
}

#[derive(Serialize)]
struct AsaExportRow {
    #[serde(rename = "freq_GHz")]
    freq_ghz: f64,
    env: String,
    mean_deg: f64,
}

#[derive(Serialize)]
struct XpdExportRow {
    #[serde(rename = "freq_GHz")]
    freq_ghz: f64,
    #[serde(rename = "xpd_dB")]
    xpd_db: f64,
}

#[derive(Serialize)]
struct ParamsExport {
    ci_params: Vec<CiExportRow>,
    rms_ds_means: Vec<DsExportRow>,
    omni_asa_means: Vec<AsaExportRow>,
    xpd: Vec<XpdExportRow>,
}

fn cmd_export(args: ExportArgs) -> midchan::Result<()> {
    // all three filters: emit the single (n, sigma) pair
    if let (Some(freq), Some(env), Some(agg)) = (args.freq, &args.env, &args.agg) {
        let params = table3_params(freq, parse_env(env)?, parse_agg(agg)?)?;
        let single = serde_json::json!({ "n": params.n, "sigma_dB": params.sigma_db });
        return emit(args.out.as_deref(), &serde_json::to_string(&single)?);
    }

    let matches_freq = |f: f64| args.freq.map(|q| (q - f).abs() < 1e-6).unwrap_or(true);
    let matches_env = |e: Environment| {
        args.env
            .as_deref()
            .and_then(Environment::parse)
            .map(|q| q == e)
            .unwrap_or(true)
    };
    let matches_agg = |a: Aggregation| {
        args.agg
            .as_deref()
            .and_then(Aggregation::parse)
            .map(|q| q == a)
            .unwrap_or(true)
    };

    let export = ParamsExport {
        ci_params: CI_PARAMS
            .iter()
            .filter(|e| {
                matches_freq(e.freq_ghz) && matches_env(e.env) && matches_agg(e.aggregation)
            })
            .map(|e| CiExportRow {
                freq_ghz: e.freq_ghz,
                env: e.env.to_string(),
                aggregation: e.aggregation.to_string(),
                n: e.n,
                sigma_db: e.sigma_db,
            })
            .collect(),
        rms_ds_means: RMS_DS_MEANS
            .iter()
            .filter(|e| {
                matches_freq(e.freq_ghz) && matches_env(e.env) && matches_agg(e.aggregation)
            })
            .map(|e| DsExportRow {
                freq_ghz: e.freq_ghz,
                env: e.env.to_string(),
                aggregation: e.aggregation.to_string(),
                mean_ns: e.mean_ns,
            })
            .collect(),
        omni_asa_means: OMNI_ASA_MEANS
            .iter()
            .filter(|e| matches_freq(e.freq_ghz) && matches_env(e.env))
            .map(|e| AsaExportRow {
                freq_ghz: e.freq_ghz,
                env: e.env.to_string(),
                mean_deg: e.mean_deg,
            })
            .collect(),
        xpd: [6.75, 16.95]
            .iter()
            .filter(|&&f| matches_freq(f))
            .map(|&f| XpdExportRow {
                freq_ghz: f,
                xpd_db: xpd_db(f).expect("measured band"),
            })
            .collect(),
    };
    emit(args.out.as_deref(), &to_pretty_json(&export)?)
}
