//! Command-line front end: scenario ingestion, field maps, peak reports,
//! regulatory lookups, placement solvers and the engine/oracle verifier.
//!
//! Exit codes: 0 success, 1 validation error, 2 infeasible solver result.

mod config;
mod report;

use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use config::{parse_target, ScenarioConfig};
use report::{fmt_sig9, to_csv_string, to_json_string};
use ris_emf::{
    boresight_peaks, boresight_scan, efield_at, field_map, field_regions, limit_lookup, min_dbr,
    min_height, oracle::oracle_efield, peak_efield, vpm_to_dbvpm, GainPattern, LinkBudget, Mode,
    PeakReport, Point3, RisArray, Scenario,
};

const VERIFY_TOLERANCE: f64 = 1e-9;

/// Exit status for a solver that finished without finding a compliant value.
const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ris-emf",
    about = "RIS E-field simulator and EMF compliance toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the E-field over a square evaluation area
    Map(CommonArgs),
    /// Locate field maxima over the evaluation grid
    Peaks(CommonArgs),
    /// Scan the field along the array boresight
    Boresight(CommonArgs),
    /// Look up a regulatory general-public E-field limit
    Limits(CommonArgs),
    /// Solve the minimum BS-RIS distance meeting a limit
    MinDist(CommonArgs),
    /// Solve the minimum RIS mounting height meeting a limit
    MinHeight(CommonArgs),
    /// Report aperture and field-region boundary distances
    Regions(CommonArgs),
    /// Cross-check the engine against the brute-force oracle
    Verify(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Map(a)
            | Command::Peaks(a)
            | Command::Boresight(a)
            | Command::Limits(a)
            | Command::MinDist(a)
            | Command::MinHeight(a)
            | Command::Regions(a)
            | Command::Verify(a) => a,
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Carrier frequency in GHz
    #[arg(long)]
    freq_ghz: Option<f64>,
    /// Elements per side of the square RIS
    #[arg(long)]
    n: Option<usize>,
    /// Element pitch as a fraction of the wavelength (default 0.5)
    #[arg(long)]
    spacing_frac: Option<f64>,
    /// RIS center height in meters
    #[arg(long)]
    h_ris: Option<f64>,
    /// Evaluation (user) height in meters (default 1.5)
    #[arg(long)]
    h_user: Option<f64>,
    /// BS-RIS distance in meters
    #[arg(long)]
    d_br: Option<f64>,
    /// BS EIRP in dBm
    #[arg(long)]
    pmax_dbm: Option<f64>,
    /// BS EIRP preset: fcc | fr1 | fr2
    #[arg(long)]
    eirp: Option<String>,
    /// Operating mode: ro | bo
    #[arg(long)]
    mode: Option<String>,
    /// Beamforming target as "x,y,h" in meters
    #[arg(long)]
    target: Option<String>,
    /// Element pattern exponent (cos^q power pattern, default 3; 0 = isotropic)
    #[arg(long)]
    pattern_exp: Option<f64>,
    /// Apply the element pattern in azimuth as well
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    azimuth_pattern: Option<bool>,
    /// Evaluation area side in meters (default 10)
    #[arg(long)]
    area: Option<f64>,
    /// Grid resolution in meters (default 0.05)
    #[arg(long)]
    res: Option<f64>,
    /// Regulatory authority: itu | who | icnirp | usa | flanders | china
    #[arg(long)]
    authority: Option<String>,
    /// Exposure limit in V/m
    #[arg(long)]
    limit_vpm: Option<f64>,
    /// Exposure limit in dBV/m
    #[arg(long)]
    limit_dbvpm: Option<f64>,
    /// Boresight scan start in meters (default 0.001)
    #[arg(long)]
    y_min: Option<f64>,
    /// Boresight scan end in meters (default 20)
    #[arg(long)]
    y_max: Option<f64>,
    /// Log-scan density (default 200)
    #[arg(long)]
    samples_per_decade: Option<usize>,
    /// Height search lower bound in meters (default: user height)
    #[arg(long)]
    h_min: Option<f64>,
    /// Height search upper bound in meters (default 10)
    #[arg(long)]
    h_max: Option<f64>,
    /// Verification trial count (default 100)
    #[arg(long)]
    trials: Option<usize>,
    /// Verification RNG seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default json)
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

impl CommonArgs {
    fn as_config(&self) -> anyhow::Result<ScenarioConfig> {
        Ok(ScenarioConfig {
            freq_ghz: self.freq_ghz,
            n: self.n,
            spacing_frac: self.spacing_frac,
            h_ris: self.h_ris,
            h_user: self.h_user,
            d_br: self.d_br,
            pmax_dbm: self.pmax_dbm,
            eirp: self.eirp.clone(),
            mode: self.mode.clone(),
            target: self.target.as_deref().map(parse_target).transpose()?,
            area: self.area,
            res: self.res,
            pattern_exp: self.pattern_exp,
            azimuth_pattern: self.azimuth_pattern,
            authority: self.authority.clone(),
            limit_vpm: self.limit_vpm,
            limit_dbvpm: self.limit_dbvpm,
            y_min: self.y_min,
            y_max: self.y_max,
            samples_per_decade: self.samples_per_decade,
            h_min: self.h_min,
            h_max: self.h_max,
            trials: self.trials,
            seed: self.seed,
        })
    }

    /// Config file merged under the explicit flags.
    fn resolve(&self) -> anyhow::Result<ScenarioConfig> {
        let base = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        Ok(base.overridden_by(self.as_config()?))
    }

    fn emit(&self, text: String) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn wants_csv(&self) -> bool {
        self.format.as_deref() == Some("csv")
    }
}

fn main() {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            std::process::exit(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            std::process::exit(0);
        }
    };
    match run(&cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

/// RIS_EMF_THREADS caps the evaluation pool; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(raw) = std::env::var("RIS_EMF_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            Err(_) => {
                eprintln!("error: RIS_EMF_THREADS must be a non-negative integer, got '{raw}'");
                std::process::exit(1);
            }
        }
    }
}

fn run(command: &Command) -> anyhow::Result<i32> {
    let args = command.args();
    let cfg = args.resolve()?;
    match command {
        Command::Map(a) => cmd_map(a, &cfg),
        Command::Peaks(a) => cmd_peaks(a, &cfg),
        Command::Boresight(a) => cmd_boresight(a, &cfg),
        Command::Limits(a) => cmd_limits(a, &cfg),
        Command::MinDist(a) => cmd_min_dist(a, &cfg),
        Command::MinHeight(a) => cmd_min_height(a, &cfg),
        Command::Regions(a) => cmd_regions(a, &cfg),
        Command::Verify(a) => cmd_verify(a, &cfg),
    }
}

/// Echo non-fatal scenario oddities on stderr so they survive CSV output.
fn surface_warnings(scenario: &Scenario) {
    for w in scenario.warnings() {
        eprintln!("warning: {w}");
    }
}

fn scenario_header(command: &str, scenario: &Scenario) -> serde_json::Value {
    json!({
        "command": command,
        "scenario": serde_json::to_value(scenario).expect("scenario serializes"),
        "warnings": scenario.warnings(),
    })
}

fn peak_json(location: &Point3, e_vpm: f64) -> serde_json::Value {
    json!({
        "x_m": location.x,
        "y_m": location.y,
        "h_m": location.h,
        "e_vpm": e_vpm,
        "e_dbvpm": vpm_to_dbvpm(e_vpm),
    })
}

fn peaks_json(report: &PeakReport) -> serde_json::Value {
    json!({
        "scan_kind": report.scan_kind,
        "global_max": peak_json(&report.global_max.location, report.global_max.e_vpm),
        "peaks": report
            .peaks
            .iter()
            .map(|p| peak_json(&p.location, p.e_vpm))
            .collect::<Vec<_>>(),
    })
}

fn cmd_map(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let scenario = cfg.scenario()?;
    surface_warnings(&scenario);
    let map = field_map(&scenario, cfg.area(), cfg.res())?;

    if args.wants_csv() {
        let rows = (0..map.ny).flat_map(|row| {
            let map = &map;
            (0..map.nx).map(move |col| {
                let e = map.sample(row, col);
                vec![
                    fmt_sig9(map.x_at(col)),
                    fmt_sig9(map.y_at(row)),
                    fmt_sig9(e),
                    fmt_sig9(vpm_to_dbvpm(e)),
                ]
            })
        });
        args.emit(to_csv_string("x_m,y_m,e_vpm,e_dbvpm", rows))?;
    } else {
        let mut doc = scenario_header("map", &scenario);
        let obj = doc.as_object_mut().unwrap();
        obj.insert("map".into(), serde_json::to_value(&map)?);
        args.emit(to_json_string(doc))?;
    }
    Ok(0)
}

fn cmd_peaks(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let scenario = cfg.scenario()?;
    surface_warnings(&scenario);
    let report = peak_efield(&scenario, cfg.area(), cfg.res())?;

    if args.wants_csv() {
        let global = report.global_max;
        let rows = std::iter::once((&global, true))
            .chain(report.peaks.iter().map(|p| (p, false)))
            .map(|(p, is_global)| {
                vec![
                    fmt_sig9(p.location.x),
                    fmt_sig9(p.location.y),
                    fmt_sig9(p.location.h),
                    fmt_sig9(p.e_vpm),
                    fmt_sig9(vpm_to_dbvpm(p.e_vpm)),
                    (is_global as u8).to_string(),
                ]
            })
            .collect::<Vec<_>>();
        args.emit(to_csv_string(
            "x_m,y_m,h_m,e_vpm,e_dbvpm,is_global_max",
            rows.into_iter(),
        ))?;
    } else {
        let mut doc = scenario_header("peaks", &scenario);
        let obj = doc.as_object_mut().unwrap();
        obj.insert("area_side_m".into(), json!(cfg.area()));
        obj.insert("resolution_m".into(), json!(cfg.res()));
        obj.insert("report".into(), peaks_json(&report));
        args.emit(to_json_string(doc))?;
    }
    Ok(0)
}

fn cmd_boresight(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let scenario = cfg.scenario()?;
    surface_warnings(&scenario);
    let samples = boresight_scan(
        &scenario,
        cfg.y_min(),
        cfg.y_max(),
        cfg.samples_per_decade(),
    )?;

    if args.wants_csv() {
        let rows = samples
            .iter()
            .map(|&(y, e)| vec![fmt_sig9(y), fmt_sig9(e), fmt_sig9(vpm_to_dbvpm(e))]);
        args.emit(to_csv_string("y_m,e_vpm,e_dbvpm", rows))?;
    } else {
        let mut doc = scenario_header("boresight", &scenario);
        let obj = doc.as_object_mut().unwrap();
        obj.insert("y_min_m".into(), json!(cfg.y_min()));
        obj.insert("y_max_m".into(), json!(cfg.y_max()));
        obj.insert("samples_per_decade".into(), json!(cfg.samples_per_decade()));
        obj.insert(
            "samples".into(),
            json!(samples
                .iter()
                .map(|&(y, e)| json!({"y_m": y, "e_vpm": e, "e_dbvpm": vpm_to_dbvpm(e)}))
                .collect::<Vec<_>>()),
        );
        // Peak detection is defined for the reflective mode only.
        if matches!(scenario.mode(), Mode::Ro) {
            let report = boresight_peaks(&scenario, cfg.y_max())?;
            obj.insert("report".into(), peaks_json(&report));
        }
        args.emit(to_json_string(doc))?;
    }
    Ok(0)
}

fn cmd_limits(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let authority = cfg.authority()?;
    let frequency = cfg.frequency_hz()?;
    let limit = limit_lookup(authority, frequency)?;

    if args.wants_csv() {
        let row = vec![
            authority.to_string(),
            fmt_sig9(frequency / 1e9),
            fmt_sig9(limit),
            fmt_sig9(vpm_to_dbvpm(limit)),
        ];
        args.emit(to_csv_string(
            "authority,frequency_ghz,limit_vpm,limit_dbvpm",
            std::iter::once(row),
        ))?;
    } else {
        args.emit(to_json_string(json!({
            "command": "limits",
            "authority": authority.to_string(),
            "frequency_ghz": frequency / 1e9,
            "limit_vpm": limit,
            "limit_dbvpm": vpm_to_dbvpm(limit),
        })))?;
    }
    Ok(0)
}

fn solver_doc(
    command: &str,
    scenario: &Scenario,
    cfg: &ScenarioConfig,
    result: &ris_emf::SolverResult,
) -> serde_json::Value {
    let mut doc = scenario_header(command, scenario);
    let obj = doc.as_object_mut().unwrap();
    obj.insert("area_side_m".into(), json!(cfg.area()));
    obj.insert("resolution_m".into(), json!(cfg.res()));
    obj.insert(
        "result".into(),
        serde_json::to_value(result).expect("result serializes"),
    );
    doc
}

fn solver_csv(result: &ris_emf::SolverResult) -> String {
    let parameter = match result.parameter {
        ris_emf::SolvedParameter::DBr => "d_br",
        ris_emf::SolvedParameter::HRis => "h_ris",
    };
    let row = vec![
        parameter.to_string(),
        fmt_sig9(result.value),
        fmt_sig9(result.limit_used),
        fmt_sig9(result.peak_at_value),
        result.converged.to_string(),
    ];
    to_csv_string(
        "parameter,value_m,limit_vpm,peak_at_value_vpm,converged",
        std::iter::once(row),
    )
}

fn cmd_min_dist(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let scenario = cfg.scenario()?;
    surface_warnings(&scenario);
    let limit = cfg.limit_vpm()?;
    let result = min_dbr(&scenario, limit, cfg.area(), cfg.res())?;
    if args.wants_csv() {
        args.emit(solver_csv(&result))?;
    } else {
        args.emit(to_json_string(solver_doc(
            "min-dist", &scenario, cfg, &result,
        )))?;
    }
    Ok(if result.converged { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_min_height(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let scenario = cfg.scenario()?;
    surface_warnings(&scenario);
    let limit = cfg.limit_vpm()?;
    let range = cfg.height_range(scenario.user_height());
    let result = min_height(&scenario, limit, range, cfg.area(), cfg.res())?;
    if args.wants_csv() {
        args.emit(solver_csv(&result))?;
    } else {
        args.emit(to_json_string(solver_doc(
            "min-height",
            &scenario,
            cfg,
            &result,
        )))?;
    }
    Ok(if result.converged { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_regions(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let frequency = cfg.frequency_hz()?;
    let n = cfg.n.ok_or_else(|| anyhow!("missing required field 'n'"))?;
    let wavelength = ris_emf::SPEED_OF_LIGHT / frequency;
    let regions = field_regions(n, wavelength)?;

    if args.wants_csv() {
        let row = vec![
            n.to_string(),
            fmt_sig9(frequency / 1e9),
            fmt_sig9(regions.aperture),
            fmt_sig9(regions.near_bound),
            fmt_sig9(regions.far_bound),
        ];
        args.emit(to_csv_string(
            "n,frequency_ghz,aperture_m,near_bound_m,far_bound_m",
            std::iter::once(row),
        ))?;
    } else {
        args.emit(to_json_string(json!({
            "command": "regions",
            "n": n,
            "frequency_ghz": frequency / 1e9,
            "wavelength_m": wavelength,
            "aperture_m": regions.aperture,
            "near_bound_m": regions.near_bound,
            "far_bound_m": regions.far_bound,
        })))?;
    }
    Ok(0)
}

/// Random engine/oracle comparison; provided scenario fields pin the
/// corresponding parameter, everything else is drawn per trial.
fn cmd_verify(args: &CommonArgs, cfg: &ScenarioConfig) -> anyhow::Result<i32> {
    let trials = cfg.trials();
    let seed = cfg.seed();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut worst_case = json!(null);

    for trial in 0..trials {
        let n = cfg.n.unwrap_or_else(|| rng.gen_range(1..=16));
        let freq = cfg
            .freq_ghz
            .map(|g| g * 1e9)
            .unwrap_or_else(|| rng.gen_range(1.0e9..30.0e9));
        let d_br = cfg.d_br.unwrap_or_else(|| rng.gen_range(1.0..100.0));
        let p_max = match (cfg.pmax_dbm, &cfg.eirp) {
            (None, None) => rng.gen_range(0.01..2000.0),
            _ => cfg.p_max_watts()?,
        };
        let h_ris = cfg.h_ris.unwrap_or_else(|| rng.gen_range(1.0..6.0));
        let spacing_frac = cfg.spacing_frac.unwrap_or_else(|| rng.gen_range(0.3..0.7));
        let exponent = cfg.pattern_exp.unwrap_or_else(|| rng.gen_range(0.0..6.0));
        let azimuth = cfg.azimuth_pattern.unwrap_or_else(|| rng.gen_bool(0.5));

        let link = LinkBudget::new(freq, p_max, d_br)?;
        let array = RisArray::new(n, spacing_frac * link.wavelength(), h_ris)?;
        let pattern = GainPattern::new(exponent, azimuth)?;
        let mode = match cfg.mode.as_deref() {
            Some("bo") => Mode::Bo {
                target: match cfg.target {
                    Some(t) => Point3::new(t[0], t[1], t[2])?,
                    None => random_point(&mut rng),
                },
            },
            Some("ro") => Mode::Ro,
            Some(other) => anyhow::bail!("field 'mode': expected 'ro' or 'bo', got '{other}'"),
            None => {
                if rng.gen_bool(0.5) {
                    Mode::Bo {
                        target: random_point(&mut rng),
                    }
                } else {
                    Mode::Ro
                }
            }
        };
        let scenario = Scenario::new(link, array, pattern, mode, cfg.h_user.unwrap_or(1.5))?;
        let point = random_point(&mut rng);

        let engine = efield_at(&scenario, &point)?;
        let reference = oracle_efield(&scenario, &point)?.magnitude;
        let denom = engine.abs().max(reference.abs());
        let diff = if denom == 0.0 {
            0.0
        } else {
            (engine - reference).abs() / denom
        };
        if diff > worst {
            worst = diff;
            worst_case = json!({
                "trial": trial,
                "n": n,
                "frequency_ghz": freq / 1e9,
                "engine_vpm": engine,
                "oracle_vpm": reference,
            });
        }
    }

    let pass = worst < VERIFY_TOLERANCE;
    if args.wants_csv() {
        let row = vec![
            trials.to_string(),
            seed.to_string(),
            fmt_sig9(worst),
            fmt_sig9(VERIFY_TOLERANCE),
            pass.to_string(),
        ];
        args.emit(to_csv_string(
            "trials,seed,max_rel_diff,tolerance,pass",
            std::iter::once(row),
        ))?;
    } else {
        args.emit(to_json_string(json!({
            "command": "verify",
            "trials": trials,
            "seed": seed,
            "tolerance": VERIFY_TOLERANCE,
            "max_rel_diff": worst,
            "pass": pass,
            "worst_case": worst_case,
        })))?;
    }
    if pass {
        Ok(0)
    } else {
        Err(anyhow!(
            "engine/oracle disagreement: max relative difference {worst:.3e} exceeds {VERIFY_TOLERANCE:.0e}"
        ))
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> Point3 {
    Point3::new(
        rng.gen_range(-4.0..4.0),
        rng.gen_range(0.3..9.0),
        rng.gen_range(0.1..5.0),
    )
    .expect("finite coordinates")
}
