//! The `fabris` command-line front end.
//!
//! ```text
//! fabris steer       CONFIG --theta-deg T --phi-deg P [--out FILE]
//! fabris optimize    CONFIG --out FILE [--seed S] [--method fabris|naive|brute] [--radius-m R]
//! fabris montecarlo  CONFIG --out-dir DIR [--trials N] [--seed S] [--method M,...] [--radius-m R]
//! fabris beampattern CONFIG [--phases-file F] [--activation-file F] [--grid-step-deg D] [--out FILE]
//! ```
//!
//! Every command also takes `--frequency f1|f2|<GHz>` to override the band.
//! Exit status: 0 success, 2 configuration or argument error, 3 degenerate
//! geometry or channel, 4 degenerate pattern, 5 solver non-convergence.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::array::{matched_phases, steering_vector, ActivationProfile, OperatingBand, PhaseProfile, RisConfiguration, SteeringAngles};
use crate::beampattern::{grid_deg, lobe_metrics, synthesize, DEFAULT_GRID_STEP_DEG};
use crate::channel::build_channel_set;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::optimizer::{brute_force, naive_configuration, optimize, OptimizerOptions};
use crate::sim::{monte_carlo, to_db, trial_scenario, Method, SlnrReport};
use crate::slnr::slnr;

/// Shortest round-trip decimal form, with `-0.0` printed as `0.0`.
pub fn format_f64(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

#[derive(Debug, Parser)]
#[command(name = "fabris", version, about = "RIS phase and activation optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the steering vector (index,real,imag) of the configured array.
    Steer(SteerArgs),
    /// Optimize one scenario and write the chosen configuration.
    Optimize(OptimizeArgs),
    /// Run the Monte Carlo experiment and write trial, CDF and summary files.
    Montecarlo(MonteCarloArgs),
    /// Evaluate the array pattern of a configuration and print lobe metrics.
    Beampattern(BeampatternArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML scenario file.
    config: PathBuf,
    /// Operating band: f1, f2 or a frequency in GHz.
    #[arg(long, value_parser = parse_band)]
    frequency: Option<OperatingBand>,
}

impl Common {
    fn load(&self) -> Result<Config> {
        let mut config = Config::load(&self.config)?;
        if let Some(band) = self.frequency {
            config.band = band;
        }
        Ok(config)
    }
}

fn parse_band(s: &str) -> std::result::Result<OperatingBand, String> {
    match s {
        "f1" => Ok(OperatingBand::f1()),
        "f2" => Ok(OperatingBand::f2()),
        ghz => {
            let v: f64 = ghz.parse().map_err(|_| format!("expected f1, f2 or GHz, got `{ghz}`"))?;
            OperatingBand::from_frequency(v * 1e9).map_err(|e| e.to_string())
        }
    }
}

#[derive(Debug, Args)]
struct SteerArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    theta_deg: f64,
    #[arg(long, allow_hyphen_values = true)]
    phi_deg: f64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Fabris,
    Naive,
    Brute,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fabris => Method::Fabris,
            MethodArg::Naive => Method::Naive,
            MethodArg::Brute => Method::BruteForce,
        }
    }
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Configuration CSV (index,phase_rad,active).
    #[arg(long)]
    out: PathBuf,
    /// Which configuration to write.
    #[arg(long, value_enum, default_value = "fabris")]
    method: MethodArg,
    #[arg(long)]
    radius_m: Option<f64>,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["fabris", "naive"])]
    method: Vec<MethodArg>,
    #[arg(long)]
    radius_m: Option<f64>,
}

#[derive(Debug, Args)]
struct BeampatternArgs {
    #[command(flatten)]
    common: Common,
    /// CSV with a `phase_rad` column, or one phase per line. Defaults to
    /// phases matched towards `--steer-theta-deg`/`--steer-phi-deg`.
    #[arg(long)]
    phases_file: Option<PathBuf>,
    /// CSV with an `active` column, or one 0/1 per line. Defaults to all on.
    #[arg(long)]
    activation_file: Option<PathBuf>,
    #[arg(long, default_value_t = 90.0, allow_hyphen_values = true)]
    steer_theta_deg: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    steer_phi_deg: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP_DEG)]
    grid_step_deg: f64,
    /// Pattern CSV (theta_deg,phi_deg,gain_db).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns the exit status.
/// Human-readable results go to `stdout`; errors go to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Steer(a) => steer(&a, stdout),
        Command::Optimize(a) => optimize_cmd(&a, stdout),
        Command::Montecarlo(a) => montecarlo_cmd(&a, stdout),
        Command::Beampattern(a) => beampattern_cmd(&a, stdout),
    };
    match result.and_then(|()| stdout.flush().map_err(Error::from)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))
}

fn steer(a: &SteerArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = a.common.load()?;
    let angles = SteeringAngles::from_degrees(a.theta_deg, a.phi_deg);
    let v = steering_vector(&config.geometry, angles, config.band.wavelength_m())?;
    let mut text = String::new();
    for (n, z) in v.iter().enumerate() {
        text.push_str(&format!("{n},{},{}\n", format_f64(z.re), format_f64(z.im)));
    }
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_configuration(path: &Path, cfg: &RisConfiguration) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "index,phase_rad,active")?;
    for (n, (phase, on)) in cfg.phases().as_slice().iter().zip(cfg.activation().as_slice()).enumerate() {
        writeln!(w, "{n},{},{}", format_f64(*phase), u8::from(*on))?;
    }
    w.flush()?;
    Ok(())
}

fn optimize_cmd(a: &OptimizeArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = a.common.load()?;
    if let Some(r) = a.radius_m {
        config.scenario.as_mut().ok_or_else(|| Error::Config("missing section `scenario`".into()))?.radius_m = r;
    }
    let spec = config.experiment(1, a.seed, vec![Method::Fabris])?;
    spec.validate()?;
    let (scenario, randomization_seed) = trial_scenario(&spec, 0);
    let ch = build_channel_set(&scenario)?;
    let (p, s2) = (scenario.tx_power_w, scenario.noise_power_w);

    let fabris = optimize(&ch, p, s2, &OptimizerOptions { seed: randomization_seed, ..config.optimizer })?;
    let naive = naive_configuration(&ch)?;
    let naive_value = slnr(&ch, &naive, p, s2)?;
    writeln!(stdout, "fabris_slnr_db = {:.4}", to_db(fabris.slnr))?;
    writeln!(stdout, "naive_slnr_db = {:.4}", to_db(naive_value))?;
    writeln!(stdout, "relaxation_bound_db = {:.4}", to_db(fabris.relaxation_bound))?;
    writeln!(stdout, "fabris_active = {}/{}", fabris.config.activation().active_count(), ch.len())?;
    if fabris.unconverged_steps > 0 {
        writeln!(stdout, "unconverged_steps = {}", fabris.unconverged_steps)?;
    }

    let written = match a.method {
        MethodArg::Fabris => fabris.config,
        MethodArg::Naive => naive,
        MethodArg::Brute => {
            let phases = fabris.config.phases().clone();
            let (activation, value) = brute_force(&ch, &phases, p, s2)?;
            writeln!(stdout, "brute_slnr_db = {:.4}", to_db(value))?;
            RisConfiguration::new(phases, activation)?
        }
    };
    write_configuration(&a.out, &written)
}

fn write_report(dir: &Path, report: &SlnrReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;

    let mut w = create(&dir.join("trials.csv"))?;
    writeln!(w, "trial,method,slnr_db")?;
    for trial in 0..report.num_trials {
        for m in &report.methods {
            writeln!(w, "{trial},{},{}", m.method, format_f64(m.db[trial]))?;
        }
    }
    w.flush()?;

    let mut w = create(&dir.join("cdf.csv"))?;
    writeln!(w, "method,slnr_db,prob")?;
    for m in &report.methods {
        for (v, prob) in &m.cdf_db {
            writeln!(w, "{},{},{}", m.method, format_f64(*v), format_f64(*prob))?;
        }
    }
    w.flush()?;

    let mut w = create(&dir.join("summary.txt"))?;
    write!(w, "{}", summary_text(report))?;
    w.flush()?;
    Ok(())
}

fn summary_text(report: &SlnrReport) -> String {
    let mut s = format!(
        "trials = {}\nseed = {}\nspec_digest = \"{}\"\n",
        report.num_trials, report.seed, report.spec_digest
    );
    for m in &report.methods {
        let x = &m.summary;
        s.push_str(&format!(
            "\n[{}]\nmedian_db = {}\nmean_db = {}\np05_db = {}\np95_db = {}\n",
            m.method,
            format_f64(x.median_db),
            format_f64(x.mean_db),
            format_f64(x.p05_db),
            format_f64(x.p95_db)
        ));
    }
    s
}

fn montecarlo_cmd(a: &MonteCarloArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut config = a.common.load()?;
    if let Some(r) = a.radius_m {
        config.scenario.as_mut().ok_or_else(|| Error::Config("missing section `scenario`".into()))?.radius_m = r;
    }
    let mut methods: Vec<Method> = Vec::new();
    for m in &a.method {
        let m = Method::from(*m);
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let spec = config.experiment(a.trials, a.seed, methods)?;
    let report = monte_carlo(&spec)?;
    write_report(&a.out_dir, &report)?;
    write!(stdout, "{}", summary_text(&report))?;
    Ok(())
}

/// Reads one numeric column: either a headed CSV containing `column`, or one value per line.
fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).peekable();
    let bad = |line: &str| Error::Config(format!("{}: cannot parse `{line}`", path.display()));
    let index = match lines.peek() {
        Some(first) if first.split(',').any(|f| f.trim().parse::<f64>().is_err()) => {
            let idx = first
                .split(',')
                .position(|f| f.trim() == column)
                .ok_or_else(|| Error::Config(format!("{}: no `{column}` column", path.display())))?;
            lines.next();
            Some(idx)
        }
        _ => None,
    };
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let field = match index {
                Some(i) => fields.get(i).copied(),
                None if fields.len() == 1 => Some(fields[0]),
                None => None,
            };
            field.and_then(|f| f.parse().ok()).ok_or_else(|| bad(line))
        })
        .collect()
}

fn beampattern_cmd(a: &BeampatternArgs, stdout: &mut dyn Write) -> Result<()> {
    let config = a.common.load()?;
    let n = config.geometry.len();
    let phases = match &a.phases_file {
        Some(path) => PhaseProfile::from_radians(read_column(path, "phase_rad")?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => matched_phases(
            &config.geometry,
            SteeringAngles::from_degrees(a.steer_theta_deg, a.steer_phi_deg),
            config.band.wavelength_m(),
        )?,
    };
    let activation = match &a.activation_file {
        Some(path) => {
            let bits = read_column(path, "active")?
                .into_iter()
                .map(|v| match v {
                    0.0 => Ok(0u8),
                    1.0 => Ok(1u8),
                    other => Err(Error::Config(format!("{}: activation must be 0 or 1, got {other}", path.display()))),
                })
                .collect::<Result<Vec<_>>>()?;
            ActivationProfile::from_bits(&bits)?
        }
        None => ActivationProfile::all_on(n),
    };
    for (name, len) in [("phases", phases.len()), ("activation", activation.len())] {
        if len != n {
            return Err(Error::Config(format!("{name} profile has {len} entries, the array has {n}")));
        }
    }
    let cfg = RisConfiguration::new(phases, activation)?;
    let step = a.grid_step_deg;
    let thetas = grid_deg(0.0, 180.0, step).map_err(|e| Error::Config(format!("`grid-step-deg`: {e}")))?;
    let phis = grid_deg(-90.0, 90.0, step).map_err(|e| Error::Config(format!("`grid-step-deg`: {e}")))?;
    let pattern = synthesize(&config.geometry, &config.band, &cfg, &thetas, &phis)?;
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        pattern.write_csv(&mut w)?;
        w.flush()?;
    }
    let m = lobe_metrics(&pattern)?;
    writeln!(stdout, "main_lobe_db = {:.1}", m.main_lobe_db)?;
    writeln!(stdout, "width_3db_deg = {:.2}", m.width_3db_deg)?;
    writeln!(stdout, "width_3db_phi_deg = {:.2}", m.width_3db_phi_deg)?;
    writeln!(stdout, "sll_db = {:.2}", m.sll_db)?;
    writeln!(stdout, "peak_theta_deg = {:.2}", m.peak.theta_rad.to_degrees())?;
    writeln!(stdout, "peak_phi_deg = {:.2}", m.peak.phi_rad.to_degrees())?;
    Ok(())
}
