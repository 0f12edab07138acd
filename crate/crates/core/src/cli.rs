//! Command-line surface: `point`, `scan`, `peaks`, `sweep`, `validate`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::{load_config, write_map, write_peaks_json, Format, RunConfig, SweepSpec};
use crate::localization::{chi_imag, find_peaks, scan, sweep, Quadrant, DEFAULT_AXIS_EXCLUSION};
use crate::model::{element_label, steady_state};
use crate::validate::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "atomloc", version, about = "2D atom localization maps for a V-type atom with SGC")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Flags mirror the config keys; they are applied after the config file.
#[derive(Debug, Args)]
struct Overrides {
    /// JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Comma-separated subset of csv,json,pgm
    #[arg(long, global = true, value_delimiter = ',')]
    formats: Option<Vec<String>>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta_p: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta_c: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_p0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega_c0: Option<f64>,
    /// Dipole angle in radians; `pi/2.1` style is accepted
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    theta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    delta_phase: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_angle)]
    eta_phase: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha_scale: Option<f64>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    y_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    y_max: Option<f64>,
    #[arg(long, global = true)]
    nx: Option<usize>,
    #[arg(long, global = true)]
    ny: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Steady state and χ'' at one position (JSON on stdout)
    Point {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// χ'' map in the requested formats
    Scan,
    /// Map plus per-quadrant peak JSON
    Peaks {
        #[arg(long, default_value_t = DEFAULT_AXIS_EXCLUSION)]
        axis_exclusion: f64,
    },
    /// One map and peak report per parameter value
    Sweep {
        /// delta_p, delta_c or theta
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_angle)]
        values: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_AXIS_EXCLUSION)]
        axis_exclusion: f64,
    },
    /// Oracle cross-check suite; exit code 3 on any failure
    Validate {
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

/// Plain number, `pi`, `pi/D` or `Kpi` (e.g. `0.5pi`).
fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    use std::f64::consts::PI;
    let t = s.trim();
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    if let Some(rest) = t.strip_prefix("pi/") {
        return Ok(PI / num(rest)?);
    }
    if let Some(k) = t.strip_suffix("pi") {
        let k = k.trim_end_matches('*');
        return Ok(PI * if k.is_empty() { 1.0 } else if k == "-" { -1.0 } else { num(k)? });
    }
    num(t)
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        let p = &mut cfg.params;
        let pairs = [
            (&mut p.gamma, self.gamma),
            (&mut p.delta_p, self.delta_p),
            (&mut p.delta_c, self.delta_c),
            (&mut p.omega_p0, self.omega_p0),
            (&mut p.omega_c0, self.omega_c0),
            (&mut p.theta, self.theta),
            (&mut p.delta_phase, self.delta_phase),
            (&mut p.eta_phase, self.eta_phase),
            (&mut p.kappa1, self.kappa1),
            (&mut p.kappa2, self.kappa2),
            (&mut p.alpha_scale, self.alpha_scale),
            (&mut cfg.grid.x_min, self.x_min),
            (&mut cfg.grid.x_max, self.x_max),
            (&mut cfg.grid.y_min, self.y_min),
            (&mut cfg.grid.y_max, self.y_max),
        ];
        for (slot, value) in pairs {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(n) = self.nx {
            cfg.grid.nx = n;
        }
        if let Some(n) = self.ny {
            cfg.grid.ny = n;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        if let Some(formats) = &self.formats {
            cfg.formats = formats.iter().map(|f| Format::parse(f)).collect::<Result<_>>()?;
        }
        Ok(())
    }
}

fn resolve_config(overrides: &Overrides) -> Result<RunConfig> {
    let mut cfg = match &overrides.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(&cli.overrides)?;
    match &cli.command {
        Command::Point { x, y } => point(&cfg, *x, *y),
        Command::Scan => {
            cfg.ensure_output_dir()?;
            let map = scan(&cfg.params, &cfg.grid)?;
            for path in write_map(&map, &cfg.output_dir, "scan", &cfg.formats)? {
                log::info!("wrote {}", path.display());
            }
            Ok(EXIT_OK)
        }
        Command::Peaks { axis_exclusion } => {
            cfg.ensure_output_dir()?;
            let map = scan(&cfg.params, &cfg.grid)?;
            let report = find_peaks(&map, *axis_exclusion);
            for path in write_map(&map, &cfg.output_dir, "scan", &cfg.formats)? {
                log::info!("wrote {}", path.display());
            }
            let path = cfg.output_dir.join("peaks.json");
            // a single scan reports its probe detuning as the parameter value
            let entry = [(cfg.params.delta_p, &report)];
            write_peaks_json(&entry, &path)?;
            let payload = crate::io::peaks_json(&entry);
            log::info!("wrote {}", path.display());
            println!("{}", serde_json::to_string_pretty(&payload).expect("serializable"));
            Ok(EXIT_OK)
        }
        Command::Sweep {
            param,
            values,
            axis_exclusion,
        } => {
            let spec = match (param, values, &cfg.sweep) {
                (Some(p), Some(v), _) => SweepSpec {
                    param: p.parse()?,
                    values: v.clone(),
                },
                (Some(p), None, Some(s)) => SweepSpec {
                    param: p.parse()?,
                    values: s.values.clone(),
                },
                (None, Some(v), Some(s)) => SweepSpec {
                    param: s.param,
                    values: v.clone(),
                },
                (None, None, Some(s)) => s.clone(),
                _ => {
                    return Err(Error::Validation(
                        "sweep needs --param and --values (or a `sweep` block in the config)".into(),
                    ))
                }
            };
            run_sweep(&cfg, &spec, *axis_exclusion)
        }
        Command::Validate { draws, seed } => {
            let results = run_suite(*draws, *seed)?;
            let mut failed = false;
            for r in &results {
                println!("{r}");
                failed |= r.gating && !r.passed;
            }
            Ok(if failed { EXIT_VALIDATION } else { EXIT_OK })
        }
    }
}

fn point(cfg: &RunConfig, x: f64, y: f64) -> Result<i32> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Validation("point coordinates must be finite".into()));
    }
    let omega_c = cfg.params.rabi_at(x, y);
    let rho = steady_state(&cfg.params, omega_c).map_err(|e| Error::SingularAt {
        x,
        y,
        source: Box::new(e),
    })?;
    let mut elements = serde_json::Map::new();
    for (k, z) in rho.to_flat().iter().enumerate() {
        elements.insert(element_label(k), json!([z.re, z.im]));
    }
    let out = json!({
        "x": x,
        "y": y,
        "omega_c": omega_c,
        "p": cfg.params.sgc_p(),
        "rho": elements,
        "chi_im": chi_imag(&cfg.params, &rho),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    Ok(EXIT_OK)
}

fn run_sweep(cfg: &RunConfig, spec: &SweepSpec, axis_exclusion: f64) -> Result<i32> {
    if spec.values.is_empty() {
        return Err(Error::Validation("sweep needs at least one value".into()));
    }
    cfg.ensure_output_dir()?;
    let points = sweep(&cfg.params, &cfg.grid, spec.param, &spec.values, axis_exclusion)?;
    for (k, pt) in points.iter().enumerate() {
        let stem = format!("sweep_{}_{k:02}", spec.param);
        for path in write_map(&pt.map, &cfg.output_dir, &stem, &cfg.formats)? {
            log::info!("wrote {}", path.display());
        }
    }
    let reports: Vec<(f64, &_)> = points.iter().map(|p| (p.value, &p.peaks)).collect();
    let path = cfg.output_dir.join(format!("sweep_{}_peaks.json", spec.param));
    write_peaks_json(&reports, &path)?;
    log::info!("wrote {}", path.display());

    println!("{:>14}  {:>14}  {:>14}  {:>14}  {:>14}", spec.param.name(), "I", "II", "III", "IV");
    for pt in &points {
        let cell = |q: Quadrant| {
            pt.peaks
                .strongest_in(q)
                .map(|p| format!("{:.6e}", p.value))
                .unwrap_or_else(|| "-".into())
        };
        println!(
            "{:>14.6}  {:>14}  {:>14}  {:>14}  {:>14}",
            pt.value,
            cell(Quadrant::I),
            cell(Quadrant::II),
            cell(Quadrant::III),
            cell(Quadrant::IV)
        );
    }
    Ok(EXIT_OK)
}
