//! `hill3`: critical values, Hill-region scans and reduced dynamics of
//! three-body systems with inverse-distance interactions.
//!
//! Sign convention: `nu = -E r^2`, so `nu > 0` means negative energy and
//! `nu <= 0` means `E >= 0` at `r > 0`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use nalgebra::Vector3;

use hill3::critical::{critical_catalog, write_catalog_csv, Family};
use hill3::fmt::sig;
use hill3::hill::{bif_function, classify, membership, principal_to_body, rotational_budget, shape_eval};
use hill3::reduction::{integrate, write_trajectory_csv, RovibState};
use hill3::scan::{
    component_census, contour_grid, scan_disk, write_grid_csv, write_grid_ppm, write_ppm, write_scan_csv,
};
use hill3::verify::{build_relequil_state, characteristic_period, verify_all};
use hill3::{BodySystem, OrientationClass, Shape};

#[derive(Parser)]
#[command(
    name = "hill3",
    version,
    about = "Critical values, Hill regions and reduced dynamics of three-body systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in system: gravity-demo, helium or eep
    #[arg(long)]
    preset: Option<String>,
    /// System file with `masses m1 m2 m3` and `alphas a1 a2 a3` lines
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog of critical values as CSV
    Critical {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify one shape, optionally one orientation
    Classify {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, num_args = 2, value_names = ["W1", "W2"], allow_negative_numbers = true, required = true)]
        shape: Vec<f64>,
        /// Angular momentum direction in the principal frame (normalised)
        #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
        jhat: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Classify every pixel of the shape disk
    Scan {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_negative_numbers = true)]
        nu: f64,
        #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(2..))]
        res: u32,
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Grid of sqrt(M_k) V over the disk or the (chi, psi) rectangle
    Contours {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        axis: u8,
        #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(2..))]
        res: u32,
        #[arg(long)]
        chi_psi: bool,
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrate the reduced equations of motion
    ///
    /// Without --shape the run starts at the first relative equilibrium of
    /// the catalog; with --shape the system starts at rest in shape space
    /// with |J| = r along --jhat.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, num_args = 2, value_names = ["W1", "W2"], allow_negative_numbers = true)]
        shape: Option<Vec<f64>>,
        #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true, requires = "shape")]
        jhat: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Step size; defaults to 1e-3 of the rotation period
        #[arg(long, allow_negative_numbers = true)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the verification suite; exit status 0 iff every check passes
    Verify {
        #[command(flatten)]
        source: Source,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Compute(e.into())
    }
}

fn load(source: &Source) -> std::result::Result<BodySystem, Failure> {
    let loaded = match (&source.preset, &source.system) {
        (Some(name), None) => BodySystem::preset(name).map_err(anyhow::Error::from),
        (None, Some(path)) => std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .and_then(|text| {
                text.parse::<BodySystem>()
                    .with_context(|| format!("parsing {}", path.display()))
            }),
        _ => Err(anyhow!("exactly one of --preset and --system is required")),
    };
    loaded.map_err(Failure::Usage)
}

fn unit(v: &[f64]) -> std::result::Result<Vector3<f64>, Failure> {
    let v = Vector3::new(v[0], v[1], v[2]);
    let n = v.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Failure::Usage(anyhow!("--jhat must be a non-zero vector")));
    }
    Ok(v / n)
}

fn shape_arg(v: &[f64]) -> std::result::Result<Shape, Failure> {
    Shape::new(v[0], v[1]).map_err(|e| Failure::Usage(anyhow!("--shape {} {}: {e}", v[0], v[1])))
}

/// Write to `path`, or to standard output when absent.
fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            write(&mut out)
                .and_then(|_| out.flush())
                .with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            write(&mut out)
                .and_then(|_| out.flush())
                .context("writing standard output")
        }
    }
}

fn triple(xs: [f64; 3]) -> String {
    xs.map(|x| sig(x, 12)).join(" ")
}

fn run(cli: Cli) -> std::result::Result<ExitCode, Failure> {
    match cli.command {
        Command::Critical { source, csv } => {
            let system = load(&source)?;
            let catalog = critical_catalog(&system);
            emit(csv.as_deref(), |out| write_catalog_csv(out, &catalog))?;
        }
        Command::Classify {
            source,
            nu,
            shape,
            jhat,
            r,
        } => {
            let system = load(&source)?;
            let shape = shape_arg(&shape)?;
            let eval = shape_eval(&system, &shape)?;
            let class = classify(&eval, nu);
            let mut lines = vec![
                format!("shape {}", triple([shape.w1(), shape.w2(), shape.w3()])),
                format!("v_tilde {}", sig(eval.v_tilde, 12)),
                format!("moments {}", triple(eval.m_tilde)),
                format!("thresholds {}", triple(eval.thresholds)),
            ];
            if nu > 0.0 && eval.v_tilde < 0.0 {
                lines.push(format!("budget {}", sig(rotational_budget(eval.v_tilde, nu), 12)));
            }
            lines.push(format!("class {}", class.name()));
            if let Some(j) = jhat {
                let j = unit(&j)?;
                if r.is_nan() || r <= 0.0 {
                    return Err(Failure::Usage(anyhow!("--r must be positive")));
                }
                let e = -nu / (r * r);
                let m = membership(&system, e, r, &shape, &j)?;
                let root = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| sig(v, 12));
                lines.push(format!("energy {}", sig(e, 12)));
                lines.push(format!("jhat_body {}", triple(principal_to_body(&shape, &j).into())));
                lines.push(format!("bif {}", sig(bif_function(&system, &shape, &j)?, 12)));
                lines.push(format!("region {:?}", m.region_case));
                lines.push(format!("discriminant {}", sig(m.discriminant, 12)));
                lines.push(format!("lambda {} {}", root(m.lambda_minus), root(m.lambda_plus)));
                lines.push(format!("member {}", m.member));
            }
            emit(None, |out| lines.iter().try_for_each(|l| writeln!(out, "{l}")))?;
        }
        Command::Scan {
            source,
            nu,
            res,
            ppm,
            csv,
        } => {
            let system = load(&source)?;
            let scan = scan_disk(&system, nu, res as usize)?;
            if let Some(p) = &ppm {
                emit(Some(p), |out| write_ppm(out, &scan))?;
            }
            if let Some(p) = &csv {
                emit(Some(p), |out| write_scan_csv(out, &scan))?;
            }
            let census = component_census(&scan);
            emit(None, |out| {
                writeln!(out, "class,pixels,components,touches_boundary")?;
                for class in OrientationClass::ALL {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        class.name(),
                        scan.count(class.into()),
                        census.components_of(class),
                        census.touches(class)
                    )?;
                }
                Ok(())
            })?;
        }
        Command::Contours {
            source,
            axis,
            res,
            chi_psi,
            ppm,
            csv,
        } => {
            let system = load(&source)?;
            let grid = contour_grid(&system, axis as usize, res as usize, chi_psi)?;
            if let Some(p) = &ppm {
                emit(Some(p), |out| write_grid_ppm(out, &grid))?;
            }
            if csv.is_some() || ppm.is_none() {
                emit(csv.as_deref(), |out| write_grid_csv(out, &grid))?;
            }
        }
        Command::Simulate {
            source,
            shape,
            jhat,
            r,
            dt,
            steps,
            csv,
        } => {
            let system = load(&source)?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(Failure::Usage(anyhow!("--r must be positive")));
            }
            let state = match shape {
                Some(w) => {
                    let shape = shape_arg(&w)?;
                    let direction = unit(jhat.as_deref().unwrap_or(&[0.0, 0.0, 1.0]))?;
                    let q = shape.to_jacobi();
                    let j = principal_to_body(&shape, &direction) * r;
                    // no internal motion: p3 cancels the gauge term
                    let p3 = j[2] * q.rho2 * q.rho2 / q.moment();
                    RovibState::new(Vector3::new(q.rho1, q.rho2, q.phi), Vector3::new(0.0, 0.0, p3), j)
                }
                None => {
                    let value = critical_catalog(&system)
                        .into_iter()
                        .flat_map(|e| e.members)
                        .find(|m| matches!(m.family, Family::Lagrange | Family::Langmuir))
                        .ok_or_else(|| {
                            anyhow!("the catalog has no relative equilibrium with an interior shape; pass --shape")
                        })?;
                    build_relequil_state(&system, &value, r)?
                }
            };
            let dt = match dt {
                Some(dt) => dt,
                None => 1e-3 * characteristic_period(&system, &state)?,
            };
            let run = integrate(&system, &state, dt, steps)?;
            emit(csv.as_deref(), |out| write_trajectory_csv(out, &run.trajectory))?;
            let report = &run.report;
            eprintln!(
                "steps {} dt {} max_energy_drift {} max_momentum_drift {}",
                report.steps_completed,
                sig(dt, 12),
                sig(report.max_energy_drift, 12),
                sig(report.max_momentum_drift, 12)
            );
            if let Some(why) = &report.truncated {
                eprintln!("warning: {why}");
            }
        }
        Command::Verify { source } => {
            let system = load(&source)?;
            let report = verify_all(&system);
            emit(None, |out| write!(out, "{report}"))?;
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
