//! Command-line front end. [`run_command`] does all the work and returns
//! the exit code, the text to print and the files written, so the binary
//! only forwards them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::{analyze_curve, focal_meshes};
use crate::dsl::{builtin_surface, parse_surface_spec, SurfaceSpec};
use crate::error::Error;
use crate::export::{csv_string, GridMesh};
use crate::focal::parallel_surface;
use crate::verify::{run_all, verify_surface};

#[derive(Parser, Debug)]
#[command(
    name = "frontal",
    version,
    about = "Singularities, invariants and focal surfaces of wave fronts",
    after_help = "SPEC is `builtin:NAME` (CE0, CE_T, CE_R, CIRC, SW, SPHERE) or a surface file."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace the singular curve and tabulate invariants along it.
    Analyze {
        spec: String,
        /// Starting point for the curve tracer (default: domain centre).
        #[arg(long, num_args = 2, value_names = ["U", "V"], allow_negative_numbers = true)]
        seed: Option<Vec<f64>>,
        /// Arc-length step of the tracer.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        max_points: usize,
        /// Write the table here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write OBJ meshes of f, FC_f and the hat focal surface.
    Focal {
        spec: String,
        #[arg(long, value_parser = parse_grid, default_value = "64x64")]
        grid: (usize, usize),
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property suites on one surface, or every acceptance criterion.
    Verify {
        /// A surface, or `all`.
        target: String,
        /// Tolerance for direct against closed-form curvature values.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Build the parallel surface f + tν.
    Parallel {
        spec: String,
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        /// `.obj` writes a mesh; any other extension a surface file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_grid, default_value = "64x64")]
        grid: (usize, usize),
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 2)
            .ok_or_else(|| format!("grid sizes must be integers of at least 2, got `{s}`"))
    };
    Ok((parse(n)?, parse(m)?))
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub files: Vec<PathBuf>,
}

/// An analysis failure, reported with the surface and the point involved.
#[derive(Debug)]
struct Failure {
    surface: String,
    point: Option<(f64, f64)>,
    error: Error,
}

impl Failure {
    fn new(surface: &str, point: Option<(f64, f64)>) -> impl FnOnce(Error) -> Failure + '_ {
        move |error| Failure {
            surface: surface.to_string(),
            point,
            error,
        }
    }

    fn message(&self) -> String {
        match self.point {
            Some((u, v)) => format!("error: surface {} at ({u}, {v}): {}", self.surface, self.error),
            None => format!("error: surface {}: {}", self.surface, self.error),
        }
    }
}

/// Loads `builtin:NAME` or a surface file. Files without a `name` line are
/// named after their stem.
pub fn load_spec(arg: &str) -> crate::Result<SurfaceSpec> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin_surface(name);
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spec = parse_surface_spec(&text)?;
    let named = text
        .lines()
        .any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("name"));
    if !named {
        if let Some(stem) = path.file_stem() {
            spec.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(spec)
}

fn write_file(path: &Path, contents: &str, out: &mut RunOutcome) -> crate::Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    out.files.push(path.to_path_buf());
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
///
/// Exit codes: 0 success, 1 analysis error or failed verification,
/// 2 usage error.
pub fn run_command<I, T>(args: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunOutcome {
                    code: 2,
                    stderr: text,
                    ..Default::default()
                }
            } else {
                RunOutcome {
                    stdout: text,
                    ..Default::default()
                }
            };
        }
    };
    let mut out = RunOutcome::default();
    if let Err(f) = dispatch(cli.command, &mut out) {
        out.code = 1;
        let _ = writeln!(out.stderr, "{}", f.message());
    }
    if !out.files.is_empty() {
        for f in &out.files {
            let _ = writeln!(out.stdout, "wrote {}", f.display());
        }
    }
    out
}

fn load(arg: &str) -> Result<SurfaceSpec, Failure> {
    load_spec(arg).map_err(Failure::new(arg, None))
}

fn dispatch(command: Command, out: &mut RunOutcome) -> Result<(), Failure> {
    match command {
        Command::Analyze {
            spec,
            seed,
            step,
            max_points,
            csv,
        } => {
            let spec = load(&spec)?;
            let d = spec.domain;
            let seed = seed.map_or(((d.u0 + d.u1) / 2.0, (d.v0 + d.v1) / 2.0), |s| (s[0], s[1]));
            let step = step.unwrap_or_else(|| ((d.u1 - d.u0).min(d.v1 - d.v0) / 100.0).max(1e-3));
            let fail = |e| Failure::new(&spec.name, Some(seed))(e);
            let (curve, rows) = analyze_curve(&spec, seed, step, max_points).map_err(fail)?;
            let table = csv_string(&rows).map_err(fail)?;
            match csv {
                Some(path) => {
                    write_file(&path, &table, out).map_err(fail)?;
                    let _ = writeln!(
                        out.stdout,
                        "{}: {} samples on a{} singular curve",
                        spec.name,
                        rows.len(),
                        if curve.closed { " closed" } else { "n open" }
                    );
                }
                None => out.stdout.push_str(&table),
            }
        }
        Command::Focal { spec, grid, out: dir } => {
            let spec = load(&spec)?;
            let fail = Failure::new(&spec.name, None);
            let meshes = focal_meshes(&spec, grid.0, grid.1);
            let meshes = meshes.map_err(fail)?;
            fs::create_dir_all(&dir)
                .map_err(|e| Failure::new(&spec.name, None)(Error::io(&dir, e)))?;
            for (file, mesh) in [
                ("f.obj", &meshes.surface),
                ("fc.obj", &meshes.fc),
                ("hat_fc.obj", &meshes.hat_fc),
            ] {
                write_file(&dir.join(file), &mesh.to_obj(), out)
                    .map_err(Failure::new(&spec.name, None))?;
            }
        }
        Command::Verify { target, tol } => {
            if target == "all" {
                let results = run_all();
                let failed = results.iter().filter(|r| !r.passed).count();
                for r in &results {
                    let _ = writeln!(out.stdout, "{r}");
                }
                let _ = writeln!(out.stdout, "{} criteria, {failed} failed", results.len());
                out.code = i32::from(failed > 0);
            } else {
                let spec = load(&target)?;
                let report = verify_surface(&spec, tol).map_err(Failure::new(&spec.name, None))?;
                let _ = writeln!(out.stdout, "{report}");
                out.code = i32::from(!report.passed());
            }
        }
        Command::Parallel {
            spec,
            t,
            out: path,
            grid,
        } => {
            let spec = load(&spec)?;
            let par = parallel_surface(&spec, t).map_err(Failure::new(&spec.name, None))?;
            let is_obj = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("obj"));
            let contents = if is_obj {
                parallel_mesh(&par, grid).map_err(Failure::new(&spec.name, None))?
            } else {
                par.to_file_string().ok_or_else(|| {
                    Failure::new(&spec.name, None)(Error::InvalidArgument(
                        "this parallel surface has no closed form; write a .obj mesh instead".into(),
                    ))
                })?
            };
            write_file(&path, &contents, out).map_err(Failure::new(&spec.name, None))?;
        }
    }
    Ok(())
}

fn parallel_mesh(spec: &SurfaceSpec, (n, m): (usize, usize)) -> crate::Result<String> {
    let points = spec
        .domain
        .sample(n, m)
        .into_iter()
        .map(|p| spec.evaluate_jet(p, 0).ok().map(|(f, _)| f.value()))
        .collect();
    Ok(GridMesh::new(spec.name.clone(), m, n, points)?.to_obj())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("64x32"), Ok((64, 32)));
        assert!(parse_grid("64").is_err());
        assert!(parse_grid("1x5").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let r = run_command(["frontal", "analyze"]);
        assert_eq!(r.code, 2);
        assert!(r.stderr.contains("Usage"), "{}", r.stderr);
        assert_eq!(run_command(["frontal", "focal", "builtin:SW", "--grid", "8", "--out", "x"]).code, 2);
        assert_eq!(run_command(["frontal", "--help"]).code, 0);
    }

    #[test]
    fn unknown_surface_exits_one() {
        let r = run_command(["frontal", "verify", "builtin:TORUS"]);
        assert_eq!(r.code, 1);
        assert!(r.stderr.contains("builtin:TORUS"), "{}", r.stderr);
    }

    #[test]
    fn non_singular_seed_names_surface_and_point() {
        let r = run_command(["frontal", "analyze", "builtin:SPHERE", "--seed", "0.1", "-0.2"]);
        assert_eq!(r.code, 1);
        assert!(r.stderr.contains("SPHERE at (0.1, -0.2)"), "{}", r.stderr);
    }
}
