use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use viscwave::diagnostics::{fit_mode, ModeFit};
use viscwave::integrate::{run, SimConfig, Trajectory};

use crate::{CliError, CliResult, FORMAT_VERSION};

pub const SNAPSHOT_DIR: &str = "snapshots";
pub const MODE_FITS: &str = "mode_fits.json";
pub const CONFIG_ECHO: &str = "config_echo.toml";
pub const METADATA: &str = "metadata.json";

#[derive(Serialize)]
struct SkippedFit {
    k: i64,
    reason: String,
}

#[derive(Serialize)]
struct ModeFits {
    format_version: u32,
    fits: Vec<ModeFit>,
    skipped: Vec<SkippedFit>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    format_version: u32,
    version: &'a str,
    model: String,
    n_points: usize,
    dt: f64,
    t_end: f64,
    n_steps: usize,
    snapshot_every: usize,
    n_snapshots: usize,
    wall_clock_seconds: f64,
    status: &'a str,
    blow_up_time: Option<f64>,
    warnings: &'a [String],
}

pub fn parse_config(path: &Path) -> CliResult<SimConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("{}: {e}", path.display())))?;
    let config: SimConfig =
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let config = config.resolved(base)?;
    config.validate()?;
    Ok(config)
}

pub fn snapshot_name(index: usize) -> String {
    format!("snapshot_{index:05}.csv")
}

pub fn snapshot_csv(traj: &Trajectory, index: usize) -> String {
    let state = &traj.states[index];
    let x = traj.grid.nodes();
    let f = state.f().to_physical();
    let second = state.second().to_physical();
    let mut out = format!(
        "# format_version={FORMAT_VERSION}\n# model={}\n# t={}\nx,f,{}\n",
        traj.model,
        traj.times[index],
        traj.model.second_name()
    );
    for j in 0..x.len() {
        let _ = writeln!(out, "{},{},{}", x[j], f[j], second[j]);
    }
    out
}

/// Modes to fit: the tracked ones, or else every mode present initially.
fn fit_targets(config: &SimConfig, traj: &Trajectory) -> Vec<i64> {
    if !config.track_modes.is_empty() {
        return config.track_modes.clone();
    }
    let first = &traj.states[0];
    (1..=config.grid.dealias_cutoff() as i64)
        .filter(|&k| first.f().coeff(k).norm() > 0.0 || first.second().coeff(k).norm() > 0.0)
        .collect()
}

fn mode_fits(config: &SimConfig, traj: &Trajectory) -> ModeFits {
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for k in fit_targets(config, traj) {
        match fit_mode(traj, k) {
            Ok(fit) => fits.push(fit),
            Err(e) => skipped.push(SkippedFit {
                k,
                reason: e.to_string(),
            }),
        }
    }
    ModeFits {
        format_version: FORMAT_VERSION,
        fits,
        skipped,
    }
}

fn json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.into()))? + "\n")
}

/// Runs one configuration and writes its artifacts below `out`.
pub fn simulate_config(config: &SimConfig, out: &Path) -> CliResult<()> {
    let snap_dir = out.join(SNAPSHOT_DIR);
    fs::create_dir_all(&snap_dir)?;
    for entry in fs::read_dir(&snap_dir)? {
        let path = entry?.path();
        let stale = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".csv"));
        if stale {
            fs::remove_file(path)?;
        }
    }
    let echo = toml::to_string(config).map_err(|e| CliError::Other(e.into()))?;
    fs::write(out.join(CONFIG_ECHO), echo)?;

    let start = Instant::now();
    let result = run(config);
    let elapsed = start.elapsed().as_secs_f64();
    let (traj, failure) = match result {
        Ok(t) => (Some(t), None),
        Err(e) => (e.partial, Some(e.error)),
    };

    let mut n_snapshots = 0;
    let mut warnings = Vec::new();
    if let Some(traj) = &traj {
        for i in 0..traj.len() {
            fs::write(snap_dir.join(snapshot_name(i)), snapshot_csv(traj, i))?;
        }
        n_snapshots = traj.len();
        warnings = traj.warnings.clone();
        let fits = if failure.is_none() {
            mode_fits(config, traj)
        } else {
            ModeFits {
                format_version: FORMAT_VERSION,
                fits: vec![],
                skipped: vec![],
            }
        };
        fs::write(out.join(MODE_FITS), json(&fits)?)?;
    }
    let blow_up_time = match &failure {
        Some(viscwave::Error::BlowUp { time }) => Some(*time),
        _ => None,
    };
    let meta = Metadata {
        format_version: FORMAT_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        model: config.model.to_string(),
        n_points: config.grid.n_points(),
        dt: config.dt,
        t_end: config.t_end,
        n_steps: config.n_steps(),
        snapshot_every: config.snapshot_every,
        n_snapshots,
        wall_clock_seconds: elapsed,
        status: if failure.is_none() { "completed" } else { "failed" },
        blow_up_time,
        warnings: &warnings,
    };
    fs::write(out.join(METADATA), json(&meta)?)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match failure {
        None => Ok(()),
        Some(e) => Err(e.into()),
    }
}

fn simulate_file(config: &Path, out: &Path) -> CliResult<()> {
    simulate_config(&parse_config(config)?, out)
}

/// Runs a single config file, or every `*.toml` file of a directory with
/// one output subdirectory per config.
pub fn simulate_path(config: &Path, out: &Path, jobs: usize) -> CliResult<()> {
    if !config.is_dir() {
        return simulate_file(config, out);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(config)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!("{}: no .toml configs found", config.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Other(e.into()))?;
    let results: Vec<(PathBuf, CliResult<()>)> = pool.install(|| {
        files
            .par_iter()
            .map(|f| {
                let stem = f.file_stem().unwrap_or_default();
                (f.clone(), simulate_file(f, &out.join(stem)))
            })
            .collect()
    });
    let mut first_err = None;
    for (file, r) in results {
        if let Err(e) = r {
            eprintln!("{}: {e}", file.display());
            first_err.get_or_insert(e);
        }
    }
    match first_err {
        None => Ok(()),
        Some(e) => Err(e),
    }
}
