use rayon::prelude::*;
use serde::Serialize;
use viscwave::elliptic::{oracle_battery, run_oracle_case, OracleResult};
use viscwave::GridSpec;

use crate::{CliError, CliResult, Format, FORMAT_VERSION};

#[derive(Serialize)]
struct Report<'a> {
    format_version: u32,
    depth: f64,
    layers: usize,
    n_points: usize,
    tolerance: f64,
    passed: bool,
    cases: &'a [OracleResult],
}

pub fn run_battery(depth: f64, layers: usize, n_points: usize, jobs: Option<usize>) -> CliResult<Vec<OracleResult>> {
    let grid = GridSpec::new(n_points)?;
    let cases = oracle_battery();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Other(e.into()))?;
    let results: Vec<_> = pool.install(|| {
        cases
            .par_iter()
            .map(|c| run_oracle_case(c, grid, depth, layers))
            .collect()
    });
    Ok(results.into_iter().collect::<Result<Vec<_>, _>>()?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

pub fn oracle_check(
    depth: f64,
    layers: usize,
    n_points: usize,
    tolerance: f64,
    format: Option<Format>,
    jobs: Option<usize>,
) -> CliResult<()> {
    if !(tolerance > 0.0) {
        return Err(CliError::Validation(format!("tolerance must be positive, got {tolerance}")));
    }
    let results = run_battery(depth, layers, n_points, jobs)?;
    let failing: Vec<&OracleResult> = results.iter().filter(|r| !(r.residual <= tolerance)).collect();
    let text = match format {
        Some(Format::Json) => {
            let report = Report {
                format_version: FORMAT_VERSION,
                depth,
                layers,
                n_points,
                tolerance,
                passed: failing.is_empty(),
                cases: &results,
            };
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Other(e.into()))? + "\n"
        }
        Some(Format::Csv) => {
            let mut s = format!("# format_version={FORMAT_VERSION}\ncase,residual,layer_ratio,depth_rate,pass\n");
            for r in &results {
                s.push_str(&format!(
                    "\"{}\",{},{},{},{}\n",
                    r.label,
                    r.residual,
                    opt(r.layer_ratio),
                    opt(r.depth_rate),
                    r.residual <= tolerance
                ));
            }
            s
        }
        None => {
            let mut s = format!(
                "format_version {FORMAT_VERSION}\ndepth {depth}  layers {layers}  n_points {n_points}  tolerance {tolerance:e}\n"
            );
            for r in &results {
                s.push_str(&format!(
                    "{:<4} {:<48} residual {:>10.3e}  ratio(2n) {:>7}  depth rate {:>7}\n",
                    if r.residual <= tolerance { "ok" } else { "FAIL" },
                    r.label,
                    r.residual,
                    r.layer_ratio.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into()),
                    r.depth_rate.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into()),
                ));
            }
            s
        }
    };
    print!("{text}");
    if failing.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = failing
            .iter()
            .map(|r| format!("{} (residual {:e})", r.label, r.residual))
            .collect();
        Err(CliError::Oracle(names.join("; ")))
    }
}
