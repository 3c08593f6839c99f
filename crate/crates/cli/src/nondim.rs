use serde::Serialize;
use viscwave::nondim::{to_dimensionless, PhysicalParams};
use viscwave::ModelParams;

use crate::{CliError, CliResult, Format, FORMAT_VERSION};

#[derive(Serialize)]
struct Output {
    format_version: u32,
    /// √(L/G) [s]
    time_scale: f64,
    /// H√(GL) [m²/s]
    potential_scale: f64,
    params: ModelParams,
}

/// Renders the dimensionless parameters. The default text form is TOML and
/// can be passed back as a params file.
pub fn render(phys: &PhysicalParams, format: Option<Format>) -> CliResult<String> {
    let d = to_dimensionless(phys)?;
    let out = Output {
        format_version: FORMAT_VERSION,
        time_scale: d.time_scale,
        potential_scale: d.potential_scale,
        params: d.params,
    };
    match format {
        None => toml::to_string(&out).map_err(|e| CliError::Other(e.into())),
        Some(Format::Json) => Ok(serde_json::to_string_pretty(&out).map_err(|e| CliError::Other(e.into()))? + "\n"),
        Some(Format::Csv) => Ok(format!(
            "# format_version={FORMAT_VERSION}\nepsilon,beta,alpha1,alpha2,s,time_scale,potential_scale\n{},{},{},{},{},{},{}\n",
            d.params.epsilon,
            d.params.beta,
            d.params.alpha1,
            d.params.alpha2,
            d.params.s,
            d.time_scale,
            d.potential_scale
        )),
    }
}
