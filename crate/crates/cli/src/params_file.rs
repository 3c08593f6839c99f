//! Parameter files.
//!
//! Dimensionless parameters live in a `[params]` table; physical inputs in
//! a `[physical]` table with an optional `[units]` table naming the SI unit
//! of each entry. A params file may carry either, and the output of
//! `nondim` is itself a valid params file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use viscwave::nondim::{to_dimensionless, PhysicalParams};
use viscwave::{Dissipation, ModelParams};

use crate::{CliError, CliResult, FORMAT_VERSION};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    format_version: Option<u32>,
    params: Option<ModelParams>,
    physical: Option<PhysicalParams>,
    units: Option<BTreeMap<String, String>>,
    // Scales written by `nondim`; informational only.
    time_scale: Option<f64>,
    potential_scale: Option<f64>,
}

fn read(path: &Path) -> CliResult<ParamsFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Other(anyhow::anyhow!("{}: {e}", path.display())))?;
    let file: ParamsFile = toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if let Some(v) = file.format_version {
        if v != FORMAT_VERSION {
            return Err(CliError::Validation(format!(
                "{}: format_version {v} is not supported",
                path.display()
            )));
        }
    }
    Ok(file)
}

fn normalize(unit: &str) -> String {
    unit.chars()
        .filter(|c| !c.is_whitespace() && *c != '*' && *c != '·')
        .collect::<String>()
        .replace("**", "^")
}

fn expected_unit(field: &str, s: Dissipation) -> Option<&'static [&'static str]> {
    Some(match (field, s) {
        ("amplitude_h" | "wavelength_l", _) => &["m"],
        ("gravity_g", _) => &["m/s^2", "m/s2", "ms^-2"],
        ("surface_tension_gamma", _) => &["kg/s^2", "kg/s2", "N/m"],
        ("density_rho", _) => &["kg/m^3", "kg/m3"],
        ("dissipation_delta1", Dissipation::S0) => &["kg/(m^2s)", "kg/m^2/s", "kg/(m2s)"],
        ("dissipation_delta1", Dissipation::S2) => &["kg/s"],
        ("decay_rate", Dissipation::S0) => &["1/s", "s^-1"],
        ("decay_rate", Dissipation::S2) => &["m^3/s", "m3/s"],
        ("diffusion_delta2", _) => &["m^2/s", "m2/s"],
        _ => return None,
    })
}

fn check_units(units: &BTreeMap<String, String>, s: Dissipation) -> Vec<String> {
    let mut errs = Vec::new();
    for (field, unit) in units {
        match expected_unit(field, s) {
            None => errs.push(format!("units.{field}: unknown field")),
            Some(accepted) => {
                if !accepted.iter().any(|a| normalize(a) == normalize(unit)) {
                    errs.push(format!(
                        "units.{field}: expected {} for s = {s}, got {unit:?}",
                        accepted[0]
                    ));
                }
            }
        }
    }
    errs
}

pub fn load_physical(path: &Path) -> CliResult<PhysicalParams> {
    let file = read(path)?;
    let phys = file.physical.ok_or_else(|| {
        CliError::Validation(format!("{}: missing [physical] table", path.display()))
    })?;
    if let Some(units) = &file.units {
        let errs = check_units(units, phys.s);
        if !errs.is_empty() {
            return Err(CliError::Validation(format!("{}: {}", path.display(), errs.join("; "))));
        }
    }
    phys.validate()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(phys)
}

pub fn load_model_params(path: &Path) -> CliResult<ModelParams> {
    let file = read(path)?;
    let _ = (file.time_scale, file.potential_scale);
    match (file.params, file.physical) {
        (Some(p), None) => {
            p.validate()
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            Ok(p)
        }
        (None, Some(_)) => Ok(to_dimensionless(&load_physical(path)?)?.params),
        (Some(_), Some(_)) => Err(CliError::Validation(format!(
            "{}: give either [params] or [physical], not both",
            path.display()
        ))),
        (None, None) => Err(CliError::Validation(format!(
            "{}: missing [params] or [physical] table",
            path.display()
        ))),
    }
}
