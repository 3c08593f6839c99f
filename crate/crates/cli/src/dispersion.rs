use serde::Serialize;
use viscwave::wave_models::{dispersion, dispersion_inviscid};
use viscwave::ModelParams;

use crate::{CliError, CliResult, Format, FORMAT_VERSION};

pub const CSV_HEADER: &str = "k,re_omega_plus,im_omega_plus,re_omega_minus,im_omega_minus,omega_inviscid";

#[derive(Debug, Serialize)]
pub struct Row {
    pub k: i64,
    pub re_omega_plus: f64,
    pub im_omega_plus: f64,
    pub re_omega_minus: f64,
    pub im_omega_minus: f64,
    pub omega_inviscid: f64,
}

#[derive(Serialize)]
struct Table<'a> {
    format_version: u32,
    params: &'a ModelParams,
    rows: Vec<Row>,
}

pub fn rows(p: &ModelParams, k_max: i64) -> CliResult<Vec<Row>> {
    if k_max < 1 {
        return Err(CliError::Validation(format!("k_max must be at least 1, got {k_max}")));
    }
    Ok((0..=k_max)
        .map(|k| {
            let b = dispersion(k, p);
            Row {
                k,
                re_omega_plus: b.omega_plus.re,
                im_omega_plus: b.omega_plus.im,
                re_omega_minus: b.omega_minus.re,
                im_omega_minus: b.omega_minus.im,
                omega_inviscid: dispersion_inviscid(k, p.beta),
            }
        })
        .collect())
}

pub fn render(p: &ModelParams, k_max: i64, format: Format) -> CliResult<String> {
    let rows = rows(p, k_max)?;
    Ok(match format {
        Format::Csv => {
            let mut out = format!("# format_version={FORMAT_VERSION}\n# s={}\n{CSV_HEADER}\n", p.s);
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.k, r.re_omega_plus, r.im_omega_plus, r.re_omega_minus, r.im_omega_minus, r.omega_inviscid
                ));
            }
            out
        }
        Format::Json => {
            let table = Table {
                format_version: FORMAT_VERSION,
                params: p,
                rows,
            };
            serde_json::to_string_pretty(&table).map_err(|e| CliError::Other(e.into()))? + "\n"
        }
    })
}
