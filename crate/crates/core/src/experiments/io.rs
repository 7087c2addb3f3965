use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::spec::ExperimentSpec;
use super::sweep::ResultRow;

pub const CSV_HEADER: [&str; 7] = [
    "axis",
    "pilot_design",
    "jamming",
    "estimator_mode",
    "mse_closed",
    "mse_empirical",
    "std_err",
];

const SIGNIFICANT_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, `%.12g` style: plain decimal for
/// moderate exponents, scientific otherwise, trailing zeros removed.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };

    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let m = format!("{}.{}", &digits[..1], &digits[1..]);
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{m}e{exp}")
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Writes the CSV (header included) to any sink.
pub fn write_results_to<W: Write>(rows: &[ResultRow], sink: W, header: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink);
    if header {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.write_record([
            r.axis_value.to_string(),
            r.pilot_design.to_string(),
            r.jamming_strategy.to_string(),
            r.estimator_mode.to_string(),
            format_float(r.closed_form_mse),
            opt(r.empirical_mse),
            opt(r.empirical_std_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_results_to(rows, file, true).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| parse_err(e.to_string()))?;
    let header = reader.headers().map_err(|e| parse_err(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(parse_err(format!("unexpected header {header:?}")));
    }

    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let at = |msg: String| parse_err(format!("row {}: {msg}", line + 1));
        let field = |i: usize| record.get(i).unwrap_or("");
        let float = |i: usize| -> Result<f64> {
            field(i)
                .parse::<f64>()
                .map_err(|e| at(format!("column {}: {e}", CSV_HEADER[i])))
        };
        let opt_float = |i: usize| -> Result<Option<f64>> {
            if field(i).is_empty() {
                Ok(None)
            } else {
                float(i).map(Some)
            }
        };
        rows.push(ResultRow {
            axis_value: field(0).parse().map_err(|e| at(format!("axis: {e}")))?,
            pilot_design: field(1).parse().map_err(|e: Error| at(e.to_string()))?,
            jamming_strategy: field(2).parse().map_err(|e: Error| at(e.to_string()))?,
            estimator_mode: field(3).parse().map_err(|e: Error| at(e.to_string()))?,
            closed_form_mse: float(4)?,
            empirical_mse: opt_float(5)?,
            empirical_std_err: opt_float(6)?,
        });
    }
    Ok(rows)
}

/// Sidecar written next to every CSV. `spec` alone regenerates the rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub artifact_version: String,
    pub csv_file: String,
    pub rows: usize,
    pub notes: Vec<String>,
    pub spec: ExperimentSpec,
}

impl Metadata {
    pub fn new(spec: &ExperimentSpec, csv_file: &str, rows: usize, extra_notes: &[String]) -> Self {
        let mut notes = vec![
            format!(
                "jammer channel correlation r_g = {}{}",
                spec.base.jammer_correlation(),
                if spec.base.r_g.is_none() { " (defaulted to r_h)" } else { "" }
            ),
            "channel covariances are the deterministic exponential model; no averaging over covariance realizations".into(),
            "single-shot jamming uses the first L columns of the N x N identity".into(),
            "powers in dB relative to unit noise power: P = 10^(dB/10)".into(),
        ];
        notes.extend_from_slice(extra_notes);
        Self {
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            csv_file: csv_file.into(),
            rows,
            notes,
            spec: spec.clone(),
        }
    }
}

pub fn write_metadata(meta: &Metadata, path: &Path) -> Result<()> {
    let text = toml::to_string_pretty(meta).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text).map_err(io_err(path))
}

fn read_toml(path: &Path) -> Result<toml::Table> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.parse::<toml::Table>().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn load_metadata(path: &Path) -> Result<Metadata> {
    read_toml(path)?
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Loads an experiment spec from either a config file or a metadata
/// sidecar (recognized by its `artifact_version` key).
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let table = read_toml(path)?;
    let parse = |e: toml::de::Error| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let spec: ExperimentSpec = if table.contains_key("artifact_version") {
        table.try_into::<Metadata>().map_err(parse)?.spec
    } else {
        table.try_into().map_err(parse)?
    };
    spec.validate()?;
    Ok(spec)
}

/// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.meta.toml`.
pub fn write_experiment(
    dir: &Path,
    stem: &str,
    spec: &ExperimentSpec,
    rows: &[ResultRow],
    extra_notes: &[String],
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let meta_path = dir.join(format!("{stem}.meta.toml"));
    write_results(rows, &csv_path)?;
    let meta = Metadata::new(spec, &format!("{stem}.csv"), rows.len(), extra_notes);
    write_metadata(&meta, &meta_path)?;
    Ok((csv_path, meta_path))
}
