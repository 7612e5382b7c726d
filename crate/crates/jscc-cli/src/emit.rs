//! Bit-stable output: CSV with 17 significant digits and '\n' line endings,
//! a JSON-lines mirror with the same field names, and the manifest sidecar
//! written next to every output file.
//!
//! Rendering goes through `format!("{:.16e}")` only, so two runs with the
//! same seed produce byte-identical files on any platform with IEEE-754
//! doubles.

use std::io;
use std::path::{Path, PathBuf};

use jscc_core::SweepRow;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::cli::Format;

/// 17 significant digits: enough to round-trip an f64 exactly.
pub fn sig(x: f64) -> String {
    format!("{x:.16e}")
}

/// Bound columns render "NA" while their validity precondition has not
/// kicked in.
pub fn opt_sig(x: Option<f64>) -> String {
    match x {
        Some(v) => sig(v),
        None => "NA".to_string(),
    }
}

pub fn sweep_header(n: usize) -> String {
    let mut cols: Vec<String> = ["snr_db", "snr", "n", "eps", "beta", "samples", "mse", "ci"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 1..n {
        cols.push(format!("err_q_{i}"));
    }
    for tail in ["err_e", "opta", "lemma4", "lemma5", "ziv", "theorem_ref"] {
        cols.push(tail.to_string());
    }
    cols.join(",")
}

pub fn sweep_row_csv(r: &SweepRow) -> String {
    let mut fields = vec![
        sig(r.snr_db),
        sig(r.snr),
        r.n.to_string(),
        sig(r.eps),
        sig(r.beta),
        r.samples.to_string(),
        sig(r.mse),
        sig(r.ci_halfwidth),
    ];
    for &e in &r.err_q {
        fields.push(sig(e));
    }
    fields.push(sig(r.err_e));
    fields.push(sig(r.opta));
    fields.push(opt_sig(r.lemma4));
    fields.push(opt_sig(r.lemma5));
    fields.push(sig(r.ziv));
    fields.push(sig(r.theorem_ref));
    fields.join(",")
}

pub fn sweep_row_json(r: &SweepRow) -> Value {
    let mut obj = Map::new();
    obj.insert("snr_db".into(), json!(r.snr_db));
    obj.insert("snr".into(), json!(r.snr));
    obj.insert("n".into(), json!(r.n));
    obj.insert("eps".into(), json!(r.eps));
    obj.insert("beta".into(), json!(r.beta));
    obj.insert("samples".into(), json!(r.samples));
    obj.insert("mse".into(), json!(r.mse));
    obj.insert("ci".into(), json!(r.ci_halfwidth));
    for (i, &e) in r.err_q.iter().enumerate() {
        obj.insert(format!("err_q_{}", i + 1), json!(e));
    }
    obj.insert("err_e".into(), json!(r.err_e));
    obj.insert("opta".into(), json!(r.opta));
    obj.insert("lemma4".into(), json!(r.lemma4));
    obj.insert("lemma5".into(), json!(r.lemma5));
    obj.insert("ziv".into(), json!(r.ziv));
    obj.insert("theorem_ref".into(), json!(r.theorem_ref));
    Value::Object(obj)
}

/// Render simulated rows: CSV keeps a header even for zero rows; JSON is one
/// object per line.
pub fn render_sweep(rows: &[SweepRow], n: usize, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = sweep_header(n);
            out.push('\n');
            for r in rows {
                out.push_str(&sweep_row_csv(r));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&sweep_row_json(r).to_string());
                out.push('\n');
            }
            out
        }
    }
}

/// One grid point of the bound curves (no simulation involved).
#[derive(Debug, Clone)]
pub struct BoundRow {
    pub snr_db: f64,
    pub snr: f64,
    pub eps: f64,
    pub opta: f64,
    pub lemma4: Option<f64>,
    pub lemma5: Option<f64>,
    pub ziv: f64,
    pub theorem_ref: f64,
}

pub const BOUNDS_HEADER: &str = "snr_db,snr,eps,opta,lemma4,lemma5,ziv,theorem_ref";

pub fn bound_row_csv(r: &BoundRow) -> String {
    [
        sig(r.snr_db),
        sig(r.snr),
        sig(r.eps),
        sig(r.opta),
        opt_sig(r.lemma4),
        opt_sig(r.lemma5),
        sig(r.ziv),
        sig(r.theorem_ref),
    ]
    .join(",")
}

pub fn bound_row_json(r: &BoundRow) -> Value {
    let mut obj = Map::new();
    obj.insert("snr_db".into(), json!(r.snr_db));
    obj.insert("snr".into(), json!(r.snr));
    obj.insert("eps".into(), json!(r.eps));
    obj.insert("opta".into(), json!(r.opta));
    obj.insert("lemma4".into(), json!(r.lemma4));
    obj.insert("lemma5".into(), json!(r.lemma5));
    obj.insert("ziv".into(), json!(r.ziv));
    obj.insert("theorem_ref".into(), json!(r.theorem_ref));
    Value::Object(obj)
}

pub fn render_bounds(rows: &[BoundRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(BOUNDS_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&bound_row_csv(r));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&bound_row_json(r).to_string());
                out.push('\n');
            }
            out
        }
    }
}

/// Reproducibility sidecar written as `<out>.manifest.json`: re-running the
/// recorded command with the recorded seed reproduces the output
/// byte-for-byte (the timestamp is informational).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

pub fn write_manifest(
    out: &Path,
    command: &str,
    config: Value,
    seed: Option<u64>,
) -> io::Result<PathBuf> {
    let manifest = RunManifest {
        command: command.to_string(),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: time::OffsetDateTime::now_utc()
            .format(&time::format_description::well_known::Rfc3339)
            .map_err(|e| io::Error::other(e.to_string()))?,
        outputs: vec![out.display().to_string()],
    };
    let path = PathBuf::from(format!("{}.manifest.json", out.display()));
    let mut body = serde_json::to_string_pretty(&manifest)?;
    body.push('\n');
    std::fs::write(&path, body)?;
    Ok(path)
}
