//! CSV waveform and trace files.
//!
//! Both formats are UTF-8 with LF line endings. Lines starting with `#` carry
//! `key=value` metadata. Numbers are written with 17 significant digits so
//! every `f64` survives a round trip.
//!
//! Waveform files:
//!
//! ```text
//! # sample_rate=10000
//! # channels=a,b,c
//! t,a,b,c
//! 0.0000000000000000e0,...
//! ```
//!
//! Trace files have the header `t,rho,omega,omega_hz,valid` followed by one
//! `b_ij` column per bivector coefficient (one-based indices, `i < j`).

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::estimators::{ComparisonReport, FrequencyTrace};
use crate::ga::{bivector_len, Bivector};
use crate::signals::SampledSignal;

/// Relative tolerance on the spacing of the `t` column.
pub const TIME_UNIFORMITY_TOL: f64 = 1e-9;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub type Metadata = Vec<(String, String)>;

fn write_metadata<W: Write>(w: &mut W, meta: &[(String, String)]) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_waveform<W: Write>(w: &mut W, sig: &SampledSignal, extra: &[(String, String)]) -> Result<()> {
    let mut meta = vec![
        ("sample_rate".to_string(), fmt_f64(sig.sample_rate())),
        ("channels".to_string(), sig.channels().join(",")),
    ];
    meta.extend_from_slice(extra);
    write_metadata(w, &meta)?;
    writeln!(w, "t,{}", sig.channels().join(","))?;
    for (k, row) in sig.rows().iter().enumerate() {
        let mut line = fmt_f64(sig.time(k));
        for x in row {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn waveform_to_string(sig: &SampledSignal, extra: &[(String, String)]) -> String {
    let mut buf = Vec::new();
    write_waveform(&mut buf, sig, extra).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

struct Table {
    metadata: Metadata,
    header: Vec<String>,
    /// (line number, values)
    rows: Vec<(usize, Vec<f64>)>,
}

fn parse_table<R: BufRead>(reader: R) -> Result<Table> {
    let mut metadata = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => header = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected {} fields, found {}", h.len(), fields.len()),
                    });
                }
                let values = fields
                    .iter()
                    .map(|f| match f.parse::<f64>() {
                        Ok(x) if x.is_finite() => Ok(x),
                        _ => Err(Error::Parse { line: lineno, message: format!("not a finite number: {f:?}") }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                rows.push((lineno, values));
            }
        }
    }
    let header = header.ok_or(Error::Parse { line: 0, message: "missing header line".into() })?;
    Ok(Table { metadata, header, rows })
}

fn meta_get<'a>(meta: &'a Metadata, key: &str) -> Option<&'a str> {
    meta.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

/// Parses a waveform file, checking the time base is strictly increasing and uniform.
pub fn read_waveform<R: BufRead>(reader: R) -> Result<SampledSignal> {
    let table = parse_table(reader)?;
    if table.header.first().map(String::as_str) != Some("t") || table.header.len() < 2 {
        return Err(Error::Parse { line: 0, message: "header must be `t,<channel>,...`".into() });
    }
    let channels: Vec<String> = table.header[1..].to_vec();
    if let Some(listed) = meta_get(&table.metadata, "channels") {
        let listed: Vec<&str> = listed.split(',').map(str::trim).collect();
        if listed != channels.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::Parse { line: 0, message: "channel metadata disagrees with header".into() });
        }
    }
    let rows = &table.rows;
    if rows.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: rows.len() });
    }
    let t0 = rows[0].1[0];
    let rate = match meta_get(&table.metadata, "sample_rate") {
        Some(s) => s
            .parse::<f64>()
            .ok()
            .filter(|r| *r > 0.0 && r.is_finite())
            .ok_or(Error::Parse { line: 0, message: format!("bad sample_rate {s:?}") })?,
        None => 1.0 / (rows[1].1[0] - t0),
    };
    let dt = 1.0 / rate;
    let mut prev = f64::NEG_INFINITY;
    for (k, (lineno, values)) in rows.iter().enumerate() {
        let t = values[0];
        if t <= prev {
            return Err(Error::Parse { line: *lineno, message: format!("time {t} is not increasing") });
        }
        let expected = t0 + k as f64 * dt;
        if (t - expected).abs() > TIME_UNIFORMITY_TOL * expected.abs().max(dt) {
            return Err(Error::Parse {
                line: *lineno,
                message: format!("non-uniform time base: t = {t}, expected {expected}"),
            });
        }
        prev = t;
    }
    SampledSignal::new(rate, t0, channels, rows.iter().map(|(_, v)| v[1..].to_vec()).collect())
}

pub fn parse_waveform(text: &str) -> Result<SampledSignal> {
    read_waveform(text.as_bytes())
}

fn trace_dim(trace: &FrequencyTrace) -> usize {
    trace.omega_biv.first().map_or(1, Bivector::dim)
}

pub fn write_trace<W: Write>(w: &mut W, trace: &FrequencyTrace, meta: &[(String, String)]) -> Result<()> {
    let dim = trace_dim(trace);
    if let Some(b) = trace.omega_biv.iter().find(|b| b.dim() != dim) {
        return Err(Error::DimensionMismatch { left: dim, right: b.dim() });
    }
    write_metadata(w, meta)?;
    let mut header = String::from("t,rho,omega,omega_hz,valid");
    for (i, j) in Bivector::index_pairs(dim) {
        header.push_str(&format!(",b_{}{}", i + 1, j + 1));
    }
    writeln!(w, "{header}")?;
    for k in 0..trace.len() {
        let mut line = format!(
            "{},{},{},{},{}",
            fmt_f64(trace.t[k]),
            fmt_f64(trace.rho[k]),
            fmt_f64(trace.omega_mag[k]),
            fmt_f64(trace.omega_mag[k] / std::f64::consts::TAU),
            u8::from(trace.valid[k])
        );
        for b in trace.omega_biv[k].coeffs() {
            line.push(',');
            line.push_str(&fmt_f64(*b));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn trace_to_string(trace: &FrequencyTrace, meta: &[(String, String)]) -> Result<String> {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace, meta)?;
    Ok(String::from_utf8(buf).expect("ascii output"))
}

fn dim_for_coeffs(m: usize) -> Option<usize> {
    (1..=m + 1).find(|&d| bivector_len(d) == m)
}

pub fn read_trace<R: BufRead>(reader: R) -> Result<FrequencyTrace> {
    let table = parse_table(reader)?;
    let fixed = ["t", "rho", "omega", "omega_hz", "valid"];
    if table.header.len() < fixed.len() || table.header[..fixed.len()] != fixed {
        return Err(Error::Parse { line: 0, message: "header must start with `t,rho,omega,omega_hz,valid`".into() });
    }
    let ncoef = table.header.len() - fixed.len();
    let dim = dim_for_coeffs(ncoef)
        .ok_or(Error::Parse { line: 0, message: format!("{ncoef} bivector columns do not match any dimension") })?;
    let mut tr = FrequencyTrace { t: vec![], rho: vec![], omega_mag: vec![], omega_biv: vec![], valid: vec![] };
    for (lineno, v) in &table.rows {
        let valid = match v[4] {
            0.0 => false,
            1.0 => true,
            x => return Err(Error::Parse { line: *lineno, message: format!("valid must be 0 or 1, got {x}") }),
        };
        if valid && v[2] < 0.0 {
            return Err(Error::Parse { line: *lineno, message: "negative omega on a valid sample".into() });
        }
        tr.t.push(v[0]);
        tr.rho.push(v[1]);
        tr.omega_mag.push(v[2]);
        tr.valid.push(valid);
        tr.omega_biv.push(Bivector::from_coeffs(dim, v[fixed.len()..].to_vec())?);
    }
    Ok(tr)
}

pub fn parse_trace(text: &str) -> Result<FrequencyTrace> {
    read_trace(text.as_bytes())
}

/// Voltage curve coordinates for plotting: `t,<channels>,magnitude,flux_curvature`,
/// where `flux_curvature = omega / |v|`.
pub fn write_curve<W: Write>(w: &mut W, sig: &SampledSignal, trace: &FrequencyTrace) -> Result<()> {
    if sig.len() != trace.len() {
        return Err(Error::DimensionMismatch { left: sig.len(), right: trace.len() });
    }
    writeln!(w, "t,{},magnitude,flux_curvature", sig.channels().join(","))?;
    for (k, row) in sig.rows().iter().enumerate() {
        let mag = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        let kappa = if mag > 0.0 { trace.omega_mag[k] / mag } else { 0.0 };
        let mut line = fmt_f64(sig.time(k));
        for x in row.iter().chain([mag, kappa].iter()) {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_report<W: Write>(w: &mut W, r: &ComparisonReport) -> Result<()> {
    writeln!(w, "window_start,window_end,n_samples,rmse_omega,max_abs_dev,mean_a,mean_b,settle_time_a,settle_time_b")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        fmt_f64(r.window.0),
        fmt_f64(r.window.1),
        r.n_samples,
        fmt_f64(r.rmse_omega),
        fmt_f64(r.max_abs_dev),
        fmt_f64(r.mean_a),
        fmt_f64(r.mean_b),
        fmt_f64(r.settle_time_a),
        fmt_f64(r.settle_time_b)
    )?;
    Ok(())
}
