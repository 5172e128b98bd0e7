//! CSV and PGM files.
//!
//! Numbers are written with 17 significant digits, which is enough for an
//! exact round trip of every `f64`.

use std::fs::File;
use std::path::Path;

use cipsar_core::convexify::HistoryEntry;
use cipsar_core::preprocess::RawSarRecord;
use cipsar_core::slantimage::SlantRangeImage;
use cipsar_core::{MediumProfile, SpaceTimeField, TimeTrace};
use num_complex::Complex64;

use crate::error::{CliError, Result};

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let f = File::create(path).map_err(CliError::io(path))?;
    Ok(csv::Writer::from_writer(f))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| format_err(path, e.to_string())
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = f64>,
{
    let mut w = writer(path)?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        let rec: Vec<String> = row.into_iter().map(num).collect();
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// Header plus numeric rows.
fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let f = File::open(path).map_err(CliError::io(path))?;
    let mut r = csv::Reader::from_reader(f);
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err(path))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let row = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| format_err(path, format!("row {}: {e}: {s:?}", i + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn expect_header(path: &Path, header: &[String], want: &[&str]) -> Result<()> {
    if header.len() != want.len() || header.iter().zip(want).any(|(a, b)| a != b) {
        return Err(format_err(path, format!("expected header {}, found {}", want.join(","), header.join(","))));
    }
    Ok(())
}

/// First node and step of a uniform axis.
fn uniform_axis(path: &Path, xs: &[f64], what: &str) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(format_err(path, format!("{what} axis needs at least 2 samples")));
    }
    let (x0, h) = (xs[0], (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64);
    if !(h > 0.0) {
        return Err(format_err(path, format!("{what} axis must be increasing")));
    }
    for (i, &x) in xs.iter().enumerate() {
        let want = x0 + i as f64 * h;
        if (x - want).abs() > 1e-9 * h.max(want.abs()) {
            return Err(format_err(path, format!("{what} axis is not uniform at row {}", i + 2)));
        }
    }
    Ok((x0, h))
}

pub fn write_trace(path: &Path, tr: &TimeTrace) -> Result<()> {
    let rows = (0..tr.len()).map(|i| [tr.time(i), tr.samples()[i]]);
    write_rows(path, &["t", "value_re"], rows)
}

pub fn write_trace_complex(path: &Path, tr: &TimeTrace<Complex64>) -> Result<()> {
    let rows = (0..tr.len()).map(|i| [tr.time(i), tr.samples()[i].re, tr.samples()[i].im]);
    write_rows(path, &["t", "value_re", "value_im"], rows)
}

/// Reads real or complex trace files; the imaginary column defaults to zero.
pub fn read_trace_complex(path: &Path) -> Result<TimeTrace<Complex64>> {
    let (header, rows) = read_rows(path)?;
    let complex = header.len() == 3;
    if complex {
        expect_header(path, &header, &["t", "value_re", "value_im"])?;
    } else {
        expect_header(path, &header, &["t", "value_re"])?;
    }
    let ts: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (t0, dt) = uniform_axis(path, &ts, "time")?;
    let vals = rows
        .iter()
        .map(|r| Complex64::new(r[1], if complex { r[2] } else { 0.0 }))
        .collect();
    TimeTrace::new(vals, dt, t0).map_err(|e| format_err(path, e.to_string()))
}

pub fn read_trace(path: &Path) -> Result<TimeTrace> {
    Ok(read_trace_complex(path)?.re())
}

pub fn write_medium(path: &Path, c: &MediumProfile) -> Result<()> {
    let rows = (0..c.n_x()).map(|i| [c.x(i), c.samples()[i]]);
    write_rows(path, &["x", "c"], rows)
}

pub fn read_medium(path: &Path) -> Result<MediumProfile> {
    let (header, rows) = read_rows(path)?;
    expect_header(path, &header, &["x", "c"])?;
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    uniform_axis(path, &xs, "x")?;
    let cs = rows.iter().map(|r| r[1]).collect();
    MediumProfile::new(cs, xs[0], xs[xs.len() - 1]).map_err(|e| format_err(path, e.to_string()))
}

pub fn write_field(path: &Path, f: &SpaceTimeField) -> Result<()> {
    let rows = (0..f.n_y()).flat_map(|i| (0..f.n_t()).map(move |n| [f.y(i), f.t(n), f.get(i, n)]));
    write_rows(path, &["y", "t", "value"], rows)
}

pub fn write_history(path: &Path, h: &[HistoryEntry]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iter", "cost", "step_norm"]).map_err(csv_err(path))?;
    for e in h {
        w.write_record([e.iter.to_string(), num(e.cost), num(e.step_norm)])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// Image cells `x_s,y_s,value` with sources as the outer loop.
pub fn write_image(path: &Path, img: &SlantRangeImage) -> Result<()> {
    let rows = (0..img.n_sources()).flat_map(|s| {
        (0..img.n_range()).map(move |l| [img.source_pos(s), img.range(l), img.get(s, l)])
    });
    write_rows(path, &["x_s", "y_s", "value"], rows)
}

pub fn write_cells(path: &Path, cells: &[[f64; 3]]) -> Result<()> {
    write_rows(path, &["x_s", "y_s", "value"], cells.iter().copied())
}

pub fn read_cells(path: &Path) -> Result<Vec<[f64; 3]>> {
    let (header, rows) = read_rows(path)?;
    expect_header(path, &header, &["x_s", "y_s", "value"])?;
    Ok(rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}

pub fn write_pgm(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(path, bytes).map_err(CliError::io(path))
}

/// Frequency sweep of one source: one row per (detector, frequency), the
/// detectors in order of first appearance, each with the same frequencies.
pub fn read_raw(path: &Path, source_index: usize) -> Result<RawSarRecord> {
    let (header, rows) = read_rows(path)?;
    expect_header(path, &header, &["detector_x", "detector_y", "freq_ghz", "re", "im"])?;
    let mut detectors: Vec<[f64; 2]> = Vec::new();
    let mut per_det: Vec<Vec<(f64, Complex64)>> = Vec::new();
    for r in &rows {
        let d = [r[0], r[1]];
        let k = match detectors.iter().position(|&e| e == d) {
            Some(k) => k,
            None => {
                detectors.push(d);
                per_det.push(Vec::new());
                detectors.len() - 1
            }
        };
        per_det[k].push((r[2], Complex64::new(r[3], r[4])));
    }
    if detectors.is_empty() {
        return Err(format_err(path, "no data rows"));
    }
    let freqs: Vec<f64> = per_det[0].iter().map(|e| e.0).collect();
    let mut values = Vec::with_capacity(detectors.len() * freqs.len());
    for (k, row) in per_det.iter().enumerate() {
        if row.len() != freqs.len() || row.iter().zip(&freqs).any(|(e, f)| e.0 != *f) {
            return Err(format_err(path, format!("detector {k} has a different frequency list")));
        }
        values.extend(row.iter().map(|e| e.1));
    }
    RawSarRecord::new(source_index, detectors, freqs, values).map_err(|e| format_err(path, e.to_string()))
}

pub fn write_raw(path: &Path, rec: &RawSarRecord) -> Result<()> {
    let nf = rec.freqs.len();
    let rows = rec.detector_offsets.iter().enumerate().flat_map(|(d, off)| {
        rec.freqs.iter().enumerate().map(move |(j, &f)| {
            let v = rec.values[d * nf + j];
            [off[0], off[1], f, v.re, v.im]
        })
    });
    write_rows(path, &["detector_x", "detector_y", "freq_ghz", "re", "im"], rows)
}
