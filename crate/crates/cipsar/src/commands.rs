//! Subcommands. Each one validates everything it needs before writing
//! anything to the output directory.

use std::path::{Path, PathBuf};

use cipsar_core::medium::travel_time;
use cipsar_core::preprocess::{
    background_subtract, calibrate, delay_and_sum, propagate, select_optimal_detector, to_time_domain, truncate,
};
use cipsar_core::slantimage::{assemble, postprocess, to_pgm, SlantRangeImage};
use cipsar_core::TimeTrace;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{CliError, Result};
use crate::invert::invert_trace;
use crate::io;
use crate::simulate::{bump_medium, simulate_source, PHANTOM_NODES};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImageFormat {
    Csv,
    Pgm,
    #[default]
    Both,
}

impl ImageFormat {
    fn csv(self) -> bool {
        self != ImageFormat::Pgm
    }
    fn pgm(self) -> bool {
        self != ImageFormat::Csv
    }
}

/// How preprocessed traces map onto the unit depth interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessMeta {
    /// `synthetic` or `radar`.
    pub mode: String,
    /// Range at depth 0 of the reconstruction interval.
    pub origin: f64,
    /// Range length of the unit interval; times are divided by it.
    pub scale: f64,
}

const META: &str = "preprocessed/meta.toml";

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Indices `n` of the files `source_{n}.csv` in `dir`, ascending.
fn source_indices(dir: &Path) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(CliError::io(dir))? {
        let name = entry.map_err(CliError::io(dir))?.file_name();
        let name = name.to_string_lossy();
        if let Some(n) = name.strip_prefix("source_").and_then(|r| r.strip_suffix(".csv")) {
            if let Ok(n) = n.parse() {
                out.push(n);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn require_dir(p: &Path, what: &str) -> Result<()> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} directory {} does not exist", p.display())))
    }
}

/// `paths.input`, which must name an existing directory.
pub fn input_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
    let p = cfg
        .paths
        .input
        .clone()
        .ok_or_else(|| CliError::Config("paths.input is required for this command".into()))?;
    require_dir(&p, "input")?;
    Ok(p)
}

/// Writes `traces/source_{n}.csv`, `traces/reference_{n}.csv` and
/// `truth/medium_{n}.csv`.
pub fn cmd_simulate(cfg: &PipelineConfig, out: &Path, jobs: usize) -> Result<()> {
    let ph = &cfg.phantom;
    let target = bump_medium(ph.amplitude, ph.support, PHANTOM_NODES).map_err(CliError::numeric("phantom"))?;
    let need = travel_time(&target, cfg.grid.h_y()).map_err(CliError::numeric("phantom"))?.b();
    if need > cfg.grid.b + 1e-9 {
        return Err(CliError::Config(format!(
            "grid.b = {} is below the travel time {need} through the phantom",
            cfg.grid.b
        )));
    }
    let t_end = cfg.grid.t_tilde.max(cfg.grid.t_data.unwrap_or(0.0)) + 0.1;
    let unity = bump_medium(0.0, ph.support, PHANTOM_NODES).map_err(CliError::numeric("phantom"))?;
    let results = pool(jobs)?.install(|| {
        (0..ph.sources)
            .into_par_iter()
            .map(|n| {
                let c = if (ph.target[0]..=ph.target[1]).contains(&n) { &target } else { &unity };
                simulate_source(c, t_end, ph.fd_n_x, ph.noise, cfg.seed, n as u64)
                    .map(|s| (c.clone(), s))
                    .map_err(CliError::numeric(format!("source {n}")))
            })
            .collect::<Vec<_>>()
    });
    for (n, r) in results.into_iter().enumerate() {
        let (c, s) = r?;
        io::write_trace(&out.join(format!("traces/source_{n}.csv")), &s.trace)?;
        io::write_trace(&out.join(format!("traces/reference_{n}.csv")), &s.reference)?;
        io::write_medium(&out.join(format!("truth/medium_{n}.csv")), &c)?;
    }
    Ok(())
}

struct RadarSource {
    trace: TimeTrace<Complex64>,
    /// Background-subtracted trace of the chosen detector at the plane `a`.
    das_input: TimeTrace<Complex64>,
}

fn radar_source(cfg: &PipelineConfig, input: &Path, n: usize) -> Result<RadarSource> {
    let geom = cfg.geometry();
    let raw = io::read_raw(&input.join(format!("raw/source_{n}.csv")), n)?;
    let bg = io::read_raw(&input.join(format!("reference/source_{n}.csv")), n)?;
    let ctx = || format!("source {n}");
    let meas = to_time_domain(&raw, &geom).map_err(CliError::numeric(ctx()))?;
    let refs = to_time_domain(&bg, &geom).map_err(CliError::numeric(ctx()))?;
    if meas.len() != refs.len() {
        return Err(CliError::Format {
            path: input.join(format!("reference/source_{n}.csv")),
            msg: format!("{} detectors in the reference, {} in the measurement", refs.len(), meas.len()),
        });
    }
    let sub = meas
        .iter()
        .zip(&refs)
        .map(|(m, r)| background_subtract(m, r))
        .collect::<cipsar_core::Result<Vec<_>>>()
        .map_err(CliError::numeric(ctx()))?;
    let shifted = sub
        .iter()
        .map(|u| propagate(u, geom.a, geom.a_tilde))
        .collect::<cipsar_core::Result<Vec<_>>>()
        .map_err(CliError::numeric(ctx()))?;
    let (best, u) = select_optimal_detector(&shifted).map_err(CliError::numeric(ctx()))?;
    let u = truncate(&u, geom.trunc_radius).map_err(CliError::numeric(ctx()))?;
    let u = calibrate(&u, geom.cf).map_err(CliError::numeric(ctx()))?;
    Ok(RadarSource {
        trace: u,
        das_input: sub[best].clone(),
    })
}

/// `raw/` + `reference/` frequency sweeps go through the full chain and
/// delay-and-sum; `traces/` from `simulate` only get the background removed.
pub fn cmd_preprocess(cfg: &PipelineConfig, input: &Path, out: &Path, jobs: usize) -> Result<()> {
    require_dir(input, "input")?;
    let geom = cfg.geometry();
    if input.join("raw").is_dir() {
        require_dir(&input.join("reference"), "reference")?;
        let ids = source_indices(&input.join("raw"))?;
        if ids.is_empty() {
            return Err(CliError::Config(format!("no raw/source_*.csv in {}", input.display())));
        }
        let results = pool(jobs)?.install(|| {
            ids.par_iter()
                .map(|&n| radar_source(cfg, input, n))
                .collect::<Vec<_>>()
        });
        let sources = results.into_iter().collect::<Result<Vec<_>>>()?;
        let das_in: Vec<TimeTrace<Complex64>> = sources.iter().map(|s| s.das_input.clone()).collect();
        let das = delay_and_sum(&das_in, &geom).map_err(CliError::numeric("delay-and-sum"))?;
        for (s, &n) in sources.iter().zip(&ids) {
            io::write_trace_complex(&out.join(format!("preprocessed/source_{n}.csv")), &s.trace)?;
        }
        let cells: Vec<[f64; 3]> = (0..das.n_sources)
            .flat_map(|s| {
                let d = &das;
                (0..d.n_range).map(move |l| {
                    [s as f64 * d.source_step, geom.a + l as f64 * d.range_step, d.get(s, l)]
                })
            })
            .collect();
        io::write_cells(&out.join("das.csv"), &cells)?;
        write_meta(
            out,
            &PreprocessMeta {
                mode: "radar".into(),
                origin: geom.a_tilde,
                scale: geom.b_tilde - geom.a_tilde,
            },
        )
    } else if input.join("traces").is_dir() {
        let ids = source_indices(&input.join("traces"))?;
        if ids.is_empty() {
            return Err(CliError::Config(format!("no traces/source_*.csv in {}", input.display())));
        }
        for &n in &ids {
            let m = io::read_trace(&input.join(format!("traces/source_{n}.csv")))?;
            let r = io::read_trace(&input.join(format!("traces/reference_{n}.csv")))?;
            let phi = background_subtract(&m, &r).map_err(CliError::numeric(format!("source {n}")))?;
            io::write_trace(&out.join(format!("preprocessed/source_{n}.csv")), &phi)?;
        }
        write_meta(
            out,
            &PreprocessMeta {
                mode: "synthetic".into(),
                origin: 0.0,
                scale: 1.0,
            },
        )
    } else {
        Err(CliError::Config(format!(
            "{} holds neither raw/ nor traces/",
            input.display()
        )))
    }
}

fn write_meta(out: &Path, meta: &PreprocessMeta) -> Result<()> {
    let path = out.join(META);
    let text = toml::to_string(meta).map_err(|e| CliError::Format {
        path: path.clone(),
        msg: e.to_string(),
    })?;
    std::fs::write(&path, text).map_err(CliError::io(path))
}

fn read_meta(input: &Path) -> Result<PreprocessMeta> {
    let path = input.join(META);
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    toml::from_str(&text).map_err(|e| CliError::Format {
        path,
        msg: e.to_string(),
    })
}

/// Rectangle `(l1, l2, s1, s2)` of the image covering the non-zero
/// delay-and-sum cells.
fn das_rect(cells: &[[f64; 3]], img: &SlantRangeImage) -> Option<(usize, usize, usize, usize)> {
    let hot: Vec<&[f64; 3]> = cells.iter().filter(|c| c[2] != 0.0).collect();
    if hot.is_empty() {
        return None;
    }
    let fold = |i: usize, f: fn(f64, f64) -> f64, init: f64| hot.iter().fold(init, |m, c| f(m, c[i]));
    let (x1, x2) = (fold(0, f64::min, f64::INFINITY), fold(0, f64::max, f64::NEG_INFINITY));
    let (y1, y2) = (fold(1, f64::min, f64::INFINITY), fold(1, f64::max, f64::NEG_INFINITY));
    let s_of = |x: f64| ((x / img.source_step()).round().max(0.0) as usize).min(img.n_sources() - 1);
    Some((img.range_index(y1), img.range_index(y2), s_of(x1), s_of(x2)))
}

fn write_image(out: &Path, stem: &str, img: &SlantRangeImage, format: ImageFormat) -> Result<()> {
    if format.csv() {
        io::write_image(&out.join(format!("{stem}.csv")), img)?;
    }
    if format.pgm() {
        io::write_pgm(&out.join(format!("{stem}.pgm")), &to_pgm(img))?;
    }
    Ok(())
}

/// Per-source profiles and histories under `reconstruction/`, the stacked
/// image, and the composite image when delay-and-sum output is present.
pub fn cmd_invert(cfg: &PipelineConfig, input: &Path, out: &Path, jobs: usize, format: ImageFormat) -> Result<()> {
    require_dir(&input.join("preprocessed"), "preprocessed")?;
    let meta = read_meta(input)?;
    if !(meta.scale > 0.0) {
        return Err(CliError::Format {
            path: input.join(META),
            msg: "scale must be positive".into(),
        });
    }
    let ids = source_indices(&input.join("preprocessed"))?;
    if ids.is_empty() {
        return Err(CliError::Config(format!("no preprocessed traces in {}", input.display())));
    }
    let traces = ids
        .iter()
        .map(|&n| {
            let tr = io::read_trace(&input.join(format!("preprocessed/source_{n}.csv")))?;
            TimeTrace::new(tr.samples().to_vec(), tr.dt() / meta.scale, tr.t0() / meta.scale)
                .map_err(CliError::numeric(format!("source {n}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let settings = cfg.inversion();
    let results = pool(jobs)?.install(|| {
        traces
            .par_iter()
            .zip(ids.par_iter())
            .map(|(tr, &n)| invert_trace(tr, &settings).map_err(CliError::numeric(format!("source {n}"))))
            .collect::<Vec<_>>()
    });
    let mut lines = Vec::with_capacity(ids.len());
    for (r, &n) in results.into_iter().zip(&ids) {
        let inv = r?;
        let rep = &inv.report;
        eprintln!(
            "source {n}: {} iterations, converged {}, kappa {}{}",
            rep.history.len() - 1,
            rep.converged,
            rep.kappa,
            if rep.ball_exceeded { ", left the ball of radius M" } else { "" }
        );
        io::write_medium(&out.join(format!("reconstruction/medium_{n}.csv")), &inv.medium)?;
        io::write_history(&out.join(format!("reconstruction/history_{n}.csv")), &rep.history)?;
        lines.push(inv.medium);
    }
    let img = assemble(&lines, cfg.geometry.source_step, meta.origin, meta.scale)
        .map_err(CliError::numeric("assemble"))?;
    write_image(out, "image", &img, format)?;
    let das = input.join("das.csv");
    if das.is_file() {
        let cells = io::read_cells(&das)?;
        if let Some(rect) = das_rect(&cells, &img) {
            let comp = postprocess(&img, rect).map_err(CliError::numeric("postprocess"))?;
            write_image(out, "composite", &comp, format)?;
        }
    }
    Ok(())
}

pub fn cmd_pipeline(cfg: &PipelineConfig, out: &Path, jobs: usize, format: ImageFormat) -> Result<()> {
    cmd_simulate(cfg, out, jobs)?;
    cmd_preprocess(cfg, out, out, jobs)?;
    cmd_invert(cfg, out, out, jobs, format)
}

pub fn cmd_verify(cfg: &PipelineConfig, suite: &str, out: &Path) -> Result<verify::SuiteReport> {
    let report = match suite {
        "gradcheck" => verify::gradcheck(&verify::GradcheckOptions {
            n: 20,
            seed: cfg.seed,
            ..Default::default()
        }),
        "convexity" => verify::convexity(&verify::ConvexityOptions {
            seed: cfg.seed,
            ..Default::default()
        }),
        "lemma1" => verify::lemma1(&Default::default()),
        "oracle" => verify::oracle(&Default::default()),
        other => {
            return Err(CliError::Config(format!(
                "unknown suite {other:?}; expected one of {}",
                verify::SUITES.join(", ")
            )))
        }
    }
    .map_err(CliError::numeric(suite))?;
    let path = out.join(format!("verify_{suite}.csv"));
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Format {
        path: path.clone(),
        msg: e.to_string(),
    })?;
    let fmt_err = |e: csv::Error| CliError::Format {
        path: path.clone(),
        msg: e.to_string(),
    };
    w.write_record(&report.header).map_err(fmt_err)?;
    for row in &report.rows {
        w.write_record(row.iter().map(|v| io::num(*v))).map_err(fmt_err)?;
    }
    w.flush().map_err(CliError::io(&path))?;
    Ok(report)
}
