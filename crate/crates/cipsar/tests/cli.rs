//! End-to-end runs of the `cipsar` binary on coarse grids.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_cipsar");

/// Coarse grid (h = 0.04) with three sources, the middle one over the bump.
fn coarse(extra: &str) -> String {
    format!(
        "seed = 1\n\
         [grid]\nn_x = 101\nn_y = 32\nn_t = 63\nb = 1.24\nT_tilde = 2.48\n\
         [phantom]\nsources = 3\ntarget = [1, 1]\nfd_n_x = 1001\n\
         {extra}"
    )
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn cipsar(args: &[&str], cfg: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(BIN);
    if let Some(c) = cfg {
        cmd.arg("--config").arg(c);
    }
    cmd.arg("--out").arg(out).args(args);
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Numeric columns of a CSV with a header row.
fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn files_under(root: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn bad_value_is_a_config_error_with_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "seed = 1\n\n[solver]\nbeta = 0.9\n");
    let o = cipsar(&["simulate"], Some(&cfg), &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nnx = 10\n");
    let o = cipsar(&["simulate"], Some(&cfg), &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn unknown_suite_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = cipsar(&["verify", "nosuch"], None, &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn missing_input_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = cipsar(&["invert"], None, &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let cfg = write_config(dir.path(), "[paths]\ninput = \"absent\"\n");
    let o = cipsar(&["preprocess"], Some(&cfg), &dir.path().join("out"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn verify_gradcheck_writes_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = cipsar(&["verify", "gradcheck"], None, &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_csv(&out.join("verify_gradcheck.csv"));
    assert!(!rows.is_empty());
}

#[test]
fn noiseless_simulation_ignores_seed() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let cfg_a = write_config(dir.path(), &coarse("").replace("seed = 1", "seed = 5"));
    assert_eq!(code(&cipsar(&["simulate"], Some(&cfg_a), &a)), 0);
    let cfg_b = write_config(dir.path(), &coarse("").replace("seed = 1", "seed = 6"));
    assert_eq!(code(&cipsar(&["simulate"], Some(&cfg_b), &b)), 0);
    let files = files_under(&a);
    assert_eq!(files, files_under(&b));
    for f in files {
        assert_eq!(fs::read(a.join(&f)).unwrap(), fs::read(b.join(&f)).unwrap(), "{}", f.display());
    }
}

#[test]
fn noise_level_sets_snr() {
    let dir = TempDir::new().unwrap();
    let clean = dir.path().join("clean");
    let noisy = dir.path().join("noisy");
    let cfg = write_config(dir.path(), &coarse(""));
    assert_eq!(code(&cipsar(&["simulate"], Some(&cfg), &clean)), 0);
    let cfg = write_config(dir.path(), &coarse("noise = 0.05\n"));
    assert_eq!(code(&cipsar(&["simulate"], Some(&cfg), &noisy)), 0);
    let f = |root: &Path, name: &str| column(&read_csv(&root.join("traces").join(name)), 1);
    let (c, r, n) = (f(&clean, "source_1.csv"), f(&clean, "reference_1.csv"), f(&noisy, "source_1.csv"));
    let signal: Vec<f64> = c.iter().zip(&r).map(|(a, b)| a - b).collect();
    let noise: Vec<f64> = n.iter().zip(&c).map(|(a, b)| a - b).collect();
    let snr = 20.0 * (rms(&signal) / rms(&noise)).log10();
    assert!((snr - 26.0).abs() < 1.0, "snr {snr} dB");
    // sources off the target carry no scattered signal, hence no noise
    assert_eq!(f(&clean, "source_0.csv"), f(&noisy, "source_0.csv"));
}

#[test]
fn homogeneous_trace_settles_at_half() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &coarse("amplitude = 0.0\n"));
    assert_eq!(code(&cipsar(&["simulate"], Some(&cfg), &out)), 0);
    let rows = read_csv(&out.join("traces/source_1.csv"));
    let late = rows.iter().filter(|r| r[0] >= 0.5);
    for r in late {
        assert!((r[1] - 0.5).abs() < 1e-3, "f0({}) = {}", r[0], r[1]);
    }
}

#[test]
fn homogeneous_pipeline_images_unity() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), &coarse("amplitude = 0.0\n"));
    let o = cipsar(&["pipeline", "--format", "csv"], Some(&cfg), &out);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let img = read_csv(&out.join("image.csv"));
    assert!(!img.is_empty());
    for r in &img {
        assert!((r[2] - 1.0).abs() <= 0.02, "c({}, {}) = {}", r[0], r[1], r[2]);
    }
    assert!(!out.join("image.pgm").exists());
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    let one = dir.path().join("one");
    let two = dir.path().join("two");
    let cfg = write_config(dir.path(), &coarse("noise = 0.02\n"));
    let o = cipsar(&["--jobs", "1", "pipeline"], Some(&cfg), &one);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = cipsar(&["--jobs", "2", "pipeline"], Some(&cfg), &two);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let files = files_under(&one);
    assert!(files.iter().any(|f| f.ends_with("image.pgm")));
    assert_eq!(files, files_under(&two));
    for f in files {
        assert_eq!(fs::read(one.join(&f)).unwrap(), fs::read(two.join(&f)).unwrap(), "{}", f.display());
    }
}

/// Frequency samples of a weak background echo at `t = 4` plus, if given,
/// a point echo at time `tau`, for each detector offset. Amplitudes are at
/// the instrument's raw level, well below one after calibration.
fn raw_csv(offsets: &[[f64; 2]], echo: Option<f64>) -> String {
    let mut s = String::from("detector_x,detector_y,freq_ghz,re,im\n");
    for (d, off) in offsets.iter().enumerate() {
        for j in 0..=68 {
            let f = 5.6 + 0.05 * j as f64;
            let k = 2.0 * PI * f;
            let (mut re, mut im) = (1e-7 * (4.0 * k).cos(), 1e-7 * (4.0 * k).sin());
            if let Some(tau) = echo {
                // the centre detector sees the strongest return
                let w = 1e-6 / (1.0 + d.abs_diff(1) as f64);
                re += w * (k * tau).cos();
                im += w * (k * tau).sin();
            }
            s.push_str(&format!("{},{},{f},{re},{im}\n", off[0], off[1]));
        }
    }
    s
}

#[test]
fn radar_records_give_das_and_composite() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    fs::create_dir_all(data.join("raw")).unwrap();
    fs::create_dir_all(data.join("reference")).unwrap();
    let offsets = [[-0.1, 0.0], [0.0, 0.0], [0.1, 0.0]];
    for n in 0..5 {
        let echo = (1..=3).contains(&n).then_some(11.0);
        fs::write(data.join(format!("raw/source_{n}.csv")), raw_csv(&offsets, echo)).unwrap();
        fs::write(data.join(format!("reference/source_{n}.csv")), raw_csv(&offsets, None)).unwrap();
    }
    let cfg = write_config(
        dir.path(),
        &coarse("[paths]\ninput = \"data\"\n").replace("[phantom]\nsources = 3\ntarget = [1, 1]\nfd_n_x = 1001\n", ""),
    );
    let pre = dir.path().join("pre");
    let o = cipsar(&["preprocess"], Some(&cfg), &pre);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(pre.join("das.csv").is_file());
    assert!(pre.join("preprocessed/source_4.csv").is_file());
    let das = read_csv(&pre.join("das.csv"));
    assert!(das.iter().any(|r| r[2] != 0.0));

    let cfg = write_config(dir.path(), &coarse("[paths]\ninput = \"pre\"\n"));
    let img = dir.path().join("img");
    let o = cipsar(&["invert"], Some(&cfg), &img);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["image.csv", "image.pgm", "composite.csv", "composite.pgm"] {
        assert!(img.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn short_trace_is_a_numeric_error() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    fs::create_dir_all(data.join("traces")).unwrap();
    let mut m = String::from("t,value_re\n");
    let mut r = String::from("t,value_re\n");
    for i in 0..=100 {
        let t = i as f64 * 0.01;
        m.push_str(&format!("{t},{}\n", 0.5 + 0.01 * t));
        r.push_str(&format!("{t},0.5\n"));
    }
    fs::write(data.join("traces/source_0.csv"), m).unwrap();
    fs::write(data.join("traces/reference_0.csv"), r).unwrap();
    let cfg = write_config(dir.path(), &coarse("[paths]\ninput = \"data\"\n"));
    let o = cipsar(&["preprocess"], Some(&cfg), &data);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = cipsar(&["invert"], Some(&cfg), &dir.path().join("out"));
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}
