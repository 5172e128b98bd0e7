//! Pipeline configuration read from a TOML file.
//!
//! Every section is optional and falls back to the defaults below. Unknown
//! keys are rejected so that typos do not silently turn into defaults.
//! Semantic errors name the line of the offending key when the key is
//! present in the file.

use std::path::{Path, PathBuf};

use cipsar_core::convexify::{CarlemanParams, DescentOptions};
use cipsar_core::preprocess::GeometryConfig;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Upper bound on worker threads; `--jobs` overrides it.
    pub jobs: usize,
    pub paths: Paths,
    pub geometry: GeometrySection,
    pub solver: SolverSection,
    pub grid: GridSection,
    pub phantom: PhantomSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            jobs: 1,
            paths: Paths::default(),
            geometry: GeometrySection::default(),
            solver: SolverSection::default(),
            grid: GridSection::default(),
            phantom: PhantomSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Dataset read by `preprocess` and `invert`.
    pub input: Option<PathBuf>,
    pub output: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            input: None,
            output: PathBuf::from("out"),
        }
    }
}

/// Radar geometry in dimensionless units (length 0.3 m, time 1 ns).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub a: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub c0: f64,
    pub source_step: f64,
    pub cf: f64,
    pub n_time: usize,
    pub t_end: f64,
    pub band_ghz: [f64; 2],
    pub trunc_radius: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = GeometryConfig::default();
        Self {
            a: g.a,
            a_tilde: g.a_tilde,
            b_tilde: g.b_tilde,
            c0: g.c0,
            source_step: g.source_step,
            cf: g.cf,
            n_time: g.n_time,
            t_end: g.t_end,
            band_ghz: [g.band_ghz.0, g.band_ghz.1],
            trunc_radius: g.trunc_radius,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
    #[serde(rename = "M")]
    pub m_ball: f64,
    pub theta_frac: f64,
    pub n_max: usize,
    pub tol: f64,
    /// Margin of the reporting interval `(0, 2βb - μ)`; default `0.1 βb`.
    pub mu: Option<f64>,
    pub auto_halve: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        let p = CarlemanParams::default();
        let d = DescentOptions::default();
        Self {
            lambda: p.lambda,
            beta: p.beta,
            gamma: p.gamma,
            kappa: p.kappa,
            m_ball: p.m_ball,
            theta_frac: p.theta_frac,
            n_max: d.n_max,
            tol: d.tol,
            mu: None,
            auto_halve: d.auto_halve,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Nodes of each reconstructed c(x) on [0,1].
    pub n_x: usize,
    pub n_y: usize,
    pub n_t: usize,
    pub b: f64,
    #[serde(rename = "T_tilde")]
    pub t_tilde: f64,
    /// Length of the measured time window, if known.
    #[serde(rename = "T")]
    pub t_data: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_x: 501,
            n_y: 125,
            n_t: 249,
            b: 1.24,
            t_tilde: 2.48,
            t_data: None,
        }
    }
}

impl GridSection {
    pub fn h_y(&self) -> f64 {
        self.b / (self.n_y - 1) as f64
    }
    pub fn h_t(&self) -> f64 {
        self.t_tilde / (self.n_t - 1) as f64
    }
}

/// Synthetic scene for `simulate`: sources `target[0]..=target[1]` see the
/// profile `1 + amplitude sin⁴(π(x - x1)/(x2 - x1))` on `support = [x1, x2]`,
/// all others see a homogeneous medium.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhantomSection {
    pub sources: usize,
    pub target: [usize; 2],
    pub amplitude: f64,
    pub support: [f64; 2],
    /// Noise rms as a fraction of the rms of the scattered signal.
    pub noise: f64,
    /// Nodes of the finite-difference forward solver.
    pub fd_n_x: usize,
}

impl Default for PhantomSection {
    fn default() -> Self {
        Self {
            sources: 9,
            target: [3, 5],
            amplitude: 0.5,
            support: [0.3, 0.6],
            noise: 0.0,
            fd_n_x: 4001,
        }
    }
}

impl PipelineConfig {
    /// Parse and validate; relative paths are taken from the config file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&src).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(input) = &cfg.paths.input {
            if input.is_relative() {
                cfg.paths.input = Some(base.join(input));
            }
        }
        if cfg.paths.output.is_relative() {
            cfg.paths.output = base.join(&cfg.paths.output);
        }
        Ok(cfg)
    }

    pub fn from_toml(src: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate(src)?;
        Ok(cfg)
    }

    fn validate(&self, src: &str) -> Result<()> {
        let fail = |section: &str, key: &str, msg: String| -> CliError {
            let name = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            match locate(src, section, key) {
                Some(line) => CliError::Config(format!("line {line}: {name}: {msg}")),
                None => CliError::Config(format!("{name}: {msg}")),
            }
        };
        if self.jobs == 0 {
            return Err(fail("", "jobs", "must be at least 1".into()));
        }
        self.geometry().validate().map_err(|e| {
            let at = src.lines().position(|l| l.trim() == "[geometry]");
            match at {
                Some(i) => CliError::Config(format!("line {}: geometry: {e}", i + 1)),
                None => CliError::Config(format!("geometry: {e}")),
            }
        })?;
        let s = &self.solver;
        self.params().validate().map_err(|e| {
            let key = if !(s.lambda >= 0.0 && s.lambda.is_finite()) {
                "lambda"
            } else if !(s.beta > 0.0 && s.beta < 0.5) {
                "beta"
            } else if !(s.gamma > 0.0 && s.gamma < 1.0) {
                "gamma"
            } else if !(s.kappa > 0.0 && s.kappa < 1.0) {
                "kappa"
            } else if !(s.m_ball > 0.0) {
                "M"
            } else {
                "theta_frac"
            };
            fail("solver", key, e.to_string())
        })?;
        if s.n_max == 0 {
            return Err(fail("solver", "n_max", "must be at least 1".into()));
        }
        if !(s.tol > 0.0) {
            return Err(fail("solver", "tol", "must be positive".into()));
        }
        let g = &self.grid;
        if !(g.b > 0.0 && g.b.is_finite()) {
            return Err(fail("grid", "b", "must be positive".into()));
        }
        if g.n_y < 5 {
            return Err(fail("grid", "n_y", "needs at least 5 nodes".into()));
        }
        if g.n_t < 5 {
            return Err(fail("grid", "n_t", "needs at least 5 nodes".into()));
        }
        if g.n_x < 2 {
            return Err(fail("grid", "n_x", "needs at least 2 nodes".into()));
        }
        let need = (2.0 * g.b).max(g.t_data.unwrap_or(0.0));
        if g.t_tilde < need * (1.0 - 1e-12) {
            return Err(fail(
                "grid",
                "T_tilde",
                format!("must be at least max(2b, T) = {need}, got {}", g.t_tilde),
            ));
        }
        if let Some(mu) = s.mu {
            if !(mu > 0.0 && mu < 2.0 * s.beta * g.b) {
                return Err(fail("solver", "mu", format!("must lie in (0, 2 beta b) = (0, {})", 2.0 * s.beta * g.b)));
            }
        }
        let p = &self.phantom;
        if p.sources == 0 {
            return Err(fail("phantom", "sources", "must be at least 1".into()));
        }
        if p.target[0] > p.target[1] || p.target[1] >= p.sources {
            return Err(fail("phantom", "target", format!("must be an index range inside 0..{}", p.sources)));
        }
        if !(p.amplitude >= 0.0 && p.amplitude.is_finite()) {
            return Err(fail("phantom", "amplitude", "must be finite and non-negative".into()));
        }
        if !(0.0 < p.support[0] && p.support[0] < p.support[1] && p.support[1] < 1.0) {
            return Err(fail("phantom", "support", "must satisfy 0 < x1 < x2 < 1".into()));
        }
        if !(p.noise >= 0.0 && p.noise.is_finite()) {
            return Err(fail("phantom", "noise", "must be finite and non-negative".into()));
        }
        if p.fd_n_x < 101 {
            return Err(fail("phantom", "fd_n_x", "needs at least 101 nodes".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> GeometryConfig {
        let g = &self.geometry;
        GeometryConfig {
            a: g.a,
            a_tilde: g.a_tilde,
            b_tilde: g.b_tilde,
            c0: g.c0,
            source_step: g.source_step,
            cf: g.cf,
            n_time: g.n_time,
            t_end: g.t_end,
            band_ghz: (g.band_ghz[0], g.band_ghz[1]),
            trunc_radius: g.trunc_radius,
        }
    }

    pub fn params(&self) -> CarlemanParams {
        let s = &self.solver;
        CarlemanParams {
            lambda: s.lambda,
            beta: s.beta,
            gamma: s.gamma,
            kappa: s.kappa,
            m_ball: s.m_ball,
            theta_frac: s.theta_frac,
        }
    }

    pub fn descent(&self) -> DescentOptions {
        DescentOptions {
            n_max: self.solver.n_max,
            tol: self.solver.tol,
            auto_halve: self.solver.auto_halve,
            ..DescentOptions::default()
        }
    }

    pub fn inversion(&self) -> crate::invert::InversionSettings {
        let g = &self.grid;
        crate::invert::InversionSettings {
            params: self.params(),
            descent: self.descent(),
            b: g.b,
            t_tilde: g.t_tilde,
            n_y: g.n_y,
            n_t: g.n_t,
            n_x: g.n_x,
            mu: self.solver.mu,
        }
    }
}

/// 1-based line of `key = ...` inside `[section]` (top level for `""`).
fn locate(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            current = rest.trim_end_matches(']').trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim().trim_matches('"') == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(PipelineConfig::from_toml("").unwrap(), PipelineConfig::default());
    }

    #[test]
    fn short_window_names_its_line() {
        let src = "seed = 1\n\n[grid]\nb = 1.0\nT_tilde = 1.5\n";
        let e = PipelineConfig::from_toml(src).unwrap_err().to_string();
        assert!(e.contains("line 5") && e.contains("T_tilde"), "{e}");
    }

    #[test]
    fn data_window_longer_than_t_tilde_is_rejected() {
        let src = "[grid]\nb = 1.0\nT_tilde = 2.0\nT = 3.0\n";
        assert!(PipelineConfig::from_toml(src).is_err());
    }

    #[test]
    fn unknown_key_is_a_parse_error_with_position() {
        let e = PipelineConfig::from_toml("[solver]\nlamda = 2.0\n").unwrap_err().to_string();
        assert!(e.contains("line 2") && e.contains("lamda"), "{e}");
    }

    #[test]
    fn bad_beta_points_at_beta() {
        let e = PipelineConfig::from_toml("[solver]\nlambda = 1.0\nbeta = 0.7\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("beta"), "{e}");
    }

    #[test]
    fn solver_keys_map_onto_parameters() {
        let cfg = PipelineConfig::from_toml("[solver]\nM = 5.0\nkappa = 0.2\n").unwrap();
        assert_eq!(cfg.params().m_ball, 5.0);
        assert_eq!(cfg.params().kappa, 0.2);
    }
}
