//! Line-oriented `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored, keys are unique, and unknown
//! keys are rejected. Lists are comma separated. [`SimConfig::to_cfg`]
//! writes a file that parses back to the same configuration.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::particles::{DriftMethod, Sampling};
use crate::scheme::{Limiter, Nonlinearity};

const PAPER2D: &str = include_str!("../../presets/paper2d.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Pde1d,
    Pde2d,
    Particles,
    Compare,
    Sweep,
    Analytic,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Pde1d => "pde1d",
            Mode::Pde2d => "pde2d",
            Mode::Particles => "particles",
            Mode::Compare => "compare",
            Mode::Sweep => "sweep",
            Mode::Analytic => "analytic",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "pde1d" => Mode::Pde1d,
            "pde2d" => Mode::Pde2d,
            "particles" => Mode::Particles,
            "compare" => Mode::Compare,
            "sweep" => Mode::Sweep,
            "analytic" => Mode::Analytic,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FMode {
    /// `f(z) = z`.
    #[default]
    Identity,
    /// `f(z) = z^(m-1)`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitKind {
    /// Gaussian blob per species plus a constant floor, scaled to `init_mass`.
    #[default]
    Gaussians,
    /// `u0 = v0 = w0 / 2` with `w0` the quadratic profile at `t = 0`.
    Quadratic,
    /// `u0 = v0 = init_mass / |domain|`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnalyticU0 {
    /// `u0 = w0 / 2`.
    #[default]
    Half,
    /// `u0 = w0` on `x < 0`, zero elsewhere.
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepParam {
    #[default]
    Epsilon,
    NParticles,
    /// Values are particle counts `N`, with `eps = (1/N)^alpha`.
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedPolicy {
    /// Repetition `r` uses the same seed for every swept value.
    #[default]
    Common,
    /// Every run gets its own seed.
    Independent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub run_id: String,
    pub output_dir: PathBuf,
    pub dim: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,

    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub limiter: Limiter,
    pub f_mode: FMode,
    pub m: f64,
    pub snapshot_times: Vec<f64>,

    pub n_particles: usize,
    pub epsilon: f64,
    /// `None` couples the noise amplitude to `epsilon`.
    pub noise_epsilon: Option<f64>,
    pub range_scale: f64,
    pub cutoff_factor: f64,
    pub smoothing_h: f64,
    pub dt_particle: f64,
    pub seed: u64,
    pub kde_reflect: bool,
    pub sampling: Sampling,
    pub drift_method: DriftMethod,

    pub init: InitKind,
    pub init_width: f64,
    pub u_center: [f64; 2],
    pub v_center: [f64; 2],
    pub init_floor: f64,
    pub init_mass: f64,

    pub a: f64,
    pub b: f64,
    pub analytic_u0: AnalyticU0,

    pub sweep_param: SweepParam,
    pub sweep_values: Vec<f64>,
    pub sweep_alpha: f64,
    pub sweep_repetitions: usize,
    pub sweep_seeds: SeedPolicy,
    pub equilibrium_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Pde1d,
            run_id: "run".into(),
            output_dir: PathBuf::from("out"),
            dim: 1,
            x_min: -2.0,
            x_max: 2.0,
            y_min: -2.0,
            y_max: 2.0,
            nx: 200,
            ny: 200,
            t_end: 0.2,
            cfl: 0.4,
            dt_max: 1e-2,
            limiter: Limiter::None,
            f_mode: FMode::Identity,
            m: 2.0,
            snapshot_times: vec![0.0, 0.1, 0.2],
            n_particles: 1000,
            epsilon: 0.3,
            noise_epsilon: None,
            range_scale: 1.0,
            cutoff_factor: 6.0,
            smoothing_h: 0.15,
            dt_particle: 1e-3,
            seed: 0,
            kde_reflect: false,
            sampling: Sampling::Stratified,
            drift_method: DriftMethod::CellList,
            init: InitKind::Gaussians,
            init_width: 0.3,
            u_center: [-0.5, 0.0],
            v_center: [0.5, 0.0],
            init_floor: 0.01,
            init_mass: 1.0,
            a: 1.0,
            b: 1.0,
            analytic_u0: AnalyticU0::Half,
            sweep_param: SweepParam::Epsilon,
            sweep_values: Vec::new(),
            sweep_alpha: 0.5,
            sweep_repetitions: 1,
            sweep_seeds: SeedPolicy::Common,
            equilibrium_tol: 1e-3,
        }
    }
}

/// Parses a complete configuration on top of the defaults.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_over(SimConfig::default(), text)
}

/// Applies `text` on top of `base`, then validates.
pub fn parse_config_over(base: SimConfig, text: &str) -> Result<SimConfig> {
    let mut cfg = base;
    let mut seen = HashSet::new();
    let mut explicit_snapshots = false;
    let mut explicit_t_end = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, found `{body}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Parse { line, message: "missing key".into() });
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        explicit_snapshots |= key == "snapshot_times";
        explicit_t_end |= key == "t_end";
        cfg.apply(key, value, line)?;
    }
    // snapshots follow a changed horizon unless given explicitly
    if explicit_t_end && !explicit_snapshots {
        cfg.snapshot_times = default_snapshots(cfg.t_end);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn default_snapshots(t_end: f64) -> Vec<f64> {
    if t_end > 0.0 {
        vec![0.0, 0.5 * t_end, t_end]
    } else {
        vec![0.0]
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{value}` for `{key}`"),
    })
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_value(key, v.trim(), line)).collect()
}

fn parse_count(key: &str, value: &str, line: usize) -> Result<usize> {
    let n: i64 = parse_value(key, value, line)?;
    usize::try_from(n)
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::validation(key, format!("must be a positive integer, got {n}")))
}

fn parse_point(key: &str, value: &str, line: usize) -> Result<[f64; 2]> {
    match parse_list(key, value, line)?.as_slice() {
        [x] => Ok([*x, 0.0]),
        [x, y] => Ok([*x, *y]),
        _ => Err(Error::validation(key, "expected one or two coordinates")),
    }
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("expected true or false for `{key}`"),
        }),
    }
}

fn choice<T: Copy>(key: &str, value: &str, options: &[(&str, T)]) -> Result<T> {
    options
        .iter()
        .find(|(name, _)| *name == value)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
            Error::validation(key, format!("`{value}` is not one of {}", names.join(", ")))
        })
}

impl SimConfig {
    /// Built-in configuration by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper2d" => parse_config(PAPER2D),
            _ => Err(Error::validation("preset", format!("unknown preset `{name}`"))),
        }
    }

    pub fn preset_text(name: &str) -> Option<&'static str> {
        (name == "paper2d").then_some(PAPER2D)
    }

    fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "mode" => {
                self.mode = value
                    .parse()
                    .map_err(|message| Error::Validation { key: key.into(), message })?
            }
            "run_id" => self.run_id = value.to_string(),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "dim" => self.dim = parse_count(key, value, line)?,
            "x_min" => self.x_min = parse_value(key, value, line)?,
            "x_max" => self.x_max = parse_value(key, value, line)?,
            "y_min" => self.y_min = parse_value(key, value, line)?,
            "y_max" => self.y_max = parse_value(key, value, line)?,
            "nx" => self.nx = parse_count(key, value, line)?,
            "ny" => self.ny = parse_count(key, value, line)?,
            "t_end" => self.t_end = parse_value(key, value, line)?,
            "cfl" => self.cfl = parse_value(key, value, line)?,
            "dt_max" => self.dt_max = parse_value(key, value, line)?,
            "limiter" => {
                self.limiter = choice(
                    key,
                    value,
                    &[("none", Limiter::None), ("minmod", Limiter::Minmod), ("vanleer", Limiter::VanLeer)],
                )?
            }
            "f_mode" => self.f_mode = choice(key, value, &[("identity", FMode::Identity), ("power", FMode::Power)])?,
            "m" => self.m = parse_value(key, value, line)?,
            "snapshot_times" => self.snapshot_times = parse_list(key, value, line)?,
            "n_particles" => self.n_particles = parse_count(key, value, line)?,
            "epsilon" => self.epsilon = parse_value(key, value, line)?,
            "noise_epsilon" => {
                self.noise_epsilon = match value {
                    "coupled" => None,
                    v => Some(parse_value(key, v, line)?),
                }
            }
            "range_scale" => self.range_scale = parse_value(key, value, line)?,
            "cutoff_factor" => self.cutoff_factor = parse_value(key, value, line)?,
            "smoothing_h" => self.smoothing_h = parse_value(key, value, line)?,
            "dt_particle" => self.dt_particle = parse_value(key, value, line)?,
            "seed" => self.seed = parse_value(key, value, line)?,
            "kde_reflect" => self.kde_reflect = parse_bool(key, value, line)?,
            "sampling" => {
                self.sampling = choice(key, value, &[("stratified", Sampling::Stratified), ("iid", Sampling::Iid)])?
            }
            "drift" => {
                self.drift_method =
                    choice(key, value, &[("celllist", DriftMethod::CellList), ("naive", DriftMethod::Naive)])?
            }
            "init" => {
                self.init = choice(
                    key,
                    value,
                    &[
                        ("gaussians", InitKind::Gaussians),
                        ("quadratic", InitKind::Quadratic),
                        ("constant", InitKind::Constant),
                    ],
                )?
            }
            "init_width" => self.init_width = parse_value(key, value, line)?,
            "u_center" => self.u_center = parse_point(key, value, line)?,
            "v_center" => self.v_center = parse_point(key, value, line)?,
            "init_floor" => self.init_floor = parse_value(key, value, line)?,
            "init_mass" => self.init_mass = parse_value(key, value, line)?,
            "a" => self.a = parse_value(key, value, line)?,
            "b" => self.b = parse_value(key, value, line)?,
            "analytic_u0" => {
                self.analytic_u0 = choice(key, value, &[("half", AnalyticU0::Half), ("left", AnalyticU0::Left)])?
            }
            "sweep_param" => {
                self.sweep_param = choice(
                    key,
                    value,
                    &[
                        ("epsilon", SweepParam::Epsilon),
                        ("n_particles", SweepParam::NParticles),
                        ("alpha", SweepParam::Alpha),
                    ],
                )?
            }
            "sweep_values" => self.sweep_values = parse_list(key, value, line)?,
            "sweep_alpha" => self.sweep_alpha = parse_value(key, value, line)?,
            "sweep_repetitions" => self.sweep_repetitions = parse_count(key, value, line)?,
            "sweep_seeds" => {
                self.sweep_seeds =
                    choice(key, value, &[("common", SeedPolicy::Common), ("independent", SeedPolicy::Independent)])?
            }
            "equilibrium_tol" => self.equilibrium_tol = parse_value(key, value, line)?,
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(key, format!("must be positive and finite, got {v}")))
            }
        };
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) {
            return Err(Error::validation("run_id", "must be a non-empty plain name"));
        }
        if !(self.dim == 1 || self.dim == 2) {
            return Err(Error::validation("dim", "must be 1 or 2"));
        }
        if !(self.x_max > self.x_min && self.x_min.is_finite() && self.x_max.is_finite()) {
            return Err(Error::validation("x_max", "must exceed x_min"));
        }
        if !(self.y_max > self.y_min && self.y_min.is_finite() && self.y_max.is_finite()) {
            return Err(Error::validation("y_max", "must exceed y_min"));
        }
        if self.nx < 4 {
            return Err(Error::validation("nx", "needs at least 4 cells"));
        }
        if self.ny < 4 {
            return Err(Error::validation("ny", "needs at least 4 cells"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::validation("t_end", "must be non-negative and finite"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::validation("cfl", "must lie in (0, 1]"));
        }
        positive("dt_max", self.dt_max)?;
        if self.f_mode == FMode::Power {
            Nonlinearity::power(self.m).map_err(|e| Error::validation("m", e.to_string()))?;
        }
        if self.snapshot_times.is_empty() {
            return Err(Error::validation("snapshot_times", "must not be empty"));
        }
        if self.snapshot_times.iter().any(|t| !(*t >= 0.0 && *t <= self.t_end)) {
            return Err(Error::validation("snapshot_times", "must lie in [0, t_end]"));
        }
        if self.snapshot_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("snapshot_times", "must be strictly increasing"));
        }
        positive("epsilon", self.epsilon)?;
        if let Some(n) = self.noise_epsilon {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(Error::validation("noise_epsilon", "must be non-negative and finite"));
            }
        }
        positive("range_scale", self.range_scale)?;
        if !(self.cutoff_factor >= 6.0) {
            return Err(Error::validation("cutoff_factor", "must be at least 6"));
        }
        positive("smoothing_h", self.smoothing_h)?;
        positive("dt_particle", self.dt_particle)?;
        positive("init_width", self.init_width)?;
        positive("init_mass", self.init_mass)?;
        if !(self.init_floor >= 0.0 && self.init_floor.is_finite()) {
            return Err(Error::validation("init_floor", "must be non-negative"));
        }
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("sweep_alpha", self.sweep_alpha)?;
        positive("equilibrium_tol", self.equilibrium_tol)?;
        if self.mode == Mode::Sweep && self.sweep_values.is_empty() {
            return Err(Error::validation("sweep_values", "must not be empty for a sweep"));
        }
        for v in &self.sweep_values {
            positive("sweep_values", *v)?;
            if self.sweep_param != SweepParam::Epsilon && v.fract() != 0.0 {
                return Err(Error::validation("sweep_values", "particle counts must be integers"));
            }
        }
        Ok(())
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        match self.f_mode {
            FMode::Identity => Nonlinearity::Identity,
            FMode::Power => Nonlinearity::Power(self.m),
        }
    }

    /// Noise amplitude actually used by the particle system.
    pub fn noise(&self) -> f64 {
        self.noise_epsilon.unwrap_or(self.epsilon)
    }

    /// Resolved configuration in the input format, preceded by a comment header.
    pub fn to_cfg(&self) -> String {
        fn list(v: &[f64]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        }
        let point = |p: [f64; 2]| list(&p);
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.name().into());
        kv("run_id", self.run_id.clone());
        kv("output_dir", self.output_dir.display().to_string());
        kv("dim", self.dim.to_string());
        kv("x_min", self.x_min.to_string());
        kv("x_max", self.x_max.to_string());
        kv("y_min", self.y_min.to_string());
        kv("y_max", self.y_max.to_string());
        kv("nx", self.nx.to_string());
        kv("ny", self.ny.to_string());
        kv("t_end", self.t_end.to_string());
        kv("cfl", self.cfl.to_string());
        kv("dt_max", self.dt_max.to_string());
        kv("limiter", self.limiter.name().into());
        kv(
            "f_mode",
            match self.f_mode {
                FMode::Identity => "identity",
                FMode::Power => "power",
            }
            .into(),
        );
        kv("m", self.m.to_string());
        kv("snapshot_times", list(&self.snapshot_times));
        kv("n_particles", self.n_particles.to_string());
        kv("epsilon", self.epsilon.to_string());
        kv(
            "noise_epsilon",
            self.noise_epsilon.map_or("coupled".into(), |v| v.to_string()),
        );
        kv("range_scale", self.range_scale.to_string());
        kv("cutoff_factor", self.cutoff_factor.to_string());
        kv("smoothing_h", self.smoothing_h.to_string());
        kv("dt_particle", self.dt_particle.to_string());
        kv("seed", self.seed.to_string());
        kv("kde_reflect", self.kde_reflect.to_string());
        kv("sampling", self.sampling.name().into());
        kv(
            "drift",
            match self.drift_method {
                DriftMethod::CellList => "celllist",
                DriftMethod::Naive => "naive",
            }
            .into(),
        );
        kv(
            "init",
            match self.init {
                InitKind::Gaussians => "gaussians",
                InitKind::Quadratic => "quadratic",
                InitKind::Constant => "constant",
            }
            .into(),
        );
        kv("init_width", self.init_width.to_string());
        kv("u_center", point(self.u_center));
        kv("v_center", point(self.v_center));
        kv("init_floor", self.init_floor.to_string());
        kv("init_mass", self.init_mass.to_string());
        kv("a", self.a.to_string());
        kv("b", self.b.to_string());
        kv(
            "analytic_u0",
            match self.analytic_u0 {
                AnalyticU0::Half => "half",
                AnalyticU0::Left => "left",
            }
            .into(),
        );
        kv(
            "sweep_param",
            match self.sweep_param {
                SweepParam::Epsilon => "epsilon",
                SweepParam::NParticles => "n_particles",
                SweepParam::Alpha => "alpha",
            }
            .into(),
        );
        kv("sweep_values", list(&self.sweep_values));
        kv("sweep_alpha", self.sweep_alpha.to_string());
        kv("sweep_repetitions", self.sweep_repetitions.to_string());
        kv(
            "sweep_seeds",
            match self.sweep_seeds {
                SeedPolicy::Common => "common",
                SeedPolicy::Independent => "independent",
            }
            .into(),
        );
        kv("equilibrium_tol", self.equilibrium_tol.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_body_gives_defaults() {
        let cfg = parse_config("mode = pde1d\n").unwrap();
        assert_eq!(cfg, SimConfig::default());
        assert_eq!(parse_config("").unwrap(), SimConfig::default());
    }

    #[test]
    fn negative_count_names_key() {
        match parse_config("n_particles = -5") {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "n_particles"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_config("# c\nnx = 10\nbogus = 1\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("nx = 10\nnx = 12"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_config("\n\njust text"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_config("cfl = abc"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn validation_errors_name_keys() {
        for (text, key) in [
            ("cfl = 1.5", "cfl"),
            ("epsilon = 0", "epsilon"),
            ("x_min = 3", "x_max"),
            ("f_mode = power\nm = 1", "m"),
            ("snapshot_times = 0, 0.5", "snapshot_times"),
            ("cutoff_factor = 3", "cutoff_factor"),
            ("mode = sweep", "sweep_values"),
            ("limiter = superbee", "limiter"),
            ("dim = 3", "dim"),
        ] {
            match parse_config(text) {
                Err(Error::Validation { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn builtin_preset_parses() {
        let cfg = SimConfig::preset("paper2d").unwrap();
        assert_eq!(cfg.n_particles, 1000);
        assert_eq!(cfg.epsilon, 0.3);
        assert_eq!(cfg.range_scale, 0.3);
        assert_eq!(cfg.smoothing_h, 0.15);
        assert_eq!((cfg.nx, cfg.ny), (20, 20));
        assert_eq!(cfg.dim, 2);
        assert!(SimConfig::preset("nope").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = SimConfig::preset("paper2d").unwrap();
        cfg.noise_epsilon = Some(0.125);
        cfg.sweep_values = vec![0.25, 0.125];
        cfg.limiter = Limiter::VanLeer;
        cfg.seed = u64::MAX;
        assert_eq!(parse_config(&cfg.to_cfg()).unwrap(), cfg);
        let d = SimConfig::default();
        assert_eq!(parse_config(&d.to_cfg()).unwrap(), d);
    }

    #[test]
    fn t_end_moves_default_snapshots() {
        let cfg = parse_config("t_end = 1").unwrap();
        assert_eq!(cfg.snapshot_times, vec![0.0, 0.5, 1.0]);
        let cfg = parse_config("t_end = 0").unwrap();
        assert_eq!(cfg.snapshot_times, vec![0.0]);
    }

    #[test]
    fn overlay_on_preset() {
        let base = SimConfig::preset("paper2d").unwrap();
        let cfg = parse_config_over(base, "n_particles = 200\nseed = 9").unwrap();
        assert_eq!(cfg.n_particles, 200);
        assert_eq!(cfg.nx, 20);
    }
}
