//! Experiment runners. Each returns an in-memory [`Report`]; nothing here
//! touches the file system.

use rayon::prelude::*;

use super::config::{AnalyticU0, InitKind, Mode, SeedPolicy, SimConfig, SweepParam};
use super::output::ResidualRow;
use crate::analytic::{special_u, special_w, QuadraticProfile};
use crate::diagnostics::{l2_distance, mass, residual_sequence, DiagnosticsRecord, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::grid::{Grid, Grid1D, Grid2D, ScalarField};
use crate::particles::{
    mix_seed, run_particles, sample_from_field, BoxDomain, KdeOptions, KernelSpec, ParticleEnsemble,
    ParticleRunConfig, ParticleSnapshot,
};
use crate::scheme::{Snapshot, SolverParams};
use crate::{pde1d, pde2d};

/// Pair of species fields at one output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// `field` for PDE or analytic data, `kde` for particle density estimates.
    pub label: &'static str,
    pub seq: usize,
    pub t: f64,
    pub u: ScalarField,
    pub v: ScalarField,
}

impl Frame {
    fn from_snapshot(s: &Snapshot) -> Self {
        Self {
            label: "field",
            seq: s.seq,
            t: s.t,
            u: s.u.clone(),
            v: s.v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub seq: usize,
    pub t: f64,
    pub l2_w: f64,
    pub l2_u: f64,
    pub l2_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRunResult {
    pub index: usize,
    pub value: f64,
    pub rep: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub n_particles: usize,
    /// Final density estimate of `w`, or the failure message.
    pub outcome: std::result::Result<SweepOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub final_w: ScalarField,
    pub final_u: ScalarField,
    pub final_v: ScalarField,
    /// L2 change of the `w` estimate between the last two snapshots.
    pub last_change: f64,
    pub equilibrated: bool,
    pub diagnostics: DiagnosticsRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub residuals: Vec<ResidualRow>,
    pub runs: Vec<SweepRunResult>,
    /// `(i, param_value, |r_i - r_{i-1}|)` at the largest jump between consecutive residuals.
    pub max_jump: Option<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: SimConfig,
    pub frames: Vec<Frame>,
    pub particle_snapshots: Vec<ParticleSnapshot>,
    /// PDE diagnostics, or density-estimate diagnostics for particle runs.
    pub diagnostics: DiagnosticsRecord,
    /// Density-estimate diagnostics in compare mode.
    pub particle_diagnostics: DiagnosticsRecord,
    pub comparison: Vec<CompareRow>,
    pub sweep: Option<SweepSummary>,
    /// Free-form remarks written to `meta.cfg` as comments.
    pub notes: Vec<String>,
}

impl Report {
    fn new(config: &SimConfig) -> Self {
        Self {
            config: config.clone(),
            frames: Vec::new(),
            particle_snapshots: Vec::new(),
            diagnostics: DiagnosticsRecord::default(),
            particle_diagnostics: DiagnosticsRecord::default(),
            comparison: Vec::new(),
            sweep: None,
            notes: Vec::new(),
        }
    }
}

pub fn grid_for(cfg: &SimConfig, dim: usize) -> Result<Grid> {
    Ok(if dim == 1 {
        Grid1D::new(cfg.x_min, cfg.x_max, cfg.nx)?.into()
    } else {
        Grid2D::new(cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max, cfg.nx, cfg.ny)?.into()
    })
}

/// Initial `(u0, v0)` on `grid` according to `init`.
pub fn initial_fields(cfg: &SimConfig, grid: Grid) -> Result<(ScalarField, ScalarField)> {
    let dim = grid.dim();
    let r2 = |p: [f64; 2], c: [f64; 2]| {
        let dx = p[0] - c[0];
        let dy = if dim == 2 { p[1] - c[1] } else { 0.0 };
        dx * dx + dy * dy
    };
    match cfg.init {
        InitKind::Gaussians => {
            let blob = |c: [f64; 2]| {
                let raw = ScalarField::from_fn(grid, |p| {
                    cfg.init_floor + (-r2(p, c) / (2.0 * cfg.init_width * cfg.init_width)).exp()
                });
                raw.scaled(cfg.init_mass / mass(&raw))
            };
            Ok((blob(cfg.u_center), blob(cfg.v_center)))
        }
        InitKind::Constant => {
            let volume = grid.cell_volume() * grid.n_cells() as f64;
            let c = ScalarField::from_fn(grid, |_| cfg.init_mass / volume);
            Ok((c.clone(), c))
        }
        InitKind::Quadratic => {
            let profile = QuadraticProfile::new(cfg.a, cfg.b);
            let mut half = ScalarField::zeros(grid);
            for k in 0..grid.n_cells() {
                let p = grid.center(k);
                let r = r2(p, [0.0, 0.0]).sqrt();
                half.values[k] = 0.5 * special_w(profile, 0.0, r, true)?;
            }
            Ok((half.clone(), half))
        }
    }
}

fn solver_params(cfg: &SimConfig) -> SolverParams {
    SolverParams {
        cfl: cfg.cfl,
        limiter: cfg.limiter,
        t_end: cfg.t_end,
        snapshot_times: cfg.snapshot_times.clone(),
        dt_max: cfg.dt_max,
    }
}

fn solve_pde(cfg: &SimConfig, u0: &ScalarField, v0: &ScalarField) -> Result<crate::scheme::Solution> {
    let params = solver_params(cfg);
    match u0.grid {
        Grid::D1(_) => pde1d::solve(u0, v0, cfg.nonlinearity(), &params),
        Grid::D2(_) => pde2d::solve2d(u0, v0, cfg.nonlinearity(), &params),
    }
}

pub fn run_pde(cfg: &SimConfig) -> Result<Report> {
    let dim = if cfg.mode == Mode::Pde2d { 2 } else { 1 };
    let grid = grid_for(cfg, dim)?;
    let (u0, v0) = initial_fields(cfg, grid)?;
    let sol = solve_pde(cfg, &u0, &v0)?;
    let mut report = Report::new(cfg);
    report.frames = sol.snapshots.iter().map(Frame::from_snapshot).collect();
    report.diagnostics = sol.diagnostics;
    report.notes.push(format!("pde steps = {}", sol.steps));
    Ok(report)
}

fn particle_box(cfg: &SimConfig, dim: usize) -> Result<BoxDomain> {
    BoxDomain::new([cfg.x_min, cfg.y_min], [cfg.x_max, cfg.y_max], dim)
}

/// Ensemble sampled from `(u0, v0)` with the run settings of `cfg`.
pub fn particle_setup(
    cfg: &SimConfig,
    u0: &ScalarField,
    v0: &ScalarField,
    seed: u64,
) -> Result<(ParticleEnsemble, ParticleRunConfig)> {
    let dim = u0.grid.dim();
    let x = sample_from_field(u0, cfg.n_particles, cfg.sampling, seed, 0)?;
    let y = sample_from_field(v0, cfg.n_particles, cfg.sampling, seed, 1)?;
    let kernel = KernelSpec::with_range(cfg.epsilon, cfg.range_scale, cfg.cutoff_factor, dim)?;
    let mut ens = ParticleEnsemble::new(x, y, particle_box(cfg, dim)?, kernel, seed)?;
    ens.noise_epsilon = cfg.noise();
    let run_cfg = ParticleRunConfig {
        dt: cfg.dt_particle,
        t_end: cfg.t_end,
        snapshot_times: cfg.snapshot_times.clone(),
        method: cfg.drift_method,
        kde_grid: Some(u0.grid),
        smoothing_h: cfg.smoothing_h,
        kde: KdeOptions {
            reflect: cfg.kde_reflect,
            ..KdeOptions::default()
        },
    };
    Ok((ens, run_cfg))
}

fn kde_frames(snaps: &[ParticleSnapshot]) -> Vec<Frame> {
    snaps
        .iter()
        .filter_map(|s| {
            s.kde.as_ref().map(|[ku, kv, _]| Frame {
                label: "kde",
                seq: s.seq,
                t: s.t,
                u: ku.field.clone(),
                v: kv.field.clone(),
            })
        })
        .collect()
}

fn mass_notes(report: &mut Report, record: &DiagnosticsRecord) {
    for row in &record.rows {
        for (key, species) in [("kde_mass_u", "X"), ("kde_mass_v", "Y")] {
            if let Some(m) = row.extra(key) {
                if m < 1.0 - 1e-3 {
                    let msg = format!("density estimate of {species} at t = {} holds mass {m:.6} (deficit {:.3e})", row.t, 1.0 - m);
                    log::warn!("{msg}");
                    report.notes.push(msg);
                }
            }
        }
    }
}

pub fn run_particle_mode(cfg: &SimConfig) -> Result<Report> {
    let grid = grid_for(cfg, cfg.dim)?;
    let (u0, v0) = initial_fields(cfg, grid)?;
    let (ens, run_cfg) = particle_setup(cfg, &u0, &v0, cfg.seed)?;
    let run = run_particles(ens, &run_cfg)?;
    let mut report = Report::new(cfg);
    report.frames = kde_frames(&run.snapshots);
    mass_notes(&mut report, &run.diagnostics);
    report.diagnostics = run.diagnostics;
    report.particle_snapshots = run.snapshots;
    report.notes.push(format!("particle steps = {}", run.steps));
    Ok(report)
}

/// Quadratic profile and its transported companion on the 1D grid.
pub fn run_analytic(cfg: &SimConfig) -> Result<Report> {
    let Grid::D1(grid) = grid_for(cfg, 1)? else { unreachable!() };
    let profile = QuadraticProfile::new(cfg.a, cfg.b);
    let w0 = |x: f64| special_w(profile, 0.0, x, true).unwrap_or(0.0);
    let u0 = |x: f64| match cfg.analytic_u0 {
        AnalyticU0::Half => 0.5 * w0(x),
        AnalyticU0::Left => {
            if x < 0.0 {
                w0(x)
            } else {
                0.0
            }
        }
    };
    let mut report = Report::new(cfg);
    for (seq, &t) in cfg.snapshot_times.iter().enumerate() {
        let mut u = ScalarField::zeros(grid);
        let mut v = ScalarField::zeros(grid);
        for (i, x) in grid.centers().into_iter().enumerate() {
            let w = special_w(profile, t, x, true)?;
            let ui = special_u(u0, cfg.b, t, x)?;
            u.values[i] = ui;
            v.values[i] = (w - ui).max(0.0);
        }
        report.diagnostics.push(DiagnosticsRow::measure(t, &u, &v)?)?;
        report.frames.push(Frame { label: "field", seq, t, u, v });
    }
    Ok(report)
}

/// PDE and particle runs from the same initial densities, compared at every snapshot.
pub fn run_compare(cfg: &SimConfig) -> Result<Report> {
    let grid = grid_for(cfg, cfg.dim)?;
    let (u0, v0) = initial_fields(cfg, grid)?;
    let sol = solve_pde(cfg, &u0, &v0)?;
    let (ens, run_cfg) = particle_setup(cfg, &u0, &v0, cfg.seed)?;
    if ens.domain.dim != grid.dim() {
        return Err(Error::GridMismatch("particle box and PDE grid differ in dimension".into()));
    }
    let run = run_particles(ens, &run_cfg)?;
    let (mu, mv) = (mass(&u0), mass(&v0));

    let mut report = Report::new(cfg);
    if (mu - 1.0).abs() > 1e-9 || (mv - 1.0).abs() > 1e-9 {
        report
            .notes
            .push("particle estimates are rescaled to the initial species masses".into());
    }
    for (snap, ps) in sol.snapshots.iter().zip(&run.snapshots) {
        let Some([ku, kv, _]) = &ps.kde else { continue };
        let (ku, kv) = (ku.field.scaled(mu), kv.field.scaled(mv));
        let kw = ku.add(&kv)?;
        report.comparison.push(CompareRow {
            seq: snap.seq,
            t: snap.t_requested,
            l2_w: l2_distance(&kw, &snap.w())?,
            l2_u: l2_distance(&ku, &snap.u)?,
            l2_v: l2_distance(&kv, &snap.v)?,
        });
    }
    report.frames = sol.snapshots.iter().map(Frame::from_snapshot).collect();
    report.frames.extend(kde_frames(&run.snapshots));
    mass_notes(&mut report, &run.diagnostics);
    report.diagnostics = sol.diagnostics;
    report.particle_diagnostics = run.diagnostics;
    report.particle_snapshots = run.snapshots;
    Ok(report)
}

/// Seed of run `index` (value `k`, repetition `rep`).
pub fn sweep_seed(cfg: &SimConfig, index: usize, rep: usize) -> u64 {
    match cfg.sweep_seeds {
        SeedPolicy::Common => mix_seed(cfg.seed, rep as u64),
        SeedPolicy::Independent => mix_seed(cfg.seed, index as u64),
    }
}

fn sweep_run(cfg: &SimConfig, u0: &ScalarField, v0: &ScalarField, index: usize, k: usize, rep: usize) -> SweepRunResult {
    let value = cfg.sweep_values[k];
    let mut run_cfg = cfg.clone();
    match cfg.sweep_param {
        SweepParam::Epsilon => run_cfg.epsilon = value,
        SweepParam::NParticles => run_cfg.n_particles = value as usize,
        SweepParam::Alpha => {
            run_cfg.n_particles = value as usize;
            run_cfg.epsilon = (1.0 / value).powf(cfg.sweep_alpha);
        }
    }
    let seed = sweep_seed(cfg, index, rep);
    run_cfg.seed = seed;
    let outcome = (|| -> Result<SweepOutcome> {
        let (ens, pcfg) = particle_setup(&run_cfg, u0, v0, seed)?;
        let run = run_particles(ens, &pcfg)?;
        let estimates: Vec<&crate::particles::DensityEstimate> =
            run.snapshots.iter().filter_map(|s| s.kde.as_ref().map(|k| &k[2])).collect();
        let last = *estimates.last().ok_or_else(|| Error::InvalidArgument("no snapshots".into()))?;
        let last_change = if estimates.len() >= 2 {
            l2_distance(&last.field, &estimates[estimates.len() - 2].field)?
        } else {
            f64::NAN
        };
        let [ku, kv, _] = run.snapshots.last().and_then(|s| s.kde.clone()).expect("estimates present");
        Ok(SweepOutcome {
            final_w: last.field.clone(),
            final_u: ku.field,
            final_v: kv.field,
            last_change,
            equilibrated: last_change < cfg.equilibrium_tol,
            diagnostics: run.diagnostics,
        })
    })();
    if let Err(e) = &outcome {
        log::warn!("sweep run {index} (value {value}, repetition {rep}) failed: {e}");
    }
    SweepRunResult {
        index,
        value,
        rep,
        seed,
        epsilon: run_cfg.epsilon,
        n_particles: run_cfg.n_particles,
        outcome: outcome.map_err(|e| e.to_string()),
    }
}

/// Runs every `(value, repetition)` pair and reduces the final `w`
/// estimates to the residual sequence, averaged over repetitions.
pub fn run_sweep(cfg: &SimConfig) -> Result<Report> {
    if cfg.sweep_values.is_empty() {
        return Err(Error::validation("sweep_values", "must not be empty for a sweep"));
    }
    let grid = grid_for(cfg, cfg.dim)?;
    let (u0, v0) = initial_fields(cfg, grid)?;
    let reps = cfg.sweep_repetitions;
    let n_values = cfg.sweep_values.len();
    let jobs: Vec<(usize, usize)> = (0..n_values).flat_map(|k| (0..reps).map(move |r| (k, r))).collect();
    let runs: Vec<SweepRunResult> = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(k, rep))| sweep_run(cfg, &u0, &v0, index, k, rep))
        .collect();

    let mut sums = vec![(0.0_f64, 0usize); n_values.saturating_sub(1)];
    for rep in 0..reps {
        let finals: Vec<Option<&ScalarField>> = (0..n_values)
            .map(|k| runs[k * reps + rep].outcome.as_ref().ok().map(|o| &o.final_w))
            .collect();
        for i in 1..n_values {
            if let (Some(a), Some(b)) = (finals[i], finals[i - 1]) {
                let r = residual_sequence(&[b, a])?[0];
                sums[i - 1].0 += r;
                sums[i - 1].1 += 1;
            }
        }
    }
    let residuals: Vec<ResidualRow> = sums
        .iter()
        .enumerate()
        .map(|(j, &(s, n))| ResidualRow {
            i: j + 1,
            r: if n > 0 { s / n as f64 } else { f64::NAN },
            param_value: cfg.sweep_values[j + 1],
        })
        .collect();
    let max_jump = residuals
        .windows(2)
        .map(|w| (w[1].i, w[1].param_value, (w[1].r - w[0].r).abs()))
        .filter(|j| j.2.is_finite())
        .fold(None, |best: Option<(usize, f64, f64)>, j| match best {
            Some(b) if b.2 >= j.2 => Some(b),
            _ => Some(j),
        });

    let mut report = Report::new(cfg);
    let failed = runs.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        report.notes.push(format!("{failed} sweep runs failed"));
    }
    if let Some((i, p, j)) = max_jump {
        report
            .notes
            .push(format!("largest residual jump {j:.6e} at i = {i}, parameter {p}"));
    }
    report.sweep = Some(SweepSummary {
        residuals,
        runs,
        max_jump,
    });
    Ok(report)
}

/// Dispatches on `cfg.mode`.
pub fn run(cfg: &SimConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Pde1d | Mode::Pde2d => run_pde(cfg),
        Mode::Particles => run_particle_mode(cfg),
        Mode::Compare => run_compare(cfg),
        Mode::Sweep => run_sweep(cfg),
        Mode::Analytic => run_analytic(cfg),
    }
}
