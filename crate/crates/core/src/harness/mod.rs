//! Configuration, experiment orchestration and CSV output.
//!
//! A run is `parse_config` -> [`run`] -> [`write_report`]. Output goes to
//! `{output_dir}/{run_id}/`, which always contains a `meta.cfg` echo of the
//! resolved configuration; running that file again reproduces every CSV.

mod config;
mod experiments;
mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use config::{parse_config, parse_config_over, AnalyticU0, FMode, InitKind, Mode, SeedPolicy, SimConfig, SweepParam};
pub use experiments::{
    grid_for, initial_fields, particle_setup, run, run_analytic, run_compare, run_particle_mode, run_pde, run_sweep,
    sweep_seed, CompareRow, Frame, Report, SweepOutcome, SweepRunResult, SweepSummary,
};
pub use output::{
    diagnostics_csv, field_csv, fmt_f64, matrix_csv, particles_csv, residuals_csv, series_csv, tidy_field_csv,
    ResidualRow,
};

use crate::error::Result;
use output::write_text;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn meta_text(cfg: &SimConfig, notes: &[String]) -> String {
    let mut s = format!("# crowdflux {VERSION}\n");
    for n in notes {
        let _ = writeln!(s, "# {}", n.replace('\n', " "));
    }
    s.push_str(&cfg.to_cfg());
    s
}

fn frame_name(f: &Frame) -> String {
    let kind = if f.label == "kde" { "kde" } else { "field" };
    format!("{kind}_{}d_t{:04}.csv", f.u.grid.dim(), f.seq)
}

/// Writes every CSV of `report` plus `meta.cfg` under `{root}/{run_id}` and
/// returns that directory.
pub fn write_report(report: &Report, root: &Path) -> Result<PathBuf> {
    let cfg = &report.config;
    let dir = root.join(&cfg.run_id);
    write_text(&dir.join("meta.cfg"), &meta_text(cfg, &report.notes))?;

    for f in &report.frames {
        write_text(&dir.join(frame_name(f)), &field_csv(&f.u, &f.v)?)?;
    }
    for s in &report.particle_snapshots {
        let dim = if cfg.mode == Mode::Pde2d { 2 } else { cfg.dim };
        write_text(&dir.join(format!("particles_t{:04}.csv", s.seq)), &particles_csv(&s.x, &s.y, dim))?;
    }
    if report.sweep.is_none() {
        write_text(&dir.join("diagnostics.csv"), &diagnostics_csv(&report.diagnostics))?;
    }
    if cfg.mode == Mode::Compare {
        write_text(&dir.join("kde_diagnostics.csv"), &diagnostics_csv(&report.particle_diagnostics))?;
        let mut s = String::from("seq,t,l2_w,l2_u,l2_v\n");
        for r in &report.comparison {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.seq,
                fmt_f64(r.t),
                fmt_f64(r.l2_w),
                fmt_f64(r.l2_u),
                fmt_f64(r.l2_v)
            );
        }
        write_text(&dir.join("compare.csv"), &s)?;
    }
    if let Some(sweep) = &report.sweep {
        write_sweep(cfg, sweep, &dir)?;
    }
    emit_plot_data(report, &dir.join("plot"))?;
    Ok(dir)
}

fn write_sweep(cfg: &SimConfig, sweep: &SweepSummary, dir: &Path) -> Result<()> {
    write_text(&dir.join("residuals.csv"), &residuals_csv(&sweep.residuals))?;
    let mut runs = String::from("run,value,rep,seed,epsilon,n_particles,status,last_change,equilibrated\n");
    for r in &sweep.runs {
        let (status, change, eq) = match &r.outcome {
            Ok(o) => ("ok".to_string(), o.last_change, o.equilibrated.to_string()),
            Err(e) => (format!("failed: {}", e.replace([',', '\n'], ";")), f64::NAN, "false".into()),
        };
        let _ = writeln!(
            runs,
            "{},{},{},{},{},{},{},{},{}",
            r.index,
            fmt_f64(r.value),
            r.rep,
            r.seed,
            fmt_f64(r.epsilon),
            r.n_particles,
            status,
            fmt_f64(change),
            eq
        );

        let mut run_cfg = cfg.clone();
        run_cfg.mode = Mode::Particles;
        run_cfg.run_id = format!("run_{:03}", r.index);
        run_cfg.seed = r.seed;
        run_cfg.epsilon = r.epsilon;
        run_cfg.n_particles = r.n_particles;
        let sub = dir.join(&run_cfg.run_id);
        let note = format!("sweep value {} repetition {}", r.value, r.rep);
        write_text(&sub.join("meta.cfg"), &meta_text(&run_cfg, &[note]))?;
        if let Ok(o) = &r.outcome {
            write_text(&sub.join("diagnostics.csv"), &diagnostics_csv(&o.diagnostics))?;
            let name = format!("kde_{}d_final.csv", o.final_w.grid.dim());
            write_text(&sub.join(name), &field_csv(&o.final_u, &o.final_v)?)?;
        }
    }
    write_text(&dir.join("runs.csv"), &runs)?;
    let mut summary = String::from("max_jump_index,max_jump_param,max_jump_value\n");
    if let Some((i, p, j)) = sweep.max_jump {
        let _ = writeln!(summary, "{i},{},{}", fmt_f64(p), fmt_f64(j));
    }
    write_text(&dir.join("summary.csv"), &summary)
}

/// Plot-ready tidy CSVs, one observable per file, written into `dir`.
pub fn emit_plot_data(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: String, text: String| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, &text)?;
        written.push(path);
        Ok(())
    };
    for f in &report.frames {
        let w = f.u.add(&f.v)?;
        for (obs, field) in [("u", &f.u), ("v", &f.v), ("w", &w)] {
            let stem = format!("{}_{obs}_t{:04}", f.label, f.seq);
            put(format!("{stem}.csv"), tidy_field_csv(field))?;
            if let Some(m) = matrix_csv(field) {
                put(format!("{stem}_matrix.csv"), m)?;
            }
        }
    }
    let mut diag_sets = vec![("diag", &report.diagnostics)];
    if report.config.mode == Mode::Compare {
        diag_sets.push(("kde_diag", &report.particle_diagnostics));
    }
    for (prefix, record) in diag_sets {
        let mut observables: Vec<String> = ["mass_u", "mass_v", "H_uv", "TV_uv"].map(String::from).to_vec();
        observables.extend(record.extra_names());
        for obs in observables {
            let points = record.rows.iter().map(|r| {
                let v = match obs.as_str() {
                    "mass_u" => r.mass_u,
                    "mass_v" => r.mass_v,
                    "H_uv" => r.h_uv,
                    "TV_uv" => r.tv_uv,
                    other => r.extra(other).unwrap_or(f64::NAN),
                };
                (r.t, v)
            });
            put(format!("{prefix}_{obs}.csv"), series_csv("t", points))?;
        }
    }
    if !report.comparison.is_empty() {
        put(
            "compare_l2_w.csv".into(),
            series_csv("t", report.comparison.iter().map(|r| (r.t, r.l2_w))),
        )?;
    }
    if let Some(sweep) = &report.sweep {
        let mut s = String::from("param,r_i\n");
        for r in &sweep.residuals {
            let _ = writeln!(s, "{},{}", fmt_f64(r.param_value), fmt_f64(r.r));
        }
        put("residuals_plot.csv".into(), s)?;
    }
    Ok(written)
}

/// Runs `cfg` and writes its outputs under `cfg.output_dir`.
pub fn execute(cfg: &SimConfig) -> Result<(Report, PathBuf)> {
    let report = run(cfg)?;
    let dir = write_report(&report, &cfg.output_dir)?;
    Ok((report, dir))
}
