use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::dirk::{
    fixed_point_run, pipelined_nonlinear_run, EngineEvent, EngineSettings, OuterTolerance, ProblemOps, SolverStats,
    StepStats,
};
use crate::error::{Error, Result};
use crate::harness::{Driver, ExperimentConfig, OuterCombine, ProblemKind};
use crate::krylov::SolveSettings;
use crate::problems::{
    write_vtk, ConvDiff, DiffReact, FieldLocation, ManufacturedHeat, Richards, StructuredGrid,
};

pub const SUMMARY_HEADER: &str = "s,nl_iterations,ls_iterations,ls_time,prec_setup_time";
pub const PER_STEP_HEADER: &str = "time_steps,nl_iterations,ls_iterations";

/// A problem instance plus what is needed to write its fields.
pub struct BuiltProblem {
    pub problem: Box<dyn ProblemOps>,
    pub grid: Option<(StructuredGrid, FieldLocation)>,
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<BuiltProblem> {
    let (nx, ny) = (cfg.nx, cfg.ny());
    Ok(match cfg.problem {
        ProblemKind::ConvDiff => {
            let p = ConvDiff::benchmark(nx, ny)?;
            let g = p.grid;
            BuiltProblem {
                problem: Box::new(p),
                grid: Some((g, FieldLocation::Cells)),
            }
        }
        ProblemKind::DiffReact => {
            let p = DiffReact::benchmark(nx, ny)?;
            let g = p.space.grid;
            BuiltProblem {
                problem: Box::new(p),
                grid: Some((g, FieldLocation::Vertices)),
            }
        }
        ProblemKind::Richards => {
            let p = Richards::benchmark(nx, ny)?;
            let g = p.space.grid;
            BuiltProblem {
                problem: Box::new(p),
                grid: Some((g, FieldLocation::Vertices)),
            }
        }
        ProblemKind::Manufactured => BuiltProblem {
            problem: Box::new(ManufacturedHeat::new(nx)?),
            grid: None,
        },
    })
}

impl ExperimentConfig {
    pub fn engine_settings(&self) -> Result<EngineSettings> {
        let outer = match self.outer_relative {
            Some(r) if self.outer_combine == OuterCombine::Both => OuterTolerance::both(self.outer_tolerance, r),
            Some(r) => OuterTolerance::combined(self.outer_tolerance, r),
            None => OuterTolerance::absolute(self.outer_tolerance),
        };
        Ok(EngineSettings {
            solver: self.solver,
            preconditioner: self.preconditioner,
            inner: SolveSettings::new(self.inner_reduction(), self.max_inner, self.convergence_mode)?,
            outer,
            max_outer: self.max_outer,
        })
    }
}

/// Result of one experiment.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub stats: SolverStats,
    /// Per-step counts accumulated from engine events, independently of `stats`.
    pub observed: Vec<StepStats>,
    pub final_state: Vec<f64>,
    pub wall_time: f64,
}

/// Runs without touching the file system.
pub fn simulate(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    run_inner(cfg, None).map_err(|(e, _)| e)
}

/// Runs and writes `summary_s<s>.csv` and `per_step_s<s>.csv` under
/// `cfg.out` (plus VTK snapshots when enabled). On failure the per-step rows
/// gathered so far are still written.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    fs::create_dir_all(&cfg.out)?;
    match run_inner(cfg, Some(&cfg.out)) {
        Ok(out) => {
            write_summary(&summary_path(cfg), &[(cfg.s, &out.stats)])?;
            write_per_step(&per_step_path(cfg), &out.stats.per_step)?;
            Ok(out)
        }
        Err((e, partial)) => {
            write_per_step(&per_step_path(cfg), &partial)?;
            Err(e)
        }
    }
}

pub fn summary_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.join(format!("summary_s{}.csv", cfg.s))
}

pub fn per_step_path(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.join(format!("per_step_s{}.csv", cfg.s))
}

fn run_inner(
    cfg: &ExperimentConfig,
    vtk_dir: Option<&Path>,
) -> std::result::Result<ExperimentOutcome, (Error, Vec<StepStats>)> {
    let fail = |e: Error| (e, Vec::new());
    cfg.validate().map_err(fail)?;
    let settings = cfg.engine_settings().map_err(fail)?;
    let built = build_problem(cfg).map_err(fail)?;
    let tab = cfg.tableau.build().map_err(fail)?;
    let problem = built.problem.as_ref();
    let y0 = problem.initial_state();

    let mut observed: Vec<StepStats> = (1..=cfg.n_steps)
        .map(|i| StepStats {
            time_step: i,
            ..Default::default()
        })
        .collect();
    let mut io_error: Option<Error> = None;
    let vtk = if cfg.vtk { vtk_dir.zip(built.grid) } else { None };
    let mut observer = |ev: &EngineEvent| match ev {
        EngineEvent::LinearSolve {
            time_step, iterations, ..
        } => {
            let e = &mut observed[time_step - 1];
            e.nl_iterations += 1;
            e.ls_iterations += iterations;
        }
        EngineEvent::StepCompleted { time_step, state, .. } => {
            if let Some((dir, (grid, loc))) = vtk {
                let path = dir.join(format!("{}_s{}_{:05}.vtk", cfg.problem, cfg.s, time_step));
                if let Err(e) = write_vtk(&path, &grid, loc, &[("u", state)]) {
                    io_error.get_or_insert(e);
                }
            }
        }
        EngineEvent::StageAccepted { .. } => {}
    };

    let start = Instant::now();
    let result = match cfg.driver {
        Driver::Pipelined => {
            let columns = cfg.s * tab.implicit_stages();
            pipelined_nonlinear_run(problem, &tab, cfg.tau, cfg.n_steps, columns, &y0, &settings, false, Some(&mut observer))
        }
        Driver::FixedPoint => {
            fixed_point_run(problem, &tab, cfg.tau, cfg.n_steps, cfg.s, &y0, &settings, false, Some(&mut observer))
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    match result {
        Ok(run) => {
            if let Some(e) = io_error {
                return Err((e, observed));
            }
            Ok(ExperimentOutcome {
                stats: run.stats,
                observed,
                final_state: run.final_state,
                wall_time,
            })
        }
        Err(e) => Err((e, observed)),
    }
}

/// One row of a sweep: the window size and its statistics or error.
pub type SweepRow = (usize, Result<ExperimentOutcome>);

/// Runs `cfg` once per window size, sequentially, keeping going after
/// failures. Rows come back sorted by `s`; successful rows are written to
/// `sweep_summary.csv` under `cfg.out`.
pub fn sweep(cfg: &ExperimentConfig, s_values: &[usize]) -> Result<Vec<SweepRow>> {
    if s_values.is_empty() {
        return Err(Error::Config("sweep needs at least one value of s".into()));
    }
    let mut values = s_values.to_vec();
    values.sort_unstable();
    values.dedup();
    let mut rows = Vec::with_capacity(values.len());
    for s in values {
        let mut c = cfg.clone();
        c.s = s;
        rows.push((s, run_experiment(&c)));
    }
    let ok: Vec<(usize, &SolverStats)> = rows
        .iter()
        .filter_map(|(s, r)| r.as_ref().ok().map(|o| (*s, &o.stats)))
        .collect();
    write_summary(&cfg.out.join("sweep_summary.csv"), &ok)?;
    Ok(rows)
}

pub fn summary_line(s: usize, stats: &SolverStats) -> String {
    format!(
        "{},{},{},{:.6},{:.6}",
        s,
        stats.nl_iterations(),
        stats.ls_iterations(),
        stats.ls_time(),
        stats.prec_setup_time()
    )
}

pub fn write_summary(path: &Path, rows: &[(usize, &SolverStats)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for (s, stats) in rows {
        writeln!(w, "{}", summary_line(*s, stats))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_per_step(path: &Path, steps: &[StepStats]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{PER_STEP_HEADER}")?;
    for st in steps {
        writeln!(w, "{},{},{}", st.time_step, st.nl_iterations, st.ls_iterations)?;
    }
    w.flush()?;
    Ok(())
}
