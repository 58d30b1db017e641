//! Plain `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dirk::TableauKind;
use crate::error::{Error, Result};
use crate::krylov::{ConvergenceMode, PreconditionerKind, SolverKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    ConvDiff,
    DiffReact,
    Richards,
    Manufactured,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "convdiff" => Ok(Self::ConvDiff),
            "diffreact" => Ok(Self::DiffReact),
            "richards" => Ok(Self::Richards),
            "manufactured" => Ok(Self::Manufactured),
            other => Err(Error::Config(format!("unknown problem '{other}'"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ConvDiff => "convdiff",
            Self::DiffReact => "diffreact",
            Self::Richards => "richards",
            Self::Manufactured => "manufactured",
        })
    }
}

/// How windows of several time steps are solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driver {
    /// Stage pipeline with one linear solve per outer iteration; works for
    /// linear and nonlinear problems.
    Pipelined,
    /// All-at-once fixed-point iteration over `s` steps; linear problems only.
    FixedPoint,
}

impl FromStr for Driver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pipelined" | "pipeline" => Ok(Self::Pipelined),
            "fixed_point" | "fixedpoint" => Ok(Self::FixedPoint),
            other => Err(Error::Config(format!("unknown driver '{other}'"))),
        }
    }
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pipelined => "pipelined",
            Self::FixedPoint => "fixed_point",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterCombine {
    Any,
    Both,
}

impl FromStr for OuterCombine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "any" | "or" => Ok(Self::Any),
            "both" | "and" => Ok(Self::Both),
            other => Err(Error::Config(format!("unknown outer_combine '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub nx: usize,
    /// Defaults to `nx` on the unit square and `3 nx / 2` for Richards.
    pub ny: Option<usize>,
    pub tableau: TableauKind,
    pub tau: f64,
    pub n_steps: usize,
    pub s: usize,
    /// Relative residual reduction of each Krylov solve. When unset,
    /// `1e-8` for `s = 1` and `1e-2` otherwise.
    pub inner_reduction: Option<f64>,
    pub outer_tolerance: f64,
    /// Optional relative outer tolerance, combined with the absolute one.
    pub outer_relative: Option<f64>,
    /// `any`: either outer bound suffices; `both`: both must hold.
    pub outer_combine: OuterCombine,
    pub max_outer: usize,
    pub max_inner: usize,
    pub preconditioner: PreconditionerKind,
    pub solver: SolverKind,
    pub convergence_mode: ConvergenceMode,
    pub driver: Driver,
    pub out: PathBuf,
    pub vtk: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::ConvDiff,
            nx: 64,
            ny: None,
            tableau: TableauKind::CrankNicolson,
            tau: 0.12,
            n_steps: 40,
            s: 1,
            inner_reduction: None,
            outer_tolerance: 1e-8,
            outer_relative: None,
            outer_combine: OuterCombine::Any,
            max_outer: 50,
            max_inner: 1000,
            preconditioner: PreconditionerKind::Ilu0,
            solver: SolverKind::BiCgStab,
            convergence_mode: ConvergenceMode::AllColumns,
            driver: Driver::Pipelined,
            out: PathBuf::from("results"),
            vtk: false,
            seed: 42,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid value '{value}' for '{key}'"))),
    }
}

impl ExperimentConfig {
    /// Parses a configuration text; keys not mentioned keep their defaults.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            cfg.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Sets one key; shared by the file parser and command-line overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "problem" => self.problem = value.parse()?,
            "nx" => self.nx = parse(key, value)?,
            "ny" => self.ny = Some(parse(key, value)?),
            "tableau" => self.tableau = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "tau" => self.tau = parse(key, value)?,
            "n_steps" => self.n_steps = parse(key, value)?,
            "s" => self.s = parse(key, value)?,
            "inner_reduction" => self.inner_reduction = Some(parse(key, value)?),
            "outer_tolerance" => self.outer_tolerance = parse(key, value)?,
            "outer_relative" => self.outer_relative = Some(parse(key, value)?),
            "outer_combine" => self.outer_combine = value.parse()?,
            "max_outer" => self.max_outer = parse(key, value)?,
            "max_inner" => self.max_inner = parse(key, value)?,
            "preconditioner" => {
                self.preconditioner = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "solver" => self.solver = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "convergence_mode" => {
                self.convergence_mode = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "driver" => self.driver = value.parse()?,
            "out" => self.out = PathBuf::from(value),
            "vtk" => self.vtk = parse_bool(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn ny(&self) -> usize {
        self.ny.unwrap_or(match self.problem {
            ProblemKind::Richards => self.nx * 3 / 2,
            _ => self.nx,
        })
    }

    pub fn inner_reduction(&self) -> f64 {
        self.inner_reduction.unwrap_or(if self.s == 1 { 1e-8 } else { 1e-2 })
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.s == 0 {
            return Err(Error::Config("s must be at least 1".into()));
        }
        if self.nx == 0 || self.ny() == 0 {
            return Err(Error::Config("grid must have at least one cell per direction".into()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        if !in_unit(self.inner_reduction()) || !in_unit(self.outer_tolerance) {
            return Err(Error::Config("tolerances must lie in (0, 1)".into()));
        }
        if let Some(r) = self.outer_relative {
            if !in_unit(r) {
                return Err(Error::Config("tolerances must lie in (0, 1)".into()));
            }
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::Config("iteration limits must be positive".into()));
        }
        if !self.tableau.build().map_err(|e| Error::Config(e.to_string()))?.stiffly_accurate() {
            return Err(Error::Config(format!("tableau {} is not stiffly accurate", self.tableau)));
        }
        if self.driver == Driver::FixedPoint && matches!(self.problem, ProblemKind::DiffReact | ProblemKind::Richards) {
            return Err(Error::Config(format!("the fixed-point driver needs a linear problem, got {}", self.problem)));
        }
        Ok(())
    }
}
