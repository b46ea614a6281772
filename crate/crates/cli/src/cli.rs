//! Command-line surface and its merge into a [`RunConfig`].

use crate::angle::parse_angle;
use crate::config::{
    ConvexityName, Format, RunConfig, ScenarioBlock, ScenarioKind, SweepAxis, SweepBlock, SweepCommand, TModeName,
};
use crate::angle::Angle;
use crate::error::CliError;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

fn angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Planar,
    Wedge,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConvexityArg {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TModeArg {
    DirichletEnds,
    Periodic,
    HalfPeriodNeumann,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Gamma,
    Beta,
    R,
    H,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepCommandArg {
    Critical,
    Stability,
}

/// Stability spectra and bifurcation of capillary cylinders in a strip or a
/// right wedge.
#[derive(Debug, Parser)]
#[command(name = "cmc-bifurcate", version)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, env = "CMC_BIFURCATE_THREADS")]
    pub threads: Option<usize>,
    /// Scenario kind; overrides the configuration file.
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<KindArg>,
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Contact angle, e.g. `3pi/4`.
    #[arg(long, global = true, value_parser = angle_arg, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Wedge arc parameter.
    #[arg(long, global = true, value_parser = angle_arg)]
    pub beta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub convexity: Option<ConvexityArg>,
    #[arg(long, global = true)]
    pub nt: Option<usize>,
    #[arg(long, global = true)]
    pub ns: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub t_mode: Option<TModeArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest eigenvalues of the Jacobi operator, closed form against the oracle.
    Spectrum {
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
    },
    /// Stability verdict for a cylinder of length h.
    Stability {
        #[arg(long)]
        h: Option<f64>,
    },
    /// Critical length and bifurcation period.
    Critical,
    /// Bifurcation point, kernel and transversality.
    Bifurcate,
    /// Switch onto the bifurcating branch and continue it.
    Trace {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        ds: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        epsilon0: Option<f64>,
        /// Walk against the initial secant.
        #[arg(long)]
        reverse: bool,
        /// Corrector iteration cap during continuation.
        #[arg(long)]
        max_corrector_iter: Option<usize>,
        /// Write a mesh for every n-th state.
        #[arg(long)]
        obj_every: Option<usize>,
    },
    /// Run `critical` or `stability` over a list of parameter values.
    Sweep {
        #[arg(long, value_enum)]
        axis: Option<AxisArg>,
        /// Comma-separated values; angle expressions allowed.
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        #[arg(long = "run", value_enum)]
        run: Option<SweepCommandArg>,
        #[arg(long)]
        h: Option<f64>,
    },
}

/// Options that only affect a single command and have no config field.
#[derive(Debug, Clone, Default)]
pub struct Extras {
    pub max_corrector_iter: Option<usize>,
}

impl Cli {
    /// Configuration file (if any) with command-line overrides applied,
    /// validated.
    pub fn resolve(&self) -> Result<(RunConfig, Extras), CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        self.apply_scenario(&mut cfg)?;
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        if let Some(nt) = self.nt {
            cfg.numerics.nt = nt;
        }
        if let Some(ns) = self.ns {
            cfg.numerics.ns = ns;
        }
        if let Some(t) = self.t_mode {
            cfg.numerics.t_mode = match t {
                TModeArg::DirichletEnds => TModeName::DirichletEnds,
                TModeArg::Periodic => TModeName::Periodic,
                TModeArg::HalfPeriodNeumann => TModeName::HalfPeriodNeumann,
            };
        }
        let mut extras = Extras::default();
        match &self.command {
            Command::Spectrum { h, m } => {
                cfg.task.h = h.or(cfg.task.h);
                cfg.task.m = m.unwrap_or(cfg.task.m);
            }
            Command::Stability { h } => cfg.task.h = h.or(cfg.task.h),
            Command::Critical | Command::Bifurcate => {}
            Command::Trace { steps, ds, epsilon0, reverse, max_corrector_iter, obj_every } => {
                cfg.task.steps = steps.unwrap_or(cfg.task.steps);
                cfg.task.ds = ds.unwrap_or(cfg.task.ds);
                cfg.task.epsilon0 = epsilon0.unwrap_or(cfg.task.epsilon0);
                cfg.task.reverse |= *reverse;
                cfg.output.obj_every = obj_every.unwrap_or(cfg.output.obj_every);
                extras.max_corrector_iter = *max_corrector_iter;
            }
            Command::Sweep { axis, values, run, h } => {
                cfg.task.h = h.or(cfg.task.h);
                let mut sweep = cfg.task.sweep.clone().unwrap_or(SweepBlock {
                    axis: SweepAxis::Gamma,
                    values: Vec::new(),
                    command: SweepCommand::Critical,
                });
                if let Some(a) = axis {
                    sweep.axis = match a {
                        AxisArg::Gamma => SweepAxis::Gamma,
                        AxisArg::Beta => SweepAxis::Beta,
                        AxisArg::R => SweepAxis::R,
                        AxisArg::H => SweepAxis::H,
                    };
                }
                if let Some(v) = values {
                    sweep.values = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| parse_angle(s).map(Angle))
                        .collect::<Result<_, _>>()
                        .map_err(CliError::Config)?;
                }
                if let Some(c) = run {
                    sweep.command = match c {
                        SweepCommandArg::Critical => SweepCommand::Critical,
                        SweepCommandArg::Stability => SweepCommand::Stability,
                    };
                }
                cfg.task.sweep = Some(sweep);
            }
        }
        cfg.validate()?;
        Ok((cfg, extras))
    }

    fn apply_scenario(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        let any = self.scenario.is_some()
            || self.r.is_some()
            || self.gamma.is_some()
            || self.beta.is_some()
            || self.convexity.is_some();
        if !any {
            return Ok(());
        }
        let mut block = match (cfg.scenario, self.scenario) {
            (Some(b), None) => b,
            (existing, Some(kind)) => {
                let kind = match kind {
                    KindArg::Planar => ScenarioKind::Planar,
                    KindArg::Wedge => ScenarioKind::Wedge,
                };
                match existing {
                    Some(b) if b.kind == kind => b,
                    _ => {
                        let gamma = self
                            .gamma
                            .ok_or_else(|| CliError::Config("--scenario needs --gamma".into()))?;
                        ScenarioBlock { kind, r: 1.0, gamma: Angle(gamma), beta: None, convexity: None }
                    }
                }
            }
            (None, None) => return Err(CliError::Config("scenario flags need --scenario or a configuration".into())),
        };
        if let Some(r) = self.r {
            block.r = r;
        }
        if let Some(g) = self.gamma {
            block.gamma = Angle(g);
        }
        if let Some(b) = self.beta {
            block.beta = Some(Angle(b));
        }
        if let Some(c) = self.convexity {
            block.convexity = Some(match c {
                ConvexityArg::Convex => ConvexityName::Convex,
                ConvexityArg::Concave => ConvexityName::Concave,
            });
        }
        cfg.scenario = Some(block);
        Ok(())
    }
}
