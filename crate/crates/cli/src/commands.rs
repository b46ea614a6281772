//! Subcommands. Each returns the files to write and a short summary for
//! stdout; nothing here touches the filesystem.

use crate::cli::Extras;
use crate::config::{Format, RunConfig, SweepAxis, SweepCommand};
use crate::error::{error_name, CliError};
use crate::svg::bifurcation_diagram;
use crate::table::{fmt_f64, to_json_bytes, DiagramTable};
use cmc_core::bifurcation::{
    branch_surface, branch_switch_with, check_alexandrov_symmetry, continue_branch, locate_bifurcation, quadratic_fit,
    BifurcationPoint, ContinuationOptions, LocateOptions, NewtonOptions,
};
use cmc_core::geometry::{normal_graph, write_obj, CylinderConfig, TMode};
use cmc_core::oracle::{modal_jacobi_grid, relative_error};
use cmc_core::spectrum::{
    closed_form_spectrum, planar_critical_length, stability, wedge_bifurcation_period, Classification,
    SpectrumEntry,
};
use cmc_core::CmcError;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, Vec<u8>)>,
    pub stdout: String,
}

fn table_file(stem: &str, table: &DiagramTable, format: Format) -> Result<(String, Vec<u8>), CliError> {
    Ok(match format {
        Format::Csv => (format!("{stem}.csv"), table.to_csv()?),
        Format::Json => (format!("{stem}.json"), table.to_json()?),
    })
}

fn require_h(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.task.h.ok_or_else(|| CliError::Config("this command needs a length h (--h or task.h)".into()))
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let config = cfg.cylinder()?;
    let h = require_h(cfg)?;
    let m = cfg.task.m;
    let closed = closed_form_spectrum(&config, h, TMode::DirichletEnds, m)?;
    let k_max = closed.iter().map(|e| e.k).max().unwrap_or(1);
    let n_max = closed.iter().map(|e| e.n).max().unwrap_or(1);
    let oracle = modal_jacobi_grid(&config, h, TMode::DirichletEnds, k_max, n_max, cfg.numerics.oracle_ns)?;
    let kappa = config.robin_slope().unwrap_or(0.0);
    let mut table = DiagramTable::new(&["k", "n", "lambda_closed", "lambda_oracle", "rel_err"]);
    let mut worst = 0.0f64;
    for e in &closed {
        let o = oracle
            .iter()
            .find(|o| o.k == e.k && o.n == e.n)
            .ok_or_else(|| CliError::Core(CmcError::ConvergenceFailure(format!("oracle lacks mode ({}, {})", e.k, e.n))))?;
        let err = relative_error(&config, o, e.lambda, kappa);
        worst = worst.max(err);
        table.push(vec![Some(e.k as f64), Some(e.n as f64), Some(e.lambda), Some(o.lambda), Some(err)])?;
    }
    Ok(Outcome {
        files: vec![table_file("spectrum", &table, cfg.output.format)?],
        stdout: format!("{} eigenvalues, lambda_min {}, max rel_err {}\n", closed.len(), fmt_f64(closed[0].lambda), fmt_f64(worst)),
    })
}

#[derive(Serialize)]
struct WitnessReport {
    k: usize,
    n: usize,
    lambda: f64,
    c: f64,
    branch: String,
}

impl From<&SpectrumEntry> for WitnessReport {
    fn from(e: &SpectrumEntry) -> Self {
        Self { k: e.k, n: e.n, lambda: e.lambda, c: e.c, branch: format!("{:?}", e.branch) }
    }
}

#[derive(Serialize)]
struct StabilityReport {
    h: f64,
    classification: String,
    lambda_min: f64,
    witness: Option<WitnessReport>,
}

fn classification_name(c: Classification) -> String {
    format!("{c:?}")
}

pub fn cmd_stability(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let config = cfg.cylinder()?;
    let h = require_h(cfg)?;
    let v = stability(&config, h)?;
    let report = StabilityReport {
        h,
        classification: classification_name(v.classification),
        lambda_min: v.lambda_min,
        witness: v.witness.as_ref().map(WitnessReport::from),
    };
    Ok(Outcome {
        stdout: format!("{} lambda_min {}\n", report.classification, fmt_f64(v.lambda_min)),
        files: vec![("stability.json".into(), to_json_bytes(&report)?)],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub h0: Option<f64>,
    pub period: Option<f64>,
    pub theorem_case: String,
}

/// Critical length and period, or the reason the family has none.
pub fn critical(config: &CylinderConfig) -> Result<CriticalReport, CmcError> {
    if config.is_planar() {
        match planar_critical_length(config.r, config.gamma) {
            Ok(h0) => Ok(CriticalReport { h0: Some(h0), period: Some(2.0 * h0), theorem_case: "PlanarStrip".into() }),
            Err(CmcError::NoCriticalLength) => {
                Ok(CriticalReport { h0: None, period: None, theorem_case: "NoCriticalLength".into() })
            }
            Err(e) => Err(e),
        }
    } else {
        match wedge_bifurcation_period(config) {
            Ok((t, case)) => Ok(CriticalReport { h0: Some(0.5 * t), period: Some(t), theorem_case: format!("{case:?}") }),
            Err(CmcError::NoBifurcation(_)) => {
                Ok(CriticalReport { h0: None, period: None, theorem_case: "NoBifurcation".into() })
            }
            Err(e) => Err(e),
        }
    }
}

pub fn cmd_critical(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = critical(&cfg.cylinder()?)?;
    let show = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "none".into());
    Ok(Outcome {
        stdout: format!("{} h0 {} period {}\n", report.theorem_case, show(report.h0), show(report.period)),
        files: vec![("critical.json".into(), to_json_bytes(&report)?)],
    })
}

#[derive(Serialize)]
struct BifurcationReport {
    h0: f64,
    radius: f64,
    period: f64,
    t_mode: String,
    nt: usize,
    ns: usize,
    kernel_dim: usize,
    transversality: f64,
    critical_eigenvalue: f64,
}

fn locate(cfg: &RunConfig) -> Result<BifurcationPoint, CliError> {
    let config = cfg.cylinder()?;
    let opts = LocateOptions {
        nt: cfg.numerics.nt,
        ns: cfg.numerics.ns,
        search: cfg.numerics.search.map(|[a, b]| (a, b)),
    };
    Ok(locate_bifurcation(&config, cfg.numerics.t_mode.into(), &opts)?)
}

pub fn cmd_bifurcate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = locate(cfg)?;
    let report = BifurcationReport {
        h0: p.h0,
        radius: p.config.r,
        period: p.period,
        t_mode: format!("{:?}", p.grid.t_mode),
        nt: p.grid.nt,
        ns: p.grid.ns,
        kernel_dim: p.kernel_dim,
        transversality: p.transversality,
        critical_eigenvalue: p.critical_eigenvalue,
    };
    let g = p.grid;
    let mut kernel = DiagramTable::new(&["t", "s", "u"]);
    for j in 0..g.nt {
        for i in 0..g.ns {
            kernel.push(vec![Some(g.t(j)), Some(g.s(i)), Some(p.kernel.get(j, i))])?;
        }
    }
    // Mesh of the cylinder displaced along the kernel, peak 10% of r.
    let amp = 0.1 * p.config.r / p.kernel.max_abs();
    let mesh = normal_graph(&p.config, &g, &p.kernel.scaled(amp))?;
    let mut obj = Vec::new();
    write_obj(&mesh, &mut obj)?;
    Ok(Outcome {
        stdout: format!(
            "H0 {} period {} kernel_dim {} transversality {}\n",
            fmt_f64(p.h0),
            fmt_f64(p.period),
            p.kernel_dim,
            fmt_f64(p.transversality)
        ),
        files: vec![
            ("bifurcation.json".into(), to_json_bytes(&report)?),
            table_file("kernel", &kernel, cfg.output.format)?,
            ("kernel.obj".into(), obj),
        ],
    })
}

pub fn cmd_trace(cfg: &RunConfig, extras: &Extras) -> Result<Outcome, CliError> {
    let p = locate(cfg)?;
    let newton = NewtonOptions { tol: cfg.numerics.newton_tol, max_iter: cfg.numerics.max_newton_iter };
    let start = branch_switch_with(&p, cfg.task.epsilon0, &newton)?;
    let opts = ContinuationOptions {
        newton: NewtonOptions { max_iter: extras.max_corrector_iter.unwrap_or(newton.max_iter), ..newton },
        min_step_fraction: cfg.numerics.min_step_fraction,
        max_step_factor: cfg.numerics.max_step_factor,
        reverse: cfg.task.reverse,
        ..ContinuationOptions::default()
    };
    let rest = continue_branch(&p, &start, cfg.task.steps, cfg.task.ds, &opts)?;
    let states: Vec<_> = std::iter::once(start).chain(rest).collect();

    let planar = p.config.is_planar();
    let mut table = DiagramTable::new(&["step", "arclength", "epsilon", "H", "residual_norm", "symmetry_defect"])
        .with_optional(&["symmetry_defect"]);
    let mut files = Vec::new();
    for (k, s) in states.iter().enumerate() {
        let sym = planar.then(|| check_alexandrov_symmetry(s));
        table.push(vec![Some(k as f64), Some(s.arclength), Some(s.epsilon), Some(s.h), Some(s.residual_norm), sym])?;
        let every = cfg.output.obj_every;
        if every > 0 && k % every == 0 {
            let mut obj = Vec::new();
            write_obj(&branch_surface(&p, s)?, &mut obj)?;
            files.push((format!("state_{k:03}.obj"), obj));
        }
    }
    files.insert(0, table_file("branch", &table, cfg.output.format)?);
    if cfg.output.svg {
        let pts: Vec<(f64, f64)> = states.iter().map(|s| (s.h, s.epsilon)).collect();
        files.push(("branch.svg".into(), bifurcation_diagram(&pts, p.h0).into_bytes()));
    }
    let (a, r2) = quadratic_fit(p.h0, &states[1..]);
    let last = states.last().expect("start state");
    Ok(Outcome {
        stdout: format!(
            "H0 {} states {} final epsilon {} final H {} fit coefficient {} R2 {}\n",
            fmt_f64(p.h0),
            states.len(),
            fmt_f64(last.epsilon),
            fmt_f64(last.h),
            fmt_f64(a),
            fmt_f64(r2)
        ),
        files,
    })
}

fn with_value(cfg: &RunConfig, axis: SweepAxis, v: f64) -> Result<(CylinderConfig, Option<f64>), CmcError> {
    let mut block = cfg.scenario.ok_or_else(|| CmcError::InvalidConfig("no scenario given".into()))?;
    let mut h = cfg.task.h;
    match axis {
        SweepAxis::Gamma => block.gamma.0 = v,
        SweepAxis::Beta => block.beta = Some(crate::angle::Angle(v)),
        SweepAxis::R => block.r = v,
        SweepAxis::H => h = Some(v),
    }
    let config = crate::config::scenario_config(&block).map_err(|e| CmcError::InvalidConfig(e.to_string()))?;
    Ok((config, h))
}

type SweepRow = (Vec<Option<f64>>, String);

fn sweep_row(cfg: &RunConfig, axis: SweepAxis, command: SweepCommand, v: f64) -> SweepRow {
    let out = with_value(cfg, axis, v).and_then(|(config, h)| match command {
        SweepCommand::Critical => critical(&config).map(|r| (vec![Some(v), r.h0, r.period], r.theorem_case)),
        SweepCommand::Stability => {
            let h = h.ok_or_else(|| CmcError::InvalidConfig("stability sweep needs h".into()))?;
            stability(&config, h).map(|s| (vec![Some(v), Some(s.lambda_min)], classification_name(s.classification)))
        }
    });
    out.unwrap_or_else(|e| {
        let width = if command == SweepCommand::Critical { 3 } else { 2 };
        let mut row = vec![None; width];
        row[0] = Some(v);
        (row, error_name(&e).to_string())
    })
}

pub fn cmd_sweep(cfg: &RunConfig, threads: Option<usize>) -> Result<Outcome, CliError> {
    let sweep = cfg.task.sweep.clone().ok_or_else(|| CliError::Config("no sweep block".into()))?;
    if cfg.scenario.is_none() {
        return Err(CliError::Config("no scenario given (use --config or --scenario)".into()));
    }
    let mut table = match sweep.command {
        SweepCommand::Critical => DiagramTable::new(&["value", "h0", "period"]).with_optional(&["h0", "period"]),
        SweepCommand::Stability => DiagramTable::new(&["value", "lambda_min"]).with_optional(&["lambda_min"]),
    }
    .with_status();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        sweep.values.par_iter().map(|v| sweep_row(cfg, sweep.axis, sweep.command, v.0)).collect()
    });
    for (row, status) in rows {
        table.push_with_status(row, &status)?;
    }
    Ok(Outcome {
        stdout: format!("{} sweep rows\n", table.len()),
        files: vec![table_file("sweep", &table, cfg.output.format)?],
    })
}
