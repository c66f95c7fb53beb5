//! Multiplier sweeps over the benchmark schemes, with per-cell error
//! isolation and table emission.

use crate::acuc::{self, AcucOptions};
use crate::dcuc::{self, DcucOptions};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{SolveStatus, SolverConfig};
use crate::pricing::{self, PriceScheme};
use crate::solver;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    Dcuc,
    Acuc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Strengthened SDP relaxation (+ envelope prices and settlement
    /// for DCUC).
    Sdp,
    /// LP relaxation baseline (gap + subgradient prices for DCUC).
    LpBaseline,
    /// Fixed-binary pricing LP (DCUC only).
    FixedBinary,
    /// Relaxed-binary conic baseline (ACUC only).
    RelaxedBinary,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Sdp => "sdp",
            Scheme::LpBaseline => "lp-baseline",
            Scheme::FixedBinary => "fixed-binary",
            Scheme::RelaxedBinary => "relaxed-binary",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance: Instance,
    pub model: ModelKind,
    pub schemes: Vec<Scheme>,
    pub multipliers: Vec<f64>,
    /// Optional horizon truncation.
    pub periods: Option<usize>,
    pub solver: SolverConfig,
    pub dcuc_options: DcucOptions,
    pub acuc_options: AcucOptions,
    /// Whether to run pricing + settlement per cell (DCUC only).
    pub settle: bool,
}

/// One (multiplier, scheme) result cell. Every requested cell appears in
/// the archive with an explicit status; failures carry the error text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cell {
    pub multiplier: f64,
    pub scheme: String,
    pub status: String,
    pub objective: Option<f64>,
    /// Optimality gap vs the exact MILP, percent.
    pub gap_percent: Option<f64>,
    /// Gap from a tightened-tolerance re-run, archived when the default
    /// run produced a negative gap.
    pub gap_percent_tight: Option<f64>,
    pub total_loc: Option<f64>,
    pub solve_seconds: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ResultsArchive {
    pub instance: String,
    pub model: String,
    pub cells: Vec<Cell>,
}

fn fail_cell(multiplier: f64, scheme: Scheme, err: &Error) -> Cell {
    Cell {
        multiplier,
        scheme: scheme.label().into(),
        status: "Error".into(),
        objective: None,
        gap_percent: None,
        gap_percent_tight: None,
        total_loc: None,
        solve_seconds: 0.0,
        note: Some(err.to_string()),
    }
}

fn status_str(s: SolveStatus) -> String {
    format!("{:?}", s)
}

/// Run every (multiplier, scheme) cell. Cells fail independently; a solver
/// error marks the cell and the sweep continues.
pub fn run_sweep(cfg: &RunConfig) -> Result<ResultsArchive> {
    if cfg.multipliers.is_empty() || cfg.multipliers.iter().any(|&m| m <= 0.0) {
        return Err(Error::InvariantViolation(
            "multipliers must be nonempty and positive".into(),
        ));
    }
    let base = match cfg.periods {
        Some(t) => cfg.instance.with_periods(t)?,
        None => cfg.instance.clone(),
    };
    let mut archive = ResultsArchive {
        instance: base.name.clone(),
        model: format!("{:?}", cfg.model),
        cells: Vec::new(),
    };
    for &mult in &cfg.multipliers {
        let inst = base.apply_load_multiplier(mult)?;
        match cfg.model {
            ModelKind::Dcuc => run_dcuc_cells(cfg, &inst, mult, &mut archive),
            ModelKind::Acuc => run_acuc_cells(cfg, &inst, mult, &mut archive),
        }
    }
    Ok(archive)
}

fn run_dcuc_cells(cfg: &RunConfig, inst: &Instance, mult: f64, archive: &mut ResultsArchive) {
    let sf = match inst.compute_shift_factors() {
        Ok(sf) => sf,
        Err(e) => {
            for &s in &cfg.schemes {
                archive.cells.push(fail_cell(mult, s, &e));
            }
            return;
        }
    };
    // The exact MILP anchors every gap.
    let milp = dcuc::build_dcuc_milp(inst, &sf)
        .and_then(|m| solver::solve(&m, &cfg.solver))
        .and_then(|r| {
            r.require_optimal()?;
            Ok(r)
        });
    let exact = match &milp {
        Ok(r) => Some(r.objective),
        Err(_) => None,
    };
    for &scheme in &cfg.schemes {
        let cell = match scheme {
            Scheme::LpBaseline => dcuc_relaxation_cell(cfg, inst, &sf, mult, scheme, exact),
            Scheme::Sdp => dcuc_relaxation_cell(cfg, inst, &sf, mult, scheme, exact),
            Scheme::FixedBinary => match &milp {
                Ok(mr) => dcuc_fixed_binary_cell(cfg, inst, &sf, mult, mr, exact),
                Err(e) => fail_cell(mult, scheme, e),
            },
            Scheme::RelaxedBinary => fail_cell(
                mult,
                scheme,
                &Error::Unsupported("relaxed-binary is an ACUC scheme".into()),
            ),
        };
        archive.cells.push(cell);
    }
}

fn gap_with_retry(
    cfg: &RunConfig,
    model: &crate::model::LiftedModel,
    exact: f64,
    relaxed: f64,
) -> (Option<f64>, Option<f64>) {
    let gap = dcuc::optimality_gap(exact, relaxed).ok();
    match gap {
        Some(g) if g < 0.0 => {
            // Negative gap: re-run at tightened tolerance and archive both.
            let tight = SolverConfig {
                conic_tol: 1e-10,
                ..cfg.solver.clone()
            };
            let re = solver::solve_relaxed(model, &tight)
                .ok()
                .filter(|r| r.status == SolveStatus::Optimal)
                .and_then(|r| dcuc::optimality_gap(exact, r.objective).ok());
            (gap, re)
        }
        _ => (gap, None),
    }
}

fn dcuc_relaxation_cell(
    cfg: &RunConfig,
    inst: &Instance,
    sf: &crate::instance::ShiftFactorMatrix,
    mult: f64,
    scheme: Scheme,
    exact: Option<f64>,
) -> Cell {
    let built = match scheme {
        Scheme::LpBaseline => dcuc::build_lp_relaxation(inst, sf),
        Scheme::Sdp => dcuc::build_dcuc_sdp(inst, sf, &cfg.dcuc_options).map(|(m, _)| m),
        _ => unreachable!(),
    };
    let model = match built {
        Ok(m) => m,
        Err(e) => return fail_cell(mult, scheme, &e),
    };
    let r = match solver::solve_relaxed(&model, &cfg.solver) {
        Ok(r) => r,
        Err(e) => return fail_cell(mult, scheme, &e),
    };
    let mut cell = Cell {
        multiplier: mult,
        scheme: scheme.label().into(),
        status: status_str(r.status),
        objective: (r.status == SolveStatus::Optimal).then_some(r.objective),
        gap_percent: None,
        gap_percent_tight: None,
        total_loc: None,
        solve_seconds: r.solve_seconds,
        note: None,
    };
    if r.status != SolveStatus::Optimal {
        return cell;
    }
    if let Some(exact) = exact {
        let (gap, tight) = gap_with_retry(cfg, &model, exact, r.objective);
        cell.gap_percent = gap;
        cell.gap_percent_tight = tight;
    }
    if cfg.settle {
        let settled = settle_dcuc(cfg, inst, sf, scheme, &model, &r);
        match settled {
            Ok(loc) => cell.total_loc = Some(loc),
            Err(e) => cell.note = Some(format!("settlement failed: {}", e)),
        }
    }
    cell
}

fn settle_dcuc(
    cfg: &RunConfig,
    inst: &Instance,
    sf: &crate::instance::ShiftFactorMatrix,
    scheme: Scheme,
    model: &crate::model::LiftedModel,
    r: &crate::model::SolveResult,
) -> Result<f64> {
    let prices = match scheme {
        Scheme::Sdp => pricing::sdp_prices_dcuc(inst, sf, model, r)?,
        Scheme::LpBaseline => {
            pricing::linear_lp_prices(inst, sf, model, r, PriceScheme::LpRelaxation)?
        }
        _ => return Err(Error::Unsupported("scheme has no prices".into())),
    };
    let milp = solver::solve(&dcuc::build_dcuc_milp(inst, sf)?, &cfg.solver)?;
    milp.require_optimal()?;
    let dispatch = pricing::dispatch_from_milp(inst, &milp)?;
    let caveat = pricing::rhs_nonlinear_in_demand(model);
    let report = pricing::settle(inst, &dispatch, &prices, r.objective, caveat, &cfg.solver)?;
    Ok(report.total_loc)
}

fn dcuc_fixed_binary_cell(
    cfg: &RunConfig,
    inst: &Instance,
    sf: &crate::instance::ShiftFactorMatrix,
    mult: f64,
    milp: &crate::model::SolveResult,
    exact: Option<f64>,
) -> Cell {
    let scheme = Scheme::FixedBinary;
    let run = (|| -> Result<Cell> {
        let fb = dcuc::build_fixed_binary_lp(inst, sf, milp)?;
        let r = solver::solve_relaxed(&fb, &cfg.solver)?;
        r.require_optimal()?;
        let mut cell = Cell {
            multiplier: mult,
            scheme: scheme.label().into(),
            status: status_str(r.status),
            objective: Some(r.objective),
            gap_percent: exact.and_then(|e| dcuc::optimality_gap(e, r.objective).ok()),
            gap_percent_tight: None,
            total_loc: None,
            solve_seconds: r.solve_seconds,
            note: None,
        };
        if cfg.settle {
            let prices = pricing::fixed_binary_prices(inst, sf, &fb, &r)?;
            let dispatch = pricing::dispatch_from_milp(inst, milp)?;
            let report =
                pricing::settle(inst, &dispatch, &prices, r.objective, false, &cfg.solver)?;
            cell.total_loc = Some(report.total_loc);
        }
        Ok(cell)
    })();
    run.unwrap_or_else(|e| fail_cell(mult, scheme, &e))
}

fn run_acuc_cells(cfg: &RunConfig, inst: &Instance, mult: f64, archive: &mut ResultsArchive) {
    for &scheme in &cfg.schemes {
        let built = match scheme {
            Scheme::Sdp => acuc::build_acuc_sdp(inst, &cfg.acuc_options).map(|(m, _)| m),
            Scheme::RelaxedBinary => acuc::build_acuc_relaxed_binary(inst),
            _ => Err(Error::Unsupported(format!(
                "{} is not an ACUC scheme",
                scheme.label()
            ))),
        };
        let cell = match built.and_then(|m| solver::solve_relaxed(&m, &cfg.solver)) {
            Ok(r) => Cell {
                multiplier: mult,
                scheme: scheme.label().into(),
                status: status_str(r.status),
                objective: (r.status == SolveStatus::Optimal).then_some(r.objective),
                gap_percent: None,
                gap_percent_tight: None,
                total_loc: None,
                solve_seconds: r.solve_seconds,
                note: None,
            },
            Err(e) => fail_cell(mult, scheme, &e),
        };
        archive.cells.push(cell);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// Emit the gap and LOC tables (multiplier x scheme). The `sdp_lower`
/// column marks multipliers where the SDP-price LOC undercuts the
/// fixed-binary LOC.
pub fn emit_tables(archive: &ResultsArchive, format: TableFormat) -> Result<String> {
    if archive.cells.is_empty() {
        return Err(Error::InvariantViolation("empty archive".into()));
    }
    let mut mults: Vec<f64> = archive.cells.iter().map(|c| c.multiplier).collect();
    mults.sort_by(|a, b| a.partial_cmp(b).unwrap());
    mults.dedup();
    let mut schemes: Vec<String> = archive.cells.iter().map(|c| c.scheme.clone()).collect();
    schemes.sort();
    schemes.dedup();
    let cell = |m: f64, s: &str| {
        archive
            .cells
            .iter()
            .find(|c| c.multiplier == m && c.scheme == s)
    };
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{:.4}", x)).unwrap_or_else(|| "-".into());
    let mut out = String::new();
    let sep = |cols: usize| -> String {
        match format {
            TableFormat::Csv => String::new(),
            TableFormat::Markdown => {
                format!("|{}\n", "---|".repeat(cols))
            }
        }
    };
    let (open, close) = match format {
        TableFormat::Csv => ("", ","),
        TableFormat::Markdown => ("|", "|"),
    };
    let emit_header = |out: &mut String, title: &str, cols: &[String]| {
        if format == TableFormat::Markdown {
            out.push_str(&format!("\n## {}\n\n", title));
        } else {
            out.push_str(&format!("# {}\n", title));
        }
        out.push_str(open);
        out.push_str(&cols.join(close));
        if format == TableFormat::Markdown {
            out.push('|');
        }
        out.push('\n');
        out.push_str(&sep(cols.len()));
    };

    // Objective / gap table.
    let mut cols: Vec<String> = vec!["multiplier".into()];
    for s in &schemes {
        cols.push(format!("{}_objective", s));
        cols.push(format!("{}_gap_pct", s));
        cols.push(format!("{}_status", s));
    }
    emit_header(&mut out, "objective and optimality gap", &cols);
    for &m in &mults {
        let mut row: Vec<String> = vec![format!("{:.2}", m)];
        for s in &schemes {
            match cell(m, s) {
                Some(c) => {
                    row.push(fmt_opt(c.objective));
                    row.push(fmt_opt(c.gap_percent.map(|g| {
                        // Report the tightened re-run when one exists.
                        c.gap_percent_tight.unwrap_or(g)
                    })));
                    row.push(c.status.clone());
                }
                None => {
                    row.push("-".into());
                    row.push("-".into());
                    row.push("absent".into());
                }
            }
        }
        out.push_str(open);
        out.push_str(&row.join(close));
        if format == TableFormat::Markdown {
            out.push('|');
        }
        out.push('\n');
    }

    // LOC table when any cell has one.
    if archive.cells.iter().any(|c| c.total_loc.is_some()) {
        let mut cols: Vec<String> = vec!["multiplier".into()];
        for s in &schemes {
            cols.push(format!("{}_total_loc", s));
        }
        cols.push("sdp_lower".into());
        emit_header(&mut out, "total lost opportunity cost", &cols);
        for &m in &mults {
            let mut row: Vec<String> = vec![format!("{:.2}", m)];
            let sdp_loc = cell(m, "sdp").and_then(|c| c.total_loc);
            let fb_loc = cell(m, "fixed-binary").and_then(|c| c.total_loc);
            for s in &schemes {
                row.push(fmt_opt(cell(m, s).and_then(|c| c.total_loc)));
            }
            row.push(match (sdp_loc, fb_loc) {
                (Some(a), Some(b)) => (a < b).to_string(),
                _ => "-".into(),
            });
            out.push_str(open);
            out.push_str(&row.join(close));
            if format == TableFormat::Markdown {
                out.push('|');
            }
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Instance {
        Instance::from_str(
            r#"{
  "meta": {"name": "one", "periods": 2, "ac_capable": false, "slack_bus": 0},
  "buses": [{"id": 0}],
  "lines": [],
  "generators": [{"id": "g1", "bus": 0, "cp": 20.0, "cu": 0.0, "cv": 0.0, "cz": 100.0,
                  "pmin": 5.0, "pmax": 50.0, "ru": 50.0, "rd": 50.0,
                  "min_up": 1, "min_down": 1, "initial_on": true, "initial_power": 30.0}],
  "demand": {"real": [[30.0, 40.0]]}
}"#,
        )
        .unwrap()
    }

    /// One multiplier, one scheme: archive ends up with exactly one cell.
    #[test]
    fn single_cell_archive() {
        let cfg = RunConfig {
            instance: toy(),
            model: ModelKind::Dcuc,
            schemes: vec![Scheme::LpBaseline],
            multipliers: vec![1.0],
            periods: None,
            solver: SolverConfig::default(),
            dcuc_options: Default::default(),
            acuc_options: Default::default(),
            settle: false,
        };
        let archive = run_sweep(&cfg).unwrap();
        assert_eq!(archive.cells.len(), 1);
        assert_eq!(archive.cells[0].status, "Optimal");
        let csv = emit_tables(&archive, TableFormat::Csv).unwrap();
        assert!(csv.lines().count() >= 3, "csv:\n{}", csv);
        let md = emit_tables(&archive, TableFormat::Markdown).unwrap();
        assert!(md.contains("|"), "md:\n{}", md);
    }

    /// Determinism: identical configs give identical archives except for
    /// timing fields.
    #[test]
    fn sweep_is_deterministic() {
        let cfg = RunConfig {
            instance: toy(),
            model: ModelKind::Dcuc,
            schemes: vec![Scheme::LpBaseline, Scheme::FixedBinary],
            multipliers: vec![0.5, 1.0],
            periods: None,
            solver: SolverConfig::default(),
            dcuc_options: Default::default(),
            acuc_options: Default::default(),
            settle: true,
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a.cells.len(), b.cells.len());
        for (x, y) in a.cells.iter().zip(&b.cells) {
            assert_eq!(x.scheme, y.scheme);
            assert_eq!(x.status, y.status);
            assert_eq!(x.objective, y.objective);
            assert_eq!(x.gap_percent, y.gap_percent);
            assert_eq!(x.total_loc, y.total_loc);
        }
    }

    /// Bad multipliers are a config error, not a sweep of failures.
    #[test]
    fn invalid_multipliers_rejected() {
        let cfg = RunConfig {
            instance: toy(),
            model: ModelKind::Dcuc,
            schemes: vec![Scheme::LpBaseline],
            multipliers: vec![],
            periods: None,
            solver: SolverConfig::default(),
            dcuc_options: Default::default(),
            acuc_options: Default::default(),
            settle: false,
        };
        assert!(run_sweep(&cfg).is_err());
    }
}
