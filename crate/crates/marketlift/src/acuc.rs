//! ACUC model builders: the SDP relaxation combining the rectangular
//! voltage lifting with the unit-commitment lifting, the relaxed-binary
//! baseline, and ingestion of externally produced feasible AC dispatches.
//!
//! Complex quantities are expanded to real pairs: per period the voltage
//! vector [vR; vI] is lifted into a raw 2N x 2N PSD block W. Directed line
//! flows p_ijt / q_ijt are explicit free variables tied to W cells by the
//! rectangular flow rows. Reactive output is stored shifted,
//! q~ = q - Q^min z >= 0, so it can join the nonnegative UC lifting.

use crate::dcuc::{self, CoreLayout, Row};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::mbqp::{self, CoverageReport, MbqpEquality, MbqpModel};
use crate::model::{
    ConstraintId, LiftedModel, OpKind, Part, RawPsdBlock, Sense, Side, SocRow, VarRef,
};
use crate::rhs::{AffineRhs, ParamId, RhsPolynomial};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct AcucOptions {
    /// Whether slacked binary upper-bound rows also receive RLT squares.
    pub rlt_binary_ub: bool,
    /// Whether the reactive aggregate row receives an RLT square
    /// (off by default, matching the real-only aggregate treatment).
    pub rlt_reactive_aggregate: bool,
}

impl Default for AcucOptions {
    fn default() -> Self {
        AcucOptions {
            rlt_binary_ub: true,
            rlt_reactive_aggregate: false,
        }
    }
}

/// Core variable layout: per (g, t) the quintuple (p, q~, u, v, z),
/// then one loss variable per period.
#[derive(Debug, Clone, Copy)]
pub struct AcucVars {
    pub n_gens: usize,
    pub periods: usize,
    pub n_buses: usize,
}

impl AcucVars {
    pub fn new(inst: &Instance) -> Self {
        AcucVars {
            n_gens: inst.generators.len(),
            periods: inst.periods,
            n_buses: inst.n_buses,
        }
    }
    pub(crate) fn layout(&self) -> CoreLayout {
        CoreLayout {
            n_gens: self.n_gens,
            stride: 5,
            p_off: 0,
            u_off: 2,
            v_off: 3,
            z_off: 4,
        }
    }
    pub fn p(&self, g: usize, t: usize) -> usize {
        5 * (t * self.n_gens + g)
    }
    /// Shifted reactive output q~ = q - Q^min z.
    pub fn qs(&self, g: usize, t: usize) -> usize {
        self.p(g, t) + 1
    }
    pub fn u(&self, g: usize, t: usize) -> usize {
        self.p(g, t) + 2
    }
    pub fn v(&self, g: usize, t: usize) -> usize {
        self.p(g, t) + 3
    }
    pub fn z(&self, g: usize, t: usize) -> usize {
        self.p(g, t) + 4
    }
    pub fn ploss(&self, t: usize) -> usize {
        5 * self.n_gens * self.periods + t
    }
    pub fn n_named(&self) -> usize {
        5 * self.n_gens * self.periods + self.periods
    }
    /// Core (PSD-eligible) variables of one period.
    pub fn core_of_period(&self, t: usize) -> Vec<usize> {
        (0..self.n_gens)
            .flat_map(|g| self.p(g, t)..self.p(g, t) + 5)
            .collect()
    }
}

/// Upper bound on total real losses in one period, from line conductances
/// and voltage caps: loss on a line is G |v_i - v_j|^2.
fn loss_bound(inst: &Instance) -> f64 {
    inst.lines
        .iter()
        .map(|l| {
            let s = inst.vmax[l.from] + inst.vmax[l.to];
            l.g * s * s
        })
        .sum()
}

/// Operational + reactive rows over the ACUC core layout for all periods.
fn acuc_core_rows(inst: &Instance) -> Vec<Row> {
    let vars = AcucVars::new(inst);
    let lay = vars.layout();
    let mut rows = Vec::new();
    for t in 0..inst.periods {
        rows.extend(dcuc::operational_rows(inst, &lay, t));
        for (g, gen) in inst.generators.iter().enumerate() {
            // q~ <= (Qmax - Qmin) z encodes Qmin z <= q <= Qmax z together
            // with q~ >= 0 (variable nonnegativity).
            let range = gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0);
            rows.push(Row {
                id: ConstraintId::Operational(OpKind::QMax, g, t),
                coeffs: vec![(vars.qs(g, t), 1.0), (vars.z(g, t), -range)],
                sense: Sense::Le,
                rhs: AffineRhs::constant(0.0),
            });
        }
    }
    rows
}

/// Slacked-equality MBQP over the UC part of ACUC (no network rows; those
/// are appended to the lifted model as plain conic rows).
fn build_acuc_mbqp(inst: &Instance, opts: &AcucOptions) -> MbqpModel {
    let vars = AcucVars::new(inst);
    let mut m = MbqpModel::new();
    for t in 0..inst.periods {
        for (g, gen) in inst.generators.iter().enumerate() {
            let p = m.add_var(format!("p[{},{}]", gen.id, t), Some(gen.pmax));
            debug_assert_eq!(p, vars.p(g, t));
            m.c[p] = gen.cp;
            m.period[p] = Some(t);
            let range = gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0);
            let qs = m.add_var(format!("qs[{},{}]", gen.id, t), Some(range.max(0.0)));
            m.period[qs] = Some(t);
            for (name, cost) in [("u", gen.cu), ("v", gen.cv), ("z", gen.cz)] {
                let i = m.add_binary(format!("{}[{},{}]", name, gen.id, t));
                m.c[i] = cost;
                m.period[i] = Some(t);
            }
        }
    }
    let lb = loss_bound(inst);
    for t in 0..inst.periods {
        let i = m.add_var(format!("ploss[{}]", t), Some(lb));
        debug_assert_eq!(i, vars.ploss(t));
        m.core[i] = false;
        m.period[i] = Some(t);
    }
    m.params = inst.demand_params();
    for row in acuc_core_rows(inst) {
        let rlt = match &row.id {
            ConstraintId::Operational(OpKind::UBoundU, _, _)
            | ConstraintId::Operational(OpKind::UBoundV, _, _)
            | ConstraintId::Operational(OpKind::UBoundZ, _, _) => opts.rlt_binary_ub,
            _ => true,
        };
        let (coeffs, rhs) = match row.sense {
            Sense::Eq => (row.coeffs, row.rhs),
            Sense::Le | Sense::Ge => {
                let bound = match &row.id {
                    ConstraintId::Operational(OpKind::QMax, g, _) => {
                        let gen = &inst.generators[*g];
                        (gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0)).max(1.0)
                    }
                    id => dcuc::slack_bound(inst, id),
                };
                let t = match &row.id {
                    ConstraintId::Operational(_, _, t) => Some(*t),
                    _ => None,
                };
                let s = m.add_var(format!("s[{:?}]", row.id), Some(bound));
                m.core[s] = false;
                m.period[s] = t;
                let sign = if row.sense == Sense::Le { 1.0 } else { -1.0 };
                let mut coeffs = row.coeffs;
                coeffs.push((s, sign));
                (coeffs, row.rhs)
            }
        };
        m.equalities.push(MbqpEquality {
            id: row.id,
            coeffs,
            rhs,
            rlt,
        });
    }
    m
}

/// Canonical scalar column of the W_t cell (r, c), r, c in 0..2N, with
/// column-major upper-triangle layout matching RawPsdBlock ordering.
fn w_cell(w_base: usize, r: usize, c: usize) -> usize {
    let (r, c) = if r <= c { (r, c) } else { (c, r) };
    w_base + c * (c + 1) / 2 + r
}

/// Append the AC network machinery for every period: W cell variables and
/// PSD blocks, directed flow variables with rectangular flow rows, per-bus
/// balance rows, voltage envelopes, thermal cones, and loss definitions.
///
/// `vars` must describe where p / q~ / z / ploss live in `m`.
pub fn add_ac_constraints(m: &mut LiftedModel, inst: &Instance, vars: &AcucVars) -> Result<()> {
    if !inst.ac_capable {
        return Err(Error::Unsupported(
            "instance does not declare AC data".into(),
        ));
    }
    let n = inst.n_buses;
    let n2 = 2 * n;
    let ncells = n2 * (n2 + 1) / 2;
    let d_imag = inst
        .demand_imag
        .as_ref()
        .ok_or_else(|| Error::MissingField("demand.reactive".into()))?;
    for t in 0..inst.periods {
        // W_t cells as free scalars, column-major upper triangle.
        let w_base = m.vars.len();
        for c in 0..n2 {
            for r in 0..=c {
                m.add_free_var(format!("W{}[{},{}]", t, r, c));
            }
        }
        debug_assert_eq!(m.vars.len() - w_base, ncells);
        m.raw_blocks.push(RawPsdBlock {
            dim: n2,
            cells: (w_base..w_base + ncells).collect(),
        });
        let w = |r: usize, c: usize| w_cell(w_base, r, c);
        // Voltage envelope: Vmin^2 <= W^R_kk + W^I_kk <= Vmax^2.
        for k in 0..n {
            let diag = vec![
                (VarRef::Scalar(w(k, k)), 1.0),
                (VarRef::Scalar(w(n + k, n + k)), 1.0),
            ];
            m.add_row(
                ConstraintId::VoltageEnvelope(k, t, Side::Lower),
                diag.clone(),
                Sense::Ge,
                RhsPolynomial::constant(inst.vmin[k] * inst.vmin[k]),
            );
            m.add_row(
                ConstraintId::VoltageEnvelope(k, t, Side::Upper),
                diag,
                Sense::Le,
                RhsPolynomial::constant(inst.vmax[k] * inst.vmax[k]),
            );
        }
        // Directed flows and rectangular flow rows. Series admittance of a
        // line with DC susceptance b > 0 is g - j b (b = 1/x).
        let mut flow_p: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut flow_q: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for line in &inst.lines {
            for (i, j) in [(line.from, line.to), (line.to, line.from)] {
                let pvar = m.add_free_var(format!("pflow{}[{},{}]", t, i, j));
                let qvar = m.add_free_var(format!("qflow{}[{},{}]", t, i, j));
                flow_p.insert((i, j), pvar);
                flow_q.insert((i, j), qvar);
                let gs = line.g;
                let bs = -line.b;
                // alpha = |v_i|^2 - Re(v_i v_j*), beta = -Im(v_i v_j*).
                let alpha = [
                    (w(i, i), 1.0),
                    (w(n + i, n + i), 1.0),
                    (w(i, j), -1.0),
                    (w(n + i, n + j), -1.0),
                ];
                let beta = [(w(i, n + j), 1.0), (w(j, n + i), -1.0)];
                // p_ij = gs*alpha + bs*beta; q_ij = gs*beta - bs*alpha.
                let mut prow: BTreeMap<usize, f64> = BTreeMap::new();
                let mut qrow: BTreeMap<usize, f64> = BTreeMap::new();
                for (col, a) in alpha {
                    *prow.entry(col).or_insert(0.0) -= gs * a;
                    *qrow.entry(col).or_insert(0.0) += bs * a;
                }
                for (col, b) in beta {
                    *prow.entry(col).or_insert(0.0) -= bs * b;
                    *qrow.entry(col).or_insert(0.0) -= gs * b;
                }
                let mut pcoeffs = vec![(VarRef::Scalar(pvar), 1.0)];
                pcoeffs.extend(prow.into_iter().map(|(c, v)| (VarRef::Scalar(c), v)));
                m.add_row(
                    ConstraintId::RectFlow(i, j, t, Part::Re),
                    pcoeffs,
                    Sense::Eq,
                    RhsPolynomial::constant(0.0),
                );
                let mut qcoeffs = vec![(VarRef::Scalar(qvar), 1.0)];
                qcoeffs.extend(qrow.into_iter().map(|(c, v)| (VarRef::Scalar(c), v)));
                m.add_row(
                    ConstraintId::RectFlow(i, j, t, Part::Im),
                    qcoeffs,
                    Sense::Eq,
                    RhsPolynomial::constant(0.0),
                );
                if let Some(smax) = line.s_max {
                    m.soc_rows.push(SocRow {
                        id: ConstraintId::Thermal(i, j, t),
                        terms: vec![pvar, qvar],
                        bound: smax,
                    });
                }
            }
        }
        // Per-bus balance, real and reactive (q = q~ + Qmin z per unit).
        for k in 0..n {
            let mut re: Vec<(VarRef, f64)> = Vec::new();
            let mut im: Vec<(VarRef, f64)> = Vec::new();
            for (g, gen) in inst.generators.iter().enumerate() {
                if gen.bus == k {
                    re.push((VarRef::Scalar(vars.p(g, t)), 1.0));
                    im.push((VarRef::Scalar(vars.qs(g, t)), 1.0));
                    let qmin = gen.qmin.unwrap_or(0.0);
                    if qmin != 0.0 {
                        im.push((VarRef::Scalar(vars.z(g, t)), qmin));
                    }
                }
            }
            for (&(i, _j), &pvar) in flow_p.iter().filter(|((i, _), _)| *i == k) {
                debug_assert_eq!(i, k);
                re.push((VarRef::Scalar(pvar), -1.0));
            }
            for (&(i, _j), &qvar) in flow_q.iter().filter(|((i, _), _)| *i == k) {
                debug_assert_eq!(i, k);
                im.push((VarRef::Scalar(qvar), -1.0));
            }
            m.add_row(
                ConstraintId::FlowBalanceAc(k, t, Part::Re),
                re,
                Sense::Eq,
                RhsPolynomial::Affine(AffineRhs::term(
                    ParamId::DemandReal { bus: k, period: t },
                    1.0,
                )),
            );
            m.add_row(
                ConstraintId::FlowBalanceAc(k, t, Part::Im),
                im,
                Sense::Eq,
                RhsPolynomial::Affine(AffineRhs::term(
                    ParamId::DemandImag { bus: k, period: t },
                    1.0,
                )),
            );
        }
        let _ = d_imag;
        // Loss definition: ploss_t = sum of directed real flows.
        let mut loss: Vec<(VarRef, f64)> = vec![(VarRef::Scalar(vars.ploss(t)), 1.0)];
        loss.extend(flow_p.values().map(|&pv| (VarRef::Scalar(pv), -1.0)));
        m.add_row(
            ConstraintId::LossDef(t),
            loss,
            Sense::Eq,
            RhsPolynomial::constant(0.0),
        );
    }
    Ok(())
}

/// Aggregate real-demand RLT rows: the linear aggregate
/// sum_g p_gt - ploss_t = sum_k D_kt is implied by the per-bus balances
/// plus the loss definition, so only its square enters the model; emitting
/// the redundant linear row would leave its dual undetermined and break
/// the closed-form price identity.
fn add_aggregate_rlt(m: &mut LiftedModel, inst: &Instance, vars: &AcucVars) {
    for t in 0..inst.periods {
        let mut h: Vec<(usize, f64)> = (0..vars.n_gens).map(|g| (vars.p(g, t), 1.0)).collect();
        h.push((vars.ploss(t), -1.0));
        let rhs = AffineRhs {
            constant: 0.0,
            terms: (0..inst.n_buses)
                .map(|k| (ParamId::DemandReal { bus: k, period: t }, 1.0))
                .collect(),
        };
        m.add_row(
            ConstraintId::AggregateDemand(t),
            mbqp::rlt_coeffs(&h),
            Sense::Eq,
            RhsPolynomial::SquaredAffine(rhs),
        );
    }
}

/// ACUC SDP relaxation: UC lifting over (p, q~, u, v, z) with per-period
/// overlap blocks, aggregate-demand RLT, and the AC network machinery with
/// per-period W blocks.
pub fn build_acuc_sdp(
    inst: &Instance,
    opts: &AcucOptions,
) -> Result<(LiftedModel, CoverageReport)> {
    let vars = AcucVars::new(inst);
    let mbqp_model = build_acuc_mbqp(inst, opts);
    let mut m = mbqp::build_dnn_relaxation(&mbqp_model)?;
    mbqp::strengthen_bounds(&mut m)?;
    add_aggregate_rlt(&mut m, inst, &vars);
    let blocks = if inst.periods == 1 {
        vec![vars.core_of_period(0)]
    } else {
        (1..inst.periods)
            .map(|t| {
                let mut b = vars.core_of_period(t - 1);
                b.extend(vars.core_of_period(t));
                b
            })
            .collect()
    };
    let report = mbqp::apply_block_structure(&mut m, blocks)?;
    add_ac_constraints(&mut m, inst, &vars)?;
    m.validate()?;
    Ok((m, report))
}

/// Relaxed-binary baseline: the same AC machinery with binaries relaxed to
/// [0, 1] and no second-order lifting at all.
pub fn build_acuc_relaxed_binary(inst: &Instance) -> Result<LiftedModel> {
    let vars = AcucVars::new(inst);
    let mut m = LiftedModel::new();
    for t in 0..inst.periods {
        for (g, gen) in inst.generators.iter().enumerate() {
            let p = m.add_var(format!("p[{},{}]", gen.id, t), Some(gen.pmax));
            debug_assert_eq!(p, vars.p(g, t));
            m.objective.push((VarRef::Scalar(p), gen.cp));
            let range = gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0);
            let qs = m.add_var(format!("qs[{},{}]", gen.id, t), Some(range.max(0.0)));
            debug_assert_eq!(qs, vars.qs(g, t));
            for (name, cost) in [("u", gen.cu), ("v", gen.cv), ("z", gen.cz)] {
                let i = m.add_var(format!("{}[{},{}]", name, gen.id, t), Some(1.0));
                if cost != 0.0 {
                    m.objective.push((VarRef::Scalar(i), cost));
                }
            }
        }
    }
    let lb = loss_bound(inst);
    for t in 0..inst.periods {
        let i = m.add_var(format!("ploss[{}]", t), Some(lb));
        debug_assert_eq!(i, vars.ploss(t));
    }
    m.params = inst.demand_params();
    for row in acuc_core_rows(inst) {
        m.add_row(
            row.id,
            row.coeffs
                .into_iter()
                .map(|(i, c)| (VarRef::Scalar(i), c))
                .collect(),
            row.sense,
            RhsPolynomial::Affine(row.rhs),
        );
    }
    add_ac_constraints(&mut m, inst, &vars)?;
    m.validate()?;
    Ok(m)
}

/// A realized dispatch: per-generator trajectories over the horizon.
/// Reactive entries are zero for DC settlements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dispatch {
    pub source: String,
    /// Indexed [generator][period].
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

impl Dispatch {
    /// Total commitment + production cost of the dispatch.
    pub fn cost(&self, inst: &Instance) -> f64 {
        let mut total = 0.0;
        for (g, gen) in inst.generators.iter().enumerate() {
            for t in 0..inst.periods {
                total += gen.cp * self.p[g][t]
                    + gen.cu * self.u[g][t]
                    + gen.cv * self.v[g][t]
                    + gen.cz * self.z[g][t];
            }
        }
        total
    }
}

#[derive(Debug, Deserialize)]
struct DispatchPoint {
    p: f64,
    #[serde(default)]
    q: f64,
    u: f64,
    v: f64,
    z: f64,
}

#[derive(Debug, Deserialize)]
struct DispatchFile {
    source: String,
    dispatch: BTreeMap<String, BTreeMap<String, DispatchPoint>>,
}

const DISPATCH_TOL: f64 = 1e-6;

/// Read and validate an externally produced feasible dispatch. Every
/// operational row and the reactive bounds must hold within 1e-6.
pub fn ingest_feasible_dispatch(path: impl AsRef<Path>, inst: &Instance) -> Result<Dispatch> {
    let text = std::fs::read_to_string(path)?;
    ingest_feasible_dispatch_str(&text, inst)
}

pub fn ingest_feasible_dispatch_str(text: &str, inst: &Instance) -> Result<Dispatch> {
    let file: DispatchFile = serde_json::from_str(text)?;
    let ng = inst.generators.len();
    let periods = inst.periods;
    let mut d = Dispatch {
        source: file.source,
        p: vec![vec![0.0; periods]; ng],
        q: vec![vec![0.0; periods]; ng],
        u: vec![vec![0.0; periods]; ng],
        v: vec![vec![0.0; periods]; ng],
        z: vec![vec![0.0; periods]; ng],
    };
    for (g, gen) in inst.generators.iter().enumerate() {
        let series = file
            .dispatch
            .get(&gen.id)
            .ok_or_else(|| Error::MissingField(format!("dispatch.{}", gen.id)))?;
        for t in 0..periods {
            let pt = series
                .get(&t.to_string())
                .ok_or_else(|| Error::MissingField(format!("dispatch.{}.{}", gen.id, t)))?;
            d.p[g][t] = pt.p;
            d.q[g][t] = pt.q;
            d.u[g][t] = pt.u;
            d.v[g][t] = pt.v;
            d.z[g][t] = pt.z;
        }
    }
    validate_dispatch(inst, &d)?;
    Ok(d)
}

/// Check a dispatch against the operational rows and reactive bounds.
pub fn validate_dispatch(inst: &Instance, d: &Dispatch) -> Result<()> {
    let vars = AcucVars::new(inst);
    let lay = vars.layout();
    // Lay the dispatch out as a flat vector over the ACUC core indexing.
    let mut x = vec![0.0; vars.n_named()];
    for g in 0..vars.n_gens {
        for t in 0..inst.periods {
            x[vars.p(g, t)] = d.p[g][t];
            x[vars.qs(g, t)] = d.q[g][t] - inst.generators[g].qmin.unwrap_or(0.0) * d.z[g][t];
            x[vars.u(g, t)] = d.u[g][t];
            x[vars.v(g, t)] = d.v[g][t];
            x[vars.z(g, t)] = d.z[g][t];
        }
    }
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..inst.periods {
            for (name, val) in [("u", d.u[g][t]), ("v", d.v[g][t]), ("z", d.z[g][t])] {
                if val.min((val - 1.0).abs()) > DISPATCH_TOL {
                    return Err(Error::InfeasibleDispatch(format!(
                        "{}[{},{}] = {} is not binary",
                        name, gen.id, t, val
                    )));
                }
            }
            if inst.ac_capable {
                let (qmin, qmax) = (gen.qmin.unwrap_or(0.0), gen.qmax.unwrap_or(0.0));
                let q = d.q[g][t];
                let z = d.z[g][t];
                if q < qmin * z - DISPATCH_TOL || q > qmax * z + DISPATCH_TOL {
                    return Err(Error::InfeasibleDispatch(format!(
                        "reactive bound violated for {} at t={}: q={}",
                        gen.id, t, q
                    )));
                }
            }
        }
    }
    for t in 0..inst.periods {
        for row in dcuc::operational_rows(inst, &lay, t) {
            let lhs: f64 = row.coeffs.iter().map(|&(i, c)| c * x[i]).sum();
            let rhs = row.rhs.eval(&inst.demand_params());
            let ok = match row.sense {
                Sense::Eq => (lhs - rhs).abs() <= DISPATCH_TOL,
                Sense::Le => lhs <= rhs + DISPATCH_TOL,
                Sense::Ge => lhs >= rhs - DISPATCH_TOL,
            };
            if !ok {
                return Err(Error::InfeasibleDispatch(format!(
                    "{:?} violated: lhs={} rhs={}",
                    row.id, lhs, rhs
                )));
            }
        }
    }
    Ok(())
}
