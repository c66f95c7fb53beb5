//! Prices from dual solutions, per-generator best responses, and
//! settlement with lost-opportunity-cost accounting.
//!
//! Every price is the envelope-theorem gradient of the solved relaxation's
//! value w.r.t. demand. For the DCUC SDP the closed form reads the tagged
//! duals (clearing, flow rows, and their RLT squares); for the ACUC SDP it
//! reads the per-bus balance duals and the aggregate RLT dual. The closed
//! form is always checked against the generic gradient and a mismatch is a
//! hard error, since it signals a dual-tagging or sign bug.

use crate::acuc::Dispatch;
use crate::dcuc::DcucVars;
use crate::error::{Error, Result};
use crate::instance::{Instance, ShiftFactorMatrix};
use crate::model::{
    ConstraintId, LiftedModel, OpKind, Part, Sense, SolveResult, SolverConfig, VarRef,
};
use crate::rhs::{ParamId, ParamValues, RhsPolynomial};
use crate::solver;
use crate::{dcuc, mbqp};
use serde::{Deserialize, Serialize};

const CLOSED_FORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PriceScheme {
    SdpEnvelope,
    FixedBinary,
    LpRelaxation,
}

/// Per-bus per-period prices, tagged with the scheme and dual source that produced them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriceVector {
    pub scheme: PriceScheme,
    pub dual_source: String,
    /// Real-power price, indexed [bus][period].
    pub real: Vec<Vec<f64>>,
    /// Reactive-power price (AC only), indexed [bus][period].
    pub imag: Option<Vec<Vec<f64>>>,
}

impl PriceVector {
    fn from_gradient(
        inst: &Instance,
        grad: &ParamValues,
        scheme: PriceScheme,
        source: &str,
        with_imag: bool,
    ) -> PriceVector {
        let mut real = vec![vec![0.0; inst.periods]; inst.n_buses];
        let mut imag = vec![vec![0.0; inst.periods]; inst.n_buses];
        for (k, grid) in real.iter_mut().enumerate() {
            for (t, cell) in grid.iter_mut().enumerate() {
                *cell = grad
                    .get(&ParamId::DemandReal { bus: k, period: t })
                    .copied()
                    .unwrap_or(0.0);
            }
        }
        if with_imag {
            for (k, grid) in imag.iter_mut().enumerate() {
                for (t, cell) in grid.iter_mut().enumerate() {
                    *cell = grad
                        .get(&ParamId::DemandImag { bus: k, period: t })
                        .copied()
                        .unwrap_or(0.0);
                }
            }
        }
        PriceVector {
            scheme,
            dual_source: source.to_string(),
            real,
            imag: if with_imag { Some(imag) } else { None },
        }
    }
}

fn check_closed_form(
    inst: &Instance,
    closed: &[Vec<f64>],
    generic: &PriceVector,
) -> Result<()> {
    for k in 0..inst.n_buses {
        for t in 0..inst.periods {
            let c = closed[k][t];
            let g = generic.real[k][t];
            if (c - g).abs() > CLOSED_FORM_TOL {
                return Err(Error::ClosedFormMismatch {
                    bus: k,
                    period: t,
                    closed: c,
                    generic: g,
                });
            }
        }
    }
    Ok(())
}

/// DCUC SDP envelope prices: the generic dual gradient, cross-checked
/// against the closed form
/// r_kt = lambda_t + 2 hat_lambda_t sum_k' D_k't
///      + sum_lines ptdf_k (xi_min + xi_max)
///      + 2 sum_lines ptdf_k [ (sum_k' ptdf_k' D_k't)(hat_xi_min + hat_xi_max)
///                             + F_min hat_xi_min + F_max hat_xi_max ].
pub fn sdp_prices_dcuc(
    inst: &Instance,
    sf: &ShiftFactorMatrix,
    model: &LiftedModel,
    result: &SolveResult,
) -> Result<PriceVector> {
    result.require_optimal()?;
    let grad = mbqp::envelope_gradient(model, result);
    let generic = PriceVector::from_gradient(inst, &grad, PriceScheme::SdpEnvelope, "dcuc-sdp", false);
    let mut closed = vec![vec![0.0; inst.periods]; inst.n_buses];
    for t in 0..inst.periods {
        let lam = result.dual(&ConstraintId::MarketClearing(t));
        let hat_lam = result.dual(&ConstraintId::RltOf(Box::new(ConstraintId::MarketClearing(t))));
        let total_d = inst.total_demand(t);
        for k in 0..inst.n_buses {
            let mut r = lam + 2.0 * hat_lam * total_d;
            for line in &inst.lines {
                let ptdf_k = sf.ptdf(line, k);
                if ptdf_k == 0.0 {
                    continue;
                }
                let (i, j) = (line.from, line.to);
                let xi_min = result.dual(&ConstraintId::FlowMin(i, j, t));
                let xi_max = result.dual(&ConstraintId::FlowMax(i, j, t));
                let hat_min =
                    result.dual(&ConstraintId::RltOf(Box::new(ConstraintId::FlowMin(i, j, t))));
                let hat_max =
                    result.dual(&ConstraintId::RltOf(Box::new(ConstraintId::FlowMax(i, j, t))));
                let ptdf_dot_d: f64 = (0..inst.n_buses)
                    .map(|kk| sf.ptdf(line, kk) * inst.demand_real[kk][t])
                    .sum();
                r += ptdf_k * (xi_min + xi_max);
                r += 2.0
                    * ptdf_k
                    * (ptdf_dot_d * (hat_min + hat_max)
                        + line.flow_min * hat_min
                        + line.flow_max * hat_max);
            }
            closed[k][t] = r;
        }
    }
    check_closed_form(inst, &closed, &generic)?;
    Ok(generic)
}

/// ACUC SDP envelope prices:
/// r^R_kt = lambda^R_kt + 2 hat_lambda^R_t sum_k' D^R_k't, r^I_kt = lambda^I_kt.
pub fn sdp_prices_acuc(
    inst: &Instance,
    model: &LiftedModel,
    result: &SolveResult,
) -> Result<PriceVector> {
    result.require_optimal()?;
    let grad = mbqp::envelope_gradient(model, result);
    let generic = PriceVector::from_gradient(inst, &grad, PriceScheme::SdpEnvelope, "acuc-sdp", true);
    let mut closed = vec![vec![0.0; inst.periods]; inst.n_buses];
    let mut closed_im = vec![vec![0.0; inst.periods]; inst.n_buses];
    for t in 0..inst.periods {
        let hat_lam = result.dual(&ConstraintId::AggregateDemand(t));
        let total_d = inst.total_demand(t);
        for k in 0..inst.n_buses {
            closed[k][t] = result.dual(&ConstraintId::FlowBalanceAc(k, t, Part::Re))
                + 2.0 * hat_lam * total_d;
            closed_im[k][t] = result.dual(&ConstraintId::FlowBalanceAc(k, t, Part::Im));
        }
    }
    check_closed_form(inst, &closed, &generic)?;
    if let Some(imag) = &generic.imag {
        for k in 0..inst.n_buses {
            for t in 0..inst.periods {
                if (closed_im[k][t] - imag[k][t]).abs() > CLOSED_FORM_TOL {
                    return Err(Error::ClosedFormMismatch {
                        bus: k,
                        period: t,
                        closed: closed_im[k][t],
                        generic: imag[k][t],
                    });
                }
            }
        }
    }
    Ok(generic)
}

/// Prices from a continuous DCUC LP dual (fixed-binary LP or plain LP
/// relaxation): the closed form is Eq-8 with all RLT duals absent.
pub fn linear_lp_prices(
    inst: &Instance,
    sf: &ShiftFactorMatrix,
    model: &LiftedModel,
    result: &SolveResult,
    scheme: PriceScheme,
) -> Result<PriceVector> {
    result.require_optimal()?;
    let grad = mbqp::envelope_gradient(model, result);
    let source = match scheme {
        PriceScheme::FixedBinary => "fixed-binary-lp",
        PriceScheme::LpRelaxation => "lp-relaxation",
        PriceScheme::SdpEnvelope => "sdp",
    };
    let generic = PriceVector::from_gradient(inst, &grad, scheme, source, false);
    let mut closed = vec![vec![0.0; inst.periods]; inst.n_buses];
    for t in 0..inst.periods {
        let lam = result.dual(&ConstraintId::MarketClearing(t));
        for k in 0..inst.n_buses {
            let mut r = lam;
            for line in &inst.lines {
                let ptdf_k = sf.ptdf(line, k);
                if ptdf_k == 0.0 {
                    continue;
                }
                let (i, j) = (line.from, line.to);
                r += ptdf_k
                    * (result.dual(&ConstraintId::FlowMin(i, j, t))
                        + result.dual(&ConstraintId::FlowMax(i, j, t)));
            }
            closed[k][t] = r;
        }
    }
    check_closed_form(inst, &closed, &generic)?;
    Ok(generic)
}

/// Convenience alias matching the fixed-binary pricing scheme.
pub fn fixed_binary_prices(
    inst: &Instance,
    sf: &ShiftFactorMatrix,
    model: &LiftedModel,
    result: &SolveResult,
) -> Result<PriceVector> {
    linear_lp_prices(inst, sf, model, result, PriceScheme::FixedBinary)
}

/// Best response of one generator at posted prices: the per-generator MILP
/// max sum_t r p (+ r^I q) - (C^p p + C^u u + C^v v + C^z z) over its own
/// operational rows with its initial condition.
pub fn best_response(
    inst: &Instance,
    g: usize,
    prices: &PriceVector,
    cfg: &SolverConfig,
) -> Result<BestResponse> {
    let gen = &inst.generators[g];
    let periods = inst.periods;
    let mut m = LiftedModel::new();
    // Variables per period: p, u, v, z (+ q~ for AC pricing).
    let with_q = prices.imag.is_some() && inst.ac_capable;
    let stride = if with_q { 5 } else { 4 };
    let p_of = |t: usize| stride * t;
    let u_of = |t: usize| stride * t + 1;
    let v_of = |t: usize| stride * t + 2;
    let z_of = |t: usize| stride * t + 3;
    let q_of = |t: usize| stride * t + 4;
    for t in 0..periods {
        let p = m.add_var(format!("p[{}]", t), Some(gen.pmax));
        debug_assert_eq!(p, p_of(t));
        m.objective.push((VarRef::Scalar(p), gen.cp - prices.real[gen.bus][t]));
        m.add_binary(format!("u[{}]", t));
        m.add_binary(format!("v[{}]", t));
        m.add_binary(format!("z[{}]", t));
        m.objective.push((VarRef::Scalar(u_of(t)), gen.cu));
        m.objective.push((VarRef::Scalar(v_of(t)), gen.cv));
        m.objective.push((VarRef::Scalar(z_of(t)), gen.cz));
        if with_q {
            let range = gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0);
            let q = m.add_var(format!("qs[{}]", t), Some(range.max(0.0)));
            debug_assert_eq!(q, q_of(t));
            let rq = prices.imag.as_ref().unwrap()[gen.bus][t];
            // Revenue on q = q~ + Qmin z.
            m.objective.push((VarRef::Scalar(q), -rq));
            m.objective.push((VarRef::Scalar(z_of(t)), -rq * gen.qmin.unwrap_or(0.0)));
        }
    }
    // Operational rows restricted to this generator, re-indexed.
    let lay = dcuc::CoreLayout {
        n_gens: 1,
        stride,
        p_off: 0,
        u_off: 1,
        v_off: 2,
        z_off: 3,
    };
    let solo = solo_instance(inst, g);
    for t in 0..periods {
        for mut row in dcuc::operational_rows(&solo, &lay, t) {
            // Re-tag rows with the true generator index for diagnostics.
            if let ConstraintId::Operational(kind, _, tt) = row.id {
                row.id = ConstraintId::Operational(kind, g, tt);
            }
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
        if with_q {
            let range = gen.qmax.unwrap_or(0.0) - gen.qmin.unwrap_or(0.0);
            m.add_row(
                ConstraintId::Operational(OpKind::QMax, g, t),
                vec![
                    (VarRef::Scalar(q_of(t)), 1.0),
                    (VarRef::Scalar(z_of(t)), -range),
                ],
                Sense::Le,
                RhsPolynomial::constant(0.0),
            );
        }
    }
    let mut tight = cfg.clone();
    tight.milp_rel_gap = 1e-8;
    let r = solver::solve(&m, &tight)?;
    r.require_optimal()?;
    let mut d = Dispatch {
        source: format!("best-response[{}]", gen.id),
        p: vec![(0..periods).map(|t| r.x[p_of(t)]).collect()],
        q: vec![vec![0.0; periods]],
        u: vec![(0..periods).map(|t| r.x[u_of(t)]).collect()],
        v: vec![(0..periods).map(|t| r.x[v_of(t)]).collect()],
        z: vec![(0..periods).map(|t| r.x[z_of(t)]).collect()],
    };
    if with_q {
        d.q[0] = (0..periods)
            .map(|t| r.x[q_of(t)] + gen.qmin.unwrap_or(0.0) * r.x[z_of(t)])
            .collect();
    }
    Ok(BestResponse {
        profit: -r.objective,
        dispatch: d,
    })
}

/// One-generator copy of the instance used to instantiate the generator's
/// own operational rows.
fn solo_instance(inst: &Instance, g: usize) -> Instance {
    let mut solo = inst.clone();
    solo.generators = vec![inst.generators[g].clone()];
    solo
}

#[derive(Debug, Clone)]
pub struct BestResponse {
    pub profit: f64,
    pub dispatch: Dispatch,
}

/// Per-generator settlement line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSettlement {
    pub id: String,
    /// Energy (and reactive) payment sum_t r p (+ r^I q).
    pub payment: f64,
    pub realized_cost: f64,
    pub realized_profit: f64,
    pub best_response_profit: f64,
    /// Lost opportunity cost U_g.
    pub loc: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettlementReport {
    pub scheme: PriceScheme,
    pub generators: Vec<GeneratorSettlement>,
    /// Load charge per period, sum_k r_kt D_kt (+ reactive part).
    pub load_charge: Vec<f64>,
    pub total_loc: f64,
    /// Uplift charge per unit of demand, total LOC / total demand.
    pub price_adder: f64,
    pub z_feas: f64,
    pub v_rel: f64,
    /// z_feas - v_rel; Theorem-2-style bound on the total LOC.
    pub bound_gap: f64,
    pub bound_satisfied: bool,
    /// Set when the relaxation's RHS is nonlinear in demand, so the prices
    /// are not certified subgradients of the relaxed value function.
    pub subgradient_caveat: bool,
}

/// True when any row's RHS depends nonlinearly (squared) on demand.
pub fn rhs_nonlinear_in_demand(model: &LiftedModel) -> bool {
    model.constraints.iter().any(|c| match &c.rhs {
        RhsPolynomial::SquaredAffine(a) => !a.terms.is_empty(),
        RhsPolynomial::Affine(_) => false,
    })
}

/// Settle a dispatch at posted prices: payments, LOC uplift, price adder,
/// and the bound diagnostic against the relaxation value.
pub fn settle(
    inst: &Instance,
    dispatch: &Dispatch,
    prices: &PriceVector,
    v_rel: f64,
    subgradient_caveat: bool,
    cfg: &SolverConfig,
) -> Result<SettlementReport> {
    crate::acuc::validate_dispatch(inst, dispatch)?;
    let z_feas = dispatch.cost(inst);
    let mut generators = Vec::new();
    let mut total_loc = 0.0;
    for (g, gen) in inst.generators.iter().enumerate() {
        let mut payment = 0.0;
        let mut cost = 0.0;
        for t in 0..inst.periods {
            payment += prices.real[gen.bus][t] * dispatch.p[g][t];
            if let Some(imag) = &prices.imag {
                payment += imag[gen.bus][t] * dispatch.q[g][t];
            }
            cost += gen.cp * dispatch.p[g][t]
                + gen.cu * dispatch.u[g][t]
                + gen.cv * dispatch.v[g][t]
                + gen.cz * dispatch.z[g][t];
        }
        let realized = payment - cost;
        let br = best_response(inst, g, prices, cfg)?;
        let loc = br.profit - realized;
        if loc < -1e-6 {
            return Err(Error::InvariantViolation(format!(
                "negative LOC {} for generator {}",
                loc, gen.id
            )));
        }
        total_loc += loc.max(0.0);
        generators.push(GeneratorSettlement {
            id: gen.id.clone(),
            payment,
            realized_cost: cost,
            realized_profit: realized,
            best_response_profit: br.profit,
            loc,
        });
    }
    let mut load_charge = vec![0.0; inst.periods];
    let mut total_demand = 0.0;
    for t in 0..inst.periods {
        for k in 0..inst.n_buses {
            load_charge[t] += prices.real[k][t] * inst.demand_real[k][t];
            if let (Some(imag), Some(di)) = (&prices.imag, &inst.demand_imag) {
                load_charge[t] += imag[k][t] * di[k][t];
            }
            total_demand += inst.demand_real[k][t];
        }
    }
    let bound_gap = z_feas - v_rel;
    Ok(SettlementReport {
        scheme: prices.scheme,
        generators,
        load_charge,
        total_loc,
        price_adder: if total_demand > 0.0 {
            total_loc / total_demand
        } else {
            0.0
        },
        z_feas,
        v_rel,
        bound_gap,
        bound_satisfied: total_loc <= bound_gap + 1e-6 * z_feas.abs().max(1.0),
        subgradient_caveat,
    })
}

impl SettlementReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One CSV row per generator plus a system summary row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "row,id,payment,realized_cost,realized_profit,best_response_profit,loc\n",
        );
        for g in &self.generators {
            out.push_str(&format!(
                "generator,{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                g.id, g.payment, g.realized_cost, g.realized_profit, g.best_response_profit, g.loc
            ));
        }
        out.push_str(&format!(
            "system,total_loc={:.6};price_adder={:.6};z_feas={:.6};v_rel={:.6};bound_gap={:.6};bound_satisfied={};subgradient_caveat={},,,,,\n",
            self.total_loc,
            self.price_adder,
            self.z_feas,
            self.v_rel,
            self.bound_gap,
            self.bound_satisfied,
            self.subgradient_caveat
        ));
        out
    }
}

/// Dispatch extracted from a DCUC MILP solution.
pub fn dispatch_from_milp(inst: &Instance, r: &SolveResult) -> Result<Dispatch> {
    r.require_optimal()?;
    let vars = DcucVars::new(inst);
    let periods = inst.periods;
    let round = |x: f64| if x > 0.5 { 1.0 } else { 0.0 };
    Ok(Dispatch {
        source: "dcuc-milp".into(),
        p: (0..vars.n_gens)
            .map(|g| (0..periods).map(|t| r.x[vars.p(g, t)].max(0.0)).collect())
            .collect(),
        q: vec![vec![0.0; periods]; vars.n_gens],
        u: (0..vars.n_gens)
            .map(|g| (0..periods).map(|t| round(r.x[vars.u(g, t)])).collect())
            .collect(),
        v: (0..vars.n_gens)
            .map(|g| (0..periods).map(|t| round(r.x[vars.v(g, t)])).collect())
            .collect(),
        z: (0..vars.n_gens)
            .map(|g| (0..periods).map(|t| round(r.x[vars.z(g, t)])).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcuc::{build_dcuc_milp, build_fixed_binary_lp, build_lp_relaxation};

    fn single_bus_two_gen() -> Instance {
        Instance::from_str(
            r#"{
  "meta": {"name": "pair", "periods": 1, "ac_capable": false, "slack_bus": 0},
  "buses": [{"id": 0}],
  "lines": [],
  "generators": [
    {"id": "cheap", "bus": 0, "cp": 20.0, "cu": 0.0, "cv": 0.0, "cz": 0.0,
     "pmin": 0.0, "pmax": 40.0, "ru": 40.0, "rd": 40.0,
     "min_up": 1, "min_down": 1, "initial_on": true, "initial_power": 20.0},
    {"id": "dear", "bus": 0, "cp": 50.0, "cu": 0.0, "cv": 0.0, "cz": 0.0,
     "pmin": 0.0, "pmax": 40.0, "ru": 40.0, "rd": 40.0,
     "min_up": 1, "min_down": 1, "initial_on": true, "initial_power": 0.0}
  ],
  "demand": {"real": [[30.0]]}
}"#,
        )
        .unwrap()
    }

    /// Textbook LMP: marginal unit "cheap" sets the price at 20.
    #[test]
    fn fixed_binary_price_is_marginal_cost() {
        let inst = single_bus_two_gen();
        let sf = inst.compute_shift_factors().unwrap();
        let cfg = SolverConfig::default();
        let milp = solver::solve(&build_dcuc_milp(&inst, &sf).unwrap(), &cfg).unwrap();
        let fb = build_fixed_binary_lp(&inst, &sf, &milp).unwrap();
        let r = solver::solve_relaxed(&fb, &cfg).unwrap();
        let prices = fixed_binary_prices(&inst, &sf, &fb, &r).unwrap();
        assert!((prices.real[0][0] - 20.0).abs() < 1e-5, "{:?}", prices.real);
    }

    /// Price below marginal cost with a startup cost: best response is
    /// all-off with zero profit.
    #[test]
    fn best_response_stays_off_when_unprofitable() {
        let mut inst = single_bus_two_gen();
        inst.generators[0].cz = 10.0;
        inst.generators[0].initial_on = false;
        inst.generators[0].initial_power = 0.0;
        let prices = PriceVector {
            scheme: PriceScheme::FixedBinary,
            dual_source: "test".into(),
            real: vec![vec![10.0]],
            imag: None,
        };
        let br = best_response(&inst, 0, &prices, &SolverConfig::default()).unwrap();
        assert!(br.profit.abs() < 1e-9, "profit {}", br.profit);
        assert!(br.dispatch.z[0][0].abs() < 1e-9);
    }

    /// Price equal to marginal cost with no fixed costs: profit 0 at any
    /// feasible dispatch (indifference).
    #[test]
    fn best_response_indifferent_at_marginal_cost() {
        let inst = single_bus_two_gen();
        let prices = PriceVector {
            scheme: PriceScheme::FixedBinary,
            dual_source: "test".into(),
            real: vec![vec![20.0]],
            imag: None,
        };
        let br = best_response(&inst, 0, &prices, &SolverConfig::default()).unwrap();
        assert!(br.profit.abs() < 1e-7, "profit {}", br.profit);
    }

    /// Marginal-cost prices + optimal dispatch + no fixed costs: zero LOC
    /// everywhere and zero adder; LP bound holds exactly.
    #[test]
    fn settlement_zero_loc_at_marginal_prices() {
        let inst = single_bus_two_gen();
        let sf = inst.compute_shift_factors().unwrap();
        let cfg = SolverConfig::default();
        let milp = solver::solve(&build_dcuc_milp(&inst, &sf).unwrap(), &cfg).unwrap();
        let lp_model = build_lp_relaxation(&inst, &sf).unwrap();
        let lp = solver::solve_relaxed(&lp_model, &cfg).unwrap();
        let prices = linear_lp_prices(&inst, &sf, &lp_model, &lp, PriceScheme::LpRelaxation).unwrap();
        let dispatch = dispatch_from_milp(&inst, &milp).unwrap();
        let report = settle(&inst, &dispatch, &prices, lp.objective, false, &cfg).unwrap();
        assert!(report.total_loc.abs() < 1e-5, "loc {}", report.total_loc);
        assert!(report.price_adder.abs() < 1e-7);
        assert!(report.bound_satisfied);
        assert!(!report.subgradient_caveat);
        // Cost recovery: realized profit + LOC >= 0 per generator.
        for g in &report.generators {
            assert!(g.realized_profit + g.loc >= -1e-6);
        }
    }

    /// The caveat detector fires exactly on squared demand-dependent RHS.
    #[test]
    fn caveat_detection() {
        let inst = single_bus_two_gen();
        let sf = inst.compute_shift_factors().unwrap();
        let lp = build_lp_relaxation(&inst, &sf).unwrap();
        assert!(!rhs_nonlinear_in_demand(&lp));
        let (sdp, _) = crate::dcuc::build_dcuc_sdp(&inst, &sf, &Default::default()).unwrap();
        assert!(rhs_nonlinear_in_demand(&sdp));
    }
}
