//! Instance parsing, validation, load multipliers, and shift factors.
//!
//! The on-disk format is JSON with top-level keys `meta`, `buses`, `lines`,
//! `generators`, `demand`; see `data/` and the README for the schema. Bus
//! ids in the file may be 0- or 1-based but must be contiguous; internally
//! everything is 0-based.

use crate::error::{Error, Result};
use crate::rhs::{ParamId, ParamValues};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    pub periods: usize,
    pub ac_capable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack_bus: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BusRecord {
    pub id: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_slack: Option<bool>,
    /// Per-unit voltage magnitude bounds; meaningful only when ac_capable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vmin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vmax: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineRecord {
    pub from: i64,
    pub to: i64,
    /// Per-unit series susceptance (positive).
    pub b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub flow_min: f64,
    pub flow_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorRecord {
    pub id: String,
    pub bus: i64,
    pub cp: f64,
    pub cu: f64,
    pub cv: f64,
    pub cz: f64,
    pub pmin: f64,
    pub pmax: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qmin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qmax: Option<f64>,
    pub ru: f64,
    pub rd: f64,
    pub min_up: usize,
    pub min_down: usize,
    pub initial_on: bool,
    pub initial_power: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemandRecord {
    /// `real[bus][period]` in MW, bus order matching `buses`.
    pub real: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reactive: Option<Vec<Vec<f64>>>,
}

/// Raw file shape; validated into the same structure with internal indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub meta: Meta,
    pub buses: Vec<BusRecord>,
    pub lines: Vec<LineRecord>,
    pub generators: Vec<GeneratorRecord>,
    pub demand: DemandRecord,
}

/// Validated instance. All bus references are 0-based internal indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub periods: usize,
    pub ac_capable: bool,
    /// The id base (0 or 1) the file used, kept for faithful re-serialization.
    pub id_base: i64,
    pub slack: usize,
    pub n_buses: usize,
    pub vmin: Vec<f64>,
    pub vmax: Vec<f64>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    /// `demand_real[bus][period]` in MW.
    pub demand_real: Vec<Vec<f64>>,
    pub demand_imag: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub b: f64,
    pub g: f64,
    pub flow_min: f64,
    pub flow_max: f64,
    pub s_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: usize,
    pub cp: f64,
    pub cu: f64,
    pub cv: f64,
    pub cz: f64,
    pub pmin: f64,
    pub pmax: f64,
    pub qmin: Option<f64>,
    pub qmax: Option<f64>,
    pub ru: f64,
    pub rd: f64,
    pub min_up: usize,
    pub min_down: usize,
    pub initial_on: bool,
    pub initial_power: f64,
}

/// Dense injection shift factors with the slack row and column zeroed.
/// Flow on line (i,j) for net injections p is `b_ij * Σ_k (S_ik - S_jk) p_k`.
#[derive(Debug, Clone)]
pub struct ShiftFactorMatrix {
    pub s: DMatrix<f64>,
    pub slack: usize,
}

impl ShiftFactorMatrix {
    /// Power-transfer distribution factor of `line` w.r.t. injection at `k`.
    pub fn ptdf(&self, line: &Line, k: usize) -> f64 {
        line.b * (self.s[(line.from, k)] - self.s[(line.to, k)])
    }

    /// Flows on every line for the given net injection vector.
    pub fn flows(&self, lines: &[Line], injections: &[f64]) -> Vec<f64> {
        lines
            .iter()
            .map(|l| (0..injections.len()).map(|k| self.ptdf(l, k) * injections[k]).sum())
            .collect()
    }
}

fn json_err(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    if let Some(rest) = msg.strip_prefix("missing field ") {
        let name = rest.split(' ').next().unwrap_or(rest).trim_matches('`');
        Error::MissingField(name.to_string())
    } else {
        Error::Json(e)
    }
}

impl Instance {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Instance> {
        let text = std::fs::read_to_string(path)?;
        Instance::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text).map_err(json_err)?;
        Instance::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Instance> {
        let n = file.buses.len();
        if n == 0 {
            return Err(Error::InvariantViolation("instance has no buses".into()));
        }
        if file.meta.periods == 0 {
            return Err(Error::InvariantViolation("meta.periods must be >= 1".into()));
        }
        let id_base = file.buses.iter().map(|b| b.id).min().unwrap();
        if id_base != 0 && id_base != 1 {
            return Err(Error::InvariantViolation(format!(
                "bus ids must start at 0 or 1, found {}",
                id_base
            )));
        }
        let mut seen = vec![false; n];
        for b in &file.buses {
            let idx = b.id - id_base;
            if idx < 0 || idx as usize >= n || seen[idx as usize] {
                return Err(Error::InvariantViolation(format!(
                    "bus ids must be contiguous and unique, offending id {}",
                    b.id
                )));
            }
            seen[idx as usize] = true;
        }
        let to_idx = |id: i64, what: &str| -> Result<usize> {
            let idx = id - id_base;
            if idx < 0 || idx as usize >= n {
                Err(Error::InvariantViolation(format!(
                    "{} references unknown bus {}",
                    what, id
                )))
            } else {
                Ok(idx as usize)
            }
        };

        // Slack: meta.slack_bus wins, else a unique is_slack flag, else the
        // lowest id. More than one nomination is an error.
        let flagged: Vec<usize> = file
            .buses
            .iter()
            .filter(|b| b.is_slack == Some(true))
            .map(|b| (b.id - id_base) as usize)
            .collect();
        if flagged.len() > 1 {
            return Err(Error::MultipleSlackBuses);
        }
        let slack = match (file.meta.slack_bus, flagged.first()) {
            (Some(id), Some(&f)) => {
                let m = to_idx(id, "meta.slack_bus")?;
                if m != f {
                    return Err(Error::MultipleSlackBuses);
                }
                m
            }
            (Some(id), None) => to_idx(id, "meta.slack_bus")?,
            (None, Some(&f)) => f,
            (None, None) => 0,
        };

        let ac = file.meta.ac_capable;
        let mut lines = Vec::with_capacity(file.lines.len());
        for (li, l) in file.lines.iter().enumerate() {
            let from = to_idx(l.from, "line")?;
            let to = to_idx(l.to, "line")?;
            if from == to {
                return Err(Error::InvariantViolation(format!("line {} is a self-loop", li)));
            }
            if !(l.b > 0.0) {
                return Err(Error::InvariantViolation(format!(
                    "line {} susceptance must be positive",
                    li
                )));
            }
            if l.flow_min > l.flow_max {
                return Err(Error::InvariantViolation(format!(
                    "line {} has flow_min > flow_max",
                    li
                )));
            }
            if ac != (l.s_max.is_some()) {
                return Err(Error::InvariantViolation(format!(
                    "line {}: s_max must be present iff ac_capable",
                    li
                )));
            }
            if ac && l.g.is_none() {
                return Err(Error::MissingField(format!("lines[{}].g", li)));
            }
            lines.push(Line {
                from,
                to,
                b: l.b,
                g: l.g.unwrap_or(0.0),
                flow_min: l.flow_min,
                flow_max: l.flow_max,
                s_max: l.s_max,
            });
        }

        let mut generators = Vec::with_capacity(file.generators.len());
        let mut gen_ids = std::collections::BTreeSet::new();
        for g in &file.generators {
            if !gen_ids.insert(g.id.clone()) {
                return Err(Error::DuplicateId(g.id.clone()));
            }
            let bus = to_idx(g.bus, &format!("generator {}", g.id))?;
            if g.pmin < 0.0 || g.pmin > g.pmax {
                return Err(Error::InvariantViolation(format!(
                    "generator {}: need 0 <= pmin <= pmax",
                    g.id
                )));
            }
            if g.ru < 0.0 || g.rd < 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "generator {}: ramp rates must be nonnegative",
                    g.id
                )));
            }
            if g.min_up == 0 || g.min_down == 0 {
                return Err(Error::InvariantViolation(format!(
                    "generator {}: min_up/min_down must be >= 1",
                    g.id
                )));
            }
            if ac != (g.qmin.is_some() && g.qmax.is_some()) {
                return Err(Error::InvariantViolation(format!(
                    "generator {}: qmin/qmax must be present iff ac_capable",
                    g.id
                )));
            }
            if let (Some(qmin), Some(qmax)) = (g.qmin, g.qmax) {
                if qmin > qmax {
                    return Err(Error::InvariantViolation(format!(
                        "generator {}: qmin > qmax",
                        g.id
                    )));
                }
            }
            if g.initial_on {
                if g.initial_power < g.pmin - 1e-9 || g.initial_power > g.pmax + 1e-9 {
                    return Err(Error::InvariantViolation(format!(
                        "generator {}: initial_power outside [pmin, pmax] while on",
                        g.id
                    )));
                }
            } else if g.initial_power != 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "generator {}: initial_power must be 0 while off",
                    g.id
                )));
            }
            generators.push(Generator {
                id: g.id.clone(),
                bus,
                cp: g.cp,
                cu: g.cu,
                cv: g.cv,
                cz: g.cz,
                pmin: g.pmin,
                pmax: g.pmax,
                qmin: g.qmin,
                qmax: g.qmax,
                ru: g.ru,
                rd: g.rd,
                min_up: g.min_up,
                min_down: g.min_down,
                initial_on: g.initial_on,
                initial_power: g.initial_power,
            });
        }

        let check_grid = |grid: &Vec<Vec<f64>>, what: &str| -> Result<()> {
            if grid.len() != n {
                return Err(Error::InvariantViolation(format!(
                    "demand.{} must have one row per bus",
                    what
                )));
            }
            for (k, row) in grid.iter().enumerate() {
                if row.len() != file.meta.periods {
                    return Err(Error::InvariantViolation(format!(
                        "demand.{} row {} must have one entry per period",
                        what, k
                    )));
                }
            }
            Ok(())
        };
        check_grid(&file.demand.real, "real")?;
        if file.demand.real.iter().flatten().any(|&d| d < 0.0) {
            return Err(Error::InvariantViolation("negative real demand".into()));
        }
        if ac != file.demand.reactive.is_some() {
            return Err(Error::InvariantViolation(
                "demand.reactive must be present iff ac_capable".into(),
            ));
        }
        if let Some(r) = &file.demand.reactive {
            check_grid(r, "reactive")?;
        }

        let vmin = file
            .buses
            .iter()
            .map(|b| b.vmin.unwrap_or(0.94))
            .collect::<Vec<_>>();
        let vmax = file
            .buses
            .iter()
            .map(|b| b.vmax.unwrap_or(1.06))
            .collect::<Vec<_>>();
        for k in 0..n {
            if !(vmin[k] > 0.0 && vmin[k] <= vmax[k]) {
                return Err(Error::InvariantViolation(format!(
                    "bus {}: need 0 < vmin <= vmax",
                    k as i64 + id_base
                )));
            }
        }

        Ok(Instance {
            name: file.meta.name,
            periods: file.meta.periods,
            ac_capable: ac,
            id_base,
            slack,
            n_buses: n,
            vmin,
            vmax,
            lines,
            generators,
            demand_real: file.demand.real,
            demand_imag: file.demand.reactive,
        })
    }

    /// Re-serialize to the on-disk shape with the original id base.
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            meta: Meta {
                name: self.name.clone(),
                periods: self.periods,
                ac_capable: self.ac_capable,
                slack_bus: Some(self.slack as i64 + self.id_base),
            },
            buses: (0..self.n_buses)
                .map(|k| BusRecord {
                    id: k as i64 + self.id_base,
                    is_slack: None,
                    vmin: Some(self.vmin[k]),
                    vmax: Some(self.vmax[k]),
                })
                .collect(),
            lines: self
                .lines
                .iter()
                .map(|l| LineRecord {
                    from: l.from as i64 + self.id_base,
                    to: l.to as i64 + self.id_base,
                    b: l.b,
                    g: if self.ac_capable { Some(l.g) } else { None },
                    flow_min: l.flow_min,
                    flow_max: l.flow_max,
                    s_max: l.s_max,
                })
                .collect(),
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    id: g.id.clone(),
                    bus: g.bus as i64 + self.id_base,
                    cp: g.cp,
                    cu: g.cu,
                    cv: g.cv,
                    cz: g.cz,
                    pmin: g.pmin,
                    pmax: g.pmax,
                    qmin: g.qmin,
                    qmax: g.qmax,
                    ru: g.ru,
                    rd: g.rd,
                    min_up: g.min_up,
                    min_down: g.min_down,
                    initial_on: g.initial_on,
                    initial_power: g.initial_power,
                })
                .collect(),
            demand: DemandRecord {
                real: self.demand_real.clone(),
                reactive: self.demand_imag.clone(),
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    /// Scale every demand entry (real and reactive) by `m`.
    pub fn apply_load_multiplier(&self, m: f64) -> Result<Instance> {
        if !(m > 0.0) {
            return Err(Error::NonPositiveMultiplier(m));
        }
        let mut out = self.clone();
        for row in out.demand_real.iter_mut() {
            for d in row.iter_mut() {
                *d *= m;
            }
        }
        if let Some(grid) = out.demand_imag.as_mut() {
            for row in grid.iter_mut() {
                for d in row.iter_mut() {
                    *d *= m;
                }
            }
        }
        Ok(out)
    }

    /// Truncate the horizon to the first `t` periods.
    pub fn with_periods(&self, t: usize) -> Result<Instance> {
        if t == 0 || t > self.periods {
            return Err(Error::InvariantViolation(format!(
                "cannot truncate {}-period instance to {} periods",
                self.periods, t
            )));
        }
        let mut out = self.clone();
        out.periods = t;
        for row in out.demand_real.iter_mut() {
            row.truncate(t);
        }
        if let Some(grid) = out.demand_imag.as_mut() {
            for row in grid.iter_mut() {
                row.truncate(t);
            }
        }
        Ok(out)
    }

    /// Demand values as envelope parameters.
    pub fn demand_params(&self) -> ParamValues {
        let mut out = ParamValues::new();
        for (k, row) in self.demand_real.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                out.insert(ParamId::DemandReal { bus: k, period: t }, d);
            }
        }
        if let Some(grid) = &self.demand_imag {
            for (k, row) in grid.iter().enumerate() {
                for (t, &d) in row.iter().enumerate() {
                    out.insert(ParamId::DemandImag { bus: k, period: t }, d);
                }
            }
        }
        out
    }

    /// Total real demand in period t.
    pub fn total_demand(&self, t: usize) -> f64 {
        self.demand_real.iter().map(|row| row[t]).sum()
    }

    /// Injection shift factors w.r.t. the declared slack bus: factorize the
    /// reduced susceptance-weighted Laplacian once, back-solve per bus.
    pub fn compute_shift_factors(&self) -> Result<ShiftFactorMatrix> {
        let n = self.n_buses;
        // Connectivity check gives a better error than a singular factor.
        let mut adj = vec![Vec::new(); n];
        for l in &self.lines {
            adj[l.from].push(l.to);
            adj[l.to].push(l.from);
        }
        let mut reached = vec![false; n];
        let mut stack = vec![self.slack];
        reached[self.slack] = true;
        while let Some(k) = stack.pop() {
            for &j in &adj[k] {
                if !reached[j] {
                    reached[j] = true;
                    stack.push(j);
                }
            }
        }
        if let Some(k) = (0..n).find(|&k| !reached[k]) {
            return Err(Error::DisconnectedNetwork(k));
        }

        let mut lap = DMatrix::<f64>::zeros(n, n);
        for l in &self.lines {
            lap[(l.from, l.from)] += l.b;
            lap[(l.to, l.to)] += l.b;
            lap[(l.from, l.to)] -= l.b;
            lap[(l.to, l.from)] -= l.b;
        }
        let keep: Vec<usize> = (0..n).filter(|&k| k != self.slack).collect();
        let m = n - 1;
        let mut red = DMatrix::<f64>::zeros(m, m);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                red[(a, b)] = lap[(i, j)];
            }
        }
        let lu = red.lu();
        let inv = lu
            .try_inverse()
            .ok_or_else(|| Error::InvariantViolation("singular reduced laplacian".into()))?;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                s[(i, j)] = inv[(a, b)];
            }
        }
        Ok(ShiftFactorMatrix { s, slack: self.slack })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_json(extra_bus: &str) -> String {
        format!(
            r#"{{
  "meta": {{"name": "toy", "periods": 2, "ac_capable": false, "slack_bus": 1}},
  "buses": [{{"id": 1{}}}, {{"id": 2}}],
  "lines": [{{"from": 1, "to": 2, "b": 2.0, "flow_min": -100.0, "flow_max": 100.0}}],
  "generators": [{{"id": "g1", "bus": 1, "cp": 10.0, "cu": 100.0, "cv": 50.0, "cz": 5.0,
                   "pmin": 1.0, "pmax": 10.0, "ru": 10.0, "rd": 10.0,
                   "min_up": 1, "min_down": 1, "initial_on": false, "initial_power": 0.0}}],
  "demand": {{"real": [[0.0, 0.0], [3.0, 4.0]]}}
}}"#,
            extra_bus
        )
    }

    #[test]
    fn parses_and_validates_toy() {
        let inst = Instance::from_str(&toy_json("")).unwrap();
        assert_eq!(inst.n_buses, 2);
        assert_eq!(inst.id_base, 1);
        assert_eq!(inst.slack, 0);
        assert_eq!(inst.total_demand(1), 4.0);
    }

    #[test]
    fn two_slack_buses_rejected() {
        let text = toy_json(", \"is_slack\": true").replace("\"id\": 2", "\"id\": 2, \"is_slack\": true");
        match Instance::from_str(&text) {
            Err(Error::MultipleSlackBuses) => {}
            other => panic!("expected MultipleSlackBuses, got {:?}", other),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = toy_json("").replace("\"cp\": 10.0, ", "");
        match Instance::from_str(&text) {
            Err(Error::MissingField(f)) => assert_eq!(f, "cp"),
            other => panic!("expected MissingField, got {:?}", other),
        }
    }

    #[test]
    fn multiplier_scales_only_demand() {
        let inst = Instance::from_str(&toy_json("")).unwrap();
        let scaled = inst.apply_load_multiplier(2.5).unwrap();
        assert_eq!(scaled.demand_real[1], vec![7.5, 10.0]);
        assert_eq!(scaled.generators[0].pmax, inst.generators[0].pmax);
        assert!(matches!(
            inst.apply_load_multiplier(0.0),
            Err(Error::NonPositiveMultiplier(_))
        ));
    }

    #[test]
    fn slack_injection_has_zero_flows() {
        let inst = Instance::from_str(&toy_json("")).unwrap();
        let sf = inst.compute_shift_factors().unwrap();
        let flows = sf.flows(&inst.lines, &[1.0, 0.0]);
        assert_eq!(flows, vec![0.0]);
    }

    #[test]
    fn two_bus_flow_matches_angle_solve() {
        // Inject 1 MW at bus 2 (internal 1), withdraw at slack. Angle solve:
        // theta_2 = 1/b = 0.5, flow(1->2) = b*(theta_1 - theta_2) = -1.
        let inst = Instance::from_str(&toy_json("")).unwrap();
        let sf = inst.compute_shift_factors().unwrap();
        let flows = sf.flows(&inst.lines, &[0.0, 1.0]);
        assert!((flows[0] - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn triangle_flows_match_angle_solve() {
        let text = r#"{
  "meta": {"name": "tri", "periods": 1, "ac_capable": false, "slack_bus": 0},
  "buses": [{"id": 0}, {"id": 1}, {"id": 2}],
  "lines": [
    {"from": 0, "to": 1, "b": 1.0, "flow_min": -10.0, "flow_max": 10.0},
    {"from": 1, "to": 2, "b": 1.0, "flow_min": -10.0, "flow_max": 10.0},
    {"from": 0, "to": 2, "b": 1.0, "flow_min": -10.0, "flow_max": 10.0}
  ],
  "generators": [],
  "demand": {"real": [[0.0], [0.0], [0.0]]}
}"#;
        let inst = Instance::from_str(text).unwrap();
        let sf = inst.compute_shift_factors().unwrap();
        // Inject 1 at bus 1, withdraw at slack. Angle oracle: reduced
        // laplacian [[2,-1],[-1,2]] over buses {1,2}; rhs (1,0);
        // theta = (2/3, 1/3).
        let flows = sf.flows(&inst.lines, &[-1.0, 1.0, 0.0]);
        let th = [0.0, 2.0 / 3.0, 1.0 / 3.0];
        let expect = [th[0] - th[1], th[1] - th[2], th[0] - th[2]];
        for (f, e) in flows.iter().zip(expect.iter()) {
            assert!((f - e).abs() < 1e-10, "{} vs {}", f, e);
        }
    }

    #[test]
    fn disconnected_network_is_reported() {
        let text = toy_json("").replace(
            r#""lines": [{"from": 1, "to": 2, "b": 2.0, "flow_min": -100.0, "flow_max": 100.0}]"#,
            r#""lines": []"#,
        );
        let inst = Instance::from_str(&text).unwrap();
        assert!(matches!(
            inst.compute_shift_factors(),
            Err(Error::DisconnectedNetwork(1))
        ));
    }

    #[test]
    fn roundtrip_preserves_fields() {
        let inst = Instance::from_str(&toy_json("")).unwrap();
        let json = inst.to_json().unwrap();
        let back = Instance::from_str(&json).unwrap();
        assert_eq!(back.n_buses, inst.n_buses);
        assert_eq!(back.slack, inst.slack);
        assert_eq!(back.demand_real, inst.demand_real);
        assert_eq!(back.generators[0].id, inst.generators[0].id);
        assert_eq!(back.lines[0].b, inst.lines[0].b);
    }

    #[test]
    fn horizon_truncation() {
        let inst = Instance::from_str(&toy_json("")).unwrap();
        let cut = inst.with_periods(1).unwrap();
        assert_eq!(cut.periods, 1);
        assert_eq!(cut.demand_real[1], vec![3.0]);
        assert!(cut.with_periods(2).is_err());
    }
}
