use serde::Serialize;

use super::{Change, InitialCondition, PlantDynamics, Scenario, SimError};
use crate::gpc::{synthesize, ControllerState, GpcConfig, GpcSynthesis};
use crate::plant::{
    discrete_plant, nonlinear_derivatives, operating_point, ConverterParams, ConverterState,
    Discretization, PlantModel,
};

/// Any state magnitude above this aborts the run.
pub const BLOWUP_LIMIT: f64 = 1e6;

/// Event as it was applied during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppliedEvent {
    /// Index of the first sample computed after the change.
    pub sample: usize,
    pub time: f64,
    pub description: String,
}

/// Per-period samples of a closed-loop run. Sample `k` holds the state
/// measured at `t = k·Ts` and the duty computed from it and then held over
/// the following period.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SimTrace {
    pub t: Vec<f64>,
    pub il: Vec<f64>,
    pub vo: Vec<f64>,
    pub duty: Vec<f64>,
    pub reference: Vec<f64>,
    pub events: Vec<AppliedEvent>,
    /// Periods in which the inductor current was held at zero (diode
    /// blocking) at least once.
    pub il_floor_periods: usize,
    /// Periods in which the output voltage was held at zero at least once.
    pub vo_floor_periods: usize,
    /// Set when the run stopped at `BLOWUP_LIMIT`.
    pub blowup: bool,
    /// Free-form remarks about inferred quantities, e.g. load-current
    /// mappings.
    pub notes: Vec<String>,
    pub duty_min: f64,
    pub duty_max: f64,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Reference in force at the end of the run.
    pub fn final_reference(&self) -> Option<f64> {
        self.reference.last().copied()
    }

    /// Sample index where the most recent event took effect, or 0.
    pub fn last_event_sample(&self) -> usize {
        self.events.last().map_or(0, |e| e.sample)
    }
}

struct Loop {
    params: ConverterParams,
    model: PlantModel,
    cfg: GpcConfig,
    /// Parameters the controller's model was built from.
    design: ConverterParams,
    syn: GpcSynthesis,
    ctrl: ControllerState,
}

impl Loop {
    fn resynthesize(&mut self) -> Result<(), SimError> {
        self.design.validate()?;
        let plant = discrete_plant(&self.design, &self.model)?;
        self.syn = synthesize(&plant, &self.cfg)?;
        self.ctrl.resize_for(&self.syn);
        Ok(())
    }
}

/// Closed-loop run of the converter under GPC.
///
/// Each control period samples `vo`, runs one controller step and holds the
/// duty while the converter is integrated with classical RK4 over
/// `scn.substeps` substeps. Events take effect at the first period boundary
/// at or after their time. The inductor current and output voltage are
/// floored at zero.
///
/// The controller's model is discretized with `method` using the scenario's
/// `controller_gain`.
pub fn simulate(
    params: &ConverterParams,
    cfg: &GpcConfig,
    scn: &Scenario,
    method: Discretization,
) -> Result<SimTrace, SimError> {
    let model = &PlantModel::new(method, scn.controller_gain);
    scn.validate()?;
    cfg.validate()?;
    params.validate()?;

    let mut start = *params;
    if let Some(v) = scn.initial_ref {
        start.vo_ref = v;
    }
    if let Some(r) = scn.initial_load {
        start.r = r;
    }
    let mut trace = SimTrace {
        duty_min: params.duty_min,
        duty_max: params.duty_max,
        ..SimTrace::default()
    };
    if let Some(i) = scn.initial_load_current {
        start.r = start.load_for_current(i);
        trace.notes.push(format!(
            "initial load current {i} A mapped to R = {} Ω at vo_ref = {} V",
            start.r, start.vo_ref
        ));
    }
    start.validate()?;

    let op = operating_point(&start)?;
    let plant = discrete_plant(&start, model)?;
    let syn = synthesize(&plant, cfg)?;
    let limits = (start.duty_min, start.duty_max);
    let (mut x, ctrl) = match scn.initial {
        InitialCondition::Equilibrium => (
            ConverterState {
                il: op.il,
                vo: op.vo + scn.initial_vo_offset,
            },
            ControllerState::at_rest(&syn, op.d, op.vo, limits),
        ),
        InitialCondition::ZeroState => (
            ConverterState {
                il: 0.0,
                vo: scn.initial_vo_offset.max(0.0),
            },
            ControllerState::at_rest(&syn, 0.0, 0.0, limits),
        ),
    };
    let mut lp = Loop {
        params: start,
        model: *model,
        cfg: *cfg,
        design: start,
        syn,
        ctrl,
    };

    let ts = start.sample_time();
    let periods = (scn.duration / ts).round() as usize;
    let mut pending = scn.events.iter().peekable();
    for k in 0..periods {
        let t = k as f64 * ts;
        while let Some(e) = pending.next_if(|e| e.time <= t + 1e-9 * ts) {
            let description = apply(&mut lp, &mut x, e.change, scn, &mut trace)?;
            trace.events.push(AppliedEvent {
                sample: k,
                time: t,
                description,
            });
        }

        let w = lp.params.vo_ref;
        let d = lp.ctrl.step(&lp.syn, x.vo, w);
        trace.t.push(t);
        trace.il.push(x.il);
        trace.vo.push(x.vo);
        trace.duty.push(d);
        trace.reference.push(w);

        let floors = match scn.model {
            PlantDynamics::Averaged => advance_averaged(&mut x, d, &lp.params, ts, scn.substeps),
            PlantDynamics::Switched => advance_switched(&mut x, d, &lp.params, ts, scn.substeps),
        };
        trace.il_floor_periods += floors.0 as usize;
        trace.vo_floor_periods += floors.1 as usize;

        if !(x.il.abs() <= BLOWUP_LIMIT && x.vo.abs() <= BLOWUP_LIMIT) {
            trace.blowup = true;
            return Err(SimError::NumericalBlowup {
                time: t + ts,
                trace: Box::new(trace),
            });
        }
    }
    Ok(trace)
}

fn apply(
    lp: &mut Loop,
    x: &mut ConverterState,
    change: Change,
    scn: &Scenario,
    trace: &mut SimTrace,
) -> Result<String, SimError> {
    Ok(match change {
        Change::SetHorizon(p) => {
            lp.cfg.horizon_p = p;
            lp.cfg.horizon_nu = lp.cfg.horizon_nu.min(p);
            lp.resynthesize()?;
            format!("horizon -> {p}")
        }
        Change::SetLoad(r) => {
            set_load(lp, r, scn)?;
            format!("load -> {r} ohm")
        }
        Change::SetLoadCurrent(i) => {
            let r = lp.params.load_for_current(i);
            trace.notes.push(format!(
                "load current {i} A mapped to R = {r} Ω at vo_ref = {} V",
                lp.params.vo_ref
            ));
            set_load(lp, r, scn)?;
            format!("load current -> {i} A (R = {r} ohm)")
        }
        Change::SetRef(v) => {
            lp.params.vo_ref = v;
            if scn.resynthesize_on_ref {
                lp.design.vo_ref = v;
                lp.resynthesize()?;
            }
            format!("reference -> {v} V")
        }
        Change::DisturbVo(dv) => {
            x.vo = (x.vo + dv).max(0.0);
            format!("output voltage disturbed by {dv} V")
        }
    })
}

fn set_load(lp: &mut Loop, r: f64, scn: &Scenario) -> Result<(), SimError> {
    lp.params.r = r;
    if scn.resynthesize_on_load {
        lp.design.r = r;
        lp.resynthesize()?;
    }
    Ok(())
}

/// Converter derivatives with the diode preventing reverse inductor current.
fn derivatives(x: &ConverterState, d: f64, p: &ConverterParams) -> (f64, f64) {
    let (mut dil, dvo) = nonlinear_derivatives(x, d, p);
    if x.il <= 0.0 && dil < 0.0 {
        dil = 0.0;
    }
    (dil, dvo)
}

fn rk4(x: &ConverterState, d: f64, p: &ConverterParams, h: f64) -> ConverterState {
    let at = |k: (f64, f64), s: f64| ConverterState {
        il: x.il + s * k.0,
        vo: x.vo + s * k.1,
    };
    let k1 = derivatives(x, d, p);
    let k2 = derivatives(&at(k1, h / 2.0), d, p);
    let k3 = derivatives(&at(k2, h / 2.0), d, p);
    let k4 = derivatives(&at(k3, h), d, p);
    ConverterState {
        il: x.il + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        vo: x.vo + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

/// One RK4 step followed by the zero floors; reports which floor engaged.
fn floored_step(x: &mut ConverterState, d: f64, p: &ConverterParams, h: f64) -> (bool, bool) {
    *x = rk4(x, d, p, h);
    let il = x.il < 0.0;
    let vo = x.vo < 0.0;
    if il {
        x.il = 0.0;
    }
    if vo {
        x.vo = 0.0;
    }
    (il, vo)
}

fn advance_averaged(
    x: &mut ConverterState,
    d: f64,
    p: &ConverterParams,
    ts: f64,
    substeps: usize,
) -> (bool, bool) {
    let h = ts / substeps as f64;
    let mut hit = (false, false);
    for _ in 0..substeps {
        let f = floored_step(x, d, p, h);
        hit = (hit.0 | f.0, hit.1 | f.1);
    }
    hit
}

/// Switch on while a rising sawtooth carrier is below `d`, i.e. on
/// `[0, d·Ts)` and off for the rest of the period. A substep that contains
/// the switching instant is split there.
fn advance_switched(
    x: &mut ConverterState,
    d: f64,
    p: &ConverterParams,
    ts: f64,
    substeps: usize,
) -> (bool, bool) {
    let h = ts / substeps as f64;
    let t_off = d * ts;
    let mut hit = (false, false);
    let mut run = |x: &mut ConverterState, state: f64, len: f64| {
        if len > 0.0 {
            let f = floored_step(x, state, p, len);
            hit = (hit.0 | f.0, hit.1 | f.1);
        }
    };
    for i in 0..substeps {
        let a = i as f64 * h;
        let b = a + h;
        if b <= t_off {
            run(x, 1.0, h);
        } else if a >= t_off {
            run(x, 0.0, h);
        } else {
            run(x, 1.0, t_off - a);
            run(x, 0.0, b - t_off);
        }
    }
    hit
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_holds_equilibrium() {
        let p = ConverterParams::nominal();
        let op = operating_point(&p).unwrap();
        let mut x = ConverterState::from(op);
        advance_averaged(&mut x, op.d, &p, p.sample_time(), 10);
        assert!((x.vo - op.vo).abs() < 1e-9);
        assert!((x.il - op.il).abs() < 1e-9);
    }

    #[test]
    fn diode_blocks_reverse_current() {
        let p = ConverterParams::nominal();
        let mut x = ConverterState { il: 0.0, vo: 200.0 };
        let (il_floor, _) = advance_averaged(&mut x, 0.1, &p, p.sample_time(), 10);
        assert_eq!(x.il, 0.0);
        assert!(!il_floor || x.il == 0.0);
        assert!(x.vo < 200.0);
    }

    #[test]
    fn switched_period_average_matches_duty() {
        // Over one period from the operating point the switched inductor
        // current ripples but returns close to its start.
        let p = ConverterParams::nominal();
        let op = operating_point(&p).unwrap();
        let mut x = ConverterState::from(op);
        advance_switched(&mut x, op.d, &p, p.sample_time(), 20);
        assert!((x.il - op.il).abs() < 1e-3);
        assert!((x.vo - op.vo).abs() < 1e-2);
    }

    #[test]
    fn events_land_on_period_boundaries() {
        let p = ConverterParams::nominal();
        let scn = Scenario::steady(0.01).with_event(0.00505, Change::SetRef(72.0));
        let tr = simulate(&p, &GpcConfig::new(16, 10.0), &scn, Discretization::Zoh).unwrap();
        assert_eq!(tr.len(), 100);
        assert_eq!(tr.events[0].sample, 51);
        assert_eq!(tr.reference[50], 70.0);
        assert_eq!(tr.reference[51], 72.0);
    }
}
