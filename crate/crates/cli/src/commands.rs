use std::fmt::Write as _;
use std::path::Path;

use boost_gpc::gpc::{synthesize as synth, CarimaModel, GpcConfig};
use boost_gpc::numerics::Polynomial;
use boost_gpc::plant::{discrete_plant, operating_point, ConverterParams, PlantModel};
use boost_gpc::sim::{metrics, simulate as run_sim, Scenario, SimError, SimMetrics, SimTrace};
use boost_gpc::stability::{
    assess, min_horizon as scan, robust_horizon, sweep as run_sweep, StabilityError, SweepGrid,
    SweepRecord,
};
use serde_json::{json, Value};

use crate::config::{parse_json, ConfigFile};
use crate::format::{sig9, write_atomic};
use crate::range::{parse_axis, parse_count_axis};
use crate::CliError;

pub const POLE_HEADER: &str = "P,lambda,R,vref,pole_index,re,im,modulus,stable";
pub const SUMMARY_HEADER: &str = "P,lambda,R,vref,max_modulus,stable";
pub const TRACE_HEADER: &str = "t,iL,vO,duty,ref";

const SHIFT_NOTE: &str = "note: the Tustin numerator has a direct feedthrough term; \
B is delayed by one sample to fit the u(k-1) model structure";

fn model(cfg: &ConfigFile) -> PlantModel {
    PlantModel::new(cfg.discretization, cfg.gain)
}

fn stability_error(e: StabilityError) -> CliError {
    match e {
        StabilityError::NoStableHorizon { .. } | StabilityError::CornerDominanceViolated { .. } => {
            CliError {
                code: 3,
                message: e.to_string(),
            }
        }
        other => CliError::input(other.to_string()),
    }
}

/// Whether the design model's numerator had to be delayed; reported on
/// stderr once per command.
fn shift_note(cfg: &ConfigFile, params: &ConverterParams) -> Option<&'static str> {
    let plant = discrete_plant(params, &model(cfg)).ok()?;
    CarimaModel::from_discrete(&plant, cfg.gpc.delay_d)
        .shifted
        .then(|| {
            eprintln!("{SHIFT_NOTE}");
            SHIFT_NOTE
        })
}

fn coeff_list(p: &Polynomial) -> String {
    p.coeffs()
        .iter()
        .map(|c| sig9(*c))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn synthesize(cfg: &ConfigFile, horizon: Option<usize>) -> Result<(), CliError> {
    let params = cfg.converter;
    let mut gpc = cfg.gpc;
    if let Some(p) = horizon {
        gpc.horizon_p = p;
    }
    gpc.validate()
        .map_err(|e| CliError::input(format!("gpc: {e}")))?;
    let op = operating_point(&params).map_err(|e| CliError::input(e.to_string()))?;
    let plant = discrete_plant(&params, &model(cfg)).map_err(|e| CliError::input(e.to_string()))?;
    let syn = synth(&plant, &gpc).map_err(|e| CliError::input(e.to_string()))?;
    let rep = assess(&syn, cfg.margin).map_err(stability_error)?;
    let note = shift_note(cfg, &params);

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "# GPC synthesis report");
    let _ = writeln!(
        w,
        "converter: vg = {} V, vo_ref = {} V, L = {} H, C = {} F, R = {} ohm, fs = {} Hz, duty in [{}, {}]",
        sig9(params.vg),
        sig9(params.vo_ref),
        sig9(params.l),
        sig9(params.c),
        sig9(params.r),
        sig9(params.fs),
        sig9(params.duty_min),
        sig9(params.duty_max)
    );
    let _ = writeln!(
        w,
        "operating point: D = {}, iL = {} A",
        sig9(op.d),
        sig9(op.il)
    );
    let _ = writeln!(
        w,
        "design model: {} discretization, {} gain",
        cfg.discretization, cfg.gain
    );
    if let Some(n) = note {
        let _ = writeln!(w, "{n}");
    }
    let _ = writeln!(
        w,
        "gpc: P = {}, Nu = {}, lambda = {}, delta = {}, d = {}",
        gpc.horizon_p,
        gpc.horizon_nu,
        sig9(gpc.lambda),
        sig9(gpc.delta_w),
        gpc.delay_d
    );
    let _ = writeln!(w, "\n## plant (coefficients of z^0, z^-1, ...)");
    let _ = writeln!(w, "A: {}", coeff_list(plant.a()));
    let _ = writeln!(w, "B: {}", coeff_list(plant.b()));
    let _ = writeln!(
        w,
        "B in CARIMA form (u(k-1), u(k-2), ...): {}",
        coeff_list(&syn.model().b)
    );

    let _ = writeln!(w, "\n## gain K ({} entries)", syn.k_row.len());
    for (j, k) in syn.k_row.iter().enumerate() {
        let _ = writeln!(w, "K[{}] = {}", j + 1, sig9(*k));
    }
    let _ = writeln!(w, "\n## F_j (coefficients of y(k), y(k-1), ...)");
    for (j, f) in syn.f_polys().iter().enumerate() {
        let _ = writeln!(w, "F[{}] = {}", j + 1, coeff_list(f));
    }
    let _ = writeln!(w, "\n## G'_j (coefficients of du(k-1), du(k-2), ...)");
    for (j, g) in syn.gprime_polys().iter().enumerate() {
        let _ = writeln!(w, "G'[{}] = {}", j + 1, coeff_list(g));
    }

    let degree = rep.char_poly.coeffs().len() - 1;
    let _ = writeln!(w, "\n## closed loop");
    let _ = writeln!(w, "R: {}", coeff_list(&syn.r_poly()));
    let _ = writeln!(w, "S: {}", coeff_list(&syn.s_poly()));
    let _ = writeln!(w, "D (degree {degree}): {}", coeff_list(&rep.char_poly));
    let _ = writeln!(w, "poles ({}):", rep.poles.len());
    for (i, p) in rep.poles.iter().enumerate() {
        let _ = writeln!(
            w,
            "  {i}: {} {} {}i  |p| = {}",
            sig9(p.re),
            if p.im < 0.0 { '-' } else { '+' },
            sig9(p.im.abs()),
            sig9(p.norm())
        );
    }
    let _ = writeln!(
        w,
        "max modulus {}, margin {}: {}",
        sig9(rep.max_modulus),
        sig9(rep.margin),
        if rep.stable { "stable" } else { "unstable" }
    );

    let path = write_atomic(&cfg.output_dir, "synthesis.txt", &s)?;
    eprintln!("wrote {}", path.display());
    println!(
        "P = {}: max |pole| = {} ({})",
        gpc.horizon_p,
        sig9(rep.max_modulus),
        if rep.stable { "stable" } else { "unstable" }
    );
    Ok(())
}

fn pole_rows(records: &[SweepRecord]) -> String {
    let mut s = String::from(POLE_HEADER);
    s.push('\n');
    for rec in records {
        let key = format!(
            "{},{},{},{}",
            rec.horizon_p,
            sig9(rec.lambda),
            sig9(rec.r),
            sig9(rec.vo_ref)
        );
        match &rec.result {
            Ok(rep) => {
                for (i, p) in rep.poles.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{key},{i},{},{},{},{}",
                        sig9(p.re),
                        sig9(p.im),
                        sig9(p.norm()),
                        rep.stable
                    );
                }
            }
            Err(_) => {
                let _ = writeln!(s, "{key},,,,,error");
            }
        }
    }
    s
}

fn summary_rows(records: &[SweepRecord]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for rec in records {
        let (m, st) = match &rec.result {
            Ok(rep) => (sig9(rep.max_modulus), rep.stable.to_string()),
            Err(_) => (String::new(), "error".into()),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{m},{st}",
            rec.horizon_p,
            sig9(rec.lambda),
            sig9(rec.r),
            sig9(rec.vo_ref)
        );
    }
    s
}

/// Poles for `P = 1..=last` at one operating point.
fn horizon_scan(
    cfg: &ConfigFile,
    params: &ConverterParams,
    last: usize,
) -> Result<Vec<SweepRecord>, CliError> {
    let grid = SweepGrid {
        horizon_p: (1..=last).collect(),
        ..SweepGrid::point(params, &cfg.gpc)
    };
    run_sweep(params, &cfg.gpc, &grid, &model(cfg), cfg.margin).map_err(stability_error)
}

fn parse_corners(spec: &str) -> Result<[f64; 4], CliError> {
    let v = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::input(format!("--corners `{spec}`: expected four numbers")))?;
    <[f64; 4]>::try_from(v)
        .map_err(|_| CliError::input(format!("--corners `{spec}`: expected rmin,rmax,vmin,vmax")))
}

pub fn min_horizon(cfg: &ConfigFile, p_max: usize, corners: Option<&str>) -> Result<(), CliError> {
    if p_max < 1 {
        return Err(CliError::input("--p-max must be at least 1"));
    }
    let (design_point, found) = match corners {
        None => {
            let params = cfg.converter;
            shift_note(cfg, &params);
            (
                params,
                scan(&params, &cfg.gpc, p_max, &model(cfg), cfg.margin),
            )
        }
        Some(spec) => {
            let [rmin, rmax, vmin, vmax] = parse_corners(spec)?;
            let worst = cfg.converter.with_load(rmin).with_vo_ref(vmax);
            shift_note(cfg, &worst);
            let res = robust_horizon(
                &cfg.converter,
                (rmin, rmax),
                (vmin, vmax),
                &cfg.gpc,
                p_max,
                &model(cfg),
                cfg.margin,
            );
            if let Ok(rh) = &res {
                for (r, v, rep) in &rh.corners {
                    eprintln!(
                        "corner R = {} ohm, vref = {} V: max |pole| = {}",
                        sig9(*r),
                        sig9(*v),
                        sig9(rep.max_modulus)
                    );
                }
            }
            (worst, res.map(|rh| rh.horizon))
        }
    };
    let last = match &found {
        Ok(p) => *p,
        Err(StabilityError::NoStableHorizon { .. }) => p_max,
        Err(StabilityError::CornerDominanceViolated { horizon, .. }) => *horizon,
        Err(_) => 0,
    };
    if last > 0 {
        let records = horizon_scan(cfg, &design_point, last)?;
        let path = write_atomic(
            &cfg.output_dir,
            "min_horizon_poles.csv",
            &pole_rows(&records),
        )?;
        eprintln!("wrote {}", path.display());
    }
    let p = found.map_err(stability_error)?;
    println!("{p}");
    Ok(())
}

pub struct Axes {
    pub horizon: Option<String>,
    pub lambda: Option<String>,
    pub r: Option<String>,
    pub vref: Option<String>,
}

pub fn sweep(cfg: &ConfigFile, axes: Axes) -> Result<(), CliError> {
    if axes.horizon.is_none() && axes.lambda.is_none() && axes.r.is_none() && axes.vref.is_none() {
        return Err(CliError::input(
            "sweep needs at least one axis: --p, --lambda, --r or --vref",
        ));
    }
    let axis = |flag: &str, spec: &Option<String>, default: f64| -> Result<Vec<f64>, CliError> {
        spec.as_deref()
            .map_or(Ok(vec![default]), parse_axis)
            .map_err(|e| CliError::input(format!("{flag}: {e}")))
    };
    let grid = SweepGrid {
        horizon_p: match &axes.horizon {
            Some(s) => parse_count_axis(s).map_err(|e| CliError::input(format!("--p: {e}")))?,
            None => vec![cfg.gpc.horizon_p],
        },
        lambda: axis("--lambda", &axes.lambda, cfg.gpc.lambda)?,
        r: axis("--r", &axes.r, cfg.converter.r)?,
        vo_ref: axis("--vref", &axes.vref, cfg.converter.vo_ref)?,
    };
    shift_note(cfg, &cfg.converter);
    let records = run_sweep(&cfg.converter, &cfg.gpc, &grid, &model(cfg), cfg.margin)
        .map_err(stability_error)?;
    let poles = pole_rows(&records);
    let summary = summary_rows(&records);
    let a = write_atomic(&cfg.output_dir, "sweep_poles.csv", &poles)?;
    let b = write_atomic(&cfg.output_dir, "sweep_summary.csv", &summary)?;
    eprintln!("wrote {}", a.display());
    eprintln!("wrote {}", b.display());
    let stable = records.iter().filter(|r| r.stable() == Some(true)).count();
    let errors = records.iter().filter(|r| r.result.is_err()).count();
    println!(
        "{} points: {stable} stable, {} unstable, {errors} errors",
        records.len(),
        records.len() - stable - errors
    );
    Ok(())
}

fn trace_csv(tr: &SimTrace) -> String {
    let mut s = String::with_capacity(48 * tr.len());
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for k in 0..tr.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            sig9(tr.t[k]),
            sig9(tr.il[k]),
            sig9(tr.vo[k]),
            sig9(tr.duty[k]),
            sig9(tr.reference[k])
        );
    }
    s
}

/// Round every number in a JSON value to 9 significant digits.
fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| sig9(x).parse::<f64>().ok()) {
                *v = json!(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

fn metrics_text(m: &SimMetrics, tr: &SimTrace) -> String {
    let opt = |x: Option<f64>| x.map_or("none".into(), sig9);
    let rows = [
        ("samples", tr.len().to_string()),
        ("unstable", m.unstable.to_string()),
        ("blowup", tr.blowup.to_string()),
        ("steady_state_error", sig9(m.steady_state_error)),
        ("overshoot", sig9(m.overshoot)),
        ("settling_time_2pct", opt(m.settling_time_2pct)),
        ("duty_railed_fraction", sig9(m.duty_railed_fraction)),
        ("ref_final", sig9(m.ref_final)),
        ("window_start", sig9(m.window_start)),
        ("window_end", sig9(m.window_end)),
        ("il_floor_periods", tr.il_floor_periods.to_string()),
        ("vo_floor_periods", tr.vo_floor_periods.to_string()),
    ];
    rows.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

pub fn simulate(cfg: &ConfigFile, scenario: &Path, horizon: Option<usize>) -> Result<(), CliError> {
    let scn: Scenario = parse_json(scenario)?;
    let mut gpc: GpcConfig = cfg.gpc;
    if let Some(p) = horizon {
        gpc.horizon_p = p;
    }
    let note = if cfg.discretization == boost_gpc::plant::Discretization::Tustin {
        let m = PlantModel::new(cfg.discretization, scn.controller_gain);
        discrete_plant(&cfg.converter, &m)
            .ok()
            .filter(|p| CarimaModel::from_discrete(p, gpc.delay_d).shifted)
            .map(|_| {
                eprintln!("{SHIFT_NOTE}");
                SHIFT_NOTE
            })
    } else {
        None
    };
    let (trace, blowup) = match run_sim(&cfg.converter, &gpc, &scn, cfg.discretization) {
        Ok(tr) => (tr, None),
        Err(SimError::NumericalBlowup { time, trace }) => (*trace, Some(time)),
        Err(e) => {
            return Err(CliError::input(format!("{}: {e}", scenario.display())));
        }
    };
    let m = metrics(&trace);
    let mut doc = json!({
        "metrics": m,
        "initial_horizon_p": gpc.horizon_p,
        "lambda": gpc.lambda,
        "discretization": cfg.discretization,
        "controller_gain": scn.controller_gain,
        "samples": trace.len(),
        "blowup": trace.blowup,
        "il_floor_periods": trace.il_floor_periods,
        "vo_floor_periods": trace.vo_floor_periods,
        "events": trace.events,
        "notes": trace.notes.iter().map(String::as_str).chain(note).collect::<Vec<_>>(),
    });
    round_numbers(&mut doc);
    let text = metrics_text(&m, &trace);
    let dir = &cfg.output_dir;
    let paths = [
        write_atomic(dir, "trace.csv", &trace_csv(&trace))?,
        write_atomic(dir, "metrics.txt", &text)?,
        write_atomic(
            dir,
            "metrics.json",
            &(serde_json::to_string_pretty(&doc).expect("metrics serialize") + "\n"),
        )?,
    ];
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
    for n in &trace.notes {
        eprintln!("note: {n}");
    }
    print!("{text}");
    match blowup {
        Some(t) => Err(CliError {
            code: 4,
            message: format!("numerical blowup at t = {} s", sig9(t)),
        }),
        None => Ok(()),
    }
}
