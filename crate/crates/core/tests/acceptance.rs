//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use boost_gpc::gpc::{diophantine, synthesize, CarimaModel, ControllerState, GpcConfig};
use boost_gpc::numerics::{DiscreteTf, Polynomial};
use boost_gpc::plant::{
    discrete_plant, ConverterParams, Discretization, PlantModel, SmallSignalGain,
};
use boost_gpc::sim::{metrics, metrics_window, simulate, Change, Scenario, SimTrace};
use boost_gpc::stability::{assess, assess_design, min_horizon, robust_horizon, StabilityError};
use common::{mul, oracle_increment, random_stable_monic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDA: f64 = 10.0;
const P_MAX: usize = 60;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn cfg(p: usize) -> GpcConfig {
    GpcConfig::new(p, LAMBDA)
}

fn nominal() -> ConverterParams {
    ConverterParams::nominal()
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed < limit
}

fn horizon_text(r: Result<usize, StabilityError>) -> String {
    match r {
        Ok(p) => p.to_string(),
        Err(e) => format!("error ({e})"),
    }
}

fn c1_nominal_boundary() -> Verdict {
    let start = Instant::now();
    let zoh = min_horizon(&nominal(), &cfg(1), P_MAX, &Discretization::Zoh.into(), 0.0);
    let tustin = min_horizon(
        &nominal(),
        &cfg(1),
        P_MAX,
        &Discretization::Tustin.into(),
        0.0,
    );
    let dflt = min_horizon(&nominal(), &cfg(1), P_MAX, &PlantModel::default(), 0.0);
    let elapsed = start.elapsed();
    let pass = dflt == Ok(13)
        && (zoh == Ok(13) || tustin == Ok(13))
        && within(Duration::from_secs(5), elapsed);
    Verdict::new(
        pass,
        format!(
            "zoh = {}, tustin = {}, default ({}) = {}; {:.3} s",
            horizon_text(zoh),
            horizon_text(tustin),
            PlantModel::default().discretization,
            horizon_text(dflt.clone()),
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_worst_case_boundary() -> Verdict {
    let start = Instant::now();
    let robust = robust_horizon(
        &nominal(),
        (40.0, 70.0),
        (60.0, 90.0),
        &cfg(1),
        P_MAX,
        &PlantModel::default(),
        0.0,
    )
    .map(|r| r.horizon);
    let elapsed = start.elapsed();
    let worst = nominal().with_load(40.0).with_vo_ref(90.0);
    let at16 = assess_design(&worst, &cfg(16), &PlantModel::default(), 0.0)
        .map(|r| r.max_modulus)
        .unwrap_or(f64::NAN);
    let alternatives: Vec<String> = [
        (Discretization::Zoh, SmallSignalGain::Printed),
        (Discretization::Tustin, SmallSignalGain::Linearized),
        (Discretization::Tustin, SmallSignalGain::Printed),
    ]
    .into_iter()
    .map(|(d, g)| {
        let p = min_horizon(&worst, &cfg(1), P_MAX, &PlantModel::new(d, g), 0.0);
        format!("{d}/{g} = {}", horizon_text(p))
    })
    .collect();
    let pass = robust == Ok(16) && within(Duration::from_secs(5), elapsed);
    Verdict::new(
        pass,
        format!(
            "expected 16, got {}; max |pole| at P = 16 is {at16:.4}; other models: {}; {:.3} s",
            horizon_text(robust),
            alternatives.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn c3_lambda_insensitivity() -> Verdict {
    let mut moduli = Vec::new();
    let mut pass = true;
    for lambda in 2..=10 {
        let c = GpcConfig::new(13, lambda as f64);
        match assess_design(&nominal(), &c, &PlantModel::default(), 0.0) {
            Ok(r) => {
                pass &= r.stable;
                moduli.push(format!("{lambda}:{:.3}", r.max_modulus));
            }
            Err(e) => {
                pass = false;
                moduli.push(format!("{lambda}:error({e})"));
            }
        }
    }
    Verdict::new(
        pass,
        format!("max |pole| by λ at P = 13: {}", moduli.join(" ")),
    )
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn c4_trends() -> Verdict {
    let modulus = |p: ConverterParams| {
        assess_design(&p, &cfg(13), &PlantModel::default(), 0.0)
            .map(|r| r.max_modulus)
            .unwrap_or(f64::NAN)
    };
    let by_r: Vec<f64> = [70.0, 60.0, 50.0, 40.0]
        .into_iter()
        .map(|r| modulus(nominal().with_load(r)))
        .collect();
    let by_v: Vec<f64> = [60.0, 70.0, 80.0, 90.0]
        .into_iter()
        .map(|v| modulus(nominal().with_vo_ref(v)))
        .collect();
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(" < ")
    };
    Verdict::new(
        strictly_increasing(&by_r) && strictly_increasing(&by_v),
        format!("R 70→40: {}; vref 60→90: {}", fmt(&by_r), fmt(&by_v)),
    )
}

fn c5_structural_poles() -> Verdict {
    let plant = discrete_plant(&nominal(), &PlantModel::default()).unwrap();
    let mut pass = true;
    let mut checked = Vec::new();
    for p in 11..=20 {
        let rep = assess(&synthesize(&plant, &cfg(p)).unwrap(), 0.0).unwrap();
        if !rep.stable {
            continue;
        }
        let ok = rep.min_modulus() < 1e-6 && rep.complex_pole_count() >= 2;
        pass &= ok;
        checked.push(format!("P{p}:{}", if ok { "ok" } else { "missing" }));
    }
    pass &= !checked.is_empty();
    // λ axis, reported for information.
    let real_only: Vec<String> = (2..=10)
        .filter(|&l| {
            let syn = synthesize(&plant, &GpcConfig::new(13, l as f64)).unwrap();
            assess(&syn, 0.0).unwrap().complex_pole_count() == 0
        })
        .map(|l| l.to_string())
        .collect();
    Verdict::new(
        pass,
        format!(
            "origin pole and conjugate pair at stable P (λ = 10): {}; λ with only real poles at P = 13: [{}]",
            checked.join(" "),
            real_only.join(", ")
        ),
    )
}

fn c6_diophantine() -> Verdict {
    let start = Instant::now();
    let plant = discrete_plant(&nominal(), &PlantModel::default()).unwrap();
    let at = CarimaModel::from_discrete(&plant, 0).a_tilde();
    let table = diophantine(&at, 20).unwrap();
    let mut worst = (1..=20).map(|j| table.residual(&at, j)).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0xd10f);
    for case in 0..100 {
        let deg = 1 + case % 4;
        let mut a = random_stable_monic(&mut rng, deg, 0.99);
        if deg < 4 && rng.gen_bool(0.5) {
            a = mul(&a, &[1.0, -1.0]);
        }
        let at = Polynomial::structural(a);
        let t = diophantine(&at, 20).unwrap();
        worst = (1..=20).map(|j| t.residual(&at, j)).fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    Verdict::new(
        worst < 1e-10 && within(Duration::from_secs(10), elapsed),
        format!(
            "largest residual {worst:.2e} over the converter model and 100 random Ã; {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c7_cost_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc057);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let plant = if case % 2 == 0 {
            let p = nominal()
                .with_load(rng.gen_range(40.0..70.0))
                .with_vo_ref(rng.gen_range(60.0..90.0));
            discrete_plant(&p, &PlantModel::default()).unwrap()
        } else {
            let na = rng.gen_range(1..=3);
            let a = random_stable_monic(&mut rng, na, 0.98);
            let b: Vec<f64> = std::iter::once(0.0)
                .chain((0..rng.gen_range(1..=3)).map(|_| rng.gen_range(-2.0..2.0)))
                .collect();
            DiscreteTf::new(Polynomial::new(b), Polynomial::new(a), 1e-4).unwrap()
        };
        let c = GpcConfig::new(rng.gen_range(1..=25), 10f64.powf(rng.gen_range(-1.0..2.0)));
        let syn = synthesize(&plant, &c).unwrap();
        let mut st = ControllerState::unconstrained(&syn, 0.0, 0.0);
        st.y_history
            .iter_mut()
            .for_each(|y| *y = rng.gen_range(-5.0..5.0));
        st.du_history
            .iter_mut()
            .for_each(|d| *d = rng.gen_range(-0.2..0.2));
        let y = rng.gen_range(-5.0..5.0);
        let w = rng.gen_range(-5.0..5.0);
        let expected = oracle_increment(&syn, &st, y, w);
        let got = st.step(&syn, y, w);
        worst = worst.max((got - expected).abs());
    }
    Verdict::new(
        worst < 1e-8,
        format!("largest |Δu − Δu*| over 100 instances: {worst:.2e}"),
    )
}

/// Equilibrium start with a 10 mV sag on the output so that an unstable
/// loop has something to amplify.
fn sagged(duration: f64) -> Scenario {
    let mut s = Scenario::steady(duration);
    s.initial_vo_offset = -0.01;
    s
}

fn run(p: usize, scn: &Scenario) -> Result<SimTrace, String> {
    simulate(&nominal(), &cfg(p), scn, Discretization::default()).map_err(|e| e.to_string())
}

fn c8_time_domain_agreement() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut rows = Vec::new();
    for p in 11..=20 {
        let poles = assess_design(&nominal(), &cfg(p), &PlantModel::default(), 0.0).unwrap();
        let tr = match run(p, &sagged(0.2)) {
            Ok(t) => t,
            Err(e) => {
                pass = false;
                rows.push(format!("P{p}:error({e})"));
                continue;
            }
        };
        let m = metrics(&tr);
        pass &= m.unstable == !poles.stable;
        let last_duty = *tr.duty.last().unwrap();
        if p == 12 {
            pass &= m.unstable && last_duty == nominal().duty_min && m.duty_railed_fraction > 0.5;
        }
        if p == 13 {
            pass &= !m.unstable && m.steady_state_error <= 0.02 * 70.0;
        }
        rows.push(format!(
            "P{p}:{}/{}",
            if poles.stable { "S" } else { "U" },
            if m.unstable {
                format!("U(d={last_duty:.2})")
            } else {
                "S".into()
            }
        ));
    }
    let elapsed = start.elapsed();
    pass &= within(Duration::from_secs(60), elapsed);
    Verdict::new(
        pass,
        format!(
            "poles/sim: {}; {:.2} s",
            rows.join(" "),
            elapsed.as_secs_f64()
        ),
    )
}

fn split_verdict(tr: &SimTrace, at: usize) -> (bool, bool) {
    let pre = metrics_window(tr, 0, at);
    let post = metrics_window(tr, at, tr.len());
    (pre.unstable, post.unstable)
}

fn c9_scenarios() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;

    // Horizon 11 → 14.
    let scn = sagged(0.3).with_event(0.1, Change::SetHorizon(14));
    match run(11, &scn) {
        Ok(tr) => {
            let (pre, post) = split_verdict(&tr, tr.events[0].sample);
            let ok = pre && !post;
            pass &= ok;
            parts.push(format!("11→14 {}", if ok { "ok" } else { "wrong" }));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("11→14 error ({e})"));
        }
    }

    // Horizon 14 → 11; a 10 mV disturbance just before the switch.
    let scn = Scenario::steady(0.3)
        .with_event(0.0999, Change::DisturbVo(-0.01))
        .with_event(0.1, Change::SetHorizon(11));
    match run(14, &scn) {
        Ok(tr) => {
            let (pre, post) = split_verdict(&tr, tr.events[1].sample);
            let ok = !pre && post;
            pass &= ok;
            parts.push(format!("14→11 {}", if ok { "ok" } else { "wrong" }));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("14→11 error ({e})"));
        }
    }

    // Load current 1 A → 1.5 A at P = 16.
    let mut scn = Scenario::steady(0.3).with_event(0.1, Change::SetLoadCurrent(1.5));
    scn.initial_load_current = Some(1.0);
    match run(16, &scn) {
        Ok(tr) => {
            let m = metrics(&tr);
            let ok = !m.unstable && (2.0..=8.0).contains(&m.overshoot);
            pass &= ok;
            parts.push(format!(
                "load step {} (unstable = {}, overshoot {:.2} V)",
                if ok { "ok" } else { "wrong" },
                m.unstable,
                m.overshoot
            ));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("load step error ({e})"));
        }
    }

    // Reference 60 → 90 → 60 V at P = 16.
    let mut scn = Scenario::steady(0.5)
        .with_event(0.1, Change::SetRef(90.0))
        .with_event(0.3, Change::SetRef(60.0));
    scn.initial_ref = Some(60.0);
    match run(16, &scn) {
        Ok(tr) => {
            let (a, b) = (tr.events[0].sample, tr.events[1].sample);
            let up = metrics_window(&tr, a, b);
            let down = metrics_window(&tr, b, tr.len());
            let ok = !up.unstable
                && !down.unstable
                && up.steady_state_error <= 0.02 * 90.0
                && down.steady_state_error <= 0.02 * 60.0;
            pass &= ok;
            parts.push(format!(
                "reference steps {} (at 90 V: unstable = {}, error {:.2} V; back at 60 V: unstable = {}, error {:.2} V)",
                if ok { "ok" } else { "wrong" },
                up.unstable,
                up.steady_state_error,
                down.unstable,
                down.steady_state_error
            ));
        }
        Err(e) => {
            pass = false;
            parts.push(format!("reference steps error ({e})"));
        }
    }
    Verdict::new(pass, parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Verdict); 9] = [
        ("C1", "horizon boundary, nominal", c1_nominal_boundary),
        ("C2", "horizon boundary, worst case", c2_worst_case_boundary),
        ("C3", "lambda insensitivity", c3_lambda_insensitivity),
        ("C4", "load and reference trends", c4_trends),
        ("C5", "structural pole facts", c5_structural_poles),
        ("C6", "Diophantine identity", c6_diophantine),
        ("C7", "cost-minimization oracle", c7_cost_oracle),
        ("C8", "pole/time-domain agreement", c8_time_domain_agreement),
        ("C9", "scenario reproduction", c9_scenarios),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        if !v.pass {
            failed += 1;
        }
        println!(
            "{status} {id} {name} [{:.2} s]: {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "N/A  C10 hardware execution times and explicit-MPC comparison: excluded, platform-specific"
    );
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
