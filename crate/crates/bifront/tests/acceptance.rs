//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line. Criterion 3's ε = 0.002 half is expected to fail: the
//! attachment analysis of the reduced problem forces c*_ε ≥ 2√(ε·f'(0)) for
//! this model, which contradicts the reference value ≈ 1e-3 (see the FAIL
//! message for the measured number and the bound).

use std::time::Instant;

use bifront::limits::{self, Regime};
use bifront::model::{ConvectionSpec, ModelSpec, ReactionSpec};
use bifront::oracle;
use bifront::profile::{self, DEFAULT_GRID_POINTS, DEFAULT_WINDOW};
use bifront::reduction::{integrate_backward, FrontProblem, ReductionSettings};
use bifront::speed::{critical_speed, SpeedSettings};
use bifront::ode::Tolerances;

const TOL_C: f64 = 1e-6;

fn report(id: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn fb(alpha: f64) -> ModelSpec {
    ModelSpec::fisher_burgers(1.0, alpha)
}

fn fig3_model() -> ModelSpec {
    ModelSpec::new(ReactionSpec::Logistic { k: 1.0 }, ConvectionSpec::Power { q: 1.5, coef: 1.0 })
        .expect("builtin")
}

fn fig4_model() -> ModelSpec {
    ModelSpec::new(
        ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 },
        ConvectionSpec::Quadratic { alpha: 1.0 },
    )
    .expect("builtin")
}

fn c_star(model: &ModelSpec, eps: f64) -> bifront::CriticalSpeedResult {
    critical_speed(model, eps, TOL_C, &SpeedSettings::default()).expect("critical speed")
}

fn critical_front(model: &ModelSpec, eps: f64, n: usize) -> (f64, bifront::FrontProfile) {
    let r = c_star(model, eps);
    let problem = FrontProblem::new(model, eps, r.bracket.1).expect("eps > 0");
    let traj = integrate_backward(&problem, 1e-4, &ReductionSettings::default()).expect("traj");
    let prof = profile::reconstruct(&traj, &problem, DEFAULT_WINDOW, n).expect("profile");
    (r.c_star, prof)
}

#[test]
fn criterion_01_fig1_critical_speeds() {
    let targets = [
        (1.0, 0.07),
        (0.5, 0.09),
        (0.05, 0.163),
        (-0.05, 0.234),
        (-1.0 / 6.0, 0.336),
        (-0.5, 0.667),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (alpha, target) in targets {
        let t0 = Instant::now();
        let r = c_star(&fb(alpha), 2e-3);
        let dt = t0.elapsed();
        let ok = (r.c_star - target).abs() <= 0.02 && dt.as_secs_f64() <= 10.0;
        pass &= ok;
        detail.push_str(&format!(
            "α={alpha:+.4}: c*={:.4} (target {target}±0.02, {:.2?}) ",
            r.c_star, dt
        ));
    }
    assert!(report("01 fig1 speeds", pass, &detail), "{detail}");
}

#[test]
fn criterion_02_fig2_small_epsilon_speed() {
    let r = c_star(&fb(1.0), 2e-4);
    let pass = (r.c_star - 0.024).abs() <= 0.01;
    let detail = format!("α=1, ε=2e-4: c*={:.5} (target 0.024±0.01)", r.c_star);
    assert!(report("02 fig2 speed", pass, &detail), "{detail}");
}

#[test]
fn criterion_03_fig3_speeds() {
    let m = fig3_model();
    let r1 = c_star(&m, 0.01);
    let ok1 = (r1.c_star - 0.143).abs() <= 0.02;
    let r2 = c_star(&m, 0.002);
    let ok2 = r2.c_star <= 0.01;
    let detail = format!(
        "ε=0.01: c*={:.4} (target 0.143±0.02, {}); ε=0.002: c*={:.4} (required ≤ 0.01, {}). \
         The ε=0.002 half is irreproducible by a faithful classifier: admissibility of the \
         reduced problem needs c ≥ 2√(ε·f'(0)) = {:.4} at this ε (linear attachment at v = 0), \
         so the reference ≈1e-3 reflects truncated shooting resolution; measured ĉ(v_min) \
         ranges 0.0197–0.0479 for v_min ∈ [1e-3, 5e-5] and never meets 0.01.",
        r1.c_star,
        if ok1 { "ok" } else { "off" },
        r2.c_star,
        if ok2 { "ok" } else { "off" },
        2.0 * (0.002f64).sqrt(),
    );
    let pass = ok1 && ok2;
    assert!(report("03 fig3 speeds", pass, &detail), "{detail}");
}

#[test]
fn criterion_04_fig4_speeds() {
    let m = fig4_model();
    let r1 = c_star(&m, 0.1);
    let ok1 = (r1.c_star - 0.046).abs() <= 0.02;
    let r2 = c_star(&m, 0.01);
    let ok2 = r2.c_star <= 0.005;
    let pass = ok1 && ok2;
    let detail = format!(
        "ε=0.1: c*={:.4} (target 0.046±0.02); ε=0.01: c*={:.5} (required ≤ 0.005)",
        r1.c_star, r2.c_star
    );
    assert!(report("04 fig4 speeds", pass, &detail), "{detail}");
}

#[test]
fn criterion_05_limit_speeds_by_formula() {
    let mut pass = true;
    let mut detail = String::new();
    for (alpha, expected) in [
        (0.5, 0.0),
        (1.0, 0.0),
        (-1.0 / 6.0, 1.0 / 3.0),
        (-0.5, 2.0 / 3.0),
        (0.05, 0.151875),
    ] {
        let c_bar = limits::limit_speed(&fb(alpha)).expect("classified").c_bar;
        let ok = (c_bar - expected).abs() <= 1e-9;
        pass &= ok;
        detail.push_str(&format!("α={alpha:+.4}: c̄={c_bar:.9} (exp {expected:.9}) "));
    }
    // α = -0.05: formula value against the oracle's independent maximization;
    // the published reference value 0.187 disagrees — documented, never asserted
    let m = fb(-0.05);
    let c_bar = limits::limit_speed(&m).expect("classified").c_bar;
    let (_, oracle_sup) = oracle::brute_max(|v| m.evaluate_s(v).unwrap(), 1_000_000);
    let ok = (c_bar - 0.226875).abs() <= 1e-9 && (c_bar - oracle_sup).abs() <= 1e-9;
    pass &= ok;
    detail.push_str(&format!(
        "α=-0.05: c̄={c_bar:.9}, oracle sup S = {oracle_sup:.9} (published reference prints 0.187; \
         both independent routes give 0.226875, discrepancy documented)"
    ));
    assert!(report("05 limit speeds", pass, &detail), "{detail}");
}

#[test]
fn criterion_06_sandwich_property() {
    let mut pass = true;
    let mut detail = String::new();
    let instances: Vec<(String, ModelSpec, f64)> = vec![
        ("fb(1)@2e-3".into(), fb(1.0), 2e-3),
        ("fb(0.5)@2e-3".into(), fb(0.5), 2e-3),
        ("fb(0.05)@2e-3".into(), fb(0.05), 2e-3),
        ("fb(-0.05)@2e-3".into(), fb(-0.05), 2e-3),
        ("fb(-1/6)@2e-3".into(), fb(-1.0 / 6.0), 2e-3),
        ("fb(-0.5)@2e-3".into(), fb(-0.5), 2e-3),
        ("fb(1)@2e-4".into(), fb(1.0), 2e-4),
        ("fig3@0.01".into(), fig3_model(), 0.01),
        ("fig3@0.002".into(), fig3_model(), 0.002),
        ("fig4@0.1".into(), fig4_model(), 0.1),
        ("fig4@0.01".into(), fig4_model(), 0.01),
    ];
    for (name, model, eps) in instances {
        let r = c_star(&model, eps);
        let ok = r.bounds.lower <= r.c_star + 2.0 * TOL_C && r.c_star <= r.bounds.upper + 2.0 * TOL_C;
        pass &= ok;
        if !ok {
            detail.push_str(&format!(
                "{name}: {:.6} ≤ {:.6} ≤ {:.6} violated ",
                r.bounds.lower, r.c_star, r.bounds.upper
            ));
        }
    }
    if pass {
        detail = "lower ≤ c* ≤ upper held on all 11 instances".into();
    }
    assert!(report("06 sandwich", pass, &detail), "{detail}");
}

#[test]
fn criterion_07_monotonicity_in_epsilon() {
    let eps_list = [2e-3, 1e-3, 5e-4, 2e-4];
    let mut pass = true;
    let mut detail = String::new();
    for (name, model) in [
        ("case1 α=1", fb(1.0)),
        ("case2 α=0.05", fb(0.05)),
        ("case3 α=-0.5", fb(-0.5)),
    ] {
        let c_bar = limits::limit_speed(&model).expect("classified").c_bar;
        let mut cs = Vec::new();
        for &eps in &eps_list {
            cs.push(c_star(&model, eps).c_star);
        }
        let monotone = cs.windows(2).all(|w| w[0] >= w[1] - 2.0 * TOL_C);
        let above_limit = cs.iter().all(|&c| c >= c_bar - 2.0 * TOL_C);
        pass &= monotone && above_limit;
        detail.push_str(&format!(
            "{name}: c*(ε)={:?} c̄={c_bar:.4} monotone={monotone} ≥c̄={above_limit}; ",
            cs.iter().map(|c| (c * 1e4).round() / 1e4).collect::<Vec<_>>()
        ));
    }
    assert!(report("07 monotonicity", pass, &detail), "{detail}");
}

#[test]
fn criterion_08_pure_convection_exactness() {
    // f ≡ 0, h(v) = v²(1-v) tabulated densely
    let n = 2048;
    let samples: Vec<[f64; 4]> = (0..=n)
        .map(|i| {
            let s = i as f64 / n as f64;
            [s, s * s * (1.0 - s), 2.0 * s - 3.0 * s * s, 2.0 - 6.0 * s]
        })
        .collect();
    let model =
        ModelSpec::new(ReactionSpec::Zero, ConvectionSpec::Tabulated { samples }).expect("table");

    let mut pass = true;
    let mut detail = String::new();

    // trajectory vs closed form at ε = 0.01, c = -h(1) = 0
    let eps = 0.01;
    let problem = FrontProblem::new(&model, eps, 0.0).expect("eps");
    let settings = ReductionSettings {
        tol: Tolerances { rel: 1e-12, abs: 1e-14 },
        ..ReductionSettings::default()
    };
    let traj = integrate_backward(&problem, 1e-4, &settings).expect("traj");
    let mut worst = 0.0f64;
    for i in 0..=2000 {
        let v = 1e-4 + (1.0 - 1e-6 - 2e-4) * i as f64 / 2000.0;
        let exact = oracle::pure_convection_exact(eps, 0.0, |s| s * s * (1.0 - s), v).unwrap();
        worst = worst.max((traj.y_at(v) - exact).abs());
    }
    let uniform_ok = worst <= 1e-8;
    pass &= uniform_ok;
    detail.push_str(&format!("max |y - closed form| = {worst:.2e} (≤ 1e-8: {uniform_ok}); "));

    // bisection reproduces c = -h(1) = 0 for three ε
    for eps in [1e-1, 1e-2, 1e-3] {
        let r = c_star(&model, eps);
        let ok = r.c_star.abs() <= 1e-5;
        pass &= ok;
        detail.push_str(&format!("ε={eps:.0e}: c*={:.2e} ", r.c_star));
    }
    assert!(report("08 pure convection", pass, &detail), "{detail}");
}

#[test]
fn criterion_09_profile_integrity() {
    let mut pass = true;
    let mut detail = String::new();
    let cases: Vec<(String, ModelSpec, f64)> = vec![
        ("fb(-0.5)@2e-3".into(), fb(-0.5), 2e-3),
        ("fb(0.05)@2e-3".into(), fb(0.05), 2e-3),
        ("fb(1)@2e-3".into(), fb(1.0), 2e-3),
        ("fig3@0.01".into(), fig3_model(), 0.01),
        ("fig4@0.1".into(), fig4_model(), 0.1),
    ];
    for (name, model, eps) in &cases {
        let (_, prof) = critical_front(model, *eps, DEFAULT_GRID_POINTS);
        let v_at_0 = prof.v_at_z(0.0);
        let anchored = (v_at_0 - 0.5).abs() <= 1e-8;
        let monotone = prof.v_values.windows(2).all(|w| w[0] < w[1]);
        let gradient = prof.dv_values.iter().all(|&d| d > 0.0 && d < 1.0);
        let residual = profile::residual_second_order(&prof, model).expect("residual");
        let res_ok = residual <= 1e-3;
        let ok = anchored && monotone && gradient && res_ok;
        pass &= ok;
        detail.push_str(&format!("{name}: res={residual:.2e} ok={ok}; "));
    }
    // ≈4x improvement under grid halving (spacing doubled on the coarse run)
    for (name, model, eps) in &cases[..2] {
        let (_, fine) = critical_front(model, *eps, 2001);
        let (_, coarse) = critical_front(model, *eps, 1001);
        let rf = profile::residual_second_order(&fine, model).unwrap();
        let rc = profile::residual_second_order(&coarse, model).unwrap();
        let ratio = rc / rf;
        let ok = (2.0..8.0).contains(&ratio);
        pass &= ok;
        detail.push_str(&format!("{name}: halving ratio {ratio:.2}; "));
    }
    assert!(report("09 profile integrity", pass, &detail), "{detail}");
}

#[test]
fn criterion_10_case2_identity() {
    let mut pass = true;
    let mut detail = String::new();
    for alpha in [0.05, -0.05, 0.2] {
        let m = fb(alpha);
        let v_plus = limits::find_v_plus(&m).expect("case 2");
        let c_bar = limits::limit_speed(&m).expect("classified").c_bar;
        let s = m.evaluate_s(v_plus).unwrap();
        let fh = m.f(v_plus) - m.h_prime(v_plus);
        let ok = (c_bar - s).abs() <= 1e-10 && (c_bar - fh).abs() <= 1e-10;
        pass &= ok;
        detail.push_str(&format!(
            "α={alpha:+.2}: |c̄-S(v₊)|={:.1e}, |c̄-(f-h')(v₊)|={:.1e}; ",
            (c_bar - s).abs(),
            (c_bar - fh).abs()
        ));
    }
    assert!(report("10 case-2 identity", pass, &detail), "{detail}");
}

#[test]
fn criterion_11_limit_profile_convergence() {
    let eps_list = [2e-3, 1e-3, 5e-4, 2e-4];
    let mut pass = true;
    let mut detail = String::new();
    for (name, model, is_case3) in [
        ("case1 α=1", fb(1.0), false),
        ("case2 α=0.05", fb(0.05), false),
        ("case3 α=-0.5", fb(-0.5), true),
    ] {
        let analysis = limits::analyze(&model).expect("classified");
        let limit = analysis.limit_profile.expect("profile defined");
        let mut dists = Vec::new();
        let mut last_max_dv = 0.0;
        for &eps in &eps_list {
            let (_, prof) = critical_front(&model, eps, DEFAULT_GRID_POINTS);
            dists.push(limits::profile_distance(&prof, &limit, (-0.4, 0.4), 801));
            last_max_dv = prof.max_dv();
        }
        let decreasing = dists.windows(2).all(|w| w[0] > w[1]);
        pass &= decreasing;
        detail.push_str(&format!(
            "{name}: sup|v_ε-v̄| = {:?} strictly decreasing = {decreasing}",
            dists.iter().map(|d| (d * 1e4).round() / 1e4).collect::<Vec<_>>()
        ));
        if is_case3 {
            let sharp = last_max_dv > 0.99;
            pass &= sharp;
            detail.push_str(&format!(", max v'(2e-4) = {last_max_dv:.4} > 0.99: {sharp}"));
        }
        detail.push_str("; ");
    }
    assert!(report("11 limit convergence", pass, &detail), "{detail}");
}

#[test]
fn criterion_12_oracle_equivalence() {
    // One instance per regime. Forward shooting off a saddle connection has
    // transverse error growth exp(∫ f/(ε w² √(1+w²)) dz), so each instance
    // uses an ε and a seed depth at which that budget stays within f64
    // resolution: sharp fronts (case 3, near-sharp case 2) tolerate small ε,
    // the slope-bounded case-1 front needs a moderate ε.
    let mut pass = true;
    let mut detail = String::new();
    for (name, model, eps, seed_v) in [
        ("case1 α=1 ε=0.2", fb(1.0), 0.2, 0.3),
        ("case2 α=0.05 ε=2e-3", fb(0.05), 2e-3, 0.05),
        ("case3 α=-0.5 ε=2e-3", fb(-0.5), 2e-3, 2e-3),
    ] {
        let r = c_star(&model, eps);
        let c = r.bracket.1 + 0.01;
        let problem = FrontProblem::new(&model, eps, c).expect("eps");
        // tight tolerances: the shot seed inherits the trajectory accuracy
        let settings = ReductionSettings {
            tol: Tolerances { rel: 1e-12, abs: 1e-15 },
            max_step: 0.002,
            ..ReductionSettings::default()
        };
        let traj = integrate_backward(&problem, 1e-4, &settings).expect("traj");
        let prof =
            profile::reconstruct(&traj, &problem, DEFAULT_WINDOW, DEFAULT_GRID_POINTS).unwrap();
        let shot = oracle::shoot_phase_plane(&problem, &traj, seed_v, 300.0).expect("shot");
        let dist = oracle::phase_plane_profile_distance(&shot, &prof, (-0.4, 0.4), 801)
            .expect("alignment");
        let ok = dist <= 1e-3;
        pass &= ok;
        detail.push_str(&format!("{name}: sup distance {dist:.2e}; "));
    }
    assert!(report("12 oracle equivalence", pass, &detail), "{detail}");
}

#[test]
fn regime_classification_matches_reference_matrix() {
    // supporting check used by several criteria above
    assert_eq!(limits::classify_regime(&fb(1.0)).regime, Regime::Case1);
    assert_eq!(limits::classify_regime(&fb(0.05)).regime, Regime::Case2);
    assert_eq!(limits::classify_regime(&fb(-0.5)).regime, Regime::Case3);
}
