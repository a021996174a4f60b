//! Acceptance suite: prints one PASS/FAIL line per criterion with the
//! measured values, tolerances and runtime against its budget.
//!
//! The process exits nonzero when a criterion fails, unless the failure is
//! listed in `KNOWN_UNATTAINABLE` with its reason (the line still reads
//! FAIL).

use std::path::PathBuf;
use std::time::{Duration, Instant};

use hyperflow::convergence::{converge_space, converge_time, StudyResult};
use hyperflow::diagnostics::convergence_rates;
use hyperflow::integrator::contact::{contact_force, detect, gap};
use hyperflow::integrator::{Body, ContactSettings};
use hyperflow::materials::{Law, Material, StVKParams, TaitParams};
use hyperflow::mesh::{GridSpec, Mesh};
use hyperflow::run::{contact_resultants, run_scenario};
use hyperflow::scenario::{AnySystem, Scenario};
use hyperflow::verify::{
    frame_indifference, free_body_drift, free_mooney_block, free_stvk_block, gradient_consistency, kinematic_identities,
};
use nalgebra::Vector2;

/// Criteria whose literal statement cannot hold, with the reason printed
/// next to the FAIL line.
const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(
    10,
    "the reference 3D time-study errors (5.23e-4, 2.55e-4, 1.18e-4, 5.035e-5) give rates 1.036/1.112/1.229, \
     not the tabulated 1.036/1.12/1.29",
)];

struct Outcome {
    id: u8,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn scenario(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    Scenario::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn rates_text(r: &StudyResult) -> String {
    match r.report() {
        Ok(rep) => {
            let errs: Vec<String> = rep.rows.iter().map(|(_, e)| format!("{e:.3e}")).collect();
            let rates: Vec<String> = rep.rates.iter().map(|x| format!("{x:.4}")).collect();
            format!("errors [{}], rates [{}]", errs.join(", "), rates.join(", "))
        }
        Err(e) => format!("study failed: {e}"),
    }
}

fn criterion_1() -> (bool, String) {
    let (f2, c2) = kinematic_identities::<2>(10_000, 101);
    let (f3, c3) = kinematic_identities::<3>(10_000, 102);
    let worst = f2.max(c2).max(f3).max(c3);
    (
        worst <= 1e-10,
        format!(
            "2D |detF-J|/|J| {f2:.2e}, |detC-J2|/J2 {c2:.2e}; 3D {f3:.2e}, {c3:.2e}; tol 1e-10 over 1e4 cells each"
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let (c2, w2) = frame_indifference::<2>(100, 201);
    let (c3, w3) = frame_indifference::<3>(100, 202);
    let worst = c2.max(w2).max(c3).max(w3);
    (
        worst <= 1e-12,
        format!("max entrywise C change 2D {c2:.2e} 3D {c3:.2e}; energy change / max(|W|,1) 2D {w2:.2e} 3D {w3:.2e}; tol 1e-12"),
    )
}

fn criterion_3() -> (bool, String) {
    let [internal, penalty, contact] = gradient_consistency(10, 301).expect("admissible configurations");
    (
        internal.max(penalty).max(contact) < 1e-5,
        format!("relative FD mismatch: internal {internal:.2e}, incompressibility {penalty:.2e}, contact {contact:.2e}; tol 1e-5"),
    )
}

fn criterion_4() -> (bool, String) {
    let d2 = free_body_drift(free_stvk_block().unwrap(), 1000, 1e-4, 401).expect("2D run");
    let d3 = free_body_drift(free_mooney_block().unwrap(), 1000, 1e-4, 402).expect("3D run");
    let ok = d2.linear <= 1e-10 && d3.linear <= 1e-10 && d2.angular <= 1e-8 && d3.angular <= 1e-8;
    (
        ok,
        format!(
            "StVK linear {:.2e} angular {:.2e}; Mooney-Rivlin linear {:.2e} angular {:.2e}; tol 1e-10 / 1e-8",
            d2.linear, d2.angular, d3.linear, d3.angular
        ),
    )
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_5() -> (bool, String) {
    let mut s = scenario("2d_cantilever.ini");
    s.output.stride = 1;
    let out = run_scenario(&s, None).expect("cantilever run");
    let max_rel = out.rows.iter().map(|r| r.relative_energy.abs()).fold(0.0, f64::max);
    let half: Vec<_> = out.rows.iter().filter(|r| r.time >= 0.5 * s.time.horizon()).collect();
    let t: Vec<f64> = half.iter().map(|r| r.time).collect();
    let e: Vec<f64> = half.iter().map(|r| r.relative_energy).collect();
    // Trend of the relative energy across the final half.
    let drift = slope(&t, &e) * (t[t.len() - 1] - t[0]);
    let ups = e.windows(2).filter(|w| w[1] > w[0]).count();
    let downs = e.windows(2).filter(|w| w[1] < w[0]).count();
    let ok = max_rel <= 0.05 && drift.abs() <= 0.01 && ups > 0 && downs > 0;
    (
        ok,
        format!(
            "{} steps, max |rel. energy| {max_rel:.2e} (tol 5e-2); final-half trend {drift:.2e} (tol 1e-2); \
             {ups} rises and {downs} falls in the final half",
            s.time.steps
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let mut s = scenario("2d_cantilever.ini");
    s.set_spacing(0.05).unwrap();
    let r = converge_time(&s, &[2e-4, 1e-4, 5e-5, 2.5e-5], 6.25e-6, Some(0.1)).expect("valid study");
    let ok = r
        .report()
        .map(|rep| rep.errors_decrease() && rep.rates.iter().all(|x| (0.9..=1.6).contains(x)))
        .unwrap_or(false);
    (ok, format!("{}; rates must lie in [0.9, 1.6] with decreasing errors", rates_text(&r)))
}

fn criterion_7() -> (bool, String) {
    let s = scenario("2d_cantilever.ini");
    let r = converge_space(&s, &[0.1, 0.05, 0.025], 0.0125, Some(0.1)).expect("valid study");
    let ok = r.report().map(|rep| *rep.rates.last().unwrap() >= 1.4).unwrap_or(false);
    (ok, format!("{}; final rate must be >= 1.4", rates_text(&r)))
}

fn criterion_8() -> (bool, String) {
    let s = scenario("3d_mooney_block.ini");
    let r = converge_time(&s, &[2e-4, 1e-4, 5e-5], 1.25e-5, Some(0.1)).expect("valid study");
    let ok = r.report().map(|rep| rep.rates.iter().all(|x| (0.9..=1.6).contains(x))).unwrap_or(false);
    (ok, format!("{}; rates must lie in [0.9, 1.6]", rates_text(&r)))
}

/// Single fluid node resting on a horizontal segment: returns the predicted
/// gap `-W/(K L)`, the measured gap and the relative force mismatch.
fn static_contact_oracle(weight: f64, stiffness: f64, seg: f64) -> (f64, f64, f64) {
    let depth = weight / (stiffness * seg * seg);
    let stvk = Law::StVenantKirchhoff(StVKParams::new(945.0, 4.5e6, 0.4999).unwrap());
    let tait = Law::Tait(TaitParams::new(997.0, 6.0, 3.041e4, 3.0397e4).unwrap());
    let solid_mesh = Mesh::new(GridSpec::new([3, 2], [seg, seg])).unwrap();
    let top = seg;
    let fluid_mesh =
        Mesh::new(GridSpec::new([2, 2], [1.25 * seg, 0.75 * seg]).with_origin(Vector2::new(0.25 * seg, top - depth)))
            .unwrap();
    let bodies = vec![
        Body::new("solid", solid_mesh, Material::new(stvk, 0.0).unwrap(), Vector2::zeros(), &[]).unwrap(),
        Body::new("fluid", fluid_mesh, Material::new(tait, 0.0).unwrap(), Vector2::zeros(), &[]).unwrap(),
    ];
    let pairs = detect(&bodies, &ContactSettings { stiffness, families: vec![1, 2, 3, 4] });
    let mut f = vec![vec![Vector2::zeros(); 6], vec![Vector2::zeros(); 4]];
    contact_force(&pairs, &bodies, &mut f);
    let measured = pairs.iter().filter(|p| p.fluid_node == 0).map(|p| gap(p, &bodies)).fold(f64::INFINITY, f64::min);
    // Both bottom fluid nodes sit over their own segment at the same depth.
    let mismatch = (0..2).map(|n| (f[1][n] - Vector2::new(0.0, weight)).norm() / weight).fold(0.0, f64::max);
    (-weight / (stiffness * seg), measured, mismatch)
}

fn criterion_9() -> (bool, String) {
    let mut s = scenario("2d_container.ini");
    s.set_horizon(0.1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_scenario(&s, Some(dir.path())).expect("container run");
    let min_psi = out.min_psi.expect("contact pairs present");

    let fluid = s.fluid.as_ref().unwrap();
    let (rho, g, k0) = (fluid.density, s.gravity[1], s.contact.stiffness);
    let h = (fluid.grid.counts[1] - 1) as f64 * fluid.grid.spacing[1];
    let ds = fluid.grid.spacing[0];
    let delta = 2.0 * (2.0 * rho * g * h * ds / k0).sqrt();

    let seg = s.solids[0].grid.spacing[0];
    let (psi_s, psi_measured, force_mismatch) = static_contact_oracle(rho * g * h * ds, k0, seg);
    let oracle_ok = (psi_measured - psi_s).abs() <= 1e-9 * psi_s.abs() && force_mismatch <= 1e-9;

    // Action and reaction at every 10th step.
    let AnySystem::Two(mut sys) = s.build().unwrap() else { unreachable!() };
    let mut worst_balance = 0.0f64;
    for k in 1..=s.time.steps {
        sys.advance().expect("container step");
        if k % 10 == 0 {
            let (ff, fs) = contact_resultants(&sys);
            let scale = ff.norm().max(fs.norm());
            if scale > 0.0 {
                worst_balance = worst_balance.max((ff + fs).norm() / scale);
            }
        }
    }

    let header = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    let header = header.lines().next().unwrap_or_default().to_string();
    let columns_ok =
        ["J1", "J2", "J3", "min_psi", "right_norm", "left_norm"].iter().all(|c| header.split(',').any(|h| h == *c));

    let ok = min_psi >= -delta && oracle_ok && worst_balance <= 1e-10 && columns_ok;
    (
        ok,
        format!(
            "{} steps; min psi {min_psi:.3e} vs -delta {:.3e}; static oracle psi {psi_s:.3e} (measured {psi_measured:.3e}, \
             force mismatch {force_mismatch:.1e}); contact action/reaction {worst_balance:.1e} (tol 1e-10); \
             resultant and momentum columns {}",
            s.time.steps,
            -delta,
            if columns_ok { "present" } else { "missing" }
        ),
    )
}

/// Reference rate matches when it agrees at its tabulated precision, capped
/// at three decimals.
fn matches_reference(computed: f64, reference: &str) -> bool {
    let decimals = reference.split('.').nth(1).map_or(0, str::len).min(3) as i32;
    (computed - reference.parse::<f64>().unwrap()).abs() <= 0.5 * 10f64.powi(-decimals) + 1e-12
}

fn criterion_10() -> (bool, String) {
    let tables: [(&str, [f64; 4], [f64; 4], [&str; 3]); 4] = [
        ("2D time", [2e-4, 1e-4, 5e-5, 2.5e-5], [1.3e-3, 6.47e-4, 3.02e-4, 1.29e-4], ["1.007", "1.1", "1.23"]),
        ("2D space", [0.1, 0.05, 0.025, 0.0125], [0.0481, 0.0151, 0.0044, 0.0012], ["1.6715", "1.779", "1.8745"]),
        ("3D time", [2e-4, 1e-4, 5e-5, 2.5e-5], [5.23e-4, 2.55e-4, 1.18e-4, 5.035e-5], ["1.036", "1.12", "1.29"]),
        ("3D space", [0.1, 0.05, 0.025, 0.0125], [0.0375, 0.0284, 0.0177, 0.008], ["0.40", "0.682", "1.1457"]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, params, errors, expected) in tables {
        let rep = convergence_rates(&params, &errors).expect("valid table");
        let row_ok = rep.rates.iter().zip(expected).all(|(c, p)| matches_reference(*c, p));
        ok &= row_ok;
        let got: Vec<String> = rep.rates.iter().map(|r| format!("{r:.4}")).collect();
        parts.push(format!(
            "{name} [{}] vs [{}] {}",
            got.join(", "),
            expected.join(", "),
            if row_ok { "ok" } else { "MISMATCH" }
        ));
    }
    (ok, parts.join("; "))
}

fn main() {
    type Criterion = fn() -> (bool, String);
    let criteria: [(u8, &str, Criterion, u64); 10] = [
        (1, "kinematic identities", criterion_1, 5),
        (2, "frame indifference", criterion_2, 5),
        (3, "gradient consistency", criterion_3, 30),
        (4, "exact momentum conservation", criterion_4, 120),
        (5, "near-energy conservation, 2D cantilever", criterion_5, 600),
        (6, "time convergence, 2D", criterion_6, 900),
        (7, "space convergence, 2D", criterion_7, 1200),
        (8, "time convergence, 3D", criterion_8, 1200),
        (9, "FSI smoke test, 2D container", criterion_9, 600),
        (10, "reference rate rows", criterion_10, 1),
    ];
    // `cargo test -- <filter>` style selection by criterion number.
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut outcomes = Vec::new();
    for (id, title, run, budget) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (passed, detail) = run();
        outcomes.push(Outcome {
            id,
            title,
            passed,
            detail,
            elapsed: start.elapsed(),
            budget: Duration::from_secs(budget),
        });
    }
    let mut blocking = 0;
    for o in &outcomes {
        let in_budget = o.elapsed <= o.budget;
        let passed = o.passed && in_budget;
        println!(
            "criterion {:>2} {}: {} | {} | runtime {:.2} s (budget {} s)",
            o.id,
            o.title,
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs()
        );
        if !passed {
            match KNOWN_UNATTAINABLE.iter().find(|(id, _)| *id == o.id) {
                Some((_, reason)) if in_budget => println!("             known unattainable: {reason}"),
                _ => blocking += 1,
            }
        }
    }
    let failed = outcomes.iter().filter(|o| !(o.passed && o.elapsed <= o.budget)).count();
    println!(
        "acceptance: {} criteria, {} passed, {failed} failed ({blocking} unexpected)",
        outcomes.len(),
        outcomes.len() - failed
    );
    if blocking > 0 {
        std::process::exit(1);
    }
}
