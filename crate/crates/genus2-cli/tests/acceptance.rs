//! Acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use genus2::cover::{nu, pstar, reconstruct_lifts, ut_fiber, ut_project};
use genus2::cp3ref::{
    act, grad_norm_cp3, kappa_cp3, random_point, random_quadric_point, random_real_point,
    random_so4, CP3Point, C64,
};
use genus2::lagr::{
    fiber_type, intersect_heegaard, l_param, piece_kappa, psi_param, sphere_a, Corner, FiberType,
    IntersectionReport, LagrParam, Multicurve, SolverOptions,
};
use genus2::pillow::{
    corner_seed, find_critical_points, flow_alpha, goldman_w, k_eval, k_grad, morse_index,
    random_level_zero_point, StepControl, TerminalFlag, CORNERS, ORIGIN,
};
use genus2::quat::{commutator, random_unit};
use genus2::repvar::{conj_equivalent, random_nonabelian_rep, reps_equivalent};
use genus2::suite::fiber_failures;
use genus2::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rng(idx: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_97 + idx)
}

fn c1_trace_identity() -> Result<Outcome> {
    let mut rng = rng(1);
    let n = 100_000;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
        let lhs = (a * b).re() + (a.inv() * b).re();
        worst = worst.max((lhs - 2.0 * a.re() * b.re()).abs());
    }
    outcome(
        worst < 1e-12,
        format!("{n} pairs, max defect {worst:.2e} (tol 1e-12)"),
    )
}

fn c2_kappa_is_k_of_w() -> Result<Outcome> {
    let mut rng = rng(2);
    let n = 100_000;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
        worst = worst.max((k_eval(goldman_w(a, b)) - commutator(a, b).re()).abs());
    }
    outcome(
        worst < 1e-10,
        format!("{n} pairs, max defect {worst:.2e} (tol 1e-10)"),
    )
}

fn c3_critical_points() -> Result<Outcome> {
    let mut ok = true;
    let mut counts = Vec::new();
    let mut grad = 0.0f64;
    for g in [8, 12, 16] {
        let pts = find_critical_points(g, 1e-12)?;
        counts.push(pts.len());
        ok &= pts.len() == 5;
        ok &= CORNERS
            .iter()
            .chain([ORIGIN].iter())
            .all(|c| pts.iter().any(|p| p.dist(*c) < 1e-9));
        for p in &pts {
            grad = grad.max(k_grad(*p).norm());
            if p.dist(ORIGIN) > 1e-9 {
                ok &= morse_index(*p) == 1;
            }
        }
    }
    ok &= grad < 1e-10;
    outcome(
        ok,
        format!("counts {counts:?} at grid_n 8/12/16, max |grad k| {grad:.2e}, corner index 1"),
    )
}

fn c4_flow() -> Result<Outcome> {
    let mut rng = rng(4);
    let ctrl = StepControl::default();
    let (mut level, mut min_exit) = (0.0f64, f64::INFINITY);
    let (mut corner_ok, mut boundary_ok) = (0, 0);
    for n in 0..100 {
        let (p0, expect) = if n < 4 {
            (corner_seed(n), TerminalFlag::Corner)
        } else {
            (random_level_zero_point(&mut rng)?, TerminalFlag::Boundary)
        };
        let line = flow_alpha(p0, 1.0, &ctrl)?;
        level = level.max(line.level_defect());
        if line.terminal_flag == expect {
            if expect == TerminalFlag::Corner {
                corner_ok += 1;
            } else if line.exit_gradient.is_some_and(|g| g > 1e-6) {
                boundary_ok += 1;
                min_exit = min_exit.min(line.exit_gradient.unwrap_or(0.0));
            }
        }
    }
    outcome(
        level < 1e-6 && corner_ok == 4 && boundary_ok == 96,
        format!(
            "100 lines, max |k - t| {level:.2e}, {corner_ok}/4 Corner, {boundary_ok}/96 Boundary, min exit |grad k| {min_exit:.3e}"
        ),
    )
}

fn c5_cover_fibers() -> Result<Outcome> {
    let mut rng = rng(5);
    let n = 10_000;
    let (mut reproj, mut slack, mut bad) = (0.0f64, f64::INFINITY, 0);
    for _ in 0..n {
        let v: Vec<f64> = (0..6)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v: Vec<f64> = v.iter().map(|x| x / len).collect();
        let f = ut_fiber(&v)?;
        if f.points.is_empty() || f.points.len() > 4 || !f.is_single_tau_orbit(1e-9) {
            bad += 1;
        }
        for p in &f.points {
            let back = ut_project(p)?;
            reproj = reproj.max(
                back.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max),
            );
        }
        slack = slack.min(
            f.bounds
                .iter()
                .map(|b| 1.0 - b)
                .fold(f64::INFINITY, f64::min),
        );
    }
    outcome(
        bad == 0 && reproj < 1e-9 && slack >= -1e-10,
        format!("{n} vectors, {bad} not one tau-orbit, reprojection {reproj:.2e}, min slack {slack:.2e}"),
    )
}

fn c6_reconstruction() -> Result<Outcome> {
    let mut rng = rng(6);
    let n = 10_000;
    let (mut round, mut bad) = (0.0f64, 0);
    for _ in 0..n {
        let rho = random_nonabelian_rep(&mut rng);
        let (span, lifts) = reconstruct_lifts(&rho)?;
        if span.dim != 2
            || lifts.len() != 2
            || !conj_equivalent(&nu(&lifts[0]).x, &lifts[1].x, 1e-9).equivalent
        {
            bad += 1;
            continue;
        }
        for s in &lifts {
            round = round.max(reps_equivalent(&rho, &pstar(s)?, 1.0).residual);
        }
    }
    outcome(
        bad == 0 && round < 1e-8,
        format!("{n} reps, {bad} without dim 2 and two nu-related lifts, round-trip residual {round:.2e}"),
    )
}

fn c7_l_family() -> Result<Outcome> {
    let mut rng = rng(7);
    let n = 10_000;
    let (mut ginv, mut kap, mut gfail) = (0.0f64, 0.0f64, 0);
    for _ in 0..n {
        let p = LagrParam::new(
            rng.random_range(-TAU..TAU),
            rng.random_range(-TAU..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        );
        let rho = l_param(p);
        kap = kap.max((rho.kappa()? - (p.gamma - p.theta).cos()).abs());
        for q in [p.sigma0(), p.sigma1(), p.sigma2()] {
            let m = reps_equivalent(&rho, &l_param(q), 1e-8);
            ginv = ginv.max(m.residual);
            gfail += usize::from(!m.equivalent);
        }
    }
    let circles = [Corner::Xi0Pi, Corner::XiPi0].iter().all(|c| {
        let q = c.coord();
        fiber_type(q.gamma, q.theta) == FiberType::Circle
    });
    let fibers = fiber_failures(&mut rng);
    outcome(
        gfail == 0 && ginv < 1e-8 && kap < 1e-12 && circles && fibers == 0,
        format!(
            "3x{n} G-images, residual {ginv:.2e}; kappa defect {kap:.2e}; {fibers} fiber failures on 10 points plus 2 circle corners"
        ),
    )
}

fn summarize(r: &IntersectionReport) -> String {
    format!(
        "{} points, {} circles, margin {:.3e}, alpha defect {:.2e}",
        r.isolated_points.len(),
        r.circle_components.len(),
        r.min_margin(),
        r.max_alpha_defect()
    )
}

fn c8_intersection() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for grid in [16, 32] {
        let opts = SolverOptions {
            grid: [grid; 3],
            ..SolverOptions::default()
        };
        let r = intersect_heegaard(0.05, &opts)?;
        ok &= r.isolated_points.len() == 8
            && r.circle_components.is_empty()
            && r.ambiguous_pairs == 0
            && r.min_margin() > 1e-4
            && r.max_alpha_defect() < 1e-6;
        parts.push(format!("eps 0.05 grid {grid}: {}", summarize(&r)));
        let z = intersect_heegaard(0.0, &opts)?;
        ok &= z.circle_components.len() == 4 && z.isolated_points.is_empty();
        parts.push(format!(
            "eps 0 grid {grid}: {} circles",
            z.circle_components.len()
        ));
    }
    for eps in [0.03, 0.08] {
        let r = intersect_heegaard(eps, &SolverOptions::default())?;
        ok &= r.isolated_points.len() == 8 && r.min_margin() > 1e-4 && r.max_alpha_defect() < 1e-6;
        parts.push(format!("eps {eps}: {} points", r.isolated_points.len()));
    }
    outcome(ok, parts.join("; "))
}

fn c9_psi_spheres() -> Result<Outcome> {
    let mut rng = rng(9);
    let n = 10_000;
    let (mut kap, mut inv) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let g = rng.random_range(0.0..=PI);
        let x = psi_param(v[0], v[1], v[2], v[3], g)?;
        kap = kap.max((x.kappa()? - 1.0).abs());
        let y = psi_param(-v[0], -v[1], -v[2], -v[3], g)?;
        let z = psi_param(v[0], v[1], -v[2], -v[3], PI - g)?;
        inv = inv
            .max(reps_equivalent(&x, &y, 1.0).residual)
            .max(reps_equivalent(&x, &z, 1.0).residual);
    }
    let mut rel = 0.0f64;
    for a in 0..64 {
        let alpha = FRAC_PI_2 * a as f64 / 63.0;
        for t in 0..64 {
            let theta = TAU * t as f64 / 64.0;
            rel = rel
                .max(sphere_a(1, alpha, theta)?.relator_defect())
                .max(sphere_a(2, alpha, theta)?.relator_defect());
        }
    }
    let mut glue = 0.0f64;
    for t in 0..32 {
        let theta = TAU * t as f64 / 32.0;
        glue = glue.max(
            reps_equivalent(
                &sphere_a(1, FRAC_PI_2, theta)?,
                &sphere_a(2, FRAC_PI_2, -theta)?,
                1.0,
            )
            .residual,
        );
    }
    outcome(
        kap < 1e-10 && inv < 1e-8 && rel < 1e-9 && glue < 1e-8,
        format!("Psi kappa {kap:.2e}, involutions {inv:.2e}; A1/A2 relator {rel:.2e}, gluing {glue:.2e}"),
    )
}

fn c10_cp3() -> Result<Outcome> {
    let mut rng = rng(10);
    let z = C64::new(0.0, 0.0);
    let real = CP3Point::new([C64::new(1.0, 0.0), z, z, z])?;
    let quad = CP3Point::new([C64::new(1.0, 0.0), C64::new(0.0, 1.0), z, z])?;
    let exact = kappa_cp3(&real) == -1.0 && kappa_cp3(&quad) == 1.0;
    let mut so4 = 0.0f64;
    for _ in 0..10_000 {
        let g = random_so4(&mut rng);
        let p = random_point(&mut rng);
        so4 = so4.max((kappa_cp3(&act(&g, &p)) - kappa_cp3(&p)).abs());
    }
    let (mut mid, mut done) = (f64::INFINITY, 0);
    while done < 100_000 {
        let p = random_point(&mut rng);
        if kappa_cp3(&p).abs() <= 0.9 {
            mid = mid.min(grad_norm_cp3(&p));
            done += 1;
        }
    }
    let mut ext = 0.0f64;
    for k in 0..1000 {
        let p = if k % 2 == 0 {
            random_real_point(&mut rng)
        } else {
            random_quadric_point(&mut rng)
        };
        ext = ext.max(grad_norm_cp3(&p));
    }
    outcome(
        exact && so4 < 1e-12 && mid > 1e-3 && ext < 1e-6,
        format!("extremal values exact: {exact}; SO(4) defect {so4:.2e}; mid-level min |grad| {mid:.3e}; extremal max |grad| {ext:.2e}"),
    )
}

fn c11_perturbations() -> Result<Outcome> {
    let grid = 400;
    let (mut c, mut e) = (0.0f64, 0.0f64);
    for eps in [0.01, 0.05, 0.1] {
        let ex = Multicurve::preset("example-c", eps, grid)?;
        for (p, k) in ex.pieces[0].samples.iter().zip(piece_kappa(&ex.pieces[0])) {
            c = c.max((k - (FRAC_PI_2 - 2.0 * eps * p[0].sin()).cos()).abs());
        }
        let ex = Multicurve::preset("example-e", eps, grid)?;
        for (j, k) in piece_kappa(&ex.pieces[0]).into_iter().enumerate() {
            let t = TAU * j as f64 / grid as f64;
            e = e.max((k - (2.0 * eps * t.sin()).cos()).abs());
        }
    }
    outcome(
        c < 1e-10 && e < 1e-10,
        format!("example (c) defect {c:.2e}, example (e) defect {e:.2e}"),
    )
}

fn c12_determinism() -> Result<Outcome> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_genus2"))
            .args(["verify", "all", "--seed", "7"])
            .output()
    };
    let (a, b) = match (run(), run()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("could not run binary: {e}")),
    };
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(
        same && a.status.success() && b.status.success(),
        format!(
            "{} bytes, identical: {same}, exit {:?}",
            a.stdout.len(),
            a.status.code()
        ),
    )
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 12] = [
        ("trace identity", secs(1), c1_trace_identity),
        ("kappa = k o W", secs(1), c2_kappa_is_k_of_w),
        ("critical-point census", secs(10), c3_critical_points),
        ("flow trivialization", secs(30), c4_flow),
        ("branched-cover fibers", secs(30), c5_cover_fibers),
        ("six-tuple reconstruction", secs(60), c6_reconstruction),
        ("L-family contracts", None, c7_l_family),
        ("Heegaard intersection", secs(300), c8_intersection),
        ("Psi and A1/A2", None, c9_psi_spheres),
        ("kappa_CP3 model", None, c10_cp3),
        ("perturbation formulas", None, c11_perturbations),
        ("determinism", None, c12_determinism),
    ];
    let mut failed = 0;
    for (n, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let (passed, detail) = match res {
            Ok(o) => (o.passed && limit.is_none_or(|l| took <= l), o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        let limit = limit.map_or("no limit".to_string(), |l| {
            format!("limit {} s", l.as_secs())
        });
        println!(
            "{} {:>2} {name}: {detail} [{:.2} s, {limit}]",
            if passed { "PASS" } else { "FAIL" },
            n + 1,
            took.as_secs_f64(),
        );
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
