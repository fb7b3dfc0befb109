//! Property suites behind `genus2 verify`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::config::RunConfig;
use crate::cover::{nu, pstar, reconstruct_lifts, span_report, tau, ut_fiber, ut_project, UTPoint};
use crate::cp3ref::{
    act, grad_norm_cp3, kappa_cp3, random_point, random_quadric_point, random_real_point,
    random_so4, sample_level, CP3Point,
};
use crate::error::{Error, Result};
use crate::lagr::{
    self, intersect_heegaard, l_param, piece_kappa, psi_param, sphere_a, twist_flow, xi,
    CurvePiece, FiberType, LagrParam, Multicurve, SolverOptions,
};
use crate::pillow::{
    corner_seed, find_critical_points, flow_alpha, flow_to_level, goldman_w, k_eval, k_grad,
    lambda_coords, morse_index, random_level_zero_point, StepControl, TerminalFlag, CORNERS,
    ORIGIN,
};
use crate::quat::{exp_im, random_s2, random_unit, Quat};
use crate::repvar::{
    conj_equivalent, fingerprint, orbit_type, random_nonabelian_rep, random_sixtuple,
    reps_equivalent, OrbitType, SurfaceRep,
};

pub const SUITES: [&str; 6] = ["quat", "repvar", "pillow", "cover", "lagr", "cp3"];

/// One line of a suite report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_defect: f64,
    pub tol: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    /// Passes when `max_defect < tol`.
    fn bound(name: &str, samples: usize, max_defect: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            samples,
            max_defect,
            tol,
            passed: max_defect < tol,
            note: String::new(),
        }
    }

    /// Passes when no sample failed; the defect is the failure count.
    fn count(name: &str, samples: usize, failures: usize) -> Self {
        Check {
            name: name.into(),
            samples,
            max_defect: failures as f64,
            tol: 1.0,
            passed: failures == 0,
            note: String::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    fn and(mut self, ok: bool) -> Self {
        self.passed &= ok;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    /// Plain-text rendering, one line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}", self.seed);
        for s in &self.suites {
            let _ = writeln!(out, "suite {}", s.suite);
            for c in &s.checks {
                let _ = write!(
                    out,
                    "  {} {:<34} samples={:<8} max_defect={:.3e} tol={:.1e}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.samples,
                    c.max_defect,
                    c.tol
                );
                if !c.note.is_empty() {
                    let _ = write!(out, "  {}", c.note);
                }
                out.push('\n');
            }
        }
        let total: usize = self.suites.iter().map(|s| s.checks.len()).sum();
        let failed: usize = self
            .suites
            .iter()
            .flat_map(|s| &s.checks)
            .filter(|c| !c.passed)
            .count();
        let _ = writeln!(out, "{} checks, {} failed", total, failed);
        out
    }
}

/// Runs one suite by name, or all of them for `"all"`.
pub fn run(name: &str, cfg: &RunConfig) -> Result<Report> {
    let names: Vec<&str> = if name == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&name) {
        vec![name]
    } else {
        return Err(Error::Domain(format!(
            "unknown suite {name:?}; expected one of {} or all",
            SUITES.join(", ")
        )));
    };
    let suites = names
        .iter()
        .map(|n| run_one(n, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        seed: cfg.seed,
        suites,
    })
}

fn suite_rng(cfg: &RunConfig, name: &str) -> ChaCha8Rng {
    let idx = SUITES.iter().position(|s| *s == name).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(
        cfg.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(idx),
    )
}

fn run_one(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    let mut rng = suite_rng(cfg, name);
    let checks = match name {
        "quat" => quat_suite(cfg, &mut rng),
        "repvar" => repvar_suite(cfg, &mut rng)?,
        "pillow" => pillow_suite(cfg, &mut rng)?,
        "cover" => cover_suite(cfg, &mut rng)?,
        "lagr" => lagr_suite(cfg, &mut rng)?,
        "cp3" => cp3_suite(cfg, &mut rng)?,
        _ => unreachable!("suite names are checked by run"),
    };
    Ok(SuiteReport {
        suite: name.into(),
        checks,
    })
}

fn gaussian_quat(rng: &mut ChaCha8Rng) -> Quat {
    Quat::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

fn quat_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let n = cfg.samples("quat", 100_000);
    let (mut trace, mut conj, mut pd, mut hom) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut nonpositive = 0;
    for _ in 0..n {
        let a = random_unit(rng);
        let b = random_unit(rng);
        let lhs = (a * b).re() + (a.inv() * b).re();
        trace = trace.max((lhs - 2.0 * a.re() * b.re()).abs());
        let q = gaussian_quat(rng);
        conj = conj.max((q.conj().re() - q.re()).abs());
        let ip = (q.conj() * q).re();
        if ip <= 0.0 {
            nonpositive += 1;
        }
        pd = pd.max((ip - q.norm_sq()).abs() / q.norm_sq());
        let p = random_s2(rng);
        let (s, t) = (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        hom = hom.max((exp_im(p, s) * exp_im(p, t)).dist(exp_im(p, s + t)));
    }
    vec![
        Check::bound("trace identity", n, trace, 1e-12),
        Check::bound("re(conj a) = re(a)", n, conj, 1e-15),
        Check::bound("<A,A> = |A|^2 > 0", n, pd, 1e-14).and(nonpositive == 0),
        Check::bound("exp_im homomorphism", n, hom, 1e-12),
    ]
}

fn repvar_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.samples("repvar", 10_000);
    let (mut kap, mut conj, mut fp, mut nu_def, mut even) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut conj_fail = 0;
    let mut unseparated = 0;
    for _ in 0..n {
        let rho = random_nonabelian_rep(rng);
        let g = random_unit(rng);
        let other = rho.conjugate_by(g);
        kap = kap.max((rho.kappa()? - other.kappa()?).abs());
        let ab = reps_equivalent(&rho, &other, 1e-9);
        let ba = reps_equivalent(&other, &rho, 1e-9);
        let aa = reps_equivalent(&rho, &rho, 1e-9);
        if !(ab.equivalent && ba.equivalent && aa.equivalent) {
            conj_fail += 1;
        }
        conj = conj.max(
            ab.residual
                .max(ba.residual)
                .max((ab.residual - ba.residual).abs()),
        );
        let (f1, f2) = (fingerprint(&rho), fingerprint(&other));
        fp = fp.max(
            f1.iter()
                .zip(&f2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
        let s = random_sixtuple(rng);
        nu_def = nu_def.max(nu(&s).defect());
        let neg = SurfaceRep::from_images(rho.images().map(|x| x.neg()));
        let fn_ = fingerprint(&neg);
        for k in [2, 5, 6, 7, 9] {
            even = even.max((f1[k] - fn_[k]).abs());
        }
        if (f1[8] - fn_[8]).abs() < 1e-9 {
            unseparated += 1;
        }
    }
    Ok(vec![
        Check::bound("kappa conjugation invariance", n, kap, 1e-12),
        Check::bound("conj_equivalent on orbit pairs", n, conj, 1e-9)
            .and(conj_fail == 0)
            .note(format!("{conj_fail} orbit pairs rejected")),
        Check::bound("fingerprint equal on orbit pairs", n, fp, 1e-10),
        Check::bound("nu preserves six-tuple type", n, nu_def, 1e-12),
        Check::bound("sign twist: even words agree", n, even, 1e-12)
            .and(unseparated == 0)
            .note(format!("r-s-r+ separates {}/{n}", n - unseparated)),
    ])
}

fn pillow_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.samples("pillow", 100_000);
    let mut kw = 0.0f64;
    let mut contain = 0.0f64;
    for k in 0..10 * n {
        let a = random_unit(rng);
        let b = random_unit(rng);
        let w = goldman_w(a, b);
        contain = contain.max(w.constraint() - 1.0);
        if k < n {
            let c = crate::quat::commutator(a, b).re();
            kw = kw.max((k_eval(w) - c).abs());
        }
    }
    let mut checks = vec![
        Check::bound("k o W = re[a,b]", n, kw, 1e-10),
        Check::bound("W lands in B", 10 * n, contain.max(0.0), 1e-10),
    ];

    let tol = cfg.tolerances.newton_tol;
    let mut census_ok = true;
    let mut grad = 0.0f64;
    let mut counts = Vec::new();
    for g in [8, 12, 16] {
        let pts = find_critical_points(g, tol)?;
        counts.push(pts.len());
        census_ok &= pts.len() == 5;
        for p in &pts {
            grad = grad.max(k_grad(*p).norm());
            let expect = if p.dist(ORIGIN) < 1e-9 { 0 } else { 1 };
            census_ok &= morse_index(*p) == expect;
        }
        census_ok &= CORNERS
            .iter()
            .chain([ORIGIN].iter())
            .all(|c| pts.iter().any(|p| p.dist(*c) < 1e-9));
    }
    let label = if counts.iter().all(|&c| c == 5) {
        "5 critical points at grid_n 8, 12, 16; corner index 1".to_string()
    } else {
        format!("critical point counts {counts:?} at grid_n 8, 12, 16")
    };
    checks.push(
        Check::bound("critical-point census", 3, grad, 1e-10)
            .and(census_ok)
            .note(label),
    );
    let corner_grad = CORNERS
        .iter()
        .map(|c| k_grad(*c).norm())
        .fold(0.0, f64::max);
    checks.push(Check::bound(
        "corners are zeros of grad k",
        4,
        corner_grad,
        1e-12,
    ));

    let ctrl = StepControl {
        r_corner: cfg.tolerances.r_corner,
        tau_flow: cfg.tolerances.tau_flow,
        ..StepControl::default()
    };
    let lines = cfg.samples("flow", 100).max(4);
    let mut level = 0.0f64;
    let mut wrong = 0;
    let mut min_exit = f64::INFINITY;
    for k in 0..lines {
        let (p0, expect) = if k < 4 {
            (corner_seed(k), TerminalFlag::Corner)
        } else {
            (random_level_zero_point(rng)?, TerminalFlag::Boundary)
        };
        let line = flow_alpha(p0, 1.0, &ctrl)?;
        level = level.max(line.level_defect());
        if line.terminal_flag != expect {
            wrong += 1;
        }
        if let Some(g) = line.exit_gradient {
            min_exit = min_exit.min(g);
        }
    }
    checks.push(
        Check::bound(
            "flow lines stay on levels",
            lines,
            level,
            cfg.tolerances.tau_flow,
        )
        .and(wrong == 0)
        .note(format!(
            "{wrong} wrong terminal flags; min exit |grad k| {min_exit:.3e}"
        )),
    );

    let m = cfg.samples("flow-return", 20);
    let mut ret = 0.0f64;
    let mut done = 0;
    while done < m {
        let p = goldman_w(random_unit(rng), random_unit(rng));
        let t = k_eval(p);
        if t.abs() > 0.95 {
            continue;
        }
        let down = flow_to_level(p, 0.0, &ctrl)?;
        let up = flow_to_level(down, t, &ctrl)?;
        ret = ret.max(up.dist(p));
        done += 1;
    }
    checks.push(Check::bound("down then up flow returns", m, ret, 1e-5));
    Ok(checks)
}

fn random_sphere(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-6 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cover_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.samples("cover", 10_000);
    let mut reproj = 0.0f64;
    let mut slack = f64::INFINITY;
    let mut not_orbit = 0;
    for _ in 0..n {
        let v = random_sphere(rng, 6);
        let f = ut_fiber(&v)?;
        if !f.is_single_tau_orbit(1e-9) || f.points.is_empty() || f.points.len() > 4 {
            not_orbit += 1;
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
    let mut checks = vec![
        Check::bound("fiber is one tau-orbit, reprojects", n, reproj, 1e-9)
            .and(not_orbit == 0)
            .note(format!("{not_orbit} fibers not a single orbit")),
        Check::bound("fiber bounds slack", n, (-slack).max(0.0), 1e-10)
            .note(format!("min slack {slack:.3e}")),
    ];

    let m = (n / 10).max(1);
    let mut fix = 0.0f64;
    for _ in 0..m {
        let a = random_sphere(rng, 3);
        let mut b = random_sphere(rng, 3);
        let d = dot(&a, &b);
        b.iter_mut().zip(&a).for_each(|(x, y)| *x -= d * y);
        let nb = dot(&b, &b).sqrt();
        b.iter_mut().for_each(|x| *x /= nb);
        let u = UTPoint::new([a, vec![0.0]].concat(), [b, vec![0.0]].concat())?;
        let fixed = tau(&u).dist(&u);
        let v = ut_project(&u)?;
        let (v1, v2) = v.split_at(3);
        let h = 0.5f64.sqrt();
        fix = fix
            .max(fixed)
            .max((dot(v1, v1).sqrt() - h).abs())
            .max((dot(v2, v2).sqrt() - h).abs())
            .max(dot(v1, v2).abs());
    }
    checks.push(Check::bound(
        "tau-fixed points land on fixed locus",
        m,
        fix,
        1e-10,
    ));

    let tau_svd = cfg.tolerances.tau_svd;
    let mut round = 0.0f64;
    let mut bad_lifts = 0;
    for _ in 0..n {
        let rho = random_nonabelian_rep(rng);
        let (rep, lifts) = reconstruct_lifts(&rho)?;
        if rep.dim != 2 || lifts.len() != 2 {
            bad_lifts += 1;
            continue;
        }
        let nu_related = conj_equivalent(&nu(&lifts[0]).x, &lifts[1].x, 1e-9).equivalent;
        if !nu_related {
            bad_lifts += 1;
        }
        for s in &lifts {
            let back = pstar(s)?;
            round = round.max(reps_equivalent(&rho, &back, 1.0).residual);
        }
    }
    checks.push(
        Check::bound("reconstruct then pstar round trip", n, round, 1e-8)
            .and(bad_lifts == 0)
            .note(format!("{bad_lifts} reps without two nu-related lifts")),
    );

    let mut mismatch = 0;
    let k = (n / 10).max(1);
    for j in 0..2 * k {
        let rho = if j % 2 == 0 {
            random_nonabelian_rep(rng)
        } else {
            let p = random_s2(rng);
            let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
            SurfaceRep::new(
                exp_im(p, a[0]),
                exp_im(p, a[1]),
                exp_im(p, a[2]),
                exp_im(p, a[3]),
            )
        };
        let dim = span_report(&rho, tau_svd)?.dim;
        let abelian = orbit_type(&rho.images(), cfg.tolerances.tau_ab) != OrbitType::NonAbelian;
        if (dim <= 1) != abelian {
            mismatch += 1;
        }
    }
    checks.push(Check::count("span dim <= 1 iff abelian", 2 * k, mismatch));
    Ok(checks)
}

fn rand_param(rng: &mut ChaCha8Rng) -> LagrParam {
    LagrParam::new(
        rng.random_range(-TAU..TAU),
        rng.random_range(-TAU..TAU),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
}

/// Circle degenerations at the two special corners and injectivity on a
/// 6×6 fiber grid over ten generic points. Returns the failure count.
pub fn fiber_failures(rng: &mut ChaCha8Rng) -> usize {
    let mut fail = 0;
    for (g, th) in [(0.0, PI), (PI, 0.0)] {
        let s = lagr::circle_direction(g, th);
        if lagr::fiber_type(g, th) != FiberType::Circle || s.is_none() {
            fail += 1;
            continue;
        }
        let s = s.unwrap_or(0.0);
        for _ in 0..20 {
            let (a, b, mu) = (
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            );
            let x = l_param(LagrParam::new(g, th, a, b));
            let y = l_param(LagrParam::new(g, th, a + mu, b + s * mu));
            if !reps_equivalent(&x, &y, 1e-8).equivalent {
                fail += 1;
            }
        }
    }
    let generic = [
        (FRAC_PI_2, 1.0),
        (0.3, 2.0),
        (1.0, 0.2),
        (2.5, 4.0),
        (0.7, 5.5),
        (3.0, 1.2),
        (0.0, 1.0),
        (PI, 2.0),
        (1.5, PI),
        (2.0, 0.0),
    ];
    for (g, th) in generic {
        if lagr::fiber_type(g, th) != FiberType::Torus {
            fail += 1;
        }
        let reps: Vec<SurfaceRep> = (0..36)
            .map(|n| {
                let (a, b) = ((n / 6) as f64 * TAU / 6.0, (n % 6) as f64 * TAU / 6.0);
                l_param(LagrParam::new(g, th, a + 0.1, b + 0.2))
            })
            .collect();
        for (n, x) in reps.iter().enumerate() {
            for y in &reps[n + 1..] {
                if reps_equivalent(x, y, 1e-6).equivalent {
                    fail += 1;
                }
            }
        }
    }
    fail
}

fn lagr_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.samples("lagr", 10_000);
    let (mut rel, mut kap, mut ginv, mut tr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut g_fail = 0;
    for _ in 0..n {
        let p = rand_param(rng);
        rel = rel.max(xi(p.gamma, p.theta).relation_defect());
        let rho = l_param(p);
        let k = rho.kappa()?;
        kap = kap
            .max((k - (p.gamma - p.theta).cos()).abs())
            .max(rho.r_minus.re().abs())
            .max(rho.s_plus.re().abs());
        for q in [p.sigma0(), p.sigma1(), p.sigma2()] {
            let m = reps_equivalent(&rho, &l_param(q), 1e-8);
            ginv = ginv.max(m.residual);
            if !m.equivalent {
                g_fail += 1;
            }
        }
        if k.abs() <= 1.0 - cfg.tolerances.delta_twist.max(1e-3) {
            let th = rng.random_range(-TAU..TAU);
            let f = twist_flow(&rho, th)?;
            tr = tr.max((f.kappa()? - k).abs()).max(f.relator_defect());
        }
    }
    let mut checks = vec![
        Check::bound("xi relation ba = cd", n, rel, 1e-14),
        Check::bound("kappa(L) = cos(gamma - theta)", n, kap, 1e-12),
        Check::bound("G-invariance of L", 3 * n, ginv, 1e-8).and(g_fail == 0),
        Check::count("fiber degenerations", 10, fiber_failures(rng)),
        Check::bound("twist flow keeps kappa", n, tr, 1e-12),
    ];

    let ctrl = StepControl::default();
    let m = cfg.samples("twist-lambda", 10);
    let mut lam = 0.0f64;
    let mut done = 0;
    while done < m {
        let rho = random_nonabelian_rep(rng);
        let k = rho.kappa()?;
        if k.abs() > 0.9 {
            continue;
        }
        let a = lambda_coords(&rho, cfg.tolerances.delta_lambda, &ctrl)?;
        let b = lambda_coords(
            &twist_flow(&rho, rng.random_range(0.0..TAU))?,
            cfg.tolerances.delta_lambda,
            &ctrl,
        )?;
        lam = lam
            .max(a.landing_minus.dist(b.landing_minus))
            .max(a.landing_plus.dist(b.landing_plus));
        done += 1;
    }
    checks.push(Check::bound("twist flow keeps lambda_coords", m, lam, 1e-5));

    let (mut ex_c, mut ex_e) = (0.0f64, 0.0f64);
    let grid = 400;
    for eps in [0.01, 0.05, 0.1] {
        let c = Multicurve::preset("example-c", eps, grid)?;
        for (p, k) in c.pieces[0].samples.iter().zip(piece_kappa(&c.pieces[0])) {
            ex_c = ex_c.max((k - (FRAC_PI_2 - 2.0 * eps * p[0].sin()).cos()).abs());
        }
        let e = Multicurve::preset("example-e", eps, grid)?;
        for (j, k) in piece_kappa(&e.pieces[0]).into_iter().enumerate() {
            let t = TAU * j as f64 / grid as f64;
            ex_e = ex_e.max((k - (2.0 * eps * t.sin()).cos()).abs());
        }
    }
    checks.push(Check::bound("example (c) kappa", 3 * grid, ex_c, 1e-10));
    checks.push(Check::bound("example (e) kappa", 3 * grid, ex_e, 1e-10));

    let mut corr_fail = 0;
    let expect = [
        ("example-a", lagr::LagrangianKind::SolidTorus),
        ("example-b", lagr::LagrangianKind::Torus3),
        ("example-d", lagr::LagrangianKind::LensSpace),
    ];
    for (name, kind) in expect {
        let d = lagr::correspondence(&Multicurve::preset(name, 0.05, 64)?)?;
        if d.len() != 1 || d[0].kind != kind {
            corr_fail += 1;
        }
    }
    let cyl = Multicurve::new(vec![CurvePiece::arc(vec![
        [0.0, 0.0],
        [1.0, 2.0],
        [PI, PI],
    ])])?;
    if lagr::correspondence(&cyl)?[0].kind != lagr::LagrangianKind::Cylinder {
        corr_fail += 1;
    }
    checks.push(Check::count("multicurve correspondence", 4, corr_fail));

    let (mut psi_k, mut psi_inv) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let g = rng.random_range(0.0..=PI);
        let x = psi_param(v[0], v[1], v[2], v[3], g)?;
        psi_k = psi_k.max((x.kappa()? - 1.0).abs());
        let y = psi_param(-v[0], -v[1], -v[2], -v[3], g)?;
        let z = psi_param(v[0], v[1], -v[2], -v[3], PI - g)?;
        psi_inv = psi_inv
            .max(reps_equivalent(&x, &y, 1.0).residual)
            .max(reps_equivalent(&x, &z, 1.0).residual);
    }
    checks.push(Check::bound("Psi has kappa = 1", n, psi_k, 1e-10));
    checks.push(Check::bound(
        "Psi involution invariance",
        2 * n,
        psi_inv,
        1e-8,
    ));

    let (mut sph, mut glue) = (0.0f64, 0.0f64);
    for a in 0..64 {
        let alpha = FRAC_PI_2 * a as f64 / 63.0;
        for t in 0..64 {
            let theta = TAU * t as f64 / 64.0;
            sph = sph
                .max(sphere_a(1, alpha, theta)?.relator_defect())
                .max(sphere_a(2, alpha, theta)?.relator_defect());
        }
    }
    for t in 0..32 {
        let theta = TAU * t as f64 / 32.0;
        let x = sphere_a(1, FRAC_PI_2, theta)?;
        let y = sphere_a(2, FRAC_PI_2, -theta)?;
        glue = glue.max(reps_equivalent(&x, &y, 1.0).residual);
    }
    checks.push(Check::bound(
        "A1/A2 relator on 64x64 grid",
        2 * 64 * 64,
        sph,
        1e-9,
    ));
    checks.push(Check::bound("A1/A2 equator gluing", 32, glue, 1e-9));

    let opts = SolverOptions {
        margin_min: cfg.tolerances.margin_min,
        ..SolverOptions::default()
    };
    for eps in [0.05, 0.03, 0.08] {
        let r = intersect_heegaard(eps, &opts)?;
        let count = r.isolated_points.len();
        let ok = count == 8
            && r.circle_components.is_empty()
            && r.ambiguous_pairs == 0
            && r.min_margin() > opts.margin_min;
        checks.push(
            Check::bound(
                &format!("Heegaard intersection eps={eps}"),
                r.seeds,
                r.max_alpha_defect(),
                1e-6,
            )
            .and(ok)
            .note(format!(
                "{count} intersection points, min margin {:.3e}",
                r.min_margin()
            )),
        );
    }
    let r = intersect_heegaard(0.0, &opts)?;
    let closure = r
        .circle_components
        .iter()
        .map(|c| c.closure_error)
        .fold(0.0, f64::max);
    let circles = r.circle_components.len();
    checks.push(
        Check::bound("Heegaard intersection eps=0", r.seeds, closure, 1e-6)
            .and(circles == 4 && r.isolated_points.is_empty())
            .note(format!("{circles} circle components")),
    );
    Ok(checks)
}

fn cp3_suite(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = cfg.samples("cp3", 100_000);
    let c = |re: f64, im: f64| Complex::new(re, im);
    let z = c(0.0, 0.0);
    let real = CP3Point::new([c(1.0, 0.0), z, z, z])?;
    let quad = CP3Point::new([c(1.0, 0.0), c(0.0, 1.0), z, z])?;
    let exact = usize::from(kappa_cp3(&real) != -1.0) + usize::from(kappa_cp3(&quad) != 1.0);
    let mut checks = vec![Check::count("extremal values exact", 2, exact)];

    let mut outside = 0.0f64;
    let mut phase = 0.0f64;
    for _ in 0..10 * n {
        let p = random_point(rng);
        let k = kappa_cp3(&p);
        outside = outside.max(k.abs() - 1.0);
        if phase == 0.0 {
            let q = p.rephase(rng.random_range(0.0..TAU));
            phase = phase.max((kappa_cp3(&q) - k).abs());
        }
    }
    checks.push(Check::bound(
        "range [-1, 1]",
        10 * n,
        outside.max(0.0),
        1e-15,
    ));

    let m = (n / 10).max(1);
    let mut so4 = 0.0f64;
    for _ in 0..m {
        let g = random_so4(rng);
        let p = random_point(rng);
        so4 = so4.max((kappa_cp3(&act(&g, &p)) - kappa_cp3(&p)).abs());
        let q = p.rephase(rng.random_range(0.0..TAU));
        phase = phase.max((kappa_cp3(&q) - kappa_cp3(&p)).abs());
    }
    checks.push(Check::bound("SO(4) invariance", m, so4, 1e-12));
    checks.push(Check::bound("phase invariance", m, phase, 1e-14));

    let mut min_grad = f64::INFINITY;
    let mut done = 0;
    while done < n {
        let p = random_point(rng);
        if kappa_cp3(&p).abs() <= 0.9 {
            min_grad = min_grad.min(grad_norm_cp3(&p));
            done += 1;
        }
    }
    checks.push(
        Check::count(
            "gradient > 1e-3 at mid levels",
            n,
            usize::from(min_grad <= 1e-3),
        )
        .note(format!("min |grad| {min_grad:.3e}")),
    );
    let e = 1000;
    let mut max_ext = 0.0f64;
    for k in 0..e {
        let p = if k % 2 == 0 {
            random_real_point(rng)
        } else {
            random_quadric_point(rng)
        };
        max_ext = max_ext.max(grad_norm_cp3(&p));
    }
    checks.push(Check::bound("gradient on extremal loci", e, max_ext, 1e-6));

    let mut lvl = 0.0f64;
    for _ in 0..20 {
        let p = sample_level(rng, 0.0, 1e-9)?;
        lvl = lvl.max(kappa_cp3(&p).abs());
    }
    checks.push(Check::bound("level sampler at 0", 20, lvl, 1e-9));
    Ok(checks)
}
