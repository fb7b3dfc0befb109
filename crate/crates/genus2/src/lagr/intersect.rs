//! Intersection of the two Heegaard Lagrangians `i₁,ε(𝕋³)` and `i₂(𝕋³)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{d_boundary, l_param, wrap_tau, LagrParam};
use crate::error::{Error, Result};
use crate::export::{fmt17, write_csv_table, write_json};
use crate::repvar::{align, conj_equivalent, fingerprint, SurfaceRep};

/// `L(t, t + π/2 − 2ε sin t, α, β)`.
pub fn i1_eps(eps: f64, t: f64, alpha: f64, beta: f64) -> SurfaceRep {
    l_param(LagrParam::new(
        t,
        t + FRAC_PI_2 - 2.0 * eps * t.sin(),
        alpha,
        beta,
    ))
}

/// `d∂ ∘ L(t, t + π/2, α, β)`.
pub fn i2(t: f64, alpha: f64, beta: f64) -> SurfaceRep {
    d_boundary(&l_param(LagrParam::new(t, t + FRAC_PI_2, alpha, beta)))
}

/// Representative of `(t, α, β)` under `(t, α, β) ~ (t + 2π, α + π, β + π)`
/// with `t ∈ [0, 2π)` and `α, β ∈ [0, 2π)`.
pub fn i1_canonical(q: [f64; 3]) -> [f64; 3] {
    let k = ((q[0] + 1e-9) / TAU).floor();
    [
        (q[0] - k * TAU).max(0.0),
        wrap_tau(q[1] - k * PI),
        wrap_tau(q[2] - k * PI),
    ]
}

fn ang(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    r.min(TAU - r)
}

/// Distance between parameters of `i₁,ε` in the quotient.
pub fn i1_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (a, b) = (i1_canonical(a), i1_canonical(b));
    (-1..=1)
        .map(|k| {
            let k = k as f64;
            let dt = a[0] - (b[0] + k * TAU);
            let da = ang(a[1] - b[1] - k * PI);
            let db = ang(a[2] - b[2] - k * PI);
            (dt * dt + da * da + db * db).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// The lift of `start` closest to the unwrapped point `cur`.
fn nearest_lift(start: [f64; 3], cur: [f64; 3]) -> [f64; 3] {
    let k0 = ((cur[0] - start[0]) / TAU).round();
    let mut best = start;
    let mut best_d = f64::INFINITY;
    for k in [k0 - 1.0, k0, k0 + 1.0] {
        let mut c = [start[0] + k * TAU, start[1] + k * PI, start[2] + k * PI];
        for n in 1..3 {
            c[n] += TAU * ((cur[n] - c[n]) / TAU).round();
        }
        let d = (0..3).map(|n| (c[n] - cur[n]).powi(2)).sum::<f64>();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

/// `α = π/4 + ε sin t − t/2 + ℓπ`, smallest angular distance over `ℓ`.
pub fn alpha_formula_defect(eps: f64, t: f64, alpha: f64) -> f64 {
    let a0 = FRAC_PI_4 + eps * t.sin() - 0.5 * t;
    ang(alpha - a0).min(ang(alpha - a0 - PI))
}

type P6 = [f64; 6];

fn split(p: &P6) -> ([f64; 3], [f64; 3]) {
    ([p[0], p[1], p[2]], [p[3], p[4], p[5]])
}

fn pair(eps: f64, p: &P6) -> (SurfaceRep, SurfaceRep) {
    (i1_eps(eps, p[0], p[1], p[2]), i2(p[3], p[4], p[5]))
}

/// Fingerprint differences followed by the aligned difference of the images.
fn residual(eps: f64, p: &P6) -> Vec<f64> {
    let (r1, r2) = pair(eps, p);
    let (f1, f2) = (fingerprint(&r1), fingerprint(&r2));
    let (w1, w2) = (r1.images(), r2.images());
    let (g, _) = align(&w1, &w2);
    let mut out: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| a - b).collect();
    for (x, y) in w1.iter().zip(&w2) {
        let d = g.conjugate(*x).quat() - y.quat();
        out.extend(d.to_array());
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const FD_STEP: f64 = 1e-5;

fn jacobian(f: &dyn Fn(&P6) -> Vec<f64>, p: &P6) -> DMatrix<f64> {
    let mut cols = Vec::with_capacity(6);
    for k in 0..6 {
        let (mut a, mut b) = (*p, *p);
        a[k] += FD_STEP;
        b[k] -= FD_STEP;
        let (fa, fb) = (f(&a), f(&b));
        cols.push(
            fa.iter()
                .zip(&fb)
                .map(|(x, y)| (x - y) / (2.0 * FD_STEP))
                .collect::<Vec<_>>(),
        );
    }
    DMatrix::from_fn(cols[0].len(), 6, |r, c| cols[c][r])
}

fn singular_values(j: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = j
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Right singular vector of the smallest singular value.
fn null_direction(j: &DMatrix<f64>) -> [f64; 6] {
    let svd = j.clone().svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.imin();
    std::array::from_fn(|c| vt[(k, c)])
}

struct Gn {
    p: P6,
    norm: f64,
}

/// Gauss–Newton with a pseudo-inverse step and halving line search.
fn gauss_newton(f: &dyn Fn(&P6) -> Vec<f64>, p0: P6, tol: f64, max_iter: usize) -> Gn {
    let mut p = p0;
    let mut r = f(&p);
    let mut rn = norm(&r);
    for it in 0..max_iter {
        if rn <= tol {
            break;
        }
        if it >= 12 && rn > 1e-2 {
            break;
        }
        let j = jacobian(f, &p);
        let svd = j.svd(true, true);
        let smax = svd.singular_values.max();
        let rhs = DVector::from_iterator(r.len(), r.iter().map(|x| -x));
        let Ok(step) = svd.solve(&rhs, 1e-10 * smax.max(1e-300)) else {
            break;
        };
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let q: P6 = std::array::from_fn(|k| p[k] + lam * step[k]);
            let rq = f(&q);
            let nq = norm(&rq);
            if nq < rn {
                p = q;
                r = rq;
                rn = nq;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Gn { p, norm: rn }
}

/// Smallest singular value of the 16×6 matrix of tangent vectors of both
/// parametrizations, in the chart `ρ ↦ g ρ g⁻¹` aligned to the base point.
pub fn transversality_margin(eps: f64, p: &[f64; 6]) -> f64 {
    let base = i1_eps(eps, p[0], p[1], p[2]).images();
    let chart = |rho: SurfaceRep| -> Vec<f64> {
        let w = rho.images();
        let (g, _) = align(&w, &base);
        w.iter().flat_map(|x| g.conjugate(*x).to_array()).collect()
    };
    let at = |q: &P6, k: usize| -> Vec<f64> {
        let (a, b) = split(q);
        if k < 3 {
            chart(i1_eps(eps, a[0], a[1], a[2]))
        } else {
            chart(i2(b[0], b[1], b[2]))
        }
    };
    let mut m = DMatrix::<f64>::zeros(16, 6);
    for k in 0..6 {
        let (mut a, mut b) = (*p, *p);
        a[k] += FD_STEP;
        b[k] -= FD_STEP;
        let (fa, fb) = (at(&a, k), at(&b, k));
        for r in 0..16 {
            m[(r, k)] = (fa[r] - fb[r]) / (2.0 * FD_STEP);
        }
    }
    singular_values(&m)[0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverOptions {
    pub grid: [usize; 3],
    /// Gauss–Newton stopping tolerance on the residual norm.
    pub newton_tol: f64,
    /// Acceptance threshold for the conjugacy residual of a solution.
    pub accept_tol: f64,
    pub margin_min: f64,
    pub cluster_radius: f64,
    /// Singular values of the solution Jacobian below this count as null.
    pub null_tol: f64,
    pub continuation_step: f64,
    /// Fraction of seeds, ranked by fingerprint distance to the `i₂` table,
    /// that are refined.
    pub seed_fraction: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid: [16, 16, 16],
            newton_tol: 1e-12,
            accept_tol: 1e-9,
            margin_min: 1e-4,
            cluster_radius: 1e-6,
            null_tol: 1e-5,
            continuation_step: 0.05,
            seed_fraction: 1.0,
            max_iter: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionPoint {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Matching parameters `(t′, α′, β′)` of `i₂`.
    pub partner: [f64; 3],
    pub residual: f64,
    pub margin: f64,
    pub ambiguous: bool,
    /// Number of seeds that converged here.
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleComponent {
    pub id: usize,
    /// Canonical `i₁,ε` parameters along the loop.
    pub samples: Vec<[f64; 3]>,
    pub closure_error: f64,
    pub max_residual: f64,
    /// Smallest and second smallest singular values at the first point.
    pub singular_values: [f64; 2],
    pub hits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub eps: f64,
    pub grid: [usize; 3],
    pub seeds: usize,
    pub refined: usize,
    pub converged: usize,
    pub isolated_points: Vec<IntersectionPoint>,
    pub circle_components: Vec<CircleComponent>,
    /// Converged solutions that are neither transverse points nor on a closed loop.
    pub unclassified: usize,
    pub ambiguous_pairs: usize,
}

impl IntersectionReport {
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for (n, p) in self.isolated_points.iter().enumerate() {
            rows.push(vec![
                fmt17(p.t),
                fmt17(p.alpha),
                fmt17(p.beta),
                fmt17(p.residual),
                fmt17(p.margin),
                n.to_string(),
                "point".into(),
            ]);
        }
        let base = self.isolated_points.len();
        for c in &self.circle_components {
            for s in &c.samples {
                rows.push(vec![
                    fmt17(s[0]),
                    fmt17(s[1]),
                    fmt17(s[2]),
                    fmt17(c.max_residual),
                    fmt17(c.singular_values[0]),
                    (base + c.id).to_string(),
                    "circle".into(),
                ]);
            }
        }
        rows
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let header = [
            "t",
            "alpha",
            "beta",
            "residual",
            "margin",
            "component_id",
            "component_type",
        ];
        write_csv_table(path, &header, &self.csv_rows())
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn max_alpha_defect(&self) -> f64 {
        self.isolated_points
            .iter()
            .map(|p| {
                alpha_formula_defect(self.eps, p.t, p.alpha)
                    .max(alpha_formula_defect(self.eps, p.t, p.beta))
            })
            .fold(0.0, f64::max)
    }

    pub fn min_margin(&self) -> f64 {
        self.isolated_points
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

struct Solution {
    p: P6,
    key: [f64; 3],
    residual: f64,
    sv: Vec<f64>,
}

fn grid_points(grid: [usize; 3]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(grid.iter().product());
    for a in 0..grid[0] {
        for b in 0..grid[1] {
            for c in 0..grid[2] {
                out.push([
                    TAU * (a as f64 + 0.5) / grid[0] as f64,
                    TAU * (b as f64 + 0.5) / grid[1] as f64,
                    TAU * (c as f64 + 0.5) / grid[2] as f64,
                ]);
            }
        }
    }
    out
}

fn fp_dist2(a: &[f64; 10], b: &[f64; 10]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Pillowcase-perturbed Heegaard intersection by grid seeding and Gauss–Newton.
pub fn intersect_heegaard(eps: f64, opts: &SolverOptions) -> Result<IntersectionReport> {
    if !(eps.abs() < 0.2) {
        return Err(Error::Precondition(format!(
            "|eps| = {} must be below 0.2",
            eps.abs()
        )));
    }
    if opts.grid.iter().any(|&n| n < 16) {
        return Err(Error::Precondition(format!(
            "grid {:?} must be at least 16 per axis",
            opts.grid
        )));
    }
    let seeds = grid_points(opts.grid);
    let table_grid = opts.grid.map(|n| n.min(20));
    let table: Vec<([f64; 3], [f64; 10])> = grid_points(table_grid)
        .into_par_iter()
        .map(|q| (q, fingerprint(&i2(q[0], q[1], q[2]))))
        .collect();

    let mut ranked: Vec<(f64, P6)> = seeds
        .par_iter()
        .map(|s| {
            let f = fingerprint(&i1_eps(eps, s[0], s[1], s[2]));
            let (d, q) = table
                .iter()
                .map(|(q, g)| (fp_dist2(&f, g), q))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("nonempty table");
            (d, [s[0], s[1], s[2], q[0], q[1], q[2]])
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    let keep = ((ranked.len() as f64 * opts.seed_fraction).ceil() as usize).clamp(1, ranked.len());
    ranked.truncate(keep);

    let f = move |p: &P6| residual(eps, p);
    let mut sols: Vec<Solution> = ranked
        .par_iter()
        .filter_map(|(_, p0)| {
            let gn = gauss_newton(&f, *p0, opts.newton_tol, opts.max_iter);
            if !(gn.norm < opts.accept_tol) {
                return None;
            }
            let (r1, r2) = pair(eps, &gn.p);
            let m = conj_equivalent(&r1.images(), &r2.images(), opts.accept_tol);
            if !m.equivalent {
                return None;
            }
            let (a, _) = split(&gn.p);
            Some(Solution {
                p: gn.p,
                key: i1_canonical(a),
                residual: m.residual,
                sv: singular_values(&jacobian(&f, &gn.p)),
            })
        })
        .collect();
    sols.sort_by(|a, b| {
        a.key
            .iter()
            .zip(&b.key)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let converged = sols.len();

    let mut isolated: Vec<IntersectionPoint> = Vec::new();
    let mut circles: Vec<CircleComponent> = Vec::new();
    let mut unclassified = 0;
    for s in &sols {
        let nulls = s.sv.iter().filter(|&&x| x < opts.null_tol).count();
        match nulls {
            0 => {
                if let Some(p) = isolated
                    .iter_mut()
                    .find(|p| i1_dist([p.t, p.alpha, p.beta], s.key) < opts.cluster_radius)
                {
                    p.hits += 1;
                    continue;
                }
                let margin = transversality_margin(eps, &s.p);
                if margin <= opts.margin_min {
                    unclassified += 1;
                    continue;
                }
                isolated.push(IntersectionPoint {
                    t: s.key[0],
                    alpha: s.key[1],
                    beta: s.key[2],
                    partner: {
                        let (_, b) = split(&s.p);
                        i1_canonical(b)
                    },
                    residual: s.residual,
                    margin,
                    ambiguous: false,
                    hits: 1,
                });
            }
            1 => {
                let h = opts.continuation_step;
                if let Some(c) = circles
                    .iter_mut()
                    .find(|c| c.samples.iter().any(|q| i1_dist(*q, s.key) < h))
                {
                    c.hits += 1;
                    continue;
                }
                match trace_circle(eps, &s.p, opts) {
                    Some((samples, closure_error, max_residual)) => circles.push(CircleComponent {
                        id: circles.len(),
                        samples,
                        closure_error,
                        max_residual,
                        singular_values: [s.sv[0], s.sv[1]],
                        hits: 1,
                    }),
                    None => unclassified += 1,
                }
            }
            _ => unclassified += 1,
        }
    }

    let mut ambiguous_pairs = 0;
    for a in 0..isolated.len() {
        for b in a + 1..isolated.len() {
            let (p, q) = (&isolated[a], &isolated[b]);
            if i1_dist([p.t, p.alpha, p.beta], [q.t, q.alpha, q.beta]) < 10.0 * opts.cluster_radius
            {
                ambiguous_pairs += 1;
                isolated[a].ambiguous = true;
                isolated[b].ambiguous = true;
            }
        }
    }

    Ok(IntersectionReport {
        eps,
        grid: opts.grid,
        seeds: seeds.len(),
        refined: keep,
        converged,
        isolated_points: isolated,
        circle_components: circles,
        unclassified,
        ambiguous_pairs,
    })
}

/// Pseudo-arclength continuation of a one-dimensional solution family.
/// Returns the canonical `i₁,ε` samples, the closure error and the largest
/// residual along the loop, or `None` if the family does not close up.
fn trace_circle(eps: f64, p0: &P6, opts: &SolverOptions) -> Option<(Vec<[f64; 3]>, f64, f64)> {
    let f = move |p: &P6| residual(eps, p);
    let start = split(p0).0;
    let mut p = *p0;
    let mut tau = null_direction(&jacobian(&f, &p));
    let h0 = opts.continuation_step;
    let mut h = h0;
    let mut samples = vec![i1_canonical(start)];
    let mut max_res = norm(&f(&p));
    let mut arc = 0.0;
    while arc < 400.0 * h0 {
        let pred: P6 = std::array::from_fn(|k| p[k] + h * tau[k]);
        let (tc, pc) = (tau, pred);
        let aug = move |q: &P6| {
            let mut r = residual(eps, q);
            r.push((0..6).map(|k| tc[k] * (q[k] - pc[k])).sum());
            r
        };
        let gn = gauss_newton(&aug, pred, opts.newton_tol, 20);
        if !(gn.norm < opts.accept_tol) {
            h *= 0.5;
            if h < 1e-4 * h0 {
                return None;
            }
            continue;
        }
        let mut t_new = null_direction(&jacobian(&f, &gn.p));
        if (0..6).map(|k| t_new[k] * tau[k]).sum::<f64>() < 0.0 {
            t_new = t_new.map(|x| -x);
        }
        p = gn.p;
        tau = t_new;
        arc += h;
        h = (h * 1.5).min(h0);
        max_res = max_res.max(gn.norm);
        let cur = split(&p).0;
        samples.push(i1_canonical(cur));

        let lifted = nearest_lift(start, cur);
        let gap = (0..3)
            .map(|n| (lifted[n] - cur[n]).powi(2))
            .sum::<f64>()
            .sqrt();
        if arc > 4.0 * h0 && gap < 1.5 * h0 {
            let c = (0..3)
                .max_by(|&a, &b| tau[a].abs().total_cmp(&tau[b].abs()))
                .expect("three coordinates");
            let target = lifted[c];
            let close = move |q: &P6| {
                let mut r = residual(eps, q);
                r.push(q[c] - target);
                r
            };
            let gn = gauss_newton(&close, p, opts.newton_tol, 30);
            if gn.norm < opts.accept_tol {
                let err = i1_dist(split(&gn.p).0, start);
                if err < 1e-6 {
                    samples.pop();
                    return Some((samples, err, max_res.max(gn.norm)));
                }
            }
        }
    }
    None
}
