//! Branched covers: `p: UTSⁿ → S²ⁿ⁻¹`, the involutions `τ` and `ν`, the map
//! `p*` from six-tuples to surface representations and its inverse up to `ν`.

use nalgebra::{Complex, Matrix4, SMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{orthogonal_unit, ImVec, Quat, S2Point, UnitQuat};
use crate::repvar::{SixTuple, SurfaceRep, TAU_REL};

pub const TAU_SVD: f64 = 1e-8;

/// A unit tangent vector `(w₁,w₂)` of `Sⁿ`, as two vectors in `ℝⁿ⁺¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UTPoint {
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl UTPoint {
    pub fn new(w1: Vec<f64>, w2: Vec<f64>) -> Result<Self> {
        let u = UTPoint { w1, w2 };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        if self.w1.len() != self.w2.len() || self.w1.len() < 2 {
            return Err(Error::Domain(
                "UT point vectors must share a length of at least 2".into(),
            ));
        }
        let (n1, n2, d) = (norm(&self.w1), norm(&self.w2), dot(&self.w1, &self.w2));
        if (n1 - 1.0).abs() > 1e-10 || (n2 - 1.0).abs() > 1e-10 || d.abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "not a unit tangent vector: |w1| = {n1}, |w2| = {n2}, w1.w2 = {d:e}"
            )));
        }
        Ok(())
    }

    /// Dimension `n` of the sphere.
    pub fn n(&self) -> usize {
        self.w1.len() - 1
    }

    pub fn dist(&self, o: &UTPoint) -> f64 {
        let a: f64 = self
            .w1
            .iter()
            .zip(&o.w1)
            .map(|(x, y)| (x - y).powi(2))
            .sum();
        let b: f64 = self
            .w2
            .iter()
            .zip(&o.w2)
            .map(|(x, y)| (x - y).powi(2))
            .sum();
        (a + b).sqrt()
    }
}

/// Reflection in the hyperplane orthogonal to the last basis vector.
pub fn tau(u: &UTPoint) -> UTPoint {
    let flip = |w: &[f64]| {
        let mut w = w.to_vec();
        if let Some(last) = w.last_mut() {
            *last = -*last;
        }
        w
    };
    UTPoint {
        w1: flip(&u.w1),
        w2: flip(&u.w2),
    }
}

/// `p(w₁,w₂) = (proj w₁, proj w₂)/|…|`.
pub fn ut_project(u: &UTPoint) -> Result<Vec<f64>> {
    u.validate()?;
    let n = u.n();
    let mut v: Vec<f64> = u.w1[..n].iter().chain(&u.w2[..n]).copied().collect();
    let len = norm(&v);
    if len < 1e-12 {
        return Err(Error::Domain("both projections vanish".into()));
    }
    v.iter_mut().for_each(|x| *x /= len);
    Ok(v)
}

/// One solution `(α, β, λ)` of the fiber equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSolution {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

/// The fiber `p⁻¹(v)` together with the data of the closed-form solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSet {
    /// `A = |v₁|²|v₂|² − (v₁·v₂)²`.
    pub a_value: f64,
    pub lambda: f64,
    pub solutions: Vec<FiberSolution>,
    pub points: Vec<UTPoint>,
    /// `λ²|v₁|²` and `λ²|v₂|²`; both are at most one.
    pub bounds: [f64; 2],
}

impl FiberSet {
    /// Largest violation of the three fiber equations.
    pub fn equation_defect(&self, v: &[f64]) -> f64 {
        let n = v.len() / 2;
        let (v1, v2) = v.split_at(n);
        let (a, b, c) = (dot(v1, v1), dot(v2, v2), dot(v1, v2));
        self.solutions
            .iter()
            .map(|s| {
                let l2 = s.lambda * s.lambda;
                (l2 * c + s.alpha * s.beta)
                    .abs()
                    .max((s.alpha * s.alpha - (1.0 - l2 * a)).abs())
                    .max((s.beta * s.beta - (1.0 - l2 * b)).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Whether the points form exactly one `τ`-orbit.
    pub fn is_single_tau_orbit(&self, tol: f64) -> bool {
        let Some(first) = self.points.first() else {
            return false;
        };
        let t = tau(first);
        let in_orbit = |p: &UTPoint| p.dist(first) < tol || p.dist(&t) < tol;
        let has_image = self.points.iter().any(|p| p.dist(&t) < tol);
        self.points.iter().all(in_orbit) && has_image && self.points.len() <= 2
    }

    /// Whether the fiber is a single `τ`-fixed point.
    pub fn is_tau_fixed(&self, tol: f64) -> bool {
        self.points.len() == 1 && tau(&self.points[0]).dist(&self.points[0]) < tol
    }
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Closed-form fiber of `p` over a unit vector `v = (v₁,v₂) ∈ ℝ²ⁿ`.
pub fn ut_fiber(v: &[f64]) -> Result<FiberSet> {
    if v.is_empty() || !v.len().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "expected an even-length vector, got {}",
            v.len()
        )));
    }
    let len = norm(v);
    if (len - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("|v| = {len}, expected 1")));
    }
    let n = v.len() / 2;
    let (v1, v2) = v.split_at(n);
    let (a, b, c) = (dot(v1, v1), dot(v2, v2), dot(v1, v2));
    let big_a = (a * b - c * c).max(0.0);
    let mut sols: Vec<FiberSolution> = Vec::with_capacity(2);
    let lambda;
    if big_a <= 1e-15 {
        lambda = 1.0;
        let (n1, n2) = (a.sqrt(), b.sqrt());
        let e = sign(c);
        for e1 in [1.0, -1.0] {
            sols.push(FiberSolution {
                alpha: e1 * n2,
                beta: -e * e1 * n1,
                lambda,
            });
        }
    } else {
        let l2 = 2.0 / (1.0 + (1.0 - 4.0 * big_a).max(0.0).sqrt());
        lambda = l2.sqrt();
        let aa = (1.0 - l2 * a).max(0.0).sqrt();
        let bb = (1.0 - l2 * b).max(0.0).sqrt();
        // the smaller root loses digits to cancellation; recover it from αβ = −λ²c
        let (alpha, beta) = if aa.max(bb) < 1e-6 {
            (aa, -sign(c) * bb)
        } else if aa >= bb {
            (aa, -l2 * c / aa)
        } else {
            (-l2 * c / bb, bb)
        };
        for e1 in [1.0, -1.0] {
            sols.push(FiberSolution {
                alpha: e1 * alpha,
                beta: e1 * beta,
                lambda,
            });
        }
    }
    if (sols[0].alpha - sols[1].alpha).abs() < 1e-15 && (sols[0].beta - sols[1].beta).abs() < 1e-15
    {
        sols.truncate(1);
    }
    let embed = |w: &[f64], last: f64| -> Vec<f64> {
        let mut out: Vec<f64> = w.iter().map(|x| lambda * x).collect();
        out.push(last);
        out
    };
    let points = sols
        .iter()
        .map(|s| UTPoint {
            w1: embed(v1, s.alpha),
            w2: embed(v2, s.beta),
        })
        .collect();
    let l2 = lambda * lambda;
    Ok(FiberSet {
        a_value: big_a,
        lambda,
        solutions: sols,
        points,
        bounds: [l2 * a, l2 * b],
    })
}

/// `λ²|v₁|²` and `λ²|v₂|²` for the smaller root `λ²`.
pub fn fiber_bounds(v: &[f64]) -> Result<[f64; 2]> {
    Ok(ut_fiber(v)?.bounds)
}

/// Fiber data with the `τ` pairing of its points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    pub v: Vec<f64>,
    pub fiber: FiberSet,
    /// `pairing[i]` is the index of `τ(points[i])`.
    pub tau_pairing: Vec<Option<usize>>,
    pub single_orbit: bool,
    pub tau_fixed: bool,
    pub reprojection_defect: f64,
}

pub fn fiber_report(v: &[f64]) -> Result<FiberReport> {
    let fiber = ut_fiber(v)?;
    let tol = 1e-9;
    let tau_pairing = fiber
        .points
        .iter()
        .map(|p| {
            let t = tau(p);
            fiber.points.iter().position(|q| q.dist(&t) < tol)
        })
        .collect();
    let mut reprojection_defect = 0.0f64;
    for p in &fiber.points {
        let back = ut_project(p)?;
        for (a, b) in back.iter().zip(v) {
            reprojection_defect = reprojection_defect.max((a - b).abs());
        }
    }
    Ok(FiberReport {
        v: v.to_vec(),
        single_orbit: fiber.is_single_tau_orbit(tol),
        tau_fixed: fiber.is_tau_fixed(tol),
        fiber,
        tau_pairing,
        reprojection_defect,
    })
}

/// `M(A,B) = (ĀB, Ā𝐢B)`, a point of `UTS³`.
pub fn bundle_map_m(a: UnitQuat, b: UnitQuat) -> UTPoint {
    let c = a.inv() * b;
    let d = a.inv() * UnitQuat::I * b;
    UTPoint {
        w1: c.to_array().to_vec(),
        w2: d.to_array().to_vec(),
    }
}

/// `ν` negates all six entries.
pub fn nu(s: &SixTuple) -> SixTuple {
    SixTuple::new_unchecked(s.x.map(|q| q.neg()))
}

/// `p*(x) = (x₁x₂, x̄₃x̄₂, x₄x₅, x̄₆x̄₅)`.
pub fn pstar(s: &SixTuple) -> Result<SurfaceRep> {
    let d = s.defect();
    if d > TAU_REL {
        return Err(Error::Precondition(format!("six-tuple defect {d:e}")));
    }
    let [x1, x2, x3, x4, x5, x6] = s.x;
    Ok(SurfaceRep::new(
        x1 * x2,
        x3.inv() * x2.inv(),
        x4 * x5,
        x6.inv() * x5.inv(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum X1Choices {
    /// `±x₁`.
    Pair,
    Circle,
    Sphere,
}

/// Span of the vectors `x₁` must be orthogonal to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpanReport {
    pub dim: usize,
    pub basis: Vec<ImVec>,
    pub x1_choices: X1Choices,
    pub singular_values: [f64; 3],
    /// Set when a singular value lies within a factor ten of the threshold.
    pub near_threshold: bool,
}

/// `{Im R₋, Im(S̄₋R̄₋), Im(S₊S₋), Im(S̄₋R₊S̄₊), Im(R̄₊S₋)}`.
pub fn span_vectors(rho: &SurfaceRep) -> [ImVec; 5] {
    let SurfaceRep {
        r_minus: rm,
        s_minus: sm,
        r_plus: rp,
        s_plus: sp,
    } = *rho;
    [
        rm.im(),
        (sm.inv() * rm.inv()).im(),
        (sp * sm).im(),
        (sm.inv() * rp * sp.inv()).im(),
        (rp.inv() * sm).im(),
    ]
}

pub fn span_report(rho: &SurfaceRep, tau_svd: f64) -> Result<SpanReport> {
    let w = span_vectors(rho);
    let m = SMatrix::<f64, 5, 3>::from_fn(|r, c| w[r].to_array()[c]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|a, b| svd.singular_values[*b].total_cmp(&svd.singular_values[*a]));
    let sv = [
        svd.singular_values[idx[0]],
        svd.singular_values[idx[1]],
        svd.singular_values[idx[2]],
    ];
    let dim = sv.iter().filter(|s| **s > tau_svd).count();
    if dim == 3 {
        return Err(Error::Contradiction(format!(
            "span of W has rank 3 (singular values {sv:?}); input defect too large"
        )));
    }
    let basis = idx[..dim]
        .iter()
        .map(|&r| ImVec::new(v_t[(r, 0)], v_t[(r, 1)], v_t[(r, 2)]))
        .collect();
    let near_threshold = sv
        .iter()
        .any(|s| *s > tau_svd / 10.0 && *s < tau_svd * 10.0);
    let x1_choices = match dim {
        2 => X1Choices::Pair,
        1 => X1Choices::Circle,
        _ => X1Choices::Sphere,
    };
    Ok(SpanReport {
        dim,
        basis,
        x1_choices,
        singular_values: sv,
        near_threshold,
    })
}

/// Completes `x₂..x₆` from `x₁`.
pub fn complete_from_x1(rho: &SurfaceRep, x1: S2Point) -> SixTuple {
    let SurfaceRep {
        r_minus: rm,
        s_minus: sm,
        r_plus: rp,
        s_plus: sp,
    } = *rho;
    let x1 = x1.quat();
    let x1b = x1.inv();
    SixTuple::new_unchecked([
        x1,
        x1b * rm,
        rm.inv() * x1 * sm.inv(),
        sm * x1b * sp,
        sp.inv() * x1 * sm.inv() * rp,
        rp.inv() * sm * x1b,
    ])
}

fn choose_x1(rho: &SurfaceRep, report: &SpanReport) -> S2Point {
    match report.dim {
        2 => {
            let w = span_vectors(rho);
            let mut best = (0.0, ImVec::ZERO);
            for (n, v) in w.iter().enumerate() {
                for u in &w[n + 1..] {
                    let c = v.cross(*u);
                    let len = c.norm();
                    if len > best.0 {
                        best = (len, c);
                    }
                }
            }
            best.1.normalized().unwrap_or(S2Point::I)
        }
        1 => orthogonal_unit(report.basis[0]),
        _ => S2Point::I,
    }
}

/// One six-tuple lift of `ρ`.
pub fn reconstruct_sixtuple(rho: &SurfaceRep) -> Result<(SpanReport, SixTuple)> {
    reconstruct_with(rho, TAU_REL, TAU_SVD)
}

pub fn reconstruct_with(
    rho: &SurfaceRep,
    tau_rel: f64,
    tau_svd: f64,
) -> Result<(SpanReport, SixTuple)> {
    rho.check(tau_rel)?;
    let report = span_report(rho, tau_svd)?;
    let x1 = choose_x1(rho, &report);
    Ok((report, complete_from_x1(rho, x1)))
}

/// Both lifts `x₁` and `−x₁` for nonabelian `ρ`; one representative otherwise.
pub fn reconstruct_lifts(rho: &SurfaceRep) -> Result<(SpanReport, Vec<SixTuple>)> {
    let (report, s) = reconstruct_sixtuple(rho)?;
    let mut lifts = vec![s];
    if report.dim == 2 {
        lifts.push(complete_from_x1(
            rho,
            S2Point::new(s.x[0].im().scale(-1.0))?,
        ));
    }
    Ok((report, lifts))
}

/// `U(X) = Re(conj(X₁X₂X₃X₄𝐢))`.
pub fn u_eval(x: [S2Point; 4]) -> f64 {
    (x[0].quat() * x[1].quat() * x[2].quat() * x[3].quat() * UnitQuat::I).re()
}

/// `(X₁,X₂,X₃,X₄, 𝐢, conj(X₁X₂X₃X₄𝐢))`, valid when `U(X) = 0`.
pub fn embed_i(x: [S2Point; 4]) -> Result<SixTuple> {
    let u = u_eval(x);
    if u.abs() > TAU_REL {
        return Err(Error::Constraint(format!("U(X) = {u:e} is not zero")));
    }
    let last = (x[0].quat() * x[1].quat() * x[2].quat() * x[3].quat() * UnitQuat::I).inv();
    Ok(SixTuple::new_unchecked([
        x[0].quat(),
        x[1].quat(),
        x[2].quat(),
        x[3].quat(),
        UnitQuat::I,
        last,
    ]))
}

pub type C64 = Complex<f64>;

/// The Hermitian matrix of the quadratic part of `S`.
pub fn q_matrix() -> Matrix4<C64> {
    let m = Matrix4::new(
        0.0, -1.0, 1.0, -1.0, //
        1.0, 0.0, -1.0, 1.0, //
        -1.0, 1.0, 0.0, -1.0, //
        1.0, -1.0, 1.0, 0.0,
    );
    m.map(|x| C64::new(0.0, 0.5 * x))
}

/// Eigenvalues of `Q` in increasing order.
pub fn q_eigenvalues() -> [f64; 4] {
    let e = SymmetricEigen::new(q_matrix()).eigenvalues;
    let mut v = [e[0], e[1], e[2], e[3]];
    v.sort_by(f64::total_cmp);
    v
}

/// `H(z) = Re(z* Q z)`.
pub fn h_form(z: [C64; 4]) -> f64 {
    let q = q_matrix();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            acc += z[r].conj() * q[(r, c)] * z[c];
        }
    }
    acc.re
}

fn complex_quat(z: C64) -> Quat {
    Quat::new(z.re, z.im, 0.0, 0.0)
}

/// `S(z) = Re((𝐢+z₁𝐣)(𝐢+z₂𝐣)(𝐢+z₃𝐣)(𝐢+z₄𝐣)𝐢)` by direct expansion.
pub fn s_form(z: [C64; 4]) -> f64 {
    let mut p = Quat::ONE;
    for zz in z {
        p = p * (Quat::I + complex_quat(zz) * Quat::J);
    }
    (p * Quat::I).re()
}

/// `H(z) + Re(𝐢 z₁z̄₂z₃z̄₄)`.
pub fn s_form_split(z: [C64; 4]) -> f64 {
    let quartic = C64::new(0.0, 1.0) * z[0] * z[1].conj() * z[2] * z[3].conj();
    h_form(z) + quartic.re
}
