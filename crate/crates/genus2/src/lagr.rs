//! Pillowcase coordinates for the four-punctured sphere, the Lagrangian family
//! `L` over it, and the multicurve correspondence.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{exp_im, ImVec, Quat, S2Point, UnitQuat};
use crate::repvar::{FourTuple, SurfaceRep};

mod intersect;

pub use intersect::{
    alpha_formula_defect, i1_canonical, i1_dist, i1_eps, i2, intersect_heegaard,
    transversality_margin, CircleComponent, IntersectionPoint, IntersectionReport, SolverOptions,
};

/// Corner matching tolerance.
pub const CORNER_TOL: f64 = 1e-8;

fn e_k(theta: f64) -> UnitQuat {
    exp_im(S2Point::K, theta)
}

fn e_i(theta: f64) -> UnitQuat {
    exp_im(S2Point::I, theta)
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `(γ, θ)` in the plane covering the pillowcase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PillowcaseCoord {
    pub gamma: f64,
    pub theta: f64,
}

impl PillowcaseCoord {
    pub fn new(gamma: f64, theta: f64) -> Self {
        PillowcaseCoord { gamma, theta }
    }

    /// Representative with `γ ∈ [0, π]`, `θ ∈ [0, 2π)`, and `θ ∈ [0, π]` on the
    /// edges `γ ∈ {0, π}`.
    pub fn canonical(self) -> Self {
        let eps = 1e-12;
        let mut g = wrap_tau(self.gamma);
        let mut t = wrap_tau(self.theta);
        if g > PI + eps {
            g = wrap_tau(-g);
            t = wrap_tau(-t);
        }
        if g < eps || (g - PI).abs() < eps {
            g = if g < eps { 0.0 } else { PI };
            if t > PI + eps {
                t = wrap_tau(-t);
            }
        }
        if TAU - t < eps {
            t = 0.0;
        }
        PillowcaseCoord { gamma: g, theta: t }
    }

    /// Distance in the quotient, minimized over the lattice and `σ₀`.
    pub fn dist(self, o: PillowcaseCoord) -> f64 {
        let d = |a: f64, b: f64| {
            let x = (a - b).rem_euclid(TAU);
            x.min(TAU - x)
        };
        let direct = d(self.gamma, o.gamma).hypot(d(self.theta, o.theta));
        let flipped = d(self.gamma, -o.gamma).hypot(d(self.theta, -o.theta));
        direct.min(flipped)
    }

    /// The corner this point sits on, if any.
    pub fn corner(self) -> Option<Corner> {
        let m = (self.gamma / PI).round();
        let n = (self.theta / PI).round();
        if (self.gamma - m * PI).abs() > CORNER_TOL || (self.theta - n * PI).abs() > CORNER_TOL {
            return None;
        }
        let odd = |x: f64| x.rem_euclid(2.0) != 0.0;
        Some(match (odd(m), odd(n)) {
            (false, false) => Corner::Xi00,
            (false, true) => Corner::Xi0Pi,
            (true, false) => Corner::XiPi0,
            (true, true) => Corner::XiPiPi,
        })
    }
}

/// The four corners of the pillowcase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    #[serde(rename = "xi(0,0)")]
    Xi00,
    #[serde(rename = "xi(0,pi)")]
    Xi0Pi,
    #[serde(rename = "xi(pi,0)")]
    XiPi0,
    #[serde(rename = "xi(pi,pi)")]
    XiPiPi,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::Xi00, Corner::Xi0Pi, Corner::XiPi0, Corner::XiPiPi];

    pub fn coord(self) -> PillowcaseCoord {
        match self {
            Corner::Xi00 => PillowcaseCoord::new(0.0, 0.0),
            Corner::Xi0Pi => PillowcaseCoord::new(0.0, PI),
            Corner::XiPi0 => PillowcaseCoord::new(PI, 0.0),
            Corner::XiPiPi => PillowcaseCoord::new(PI, PI),
        }
    }

    /// Corners over which the fiber of `L` is a circle.
    pub fn is_circle_degenerate(self) -> bool {
        matches!(self, Corner::Xi0Pi | Corner::XiPi0)
    }
}

/// `(𝐢, e^{γ𝐤}𝐢, e^{θ𝐤}𝐢, e^{(θ−γ)𝐤}𝐢)`.
pub fn xi(gamma: f64, theta: f64) -> FourTuple {
    let i = UnitQuat::I;
    FourTuple::new_unchecked(i, e_k(gamma) * i, e_k(theta) * i, e_k(theta - gamma) * i)
}

/// Arguments `(γ, θ, α, β)` of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrParam {
    pub gamma: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl LagrParam {
    pub fn new(gamma: f64, theta: f64, alpha: f64, beta: f64) -> Self {
        LagrParam {
            gamma,
            theta,
            alpha,
            beta,
        }
    }

    /// `(−γ, −θ, α+θ, β+θ)`.
    pub fn sigma0(self) -> Self {
        LagrParam::new(
            -self.gamma,
            -self.theta,
            self.alpha + self.theta,
            self.beta + self.theta,
        )
    }

    /// `(γ+2π, θ, α+π, β+π)`.
    pub fn sigma1(self) -> Self {
        LagrParam::new(
            self.gamma + TAU,
            self.theta,
            self.alpha + PI,
            self.beta + PI,
        )
    }

    /// `(γ, θ+2π, α, β)`.
    pub fn sigma2(self) -> Self {
        LagrParam::new(self.gamma, self.theta + TAU, self.alpha, self.beta)
    }

    pub fn base(self) -> PillowcaseCoord {
        PillowcaseCoord::new(self.gamma, self.theta)
    }
}

/// `L(γ,θ,α,β) = (−e^{γ𝐤}𝐢, e^{(θ−γ)𝐤/2} e^{(θ/2+α)P}, e^{(θ−γ)𝐤/2} e^{(θ/2+β)𝐢}, 𝐢)`
/// with `P = e^{γ𝐤}𝐢`.
pub fn l_param(p: LagrParam) -> SurfaceRep {
    let LagrParam {
        gamma,
        theta,
        alpha,
        beta,
    } = p;
    let (sg, cg) = gamma.sin_cos();
    let axis = S2Point::new(ImVec::new(cg, sg, 0.0)).unwrap_or(S2Point::I);
    let half = e_k(0.5 * (theta - gamma));
    SurfaceRep::new(
        (e_k(gamma) * UnitQuat::I).neg(),
        half * exp_im(axis, 0.5 * theta + alpha),
        half * e_i(0.5 * theta + beta),
        UnitQuat::I,
    )
}

/// The boundary swap `(R₋,S₋,R₊,S₊) ↦ (S₋,R₋,S₊,R₊)`.
pub fn d_boundary(rho: &SurfaceRep) -> SurfaceRep {
    SurfaceRep::new(rho.s_minus, rho.r_minus, rho.s_plus, rho.r_plus)
}

/// Generic fiber of `L` over a pillowcase point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberType {
    Torus,
    Circle,
}

/// `Circle` over `ξ(0,π)` and `ξ(π,0)`, `Torus` elsewhere.
pub fn fiber_type(gamma: f64, theta: f64) -> FiberType {
    match circle_direction(gamma, theta) {
        Some(_) => FiberType::Circle,
        None => FiberType::Torus,
    }
}

/// Sign `s` with `L(γ,θ,α,β) ~ L(γ,θ,α+μ,β+sμ)` over a circle-degenerate corner.
pub fn circle_direction(gamma: f64, theta: f64) -> Option<f64> {
    match PillowcaseCoord::new(gamma, theta).corner() {
        Some(Corner::Xi0Pi) => Some(1.0),
        Some(Corner::XiPi0) => Some(-1.0),
        _ => None,
    }
}

/// Axis `Im([R₋,S₋])/|Im([R₋,S₋])|` of the twist flow.
pub fn twist_axis(rho: &SurfaceRep, delta: f64) -> Result<S2Point> {
    let c = rho.minus_commutator();
    if c.re().abs() > 1.0 - delta {
        return Err(Error::Precondition(format!(
            "kappa {} within {delta:e} of ±1: twist axis undefined",
            c.re()
        )));
    }
    c.im()
        .normalized()
        .ok_or_else(|| Error::Precondition("commutator is central".into()))
}

/// Conjugates `R₊`, `S₊` by `e^{θI(ρ)}`.
pub fn twist_flow(rho: &SurfaceRep, theta: f64) -> Result<SurfaceRep> {
    twist_flow_with(rho, theta, 1e-6)
}

pub fn twist_flow_with(rho: &SurfaceRep, theta: f64, delta: f64) -> Result<SurfaceRep> {
    let g = exp_im(twist_axis(rho, delta)?, theta);
    Ok(SurfaceRep::new(
        rho.r_minus,
        rho.s_minus,
        g.conjugate(rho.r_plus),
        g.conjugate(rho.s_plus),
    ))
}

/// `H_ε(γ, θ) = (γ, θ − 2ε sin γ)`.
pub fn perturb_h(gamma: f64, theta: f64, eps: f64) -> (f64, f64) {
    (gamma, theta - 2.0 * eps * gamma.sin())
}

/// `Ψ(α₋,β₋,α₊,β₊,γ)`: the abelian-by-abelian locus at `κ = 1`.
pub fn psi_param(am: f64, bm: f64, ap: f64, bp: f64, gamma: f64) -> Result<SurfaceRep> {
    if !(0.0..=PI).contains(&gamma) {
        return Err(Error::Domain(format!("gamma {gamma} outside [0, pi]")));
    }
    let h = e_k(0.5 * gamma);
    Ok(SurfaceRep::new(
        e_i(am),
        e_i(bm),
        h.conjugate(e_i(ap)),
        h.conjugate(e_i(bp)),
    ))
}

/// `I(α) = (sin α 𝐢 − sin α 𝐣 + cos α 𝐤)/‖…‖`.
pub fn sphere_axis(alpha: f64) -> S2Point {
    let (s, c) = alpha.sin_cos();
    ImVec::new(s, -s, c).normalized().unwrap_or(S2Point::K)
}

/// The two hemispheres of the embedded 2-sphere.
///
/// `A₂` is `x ↦ −e^{α𝐤} x e^{−α𝐤}` applied to every entry of `A₁`.
pub fn sphere_a(hemisphere: u8, alpha: f64, theta: f64) -> Result<SurfaceRep> {
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [0, pi/2]")));
    }
    let a = e_i(alpha);
    let b = exp_im(S2Point::J, alpha);
    let g = exp_im(sphere_axis(alpha), theta);
    let a1 = SurfaceRep::new(a, b, g.conjugate(b), g.conjugate(a));
    match hemisphere {
        1 => Ok(a1),
        2 => {
            let h = e_k(alpha);
            Ok(SurfaceRep::from_images(
                a1.images().map(|x| h.conjugate(x).neg()),
            ))
        }
        _ => Err(Error::Domain(format!(
            "hemisphere {hemisphere} is not 1 or 2"
        ))),
    }
}

/// `[e^{α𝐢}, e^{α𝐣}]` in closed form.
pub fn sphere_commutator(alpha: f64) -> UnitQuat {
    let (s, c) = alpha.sin_cos();
    let re = (2.0 * alpha).cos() + 2.0 * c * c * s * s;
    let w = 2.0 * c * s * s;
    let v = ImVec::new(s, -s, c).scale(w);
    UnitQuat::new_normalize(Quat::from_parts(re, v)).unwrap_or(UnitQuat::ONE)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Circle,
    Arc,
}

/// One piece of a multicurve, sampled in the `(γ, θ)` plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePiece {
    #[serde(rename = "type")]
    pub kind: PieceKind,
    pub samples: Vec<[f64; 2]>,
}

impl CurvePiece {
    pub fn circle(samples: Vec<[f64; 2]>) -> Self {
        CurvePiece {
            kind: PieceKind::Circle,
            samples,
        }
    }

    pub fn arc(samples: Vec<[f64; 2]>) -> Self {
        CurvePiece {
            kind: PieceKind::Arc,
            samples,
        }
    }

    fn endpoints(&self) -> Result<(Corner, Corner)> {
        let (Some(a), Some(b)) = (self.samples.first(), self.samples.last()) else {
            return Err(Error::Domain("arc has no samples".into()));
        };
        let corner = |p: &[f64; 2]| {
            PillowcaseCoord::new(p[0], p[1]).corner().ok_or_else(|| {
                Error::Domain(format!("arc endpoint ({}, {}) is not a corner", p[0], p[1]))
            })
        };
        Ok((corner(a)?, corner(b)?))
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::Domain(
                "a curve piece needs at least two samples".into(),
            ));
        }
        if self.samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite curve sample".into()));
        }
        match self.kind {
            PieceKind::Arc => self.endpoints().map(|_| ()),
            PieceKind::Circle => {
                for p in &self.samples {
                    if PillowcaseCoord::new(p[0], p[1]).corner().is_some() {
                        return Err(Error::Domain(format!(
                            "circle passes through the corner ({}, {})",
                            p[0], p[1]
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multicurve {
    pub pieces: Vec<CurvePiece>,
}

impl Multicurve {
    pub fn new(pieces: Vec<CurvePiece>) -> Result<Self> {
        let m = Multicurve { pieces };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.pieces.iter().try_for_each(CurvePiece::validate)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Multicurve = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    /// `example-a` … `example-f`.
    pub fn preset(name: &str, eps: f64, n: usize) -> Result<Self> {
        let n = n.max(8);
        let closed = |f: &dyn Fn(f64) -> [f64; 2]| -> Vec<[f64; 2]> {
            (0..n).map(|k| f(TAU * k as f64 / n as f64)).collect()
        };
        let open = |f: &dyn Fn(f64) -> [f64; 2]| -> Vec<[f64; 2]> {
            (0..=n).map(|k| f(PI * k as f64 / n as f64)).collect()
        };
        let pieces = match name {
            "example-a" => vec![CurvePiece::arc(open(&|t| [PI, t]))],
            "example-b" => vec![CurvePiece::circle(closed(&|t| [t, t + FRAC_PI_2]))],
            "example-c" => vec![CurvePiece::circle(closed(&|t| {
                let (g, th) = perturb_h(t, t + FRAC_PI_2, eps);
                [g, th]
            }))],
            "example-d" => vec![CurvePiece::arc(open(&|t| [t, t + PI]))],
            "example-e" => {
                if eps == 0.0 {
                    return Err(Error::Domain(
                        "example-e needs eps != 0; at eps = 0 it meets the corner xi(pi,pi)".into(),
                    ));
                }
                vec![CurvePiece::circle(closed(&|t| {
                    [FRAC_PI_2 + t + eps * t.sin(), FRAC_PI_2 + t - eps * t.sin()]
                }))]
            }
            "example-f" => return bypass(&Multicurve::preset("example-a", eps, n)?, 0.05, 0.05, n),
            _ => return Err(Error::Domain(format!("unknown multicurve preset {name:?}"))),
        };
        Multicurve::new(pieces)
    }
}

/// Each circle is doubled; each arc becomes a figure-eight closed curve that
/// runs along the arc from parameter `η` to `1 − η`, displaced along the normal
/// by `δ sin 4πu`.
pub fn bypass(m: &Multicurve, eta: f64, delta: f64, n: usize) -> Result<Multicurve> {
    m.validate()?;
    let mut out = Vec::new();
    for piece in &m.pieces {
        match piece.kind {
            PieceKind::Circle => {
                out.push(piece.clone());
                out.push(piece.clone());
            }
            PieceKind::Arc => {
                let pts = &piece.samples;
                let at = |s: f64| -> ([f64; 2], [f64; 2]) {
                    let x = s * (pts.len() - 1) as f64;
                    let k = (x.floor() as usize).min(pts.len() - 2);
                    let f = x - k as f64;
                    let (a, b) = (pts[k], pts[k + 1]);
                    let p = [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])];
                    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                    let len = dx.hypot(dy).max(f64::MIN_POSITIVE);
                    (p, [-dy / len, dx / len])
                };
                let samples = (0..n.max(8))
                    .map(|k| {
                        let u = k as f64 / n.max(8) as f64;
                        let s = 0.5 - (0.5 - eta) * (TAU * u).cos();
                        let (p, nv) = at(s);
                        let off = delta * (2.0 * TAU * u).sin();
                        [p[0] + off * nv[0], p[1] + off * nv[1]]
                    })
                    .collect();
                out.push(CurvePiece::circle(samples));
            }
        }
    }
    Multicurve::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LagrangianKind {
    /// `t ↦ L(γ(t), θ(t), ·, ·)` over a circle.
    Torus3,
    LensSpace,
    /// `I × 𝕋²`.
    Cylinder,
    SolidTorus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianDescriptor {
    pub piece: usize,
    pub kind: LagrangianKind,
    pub endpoints: Option<[Corner; 2]>,
}

/// The Lagrangian attached to each piece of a multicurve.
pub fn correspondence(m: &Multicurve) -> Result<Vec<LagrangianDescriptor>> {
    m.validate()?;
    m.pieces
        .iter()
        .enumerate()
        .map(|(n, piece)| match piece.kind {
            PieceKind::Circle => Ok(LagrangianDescriptor {
                piece: n,
                kind: LagrangianKind::Torus3,
                endpoints: None,
            }),
            PieceKind::Arc => {
                let (a, b) = piece.endpoints()?;
                let kind = match (a.is_circle_degenerate(), b.is_circle_degenerate()) {
                    (true, true) => LagrangianKind::LensSpace,
                    (false, false) => LagrangianKind::Cylinder,
                    _ => LagrangianKind::SolidTorus,
                };
                Ok(LagrangianDescriptor {
                    piece: n,
                    kind,
                    endpoints: Some([a, b]),
                })
            }
        })
        .collect()
}

/// `κ` of `L` along a piece, as `(t-index, κ)` pairs.
pub fn piece_kappa(piece: &CurvePiece) -> Vec<f64> {
    piece
        .samples
        .iter()
        .map(|p| {
            l_param(LagrParam::new(p[0], p[1], 0.3, -0.7))
                .minus_commutator()
                .re()
        })
        .collect()
}
