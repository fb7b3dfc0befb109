//! Goldman trace coordinates, the Morse function `k` and its gradient flow.

use std::io::Write;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt17;
use crate::quat::UnitQuat;
use crate::repvar::SurfaceRep;

pub const TAU_B: f64 = 1e-10;

/// A point `(x,y,z)` of trace coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PillowPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The four corners of the pillow, i.e. the images of the central representations.
pub const CORNERS: [PillowPoint; 4] = [
    PillowPoint::new(1.0, 1.0, 1.0),
    PillowPoint::new(-1.0, 1.0, -1.0),
    PillowPoint::new(1.0, -1.0, -1.0),
    PillowPoint::new(-1.0, -1.0, 1.0),
];

pub const ORIGIN: PillowPoint = PillowPoint::new(0.0, 0.0, 0.0);

impl PillowPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        PillowPoint { x, y, z }
    }

    pub fn from_vec(v: Vector3<f64>) -> Self {
        PillowPoint::new(v[0], v[1], v[2])
    }

    pub fn vec(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dist(self, o: PillowPoint) -> f64 {
        (self.vec() - o.vec()).norm()
    }

    /// `x²+y²+z²−2xyz`, which is at most one on the pillow.
    pub fn constraint(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z - 2.0 * self.x * self.y * self.z
    }

    fn in_cube(self, tol: f64) -> bool {
        self.x.abs() <= 1.0 + tol && self.y.abs() <= 1.0 + tol && self.z.abs() <= 1.0 + tol
    }

    pub fn in_b(self, tol: f64) -> bool {
        self.constraint() <= 1.0 + tol && self.in_cube(tol)
    }

    pub fn on_boundary(self, tol: f64) -> bool {
        (self.constraint() - 1.0).abs() <= tol && self.in_cube(tol)
    }

    /// Index of the corner within `r`, if any.
    pub fn near_corner(self, r: f64) -> Option<usize> {
        CORNERS.iter().position(|c| self.dist(*c) < r)
    }
}

/// `W(a,b) = (Re a, Re b, Re(a b̄))`.
pub fn goldman_w(a: UnitQuat, b: UnitQuat) -> PillowPoint {
    PillowPoint::new(a.re(), b.re(), (a * b.inv()).re())
}

/// `k = 2(x²+y²+z²−2xyz) − 1`.
pub fn k_eval(p: PillowPoint) -> f64 {
    2.0 * p.constraint() - 1.0
}

/// `∇k = 4(x−yz, y−xz, z−xy)`.
pub fn k_grad(p: PillowPoint) -> Vector3<f64> {
    4.0 * Vector3::new(p.x - p.y * p.z, p.y - p.x * p.z, p.z - p.x * p.y)
}

pub fn k_hessian(p: PillowPoint) -> Matrix3<f64> {
    4.0 * Matrix3::new(1.0, -p.z, -p.y, -p.z, 1.0, -p.x, -p.y, -p.x, 1.0)
}

/// Number of negative Hessian eigenvalues.
pub fn morse_index(p: PillowPoint) -> usize {
    SymmetricEigen::new(k_hessian(p))
        .eigenvalues
        .iter()
        .filter(|e| **e < 0.0)
        .count()
}

/// `k(W(a,b))`, equal to `Re([a,b])`.
pub fn kappa_from_w(a: UnitQuat, b: UnitQuat) -> f64 {
    k_eval(goldman_w(a, b))
}

/// Newton's method on `∇k = 0` seeded from a `grid_n³` grid over the cube.
pub fn find_critical_points(grid_n: usize, newton_tol: f64) -> Result<Vec<PillowPoint>> {
    if grid_n < 8 {
        return Err(Error::Precondition(format!(
            "grid_n must be at least 8, got {grid_n}"
        )));
    }
    let coord = |n: usize| -1.0 + 2.0 * n as f64 / (grid_n - 1) as f64;
    let mut found: Vec<PillowPoint> = Vec::new();
    for a in 0..grid_n {
        for b in 0..grid_n {
            for c in 0..grid_n {
                let seed = PillowPoint::new(coord(a), coord(b), coord(c));
                match newton_critical(seed, newton_tol) {
                    Some(p) if p.in_cube(1e-9) => {
                        if !found.iter().any(|q| q.dist(p) < 1e-6) {
                            found.push(p);
                        }
                    }
                    Some(_) => {}
                    None => log::debug!("newton did not converge from {seed:?}"),
                }
            }
        }
    }
    found.sort_by(|p, q| {
        p.to_array()
            .partial_cmp(&q.to_array())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(found)
}

fn newton_critical(seed: PillowPoint, tol: f64) -> Option<PillowPoint> {
    let mut p = seed.vec();
    for _ in 0..60 {
        let pp = PillowPoint::from_vec(p);
        let g = k_grad(pp);
        if g.norm() < tol {
            return Some(pp);
        }
        let step = k_hessian(pp).lu().solve(&g)?;
        p -= step;
        if !p.iter().all(|v| v.is_finite()) || p.norm() > 10.0 {
            return None;
        }
    }
    let pp = PillowPoint::from_vec(p);
    (k_grad(pp).norm() < tol).then_some(pp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalFlag {
    Interior,
    Boundary,
    Corner,
}

impl TerminalFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalFlag::Interior => "Interior",
            TerminalFlag::Boundary => "Boundary",
            TerminalFlag::Corner => "Corner",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub t: f64,
    pub p: PillowPoint,
}

/// A trajectory of the normalized gradient field, parametrized by `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowLine {
    pub samples: Vec<FlowSample>,
    pub terminal_flag: TerminalFlag,
    /// `|∇k|` at the exit point when the line ends on the boundary.
    pub exit_gradient: Option<f64>,
}

impl FlowLine {
    /// Largest `|k(p) − t|` over the samples.
    pub fn level_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (k_eval(s.p) - s.t).abs())
            .fold(0.0, f64::max)
    }

    pub fn last(&self) -> FlowSample {
        *self.samples.last().expect("flow lines are never empty")
    }

    /// CSV with columns `t,x,y,z,terminal_flag`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let flag = self.terminal_flag.as_str();
        out.write_record(["t", "x", "y", "z", "terminal_flag"])
            .map_err(csv_err)?;
        for s in &self.samples {
            out.write_record([
                fmt17(s.t),
                fmt17(s.p.x),
                fmt17(s.p.y),
                fmt17(s.p.z),
                flag.into(),
            ])
            .map_err(csv_err)?;
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Step control for the gradient-flow integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Base step in `t`.
    pub h: f64,
    /// Steps are halved while `|∇k|` is below this.
    pub halving_threshold: f64,
    pub max_steps: usize,
    pub r_corner: f64,
    pub tau_flow: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            h: 1e-3,
            halving_threshold: 0.05,
            max_steps: 1_000_000,
            r_corner: 1e-3,
            tau_flow: 1e-6,
        }
    }
}

fn field(p: Vector3<f64>) -> Result<Vector3<f64>> {
    let g = k_grad(PillowPoint::from_vec(p));
    let n2 = g.norm_squared();
    if n2 < 1e-16 {
        return Err(Error::Singular(format!(
            "|grad k| = {:e} at {:?}",
            n2.sqrt(),
            p.as_slice()
        )));
    }
    Ok(g / n2)
}

/// Pulls `p` back onto the level `k = t` along the gradient.
fn project_to_level(mut p: Vector3<f64>, t: f64) -> Vector3<f64> {
    for _ in 0..3 {
        let pp = PillowPoint::from_vec(p);
        let g = k_grad(pp);
        let n2 = g.norm_squared();
        let r = t - k_eval(pp);
        if r.abs() < 1e-15 || n2 < 1e-20 {
            break;
        }
        p += g * (r / n2);
    }
    p
}

/// Integrates `dp/dt = ∇k/|∇k|²` from level `t0` to `t1` (either direction).
fn integrate(
    p0: PillowPoint,
    t0: f64,
    t1: f64,
    ctrl: &StepControl,
    watch_corners: bool,
) -> Result<(Vec<FlowSample>, Option<usize>)> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut p = p0.vec();
    let mut t = t0;
    let mut samples = vec![FlowSample { t, p: p0 }];
    if watch_corners {
        if let Some(c) = p0.near_corner(ctrl.r_corner) {
            return Ok((samples, Some(c)));
        }
    }
    for _ in 0..ctrl.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok((samples, None));
        }
        let g = k_grad(PillowPoint::from_vec(p)).norm();
        let mut h = ctrl.h;
        while g < ctrl.halving_threshold && h > ctrl.h * (g / ctrl.halving_threshold).powi(2) {
            h *= 0.5;
            if h < 1e-300 {
                break;
            }
        }
        let last = h >= remaining;
        let h = if last { remaining } else { h } * dir;
        let k1 = field(p)?;
        let k2 = field(p + k1 * (h / 2.0))?;
        let k3 = field(p + k2 * (h / 2.0))?;
        let k4 = field(p + k3 * h)?;
        let t_next = if last { t1 } else { t + h };
        p = project_to_level(p + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0), t_next);
        t = t_next;
        let pp = PillowPoint::from_vec(p);
        samples.push(FlowSample { t, p: pp });
        if watch_corners {
            if let Some(c) = pp.near_corner(ctrl.r_corner) {
                return Ok((samples, Some(c)));
            }
        }
        if last {
            return Ok((samples, None));
        }
    }
    Err(Error::Singular(format!(
        "flow did not reach level {t1} within {} steps",
        ctrl.max_steps
    )))
}

/// The flow line `t ↦ α(p0, t)` from `k⁻¹(0)` up to level `t_end`.
pub fn flow_alpha(p0: PillowPoint, t_end: f64, ctrl: &StepControl) -> Result<FlowLine> {
    let k0 = k_eval(p0);
    if k0.abs() > ctrl.tau_flow {
        return Err(Error::Precondition(format!(
            "start point has k = {k0:e}, expected 0"
        )));
    }
    if !(t_end > 0.0 && t_end <= 1.0) {
        return Err(Error::Precondition(format!(
            "t_end must lie in (0,1], got {t_end}"
        )));
    }
    let (mut samples, corner) = integrate(p0, 0.0, t_end, ctrl, true)?;
    samples[0].t = 0.0;
    if corner.is_some() {
        return Ok(FlowLine {
            samples,
            terminal_flag: TerminalFlag::Corner,
            exit_gradient: None,
        });
    }
    let end = samples.last().expect("nonempty").p;
    if t_end >= 1.0 && end.on_boundary(1e-9) {
        let g = k_grad(end).norm();
        if g < 1e-8 {
            return Err(Error::Singular(format!("tangential exit at {end:?}")));
        }
        return Ok(FlowLine {
            samples,
            terminal_flag: TerminalFlag::Boundary,
            exit_gradient: Some(g),
        });
    }
    Ok(FlowLine {
        samples,
        terminal_flag: TerminalFlag::Interior,
        exit_gradient: None,
    })
}

/// Moves `p` (on level `k(p)`) along the flow to level `t_to`.
pub fn flow_to_level(p: PillowPoint, t_to: f64, ctrl: &StepControl) -> Result<PillowPoint> {
    let (samples, _) = integrate(p, k_eval(p), t_to, ctrl, false)?;
    Ok(samples.last().expect("nonempty").p)
}

/// Point of `k⁻¹(0)` on the ray through `u` (any nonzero direction).
pub fn level_zero_point(u: Vector3<f64>) -> Result<PillowPoint> {
    let n = u.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Domain("zero direction".into()));
    }
    let u = u / n;
    let f = |s: f64| k_eval(PillowPoint::from_vec(u * s));
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    Ok(PillowPoint::from_vec(project_to_level(
        u * (0.5 * (lo + hi)),
        0.0,
    )))
}

/// Point of `k⁻¹(0)` in a uniformly random direction.
pub fn random_level_zero_point<R: Rng + ?Sized>(rng: &mut R) -> Result<PillowPoint> {
    let u = Vector3::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    );
    level_zero_point(u)
}

/// The corner-directed start point `σ/2`, which lies on `k⁻¹(0)`.
pub fn corner_seed(corner: usize) -> PillowPoint {
    PillowPoint::from_vec(CORNERS[corner].vec() * 0.5)
}

/// Spherical angles (polar, azimuth) about the axis through `(1,1,1)`.
pub fn level_zero_chart(p: PillowPoint) -> [f64; 2] {
    let v = p.vec().normalize();
    let axis = Vector3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
    let e1 = Vector3::new(1.0, -1.0, 0.0) / 2f64.sqrt();
    let e2 = Vector3::new(1.0, 1.0, -2.0) / 6f64.sqrt();
    let polar = v.dot(&axis).clamp(-1.0, 1.0).acos();
    let azimuth = v.dot(&e2).atan2(v.dot(&e1));
    [polar, azimuth]
}

/// Landing points of both halves of a representation on `k⁻¹(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaCoords {
    pub sigma_minus: [f64; 2],
    pub sigma_plus: [f64; 2],
    pub t: f64,
    pub landing_minus: PillowPoint,
    pub landing_plus: PillowPoint,
}

/// Flows `W(R₋,S₋)` and `W(R₊,S₊)` to `k⁻¹(0)` and charts the landing points.
pub fn lambda_coords(rho: &SurfaceRep, delta: f64, ctrl: &StepControl) -> Result<LambdaCoords> {
    let t = rho.kappa()?;
    if t < -1.0 + delta || t > 1.0 - delta {
        return Err(Error::Precondition(format!(
            "kappa {t} outside [-1+{delta}, 1-{delta}]"
        )));
    }
    let land = |a: UnitQuat, b: UnitQuat| flow_to_level(goldman_w(a, b), 0.0, ctrl);
    let lm = land(rho.r_minus, rho.s_minus)?;
    let lp = land(rho.r_plus, rho.s_plus)?;
    Ok(LambdaCoords {
        sigma_minus: level_zero_chart(lm),
        sigma_plus: level_zero_chart(lp),
        t,
        landing_minus: lm,
        landing_plus: lp,
    })
}
