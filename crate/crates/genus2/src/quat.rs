//! Quaternion arithmetic, `SU(2)` and `su(2)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for unit-norm checks.
pub const TAU_UNIT: f64 = 1e-12;

/// Products longer than this are renormalized.
const RENORM_CHAIN: usize = 16;

/// A quaternion `a + b i + c j + d k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 4]> for Quat {
    fn from(v: [f64; 4]) -> Self {
        Quat::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Quat> for [f64; 4] {
    fn from(q: Quat) -> Self {
        [q.a, q.b, q.c, q.d]
    }
}

impl Quat {
    pub const ZERO: Quat = Quat::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quat = Quat::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quat = Quat::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quat = Quat::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quat = Quat::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quat { a, b, c, d }
    }

    pub fn from_parts(re: f64, im: ImVec) -> Self {
        Quat::new(re, im.b, im.c, im.d)
    }

    pub fn re(self) -> f64 {
        self.a
    }

    pub fn im(self) -> ImVec {
        ImVec::new(self.b, self.c, self.d)
    }

    pub fn conj(self) -> Quat {
        Quat::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sq(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Inner product `Re(conj(self) * other)`.
    pub fn dot(self, other: Quat) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat::new(s * self.a, s * self.b, s * self.c, s * self.d)
    }

    pub fn to_array(self) -> [f64; 4] {
        self.into()
    }

    pub fn dist(self, other: Quat) -> f64 {
        (self - other).norm()
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, y: Quat) -> Quat {
        let x = self;
        Quat::new(
            x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d,
            x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c,
            x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
            x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a,
        )
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, y: Quat) -> Quat {
        Quat::new(self.a + y.a, self.b + y.b, self.c + y.c, self.d + y.d)
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, y: Quat) -> Quat {
        Quat::new(self.a - y.a, self.b - y.b, self.c - y.c, self.d - y.d)
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.a, self.b, self.c, self.d)
    }
}

pub fn mul(x: Quat, y: Quat) -> Quat {
    x * y
}

pub fn re(x: Quat) -> f64 {
    x.re()
}

pub fn im(x: Quat) -> ImVec {
    x.im()
}

pub fn conj(x: Quat) -> Quat {
    x.conj()
}

/// An element of `su(2)`, the imaginary quaternion `b i + c j + d k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct ImVec {
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[f64; 3]> for ImVec {
    fn from(v: [f64; 3]) -> Self {
        ImVec::new(v[0], v[1], v[2])
    }
}

impl From<ImVec> for [f64; 3] {
    fn from(v: ImVec) -> Self {
        [v.b, v.c, v.d]
    }
}

impl ImVec {
    pub const ZERO: ImVec = ImVec::new(0.0, 0.0, 0.0);

    pub const fn new(b: f64, c: f64, d: f64) -> Self {
        ImVec { b, c, d }
    }

    pub fn dot(self, o: ImVec) -> f64 {
        self.b * o.b + self.c * o.c + self.d * o.d
    }

    pub fn cross(self, o: ImVec) -> ImVec {
        ImVec::new(
            self.c * o.d - self.d * o.c,
            self.d * o.b - self.b * o.d,
            self.b * o.c - self.c * o.b,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> ImVec {
        ImVec::new(s * self.b, s * self.c, s * self.d)
    }

    pub fn add(self, o: ImVec) -> ImVec {
        ImVec::new(self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(self, o: ImVec) -> ImVec {
        ImVec::new(self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn to_quat(self) -> Quat {
        Quat::new(0.0, self.b, self.c, self.d)
    }

    pub fn to_array(self) -> [f64; 3] {
        self.into()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<S2Point> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(S2Point(self.scale(1.0 / n)))
        } else {
            None
        }
    }
}

/// A unit imaginary quaternion, a point of `S^2 ⊂ su(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct S2Point(ImVec);

impl From<S2Point> for [f64; 3] {
    fn from(p: S2Point) -> Self {
        p.0.into()
    }
}

impl<'de> Deserialize<'de> for S2Point {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 3]>::deserialize(de)?;
        S2Point::new(ImVec::from(v)).map_err(serde::de::Error::custom)
    }
}

impl S2Point {
    pub const I: S2Point = S2Point(ImVec::new(1.0, 0.0, 0.0));
    pub const J: S2Point = S2Point(ImVec::new(0.0, 1.0, 0.0));
    pub const K: S2Point = S2Point(ImVec::new(0.0, 0.0, 1.0));

    /// Checks `|v| = 1` within [`TAU_UNIT`].
    pub fn new(v: ImVec) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() <= TAU_UNIT {
            Ok(S2Point(v))
        } else {
            Err(Error::Domain(format!(
                "imaginary vector has norm {n}, expected 1"
            )))
        }
    }

    pub fn vec(self) -> ImVec {
        self.0
    }

    pub fn quat(self) -> UnitQuat {
        UnitQuat(self.0.to_quat())
    }

    pub fn neg(self) -> S2Point {
        S2Point(self.0.scale(-1.0))
    }
}

/// A unit quaternion, i.e. an element of `SU(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(into = "[f64; 4]")]
pub struct UnitQuat(Quat);

impl From<UnitQuat> for [f64; 4] {
    fn from(q: UnitQuat) -> Self {
        q.0.into()
    }
}

impl<'de> Deserialize<'de> for UnitQuat {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 4]>::deserialize(de)?;
        UnitQuat::new(Quat::from(v)).map_err(serde::de::Error::custom)
    }
}

impl UnitQuat {
    pub const ONE: UnitQuat = UnitQuat(Quat::ONE);
    pub const MINUS_ONE: UnitQuat = UnitQuat(Quat::new(-1.0, 0.0, 0.0, 0.0));
    pub const I: UnitQuat = UnitQuat(Quat::I);
    pub const J: UnitQuat = UnitQuat(Quat::J);
    pub const K: UnitQuat = UnitQuat(Quat::K);

    /// Checks `|q| = 1` within [`TAU_UNIT`].
    pub fn new(q: Quat) -> Result<Self> {
        let n = q.norm();
        if (n - 1.0).abs() <= TAU_UNIT {
            Ok(UnitQuat(q))
        } else {
            Err(Error::Domain(format!(
                "quaternion has norm {n}, expected 1"
            )))
        }
    }

    pub fn new_normalize(q: Quat) -> Result<Self> {
        let n = q.norm();
        if n > 0.0 && n.is_finite() {
            Ok(UnitQuat(q.scale(1.0 / n)))
        } else {
            Err(Error::Domain("cannot normalize a zero quaternion".into()))
        }
    }

    pub fn from_array(v: [f64; 4]) -> Result<Self> {
        UnitQuat::new(Quat::from(v))
    }

    pub fn quat(self) -> Quat {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.a
    }

    pub fn im(self) -> ImVec {
        self.0.im()
    }

    /// Conjugate, which is also the inverse.
    pub fn inv(self) -> UnitQuat {
        UnitQuat(self.0.conj())
    }

    pub fn neg(self) -> UnitQuat {
        UnitQuat(-self.0)
    }

    pub fn renormalize(self) -> UnitQuat {
        UnitQuat(self.0.scale(1.0 / self.0.norm()))
    }

    pub fn to_array(self) -> [f64; 4] {
        self.0.into()
    }

    pub fn dist(self, o: UnitQuat) -> f64 {
        self.0.dist(o.0)
    }

    /// `self * x * self^{-1}`.
    pub fn conjugate(self, x: UnitQuat) -> UnitQuat {
        self * x * self.inv()
    }

    /// Rotation of an imaginary vector by conjugation.
    pub fn rotate(self, v: ImVec) -> ImVec {
        (self.0 * v.to_quat() * self.0.conj()).im()
    }
}

impl Mul for UnitQuat {
    type Output = UnitQuat;
    fn mul(self, y: UnitQuat) -> UnitQuat {
        UnitQuat(self.0 * y.0)
    }
}

impl fmt::Display for UnitQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `cos θ + sin θ · P`.
pub fn exp_im(p: S2Point, theta: f64) -> UnitQuat {
    let (s, c) = theta.sin_cos();
    UnitQuat(Quat::from_parts(c, p.vec().scale(s)))
}

/// `exp_im` taking a raw imaginary vector; fails unless it has unit length.
pub fn exp_axis(v: ImVec, theta: f64) -> Result<UnitQuat> {
    Ok(exp_im(S2Point::new(v)?, theta))
}

/// Exponential of an arbitrary element of `su(2)`.
pub fn exp_vec(v: ImVec) -> UnitQuat {
    let n = v.norm();
    if n == 0.0 {
        return UnitQuat::ONE;
    }
    let (s, c) = n.sin_cos();
    UnitQuat(Quat::from_parts(c, v.scale(s / n)))
}

/// Ordered product, renormalized every few factors.
pub fn product<I: IntoIterator<Item = UnitQuat>>(factors: I) -> UnitQuat {
    let mut acc = UnitQuat::ONE;
    for (n, f) in factors.into_iter().enumerate() {
        acc = acc * f;
        if (n + 1) % RENORM_CHAIN == 0 {
            acc = acc.renormalize();
        }
    }
    acc
}

/// Group commutator `a b a^{-1} b^{-1}`.
pub fn commutator(a: UnitQuat, b: UnitQuat) -> UnitQuat {
    a * b * a.inv() * b.inv()
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> UnitQuat {
    loop {
        let q = Quat::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if q.norm() > 1e-6 {
            return UnitQuat(q.scale(1.0 / q.norm()));
        }
    }
}

pub fn random_s2<R: Rng + ?Sized>(rng: &mut R) -> S2Point {
    loop {
        let v = ImVec::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if v.norm() > 1e-6 {
            if let Some(p) = v.normalized() {
                return p;
            }
        }
    }
}

/// A unit vector orthogonal to `v`, chosen deterministically.
pub fn orthogonal_unit(v: ImVec) -> S2Point {
    let a = [v.b.abs(), v.c.abs(), v.d.abs()];
    let mut e = ImVec::ZERO;
    if a[0] <= a[1] && a[0] <= a[2] {
        e.b = 1.0;
    } else if a[1] <= a[2] {
        e.c = 1.0;
    } else {
        e.d = 1.0;
    }
    let w = e.sub(v.scale(v.dot(e) / v.dot(v).max(f64::MIN_POSITIVE)));
    w.normalized().unwrap_or(S2Point::I)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(x: Quat, y: Quat, tol: f64) -> bool {
        x.dist(y) < tol
    }

    #[test]
    fn hamilton_relations() {
        assert_eq!(Quat::I * Quat::J, Quat::K);
        assert_eq!(Quat::I * Quat::I, -Quat::ONE);
        assert_eq!(Quat::J * Quat::K, Quat::I);
        assert_eq!(Quat::K * Quat::I, Quat::J);
        let x = Quat::ONE + Quat::I;
        let y = Quat::ONE + Quat::J;
        assert_eq!(x * y, Quat::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn parts_and_conjugate() {
        assert_eq!(Quat::K.re(), 0.0);
        assert_eq!(
            Quat::new(2.0, 3.0, 0.0, 0.0).im(),
            ImVec::new(3.0, 0.0, 0.0)
        );
        assert_eq!((Quat::I * Quat::J).conj(), -Quat::K);
    }

    #[test]
    fn exp_values() {
        assert!(close(exp_im(S2Point::I, PI).quat(), -Quat::ONE, 1e-15));
        assert!(close(exp_im(S2Point::K, PI / 2.0).quat(), Quat::K, 1e-15));
        let q = exp_im(S2Point::J, PI / 3.0).quat();
        assert!(close(q, Quat::new(0.5, 0.0, 3f64.sqrt() / 2.0, 0.0), 1e-15));
        assert_eq!(exp_im(S2Point::J, 0.0), UnitQuat::ONE);
    }

    #[test]
    fn exp_axis_rejects_non_unit() {
        assert!(exp_axis(ImVec::new(1.0, 1.0, 0.0), 0.3).is_err());
        assert!(exp_axis(ImVec::new(0.0, 1.0, 0.0), 0.3).is_ok());
    }

    #[test]
    fn seeded_sampler_is_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            assert_eq!(random_unit(&mut r1), random_unit(&mut r2));
        }
    }

    #[test]
    fn haar_sample_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut sum = [0.0; 4];
        for _ in 0..n {
            let q = random_unit(&mut rng);
            assert!((q.quat().norm() - 1.0).abs() < TAU_UNIT);
            for (s, v) in sum.iter_mut().zip(q.to_array()) {
                *s += v;
            }
        }
        // each coordinate has variance 1/4
        let sigma = (0.25 / n as f64).sqrt();
        for s in sum {
            assert!((s / n as f64).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn orthogonal_unit_is_orthogonal() {
        for v in [
            ImVec::new(1.0, 0.0, 0.0),
            ImVec::new(0.3, -2.0, 0.1),
            ImVec::new(0.0, 0.0, 5.0),
        ] {
            let w = orthogonal_unit(v).vec();
            assert!(w.dot(v).abs() < 1e-12);
            assert!((w.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn serde_round_trip() {
        let q = exp_im(S2Point::K, 0.4);
        let s = serde_json::to_string(&q).unwrap();
        let back: UnitQuat = serde_json::from_str(&s).unwrap();
        assert_eq!(q, back);
        assert!(serde_json::from_str::<UnitQuat>("[2.0,0,0,0]").is_err());
    }
}
