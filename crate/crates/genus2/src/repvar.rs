//! Representation tuples, conjugacy testing and the character `κ`.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{commutator, exp_im, random_s2, random_unit, ImVec, Quat, UnitQuat};

pub const TAU_REL: f64 = 1e-9;
pub const TAU_AB: f64 = 1e-8;

/// Images `(R₋, S₋, R₊, S₊)` of the standard generators of the genus-two surface group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRep {
    #[serde(rename = "R_minus")]
    pub r_minus: UnitQuat,
    #[serde(rename = "S_minus")]
    pub s_minus: UnitQuat,
    #[serde(rename = "R_plus")]
    pub r_plus: UnitQuat,
    #[serde(rename = "S_plus")]
    pub s_plus: UnitQuat,
}

impl SurfaceRep {
    pub const IDENTITY: SurfaceRep = SurfaceRep {
        r_minus: UnitQuat::ONE,
        s_minus: UnitQuat::ONE,
        r_plus: UnitQuat::ONE,
        s_plus: UnitQuat::ONE,
    };

    pub fn new(r_minus: UnitQuat, s_minus: UnitQuat, r_plus: UnitQuat, s_plus: UnitQuat) -> Self {
        SurfaceRep {
            r_minus,
            s_minus,
            r_plus,
            s_plus,
        }
    }

    pub fn from_images(w: [UnitQuat; 4]) -> Self {
        SurfaceRep::new(w[0], w[1], w[2], w[3])
    }

    pub fn images(&self) -> [UnitQuat; 4] {
        [self.r_minus, self.s_minus, self.r_plus, self.s_plus]
    }

    /// `[R₋,S₋]`.
    pub fn minus_commutator(&self) -> UnitQuat {
        commutator(self.r_minus, self.s_minus)
    }

    /// `|[R₋,S₋][R₊,S₊] − 1|`.
    pub fn relator_defect(&self) -> f64 {
        let rel = self.minus_commutator() * commutator(self.r_plus, self.s_plus);
        rel.quat().dist(Quat::ONE)
    }

    pub fn check(&self, tau_rel: f64) -> Result<()> {
        let d = self.relator_defect();
        if d <= tau_rel {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "relator defect {d:e} exceeds {tau_rel:e}"
            )))
        }
    }

    /// `Re([R₋,S₋])`, after checking the relator within [`TAU_REL`].
    pub fn kappa(&self) -> Result<f64> {
        self.kappa_with(TAU_REL)
    }

    pub fn kappa_with(&self, tau_rel: f64) -> Result<f64> {
        self.check(tau_rel)?;
        Ok(self.minus_commutator().re())
    }

    pub fn conjugate_by(&self, g: UnitQuat) -> SurfaceRep {
        SurfaceRep::from_images(self.images().map(|x| g.conjugate(x)))
    }

    pub fn fingerprint(&self) -> [f64; 10] {
        fingerprint(self)
    }
}

pub fn relator_defect(rho: &SurfaceRep) -> f64 {
    rho.relator_defect()
}

pub fn kappa(rho: &SurfaceRep) -> Result<f64> {
    rho.kappa()
}

/// Six traceless unit quaternions with product one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SixTuple {
    pub x: [UnitQuat; 6],
}

#[derive(Serialize, Deserialize)]
struct SixTupleFields {
    x1: UnitQuat,
    x2: UnitQuat,
    x3: UnitQuat,
    x4: UnitQuat,
    x5: UnitQuat,
    x6: UnitQuat,
}

impl Serialize for SixTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [x1, x2, x3, x4, x5, x6] = self.x;
        SixTupleFields {
            x1,
            x2,
            x3,
            x4,
            x5,
            x6,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SixTuple {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let f = SixTupleFields::deserialize(de)?;
        SixTuple::new([f.x1, f.x2, f.x3, f.x4, f.x5, f.x6]).map_err(serde::de::Error::custom)
    }
}

impl SixTuple {
    /// Validates tracelessness and the product relation within [`TAU_REL`].
    pub fn new(x: [UnitQuat; 6]) -> Result<Self> {
        let s = SixTuple { x };
        let (tr, prod) = (s.trace_defect(), s.product_defect());
        if tr > TAU_REL || prod > TAU_REL {
            return Err(Error::Precondition(format!(
                "not a traceless six-tuple: trace defect {tr:e}, product defect {prod:e}"
            )));
        }
        Ok(s)
    }

    pub fn new_unchecked(x: [UnitQuat; 6]) -> Self {
        SixTuple { x }
    }

    /// `max |Re xᵢ|`.
    pub fn trace_defect(&self) -> f64 {
        self.x.iter().map(|q| q.re().abs()).fold(0.0, f64::max)
    }

    /// `|x₁x₂x₃x₄x₅x₆ − 1|`.
    pub fn product_defect(&self) -> f64 {
        crate::quat::product(self.x).quat().dist(Quat::ONE)
    }

    pub fn defect(&self) -> f64 {
        self.trace_defect().max(self.product_defect())
    }
}

/// Traceless meridian images `(a,b,c,d)` with `ba = cd`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourTuple {
    pub a: UnitQuat,
    pub b: UnitQuat,
    pub c: UnitQuat,
    pub d: UnitQuat,
}

impl FourTuple {
    pub fn new(a: UnitQuat, b: UnitQuat, c: UnitQuat, d: UnitQuat) -> Result<Self> {
        let t = FourTuple { a, b, c, d };
        let defect = t.defect();
        if defect > TAU_REL {
            return Err(Error::Precondition(format!(
                "not a traceless four-tuple with ba = cd: defect {defect:e}"
            )));
        }
        Ok(t)
    }

    pub(crate) fn new_unchecked(a: UnitQuat, b: UnitQuat, c: UnitQuat, d: UnitQuat) -> Self {
        FourTuple { a, b, c, d }
    }

    pub fn images(&self) -> [UnitQuat; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `|ba − cd|`.
    pub fn relation_defect(&self) -> f64 {
        (self.b * self.a).dist(self.c * self.d)
    }

    pub fn defect(&self) -> f64 {
        let tr = self
            .images()
            .iter()
            .map(|q| q.re().abs())
            .fold(0.0, f64::max);
        tr.max(self.relation_defect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrbitType {
    NonAbelian,
    AbelianNonCentral,
    Central,
}

/// Stabilizer type of the subgroup generated by `images`.
pub fn orbit_type(images: &[UnitQuat], tau_ab: f64) -> OrbitType {
    if images.iter().all(|q| q.im().norm() < tau_ab) {
        return OrbitType::Central;
    }
    for (n, p) in images.iter().enumerate() {
        for q in &images[n + 1..] {
            if p.im().cross(q.im()).norm() >= tau_ab {
                return OrbitType::NonAbelian;
            }
        }
    }
    OrbitType::AbelianNonCentral
}

/// Outcome of a conjugacy test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjMatch {
    pub equivalent: bool,
    pub residual: f64,
    pub witness: Option<UnitQuat>,
}

/// Best `g` with `g w1ᵢ g⁻¹ ≈ w2ᵢ`, and `sqrt(Σ |g w1ᵢ g⁻¹ − w2ᵢ|²)`.
///
/// Absolute orientation on the imaginary parts: the top eigenvector of the
/// 4×4 symmetric matrix built from the cross-correlation is the rotation.
pub fn align(w1: &[UnitQuat], w2: &[UnitQuat]) -> (UnitQuat, f64) {
    assert_eq!(w1.len(), w2.len(), "align: length mismatch");
    let mut s = Matrix3::<f64>::zeros();
    for (p, q) in w1.iter().zip(w2) {
        let a = p.im().to_array();
        let b = q.im().to_array();
        for r in 0..3 {
            for c in 0..3 {
                s[(r, c)] += a[r] * b[c];
            }
        }
    }
    let g = if s.abs().max() == 0.0 {
        UnitQuat::ONE
    } else {
        let (sxx, sxy, sxz) = (s[(0, 0)], s[(0, 1)], s[(0, 2)]);
        let (syx, syy, syz) = (s[(1, 0)], s[(1, 1)], s[(1, 2)]);
        let (szx, szy, szz) = (s[(2, 0)], s[(2, 1)], s[(2, 2)]);
        let n = Matrix4::new(
            sxx + syy + szz,
            syz - szy,
            szx - sxz,
            sxy - syx,
            syz - szy,
            sxx - syy - szz,
            sxy + syx,
            szx + sxz,
            szx - sxz,
            sxy + syx,
            -sxx + syy - szz,
            syz + szy,
            sxy - syx,
            szx + sxz,
            syz + szy,
            -sxx - syy + szz,
        );
        let eig = SymmetricEigen::new(n);
        let top = eig.eigenvalues.imax();
        let v = eig.eigenvectors.column(top);
        UnitQuat::new_normalize(Quat::new(v[0], v[1], v[2], v[3])).unwrap_or(UnitQuat::ONE)
    };
    let res = w1
        .iter()
        .zip(w2)
        .map(|(p, q)| g.conjugate(*p).quat().dist(q.quat()).powi(2))
        .sum::<f64>()
        .sqrt();
    (g, res)
}

/// Tests whether `w2` is a simultaneous conjugate of `w1` within `tau`.
pub fn conj_equivalent(w1: &[UnitQuat], w2: &[UnitQuat], tau: f64) -> ConjMatch {
    if w1.len() != w2.len() {
        return ConjMatch {
            equivalent: false,
            residual: f64::INFINITY,
            witness: None,
        };
    }
    let re_gap = w1
        .iter()
        .zip(w2)
        .map(|(p, q)| (p.re() - q.re()).abs())
        .fold(0.0, f64::max);
    if re_gap > tau {
        return ConjMatch {
            equivalent: false,
            residual: re_gap,
            witness: None,
        };
    }
    let (g, residual) = align(w1, w2);
    let equivalent = residual <= tau;
    ConjMatch {
        equivalent,
        residual,
        witness: equivalent.then_some(g),
    }
}

/// `conj_equivalent` on surface representations.
pub fn reps_equivalent(a: &SurfaceRep, b: &SurfaceRep, tau: f64) -> ConjMatch {
    conj_equivalent(&a.images(), &b.images(), tau)
}

/// Real parts of the words
/// `r₋, s₋, r₋s₋, r₊, s₊, r₊s₊, r₋r₊, s₋s₊, r₋s₋r₊, r₋s₋r₊s₊`.
pub fn fingerprint(rho: &SurfaceRep) -> [f64; 10] {
    let SurfaceRep {
        r_minus: rm,
        s_minus: sm,
        r_plus: rp,
        s_plus: sp,
    } = *rho;
    let rs_m = rm * sm;
    [
        rm.re(),
        sm.re(),
        rs_m.re(),
        rp.re(),
        sp.re(),
        (rp * sp).re(),
        (rm * rp).re(),
        (sm * sp).re(),
        (rs_m * rp).re(),
        (rs_m * rp * sp).re(),
    ]
}

/// Haar-random `(R₋,S₋)` completed to a nonabelian representation.
pub fn random_nonabelian_rep<R: Rng + ?Sized>(rng: &mut R) -> SurfaceRep {
    loop {
        let rm = random_unit(rng);
        let sm = random_unit(rng);
        if let Some(rho) = complete_plus(rng, rm, sm) {
            if orbit_type(&rho.images(), 1e-3) == OrbitType::NonAbelian {
                return rho;
            }
        }
    }
}

/// Random `(R₊,S₊)` with `[R₊,S₊] = [R₋,S₋]⁻¹`, or `None` if this draw fails.
///
/// `R₊ = e^{φP}` for a random axis `P` with `φ` chosen so that
/// `R̄₊[R₋,S₋]⁻¹` is conjugate to `R̄₊`; `S₊` is then a random conjugator.
/// Needs `[R₋,S₋] ≠ ±1`.
pub fn complete_plus<R: Rng + ?Sized>(
    rng: &mut R,
    rm: UnitQuat,
    sm: UnitQuat,
) -> Option<SurfaceRep> {
    let d = commutator(rm, sm).inv();
    let p = random_s2(rng);
    let pd = p.vec().dot(d.im());
    let one_minus = 1.0 - d.re();
    if one_minus < 1e-6 || pd.abs() < 1e-6 {
        return None;
    }
    let mut phi = one_minus.atan2(pd);
    if rng.random::<bool>() {
        phi += std::f64::consts::PI;
    }
    let rp = exp_im(p, phi);
    let e = rp.inv() * d;
    let (u, w) = (rp.inv().im().normalized()?, e.im().normalized()?);
    if rp.im().norm() < 1e-4 {
        return None;
    }
    let q = rotation_between(u.vec(), w.vec())?;
    let psi = rng.random_range(0.0..std::f64::consts::TAU);
    let sp = q * exp_im(u, psi);
    let rho = SurfaceRep::new(rm, sm, rp, sp);
    (rho.relator_defect() < 1e-12).then_some(rho)
}

/// Unit quaternion `q` with `q u q̄ = w` for unit `u`, `w`.
pub(crate) fn rotation_between(u: ImVec, w: ImVec) -> Option<UnitQuat> {
    let c = u.dot(w);
    if c < -1.0 + 1e-12 {
        let axis = crate::quat::orthogonal_unit(u);
        return Some(axis.quat());
    }
    UnitQuat::new_normalize(Quat::from_parts(1.0 + c, u.cross(w))).ok()
}

/// Random traceless six-tuple: `x₁..x₄` uniform on `S²`, then `x₅ ⟂ Im(M)` and
/// `x₆ = −x₅M` where `M = conj(x₁x₂x₃x₄)`.
pub fn random_sixtuple<R: Rng + ?Sized>(rng: &mut R) -> SixTuple {
    loop {
        let x: [UnitQuat; 4] = std::array::from_fn(|_| random_s2(rng).quat());
        let m = (x[0] * x[1] * x[2] * x[3]).inv();
        let v = random_s2(rng).vec();
        let axis = m.im();
        let w = if axis.norm() < 1e-9 {
            v
        } else {
            let a = axis.scale(1.0 / axis.norm());
            v.sub(a.scale(a.dot(v)))
        };
        let Some(x5) = w.normalized() else { continue };
        let x5 = x5.quat();
        let x6 = (x5 * m).neg();
        let x6 = UnitQuat::new_normalize(Quat::from_parts(0.0, x6.im()))
            .expect("x6 has unit imaginary part");
        return SixTuple::new_unchecked([x[0], x[1], x[2], x[3], x5, x6]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::S2Point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: f64, b: f64, c: f64, d: f64) -> UnitQuat {
        UnitQuat::new_normalize(Quat::new(a, b, c, d)).unwrap()
    }

    const I: UnitQuat = UnitQuat::I;
    const J: UnitQuat = UnitQuat::J;

    #[test]
    fn relator_examples() {
        assert!(SurfaceRep::new(I, J, J, I).relator_defect() < 1e-15);
        assert_eq!(SurfaceRep::IDENTITY.relator_defect(), 0.0);
        // [i,j] = -1, so [i,j][i,j] = 1 as well
        assert!(SurfaceRep::new(I, J, I, J).relator_defect() < 1e-15);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(SurfaceRep::new(I, J, J, I).kappa().unwrap(), -1.0);
        let a = exp_im(S2Point::I, 0.3);
        let b = exp_im(S2Point::I, 1.1);
        let ab = SurfaceRep::new(a, b, b, a);
        assert!((ab.kappa().unwrap() - 1.0).abs() < 1e-15);
        let bad = SurfaceRep::new(I, J, UnitQuat::ONE, UnitQuat::ONE);
        assert!(bad.kappa().is_err());
    }

    #[test]
    fn kappa_zero_from_45_degree_pair() {
        let rm = I;
        let sm = q(0.0, 1.0, 1.0, 0.0);
        // complete with the reversed pair on the plus side
        let rho = SurfaceRep::new(rm, sm, sm, rm);
        assert!(rho.relator_defect() < 1e-15);
        assert!(rho.kappa().unwrap().abs() < 1e-15);
        let pw = crate::pillow::kappa_from_w(rm, sm);
        assert!(pw.abs() < 1e-15);
    }

    #[test]
    fn orbit_type_examples() {
        assert_eq!(orbit_type(&[I, J], TAU_AB), OrbitType::NonAbelian);
        let a = exp_im(S2Point::I, 0.3);
        let b = exp_im(S2Point::I, 1.1);
        assert_eq!(orbit_type(&[a, b], TAU_AB), OrbitType::AbelianNonCentral);
        assert_eq!(
            orbit_type(&[UnitQuat::ONE, UnitQuat::MINUS_ONE], TAU_AB),
            OrbitType::Central
        );
    }

    #[test]
    fn conj_examples() {
        let m = conj_equivalent(&[I, J], &[I, J.neg()], 1e-10);
        assert!(m.equivalent);
        let g = m.witness.unwrap();
        // rotation by pi about i, i.e. g = ±i
        assert!(g.quat().dist(I.quat()) < 1e-9 || g.quat().dist(-I.quat()) < 1e-9);
        let e = exp_im(S2Point::I, std::f64::consts::FRAC_PI_2);
        assert!(e.conjugate(J).dist(J.neg()) < 1e-15);

        let w = q(0.0, 0.9, 0.19f64.sqrt(), 0.0);
        assert!(!conj_equivalent(&[I, J], &[I, w], 1e-6).equivalent);
    }

    #[test]
    fn conj_random_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let w: Vec<UnitQuat> = (0..4).map(|_| random_unit(&mut rng)).collect();
            let g = random_unit(&mut rng);
            let w2: Vec<UnitQuat> = w.iter().map(|x| g.conjugate(*x)).collect();
            let m = conj_equivalent(&w, &w2, 1e-10);
            assert!(m.equivalent, "residual {}", m.residual);
            let back = conj_equivalent(&w2, &w, 1e-10);
            assert!((m.residual - back.residual).abs() < 1e-9);
        }
    }

    #[test]
    fn central_tuples_align_trivially() {
        let w = [UnitQuat::ONE, UnitQuat::MINUS_ONE];
        let m = conj_equivalent(&w, &w, 1e-12);
        assert!(m.equivalent);
        assert_eq!(m.witness, Some(UnitQuat::ONE));
    }

    #[test]
    fn fingerprint_examples() {
        let f = fingerprint(&SurfaceRep::new(I, J, J, I));
        assert_eq!(&f[..3], &[0.0, 0.0, 0.0]);
        let id = fingerprint(&SurfaceRep::IDENTITY);
        assert!(id.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn nonabelian_sampler_produces_reps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let rho = random_nonabelian_rep(&mut rng);
            assert!(rho.relator_defect() < 1e-12);
            assert_eq!(orbit_type(&rho.images(), TAU_AB), OrbitType::NonAbelian);
        }
    }

    #[test]
    fn sixtuple_sampler_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let s = random_sixtuple(&mut rng);
            assert!(s.defect() < 1e-12, "defect {}", s.defect());
        }
    }

    #[test]
    fn rep_json_field_names() {
        let s = serde_json::to_string(&SurfaceRep::new(I, J, J, I)).unwrap();
        assert!(s.contains("\"R_minus\":[0.0,1.0,0.0,0.0]"));
        let six = SixTuple::new([I; 6]).unwrap_err();
        assert!(matches!(six, Error::Precondition(_)));
    }
}
