//! Seeded samplers producing coordinate tables of sampled classes.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::cp3ref::{kappa_cp3, sample_level};
use crate::error::{Error, Result};
use crate::export::fmt17;
use crate::lagr::psi_param;
use crate::quat::{exp_im, orthogonal_unit, random_s2, random_unit, S2Point};
use crate::repvar::{complete_plus, fingerprint, SurfaceRep};

pub const TARGETS: [&str; 4] = ["level-set-kappa", "psi-image", "abelian-locus", "cp3-level"];

/// A header row and data rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// A representation with `κ = level`.
///
/// `κ = −1` gives anticommuting traceless pairs on both sides, `κ = 1` a point
/// of the `Ψ` image, and other levels a conjugate of `(e^{a𝐢}, e^{b𝐣})` with
/// `1 − 2 sin²a sin²b = level`, completed by a random `(R₊,S₊)`.
pub fn random_rep_at_level<R: Rng + ?Sized>(rng: &mut R, level: f64) -> Result<SurfaceRep> {
    if !(-1.0..=1.0).contains(&level) {
        return Err(Error::Domain(format!(
            "kappa level {level} outside [-1, 1]"
        )));
    }
    if level <= -1.0 + 1e-12 {
        let side = |rng: &mut R| {
            let u = random_s2(rng);
            let w = exp_im(u, rng.random_range(0.0..TAU)).rotate(orthogonal_unit(u.vec()).vec());
            let w = w.normalized().unwrap_or(orthogonal_unit(u.vec()));
            (u.quat(), w.quat())
        };
        let (rm, sm) = side(rng);
        let (rp, sp) = side(rng);
        return Ok(SurfaceRep::new(rm, sm, rp, sp));
    }
    if level >= 1.0 - 1e-12 {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let rho = psi_param(v[0], v[1], v[2], v[3], rng.random_range(0.0..=PI))?;
        return Ok(rho.conjugate_by(random_unit(rng)));
    }
    let need = 0.5 * (1.0 - level);
    loop {
        let s2a = rng.random_range(need..=1.0);
        let s2b = (need / s2a).min(1.0);
        let a = s2a.sqrt().asin();
        let b = s2b.sqrt().asin();
        let (a, b) = (
            if rng.random::<bool>() { a } else { PI - a },
            if rng.random::<bool>() { b } else { PI - b },
        );
        let g = random_unit(rng);
        let rm = g.conjugate(exp_im(S2Point::I, a));
        let sm = g.conjugate(exp_im(S2Point::J, b));
        if let Some(rho) = complete_plus(rng, rm, sm) {
            return Ok(rho);
        }
    }
}

fn rep_header() -> Vec<String> {
    let mut h = vec!["kappa".to_string()];
    h.extend((1..=10).map(|k| format!("fp{k}")));
    for name in ["rm", "sm", "rp", "sp"] {
        for c in ["a", "b", "c", "d"] {
            h.push(format!("{name}_{c}"));
        }
    }
    h
}

fn rep_row(rho: &SurfaceRep) -> Vec<String> {
    let mut r = vec![fmt17(rho.minus_commutator().re())];
    r.extend(fingerprint(rho).iter().map(|x| fmt17(*x)));
    for q in rho.images() {
        r.extend(q.to_array().iter().map(|x| fmt17(*x)));
    }
    r
}

/// Samples `n` points of `target`. `level` is the `κ` or `κ_CP³` value where
/// the target has one.
pub fn sample_table<R: Rng + ?Sized>(
    rng: &mut R,
    target: &str,
    level: f64,
    n: usize,
) -> Result<Table> {
    match target {
        "level-set-kappa" => {
            let rows = (0..n)
                .map(|_| random_rep_at_level(rng, level).map(|r| rep_row(&r)))
                .collect::<Result<_>>()?;
            Ok(Table {
                header: rep_header(),
                rows,
            })
        }
        "psi-image" => {
            let mut rows = Vec::with_capacity(n);
            for _ in 0..n {
                let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
                let g = rng.random_range(0.0..=PI);
                rows.push(rep_row(&psi_param(v[0], v[1], v[2], v[3], g)?));
            }
            Ok(Table {
                header: rep_header(),
                rows,
            })
        }
        "abelian-locus" => {
            let rows = (0..n)
                .map(|_| {
                    let p = random_s2(rng);
                    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
                    rep_row(&SurfaceRep::from_images(v.map(|a| exp_im(p, a))))
                })
                .collect();
            Ok(Table {
                header: rep_header(),
                rows,
            })
        }
        "cp3-level" => {
            let mut header: Vec<String> = ["x", "y", "z", "w"]
                .iter()
                .flat_map(|c| [format!("re_{c}"), format!("im_{c}")])
                .collect();
            header.push("kappa".into());
            let mut rows = Vec::with_capacity(n);
            for _ in 0..n {
                let p = sample_level(rng, level, 1e-9)?;
                let mut r: Vec<String> = p.v.iter().map(|x| fmt17(*x)).collect();
                r.push(fmt17(kappa_cp3(&p)));
                rows.push(r);
            }
            Ok(Table { header, rows })
        }
        _ => Err(Error::Domain(format!(
            "unknown sample target {target:?}; expected one of {}",
            TARGETS.join(", ")
        ))),
    }
}
