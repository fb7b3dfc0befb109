//! Property tests over the public API.

use std::f64::consts::{PI, TAU};

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use genus2::cover::{tau, ut_fiber, ut_project};
use genus2::cp3ref::{act, kappa_cp3, CP3Point, C64};
use genus2::lagr::{i1_canonical, i1_dist, i1_eps, l_param, twist_flow, LagrParam};
use genus2::pillow::{goldman_w, k_eval};
use genus2::quat::{commutator, exp_im};
use genus2::repvar::{fingerprint, random_nonabelian_rep, reps_equivalent};
use genus2::{Quat, RunConfig, S2Point, SurfaceRep, UnitQuat};

fn unit() -> impl Strategy<Value = UnitQuat> {
    proptest::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from zero", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 1e-2
        })
        .prop_map(|v| UnitQuat::new_normalize(Quat::new(v[0], v[1], v[2], v[3])).unwrap())
}

fn axis() -> impl Strategy<Value = S2Point> {
    unit().prop_filter_map("imaginary part too short", |q| q.im().normalized())
}

fn angle() -> impl Strategy<Value = f64> {
    -TAU..TAU
}

fn rep() -> impl Strategy<Value = SurfaceRep> {
    any::<u64>().prop_map(|seed| random_nonabelian_rep(&mut ChaCha8Rng::seed_from_u64(seed)))
}

fn sphere6() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 6)
        .prop_filter("away from zero", |v| {
            v.iter().map(|x| x * x).sum::<f64>() > 1e-2
        })
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unit_products_stay_unit(a in unit(), b in unit()) {
        assert_abs_diff_eq!((a * b).quat().norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!((a * a.inv()).re(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_identity(a in unit(), b in unit()) {
        let lhs = (a * b).re() + (a.inv() * b).re();
        assert_abs_diff_eq!(lhs, 2.0 * a.re() * b.re(), epsilon = 1e-14);
    }

    #[test]
    fn exp_is_a_homomorphism(p in axis(), s in angle(), t in angle()) {
        prop_assert!((exp_im(p, s) * exp_im(p, t)).dist(exp_im(p, s + t)) < 1e-13);
    }

    #[test]
    fn kappa_is_k_of_w(a in unit(), b in unit()) {
        assert_abs_diff_eq!(k_eval(goldman_w(a, b)), commutator(a, b).re(), epsilon = 1e-13);
    }

    #[test]
    fn conjugation_invariants(rho in rep(), g in unit()) {
        prop_assert!(rho.relator_defect() < 1e-12);
        let other = rho.conjugate_by(g);
        assert_abs_diff_eq!(rho.kappa().unwrap(), other.kappa().unwrap(), epsilon = 1e-12);
        let (f, h) = (fingerprint(&rho), fingerprint(&other));
        for (x, y) in f.iter().zip(&h) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-12);
        }
        prop_assert!(reps_equivalent(&rho, &other, 1e-9).equivalent);
    }

    #[test]
    fn fibers_are_tau_orbits(v in sphere6()) {
        let f = ut_fiber(&v).unwrap();
        prop_assert!(f.is_single_tau_orbit(1e-9));
        for p in &f.points {
            let back = ut_project(p).unwrap();
            for (x, y) in back.iter().zip(&v) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-12);
            }
            let t = tau(p);
            prop_assert!(f.points.iter().any(|q| q.dist(&t) < 1e-9));
        }
        for b in f.bounds {
            prop_assert!(b <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn l_family_kappa_and_g_action(g in angle(), th in angle(), a in angle(), b in angle()) {
        let p = LagrParam::new(g, th, a, b);
        let rho = l_param(p);
        assert_abs_diff_eq!(rho.kappa().unwrap(), (g - th).cos(), epsilon = 1e-12);
        for q in [p.sigma0(), p.sigma1(), p.sigma2()] {
            prop_assert!(reps_equivalent(&rho, &l_param(q), 1e-8).equivalent);
        }
    }

    #[test]
    fn twist_flow_keeps_kappa(g in 0.2f64..2.9, a in angle(), b in angle(), s in angle()) {
        let rho = l_param(LagrParam::new(g, 0.0, a, b));
        let f = twist_flow(&rho, s).unwrap();
        prop_assert!(f.relator_defect() < 1e-12);
        assert_abs_diff_eq!(f.kappa().unwrap(), rho.kappa().unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn i1_identification(t in 0.0f64..TAU, a in angle(), b in angle(), eps in -0.1f64..0.1) {
        let q = [t, a, b];
        let shifted = [t + TAU, a + PI, b + PI];
        prop_assert!(i1_dist(i1_canonical(q), i1_canonical(shifted)) < 1e-12);
        let x = i1_eps(eps, t, a, b);
        let y = i1_eps(eps, t + TAU, a + PI, b + PI);
        prop_assert!(reps_equivalent(&x, &y, 1e-9).equivalent);
    }

    #[test]
    fn kappa_cp3_phase_and_range(z in proptest::array::uniform8(-1.0f64..1.0), phi in angle()) {
        prop_assume!(z.iter().map(|x| x * x).sum::<f64>() > 1e-2);
        let p = CP3Point::new(std::array::from_fn(|k| C64::new(z[2 * k], z[2 * k + 1]))).unwrap();
        let k = kappa_cp3(&p);
        prop_assert!(k.abs() <= 1.0 + 1e-15);
        assert_abs_diff_eq!(kappa_cp3(&p.rephase(phi)), k, epsilon = 1e-14);
        let swap = nalgebra::Matrix4::new(
            0.0, -1.0, 0.0, 0.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        assert_abs_diff_eq!(kappa_cp3(&act(&swap, &p)), k, epsilon = 1e-14);
    }

    #[test]
    fn config_pairs_round_trip(seed in any::<u64>(), tol in 1e-15f64..1.0, n in 1usize..1_000_000) {
        let mut cfg = RunConfig::default();
        cfg.apply_pair(&format!("seed={seed}")).unwrap();
        cfg.apply_pair(&format!("margin_min={tol:e}")).unwrap();
        cfg.apply_pair(&format!("samples.quat={n}")).unwrap();
        prop_assert_eq!(cfg.seed, seed);
        prop_assert_eq!(cfg.tolerances.margin_min, tol);
        prop_assert_eq!(cfg.samples("quat", 0), n);
    }
}
