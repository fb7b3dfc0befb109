use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use genus2::cover::{reconstruct_lifts, ut_fiber};
use genus2::lagr::{intersect_heegaard, xi, Multicurve, SolverOptions};
use genus2::pillow::{find_critical_points, k_eval, CORNERS, ORIGIN};
use genus2::{SurfaceRep, UnitQuat};

fn wrap(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TAU - d)
}

#[test]
fn heegaard_points_at_eps_005() {
    let r = intersect_heegaard(0.05, &SolverOptions::default()).unwrap();
    assert_eq!(r.isolated_points.len(), 8);
    for p in &r.isolated_points {
        let t = if angle_dist(p.t, 0.0) < 1e-6 { 0.0 } else { PI };
        assert!(angle_dist(p.t, t) < 1e-6, "t = {}", p.t);
        let base = FRAC_PI_4 - t / 2.0;
        for v in [p.alpha, p.beta] {
            assert!(
                angle_dist(v, base).min(angle_dist(v, base + PI)) < 1e-6,
                "{v}"
            );
        }
        assert!(p.margin > 1e-4);
    }
}

#[test]
fn heegaard_circles_at_eps_0() {
    let r = intersect_heegaard(0.0, &SolverOptions::default()).unwrap();
    assert_eq!(r.circle_components.len(), 4);
    assert!(r.isolated_points.is_empty());
    for c in &r.circle_components {
        assert!(c.closure_error < 1e-6);
        assert!(c.max_residual < 1e-9);
    }
}

#[test]
fn pillowcase_corner_values() {
    let pts = find_critical_points(12, 1e-12).unwrap();
    assert_eq!(pts.len(), 5);
    assert_eq!(k_eval(ORIGIN), -1.0);
    for c in CORNERS {
        assert_eq!(k_eval(c), 1.0);
    }
}

#[test]
fn cover_fiber_examples() {
    let f = ut_fiber(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!(f.points.len(), 2);
    let h = 0.5f64.sqrt();
    let f = ut_fiber(&[h, 0.0, 0.0, 0.0, h, 0.0]).unwrap();
    assert_eq!(f.points.len(), 1);
    assert!(f.is_tau_fixed(1e-12));
}

#[test]
fn standard_rep_has_two_lifts() {
    let (i, j) = (UnitQuat::I, UnitQuat::J);
    let rho = SurfaceRep::new(i, j, j, i);
    let (span, lifts) = reconstruct_lifts(&rho).unwrap();
    assert_eq!(span.dim, 2);
    assert_eq!(lifts.len(), 2);
}

#[test]
fn xi_relation_and_multicurve_json() {
    for (g, th) in [(0.0, 0.0), (FRAC_PI_2, 0.0), (PI, FRAC_PI_2), (1.0, 2.5)] {
        let q = xi(g, th);
        assert!(q.relation_defect() < 1e-14);
    }
    let c = Multicurve::preset("example-c", 0.05, 16).unwrap();
    let back = Multicurve::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(c, back);
}
