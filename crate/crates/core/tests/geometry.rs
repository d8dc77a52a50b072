use tgwave::geometry::*;
use tgwave::pde::Case;

#[test]
fn metric_examples() {
    let h2 = SpaceformChart::hyperbolic(2);
    let g = metric_at(&h2, &[0.7, 0.0]).unwrap();
    assert!((g.get(0, 0) - 1.0).abs() < 1e-14 && g.get(0, 1).abs() < 1e-14 && (g.get(1, 1) - 1.0).abs() < 1e-14);
    let g = metric_at(&h2, &[0.0, 0.5]).unwrap();
    assert!((g.get(0, 0) - 0.5f64.cosh().powi(2)).abs() < 1e-12);
    assert!((g.get(0, 0) - 1.27154).abs() < 1e-5);
    assert!((g.get(1, 1) - 1.0).abs() < 1e-14);
    let g = metric_at(&SpaceformChart::sphere(2), &[0.0, 0.5]).unwrap();
    assert!((g.get(0, 0) - 0.77015).abs() < 1e-5);
    assert!(g.is_positive_definite());
}

#[test]
fn metric_errors() {
    assert!(SpaceformChart::new(2, 3, 1.0).is_err());
    assert!(metric_at(&SpaceformChart::hyperbolic(3), &[0.0, 0.5]).is_err());
    assert!(metric_at(&SpaceformChart::sphere(2), &[0.0, 2.0]).is_err());
}

#[test]
fn christoffel_derivative_examples() {
    let h = christoffel_jet(&SpaceformChart::hyperbolic(2), 1e-3).unwrap();
    assert!((h.dgamma(1, 1, 0, 0) + 1.0).abs() < 1e-5);
    let s = christoffel_jet(&SpaceformChart::sphere(2), 1e-3).unwrap();
    assert!((s.dgamma(1, 1, 0, 0) - 1.0).abs() < 1e-5);
    for step in [1e-2, 1e-3] {
        let j = christoffel_jet(&SpaceformChart::hyperbolic(3), step).unwrap();
        for k in 0..3 {
            for a in 0..3 {
                for b in 0..3 {
                    assert!(j.dgamma(0, k, a, b).abs() < 1e-8);
                    assert!(j.gamma(k, a, b).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn jet_symmetry_and_order_two() {
    let chart = SpaceformChart::sphere(3);
    let a = christoffel_jet(&chart, 2e-2).unwrap();
    let b = christoffel_jet(&chart, 1e-2).unwrap();
    let exact = 1.0;
    let ea = (a.dgamma(1, 1, 0, 0) - exact).abs();
    let eb = (b.dgamma(1, 1, 0, 0) - exact).abs();
    let order = (ea / eb).log2();
    assert!((order - 2.0).abs() < 0.3, "observed order {order}");
    for m in 0..3 {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((b.dgamma(m, k, i, j) - b.dgamma(m, k, j, i)).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn riemann_examples() {
    let g = MetricValue::identity(2);
    let r = riemann_spaceform(1, &g);
    let at = |r: &[f64], i: usize, j: usize, k: usize, l: usize| r[((i * 2 + j) * 2 + k) * 2 + l];
    assert_eq!(at(&r, 0, 1, 0, 1), 1.0);
    assert_eq!(at(&r, 0, 0, 0, 1), 0.0);
    let r = riemann_spaceform(-1, &g);
    assert_eq!(at(&r, 0, 1, 1, 0), 1.0);
}

#[test]
fn null_structure_reports() {
    for chart in [SpaceformChart::hyperbolic(2), SpaceformChart::sphere(2), SpaceformChart::hyperbolic(3), SpaceformChart::sphere(3)] {
        let rep = verify_null_structure(&christoffel_jet(&chart, 1e-3).unwrap(), 1e-4);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.christoffder2_residual <= 1e-4);
        assert_eq!(rep.sign_convention, -1);
    }
    let flat = verify_null_structure(&christoffel_jet(&SpaceformChart::flat(3), 1e-3).unwrap(), 1e-12);
    assert!(flat.pass);
    assert_eq!(flat.gamma0_max, 0.0);
    assert_eq!(flat.christoffder2_residual, 0.0);
}

#[test]
fn sign_convention_is_stable() {
    assert_eq!(calibrate_sign_convention(), calibrate_sign_convention());
}

#[test]
fn coupling_masses() {
    let s3 = christoffel_jet(&SpaceformChart::sphere(3), 1e-3).unwrap();
    let h3 = christoffel_jet(&SpaceformChart::hyperbolic(3), 1e-3).unwrap();
    for (jet, case) in [(&s3, Case::Timelike), (&h3, Case::Spacelike)] {
        let c = coupling_from_geometry(jet, case).unwrap();
        assert!((c.kg_mass - 1.0).abs() < 1e-5, "{case:?}: {}", c.kg_mass);
    }
    assert!(coupling_from_geometry(&h3, Case::Timelike).is_err());
    assert!(coupling_from_geometry(&s3, Case::Spacelike).is_err());
}
