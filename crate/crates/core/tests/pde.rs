use proptest::prelude::*;
use tgwave::pde::*;

fn state(n: usize) -> PointState {
    PointState::zero(n)
}

fn no_cubic(case: Case) -> CouplingCoefficients {
    CouplingCoefficients::model(case, 2).unwrap().without_cubic()
}

#[test]
fn timelike_examples() {
    let c = no_cubic(Case::Timelike);
    let mut s = state(2);
    s.vec_u = vec![0.1];
    s.dvec_u = vec![[0.2, 0.0, 0.0, 0.0]];
    let (f1, f) = rhs_timelike(&s, &c);
    assert!((f1 + 0.04).abs() < 1e-15 && f[0] == 0.0);

    let mut s = state(2);
    s.vec_u = vec![0.1];
    s.du1 = [0.5, 0.0, 0.0, 0.0];
    let (f1, f) = rhs_timelike(&s, &c);
    assert!(f1 == 0.0 && (f[0] - 0.1).abs() < 1e-15);
}

#[test]
fn cubic_example() {
    let mut c = CouplingCoefficients::zeros(Case::Timelike, 2);
    for e in 0..2 {
        *c.uuu_mut(e, 0, 0, 0) = 1.0;
    }
    let mut s = state(2);
    s.vec_u = vec![0.2];
    let (f1, f) = rhs(&s, &c);
    assert!((f1 - 0.008).abs() < 1e-15 && (f[0] - 0.008).abs() < 1e-15);
}

#[test]
fn spacelike_examples() {
    let c = no_cubic(Case::Spacelike);
    let mut s = state(2);
    s.vec_u = vec![0.1];
    s.dvec_u = vec![[0.0, 0.2, 0.0, 0.0]];
    let (f1, _) = rhs_spacelike(&s, &c);
    assert!((f1 - 0.04).abs() < 1e-15);

    let mut s = state(2);
    s.vec_u = vec![0.1];
    s.du1 = [0.0, 0.5, 0.0, 0.0];
    let (_, f) = rhs_spacelike(&s, &c);
    assert!((f[0] + 0.1).abs() < 1e-15);

    let full = CouplingCoefficients::model(Case::Spacelike, 4).unwrap();
    let (f1, f) = rhs(&state(4), &full);
    assert_eq!(f1, 0.0);
    assert!(f.iter().all(|x| *x == 0.0));
}

#[test]
fn null_form_examples() {
    assert_eq!(null_form(&[1.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]), -1.0);
    assert_eq!(null_form(&[1.0, 1.0, 0.0, 0.0], &[1.0, 1.0, 0.0, 0.0]), 0.0);
    assert_eq!(null_form(&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]), 0.0);
}

#[test]
fn cancellation_examples() {
    assert_eq!(quadratic_cancellation_residual(&[1.0, 2.0], &[3.0, 4.0], 5.0), 0.0);
    assert_eq!(quadratic_cancellation_residual(&[0.0, 0.0], &[3.0, 4.0], 5.0), 0.0);
}

#[test]
fn coefficient_json_roundtrip() {
    let c = CouplingCoefficients::model(Case::Timelike, 3).unwrap();
    let back = CouplingCoefficients::from_json(&c.to_json()).unwrap();
    assert_eq!(c, back);
}

fn arb_state(n: usize) -> impl Strategy<Value = (PointState, f64)> {
    let v = || prop::collection::vec(-1.0f64..1.0, n - 1);
    let g = || prop::array::uniform4(-1.0f64..1.0);
    (-1.0f64..1.0, v(), g(), prop::collection::vec(g(), n - 1), 0.01f64..100.0).prop_map(|(u1, vec_u, du1, dvec_u, scale)| {
        let sc = |x: f64| x * scale;
        (
            PointState {
                u1: sc(u1),
                vec_u: vec_u.into_iter().map(sc).collect(),
                du1: du1.map(sc),
                dvec_u: dvec_u.into_iter().map(|d| d.map(sc)).collect(),
            },
            scale,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn cancellation_holds_to_rounding((s, scale) in arb_state(4)) {
        let ubar = s.vec_u.clone();
        let dt: Vec<f64> = s.dvec_u.iter().map(|d| d[0]).collect();
        let r = quadratic_cancellation_residual(&ubar, &dt, s.du1[0]);
        prop_assert!(r.abs() <= 1e-12 * scale.powi(3), "residual {r} at scale {scale}");
    }

    #[test]
    fn rhs_ignores_undifferentiated_wave((s, _) in arb_state(4), shift in -10.0f64..10.0) {
        for case in [Case::Timelike, Case::Spacelike] {
            let c = CouplingCoefficients::model(case, 4).unwrap();
            let mut t = s.clone();
            t.u1 += shift;
            prop_assert_eq!(rhs(&s, &c), rhs(&t, &c));
        }
    }
}
