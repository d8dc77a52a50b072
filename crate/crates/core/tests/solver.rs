use tgwave::cli::convergence_study;
use tgwave::diagnostics::evolve;
use tgwave::pde::{Case, CouplingCoefficients};
use tgwave::solver::cartesian::{cartesian_run, relative_difference};
use tgwave::solver::*;
use tgwave::Error;

fn small(t_end: f64) -> RunConfig {
    RunConfig { t_end, taus: vec![2.0, 3.0], ..RunConfig::default() }
}

#[test]
fn initial_data_examples() {
    assert_eq!(init_data(&RunConfig { epsilon: 0.0, ..small(6.0) }).unwrap().max_abs(), 0.0);
    let a = init_data(&small(6.0)).unwrap();
    assert_eq!(a.u[0][0], 1e-3);
    assert_eq!(a.max_abs(), 1e-3);
    let j1 = (1.0 / a.dr).round() as usize;
    assert!(a.u.iter().all(|c| c[j1..].iter().all(|x| *x == 0.0)));
    let b = init_data(&RunConfig { epsilon: 2e-3, ..small(6.0) }).unwrap();
    for e in 0..3 {
        for j in 0..a.points() {
            assert_eq!(b.u[e][j], 2.0 * a.u[e][j]);
            assert_eq!(b.v[e][j], 2.0 * a.v[e][j]);
        }
    }
}

#[test]
fn operator_examples() {
    let c = CouplingCoefficients::model(Case::Timelike, 3).unwrap();
    let z = RadialFieldState::zeros(2.0, 0.05, 3, 100);
    assert_eq!(spatial_operator(&z, &c).max_abs(), 0.0);
    assert_eq!(step_rk4(&z, 0.01, &c).unwrap().max_abs(), 0.0);
    let lin = c.clone().without_cubic().without_quadratic();
    let mut s = RadialFieldState::zeros(2.0, 0.05, 3, 100);
    s.u[2].fill(0.7);
    let d = spatial_operator(&s, &lin);
    assert!(d.v[2][..98].iter().all(|x| (x + 0.7).abs() < 1e-12));
}

#[test]
fn manufactured_residual_is_second_order() {
    let c = CouplingCoefficients::model(Case::Spacelike, 3).unwrap();
    let r: Vec<f64> = [0.04, 0.02, 0.01].iter().map(|&d| manufactured_residual(&c, d, 2.5)).collect();
    for w in r.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() <= 0.3, "{r:?}");
    }
}

#[test]
fn zero_data_stays_zero() {
    let c = RunConfig { epsilon: 0.0, ..small(8.0) };
    let (ev, rep) = evolve(&c).unwrap();
    assert_eq!(ev.final_state.max_abs(), 0.0);
    assert!(rep.slices.iter().all(|s| s.energy.e_total == 0.0 && s.energy.frak_e == [0.0; 3]));
    assert!(rep.e0.iter().all(|x| *x == 0.0));
}

#[test]
fn finite_speed_of_propagation() {
    let c = RunConfig { quadratic: false, cubic: false, taus: vec![], ..small(5.0) };
    let ev = run(&c).unwrap();
    let s = &ev.final_state;
    let front = c.support_radius + (s.t - c.t_start);
    let amp = s.max_abs();
    for e in 0..3 {
        for j in 0..s.points() {
            if j as f64 * s.dr > front + 1.0 {
                assert!(s.u[e][j].abs() < 1e-6 * amp, "leak at r = {}", j as f64 * s.dr);
            }
        }
    }
}

#[test]
fn one_step_matches_cartesian_oracle() {
    let c = RunConfig { t_end: 2.5, dr: 0.01, quadratic: false, cubic: false, taus: vec![], ..RunConfig::default() };
    let dt = 0.04;
    let radial = run(&RunConfig { t_end: c.t_start + dt, ..c.clone() }).unwrap();
    let cart = cartesian_run(&c, 32, 2.0, c.t_start + dt, 1.0).unwrap();
    let d = relative_difference(&cart, &radial.final_state);
    assert!(d <= 0.02, "difference {d}");
}

#[test]
fn cartesian_oracle_rejects_spacelike() {
    let c = RunConfig { case: Case::Spacelike, ..small(3.0) };
    assert!(cartesian_run(&c, 8, 2.0, 2.1, 0.25).is_err());
}

#[test]
fn large_data_terminates_cleanly() {
    let c = RunConfig { epsilon: 10.0, ..small(10.0) };
    let ev = run(&c).unwrap();
    let t = ev.blowup.expect("blow-up expected");
    assert!(t > c.t_start && t < c.t_end);
    assert!(ev.slices.iter().any(|s| s.is_none()));
}

#[test]
fn slice_extraction_examples() {
    let (dr, dt) = (0.05, 0.025);
    let traj_of = |f: &dyn Fn(f64, f64) -> f64| {
        let mk = |t: f64| {
            let mut s = RadialFieldState::zeros(t, dr, 1, 80);
            for j in 0..80 {
                s.u[0][j] = f(t, j as f64 * dr);
            }
            s
        };
        let mut tr = Trajectory::new(mk(2.0), dt, None);
        for k in 1..200 {
            tr.push(mk(2.0 + k as f64 * dt));
        }
        tr
    };
    let tr = traj_of(&|t, r| t * t - r * r);
    let s = tr.extract_slice(3.0, 60).unwrap();
    assert!(s.u[0].iter().all(|x| (x - 9.0).abs() < 1e-8));
    let tr = traj_of(&|t, r| t + 10.0 * r);
    let s = tr.extract_slice(2.0, 40).unwrap();
    assert!((s.u[0][0] - 2.0).abs() < 1e-12);
    assert!((s.u[0][30] - (2.5 + 15.0)).abs() < 1e-10);
    assert!(matches!(tr.extract_slice(8.0, 40), Err(Error::Range(_))));
}

#[test]
fn slice_energies_converge_at_second_order() {
    let base = RunConfig { taus: vec![2.0, 3.0, 4.0], estimates: false, ..RunConfig::default() };
    let reports: Vec<_> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dr| {
            let c = RunConfig { dr, t_end: slice_end_time(&RunConfig { dr, ..base.clone() }, 4.0) + 0.1, ..base.clone() };
            evolve(&c).unwrap().1
        })
        .collect();
    let study = convergence_study(&reports, base.t_start);
    assert_eq!(study.tau, vec![3.0, 4.0]);
    assert!(study.pass, "{study:?}");
}
