use std::f64::consts::PI;
use tgwave::foliation::*;
use tgwave::solver::cartesian::radial_sample;

#[test]
fn w_tau_examples() {
    assert_eq!(w_tau(2.0, 0.0).unwrap(), 2.0);
    assert!((w_tau(1.0, 3f64.sqrt()).unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(w_tau(3.0, 4.0).unwrap(), 5.0);
    assert!(w_tau(0.0, 0.0).is_err());
}

#[test]
fn boosts_of_slice_constant_and_time() {
    let (tau, dr, n) = (2.0f64, 0.01, 500);
    let quad: Vec<f64> = (0..n).map(|j| { let r = j as f64 * dr; let t = tau.hypot(r); t * t - r * r }).collect();
    let s = boost_sums(tau, dr, &quad, 2);
    assert!(s[1].iter().all(|x| x.abs() < 1e-16));
    let t: Vec<f64> = (0..n).map(|j| tau.hypot(j as f64 * dr)).collect();
    let s = boost_sums(tau, dr, &t, 1);
    for j in 0..n {
        let r = j as f64 * dr;
        assert!((s[1][j] - r * r).abs() < 1e-8 * (1.0 + r * r), "j={j}: {} vs {}", s[1][j], r * r);
    }
}

/// `sum_ij |L^j L^i U|^2` for `U = exp(-|x|^2)` on `Sigma_2` from Cartesian
/// differencing on a 32^3 grid, against the radial slice formula.
#[test]
fn second_order_boosts_match_cartesian_oracle() {
    let tau = 2.0;
    let m = 32usize;
    let half = 2.5;
    let h = 2.0 * half / (m - 1) as f64;
    let x = |i: usize| -half + i as f64 * h;
    let u = |p: [f64; 3]| (-(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).exp();
    let dr = 0.005;
    let prof: Vec<f64> = (0..1000).map(|j| (-(j as f64 * dr).powi(2)).exp()).collect();
    let radial = boost_sums(tau, dr, &prof, 2);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 2..m - 2 {
        for j in 2..m - 2 {
            for k in 2..m - 2 {
                let p = [x(i), x(j), x(k)];
                let r2 = p.iter().map(|c| c * c).sum::<f64>();
                let t = (tau * tau + r2).sqrt();
                let shift = |q: [f64; 3], a: usize, s: f64| { let mut q = q; q[a] += s * h; q };
                let d1 = |q: [f64; 3], a: usize| (-u(shift(q, a, 2.0)) + 8.0 * u(shift(q, a, 1.0)) - 8.0 * u(shift(q, a, -1.0)) + u(shift(q, a, -2.0))) / (12.0 * h);
                let mut sum = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        let d2 = (-d1(shift(p, b, 2.0), a) + 8.0 * d1(shift(p, b, 1.0), a) - 8.0 * d1(shift(p, b, -1.0), a) + d1(shift(p, b, -2.0), a)) / (12.0 * h);
                        let l = p[b] * d1(p, a) + t * t * d2;
                        sum += l * l;
                    }
                }
                let rad = radial_sample(&radial[2], dr, r2.sqrt());
                num += (sum - rad).powi(2);
                den += sum * sum;
            }
        }
    }
    let rel = (num / den).sqrt();
    assert!(rel < 0.02, "relative difference {rel}");
}

#[test]
fn norm_examples() {
    let (tau, dr) = (2.0, 1e-4);
    let len = 10_001;
    let one = SliceField::from_fn(tau, dr, len, 1, |_, _, _| 1.0, |_, _, _| 0.0);
    let got = weighted_norm(&one, Selector::Wave, 2.0, 0.0, 0).unwrap();
    // 4 pi int_0^1 (2 / sqrt(4 + r^2)) r^2 dr in closed form
    let exact = (4.0 * PI * 2.0 * 0.5 * (5f64.sqrt() - 4.0 * (0.5 + 1.25f64.sqrt()).ln())).sqrt();
    assert!((got - exact).abs() < 1e-8, "{got} vs {exact}");
    let z = SliceField::zeros(tau, 0.01, 1, 100);
    assert_eq!(weighted_norm(&z, Selector::Wave, 3.0, 1.0, 2).unwrap(), 0.0);
    let g = SliceField::from_fn(tau, 0.01, 600, 1, |_, _, r| (-r * r).exp(), |_, _, _| 0.0);
    for (p, a, k) in [(2.0, -1.0, 1), (3.0, 0.5, 2), (6.0, 1.0, 0)] {
        let n1 = weighted_norm(&g, Selector::Wave, p, a, k).unwrap();
        let n2 = weighted_norm(&g.scaled(2.0), Selector::Wave, p, a, k).unwrap();
        assert!((n2 - 2.0 * n1).abs() <= 1e-13 * n2);
    }
    assert!(weighted_norm(&g, Selector::Wave, 0.5, 0.0, 0).is_err());
}

#[test]
fn sobolev_ratio_examples() {
    let g = SliceField::from_fn(2.0, 0.01, 800, 1, |_, _, r| (-r * r).exp(), |_, _, _| 0.0);
    assert!(sobolev_ratio(&g, SobolevKind::Hardy, 2.0).unwrap() <= 2.0);
    for kind in [SobolevKind::Hardy, SobolevKind::Morrey { l: -1.0 }, SobolevKind::GnsWave { k: 0 }, SobolevKind::GnsKg { k: 1 }] {
        let a = sobolev_ratio(&g, kind, 3.0).unwrap();
        let b = sobolev_ratio(&g.scaled(2.0), kind, 3.0).unwrap();
        assert!((a - b).abs() <= 1e-13 * a, "{kind:?}");
    }
    let z = SliceField::zeros(2.0, 0.01, 1, 100);
    assert!(sobolev_ratio(&z, SobolevKind::Hardy, 2.0).is_err());
    assert!(sobolev_ratio(&g, SobolevKind::GnsWave { k: 0 }, 7.0).is_err());
}

#[test]
fn morrey_bounded_over_shrinking_bumps() {
    let ratios: Vec<f64> = (0..10)
        .map(|k| {
            let a = 10f64.powf(-(k as f64) / 9.0);
            let f = SliceField::from_fn(2.0, 0.0025, 1601, 1, move |_, _, r| tgwave::solver::bump(r / a, 1.0), |_, _, _| 0.0);
            sobolev_ratio(&f, SobolevKind::Morrey { l: -1.0 }, 2.0).unwrap()
        })
        .collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(max / min <= 10.0, "{ratios:?}");
}
