mod common;

use common::{bessel_integral, bessel_series};
use latzero::specfun::{bessel_j, bessel_j_sequence, BesselOrder};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn j(n: u32, x: f64) -> f64 {
    bessel_j(BesselOrder::new(n).unwrap(), x).unwrap()
}

#[test]
fn oracles_agree_with_each_other() {
    for &(n, x) in &[(0, 1.0), (1, 1.0), (3, 5.5), (10, 7.9), (0, 2.404825557695773)] {
        assert!((bessel_series(n, x) - bessel_integral(n, x)).abs() < 1e-13, "n={n} x={x}");
    }
    assert!((bessel_series(1, 1.0) - 0.4400505857449335).abs() < 1e-15);
}

#[test]
fn first_zero_by_bisection_on_series() {
    let (mut lo, mut hi) = (2.0, 3.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if bessel_series(0, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((lo - 2.404825557695773).abs() < 1e-14);
    assert!(j(0, 2.404825557695773).abs() < 1e-12);
}

#[test]
fn matches_series_oracle_on_random_grid() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=60);
        let x = rng.gen_range(0.0..8.0);
        worst = worst.max((j(n, x) - bessel_series(n, x)).abs());
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

#[test]
fn matches_integral_oracle_over_full_range() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(0..=512);
        let x = rng.gen_range(0.0..500.0);
        worst = worst.max((j(n, x) - bessel_integral(n, x)).abs());
    }
    assert!(worst < 1e-12, "worst deviation {worst:e}");
}

#[test]
fn sequence_matches_single_calls() {
    let x = std::f64::consts::PI * 0.8 / 0.78;
    let seq = bessel_j_sequence(BesselOrder::new(6).unwrap(), x).unwrap();
    assert_eq!(seq.len(), 7);
    for (n, v) in seq.iter().enumerate() {
        assert!((v - j(n as u32, x)).abs() < 1e-14);
    }
}

#[test]
fn high_order_tail_decays() {
    let seq = bessel_j_sequence(BesselOrder::new(300).unwrap(), 10.0).unwrap();
    assert_eq!(seq.len(), 301);
    // |J_n(x)| <= (x/2)^n / n!
    let mut bound = 1.0f64;
    for (n, v) in seq.iter().enumerate().skip(1) {
        bound *= 5.0 / n as f64;
        assert!(v.abs() <= bound * (1.0 + 1e-12) + 1e-300, "n={n}");
        // the bound itself drops below 1e-100 at n = 110
        if n >= 110 {
            assert!(v.abs() < 1e-100, "n={n}: {v:e}");
        }
    }
}

#[test]
fn recurrence_on_random_grid() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=100u32);
        let x = rng.gen_range(0.1..200.0);
        let s = bessel_j_sequence(BesselOrder::new(n + 1).unwrap(), x).unwrap();
        let n = n as usize;
        let r = s[n - 1] + s[n + 1] - 2.0 * n as f64 / x * s[n];
        assert!(r.abs() < 1e-10, "n={n} x={x}: {r:e}");
    }
}

#[test]
fn normalization_sum_on_random_grid() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(0.0..200.0);
        // even orders beyond x + 40 sqrt(x) + 60 are below 1e-30
        let kmax = ((x + 4.0 * x.sqrt() * 10.0 + 60.0) / 2.0).ceil() as u32;
        let n_max = (2 * kmax).min(512);
        let s = bessel_j_sequence(BesselOrder::new(n_max).unwrap(), x).unwrap();
        assert!(s[n_max as usize].abs() < 1e-30);
        let total: f64 = s[0] + 2.0 * s.iter().step_by(2).skip(1).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-10, "x={x}: {total}");
    }
}

proptest! {
    #[test]
    fn bounded_by_one(n in 0u32..=512, x in 0.0f64..500.0) {
        prop_assert!(j(n, x).abs() <= 1.0);
    }

    #[test]
    fn bessel_j_domain(x in -1e3f64..-1e-300) {
        prop_assert!(bessel_j(BesselOrder::new(0).unwrap(), x).is_err());
    }
}
