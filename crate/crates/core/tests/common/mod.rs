//! Reference computations that share no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// `J_n(x)` by its ascending power series, summed to convergence. Accurate
/// to about `1e-16 * I_n(x)`, so keep `x` modest (below ~8).
pub fn bessel_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -half * half / (k * (k + n as f64));
        sum += term;
        if term.abs() < 1e-22 * sum.abs().max(1e-300) || term == 0.0 {
            return sum;
        }
        k += 1.0;
    }
}

/// `J_n(x) = (1/2pi) int_0^2pi cos(n t - x sin t) dt` by the trapezoid rule.
/// For a periodic analytic integrand the only error is aliasing into orders
/// `|n +- K|`, which vanish once `K` exceeds `n + x` comfortably.
pub fn bessel_integral(n: u32, x: f64) -> f64 {
    let k = 2 * (n as usize + x.ceil() as usize + 100);
    let h = 2.0 * PI / k as f64;
    (0..k)
        .map(|i| {
            let t = i as f64 * h;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / k as f64
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("cofactor determinant only written for n <= 3"),
    }
}

/// Cramer's rule for systems of up to three unknowns.
pub fn cramer(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let d = det(a);
    (0..b.len())
        .map(|col| {
            let replaced: Vec<Vec<f64>> = a
                .iter()
                .zip(b)
                .map(|(row, &bi)| {
                    let mut r = row.clone();
                    r[col] = bi;
                    r
                })
                .collect();
            det(&replaced) / d
        })
        .collect()
}
