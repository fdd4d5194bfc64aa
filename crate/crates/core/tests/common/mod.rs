//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Double-exponential quadrature on [0, 1]. The integrand receives both `x`
/// and `1 − x`, each computed without cancellation, so endpoint power
/// singularities can be evaluated accurately.
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
    const H: f64 = 1.0 / 64.0;
    const T_MAX: f64 = 5.0;
    let steps = (T_MAX / H) as i64;
    let mut sum = 0.0;
    for k in -steps..=steps {
        let tau = k as f64 * H;
        let arg = std::f64::consts::PI * tau.sinh();
        let x = 1.0 / (1.0 + (-arg).exp());
        let xc = 1.0 / (1.0 + arg.exp());
        let weight = FRAC_PI_2 * tau.cosh() * 0.5 / (0.5 * arg).cosh().powi(2);
        if x > 0.0 && xc > 0.0 {
            sum += weight * f(x, xc);
        }
    }
    sum * H
}

/// β(k+1, s+1) = k! / ((s+1)(s+2)···(s+k+1)) for integer k.
pub fn beta_integer_first(k: u32, s: f64) -> f64 {
    let mut value = 1.0;
    for j in 1..=k {
        value *= j as f64 / (s + j as f64);
    }
    value / (s + k as f64 + 1.0)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Composite trapezoid rule on an equally spaced grid of `points` over [0, 1].
pub fn trapezoid<F: FnMut(f64) -> f64>(points: usize, mut f: F) -> f64 {
    let last = (points - 1) as f64;
    let mut sum = 0.0;
    for i in 0..points {
        let w = if i == 0 || i + 1 == points { 0.5 } else { 1.0 };
        sum += w * f(i as f64 / last);
    }
    sum / last
}
