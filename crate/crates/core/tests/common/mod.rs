//! Reference implementations written independently of the crate, used as
//! oracles by the integration tests.
#![allow(dead_code)]

use fbmimo_core::numerics::{Complex64, ComplexVector};
use rand::Rng;

/// RVQ error CDF `1 − (1 − z^{M−1})^{2^B}`.
pub fn rvq_cdf(z: f64, m: usize, bits: f64) -> f64 {
    1.0 - (1.0 - z.powi(m as i32 - 1)).powf(bits.exp2())
}

/// Inverse of [`rvq_cdf`] applied to a uniform draw.
pub fn rvq_inverse(u: f64, m: usize, bits: f64) -> f64 {
    // CCDF(z) = 1 - u  =>  z^{M-1} = 1 - (1-u)^{2^-B}
    let inner = -((1.0 - u).ln() * (-bits).exp2()).exp_m1();
    inner.powf(1.0 / (m as f64 - 1.0))
}

/// Beta(1, n) by inversion: `1 − U^{1/n}`.
pub fn beta1(n: f64, u: f64) -> f64 {
    1.0 - u.powf(1.0 / n)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Plain CN(0, I) draw using Box-Muller, bypassing the crate's sampler.
pub fn cn_vector<R: Rng>(m: usize, rng: &mut R) -> ComplexVector {
    let v = (0..m)
        .map(|_| {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            let r = (-u1.ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            Complex64::new(r * t.cos(), r * t.sin())
        })
        .collect();
    ComplexVector::new(v).unwrap()
}

pub fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}
