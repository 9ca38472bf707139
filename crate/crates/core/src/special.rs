//! The few special-function values the closed forms need: the gamma function
//! at integer and half-integer arguments, unit-sphere volumes, and binomials.

use std::f64::consts::PI;

/// Gamma(k/2) for integer k >= 1, computed exactly from the recursion
/// Gamma(x + 1) = x Gamma(x) with Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k >= 1, "gamma_half_integer needs k >= 1");
    let mut value = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut two_x = if k % 2 == 0 { 2 } else { 1 }; // running argument, doubled
    while two_x < k {
        value *= two_x as f64 / 2.0;
        two_x += 2;
    }
    value
}

/// Volume of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_volume(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n as u32)
}

/// Volume of the unit ball B^n: Vol(S^{n-1}) / n.
pub fn unit_ball_volume(n: usize) -> f64 {
    unit_sphere_volume(n) / n as f64
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Dimension of the space of degree-l spherical harmonics on S^{n-1}.
pub fn harmonic_dimension(n: usize, l: usize) -> usize {
    let (n, l) = (n as u64, l as u64);
    let a = binomial(n + l - 1, l);
    let b = if l >= 2 {
        binomial(n + l - 3, l - 2)
    } else {
        0
    };
    (a - b) as usize
}
