//! Quadrature grids on the unit sphere, balls, and annuli.
//!
//! The sphere rule is Gauss-Legendre in cos(theta) tensored with a uniform
//! azimuthal rule, so it integrates spherical harmonics up to degree
//! 2*order - 1 exactly. Volume rules multiply a radial Gauss-Legendre rule
//! (with the r^{n-1} weight folded into the weights) with the sphere rule.
//! For n > 3 only radially symmetric grids are provided; the angular factor
//! collapses to the closed-form Vol(S^{n-1}).

use crate::domain::Domain;
use crate::special::unit_sphere_volume;
use std::f64::consts::PI;

/// One quadrature node. `r` is the radius (1 on sphere grids), the direction
/// is (sin t cos psi, sin t sin psi, cos t) with cos t = `cos_theta`.
#[derive(Clone, Copy, Debug)]
pub struct GridNode {
    pub r: f64,
    pub cos_theta: f64,
    pub psi: f64,
}

impl GridNode {
    /// Cartesian coordinates in R^3. Only meaningful on n = 3 grids.
    pub fn cartesian(&self) -> [f64; 3] {
        let s = (1.0 - self.cos_theta * self.cos_theta).max(0.0).sqrt();
        [
            self.r * s * self.psi.cos(),
            self.r * s * self.psi.sin(),
            self.r * self.cos_theta,
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainTag {
    Sphere,
    Ball,
    Annulus,
}

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    pub domain_tag: DomainTag,
    /// Largest polynomial/harmonic degree integrated exactly.
    pub exactness_order: usize,
    pub nodes: Vec<GridNode>,
    pub weights: Vec<f64>,
    /// Tensor structure: nodes are stored radial-major, `n_angular` per shell.
    pub n_radial: usize,
    pub n_angular: usize,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of a function given by its values at the nodes.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        pairwise_sum_with(values.len(), |i| self.weights[i] * values[i])
    }

    pub fn integrate(&self, f: impl Fn(&GridNode) -> f64 + Copy) -> f64 {
        pairwise_sum_with(self.nodes.len(), |i| self.weights[i] * f(&self.nodes[i]))
    }
}

/// Deterministic pairwise reduction; the summation order is fixed by the
/// index range alone, so results are bit-stable across runs and thread counts.
pub fn pairwise_sum_with(len: usize, f: impl Fn(usize) -> f64 + Copy) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= 32 {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            go(lo, mid, f) + go(mid, hi, f)
        }
    }
    go(0, len, &f)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_with(values.len(), |i| values[i])
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (p2, d2) = legendre_with_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature on the unit sphere S^2, exact for spherical harmonics up to
/// degree 2*order - 1.
pub fn sphere_quadrature(order: usize) -> QuadratureGrid {
    assert!(order >= 1);
    let (xs, ws) = gauss_legendre(order);
    let n_az = 2 * order;
    let dpsi = 2.0 * PI / n_az as f64;
    let mut nodes = Vec::with_capacity(order * n_az);
    let mut weights = Vec::with_capacity(order * n_az);
    for (x, w) in xs.iter().zip(&ws) {
        for j in 0..n_az {
            nodes.push(GridNode {
                r: 1.0,
                cos_theta: *x,
                psi: j as f64 * dpsi,
            });
            weights.push(w * dpsi);
        }
    }
    QuadratureGrid {
        domain_tag: DomainTag::Sphere,
        exactness_order: 2 * order - 1,
        nodes,
        weights,
        n_radial: 1,
        n_angular: order * n_az,
    }
}

/// Single-node "sphere grid" for dimensions where only radial data exists.
/// The one weight is the closed-form Vol(S^{n-1}).
pub fn radial_sphere_quadrature(n: usize) -> QuadratureGrid {
    QuadratureGrid {
        domain_tag: DomainTag::Sphere,
        exactness_order: 0,
        nodes: vec![GridNode {
            r: 1.0,
            cos_theta: 1.0,
            psi: 0.0,
        }],
        weights: vec![unit_sphere_volume(n)],
        n_radial: 1,
        n_angular: 1,
    }
}

/// Volume quadrature on a ball or annulus: Gauss-Legendre in radius weighted
/// by r^{n-1}, tensored with the angular rule (full S^2 rule for n = 3, the
/// closed-form radial rule otherwise).
pub fn radial_volume_quadrature(domain: &Domain, order: usize) -> QuadratureGrid {
    assert!(order >= 1);
    let n = domain.n();
    let (r_lo, r_hi, tag) = match domain {
        Domain::Ball { radius, .. } => (0.0, *radius, DomainTag::Ball),
        Domain::Annulus {
            r_inner, r_outer, ..
        } => (*r_inner, *r_outer, DomainTag::Annulus),
        Domain::BumpBall { .. } => {
            panic!("volume quadrature on the bump ball is not provided")
        }
    };
    let (xs, ws) = gauss_legendre(order);
    let half = 0.5 * (r_hi - r_lo);
    let mid = 0.5 * (r_hi + r_lo);
    let angular = if n == 3 {
        sphere_quadrature(order.max(2))
    } else {
        radial_sphere_quadrature(n)
    };
    let mut nodes = Vec::with_capacity(order * angular.len());
    let mut weights = Vec::with_capacity(order * angular.len());
    for (x, w) in xs.iter().zip(&ws) {
        let r = mid + half * x;
        let wr = w * half * r.powi(n as i32 - 1);
        for (an, aw) in angular.nodes.iter().zip(&angular.weights) {
            nodes.push(GridNode {
                r,
                cos_theta: an.cos_theta,
                psi: an.psi,
            });
            weights.push(wr * aw);
        }
    }
    QuadratureGrid {
        domain_tag: tag,
        exactness_order: 2 * order - 1,
        nodes,
        weights,
        n_radial: order,
        n_angular: angular.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (xs, ws) = gauss_legendre(8);
        // exact through degree 15
        for deg in 0..=15usize {
            let got: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(x, w)| w * x.powi(deg as i32))
                .sum();
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert!(
                (got - exact).abs() < 1e-14,
                "degree {deg}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn sphere_measure_is_4pi() {
        for order in [1, 2, 5, 16, 33] {
            let g = sphere_quadrature(order);
            let total = pairwise_sum(&g.weights);
            assert_relative_eq!(total, 4.0 * PI, max_relative = 1e-13);
        }
    }

    #[test]
    fn sphere_integrates_cos_sq_theta() {
        let g = sphere_quadrature(6);
        let got = g.integrate(|p| p.cos_theta * p.cos_theta);
        assert_relative_eq!(got, 4.0 * PI / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn ball_and_annulus_measures() {
        let ball = Domain::ball(3, 1.0).unwrap();
        let g = radial_volume_quadrature(&ball, 8);
        assert_relative_eq!(
            pairwise_sum(&g.weights),
            4.0 * PI / 3.0,
            max_relative = 1e-13
        );

        let ann = Domain::annulus(3, 0.5, 1.0).unwrap();
        let g = radial_volume_quadrature(&ann, 8);
        assert_relative_eq!(
            pairwise_sum(&g.weights),
            4.0 * PI / 3.0 * (1.0 - 0.125),
            max_relative = 1e-13
        );

        // n = 5 ball through the radial rule: Vol(B^5) = Vol(S^4)/5
        let b5 = Domain::ball(5, 1.0).unwrap();
        let g = radial_volume_quadrature(&b5, 8);
        assert_relative_eq!(
            pairwise_sum(&g.weights),
            crate::special::unit_ball_volume(5),
            max_relative = 1e-13
        );
    }

    #[test]
    fn ball_integrates_r_squared() {
        let ball = Domain::ball(3, 1.0).unwrap();
        let g = radial_volume_quadrature(&ball, 8);
        let got = g.integrate(|p| p.r * p.r);
        assert_relative_eq!(got, 4.0 * PI / 5.0, max_relative = 1e-13);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_random_data() {
        let vals: Vec<f64> = (0..1000)
            .map(|i| ((i * 37 % 101) as f64 - 50.0) * 0.37)
            .collect();
        let naive: f64 = vals.iter().sum();
        assert_relative_eq!(pairwise_sum(&vals), naive, max_relative = 1e-12);
    }
}
