//! The closed-form family of positive harmonic functions on the unit ball
//! solving the constant-mean-curvature boundary equation
//!   du/dnu + (n-2)/2 u = ((n-2)/2)^2 u^{n/(n-2)}  on S^{n-1},
//! namely
//!   u_a(x) = [ 2/(n-2) * (1-|a|^2) / (1 + |a|^2 |x|^2 - 2 x.a) ]^{(n-2)/2}
//! for |a| < 1. Every member induces a metric of the same energy, which is
//! what the quotient evaluation here verifies numerically.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::harmonic::{BoundaryTrace, TraceComponent};
use crate::quadrature::gauss_legendre;
use crate::special::unit_sphere_volume;

#[derive(Clone, Copy, Debug)]
pub struct EscobarParams {
    pub n: usize,
    /// Family center; must satisfy |a| < 1. Stored in the first three
    /// coordinates, which is general enough up to rotation.
    pub center: [f64; 3],
}

impl EscobarParams {
    pub fn new(n: usize, center: [f64; 3]) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDomain(format!("dimension {n} < 3")));
        }
        let norm = (center[0] * center[0] + center[1] * center[1] + center[2] * center[2]).sqrt();
        if !(norm < 1.0) {
            return Err(Error::InvalidInput(format!("|a| = {norm} must be < 1")));
        }
        Ok(Self { n, center })
    }

    pub fn axial(n: usize, a: f64) -> Result<Self> {
        Self::new(n, [a, 0.0, 0.0])
    }

    fn a_norm_sq(&self) -> f64 {
        self.center.iter().map(|x| x * x).sum()
    }

    fn denominator(&self, x: [f64; 3]) -> f64 {
        let xa = x[0] * self.center[0] + x[1] * self.center[1] + x[2] * self.center[2];
        let x_sq: f64 = x.iter().map(|v| v * v).sum();
        1.0 + self.a_norm_sq() * x_sq - 2.0 * xa
    }
}

/// u_a(x) for |x| <= 1; the denominator is bounded below by (1-|a|)^2 > 0.
pub fn escobar_solution(p: &EscobarParams, x: [f64; 3]) -> f64 {
    let nf = p.n as f64;
    let k = 2.0 / (nf - 2.0) * (1.0 - p.a_norm_sq());
    (k / p.denominator(x)).powf((nf - 2.0) / 2.0)
}

/// Cartesian gradient of u_a (in the 3-plane containing the center).
pub fn escobar_gradient(p: &EscobarParams, x: [f64; 3]) -> [f64; 3] {
    let nf = p.n as f64;
    let half = (nf - 2.0) / 2.0;
    let q = p.denominator(x);
    let u = escobar_solution(p, x);
    let asq = p.a_norm_sq();
    let mut grad = [0.0; 3];
    for i in 0..3 {
        let dq = 2.0 * asq * x[i] - 2.0 * p.center[i];
        grad[i] = -half * u / q * dq;
    }
    grad
}

/// Laplacian of u_a in dimension n; zero up to rounding for every admissible
/// center, but computed rather than assumed.
pub fn escobar_laplacian(p: &EscobarParams, x: [f64; 3]) -> f64 {
    let nf = p.n as f64;
    let half = (nf - 2.0) / 2.0;
    let q = p.denominator(x);
    let asq = p.a_norm_sq();
    let k = 2.0 / (nf - 2.0) * (1.0 - asq);
    let kp = k.powf(half);
    // grad q restricted to the plane spanned by x and a; |grad q|^2 = 4 |a|^2 q
    let dq_sq: f64 = {
        let x_sq: f64 = x.iter().map(|v| v * v).sum();
        let xa = x[0] * p.center[0] + x[1] * p.center[1] + x[2] * p.center[2];
        4.0 * (asq * asq * x_sq - 2.0 * asq * xa + asq)
    };
    let lap_q = 2.0 * nf * asq;
    kp * (half * (half + 1.0) * q.powf(-half - 2.0) * dq_sq - half * q.powf(-half - 1.0) * lap_q)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EscobarResidual {
    pub interior_max: f64,
    pub boundary_max: f64,
}

/// Max interior |Lap u_a| and max boundary-equation residual, sampled on a
/// polar section through the center axis (rotational symmetry makes the
/// section sup the global sup).
pub fn escobar_residual(p: &EscobarParams, resolution: usize) -> EscobarResidual {
    let nf = p.n as f64;
    let half = (nf - 2.0) / 2.0;
    let res = resolution.max(8);
    // orthonormal pair spanning the section
    let a_norm = p.a_norm_sq().sqrt();
    let e1 = if a_norm > 0.0 {
        [
            p.center[0] / a_norm,
            p.center[1] / a_norm,
            p.center[2] / a_norm,
        ]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e2 = if e1[0].abs() < 0.9 {
        orthonormalize(e1, [1.0, 0.0, 0.0])
    } else {
        orthonormalize(e1, [0.0, 1.0, 0.0])
    };
    let (rs, _) = gauss_legendre(res);
    let mut interior_max = 0.0_f64;
    let mut boundary_max = 0.0_f64;
    for j in 0..=2 * res {
        let theta = std::f64::consts::PI * j as f64 / (2 * res) as f64;
        let (s, c) = theta.sin_cos();
        let dir = [
            c * e1[0] + s * e2[0],
            c * e1[1] + s * e2[1],
            c * e1[2] + s * e2[2],
        ];
        for x in &rs {
            let r = 0.5 * (x + 1.0);
            let point = [r * dir[0], r * dir[1], r * dir[2]];
            interior_max = interior_max.max(escobar_laplacian(p, point).abs());
        }
        let u = escobar_solution(p, dir);
        let grad = escobar_gradient(p, dir);
        let du_dnu = grad[0] * dir[0] + grad[1] * dir[1] + grad[2] * dir[2];
        let residual = du_dnu + half * u - half * half * u.powf(nf / (nf - 2.0));
        boundary_max = boundary_max.max(residual.abs());
    }
    EscobarResidual {
        interior_max,
        boundary_max,
    }
}

fn orthonormalize(e1: [f64; 3], seed: [f64; 3]) -> [f64; 3] {
    let dot = e1[0] * seed[0] + e1[1] * seed[1] + e1[2] * seed[2];
    let mut v = [
        seed[0] - dot * e1[0],
        seed[1] - dot * e1[1],
        seed[2] - dot * e1[2],
    ];
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    v
}

/// Quadrature order that resolves the family member: boundary integrands
/// carry Legendre coefficients decaying like |a|^l.
pub fn suggested_order(a_norm: f64) -> usize {
    if a_norm < 0.1 {
        return 24;
    }
    let needed = (16.0 * std::f64::consts::LN_10 / (-2.0 * a_norm.ln())).ceil() as usize;
    (needed + 8).clamp(24, 400)
}

/// Q_delta(u_a) on the unit ball, through the closed forms:
/// the Dirichlet term by the boundary formula int u du/dnu dA, the rest by
/// direct quadrature. The boundary integrals reduce to one dimension because
/// the integrands depend only on the angle to the center axis.
pub fn escobar_quotient(p: &EscobarParams, order: Option<usize>) -> f64 {
    let nf = p.n as f64;
    let a_norm = p.a_norm_sq().sqrt();
    let order = order.unwrap_or_else(|| suggested_order(a_norm));
    let kappa = 4.0 * (nf - 1.0) / (nf - 2.0);
    let tau = 2.0 * (nf - 1.0) / (nf - 2.0);
    let h = nf - 1.0;
    // int_{S^{n-1}} f(theta) dA = Vol(S^{n-2}) int f (1-t^2)^{(n-3)/2} dt
    let ring = if p.n == 3 {
        2.0 * std::f64::consts::PI
    } else {
        unit_sphere_volume(p.n - 1)
    };
    let (ts, ws) = gauss_legendre(order);
    let e1 = if a_norm > 0.0 {
        [
            p.center[0] / a_norm,
            p.center[1] / a_norm,
            p.center[2] / a_norm,
        ]
    } else {
        [1.0, 0.0, 0.0]
    };
    let e2 = if e1[0].abs() < 0.9 {
        orthonormalize(e1, [1.0, 0.0, 0.0])
    } else {
        orthonormalize(e1, [0.0, 1.0, 0.0])
    };
    let mut dirichlet = 0.0;
    let mut h_term = 0.0;
    let mut norm_term = 0.0;
    for (t, w) in ts.iter().zip(&ws) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        let dir = [
            t * e1[0] + s * e2[0],
            t * e1[1] + s * e2[1],
            t * e1[2] + s * e2[2],
        ];
        let u = escobar_solution(p, dir);
        let grad = escobar_gradient(p, dir);
        let du_dnu = grad[0] * dir[0] + grad[1] * dir[1] + grad[2] * dir[2];
        let weight = w * ring * (1.0 - t * t).powf((nf - 3.0) / 2.0);
        dirichlet += weight * u * du_dnu;
        h_term += weight * h * u * u;
        norm_term += weight * u.powf(tau);
    }
    (kappa * dirichlet + 2.0 * h_term) / norm_term.powf((nf - 2.0) / (nf - 1.0))
}

/// Projection of u_a's boundary values onto the harmonic basis, usable as a
/// minimizer initializer near the family member (n = 3).
pub fn escobar_boundary_trace(
    p: &EscobarParams,
    domain: &Domain,
    l_max: usize,
) -> Result<BoundaryTrace> {
    if domain.n() != 3 || p.n != 3 {
        return Err(Error::InvalidInput(
            "boundary trace projection needs n = 3".into(),
        ));
    }
    let comps = domain.boundary_components();
    if comps.len() != 1 {
        return Err(Error::InvalidInput("the family lives on the ball".into()));
    }
    let order = suggested_order(p.a_norm_sq().sqrt()).max(l_max + 1);
    let grid = crate::quadrature::sphere_quadrature(order);
    let basis = crate::basis::SphericalHarmonicBasis::new(l_max);
    let values: Vec<f64> = grid
        .nodes
        .iter()
        .map(|node| escobar_solution(p, node.cartesian()))
        .collect();
    let coeffs = basis.analyze(&grid, &values)?;
    BoundaryTrace::new(
        l_max,
        vec![TraceComponent {
            label: comps[0].label,
            coeffs,
        }],
    )
}
