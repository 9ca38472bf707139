//! Shared fixtures and independent oracles for the integration suites.
//! Everything here recomputes results through routes the library does not
//! take: brute-force Dirichlet-to-Neumann assembly, dense grid search,
//! finite differences.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use yamabe_lab::basis::SphericalHarmonicBasis;
use yamabe_lab::domain::{ConformalFactor, Domain, MetricData};
use yamabe_lab::energy::Grids;
use yamabe_lab::harmonic::BoundaryTrace;
use yamabe_lab::minimize::QuotientProblem;
use yamabe_lab::quadrature::sphere_quadrature;

pub fn ball3() -> Domain {
    Domain::ball(3, 1.0).unwrap()
}

pub fn annulus3(r_inner: f64, r_outer: f64) -> Domain {
    Domain::annulus(3, r_inner, r_outer).unwrap()
}

/// Random trace around 1 whose harmonic extension is positive at the grid
/// nodes; the perturbation is halved until positivity holds.
pub fn positive_random_trace(
    domain: &Domain,
    l_max: usize,
    seed: u64,
    amplitude: f64,
    grids: &Grids,
) -> BoundaryTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = domain.boundary_components();
    let perturbation: Vec<Vec<f64>> = comps
        .iter()
        .map(|_| {
            (0..(l_max + 1) * (l_max + 1))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect()
        })
        .collect();
    let mut amp = amplitude;
    for _ in 0..40 {
        let mut trace = BoundaryTrace::constant(domain, l_max, &vec![1.0; comps.len()]).unwrap();
        for (c, comp) in trace.components.iter_mut().enumerate() {
            for (k, x) in comp.coeffs.iter_mut().enumerate() {
                *x += amp * perturbation[c][k];
            }
        }
        let factor = ConformalFactor::harmonic(domain.clone(), trace.clone());
        let vol_ok = factor
            .positivity_report(&grids.volume, &grids.basis)
            .positive;
        let bnd_ok = comps.iter().all(|comp| {
            factor
                .boundary_values_on(comp, &grids.sphere, &grids.basis)
                .iter()
                .all(|v| *v > 0.0)
        });
        if vol_ok && bnd_ok {
            return trace;
        }
        amp *= 0.5;
    }
    BoundaryTrace::constant(domain, l_max, &vec![1.0; comps.len()]).unwrap()
}

/// Brute-force Dirichlet-to-Neumann matrix on the ball's trace space:
/// extend each basis trace harmonically, read its outward normal derivative
/// at the boundary nodes, and project back with quadrature.
pub fn brute_force_ball_dtn(l_max: usize) -> Vec<Vec<f64>> {
    let dom = ball3();
    let basis = SphericalHarmonicBasis::new(l_max);
    let grid = sphere_quadrature(l_max + 2);
    let comp = dom.boundary_components()[0];
    let nb = (l_max + 1) * (l_max + 1);
    let mut matrix = vec![vec![0.0; nb]; nb];
    for j in 0..nb {
        let mut coeffs = vec![0.0; nb];
        coeffs[j] = 1.0;
        let trace = BoundaryTrace::new(
            l_max,
            vec![yamabe_lab::harmonic::TraceComponent {
                label: comp.label,
                coeffs,
            }],
        )
        .unwrap();
        let factor = ConformalFactor::harmonic(dom.clone(), trace);
        let du = factor.normal_derivative_on(&comp, &grid, &basis);
        let column = basis.analyze(&grid, &du).unwrap();
        for (k, v) in column.into_iter().enumerate() {
            matrix[k][j] = v;
        }
    }
    matrix
}

/// Brute-force 2x2 mode DtN matrix on an annulus through harmonic extension
/// of the two basis traces of the given degree (m = 0).
pub fn brute_force_annulus_mode_dtn(
    r_inner: f64,
    r_outer: f64,
    l: usize,
    l_max: usize,
) -> [[f64; 2]; 2] {
    let dom = annulus3(r_inner, r_outer);
    let basis = SphericalHarmonicBasis::new(l_max);
    let grid = sphere_quadrature(l_max + 2);
    let comps = dom.boundary_components();
    let k = l * l + l; // (l, 0)
    let nb = (l_max + 1) * (l_max + 1);
    let mut out = [[0.0; 2]; 2];
    for (j, which) in [(0usize, 0usize), (1, 1)] {
        let mut inner = vec![0.0; nb];
        let mut outer = vec![0.0; nb];
        if which == 0 {
            inner[k] = 1.0;
        } else {
            outer[k] = 1.0;
        }
        let trace = BoundaryTrace::new(
            l_max,
            vec![
                yamabe_lab::harmonic::TraceComponent {
                    label: comps[0].label,
                    coeffs: inner,
                },
                yamabe_lab::harmonic::TraceComponent {
                    label: comps[1].label,
                    coeffs: outer,
                },
            ],
        )
        .unwrap();
        let factor = ConformalFactor::harmonic(dom.clone(), trace);
        for (row, comp) in comps.iter().enumerate() {
            let du = factor.normal_derivative_on(comp, &grid, &basis);
            let coeffs = basis.analyze(&grid, &du).unwrap();
            out[row][j] = coeffs[k];
        }
    }
    out
}

/// Dense polar grid search (with refinement) for the minimum of Q over the
/// radial trace circle (c_in, c_out) = (cos a, sin a) on an annulus problem.
pub fn radial_annulus_q_minimum(problem: &QuotientProblem, n_basis: usize) -> f64 {
    let eval = |alpha: f64| -> f64 {
        let mut t = vec![0.0; 2 * n_basis];
        t[0] = alpha.cos();
        t[n_basis] = alpha.sin();
        problem.value(&t).unwrap()
    };
    let mut lo = 0.0_f64;
    let mut hi = std::f64::consts::PI;
    let mut best = (f64::INFINITY, 0.0);
    for _round in 0..6 {
        let steps = 800;
        best = (f64::INFINITY, 0.0);
        for i in 0..=steps {
            let alpha = lo + (hi - lo) * i as f64 / steps as f64;
            let q = eval(alpha);
            if q < best.0 {
                best = (q, alpha);
            }
        }
        let width = (hi - lo) / steps as f64;
        lo = best.1 - 2.0 * width;
        hi = best.1 + 2.0 * width;
    }
    best.0
}

/// Euclidean metric data for a domain and grid bundle.
pub fn euclidean(domain: &Domain, grids: &Grids) -> MetricData {
    MetricData::euclidean(domain, &grids.volume, &grids.sphere)
}
