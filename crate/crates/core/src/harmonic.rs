//! Harmonic extensions of boundary traces on balls and annuli, their exact
//! Dirichlet energies, and Steklov (Dirichlet-to-Neumann) spectra.
//!
//! Everything is per spherical-harmonic mode: a degree-l trace extends as
//! a r^l + b r^{-(l+n-2)}, so extensions, energies, and the DtN map reduce to
//! scalar or 2x2 algebra per mode. Dimensions other than 3 carry radial
//! (mode-0) data only.

use crate::basis::SphericalHarmonicBasis;
use crate::domain::{BoundaryComponent, ComponentLabel, Domain};
use crate::error::{Error, Result};
use crate::quadrature::{GridNode, QuadratureGrid};
use crate::special::{harmonic_dimension, unit_sphere_volume};

/// Boundary values as coefficient vectors against the orthonormal harmonics
/// of each boundary sphere (one component for a ball, inner then outer for an
/// annulus). In dimensions above 3 only the constant mode may be populated.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub l_max: usize,
    pub components: Vec<TraceComponent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceComponent {
    pub label: ComponentLabel,
    pub coeffs: Vec<f64>,
}

impl BoundaryTrace {
    pub fn new(l_max: usize, components: Vec<TraceComponent>) -> Result<Self> {
        let len = (l_max + 1) * (l_max + 1);
        if components.is_empty() {
            return Err(Error::InvalidInput(
                "trace needs at least one component".into(),
            ));
        }
        for c in &components {
            if c.coeffs.len() != len {
                return Err(Error::InvalidInput(format!(
                    "component {:?} has {} coefficients, expected {len}",
                    c.label,
                    c.coeffs.len()
                )));
            }
        }
        if components
            .iter()
            .all(|c| c.coeffs.iter().all(|x| *x == 0.0))
        {
            return Err(Error::InvalidInput("trace is identically zero".into()));
        }
        Ok(Self { l_max, components })
    }

    /// Trace that is the given constant value on each boundary component.
    pub fn constant(domain: &Domain, l_max: usize, values: &[f64]) -> Result<Self> {
        let comps = domain.boundary_components();
        if values.len() != comps.len() {
            return Err(Error::InvalidInput(format!(
                "{} component values for {} boundary components",
                values.len(),
                comps.len()
            )));
        }
        let scale = unit_sphere_volume(domain.n()).sqrt();
        let len = (l_max + 1) * (l_max + 1);
        let components = comps
            .iter()
            .zip(values)
            .map(|(c, v)| {
                let mut coeffs = vec![0.0; len];
                coeffs[0] = v * scale;
                TraceComponent {
                    label: c.label,
                    coeffs,
                }
            })
            .collect();
        Self::new(l_max, components)
    }

    pub fn with_coefficient(mut self, component: usize, l: usize, m: isize, value: f64) -> Self {
        let k = (l * l) as isize + l as isize + m;
        self.components[component].coeffs[k as usize] = value;
        self
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            l_max: self.l_max,
            components: self
                .components
                .iter()
                .map(|c| TraceComponent {
                    label: c.label,
                    coeffs: c.coeffs.iter().map(|x| t * x).collect(),
                })
                .collect(),
        }
    }
}

/// Solved radial coefficients (a, b) per mode: u_mode(r) = a r^p + b r^q with
/// p = l and q = -(l + n - 2).
pub struct HarmonicModes {
    pub n: usize,
    pub l_max: usize,
    pub modes: Vec<(f64, f64)>,
}

impl HarmonicModes {
    fn exponents(&self, k: usize) -> (f64, f64) {
        let l = (k as f64).sqrt() as usize;
        (l as f64, -((l + self.n - 2) as f64))
    }

    /// (value, d/dr, d^2/dr^2) of mode k's radial part at radius r.
    pub fn radial(&self, k: usize, r: f64) -> (f64, f64, f64) {
        let (a, b) = self.modes[k];
        let (p, q) = self.exponents(k);
        let mut v = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        if a != 0.0 {
            let rp = r.powf(p);
            v += a * rp;
            if p != 0.0 {
                d1 += a * p * rp / r;
                d2 += a * p * (p - 1.0) * rp / (r * r);
            }
        }
        if b != 0.0 {
            let rq = r.powf(q);
            v += b * rq;
            d1 += b * q * rq / r;
            d2 += b * q * (q - 1.0) * rq / (r * r);
        }
        (v, d1, d2)
    }
}

/// Solve for the per-mode radial coefficients of the harmonic extension.
pub fn solve_modes(domain: &Domain, trace: &BoundaryTrace) -> Result<HarmonicModes> {
    let n = domain.n();
    let len = (trace.l_max + 1) * (trace.l_max + 1);
    if n != 3 {
        for c in &trace.components {
            if c.coeffs.iter().skip(1).any(|x| *x != 0.0) {
                return Err(Error::InvalidInput(
                    "only radial (constant) traces are supported for n > 3".into(),
                ));
            }
        }
    }
    match domain {
        Domain::Ball { radius, .. } => {
            if trace.components.len() != 1 {
                return Err(Error::InvalidInput(
                    "ball traces have a single boundary component".into(),
                ));
            }
            let coeffs = &trace.components[0].coeffs;
            let modes = (0..len)
                .map(|k| {
                    let l = (k as f64).sqrt() as usize;
                    (coeffs[k] / radius.powi(l as i32), 0.0)
                })
                .collect();
            Ok(HarmonicModes {
                n,
                l_max: trace.l_max,
                modes,
            })
        }
        Domain::Annulus {
            r_inner, r_outer, ..
        } => {
            if trace.components.len() != 2 {
                return Err(Error::InvalidInput(
                    "annulus traces need inner and outer components".into(),
                ));
            }
            let inner = &trace.components[0].coeffs;
            let outer = &trace.components[1].coeffs;
            let mut modes = Vec::with_capacity(len);
            for k in 0..len {
                let l = (k as f64).sqrt() as usize;
                let p = l as f64;
                let q = -((l + n - 2) as f64);
                // 2x2 solve: a r^p + b r^q matches both traces; the system is
                // nonsingular whenever r_inner < r_outer
                let a11 = r_inner.powf(p);
                let a12 = r_inner.powf(q);
                let a21 = r_outer.powf(p);
                let a22 = r_outer.powf(q);
                let det = a11 * a22 - a12 * a21;
                let a = (inner[k] * a22 - outer[k] * a12) / det;
                let b = (outer[k] * a11 - inner[k] * a21) / det;
                modes.push((a, b));
            }
            Ok(HarmonicModes {
                n,
                l_max: trace.l_max,
                modes,
            })
        }
        Domain::BumpBall { .. } => Err(Error::InvalidInput(
            "harmonic extension is provided on balls and annuli only".into(),
        )),
    }
}

fn angular_values(n: usize, basis: &SphericalHarmonicBasis, node: &GridNode, buf: &mut Vec<f64>) {
    if n == 3 {
        buf.resize(basis.len(), 0.0);
        basis.eval_all(node.cos_theta, node.psi, buf);
    } else {
        buf.clear();
        buf.push(1.0 / unit_sphere_volume(n).sqrt());
    }
}

pub(crate) fn extension_value(
    domain: &Domain,
    trace: &BoundaryTrace,
    basis: &SphericalHarmonicBasis,
    node: &GridNode,
) -> f64 {
    let modes = solve_modes(domain, trace).expect("valid trace");
    let mut ang = Vec::new();
    angular_values(domain.n(), basis, node, &mut ang);
    ang.iter()
        .enumerate()
        .map(|(k, y)| modes.radial(k, node.r).0 * y)
        .sum()
}

pub(crate) fn extension_laplacian(
    domain: &Domain,
    trace: &BoundaryTrace,
    basis: &SphericalHarmonicBasis,
    node: &GridNode,
) -> f64 {
    let modes = solve_modes(domain, trace).expect("valid trace");
    let n = domain.n() as f64;
    let mut ang = Vec::new();
    angular_values(domain.n(), basis, node, &mut ang);
    let r = node.r;
    ang.iter()
        .enumerate()
        .map(|(k, y)| {
            let l = (k as f64).sqrt().floor();
            let (v, d1, d2) = modes.radial(k, r);
            (d2 + (n - 1.0) * d1 / r - l * (l + n - 2.0) * v / (r * r)) * y
        })
        .sum()
}

pub(crate) fn extension_normal_derivative(
    domain: &Domain,
    trace: &BoundaryTrace,
    basis: &SphericalHarmonicBasis,
    component: &BoundaryComponent,
    sphere: &QuadratureGrid,
) -> Vec<f64> {
    let modes = solve_modes(domain, trace).expect("valid trace");
    let mut ang = Vec::new();
    sphere
        .nodes
        .iter()
        .map(|node| {
            angular_values(domain.n(), basis, node, &mut ang);
            let d: f64 = ang
                .iter()
                .enumerate()
                .map(|(k, y)| modes.radial(k, component.radius).1 * y)
                .sum();
            component.normal_sign * d
        })
        .collect()
}

/// Harmonic extension of a boundary trace, packaged as a conformal factor.
pub fn harmonic_extension(
    domain: &Domain,
    trace: &BoundaryTrace,
) -> Result<crate::domain::ConformalFactor> {
    solve_modes(domain, trace)?;
    Ok(crate::domain::ConformalFactor::harmonic(
        domain.clone(),
        trace.clone(),
    ))
}

/// Dirichlet energy of mode l on a ball of the given radius, per unit squared
/// trace coefficient.
pub fn ball_mode_dirichlet(n: usize, radius: f64, l: usize) -> f64 {
    l as f64 * radius.powi(n as i32 - 2)
}

/// Quadratic form of the Dirichlet energy of mode l on an annulus, in the
/// (inner, outer) trace coefficients.
pub fn annulus_mode_dirichlet(n: usize, r_inner: f64, r_outer: f64, l: usize) -> [[f64; 2]; 2] {
    let p = l as f64;
    let q = -((l + n - 2) as f64);
    let nf = n as f64;
    // energy is diagonal in the (a, b) radial coefficients
    let alpha = p * (r_outer.powf(2.0 * p + nf - 2.0) - r_inner.powf(2.0 * p + nf - 2.0));
    let beta = q * (r_outer.powf(2.0 * q + nf - 2.0) - r_inner.powf(2.0 * q + nf - 2.0));
    let a11 = r_inner.powf(p);
    let a12 = r_inner.powf(q);
    let a21 = r_outer.powf(p);
    let a22 = r_outer.powf(q);
    let det = a11 * a22 - a12 * a21;
    // inverse of the interpolation matrix
    let inv = [[a22 / det, -a12 / det], [-a21 / det, a11 / det]];
    let mut s = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = alpha * inv[0][i] * inv[0][j] + beta * inv[1][i] * inv[1][j];
        }
    }
    s
}

/// Dirichlet energy of the harmonic extension, by the per-mode closed forms.
pub fn dirichlet_energy(domain: &Domain, trace: &BoundaryTrace) -> Result<f64> {
    solve_modes(domain, trace)?;
    let n = domain.n();
    let len = (trace.l_max + 1) * (trace.l_max + 1);
    match domain {
        Domain::Ball { radius, .. } => {
            let coeffs = &trace.components[0].coeffs;
            Ok((0..len)
                .map(|k| {
                    let l = (k as f64).sqrt() as usize;
                    ball_mode_dirichlet(n, *radius, l) * coeffs[k] * coeffs[k]
                })
                .sum())
        }
        Domain::Annulus {
            r_inner, r_outer, ..
        } => {
            let inner = &trace.components[0].coeffs;
            let outer = &trace.components[1].coeffs;
            Ok((0..len)
                .map(|k| {
                    let l = (k as f64).sqrt() as usize;
                    let s = annulus_mode_dirichlet(n, *r_inner, *r_outer, l);
                    let t = [inner[k], outer[k]];
                    s[0][0] * t[0] * t[0] + 2.0 * s[0][1] * t[0] * t[1] + s[1][1] * t[1] * t[1]
                })
                .sum())
        }
        Domain::BumpBall { .. } => Err(Error::InvalidInput(
            "Dirichlet energy is provided on balls and annuli only".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Steklov spectra
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SteklovSpectrum {
    pub domain: Domain,
    pub l_max: usize,
    /// Sorted ascending, repeated according to multiplicity.
    pub eigenvalues: Vec<f64>,
    /// Every eigenvalue not represented here exceeds this value.
    pub certified_up_to: f64,
}

/// Dirichlet-to-Neumann map of mode l on an annulus, acting on (inner, outer)
/// boundary values; outward normals on both components.
pub fn annulus_mode_dtn(n: usize, r_inner: f64, r_outer: f64, l: usize) -> [[f64; 2]; 2] {
    let p = l as f64;
    let q = -((l + n - 2) as f64);
    let a11 = r_inner.powf(p);
    let a12 = r_inner.powf(q);
    let a21 = r_outer.powf(p);
    let a22 = r_outer.powf(q);
    let det = a11 * a22 - a12 * a21;
    let inv = [[a22 / det, -a12 / det], [-a21 / det, a11 / det]];
    // outward derivative rows: -d/dr at the inner sphere, +d/dr at the outer
    let d = [
        [-p * a11 / r_inner, -q * a12 / r_inner],
        [p * a21 / r_outer, q * a22 / r_outer],
    ];
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = d[i][0] * inv[0][j] + d[i][1] * inv[1][j];
        }
    }
    m
}

/// Eigenvalues of a 2x2 matrix known to be similar to a symmetric one.
pub fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    ((tr - disc) / 2.0, (tr + disc) / 2.0)
}

pub fn steklov_spectrum(domain: &Domain, l_max: usize) -> Result<SteklovSpectrum> {
    let n = domain.n();
    let mut eigenvalues = Vec::new();
    let certified_up_to;
    match domain {
        Domain::Ball { radius, .. } => {
            for l in 0..=l_max {
                let lam = l as f64 / radius;
                for _ in 0..harmonic_dimension(n, l) {
                    eigenvalues.push(lam);
                }
            }
            certified_up_to = l_max as f64 / radius;
        }
        Domain::Annulus {
            r_inner, r_outer, ..
        } => {
            let mut top_min = f64::INFINITY;
            for l in 0..=l_max {
                let (lo, hi) = eigenvalues_2x2(annulus_mode_dtn(n, *r_inner, *r_outer, l));
                for _ in 0..harmonic_dimension(n, l) {
                    eigenvalues.push(lo);
                    eigenvalues.push(hi);
                }
                if l == l_max {
                    top_min = lo;
                }
            }
            // per-mode eigenvalues increase with l, so modes beyond l_max sit
            // above the smaller eigenvalue of the top mode
            certified_up_to = top_min;
        }
        Domain::BumpBall { .. } => {
            return Err(Error::InvalidInput(
                "Steklov spectra are provided on balls and annuli only".into(),
            ))
        }
    }
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SteklovSpectrum {
        domain: domain.clone(),
        l_max,
        eigenvalues,
        certified_up_to,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyVerdict {
    NonDegenerate,
    Degenerate,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NondegeneracyReport {
    pub verdict: DegeneracyVerdict,
    /// H/(n-1), the value tested for spectrum membership.
    pub target: f64,
    pub min_distance: f64,
    pub certified_up_to: f64,
    pub tolerance: f64,
}

/// A constant-mean-curvature scalar-flat metric is non-degenerate if H = 0 or
/// H/(n-1) misses the Steklov spectrum. An under-resolved spectrum yields
/// `Inconclusive`, never a silent pass.
pub fn nondegeneracy_check(
    h_const: f64,
    spectrum: &SteklovSpectrum,
    n: usize,
    tolerance: Option<f64>,
) -> NondegeneracyReport {
    let tol = tolerance.unwrap_or(1e-9);
    if h_const == 0.0 {
        return NondegeneracyReport {
            verdict: DegeneracyVerdict::NonDegenerate,
            target: 0.0,
            min_distance: 0.0,
            certified_up_to: spectrum.certified_up_to,
            tolerance: tol,
        };
    }
    let target = h_const / (n as f64 - 1.0);
    let min_distance = spectrum
        .eigenvalues
        .iter()
        .map(|lam| (lam - target).abs())
        .fold(f64::INFINITY, f64::min);
    let verdict = if min_distance <= tol {
        DegeneracyVerdict::Degenerate
    } else if target <= spectrum.certified_up_to {
        DegeneracyVerdict::NonDegenerate
    } else {
        DegeneracyVerdict::Inconclusive
    };
    NondegeneracyReport {
        verdict,
        target,
        min_distance,
        certified_up_to: spectrum.certified_up_to,
        tolerance: tol,
    }
}
