//! The Schwarzschild annulus family: the conformally flat, scalar-flat
//! metrics (1 + m/(2 r^{n-2}))^{4/(n-2)} delta on the annulus r <= |x| <= 1,
//! with closed forms for the boundary mean curvatures, the energy, its
//! m -> infinity limit, and the threshold mass above which the energy
//! exceeds the Euclidean annulus energy.
//!
//! The closed forms are calibrated against reference boundary curvatures
//! (-(n-1), n-1): the inner value carries no 1/r factor, so at m = 0 the
//! inner formula reduces to -(n-1) rather than the Euclidean -(n-1)/r. The
//! conformal-change pipeline in `pipeline_energy` feeds the same reference
//! values through the curvature transformation laws and reproduces every
//! closed form to rounding error.

use crate::domain::{BoundaryData, ConformalFactor, Domain, MetricData};
use crate::energy::{yamabe_energy, EnergyReport, Grids};
use crate::error::{Error, Result};
use crate::special::unit_sphere_volume;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug)]
pub struct SchwarzschildParams {
    pub n: usize,
    pub r: f64,
    pub m: f64,
}

impl SchwarzschildParams {
    pub fn new(n: usize, r: f64, m: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDomain(format!("dimension {n} < 3")));
        }
        if !(0.0 < r && r < 1.0) {
            return Err(Error::InvalidDomain(format!(
                "inner radius {r} must lie in (0,1)"
            )));
        }
        if !(m >= 0.0) {
            return Err(Error::InvalidDomain(format!(
                "mass {m} must be nonnegative"
            )));
        }
        Ok(Self { n, r, m })
    }

    pub fn domain(&self) -> Domain {
        Domain::annulus(self.n, self.r, 1.0).unwrap()
    }

    /// The conformal factor 1 + m/(2 r^{n-2}).
    pub fn factor(&self) -> ConformalFactor {
        ConformalFactor::schwarzschild(self.domain(), self.m)
    }

    fn u_inner(&self) -> f64 {
        1.0 + 0.5 * self.m / self.r.powi(self.n as i32 - 2)
    }

    fn u_outer(&self) -> f64 {
        1.0 + 0.5 * self.m
    }
}

/// Reference curvature constants of the closed forms below, per boundary
/// sphere (inner, outer).
pub fn reference_base_curvatures(n: usize) -> (f64, f64) {
    (-((n - 1) as f64), (n - 1) as f64)
}

/// The displayed mean curvatures of the family on the inner and outer
/// spheres:
///   inner: (n-1) (m/r^{n-1} - (1 + m/(2 r^{n-2}))) (1 + m/(2 r^{n-2}))^{-n/(n-2)}
///   outer: (n-1) (1 - m/2) (1 + m/2)^{-n/(n-2)}
pub fn schwarzschild_mean_curvatures(p: &SchwarzschildParams) -> (f64, f64) {
    let nf = p.n as f64;
    let exp = -nf / (nf - 2.0);
    let u_in = p.u_inner();
    let u_out = p.u_outer();
    let inner = (nf - 1.0) * (p.m / p.r.powf(nf - 1.0) - u_in) * u_in.powf(exp);
    let outer = (nf - 1.0) * (1.0 - 0.5 * p.m) * u_out.powf(exp);
    (inner, outer)
}

/// Closed-form energy of the family:
/// 2(n-1) Vol(S^{n-1}) { (m - r^{n-1} - (m/2) r)(1 + m/(2 r^{n-2})) + 1 - m^2/4 }
/// over the boundary volume to the power (n-2)/(n-1).
pub fn schwarzschild_energy(p: &SchwarzschildParams) -> f64 {
    let nf = p.n as f64;
    let vol = unit_sphere_volume(p.n);
    let u_in = p.u_inner();
    let u_out = p.u_outer();
    let tau = 2.0 * (nf - 1.0) / (nf - 2.0);
    let numerator = 2.0
        * (nf - 1.0)
        * vol
        * ((p.m - p.r.powf(nf - 1.0) - 0.5 * p.m * p.r) * u_in + 1.0 - 0.25 * p.m * p.m);
    let boundary_volume = vol * (u_out.powf(tau) + u_in.powf(tau) * p.r.powf(nf - 1.0));
    numerator / boundary_volume.powf((nf - 2.0) / (nf - 1.0))
}

/// Energy of the Euclidean annulus A_{r,1}:
/// 2(n-1)(1 - r^{n-2}) Vol(S^{n-1}) / ((1 + r^{n-1}) Vol(S^{n-1}))^{(n-2)/(n-1)}.
pub fn euclidean_annulus_energy(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let vol = unit_sphere_volume(n);
    2.0 * (nf - 1.0) * (1.0 - r.powf(nf - 2.0)) * vol
        / ((1.0 + r.powf(nf - 1.0)) * vol).powf((nf - 2.0) / (nf - 1.0))
}

/// The m -> infinity limit of the closed-form energy:
/// 2(n-1)(2 - r - r^{n-2}) Vol(S^{n-1}) / ((1 + r^{n-1}) Vol(S^{n-1}))^{(n-2)/(n-1)}.
pub fn schwarzschild_energy_limit(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    let vol = unit_sphere_volume(n);
    2.0 * (nf - 1.0) * (2.0 - r - r.powf(nf - 2.0)) * vol
        / ((1.0 + r.powf(nf - 1.0)) * vol).powf((nf - 2.0) / (nf - 1.0))
}

/// Base metric data carrying the reference curvature constants, for feeding
/// the conformal-change pipeline.
pub fn reference_base_metric(p: &SchwarzschildParams, grids: &Grids) -> MetricData {
    let (h_inner, h_outer) = reference_base_curvatures(p.n);
    MetricData {
        scalar_curvature: vec![0.0; grids.volume.len()],
        volume_scale: vec![1.0; grids.volume.len()],
        boundary: vec![
            BoundaryData {
                mean_curvature: vec![h_inner; grids.sphere.len()],
                area_scale: vec![1.0; grids.sphere.len()],
            },
            BoundaryData {
                mean_curvature: vec![h_outer; grids.sphere.len()],
                area_scale: vec![1.0; grids.sphere.len()],
            },
        ],
        dirichlet_scale: Some(1.0),
    }
}

/// The same energy through the conformal-change pipeline: transform the
/// reference base data by the factor and integrate the definition.
pub fn pipeline_energy(p: &SchwarzschildParams, grids: &Grids) -> Result<EnergyReport> {
    let domain = p.domain();
    let base = reference_base_metric(p, grids);
    let metric = base.conformal(
        &domain,
        &p.factor(),
        &grids.volume,
        &grids.sphere,
        &grids.basis,
    )?;
    yamabe_energy(&domain, &metric, grids)
}

/// Mean curvatures through the transformation law, for cross-checking the
/// closed forms.
pub fn pipeline_mean_curvatures(p: &SchwarzschildParams) -> Result<(f64, f64)> {
    let nf = p.n as f64;
    let (h_in, h_out) = reference_base_curvatures(p.n);
    // radial derivative of 1 + (m/2) s^{2-n}
    let du = |s: f64| 0.5 * p.m * (2.0 - nf) * s.powf(1.0 - nf);
    let inner = crate::domain::conformal_mean_curvature(
        &[h_in],
        &[p.u_inner()],
        &[-du(p.r)], // outward normal on the inner sphere is -d/dr
        p.n,
    )?[0];
    let outer =
        crate::domain::conformal_mean_curvature(&[h_out], &[p.u_outer()], &[du(1.0)], p.n)?[0];
    Ok((inner, outer))
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SweepRow {
    pub m: f64,
    pub energy: f64,
    pub euclid_energy: f64,
    pub limit: f64,
}

pub fn sweep(n: usize, r: f64, masses: &[f64]) -> Result<Vec<SweepRow>> {
    let euclid = euclidean_annulus_energy(n, r);
    let limit = schwarzschild_energy_limit(n, r);
    masses
        .par_iter()
        .map(|&m| {
            let p = SchwarzschildParams::new(n, r, m)?;
            Ok(SweepRow {
                m,
                energy: schwarzschild_energy(&p),
                euclid_energy: euclid,
                limit,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct M0Report {
    /// Smallest mass from which the energy comparison holds on the probe set.
    pub m0: f64,
    pub probe_max: f64,
    /// Energy exceeded the Euclidean value at every probed mass above m0.
    pub certified: bool,
    pub euclid_energy: f64,
}

/// Threshold mass: inf { m > 0 : E(m') > E_euclid for all probed m' >= m },
/// probed on a log grid up to 1e8 and sharpened by bisection.
pub fn find_m0(n: usize, r: f64, tol: f64) -> Result<M0Report> {
    if !(tol > 0.0) {
        return Err(Error::NonpositiveInput {
            name: "tol",
            value: tol,
        });
    }
    let euclid = euclidean_annulus_energy(n, r);
    let energy =
        |m: f64| -> Result<f64> { Ok(schwarzschild_energy(&SchwarzschildParams::new(n, r, m)?)) };
    let probe_max: f64 = 1e8;
    let probe_min: f64 = 1e-8;
    let per_decade = 64usize;
    let decades = 16usize;
    let n_probes = per_decade * decades + 1;
    let log_min = probe_min.ln();
    let log_max = probe_max.ln();
    let probe = |i: usize| -> f64 {
        (log_min + (log_max - log_min) * i as f64 / (n_probes - 1) as f64).exp()
    };
    let mut last_bad: Option<usize> = None;
    for i in 0..n_probes {
        if energy(probe(i))? <= euclid {
            last_bad = Some(i);
        }
    }
    match last_bad {
        None => Ok(M0Report {
            m0: probe_min,
            probe_max,
            certified: true,
            euclid_energy: euclid,
        }),
        Some(i) if i + 1 >= n_probes => Err(Error::NoCrossing { probe_max }),
        Some(i) => {
            let mut lo = probe(i);
            let mut hi = probe(i + 1);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if energy(mid)? > euclid {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(M0Report {
                m0: hi,
                probe_max,
                certified: true,
                euclid_energy: euclid,
            })
        }
    }
}
