//! The boundary Yamabe energy E(g), the boundary quotient Q_g, and the CR
//! energy functionals.
//!
//! E(g) = (int_M R dV + 2 int_dM H dA) / Vol(dM)^{(n-2)/(n-1)}
//!
//! Q_g(phi) = (int_M (4(n-1)/(n-2)) |grad phi|^2 + R phi^2 dV
//!             + 2 int_dM H phi^2 dA)
//!            / (int_dM |phi|^{2(n-1)/(n-2)} dA)^{(n-2)/(n-1)}

use crate::basis::{BasisValues, SphericalHarmonicBasis};
use crate::domain::{Domain, MetricData};
use crate::error::{Error, Result};
use crate::harmonic::{self, BoundaryTrace};
use crate::quadrature::{
    pairwise_sum_with, radial_sphere_quadrature, radial_volume_quadrature, sphere_quadrature,
    QuadratureGrid,
};

/// Grid bundle for one domain: the (unit-sphere) boundary rule, the volume
/// rule, the harmonic basis, and the basis values cached at the sphere nodes.
pub struct Grids {
    pub domain: Domain,
    pub basis: SphericalHarmonicBasis,
    pub sphere: QuadratureGrid,
    pub volume: QuadratureGrid,
    pub sphere_basis: BasisValues,
}

impl Grids {
    /// Rules sized for band limit `l_max`: boundary integrands up to degree
    /// 4 l_max (the |phi|^4 terms of the n = 3 quotient) are exact.
    pub fn new(domain: &Domain, l_max: usize) -> Self {
        Self::with_orders(domain, l_max, 2 * l_max + 2, 2 * l_max + 2)
    }

    pub fn with_orders(
        domain: &Domain,
        l_max: usize,
        sphere_order: usize,
        radial_order: usize,
    ) -> Self {
        let basis = SphericalHarmonicBasis::new(l_max);
        let sphere = if domain.n() == 3 {
            sphere_quadrature(sphere_order.max(l_max + 1))
        } else {
            radial_sphere_quadrature(domain.n())
        };
        let volume = radial_volume_quadrature(domain, radial_order.max(2));
        let sphere_basis = if domain.n() == 3 {
            basis.values_at(&sphere.nodes)
        } else {
            BasisValues {
                n_basis: 1,
                values: vec![
                    1.0 / crate::special::unit_sphere_volume(domain.n()).sqrt();
                    sphere.len()
                ],
            }
        };
        Grids {
            domain: domain.clone(),
            basis,
            sphere,
            volume,
            sphere_basis,
        }
    }

    /// Integral over boundary component `c` of a node-indexed integrand.
    pub fn boundary_integral(&self, component: usize, f: impl Fn(usize) -> f64) -> f64 {
        let comp = self.domain.boundary_components()[component];
        let scale = comp.radius.powi(self.domain.n() as i32 - 1);
        scale * pairwise_sum_with(self.sphere.len(), |j| self.sphere.weights[j] * f(j))
    }

    pub fn volume_integral(&self, f: impl Fn(usize) -> f64) -> f64 {
        pairwise_sum_with(self.volume.len(), |j| self.volume.weights[j] * f(j))
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EnergyReport {
    pub numerator_interior: f64,
    pub numerator_boundary: f64,
    pub boundary_volume: f64,
    pub energy: f64,
}

/// Boundary volume of the metric, Vol_g(dM).
pub fn boundary_volume(metric: &MetricData, grids: &Grids) -> f64 {
    (0..metric.boundary.len())
        .map(|c| grids.boundary_integral(c, |j| metric.boundary[c].area_scale[j]))
        .sum()
}

/// The energy E(g) and its decomposition.
pub fn yamabe_energy(domain: &Domain, metric: &MetricData, grids: &Grids) -> Result<EnergyReport> {
    let n = domain.n() as f64;
    let interior = grids.volume_integral(|j| metric.scalar_curvature[j] * metric.volume_scale[j]);
    let mut boundary = 0.0;
    for c in 0..metric.boundary.len() {
        let data = &metric.boundary[c];
        boundary +=
            2.0 * grids.boundary_integral(c, |j| data.mean_curvature[j] * data.area_scale[j]);
    }
    let vol = boundary_volume(metric, grids);
    if !(vol > 0.0) {
        return Err(Error::BoundaryVolumeNotPositive { value: vol });
    }
    Ok(EnergyReport {
        numerator_interior: interior,
        numerator_boundary: boundary,
        boundary_volume: vol,
        energy: (interior + boundary) / vol.powf((n - 2.0) / (n - 1.0)),
    })
}

/// A W^{1,2} test function presented through the data the quotient needs:
/// boundary values per component, values at the volume nodes, and the exact
/// Euclidean Dirichlet integral int |grad phi|^2 dV.
pub struct FunctionOnDomain {
    pub boundary_values: Vec<Vec<f64>>,
    pub volume_values: Vec<f64>,
    pub dirichlet: f64,
}

impl FunctionOnDomain {
    /// The harmonic extension of a trace; the Dirichlet term comes from the
    /// per-mode closed form, not node-wise differentiation.
    pub fn harmonic(domain: &Domain, trace: &BoundaryTrace, grids: &Grids) -> Result<Self> {
        let factor = harmonic::harmonic_extension(domain, trace)?;
        let boundary_values = domain
            .boundary_components()
            .iter()
            .map(|comp| factor.boundary_values_on(comp, &grids.sphere, &grids.basis))
            .collect();
        Ok(Self {
            boundary_values,
            volume_values: factor.values_on(&grids.volume, &grids.basis),
            dirichlet: harmonic::dirichlet_energy(domain, trace)?,
        })
    }

    /// Separable extension sum_k c_k f_l(r) Y_k on a ball, from per-degree
    /// radial profiles with f_l(R) = 1. Dirichlet energy comes from the mode
    /// orthogonality identity
    /// int |grad phi|^2 = sum_k c_k^2 int (f' ^2 + l(l+1) f^2 / r^2) r^2 dr.
    pub fn separable_on_ball(
        domain: &Domain,
        trace: &BoundaryTrace,
        radial: impl Fn(usize, f64) -> (f64, f64),
        grids: &Grids,
    ) -> Result<Self> {
        let (n, radius) = match domain {
            Domain::Ball { n, radius } => (*n, *radius),
            _ => {
                return Err(Error::InvalidInput(
                    "separable test extensions are set up on balls only".into(),
                ))
            }
        };
        if n != 3 {
            return Err(Error::InvalidInput(
                "separable extensions need n = 3".into(),
            ));
        }
        let coeffs = &trace.components[0].coeffs;
        for k in 0..coeffs.len() {
            let l = (k as f64).sqrt() as usize;
            let (v, _) = radial(l, radius);
            if (v - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "radial profile for degree {l} is {v} at the boundary, expected 1"
                )));
            }
        }
        let boundary_values = vec![grids.basis.synthesize_with(&grids.sphere_basis, coeffs)];
        // volume values node by node
        let mut volume_values = vec![0.0; grids.volume.len()];
        let mut ys = vec![0.0; grids.basis.len()];
        for (j, node) in grids.volume.nodes.iter().enumerate() {
            grids.basis.eval_all(node.cos_theta, node.psi, &mut ys);
            volume_values[j] = ys
                .iter()
                .zip(coeffs)
                .enumerate()
                .map(|(k, (y, c))| {
                    let l = (k as f64).sqrt() as usize;
                    c * radial(l, node.r).0 * y
                })
                .sum();
        }
        // radial Gauss-Legendre for the Dirichlet integral
        let (xs, ws) = crate::quadrature::gauss_legendre(64);
        let mut dirichlet = 0.0;
        for (k, c) in coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            let l = (k as f64).sqrt() as usize;
            let mut integral = 0.0;
            for (x, w) in xs.iter().zip(&ws) {
                let r = 0.5 * radius * (x + 1.0);
                let (f, df) = radial(l, r);
                integral +=
                    w * 0.5 * radius * (df * df + (l * (l + 1)) as f64 * f * f / (r * r)) * r * r;
            }
            dirichlet += c * c * integral;
        }
        Ok(Self {
            boundary_values,
            volume_values,
            dirichlet,
        })
    }
}

/// The quotient Q_g(phi). The boundary exponent tau = 2(n-1)/(n-2) is applied
/// to |phi|, so sign-changing test functions are admissible.
pub fn boundary_quotient(
    domain: &Domain,
    metric: &MetricData,
    phi: &FunctionOnDomain,
    grids: &Grids,
) -> Result<f64> {
    let n = domain.n() as f64;
    let kappa = 4.0 * (n - 1.0) / (n - 2.0);
    let tau = 2.0 * (n - 1.0) / (n - 2.0);
    let dirichlet_scale = metric.dirichlet_scale.ok_or_else(|| {
        Error::InvalidInput(
            "the quotient needs a metric with a well-defined Dirichlet factor".into(),
        )
    })?;
    let mut numerator = kappa * dirichlet_scale * phi.dirichlet;
    numerator += grids.volume_integral(|j| {
        metric.scalar_curvature[j]
            * phi.volume_values[j]
            * phi.volume_values[j]
            * metric.volume_scale[j]
    });
    let mut denominator = 0.0;
    for c in 0..metric.boundary.len() {
        let data = &metric.boundary[c];
        let values = &phi.boundary_values[c];
        numerator += 2.0
            * grids.boundary_integral(c, |j| {
                data.mean_curvature[j] * values[j] * values[j] * data.area_scale[j]
            });
        denominator +=
            grids.boundary_integral(c, |j| values[j].abs().powf(tau) * data.area_scale[j]);
    }
    if !(denominator > 1e-300) {
        return Err(Error::VanishingBoundaryNorm);
    }
    Ok(numerator / denominator.powf((n - 2.0) / (n - 1.0)))
}

// ---------------------------------------------------------------------------
// CR energies on supplied discrete data
// ---------------------------------------------------------------------------

/// Discrete CR data: quadrature weights for dV, Webster curvature values, and
/// optionally a conformal factor u with its horizontal gradient norms. The
/// manifold has real dimension 2n + 1.
#[derive(Clone, Debug)]
pub struct CRData {
    pub n: usize,
    pub weights: Vec<f64>,
    pub scalar_curvature: Vec<f64>,
    pub u: Option<Vec<f64>>,
    pub grad_norm: Option<Vec<f64>>,
}

impl CRData {
    pub fn new(
        n: usize,
        weights: Vec<f64>,
        scalar_curvature: Vec<f64>,
        u: Option<Vec<f64>>,
        grad_norm: Option<Vec<f64>>,
    ) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyData);
        }
        if weights.len() != scalar_curvature.len() {
            return Err(Error::InvalidInput(
                "weights and R columns differ in length".into(),
            ));
        }
        for (field, name) in [(&u, "u"), (&grad_norm, "grad_norm")] {
            if let Some(v) = field {
                if v.len() != weights.len() {
                    return Err(Error::InvalidInput(format!(
                        "column {name} differs in length from weights"
                    )));
                }
            }
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        if let Some(us) = &u {
            if let Some((i, bad)) = us.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::NonpositiveFactor {
                    index: i,
                    radius: f64::NAN,
                    value: *bad,
                });
            }
        }
        Ok(Self {
            n,
            weights,
            scalar_curvature,
            u,
            grad_norm,
        })
    }

    /// Read columns weight, R, and optionally u, grad_norm from a CSV file.
    pub fn from_csv(path: &std::path::Path, n: usize) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim() == name);
        let w_col = col("weight").ok_or_else(|| Error::MissingColumn("weight".into()))?;
        let r_col = col("R").ok_or_else(|| Error::MissingColumn("R".into()))?;
        let u_col = col("u");
        let g_col = col("grad_norm");
        let mut weights = Vec::new();
        let mut curv = Vec::new();
        let mut u = u_col.map(|_| Vec::new());
        let mut g = g_col.map(|_| Vec::new());
        for record in reader.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("bad numeric field {:?}", record.get(i)))
                    })
            };
            weights.push(parse(w_col)?);
            curv.push(parse(r_col)?);
            if let (Some(col), Some(acc)) = (u_col, u.as_mut()) {
                acc.push(parse(col)?);
            }
            if let (Some(col), Some(acc)) = (g_col, g.as_mut()) {
                acc.push(parse(col)?);
            }
        }
        Self::new(n, weights, curv, u, g)
    }

    pub fn volume(&self) -> f64 {
        crate::quadrature::pairwise_sum(&self.weights)
    }
}

/// E(theta) = int R dV / Vol^{n/(n+1)} on the supplied data.
pub fn cr_energy(data: &CRData) -> Result<f64> {
    if data.weights.is_empty() {
        return Err(Error::EmptyData);
    }
    let nf = data.n as f64;
    let num = pairwise_sum_with(data.weights.len(), |i| {
        data.weights[i] * data.scalar_curvature[i]
    });
    Ok(num / data.volume().powf(nf / (nf + 1.0)))
}

/// The conformal quotient
/// int (2 + 2/n) |grad u|^2 + R u^2 dV / (int u^{2+2/n} dV)^{n/(n+1)}.
pub fn cr_quotient(data: &CRData) -> Result<f64> {
    let u = data
        .u
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("cr_quotient needs a u column".into()))?;
    let grad = data
        .grad_norm
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("cr_quotient needs a grad_norm column".into()))?;
    for (i, &v) in u.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonpositiveFactor {
                index: i,
                radius: f64::NAN,
                value: v,
            });
        }
    }
    let nf = data.n as f64;
    let coef = 2.0 + 2.0 / nf;
    let num = pairwise_sum_with(data.weights.len(), |i| {
        data.weights[i] * (coef * grad[i] * grad[i] + data.scalar_curvature[i] * u[i] * u[i])
    });
    let den = pairwise_sum_with(data.weights.len(), |i| data.weights[i] * u[i].powf(coef));
    Ok(num / den.powf(nf / (nf + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_ball_energy_is_8_sqrt_pi() {
        let dom = Domain::ball(3, 1.0).unwrap();
        let grids = Grids::new(&dom, 4);
        let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
        let report = yamabe_energy(&dom, &metric, &grids).unwrap();
        assert_relative_eq!(report.energy, 8.0 * PI.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(report.numerator_interior, 0.0, epsilon = 1e-13);
        assert_relative_eq!(report.numerator_boundary, 16.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(report.boundary_volume, 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn euclidean_annulus_energy_matches_closed_form() {
        let dom = Domain::annulus(3, 0.5, 1.0).unwrap();
        let grids = Grids::new(&dom, 4);
        let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
        let report = yamabe_energy(&dom, &metric, &grids).unwrap();
        assert_relative_eq!(
            report.energy,
            8.0 * PI / (5.0 * PI).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rescaled_metric_has_equal_energy() {
        let dom = Domain::annulus(3, 0.4, 1.1).unwrap();
        let grids = Grids::new(&dom, 3);
        let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
        let base = yamabe_energy(&dom, &metric, &grids).unwrap().energy;
        for c in [0.2, 1.0, 5.5] {
            let scaled = metric.scaled(c, 3);
            let got = yamabe_energy(&dom, &scaled, &grids).unwrap().energy;
            assert_relative_eq!(got, base, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_test_function_reduces_to_energy() {
        let dom = Domain::ball(3, 1.0).unwrap();
        let grids = Grids::new(&dom, 4);
        let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
        let trace = BoundaryTrace::constant(&dom, 4, &[1.0]).unwrap();
        let phi = FunctionOnDomain::harmonic(&dom, &trace, &grids).unwrap();
        let q = boundary_quotient(&dom, &metric, &phi, &grids).unwrap();
        assert_relative_eq!(q, 8.0 * PI.sqrt(), max_relative = 1e-12);
        // degree-zero homogeneity
        let phi_t = FunctionOnDomain::harmonic(&dom, &trace.scaled(3.7), &grids).unwrap();
        let qt = boundary_quotient(&dom, &metric, &phi_t, &grids).unwrap();
        assert_relative_eq!(qt, q, max_relative = 1e-12);
    }

    #[test]
    fn cr_energy_examples() {
        let single = CRData::new(1, vec![1.0], vec![2.0], None, None).unwrap();
        assert_relative_eq!(cr_energy(&single).unwrap(), 2.0, max_relative = 1e-15);

        let two = CRData::new(1, vec![1.0, 2.0], vec![1.0, 3.0], None, None).unwrap();
        assert_relative_eq!(
            cr_energy(&two).unwrap(),
            7.0 / 3.0_f64.sqrt(),
            max_relative = 1e-14
        );

        // constant curvature: E = c Vol^{1/(n+1)}
        let n = 2usize;
        let c = 1.7;
        let data = CRData::new(n, vec![0.5, 0.25, 1.5], vec![c; 3], None, None).unwrap();
        let vol: f64 = 2.25;
        assert_relative_eq!(
            cr_energy(&data).unwrap(),
            c * vol.powf(1.0 / (n as f64 + 1.0)),
            max_relative = 1e-14
        );
    }

    #[test]
    fn cr_quotient_reduces_to_energy_for_constants() {
        let data = CRData::new(
            1,
            vec![1.0, 2.0, 0.5],
            vec![1.0, 3.0, -0.5],
            Some(vec![4.2; 3]),
            Some(vec![0.0; 3]),
        )
        .unwrap();
        let e = cr_energy(&data).unwrap();
        let q = cr_quotient(&data).unwrap();
        assert_relative_eq!(q, e, max_relative = 1e-14);

        // (R=0, w=1, u=1, |grad u|=1, n=1) -> (2+2/1)*1 / 1 = 4
        let unit = CRData::new(1, vec![1.0], vec![0.0], Some(vec![1.0]), Some(vec![1.0])).unwrap();
        assert_relative_eq!(cr_quotient(&unit).unwrap(), 4.0, max_relative = 1e-15);
    }

    #[test]
    fn nonpositive_u_is_rejected() {
        let result = CRData::new(
            1,
            vec![1.0, 1.0],
            vec![0.0, 0.0],
            Some(vec![1.0, -1.0]),
            Some(vec![0.0, 0.0]),
        );
        match result {
            Err(Error::NonpositiveFactor { index, value, .. }) => {
                assert_eq!(index, 1);
                assert_eq!(value, -1.0);
            }
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join("yamabe_lab_cr_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        std::fs::write(
            &path,
            "weight,R,u,grad_norm\n1.0,2.0,1.5,0.25\n2.0,3.0,0.5,0.0\n",
        )
        .unwrap();
        let data = CRData::from_csv(&path, 1).unwrap();
        assert_eq!(data.weights, vec![1.0, 2.0]);
        assert_eq!(data.scalar_curvature, vec![2.0, 3.0]);
        assert_eq!(data.u.as_deref(), Some(&[1.5, 0.5][..]));
        assert_eq!(data.grad_norm.as_deref(), Some(&[0.25, 0.0][..]));
    }
}
