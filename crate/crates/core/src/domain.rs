//! Model domains and the conformal calculus on them: how scalar curvature,
//! boundary mean curvature, and the volume/area measures respond to a
//! conformal change g -> u^{4/(n-2)} g, plus second-fundamental-form and
//! umbilicity computations for boundaries of revolution.
//!
//! Sign conventions, fixed once here: the outward unit normal points out of
//! the manifold (toward the origin on the inner sphere of an annulus), and
//! mean curvature is the full trace of the second fundamental form, so the
//! unit sphere in R^3 has H = 2 and the inner sphere of radius r has
//! H = -2/r.

use crate::basis::SphericalHarmonicBasis;
use crate::error::{Error, Result};
use crate::harmonic::{self, BoundaryTrace};
use crate::quadrature::{GridNode, QuadratureGrid};

/// A model manifold with boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Ball {
        n: usize,
        radius: f64,
    },
    Annulus {
        n: usize,
        r_inner: f64,
        r_outer: f64,
    },
    BumpBall {
        profile: BumpProfile,
    },
}

/// Which boundary sphere a quantity lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentLabel {
    Inner,
    Outer,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundaryComponent {
    pub label: ComponentLabel,
    pub radius: f64,
    /// Sign of the outward normal relative to +d/dr.
    pub normal_sign: f64,
}

impl Domain {
    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDomain(format!("dimension {n} < 3")));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "radius {radius} must be positive"
            )));
        }
        Ok(Domain::Ball { n, radius })
    }

    pub fn annulus(n: usize, r_inner: f64, r_outer: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDomain(format!("dimension {n} < 3")));
        }
        if !(0.0 < r_inner && r_inner < r_outer) {
            return Err(Error::InvalidDomain(format!(
                "need 0 < r_inner < r_outer, got [{r_inner}, {r_outer}]"
            )));
        }
        Ok(Domain::Annulus {
            n,
            r_inner,
            r_outer,
        })
    }

    pub fn bump_ball(profile: BumpProfile) -> Result<Self> {
        // the revolution-surface computation is only set up in R^3
        if !(profile.amplitude >= 0.0) {
            return Err(Error::InvalidDomain(
                "bump amplitude must be nonnegative".into(),
            ));
        }
        if !(profile.width > 0.0) {
            return Err(Error::InvalidDomain("bump width must be positive".into()));
        }
        Ok(Domain::BumpBall { profile })
    }

    pub fn n(&self) -> usize {
        match self {
            Domain::Ball { n, .. } | Domain::Annulus { n, .. } => *n,
            Domain::BumpBall { .. } => 3,
        }
    }

    pub fn boundary_components(&self) -> Vec<BoundaryComponent> {
        match self {
            Domain::Ball { radius, .. } => vec![BoundaryComponent {
                label: ComponentLabel::Outer,
                radius: *radius,
                normal_sign: 1.0,
            }],
            Domain::Annulus {
                r_inner, r_outer, ..
            } => vec![
                BoundaryComponent {
                    label: ComponentLabel::Inner,
                    radius: *r_inner,
                    normal_sign: -1.0,
                },
                BoundaryComponent {
                    label: ComponentLabel::Outer,
                    radius: *r_outer,
                    normal_sign: 1.0,
                },
            ],
            Domain::BumpBall { .. } => vec![],
        }
    }

    /// Euclidean mean curvature of each boundary sphere, outward normal.
    pub fn euclidean_mean_curvatures(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.boundary_components()
            .iter()
            .map(|c| c.normal_sign * (n - 1.0) / c.radius)
            .collect()
    }
}

/// Smooth compactly supported bump profile
/// phi(t) = amplitude * exp(1 - 1/(1 - s^2)) with s = (t - center)/width,
/// vanishing to all orders at |s| = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpProfile {
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
}

impl BumpProfile {
    pub fn new(amplitude: f64, width: f64, center: f64) -> Self {
        Self {
            amplitude,
            width,
            center,
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        let s = (theta - self.center) / self.width;
        if s.abs() >= 1.0 || self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    /// d phi / d theta
    pub fn d1(&self, theta: f64) -> f64 {
        let s = (theta - self.center) / self.width;
        if s.abs() >= 1.0 || self.amplitude == 0.0 {
            return 0.0;
        }
        let g = 1.0 - s * s;
        let core = (1.0 - 1.0 / g).exp();
        self.amplitude * core * (-2.0 * s / (g * g)) / self.width
    }

    /// d^2 phi / d theta^2
    pub fn d2(&self, theta: f64) -> f64 {
        let s = (theta - self.center) / self.width;
        if s.abs() >= 1.0 || self.amplitude == 0.0 {
            return 0.0;
        }
        let g = 1.0 - s * s;
        let core = (1.0 - 1.0 / g).exp();
        let gp = -2.0 * s / (g * g); // d/ds of (1 - 1/g)
        let gpp = -2.0 * (1.0 + 3.0 * s * s) / (g * g * g);
        self.amplitude * core * (gp * gp + gpp) / (self.width * self.width)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

// ---------------------------------------------------------------------------
// Conformal factors
// ---------------------------------------------------------------------------

/// A positive function u on a domain, in one of the representations the lab
/// works with. Curvature pipelines differentiate it per representation:
/// closed forms exactly, harmonic coefficient data spectrally, radial tables
/// by 4th-order finite differences.
#[derive(Clone, Debug)]
pub struct ConformalFactor {
    pub domain: Domain,
    pub repr: FactorRepr,
}

#[derive(Clone, Debug)]
pub enum FactorRepr {
    Constant(f64),
    /// 1 + m / (2 r^{n-2}), harmonic away from the origin.
    Schwarzschild {
        mass: f64,
    },
    /// 1 + c r^p; not harmonic unless p is 0 or 2-n.
    RadialPower {
        coefficient: f64,
        exponent: f64,
    },
    /// offset + <linear, x> in Cartesian coordinates (n = 3 grids only).
    Affine {
        offset: f64,
        linear: [f64; 3],
    },
    /// Tabulated radial profile on a uniform radius grid.
    RadialTable(RadialTable),
    /// Harmonic extension of a boundary trace (ball or annulus).
    HarmonicCoeffs(BoundaryTrace),
}

impl ConformalFactor {
    pub fn constant(domain: Domain, value: f64) -> Self {
        Self {
            domain,
            repr: FactorRepr::Constant(value),
        }
    }

    pub fn schwarzschild(domain: Domain, mass: f64) -> Self {
        Self {
            domain,
            repr: FactorRepr::Schwarzschild { mass },
        }
    }

    /// Wrap a trace as its harmonic extension. The trace must fit the domain
    /// (evaluation panics otherwise); `harmonic::harmonic_extension` is the
    /// validating constructor.
    pub fn harmonic(domain: Domain, trace: BoundaryTrace) -> Self {
        Self {
            domain,
            repr: FactorRepr::HarmonicCoeffs(trace),
        }
    }

    fn radial_value(&self, r: f64) -> Option<(f64, f64, f64)> {
        // (u, u', u'') for radial representations
        let n = self.domain.n() as f64;
        match &self.repr {
            FactorRepr::Constant(c) => Some((*c, 0.0, 0.0)),
            FactorRepr::Schwarzschild { mass } => {
                let p = 2.0 - n; // u = 1 + (m/2) r^{2-n}
                let u = 1.0 + 0.5 * mass * r.powf(p);
                let du = 0.5 * mass * p * r.powf(p - 1.0);
                let ddu = 0.5 * mass * p * (p - 1.0) * r.powf(p - 2.0);
                Some((u, du, ddu))
            }
            FactorRepr::RadialPower {
                coefficient,
                exponent,
            } => {
                let (c, p) = (*coefficient, *exponent);
                Some((
                    1.0 + c * r.powf(p),
                    c * p * r.powf(p - 1.0),
                    c * p * (p - 1.0) * r.powf(p - 2.0),
                ))
            }
            FactorRepr::RadialTable(t) => Some(t.eval(r)),
            _ => None,
        }
    }

    /// u at one grid node.
    pub fn value(&self, node: &GridNode, basis: &SphericalHarmonicBasis) -> f64 {
        if let Some((u, _, _)) = self.radial_value(node.r) {
            return u;
        }
        match &self.repr {
            FactorRepr::Affine { offset, linear } => {
                let x = node.cartesian();
                offset + linear[0] * x[0] + linear[1] * x[1] + linear[2] * x[2]
            }
            FactorRepr::HarmonicCoeffs(trace) => {
                harmonic::extension_value(&self.domain, trace, basis, node)
            }
            _ => unreachable!(),
        }
    }

    /// Laplacian of u at one node, w.r.t. the Euclidean background.
    pub fn laplacian(&self, node: &GridNode, basis: &SphericalHarmonicBasis) -> f64 {
        let n = self.domain.n() as f64;
        if let Some((_, du, ddu)) = self.radial_value(node.r) {
            return ddu + (n - 1.0) * du / node.r.max(f64::MIN_POSITIVE);
        }
        match &self.repr {
            FactorRepr::Affine { .. } => 0.0,
            FactorRepr::HarmonicCoeffs(trace) => {
                harmonic::extension_laplacian(&self.domain, trace, basis, node)
            }
            _ => unreachable!(),
        }
    }

    /// Values at every node of a grid.
    pub fn values_on(&self, grid: &QuadratureGrid, basis: &SphericalHarmonicBasis) -> Vec<f64> {
        grid.nodes.iter().map(|p| self.value(p, basis)).collect()
    }

    pub fn laplacian_on(&self, grid: &QuadratureGrid, basis: &SphericalHarmonicBasis) -> Vec<f64> {
        grid.nodes
            .iter()
            .map(|p| self.laplacian(p, basis))
            .collect()
    }

    /// Outward normal derivative on a boundary component, at the component's
    /// sphere nodes (a single value for radial representations is broadcast).
    pub fn normal_derivative_on(
        &self,
        component: &BoundaryComponent,
        sphere: &QuadratureGrid,
        basis: &SphericalHarmonicBasis,
    ) -> Vec<f64> {
        if let Some((_, du, _)) = self.radial_value(component.radius) {
            return vec![component.normal_sign * du; sphere.len()];
        }
        match &self.repr {
            FactorRepr::Affine { linear, .. } => sphere
                .nodes
                .iter()
                .map(|p| {
                    let d = GridNode { r: 1.0, ..*p }.cartesian();
                    component.normal_sign * (linear[0] * d[0] + linear[1] * d[1] + linear[2] * d[2])
                })
                .collect(),
            FactorRepr::HarmonicCoeffs(trace) => {
                harmonic::extension_normal_derivative(&self.domain, trace, basis, component, sphere)
            }
            _ => unreachable!(),
        }
    }

    /// Boundary values on a component's sphere nodes.
    pub fn boundary_values_on(
        &self,
        component: &BoundaryComponent,
        sphere: &QuadratureGrid,
        basis: &SphericalHarmonicBasis,
    ) -> Vec<f64> {
        sphere
            .nodes
            .iter()
            .map(|p| {
                self.value(
                    &GridNode {
                        r: component.radius,
                        ..*p
                    },
                    basis,
                )
            })
            .collect()
    }

    /// Check positivity at the nodes of a grid. Violations are reported, not
    /// silently accepted: truncated harmonic series cannot be certified
    /// positive away from the nodes.
    pub fn positivity_report(
        &self,
        grid: &QuadratureGrid,
        basis: &SphericalHarmonicBasis,
    ) -> PositivityReport {
        let mut min_value = f64::INFINITY;
        let mut min_index = 0;
        for (i, node) in grid.nodes.iter().enumerate() {
            let v = self.value(node, basis);
            if v < min_value {
                min_value = v;
                min_index = i;
            }
        }
        PositivityReport {
            positive: min_value > 0.0,
            min_value,
            min_index,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PositivityReport {
    pub positive: bool,
    pub min_value: f64,
    pub min_index: usize,
}

/// Radial profile sampled on a uniform radius grid; derivatives by 4th-order
/// finite differences, off-node values by quintic Lagrange interpolation.
#[derive(Clone, Debug)]
pub struct RadialTable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialTable {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 7 {
            return Err(Error::InvalidInput(
                "radial table needs matching radii/values with at least 7 samples".into(),
            ));
        }
        let h = radii[1] - radii[0];
        for w in radii.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() {
                return Err(Error::InvalidInput(
                    "radial table grid must be uniform".into(),
                ));
            }
        }
        Ok(Self { radii, values })
    }

    fn stencil_base(&self, r: f64, width: usize) -> usize {
        let h = self.radii[1] - self.radii[0];
        let pos = (r - self.radii[0]) / h;
        let center = pos.round() as isize;
        let lo = (center - width as isize / 2).clamp(0, self.radii.len() as isize - width as isize);
        lo as usize
    }

    /// (u, u', u'') at radius r.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        // interpolate the value and differentiate the interpolant: a 6-point
        // Lagrange stencil keeps both derivatives at 4th order
        let w = 6usize.min(self.values.len());
        let lo = self.stencil_base(r, w);
        let xs = &self.radii[lo..lo + w];
        let ys = &self.values[lo..lo + w];
        let mut u = 0.0;
        let mut du = 0.0;
        let mut ddu = 0.0;
        for i in 0..w {
            // Lagrange basis polynomial and its first two derivatives at r
            let mut l = 1.0;
            let mut dl = 0.0;
            let mut ddl = 0.0;
            for j in 0..w {
                if j == i {
                    continue;
                }
                let denom = xs[i] - xs[j];
                let term = (r - xs[j]) / denom;
                ddl = ddl * term + 2.0 * dl / denom;
                dl = dl * term + l / denom;
                l *= term;
            }
            u += ys[i] * l;
            du += ys[i] * dl;
            ddu += ys[i] * ddl;
        }
        (u, du, ddu)
    }
}

// ---------------------------------------------------------------------------
// Metric data and the conformal transformation laws
// ---------------------------------------------------------------------------

/// Field data of a metric relative to the Euclidean background: scalar
/// curvature and volume density at the volume nodes, mean curvature and area
/// density per boundary component at the sphere nodes.
#[derive(Clone, Debug)]
pub struct MetricData {
    pub scalar_curvature: Vec<f64>,
    pub volume_scale: Vec<f64>,
    pub boundary: Vec<BoundaryData>,
    /// Factor kappa with int |grad phi|^2_g dV_g = kappa * int |grad phi|^2 dV
    /// for every phi. Exists for constant rescalings of Euclidean data; `None`
    /// after a genuine conformal change.
    pub dirichlet_scale: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub mean_curvature: Vec<f64>,
    pub area_scale: Vec<f64>,
}

impl MetricData {
    /// Euclidean metric restricted to the domain.
    pub fn euclidean(domain: &Domain, volume: &QuadratureGrid, sphere: &QuadratureGrid) -> Self {
        let boundary = domain
            .euclidean_mean_curvatures()
            .into_iter()
            .map(|h| BoundaryData {
                mean_curvature: vec![h; sphere.len()],
                area_scale: vec![1.0; sphere.len()],
            })
            .collect();
        MetricData {
            scalar_curvature: vec![0.0; volume.len()],
            volume_scale: vec![1.0; volume.len()],
            boundary,
            dirichlet_scale: Some(1.0),
        }
    }

    /// Constant rescaling g -> c g: R -> R/c, H -> H/sqrt(c),
    /// dV -> c^{n/2} dV, dA -> c^{(n-1)/2} dA.
    pub fn scaled(&self, c: f64, n: usize) -> Self {
        let nf = n as f64;
        MetricData {
            scalar_curvature: self.scalar_curvature.iter().map(|r| r / c).collect(),
            volume_scale: self
                .volume_scale
                .iter()
                .map(|v| v * c.powf(nf / 2.0))
                .collect(),
            boundary: self
                .boundary
                .iter()
                .map(|b| BoundaryData {
                    mean_curvature: b.mean_curvature.iter().map(|h| h / c.sqrt()).collect(),
                    area_scale: b
                        .area_scale
                        .iter()
                        .map(|a| a * c.powf((nf - 1.0) / 2.0))
                        .collect(),
                })
                .collect(),
            dirichlet_scale: self.dirichlet_scale.map(|k| k * c.powf((nf - 2.0) / 2.0)),
        }
    }

    /// Conformal change by a factor u on top of this data. All derivatives of
    /// u are taken w.r.t. the Euclidean background, so `self` must be the
    /// Euclidean metric or a constant multiple of it.
    pub fn conformal(
        &self,
        domain: &Domain,
        factor: &ConformalFactor,
        volume: &QuadratureGrid,
        sphere: &QuadratureGrid,
        basis: &SphericalHarmonicBasis,
    ) -> Result<MetricData> {
        let n = domain.n();
        let u_vol = factor.values_on(volume, basis);
        let lap = factor.laplacian_on(volume, basis);
        let scalar_curvature = conformal_scalar_curvature(&self.scalar_curvature, &u_vol, &lap, n)?;
        let (dv, _) = conformal_measures(&u_vol, n)?;
        let volume_scale: Vec<f64> = self
            .volume_scale
            .iter()
            .zip(&dv)
            .map(|(base, s)| base * s)
            .collect();
        let mut boundary = Vec::new();
        for (data, comp) in self.boundary.iter().zip(domain.boundary_components()) {
            let u_b = factor.boundary_values_on(&comp, sphere, basis);
            let du = factor.normal_derivative_on(&comp, sphere, basis);
            let mean_curvature = conformal_mean_curvature(&data.mean_curvature, &u_b, &du, n)?;
            let (_, da) = conformal_measures(&u_b, n)?;
            let area_scale = data
                .area_scale
                .iter()
                .zip(&da)
                .map(|(base, s)| base * s)
                .collect();
            boundary.push(BoundaryData {
                mean_curvature,
                area_scale,
            });
        }
        Ok(MetricData {
            scalar_curvature,
            volume_scale,
            boundary,
            dirichlet_scale: None,
        })
    }
}

fn check_positive(u: &[f64], radius_of: impl Fn(usize) -> f64) -> Result<()> {
    for (i, &v) in u.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonpositiveFactor {
                index: i,
                radius: radius_of(i),
                value: v,
            });
        }
    }
    Ok(())
}

/// Scalar curvature of u^{4/(n-2)} g from the curvature of g:
/// R_bar = u^{-(n+2)/(n-2)} ( -(4(n-1)/(n-2)) Lap u + R u ).
pub fn conformal_scalar_curvature(
    r_base: &[f64],
    u: &[f64],
    laplacian_u: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    check_positive(u, |_| f64::NAN)?;
    let nf = n as f64;
    let kappa = 4.0 * (nf - 1.0) / (nf - 2.0);
    let exp = -(nf + 2.0) / (nf - 2.0);
    Ok(r_base
        .iter()
        .zip(u)
        .zip(laplacian_u)
        .map(|((r, ui), lap)| ui.powf(exp) * (-kappa * lap + r * ui))
        .collect())
}

/// Mean curvature of u^{4/(n-2)} g from the curvature of g:
/// H_bar = u^{-n/(n-2)} ( (2(n-1)/(n-2)) du/dnu + H u ),
/// with nu the outward unit normal of g.
pub fn conformal_mean_curvature(
    h_base: &[f64],
    u: &[f64],
    normal_deriv_u: &[f64],
    n: usize,
) -> Result<Vec<f64>> {
    check_positive(u, |_| f64::NAN)?;
    let nf = n as f64;
    let beta = 2.0 * (nf - 1.0) / (nf - 2.0);
    let exp = -nf / (nf - 2.0);
    Ok(h_base
        .iter()
        .zip(u)
        .zip(normal_deriv_u)
        .map(|((h, ui), du)| ui.powf(exp) * (beta * du + h * ui))
        .collect())
}

/// Measure densities of u^{4/(n-2)} g relative to g:
/// dV scale u^{2n/(n-2)} and dA scale u^{2(n-1)/(n-2)}.
pub fn conformal_measures(u: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_positive(u, |_| f64::NAN)?;
    let nf = n as f64;
    let ev = 2.0 * nf / (nf - 2.0);
    let ea = 2.0 * (nf - 1.0) / (nf - 2.0);
    Ok((
        u.iter().map(|x| x.powf(ev)).collect(),
        u.iter().map(|x| x.powf(ea)).collect(),
    ))
}

// ---------------------------------------------------------------------------
// Second fundamental form for surfaces of revolution (n = 3)
// ---------------------------------------------------------------------------

/// Second fundamental form and induced metric at a boundary point, as 2x2
/// matrices in a declared tangent frame.
#[derive(Clone, Copy, Debug)]
pub struct SecondFundamentalForm {
    pub form: [[f64; 2]; 2],
    pub induced_metric: [[f64; 2]; 2],
}

impl SecondFundamentalForm {
    pub fn new(form: [[f64; 2]; 2], induced_metric: [[f64; 2]; 2]) -> Result<Self> {
        if (form[0][1] - form[1][0]).abs() > 1e-12 * (1.0 + form[0][1].abs()) {
            return Err(Error::InvalidInput(
                "second fundamental form must be symmetric".into(),
            ));
        }
        let det = induced_metric[0][0] * induced_metric[1][1]
            - induced_metric[0][1] * induced_metric[1][0];
        if !(induced_metric[0][0] > 0.0 && det > 0.0) {
            return Err(Error::InvalidInput(
                "induced metric must be positive definite".into(),
            ));
        }
        Ok(Self {
            form,
            induced_metric,
        })
    }

    /// Principal curvatures: eigenvalues of the shape operator g^{-1} II.
    pub fn principal_curvatures(&self) -> (f64, f64) {
        let g = self.induced_metric;
        let ii = self.form;
        let det_g = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        // det(II - k g) = det_g k^2 - b k + det_ii
        let b = ii[0][0] * g[1][1] + ii[1][1] * g[0][0] - 2.0 * ii[0][1] * g[0][1];
        let det_ii = ii[0][0] * ii[1][1] - ii[0][1] * ii[1][0];
        let disc = (b * b - 4.0 * det_g * det_ii).max(0.0);
        let k1 = (b - disc.sqrt()) / (2.0 * det_g);
        let k2 = (b + disc.sqrt()) / (2.0 * det_g);
        (k1, k2)
    }

    pub fn mean_curvature(&self) -> f64 {
        let (k1, k2) = self.principal_curvatures();
        k1 + k2
    }

    /// Pull the data back along a change of tangent frame with matrix P
    /// (new frame vectors expressed in the old one): forms transform as
    /// P^T A P.
    pub fn change_frame(&self, p: [[f64; 2]; 2]) -> Self {
        let congruence = |a: [[f64; 2]; 2]| {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = 0.0;
                    for k in 0..2 {
                        for l in 0..2 {
                            s += p[k][i] * a[k][l] * p[l][j];
                        }
                    }
                    out[i][j] = s;
                }
            }
            out
        };
        Self {
            form: congruence(self.form),
            induced_metric: congruence(self.induced_metric),
        }
    }
}

/// Second fundamental form of the revolution surface r = 1 + phi(theta) in
/// Euclidean R^3, outward normal, in the frame
/// { phi' d/dr + d/dtheta, d/dpsi }.
pub fn second_fundamental_form_revolution(
    profile: &BumpProfile,
    theta: f64,
) -> SecondFundamentalForm {
    let rho = 1.0 + profile.value(theta);
    let d1 = profile.d1(theta);
    let d2 = profile.d2(theta);
    let (sin_t, cos_t) = theta.sin_cos();
    let w = (rho * rho + d1 * d1).sqrt();
    let g = [[rho * rho + d1 * d1, 0.0], [0.0, rho * rho * sin_t * sin_t]];
    let ii_tt = (rho * rho + 2.0 * d1 * d1 - rho * d2) / w;
    let ii_pp = rho * sin_t * (rho * sin_t - d1 * cos_t) / w;
    SecondFundamentalForm {
        form: [[ii_tt, 0.0], [0.0, ii_pp]],
        induced_metric: g,
    }
}

/// Frobenius norm (in an orthonormal frame of the induced metric) of the
/// trace-free part II - (H/(n-1)) g; zero exactly at umbilic points.
/// Computed by Cholesky whitening of the induced metric, which keeps the
/// cancellation error linear rather than quadratic near umbilic points.
pub fn umbilicity_defect(sff: &SecondFundamentalForm) -> f64 {
    let g = sff.induced_metric;
    let ii = sff.form;
    let l00 = g[0][0].sqrt();
    let l10 = g[0][1] / l00;
    let l11 = (g[1][1] - l10 * l10).sqrt();
    // B = L^{-1} II L^{-T}
    let m00 = ii[0][0] / l00;
    let m01 = ii[0][1] / l00;
    let m10 = (ii[1][0] - l10 * m00) / l11;
    let m11 = (ii[1][1] - l10 * m01) / l11;
    let b00 = m00 / l00;
    let b01 = (m01 - l10 * b00) / l11;
    let b10 = m10 / l00;
    let b11 = (m11 - l10 * b10) / l11;
    let dev = 0.5 * (b00 - b11);
    let off = 0.5 * (b01 + b10);
    (2.0 * (dev * dev + off * off)).sqrt()
}

/// Second fundamental form after the conformal change delta -> w^2 delta with
/// boundary value w and outward normal derivative w_nu:
/// II_bar = w II + w_nu g, g_bar = w^2 g.
pub fn conformal_second_fundamental_form(
    sff: &SecondFundamentalForm,
    w: f64,
    w_nu: f64,
) -> SecondFundamentalForm {
    let mut form = [[0.0; 2]; 2];
    let mut metric = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            form[i][j] = w * sff.form[i][j] + w_nu * sff.induced_metric[i][j];
            metric[i][j] = w * w * sff.induced_metric[i][j];
        }
    }
    SecondFundamentalForm {
        form,
        induced_metric: metric,
    }
}
