//! Projected-gradient minimization of the boundary quotient Q over harmonic
//! extensions of boundary traces.
//!
//! For a scalar-flat background the infimum of Q over W^{1,2} equals the
//! infimum over harmonic extensions, so the variables are the trace
//! coefficients alone. The scaling null direction is removed by rescaling
//! back to int |phi|^tau dA = Vol(dM) after every step, which is exact by
//! homogeneity.

use crate::domain::{ConformalFactor, Domain, MetricData};
use crate::energy::Grids;
use crate::error::{Error, Result};
use crate::harmonic::{self, BoundaryTrace, TraceComponent};
use crate::quadrature::pairwise_sum_with;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub enum StepRule {
    Fixed(f64),
    Backtracking {
        initial: f64,
        shrink: f64,
        grow: f64,
        armijo: f64,
    },
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::Backtracking {
            initial: 1.0,
            shrink: 0.5,
            grow: 1.5,
            armijo: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizerConfig {
    pub l_max: usize,
    pub step: StepRule,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for MinimizerConfig {
    fn default() -> Self {
        Self {
            l_max: 8,
            step: StepRule::default(),
            grad_tol: 1e-8,
            max_iters: 5000,
            seed: 0,
        }
    }
}

impl MinimizerConfig {
    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::NonpositiveInput {
                name: "grad_tol",
                value: self.grad_tol,
            });
        }
        if self.max_iters < 1 || self.l_max < 1 {
            return Err(Error::InvalidInput(
                "max_iters and l_max must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct MinimizerResult {
    pub trace: BoundaryTrace,
    pub energy: f64,
    pub iterations: usize,
    pub energies: Vec<f64>,
    pub grad_norms: Vec<f64>,
    pub converged: bool,
    /// Trace and extension positive at the grid nodes.
    pub positive: bool,
}

impl MinimizerResult {
    /// Iteration history as CSV with columns iter, energy, grad_norm.
    pub fn write_history_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,energy,grad_norm")?;
        for (i, (e, g)) in self.energies.iter().zip(&self.grad_norms).enumerate() {
            writeln!(w, "{i},{e},{g}")?;
        }
        Ok(())
    }
}

/// Q restricted to harmonic extensions, as a smooth function of the stacked
/// trace coefficient vector. Exposes value and analytic gradient so the
/// gradient can be checked against finite differences.
pub struct QuotientProblem<'a> {
    domain: &'a Domain,
    metric: &'a MetricData,
    grids: &'a Grids,
    pub l_max: usize,
    n_basis: usize,
    n_comp: usize,
    kappa: f64,
    tau: f64,
    dirichlet_scale: f64,
    /// Dirichlet quadratic form: diagonal for the ball, 2x2 per mode for the
    /// annulus (indexed by flat basis index).
    ball_diag: Vec<f64>,
    annulus_modes: Vec<[[f64; 2]; 2]>,
    pub target_norm: f64,
}

impl<'a> QuotientProblem<'a> {
    pub fn new(
        domain: &'a Domain,
        metric: &'a MetricData,
        l_max: usize,
        grids: &'a Grids,
    ) -> Result<Self> {
        if domain.n() != 3 {
            return Err(Error::InvalidInput(
                "the minimizer is set up for n = 3".into(),
            ));
        }
        if grids.basis.l_max() != l_max {
            return Err(Error::InvalidInput(format!(
                "grids were built for l_max {} but the problem uses {l_max}",
                grids.basis.l_max()
            )));
        }
        let max_abs = metric
            .scalar_curvature
            .iter()
            .fold(0.0_f64, |m, r| m.max(r.abs()));
        if max_abs > 1e-12 {
            return Err(Error::ScalarCurvatureNotFlat { max_abs });
        }
        let dirichlet_scale = metric.dirichlet_scale.ok_or_else(|| {
            Error::InvalidInput("minimization needs a metric with a Dirichlet factor".into())
        })?;
        let n_basis = (l_max + 1) * (l_max + 1);
        let comps = domain.boundary_components();
        let n_comp = comps.len();
        let mut ball_diag = Vec::new();
        let mut annulus_modes = Vec::new();
        match domain {
            Domain::Ball { radius, .. } => {
                ball_diag = (0..n_basis)
                    .map(|k| {
                        let l = (k as f64).sqrt() as usize;
                        harmonic::ball_mode_dirichlet(3, *radius, l)
                    })
                    .collect();
            }
            Domain::Annulus {
                r_inner, r_outer, ..
            } => {
                annulus_modes = (0..n_basis)
                    .map(|k| {
                        let l = (k as f64).sqrt() as usize;
                        harmonic::annulus_mode_dirichlet(3, *r_inner, *r_outer, l)
                    })
                    .collect();
            }
            Domain::BumpBall { .. } => {
                return Err(Error::InvalidInput(
                    "minimization runs on balls and annuli".into(),
                ))
            }
        }
        let target_norm = crate::energy::boundary_volume(metric, grids);
        Ok(Self {
            domain,
            metric,
            grids,
            l_max,
            n_basis,
            n_comp,
            kappa: 8.0, // 4(n-1)/(n-2) at n = 3
            tau: 4.0,   // 2(n-1)/(n-2) at n = 3
            dirichlet_scale,
            ball_diag,
            annulus_modes,
            target_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n_comp * self.n_basis
    }

    pub fn vec_from_trace(&self, trace: &BoundaryTrace) -> Result<Vec<f64>> {
        if trace.components.len() != self.n_comp {
            return Err(Error::InvalidInput(
                "trace/domain component mismatch".into(),
            ));
        }
        if trace.l_max > self.l_max {
            return Err(Error::InvalidInput(format!(
                "initial trace has l_max {} above the configured {}",
                trace.l_max, self.l_max
            )));
        }
        let mut t = vec![0.0; self.dim()];
        let src_len = (trace.l_max + 1) * (trace.l_max + 1);
        for (c, comp) in trace.components.iter().enumerate() {
            t[c * self.n_basis..c * self.n_basis + src_len].copy_from_slice(&comp.coeffs);
        }
        Ok(t)
    }

    pub fn trace_from_vec(&self, t: &[f64]) -> BoundaryTrace {
        let components = self
            .domain
            .boundary_components()
            .iter()
            .enumerate()
            .map(|(c, comp)| TraceComponent {
                label: comp.label,
                coeffs: t[c * self.n_basis..(c + 1) * self.n_basis].to_vec(),
            })
            .collect();
        BoundaryTrace {
            l_max: self.l_max,
            components,
        }
    }

    fn dirichlet(&self, t: &[f64]) -> f64 {
        if !self.ball_diag.is_empty() {
            pairwise_sum_with(self.n_basis, |k| self.ball_diag[k] * t[k] * t[k])
        } else {
            pairwise_sum_with(self.n_basis, |k| {
                let s = self.annulus_modes[k];
                let ti = t[k];
                let to = t[self.n_basis + k];
                s[0][0] * ti * ti + 2.0 * s[0][1] * ti * to + s[1][1] * to * to
            })
        }
    }

    fn dirichlet_grad(&self, t: &[f64], out: &mut [f64]) {
        if !self.ball_diag.is_empty() {
            for k in 0..self.n_basis {
                out[k] = 2.0 * self.ball_diag[k] * t[k];
            }
        } else {
            for k in 0..self.n_basis {
                let s = self.annulus_modes[k];
                let ti = t[k];
                let to = t[self.n_basis + k];
                out[k] = 2.0 * (s[0][0] * ti + s[0][1] * to);
                out[self.n_basis + k] = 2.0 * (s[0][1] * ti + s[1][1] * to);
            }
        }
    }

    fn boundary_values(&self, t: &[f64], comp: usize) -> Vec<f64> {
        self.grids.basis.synthesize_with(
            &self.grids.sphere_basis,
            &t[comp * self.n_basis..(comp + 1) * self.n_basis],
        )
    }

    /// Q, its full gradient, the constraint value N = int |phi|^tau dA, and
    /// the constraint gradient, in one pass.
    pub fn eval(&self, t: &[f64]) -> Result<Evaluation> {
        let mut numerator = self.kappa * self.dirichlet_scale * self.dirichlet(t);
        let mut grad_num = vec![0.0; self.dim()];
        self.dirichlet_grad(t, &mut grad_num);
        for g in grad_num.iter_mut() {
            *g *= self.kappa * self.dirichlet_scale;
        }
        let mut n_value = 0.0;
        let mut grad_n = vec![0.0; self.dim()];
        let comps = self.domain.boundary_components();
        let nb = self.grids.sphere_basis.n_basis;
        for (c, comp) in comps.iter().enumerate() {
            let values = self.boundary_values(t, c);
            let data = &self.metric.boundary[c];
            let scale = comp.radius * comp.radius; // r^{n-1}, n = 3
            numerator += 2.0
                * scale
                * pairwise_sum_with(values.len(), |j| {
                    self.grids.sphere.weights[j]
                        * data.mean_curvature[j]
                        * data.area_scale[j]
                        * values[j]
                        * values[j]
                });
            n_value += scale
                * pairwise_sum_with(values.len(), |j| {
                    self.grids.sphere.weights[j]
                        * data.area_scale[j]
                        * values[j].abs().powf(self.tau)
                });
            // gradients: 4 int H phi Y_k dA and tau int |phi|^{tau-2} phi Y_k dA
            let base = c * self.n_basis;
            let wh: Vec<f64> = (0..values.len())
                .map(|j| {
                    self.grids.sphere.weights[j]
                        * data.area_scale[j]
                        * data.mean_curvature[j]
                        * values[j]
                })
                .collect();
            let wn: Vec<f64> = (0..values.len())
                .map(|j| {
                    self.grids.sphere.weights[j]
                        * data.area_scale[j]
                        * values[j].abs().powf(self.tau - 2.0)
                        * values[j]
                })
                .collect();
            for k in 0..self.n_basis {
                let mut gh = 0.0;
                let mut gn = 0.0;
                for (j, (h, nn)) in wh.iter().zip(&wn).enumerate() {
                    let y = self.grids.sphere_basis.values[j * nb + k];
                    gh += h * y;
                    gn += nn * y;
                }
                grad_num[base + k] += 4.0 * scale * gh;
                grad_n[base + k] = self.tau * scale * gn;
            }
        }
        if !(n_value > 1e-300) {
            return Err(Error::VanishingBoundaryNorm);
        }
        let p = 0.5; // (n-2)/(n-1) at n = 3
        let np = n_value.powf(p);
        let q = numerator / np;
        let grad_q = (0..self.dim())
            .map(|i| (grad_num[i] - p * numerator * grad_n[i] / n_value) / np)
            .collect();
        Ok(Evaluation {
            q,
            grad_q,
            n_value,
            grad_n,
        })
    }

    pub fn value(&self, t: &[f64]) -> Result<f64> {
        Ok(self.eval(t)?.q)
    }

    /// Rescale to the constraint manifold N(t) = target; exact by homogeneity.
    pub fn normalize(&self, t: &mut [f64]) -> Result<()> {
        let n_value = self.eval(t)?.n_value;
        let s = (self.target_norm / n_value).powf(1.0 / self.tau);
        for x in t.iter_mut() {
            *x *= s;
        }
        Ok(())
    }
}

pub struct Evaluation {
    pub q: f64,
    pub grad_q: Vec<f64>,
    pub n_value: f64,
    pub grad_n: Vec<f64>,
}

fn project_tangent(grad_q: &[f64], grad_n: &[f64]) -> Vec<f64> {
    let gn_sq = pairwise_sum_with(grad_n.len(), |i| grad_n[i] * grad_n[i]);
    if gn_sq == 0.0 {
        return grad_q.to_vec();
    }
    let dot = pairwise_sum_with(grad_n.len(), |i| grad_q[i] * grad_n[i]);
    let coef = dot / gn_sq;
    grad_q
        .iter()
        .zip(grad_n)
        .map(|(g, n)| g - coef * n)
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    pairwise_sum_with(v.len(), |i| v[i] * v[i]).sqrt()
}

/// Minimize Q over traces by projected gradient descent from `init`.
/// Requires a scalar-flat metric; a sign-changing iterate is flagged in the
/// result rather than rejected.
pub fn minimize_q(
    domain: &Domain,
    metric: &MetricData,
    init: &BoundaryTrace,
    config: &MinimizerConfig,
    grids: &Grids,
) -> Result<MinimizerResult> {
    config.validate()?;
    let problem = QuotientProblem::new(domain, metric, config.l_max, grids)?;
    let mut t = problem.vec_from_trace(init)?;
    problem.normalize(&mut t)?;

    let (mut alpha, shrink, grow, armijo, fixed) = match config.step {
        StepRule::Fixed(a) => (a, 0.5, 1.0, 0.0, true),
        StepRule::Backtracking {
            initial,
            shrink,
            grow,
            armijo,
        } => (initial, shrink, grow, armijo, false),
    };

    let mut energies = Vec::new();
    let mut grad_norms = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let mut eval = problem.eval(&t)?;
    for iter in 0..config.max_iters {
        iterations = iter;
        let direction = project_tangent(&eval.grad_q, &eval.grad_n);
        let gnorm = norm(&direction);
        energies.push(eval.q);
        grad_norms.push(gnorm);
        if eval.q < -1e6 {
            return Err(Error::Diverged { energy: eval.q });
        }
        if gnorm <= config.grad_tol {
            converged = true;
            break;
        }
        // backtracking line search along the projected direction
        let mut accepted = false;
        let mut local_alpha = alpha;
        for _ in 0..60 {
            let mut candidate: Vec<f64> = t
                .iter()
                .zip(&direction)
                .map(|(x, d)| x - local_alpha * d)
                .collect();
            if problem.normalize(&mut candidate).is_err() {
                local_alpha *= shrink;
                continue;
            }
            let cand_eval = problem.eval(&candidate)?;
            if cand_eval.q <= eval.q - armijo * local_alpha * gnorm * gnorm {
                t = candidate;
                eval = cand_eval;
                accepted = true;
                break;
            }
            if fixed {
                break;
            }
            local_alpha *= shrink;
        }
        if !accepted {
            // no descent step at any tried length: numerically stationary
            break;
        }
        alpha = if fixed {
            alpha
        } else {
            (local_alpha * grow).min(1e3)
        };
    }
    if energies.is_empty() {
        energies.push(eval.q);
        grad_norms.push(norm(&project_tangent(&eval.grad_q, &eval.grad_n)));
    }

    let trace = problem.trace_from_vec(&t);
    let positive = extension_positive(domain, &trace, grids)?;
    Ok(MinimizerResult {
        trace,
        energy: eval.q,
        iterations,
        energies,
        grad_norms,
        converged,
        positive,
    })
}

fn extension_positive(domain: &Domain, trace: &BoundaryTrace, grids: &Grids) -> Result<bool> {
    let factor = ConformalFactor::harmonic(domain.clone(), trace.clone());
    let report = factor.positivity_report(&grids.volume, &grids.basis);
    if !report.positive {
        return Ok(false);
    }
    for comp in domain.boundary_components() {
        let values = factor.boundary_values_on(&comp, &grids.sphere, &grids.basis);
        if values.iter().any(|v| !(*v > 0.0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random positive-mean trace for multi-start experiments: 1 plus a uniform
/// perturbation of the given amplitude on every coefficient.
pub fn random_trace(
    domain: &Domain,
    l_max: usize,
    seed: u64,
    amplitude: f64,
) -> Result<BoundaryTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let comps = domain.boundary_components();
    let mut trace = BoundaryTrace::constant(domain, l_max, &vec![1.0; comps.len()])?;
    for comp in trace.components.iter_mut() {
        for c in comp.coeffs.iter_mut() {
            *c += amplitude * rng.gen_range(-1.0..1.0);
        }
    }
    Ok(trace)
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residuals
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct EulerLagrangeReport {
    /// max | -(4(n-1)/(n-2)) Lap u + R u | over interior nodes.
    pub interior_max: f64,
    /// Residual of the boundary equation against the best-fit constant.
    pub boundary_residuals: Vec<Vec<f64>>,
    pub boundary_max: f64,
    /// Best-fit constant c in (2(n-1)/(n-2)) du/dnu + H u = c u^{n/(n-2)}.
    pub constant: f64,
    /// Max deviation of the implied mean curvature from its area-weighted mean.
    pub h_bar_constancy: f64,
}

pub fn euler_lagrange_residual(
    domain: &Domain,
    metric: &MetricData,
    trace: &BoundaryTrace,
    grids: &Grids,
) -> Result<EulerLagrangeReport> {
    let n = domain.n() as f64;
    let kappa = 4.0 * (n - 1.0) / (n - 2.0);
    let beta = 2.0 * (n - 1.0) / (n - 2.0);
    let factor = harmonic::harmonic_extension(domain, trace)?;

    let comps = domain.boundary_components();
    let mut boundary_values = Vec::new();
    for (c, comp) in comps.iter().enumerate() {
        let values = factor.boundary_values_on(comp, &grids.sphere, &grids.basis);
        for (j, v) in values.iter().enumerate() {
            if !(*v > 0.0) {
                return Err(Error::NonpositiveTrace {
                    component: c,
                    index: j,
                    value: *v,
                });
            }
        }
        boundary_values.push(values);
    }

    let u_vol = factor.values_on(&grids.volume, &grids.basis);
    let lap = factor.laplacian_on(&grids.volume, &grids.basis);
    let interior_max = (0..u_vol.len())
        .map(|j| (-kappa * lap[j] + metric.scalar_curvature[j] * u_vol[j]).abs())
        .fold(0.0_f64, f64::max);

    // left-hand sides and the best-fit constant
    let p_exp = n / (n - 2.0);
    let mut num = 0.0;
    let mut den = 0.0;
    let mut lhs_all = Vec::new();
    for (c, comp) in comps.iter().enumerate() {
        let values = &boundary_values[c];
        let du = factor.normal_derivative_on(comp, &grids.sphere, &grids.basis);
        let data = &metric.boundary[c];
        let lhs: Vec<f64> = (0..values.len())
            .map(|j| beta * du[j] + data.mean_curvature[j] * values[j])
            .collect();
        num += grids.boundary_integral(c, |j| lhs[j] * values[j].powf(p_exp) * data.area_scale[j]);
        den += grids.boundary_integral(c, |j| values[j].powf(2.0 * p_exp) * data.area_scale[j]);
        lhs_all.push(lhs);
    }
    let constant = num / den;

    let mut boundary_residuals = Vec::new();
    let mut boundary_max = 0.0_f64;
    let mut h_num = 0.0;
    let mut h_den = 0.0;
    let mut h_bars = Vec::new();
    for (c, _comp) in comps.iter().enumerate() {
        let values = &boundary_values[c];
        let data = &metric.boundary[c];
        let res: Vec<f64> = (0..values.len())
            .map(|j| lhs_all[c][j] - constant * values[j].powf(p_exp))
            .collect();
        for r in &res {
            boundary_max = boundary_max.max(r.abs());
        }
        let h_bar: Vec<f64> = (0..values.len())
            .map(|j| lhs_all[c][j] * values[j].powf(-p_exp))
            .collect();
        // dA_bar = u^{2(n-1)/(n-2)} dA
        h_num +=
            grids.boundary_integral(c, |j| h_bar[j] * values[j].powf(beta) * data.area_scale[j]);
        h_den += grids.boundary_integral(c, |j| values[j].powf(beta) * data.area_scale[j]);
        boundary_residuals.push(res);
        h_bars.push(h_bar);
    }
    let h_mean = h_num / h_den;
    let h_bar_constancy = h_bars
        .iter()
        .flatten()
        .map(|h| (h - h_mean).abs())
        .fold(0.0_f64, f64::max);

    Ok(EulerLagrangeReport {
        interior_max,
        boundary_residuals,
        boundary_max,
        constant,
        h_bar_constancy,
    })
}

// ---------------------------------------------------------------------------
// Uniqueness experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RatioReport {
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// max/min - 1: zero when the two extensions agree up to scale.
    pub ratio_spread: f64,
}

/// Compare two minimizer outputs as conformal factors: the pointwise ratio of
/// the (sign-normalized) extensions over the volume nodes. u and -u induce
/// the same metric, so each extension is flipped positive before comparing.
pub fn uniqueness_experiment(
    domain: &Domain,
    grids: &Grids,
    a: &MinimizerResult,
    b: &MinimizerResult,
) -> Result<RatioReport> {
    let values = |res: &MinimizerResult| -> Result<Vec<f64>> {
        let factor = ConformalFactor::harmonic(domain.clone(), res.trace.clone());
        let mut v = factor.values_on(&grids.volume, &grids.basis);
        let mean: f64 = v.iter().sum::<f64>() / v.len() as f64;
        if mean < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        if let Some((j, bad)) = v
            .iter()
            .enumerate()
            .find(|(_, x)| !(**x > 0.0))
            .map(|(j, x)| (j, *x))
        {
            return Err(Error::NonpositiveFactor {
                index: j,
                radius: grids.volume.nodes[j].r,
                value: bad,
            });
        }
        Ok(v)
    };
    let va = values(a)?;
    let vb = values(b)?;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for (x, y) in va.iter().zip(&vb) {
        let r = x / y;
        ratio_min = ratio_min.min(r);
        ratio_max = ratio_max.max(r);
    }
    Ok(RatioReport {
        ratio_min,
        ratio_max,
        ratio_spread: ratio_max / ratio_min - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{boundary_quotient, FunctionOnDomain};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn setup_ball(l_max: usize) -> (Domain, Grids, MetricData) {
        let dom = Domain::ball(3, 1.0).unwrap();
        let grids = Grids::new(&dom, l_max);
        let metric = MetricData::euclidean(&dom, &grids.volume, &grids.sphere);
        (dom, grids, metric)
    }

    #[test]
    fn constant_trace_is_critical() {
        let (dom, grids, metric) = setup_ball(4);
        let init = BoundaryTrace::constant(&dom, 4, &[1.0]).unwrap();
        let config = MinimizerConfig {
            l_max: 4,
            ..Default::default()
        };
        let result = minimize_q(&dom, &metric, &init, &config, &grids).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 0);
        assert_relative_eq!(result.energy, 8.0 * PI.sqrt(), max_relative = 1e-12);
        assert!(result.positive);
    }

    #[test]
    fn problem_value_agrees_with_boundary_quotient() {
        let (dom, grids, metric) = setup_ball(3);
        let problem = QuotientProblem::new(&dom, &metric, 3, &grids).unwrap();
        let trace = random_trace(&dom, 3, 7, 0.1).unwrap();
        let t = problem.vec_from_trace(&trace).unwrap();
        let via_problem = problem.value(&t).unwrap();
        let phi = FunctionOnDomain::harmonic(&dom, &trace, &grids).unwrap();
        let via_quotient = boundary_quotient(&dom, &metric, &phi, &grids).unwrap();
        assert_relative_eq!(via_problem, via_quotient, max_relative = 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (dom, grids, metric) = setup_ball(3);
        let problem = QuotientProblem::new(&dom, &metric, 3, &grids).unwrap();
        for seed in 0..5u64 {
            let trace = random_trace(&dom, 3, seed, 0.2).unwrap();
            let t = problem.vec_from_trace(&trace).unwrap();
            let grad = problem.eval(&t).unwrap().grad_q;
            let h = 1e-6;
            let mut err_sq = 0.0;
            let mut norm_sq = 0.0;
            for k in 0..t.len() {
                let mut tp = t.clone();
                tp[k] += h;
                let mut tm = t.clone();
                tm[k] -= h;
                let fd = (problem.value(&tp).unwrap() - problem.value(&tm).unwrap()) / (2.0 * h);
                err_sq += (grad[k] - fd) * (grad[k] - fd);
                norm_sq += grad[k] * grad[k];
            }
            let rel = (err_sq / norm_sq).sqrt();
            assert!(rel < 1e-6, "seed {seed}: gradient error {rel:e}");
        }
    }

    #[test]
    fn non_flat_metric_is_rejected() {
        let (dom, grids, mut metric) = setup_ball(2);
        metric.scalar_curvature[0] = 0.5;
        let init = BoundaryTrace::constant(&dom, 2, &[1.0]).unwrap();
        let config = MinimizerConfig {
            l_max: 2,
            ..Default::default()
        };
        match minimize_q(&dom, &metric, &init, &config, &grids) {
            Err(Error::ScalarCurvatureNotFlat { .. }) => {}
            other => panic!("expected scalar-flat precondition error, got {other:?}"),
        }
    }

    #[test]
    fn rescaled_init_gives_same_energy() {
        let (dom, grids, metric) = setup_ball(4);
        let init = random_trace(&dom, 4, 3, 0.15).unwrap();
        let config = MinimizerConfig {
            l_max: 4,
            max_iters: 400,
            ..Default::default()
        };
        let a = minimize_q(&dom, &metric, &init, &config, &grids).unwrap();
        let b = minimize_q(&dom, &metric, &init.scaled(4.2), &config, &grids).unwrap();
        assert_relative_eq!(a.energy, b.energy, max_relative = 1e-8);
    }

    #[test]
    fn energies_never_increase() {
        let (dom, grids, metric) = setup_ball(5);
        let init = random_trace(&dom, 5, 11, 0.3).unwrap();
        let config = MinimizerConfig {
            l_max: 5,
            max_iters: 300,
            ..Default::default()
        };
        let result = minimize_q(&dom, &metric, &init, &config, &grids).unwrap();
        for w in result.energies.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "energy increased: {} -> {}",
                w[0],
                w[1]
            );
        }
    }

    #[test]
    fn constant_trace_el_residuals_vanish() {
        let (dom, grids, metric) = setup_ball(4);
        for t in [1.0, 2.5] {
            let trace = BoundaryTrace::constant(&dom, 4, &[t]).unwrap();
            let report = euler_lagrange_residual(&dom, &metric, &trace, &grids).unwrap();
            assert!(report.interior_max < 1e-12);
            assert!(report.boundary_max < 1e-12);
            assert!(report.h_bar_constancy < 1e-12);
            // c equals the implied constant mean curvature 2 / t^2
            assert_relative_eq!(report.constant, 2.0 / (t * t), max_relative = 1e-12);
        }
    }

    #[test]
    fn random_trace_has_positive_boundary_residual() {
        let (dom, grids, metric) = setup_ball(4);
        let trace = random_trace(&dom, 4, 5, 0.2).unwrap();
        let report = euler_lagrange_residual(&dom, &metric, &trace, &grids).unwrap();
        assert!(report.boundary_max > 1e-4);
    }

    #[test]
    fn identical_results_have_zero_spread() {
        let (dom, grids, metric) = setup_ball(3);
        let init = BoundaryTrace::constant(&dom, 3, &[1.0]).unwrap();
        let config = MinimizerConfig {
            l_max: 3,
            ..Default::default()
        };
        let result = minimize_q(&dom, &metric, &init, &config, &grids).unwrap();
        let report = uniqueness_experiment(&dom, &grids, &result, &result).unwrap();
        assert_eq!(report.ratio_spread, 0.0);
    }
}
