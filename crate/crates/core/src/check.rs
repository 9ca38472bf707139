//! Mechanical verification of the sufficient conditions: the energy-comparison
//! theorem for boundary Yamabe metrics, its volume-normalized corollary, the
//! nonpositive-curvature uniqueness criterion, the Cherrier smallness
//! condition with its closed-form ball bound, and the CR analogue.
//!
//! Each checker consumes summarized field data (constants, sups, ratios) and
//! returns a structured report. Failed hypotheses yield `inconclusive`; these
//! are one-directional sufficient conditions, never impossibility proofs.

use crate::error::{Error, Result};
use crate::special::{gamma_half_integer, unit_sphere_volume};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
}

impl HypothesisCheck {
    fn le(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            satisfied: value <= bound,
        }
    }

    fn lt(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            satisfied: value < bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Conclusion {
    #[serde(rename = "type_II_yamabe")]
    TypeIiYamabe,
    #[serde(rename = "unique_type_II_yamabe")]
    UniqueTypeIiYamabe,
    #[serde(rename = "cr_yamabe")]
    CrYamabe,
    #[serde(rename = "unique_cr_yamabe")]
    UniqueCrYamabe,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub hypotheses: Vec<HypothesisCheck>,
    pub branch: String,
    pub conclusion: Conclusion,
}

/// Inputs for the energy-comparison check. `g` is a known extremal metric
/// with constant H_g > 0; `h` is scalar-flat with constant H_h > 0. `gamma`
/// is Vol(M,h)/Vol(M,g), `area_constant` the constant C in
/// dA_g <= C^{(n-1)/2} dA_h, and `metric_ratio_sup` the sup over M of the
/// largest eigenvalue of H_h h against H_g g (<= 1 is the comparison
/// hypothesis, < 1 its strict form).
#[derive(Clone, Copy, Debug)]
pub struct Theorem1Input {
    pub n: usize,
    pub gamma: f64,
    pub area_constant: f64,
    pub h_g: f64,
    pub h_h: f64,
    pub metric_ratio_sup: f64,
    /// Asserts dA_g = (H_h/H_g)^{(n-1)/2} dA_h, the alternative branch.
    pub area_equality: bool,
}

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::NonpositiveInput { name, value });
    }
    Ok(())
}

pub fn check_theorem1(input: &Theorem1Input) -> Result<TheoremReport> {
    if input.n < 3 {
        return Err(Error::InvalidInput(format!("dimension {} < 3", input.n)));
    }
    require_positive("gamma", input.gamma)?;
    require_positive("area_constant", input.area_constant)?;
    require_positive("H_g", input.h_g)?;
    require_positive("H_h", input.h_h)?;
    require_positive("metric_ratio_sup", input.metric_ratio_sup)?;

    let n = input.n as f64;
    let c_bound = (input.gamma.powf(-2.0 / (n - 1.0))).min(
        (input.h_h / input.h_g).powf((2.0 * n - 3.0) / (n - 2.0))
            * input.gamma.powf(2.0 / (n - 2.0)),
    );

    let mut hypotheses = vec![HypothesisCheck::le(
        "H_h h <= H_g g",
        input.metric_ratio_sup,
        1.0,
    )];
    let branch;
    let area_ok;
    if input.area_equality {
        branch = "area-equality".to_string();
        area_ok = true;
        hypotheses.push(HypothesisCheck {
            name: "dA_g = (H_h/H_g)^{(n-1)/2} dA_h".into(),
            value: 1.0,
            bound: 1.0,
            satisfied: true,
        });
    } else {
        branch = "area-comparison".to_string();
        let check = HypothesisCheck::le(
            "C <= min(gamma^{-2/(n-1)}, (H_h/H_g)^{(2n-3)/(n-2)} gamma^{2/(n-2)})",
            input.area_constant,
            c_bound,
        );
        area_ok = check.satisfied;
        hypotheses.push(check);
    }
    let strict = HypothesisCheck::lt("H_h h < H_g g (strict)", input.metric_ratio_sup, 1.0);
    let comparison_ok = hypotheses[0].satisfied;
    let strict_ok = strict.satisfied;
    hypotheses.push(strict);

    let conclusion = if area_ok && comparison_ok {
        if strict_ok {
            Conclusion::UniqueTypeIiYamabe
        } else {
            Conclusion::TypeIiYamabe
        }
    } else {
        Conclusion::Inconclusive
    };
    Ok(TheoremReport {
        theorem: "energy-comparison".into(),
        hypotheses,
        branch,
        conclusion,
    })
}

/// Volume-normalized corollary: with Vol(M,h) = Vol(M,g), the hypotheses
/// H_g >= H_h and
/// sup( sqrt(det g|_dM) H_g^e - sqrt(det h|_dM) H_h^e ) <= 0,
/// e = (n-1)(2n-3)/(2(n-2)), imply the comparison theorem's area condition.
/// `density_condition` is that sup.
pub fn check_corollary_volume(
    n: usize,
    vol_equal: bool,
    h_g: f64,
    h_h: f64,
    density_condition: f64,
) -> Result<TheoremReport> {
    if !vol_equal {
        return Err(Error::InvalidInput(
            "the corollary requires equal volumes (gamma = 1)".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InvalidInput(format!("dimension {n} < 3")));
    }
    require_positive("H_g", h_g)?;
    require_positive("H_h", h_h)?;
    let hypotheses = vec![
        HypothesisCheck::le("H_h <= H_g", h_h, h_g),
        HypothesisCheck::le("boundary density comparison", density_condition, 0.0),
    ];
    let ok = hypotheses.iter().all(|h| h.satisfied);
    Ok(TheoremReport {
        theorem: "energy-comparison corollary (equal volumes)".into(),
        hypotheses,
        branch: "volume-normalized".into(),
        conclusion: if ok {
            Conclusion::TypeIiYamabe
        } else {
            Conclusion::Inconclusive
        },
    })
}

/// Verdict of the nonpositive-curvature uniqueness criterion: scalar-flat,
/// mean curvature a nonpositive constant of the same sign on both metrics
/// (both zero or both negative) forces equality up to rescaling.
#[derive(Clone, Debug, Serialize)]
pub struct NonpositiveUniquenessVerdict {
    pub applicable: bool,
    pub scalar_flat: bool,
    pub constant_per_metric: bool,
    pub nonpositive: bool,
    pub same_sign: bool,
    pub h_first: f64,
    pub h_second: f64,
}

/// `h_first` and `h_second` carry the per-boundary-component mean curvature
/// constants of the two metrics.
pub fn check_nonpositive_uniqueness(
    r_max_abs: f64,
    h_first: &[f64],
    h_second: &[f64],
    tol: f64,
) -> NonpositiveUniquenessVerdict {
    let scalar_flat = r_max_abs.abs() <= tol;
    let spread = |h: &[f64]| -> f64 {
        let lo = h.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let constant_per_metric = !h_first.is_empty()
        && !h_second.is_empty()
        && spread(h_first) <= tol
        && spread(h_second) <= tol;
    let a = h_first.first().copied().unwrap_or(f64::NAN);
    let b = h_second.first().copied().unwrap_or(f64::NAN);
    let nonpositive = a <= tol && b <= tol;
    let zero_a = a.abs() <= tol;
    let zero_b = b.abs() <= tol;
    let same_sign = (zero_a && zero_b) || (a < -tol && b < -tol);
    NonpositiveUniquenessVerdict {
        applicable: scalar_flat && constant_per_metric && nonpositive && same_sign,
        scalar_flat,
        constant_per_metric,
        nonpositive,
        same_sign,
        h_first: a,
        h_second: b,
    }
}

// ---------------------------------------------------------------------------
// Cherrier smallness condition
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CherrierCheck {
    pub lhs: f64,
    pub satisfied: bool,
}

/// The smallness condition (sigma/tau) sup v' (C^2 mu)^{tau/2} < 1 with
/// sigma = 2n/(n-2) and tau = 2(n-1)/(n-2). Strict inequality is required.
pub fn cherrier_condition(
    n: usize,
    sup_v_prime: f64,
    c_bound: f64,
    mu: f64,
) -> Result<CherrierCheck> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("dimension {n} < 3")));
    }
    require_positive("sup_v_prime", sup_v_prime)?;
    require_positive("c_bound", c_bound)?;
    require_positive("mu", mu)?;
    let nf = n as f64;
    let sigma = 2.0 * nf / (nf - 2.0);
    let tau = 2.0 * (nf - 1.0) / (nf - 2.0);
    let lhs = sigma / tau * sup_v_prime * (c_bound * c_bound * mu).powf(tau / 2.0);
    Ok(CherrierCheck {
        lhs,
        satisfied: lhs < 1.0,
    })
}

/// Sharp trace-Sobolev bound for the unit ball:
/// C(n-1, tau) <= (2/(n-2)) Vol(S^{n-1})^{-1/(n-1)}.
pub fn beckner_trace_constant(n: usize) -> f64 {
    let nf = n as f64;
    2.0 / (nf - 2.0) * unit_sphere_volume(n).powf(-1.0 / (nf - 1.0))
}

/// The smallness bound for the unit ball with v = n-1 and constant v' = c,
/// evaluated through the constant-test-function chain. The result does not
/// depend on c.
pub fn cherrier_ball_bound(n: usize) -> f64 {
    let nf = n as f64;
    let sigma = 2.0 * nf / (nf - 2.0);
    let tau = 2.0 * (nf - 1.0) / (nf - 2.0);
    let vol = unit_sphere_volume(n);
    let c = 1.0;
    // constant test function with Gamma_{sigma,tau}(phi0) = 1
    let phi0 = ((nf - 2.0) / (2.0 * (nf - 1.0)) * sigma / tau * c * vol).powf(-1.0 / tau);
    // mu <= (n-2)/2 int phi0^2 dA for constant phi0 and v = n-1
    let mu_bound = (nf - 2.0) / 2.0 * phi0 * phi0 * vol;
    let c_trace = beckner_trace_constant(n);
    sigma / tau * c * (c_trace * c_trace * mu_bound).powf(tau / 2.0)
}

/// Same bound collapsed algebraically:
/// (2(n-1)/(n-2)) (2/(n-2))^{(n-1)/(n-2)} Gamma(n/2)^{1/(n-2)}
///   / (2^{1/(n-2)} pi^{n/(2(n-2))}).
pub fn cherrier_ball_bound_collapsed(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf - 1.0) / (nf - 2.0)
        * (2.0 / (nf - 2.0)).powf((nf - 1.0) / (nf - 2.0))
        * gamma_half_integer(n as u32).powf(1.0 / (nf - 2.0))
        / (2.0_f64.powf(1.0 / (nf - 2.0)) * PI.powf(nf / (2.0 * (nf - 2.0))))
}

/// Published upper bounds for the ball cases n = 4, 5, 6:
/// 3/pi, (2^10/(3^6 pi^2))^{1/3}, (3 * 5^4/(2^9 pi^3))^{1/4}.
pub fn cherrier_reference_constant(n: usize) -> Option<f64> {
    match n {
        4 => Some(3.0 / PI),
        5 => Some((2f64.powi(10) / (3f64.powi(6) * PI * PI)).powf(1.0 / 3.0)),
        6 => Some((3.0 * 5f64.powi(4) / (2f64.powi(9) * PI.powi(3))).powf(0.25)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// CR analogue
// ---------------------------------------------------------------------------

/// CR counterpart of the comparison check: Theta is an extremal contact form
/// with R_Theta > 0, theta has constant Webster curvature R_theta, volumes
/// are matched up to gamma, and `ratio_sup` is the sup of R_theta d theta
/// against R_Theta d Theta on the holomorphic tangent space.
pub fn check_cr_theorem(
    gamma: f64,
    r_theta: f64,
    r_big_theta: f64,
    ratio_sup: f64,
) -> Result<TheoremReport> {
    if !(r_big_theta > 0.0) {
        return Err(Error::NonpositiveInput {
            name: "R_Theta",
            value: r_big_theta,
        });
    }
    require_positive("gamma", gamma)?;
    require_positive("ratio_sup", ratio_sup)?;
    let hypotheses = vec![
        HypothesisCheck::lt("R_theta > 0", 0.0, r_theta),
        HypothesisCheck::le("R_theta dtheta <= R_Theta dTheta", ratio_sup, 1.0),
        HypothesisCheck::lt("R_theta dtheta < R_Theta dTheta (strict)", ratio_sup, 1.0),
    ];
    let positive_ok = hypotheses[0].satisfied;
    let cmp_ok = hypotheses[1].satisfied;
    let strict_ok = hypotheses[2].satisfied;
    let conclusion = if positive_ok && cmp_ok {
        if strict_ok {
            Conclusion::UniqueCrYamabe
        } else {
            Conclusion::CrYamabe
        }
    } else {
        Conclusion::Inconclusive
    };
    Ok(TheoremReport {
        theorem: "energy-comparison (CR)".into(),
        hypotheses,
        branch: "volume-normalized".into(),
        conclusion,
    })
}
