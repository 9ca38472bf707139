//! Umbilicity survey along the boundary of the bump ball: the unit sphere
//! with a compactly supported radial bump, a boundary of revolution whose
//! bumped region is genuinely non-umbilic for any positive amplitude.

use crate::domain::{second_fundamental_form_revolution, umbilicity_defect, BumpProfile, Domain};
use crate::error::Result;
use rayon::prelude::*;

#[derive(Clone, Debug, serde::Serialize)]
pub struct BumpDemo {
    pub max_defect: f64,
    pub argmax_theta: f64,
    /// (theta, defect) samples along the meridian.
    pub profile: Vec<(f64, f64)>,
}

/// Sweep the umbilicity defect along the boundary r = 1 + phi(theta).
pub fn bump_ball_demo(amplitude: f64, width: f64, samples: usize) -> Result<BumpDemo> {
    let profile = BumpProfile::new(amplitude, width, std::f64::consts::FRAC_PI_2);
    bump_ball_demo_with(&profile, samples)
}

pub fn bump_ball_demo_with(profile: &BumpProfile, samples: usize) -> Result<BumpDemo> {
    // constructor enforces amplitude >= 0 and width > 0
    Domain::bump_ball(*profile)?;
    let samples = samples.max(16);
    // stay off the poles, where the revolution frame degenerates
    let margin = 1e-3;
    let span = std::f64::consts::PI - 2.0 * margin;
    let rows: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let theta = margin + span * i as f64 / (samples - 1) as f64;
            let sff = second_fundamental_form_revolution(profile, theta);
            (theta, umbilicity_defect(&sff))
        })
        .collect();
    let (argmax_theta, max_defect) =
        rows.iter().copied().fold(
            (f64::NAN, -1.0),
            |acc, (t, d)| if d > acc.1 { (t, d) } else { acc },
        );
    Ok(BumpDemo {
        max_defect,
        argmax_theta,
        profile: rows,
    })
}
