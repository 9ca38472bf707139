//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers (run with `-- --nocapture` to see
//! them). Tolerances are pinned here, not configured.

mod common;

use common::*;
use std::f64::consts::PI;
use std::time::Instant;
use yamabe_lab::basis::SphericalHarmonicBasis;
use yamabe_lab::domain::{ConformalFactor, Domain};
use yamabe_lab::energy::{boundary_quotient, yamabe_energy, FunctionOnDomain, Grids};
use yamabe_lab::harmonic::{
    nondegeneracy_check, steklov_spectrum, BoundaryTrace, DegeneracyVerdict,
};
use yamabe_lab::minimize::{minimize_q, uniqueness_experiment, MinimizerConfig, QuotientProblem};
use yamabe_lab::schwarzschild::{
    self, euclidean_annulus_energy, schwarzschild_energy, schwarzschild_energy_limit,
    schwarzschild_mean_curvatures, SchwarzschildParams,
};
use yamabe_lab::{check_cr_theorem, check_nonpositive_uniqueness, check_theorem1};
use yamabe_lab::{cherrier_ball_bound, cherrier_reference_constant};
use yamabe_lab::{Conclusion, Theorem1Input};

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_01_euclidean_annulus_energy() {
    let start = Instant::now();
    let closed = euclidean_annulus_energy(3, 0.5);
    let dom = annulus3(0.5, 1.0);
    let grids = Grids::new(&dom, 4);
    let metric = euclidean(&dom, &grids);
    let quadrature = yamabe_energy(&dom, &metric, &grids).unwrap().energy;
    let expect = 8.0 * PI / (5.0 * PI).sqrt();
    let err = rel_err(closed, quadrature);
    assert!(err < 1e-10, "closed form vs quadrature rel err {err:e}");
    assert!(rel_err(closed, expect) < 1e-12);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 01 euclidean annulus energy: PASS (closed {closed:.12}, quadrature {quadrature:.12}, rel err {err:.3e}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_schwarzschild_pipeline_grid() {
    let start = Instant::now();
    let mut worst_energy = 0.0f64;
    let mut worst_curvature = 0.0f64;
    for n in [3usize, 4, 5] {
        for r in [0.3, 0.5, 0.7] {
            let dom = Domain::annulus(n, r, 1.0).unwrap();
            let grids = Grids::new(&dom, 2);
            for m in [0.5, 1.0, 2.0] {
                let p = SchwarzschildParams::new(n, r, m).unwrap();
                let closed = schwarzschild_energy(&p);
                let pipeline = schwarzschild::pipeline_energy(&p, &grids).unwrap().energy;
                worst_energy = worst_energy.max(rel_err(closed, pipeline));
                let (ci, co) = schwarzschild_mean_curvatures(&p);
                let (pi_, po) = schwarzschild::pipeline_mean_curvatures(&p).unwrap();
                worst_curvature = worst_curvature.max((ci - pi_).abs()).max((co - po).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        worst_energy < 1e-10,
        "worst energy rel err {worst_energy:e}"
    );
    assert!(
        worst_curvature < 1e-12,
        "worst curvature abs err {worst_curvature:e}"
    );
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 02 schwarzschild pipeline (27 cases): PASS (energy rel err {worst_energy:.3e}, curvature err {worst_curvature:.3e}, {elapsed:?})"
    );
}

#[test]
fn criterion_03_large_mass_limit() {
    let limit = schwarzschild_energy_limit(3, 0.5);
    let p = SchwarzschildParams::new(3, 0.5, 1e6).unwrap();
    let err = (schwarzschild_energy(&p) - limit).abs() / limit;
    assert!(err < 1e-4, "limit error {err:e}");
    // the limit value itself, in closed form
    assert!(rel_err(limit, 16.0 * PI / (5.0 * PI).sqrt()) < 1e-12);
    println!("criterion 03 large-mass limit: PASS (limit {limit:.12}, rel err at m=1e6 {err:.3e})");
}

#[test]
fn criterion_04_energy_comparison() {
    let euclid = euclidean_annulus_energy(3, 0.5);
    let mut checked = 0usize;
    // log-spaced probe masses from 1 to 1e8
    for i in 0..=640 {
        let m = 10f64.powf(8.0 * i as f64 / 640.0);
        let p = SchwarzschildParams::new(3, 0.5, m).unwrap();
        let e = schwarzschild_energy(&p);
        assert!(
            e > euclid,
            "energy {e} at m = {m} does not exceed the Euclidean value {euclid}"
        );
        checked += 1;
    }
    let report = schwarzschild::find_m0(3, 0.5, 1e-6).unwrap();
    assert!(report.certified);
    assert!(report.m0 <= 1.0);
    println!(
        "criterion 04 energy comparison: PASS ({checked} masses in [1, 1e8] beat {euclid:.6}, threshold report m0 = {:.2e})",
        report.m0
    );
}

#[test]
fn criterion_05_cherrier_constants() {
    let mut printed = Vec::new();
    for n in [4usize, 5, 6] {
        let bound = cherrier_ball_bound(n);
        let reference = cherrier_reference_constant(n).unwrap();
        assert!(bound < 1.0, "n = {n}: bound {bound} not below 1");
        assert!(
            bound <= reference + 1e-12,
            "n = {n}: bound {bound} above reference {reference}"
        );
        printed.push(format!("n={n}: {bound:.6} <= {reference:.6}"));
    }
    let err = (cherrier_ball_bound(5) - cherrier_reference_constant(5).unwrap()).abs();
    assert!(err < 1e-4, "n = 5 closed form off by {err:e}");
    println!(
        "criterion 05 cherrier constants: PASS ({}; n=5 matches displayed to {err:.1e})",
        printed.join(", ")
    );
}

#[test]
fn criterion_06_minimizer_on_the_ball() {
    let start = Instant::now();
    let dom = ball3();
    let l_max = 8;
    let grids = Grids::new(&dom, l_max);
    let metric = euclidean(&dom, &grids);
    let init = BoundaryTrace::constant(&dom, l_max, &[1.0])
        .unwrap()
        .with_coefficient(0, 1, 0, 0.3);
    let config = MinimizerConfig {
        l_max,
        ..Default::default()
    };
    let result = minimize_q(&dom, &metric, &init, &config, &grids).unwrap();
    let target = 8.0 * PI.sqrt();
    let gap = (result.energy - target).abs();
    assert!(
        gap < 1e-3,
        "final energy {} misses {target} by {gap:e}",
        result.energy
    );
    assert!(result.positive);

    // analytic gradient against central differences at 20 random traces
    let l_small = 5;
    let grids_small = Grids::new(&dom, l_small);
    let metric_small = euclidean(&dom, &grids_small);
    let problem = QuotientProblem::new(&dom, &metric_small, l_small, &grids_small).unwrap();
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let trace = positive_random_trace(&dom, l_small, seed, 0.25, &grids_small);
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
        worst = worst.max((err_sq / norm_sq).sqrt());
    }
    assert!(worst < 1e-6, "gradient check worst rel err {worst:e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 06 minimizer: PASS (energy {:.9} vs {target:.9}, gap {gap:.2e}, {} iterations, gradient check {worst:.2e}, {elapsed:?})",
        result.energy, result.iterations
    );
}

#[test]
fn criterion_07_escobar_family() {
    let mut residuals = Vec::new();
    let mut quotients = Vec::new();
    for a in [0.0, 0.3, 0.6] {
        let p = yamabe_lab::EscobarParams::axial(3, a).unwrap();
        let res = yamabe_lab::escobar_residual(&p, 64);
        assert!(
            res.boundary_max < 1e-9,
            "a = {a}: boundary residual {}",
            res.boundary_max
        );
        assert!(res.interior_max < 1e-9);
        residuals.push(res.boundary_max);
        quotients.push(yamabe_lab::escobar_quotient(&p, None));
    }
    let spread = quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - quotients.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        spread < 1e-6,
        "quotient spread {spread:e} across the family"
    );
    println!(
        "criterion 07 escobar family: PASS (worst residual {:.2e}, quotient spread {spread:.2e}, Q = {:.9})",
        residuals.iter().cloned().fold(0.0, f64::max),
        quotients[0]
    );
}

#[test]
fn criterion_08_steklov_spectrum() {
    let dom = ball3();
    let l_max = 5;
    let spec = steklov_spectrum(&dom, l_max).unwrap();
    // exact closed form: degree l with multiplicity 2l + 1
    let mut expected = Vec::new();
    for l in 0..=l_max {
        for _ in 0..(2 * l + 1) {
            expected.push(l as f64);
        }
    }
    assert_eq!(spec.eigenvalues, expected);
    // brute-force DtN assembly agrees to 1e-10
    let matrix = brute_force_ball_dtn(l_max);
    let mut worst = 0.0f64;
    for (k, row) in matrix.iter().enumerate() {
        let l = (k as f64).sqrt() as usize;
        for (j, v) in row.iter().enumerate() {
            let expect = if j == k { l as f64 } else { 0.0 };
            worst = worst.max((v - expect).abs());
        }
    }
    assert!(worst < 1e-10, "brute-force DtN deviation {worst:e}");
    // the Euclidean ball is degenerate: H/(n-1) = 1 is an eigenvalue
    let report = nondegeneracy_check(2.0, &spec, 3, None);
    assert_eq!(report.verdict, DegeneracyVerdict::Degenerate);
    println!(
        "criterion 08 steklov: PASS (spectrum exact, DtN oracle deviation {worst:.2e}, ball flagged degenerate)"
    );
}

#[test]
fn criterion_09_nonpositive_uniqueness_experiment() {
    // scalar-flat annulus problem with H = 0 on both components: minimizers
    // from independent random starts agree up to scale
    let dom = annulus3(0.5, 1.0);
    let l_max = 4;
    let grids = Grids::new(&dom, l_max);
    let mut metric = euclidean(&dom, &grids);
    for b in metric.boundary.iter_mut() {
        for h in b.mean_curvature.iter_mut() {
            *h = 0.0;
        }
    }
    let config = MinimizerConfig {
        l_max,
        grad_tol: 1e-10,
        max_iters: 5000,
        ..Default::default()
    };
    let run = |seed: u64| {
        let init = yamabe_lab::random_trace(&dom, l_max, seed, 0.3).unwrap();
        minimize_q(&dom, &metric, &init, &config, &grids).unwrap()
    };
    let a = run(101);
    let b = run(202);
    let report = uniqueness_experiment(&dom, &grids, &a, &b).unwrap();
    assert!(
        report.ratio_spread < 1e-6,
        "ratio spread {:e}",
        report.ratio_spread
    );
    println!(
        "criterion 09 uniqueness experiment: PASS (ratio spread {:.2e}, energies {:.3e} / {:.3e})",
        report.ratio_spread, a.energy, b.energy
    );
}

#[test]
fn criterion_10_invariance_suite() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let tol = 1e-8;
    let mut worst = [0.0f64; 4];
    for case in 0..50u64 {
        let (dom, l_max) = if case % 2 == 0 {
            (ball3(), 4usize)
        } else {
            (annulus3(rng.gen_range(0.3..0.6), 1.0), 3usize)
        };
        let grids = Grids::new(&dom, l_max);
        let metric = euclidean(&dom, &grids);

        // E(c g) = E(g)
        let c = rng.gen_range(0.1..10.0);
        let base = yamabe_energy(&dom, &metric, &grids).unwrap().energy;
        let scaled = yamabe_energy(&dom, &metric.scaled(c, 3), &grids)
            .unwrap()
            .energy;
        worst[0] = worst[0].max(rel_err(scaled, base));

        // Q(t phi) = Q(phi)
        let trace = positive_random_trace(&dom, l_max, 1000 + case, 0.3, &grids);
        let t = rng.gen_range(0.05..20.0);
        let phi = FunctionOnDomain::harmonic(&dom, &trace, &grids).unwrap();
        let phi_t = FunctionOnDomain::harmonic(&dom, &trace.scaled(t), &grids).unwrap();
        let q = boundary_quotient(&dom, &metric, &phi, &grids).unwrap();
        let qt = boundary_quotient(&dom, &metric, &phi_t, &grids).unwrap();
        worst[1] = worst[1].max(rel_err(qt, q));

        // harmonic replacement never increases Q (competitors on the ball)
        if matches!(dom, Domain::Ball { .. }) {
            let sep = FunctionOnDomain::separable_on_ball(
                &dom,
                &trace,
                |l, r| {
                    let p = (l + 2) as f64;
                    (r.powf(p), p * r.powf(p - 1.0))
                },
                &grids,
            )
            .unwrap();
            let q_sep = boundary_quotient(&dom, &metric, &sep, &grids).unwrap();
            assert!(q <= q_sep + tol, "case {case}: Q_harm {q} > Q_sep {q_sep}");
        }

        // conformal covariance: Q_g(phi) = E(phi^{4/(n-2)} g)
        let factor = ConformalFactor::harmonic(dom.clone(), trace.clone());
        let changed = metric
            .conformal(&dom, &factor, &grids.volume, &grids.sphere, &grids.basis)
            .unwrap();
        let e_changed = yamabe_energy(&dom, &changed, &grids).unwrap().energy;
        worst[3] = worst[3].max(rel_err(e_changed, q));
    }
    assert!(worst[0] < tol, "scale invariance err {:e}", worst[0]);
    assert!(worst[1] < tol, "homogeneity err {:e}", worst[1]);
    assert!(worst[3] < tol, "conformal covariance err {:e}", worst[3]);
    println!(
        "criterion 10 invariance suite: PASS over 50 instances (scale {:.1e}, homogeneity {:.1e}, covariance {:.1e})",
        worst[0], worst[1], worst[3]
    );
}

#[test]
fn criterion_11_theorem_checkers() {
    // golden cases for the comparison theorem
    let identity = check_theorem1(&Theorem1Input {
        n: 3,
        gamma: 1.0,
        area_constant: 1.0,
        h_g: 2.0,
        h_h: 2.0,
        metric_ratio_sup: 1.0,
        area_equality: false,
    })
    .unwrap();
    assert_eq!(identity.conclusion, Conclusion::TypeIiYamabe);
    let strict = check_theorem1(&Theorem1Input {
        n: 3,
        gamma: 1.0,
        area_constant: 0.1,
        h_g: 2.0,
        h_h: 1.0,
        metric_ratio_sup: 0.4,
        area_equality: false,
    })
    .unwrap();
    assert_eq!(strict.conclusion, Conclusion::UniqueTypeIiYamabe);
    let broken = check_theorem1(&Theorem1Input {
        area_constant: 0.2,
        ..Theorem1Input {
            n: 3,
            gamma: 1.0,
            area_constant: 0.0,
            h_g: 2.0,
            h_h: 1.0,
            metric_ratio_sup: 0.4,
            area_equality: false,
        }
    })
    .unwrap();
    assert_eq!(broken.conclusion, Conclusion::Inconclusive);

    // nonpositive uniqueness goldens
    assert!(check_nonpositive_uniqueness(0.0, &[0.0], &[0.0], 1e-12).applicable);
    assert!(check_nonpositive_uniqueness(0.0, &[-1.0], &[-3.0], 1e-12).applicable);
    assert!(!check_nonpositive_uniqueness(0.0, &[-1.0], &[0.0], 1e-12).applicable);

    // CR goldens
    assert_eq!(
        check_cr_theorem(1.0, 1.0, 1.0, 1.0).unwrap().conclusion,
        Conclusion::CrYamabe
    );
    assert_eq!(
        check_cr_theorem(1.0, 0.9, 1.0, 0.9).unwrap().conclusion,
        Conclusion::UniqueCrYamabe
    );
    assert_eq!(
        check_cr_theorem(1.0, 1.1, 1.0, 1.1).unwrap().conclusion,
        Conclusion::Inconclusive
    );

    // monotonicity over random perturbations
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let mut satisfied = 0;
    for _ in 0..100 {
        let input = Theorem1Input {
            n: rng.gen_range(3..8),
            gamma: rng.gen_range(0.2..2.0),
            area_constant: rng.gen_range(0.01..1.2),
            h_g: rng.gen_range(0.1..3.0),
            h_h: rng.gen_range(0.1..3.0),
            metric_ratio_sup: rng.gen_range(0.1..1.4),
            area_equality: false,
        };
        let before = check_theorem1(&input).unwrap();
        if before.conclusion == Conclusion::Inconclusive {
            continue;
        }
        satisfied += 1;
        let tighter = Theorem1Input {
            area_constant: input.area_constant * rng.gen_range(0.1..1.0),
            metric_ratio_sup: input.metric_ratio_sup * rng.gen_range(0.1..1.0),
            ..input
        };
        assert_ne!(
            check_theorem1(&tighter).unwrap().conclusion,
            Conclusion::Inconclusive
        );
    }
    assert!(satisfied > 5);
    println!(
        "criterion 11 theorem checkers: PASS (goldens and {satisfied} monotone perturbations)"
    );
}

// exercised by criterion 10 already, but the basis deserves its own line
#[test]
fn criterion_10_supplement_basis_orthonormality() {
    let l_max = 8;
    let basis = SphericalHarmonicBasis::new(l_max);
    let grid = yamabe_lab::sphere_quadrature(l_max + 1);
    let table = basis.values_at(&grid.nodes);
    let nb = basis.len();
    let mut worst = 0.0f64;
    for a in 0..nb {
        for b in a..nb {
            let dot: f64 = (0..grid.len())
                .map(|j| grid.weights[j] * table.values[j * nb + a] * table.values[j * nb + b])
                .sum();
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - expect).abs());
        }
    }
    assert!(worst < 1e-10);
    println!("criterion 10 supplement (basis orthonormality to degree 8): PASS ({worst:.2e})");
}
