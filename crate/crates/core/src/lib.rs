//! Numerical laboratory for scalar-flat conformal geometry on model domains
//! with boundary: balls, annuli, and a bumped ball in R^n.
//!
//! The crate evaluates the boundary Yamabe-type energy and its conformal
//! quotient, solves the associated variational problem over harmonic
//! extensions by projected gradient descent, computes Steklov spectra and
//! degeneracy verdicts, reproduces the Schwarzschild-annulus and ball
//! solution families in closed form, and mechanically checks the
//! energy-comparison sufficient conditions (Riemannian and CR).

// positivity guards are written !(x > 0) so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bump;
pub mod check;
pub mod domain;
pub mod energy;
pub mod error;
pub mod escobar;
pub mod harmonic;
pub mod minimize;
pub mod quadrature;
pub mod schwarzschild;
pub mod special;

pub use basis::SphericalHarmonicBasis;
pub use bump::{bump_ball_demo, BumpDemo};
pub use check::{
    check_corollary_volume, check_cr_theorem, check_nonpositive_uniqueness, check_theorem1,
    cherrier_ball_bound, cherrier_condition, cherrier_reference_constant, CherrierCheck,
    Conclusion, HypothesisCheck, Theorem1Input, TheoremReport,
};
pub use domain::{
    conformal_mean_curvature, conformal_measures, conformal_scalar_curvature,
    second_fundamental_form_revolution, umbilicity_defect, BoundaryData, BumpProfile,
    ComponentLabel, ConformalFactor, Domain, FactorRepr, MetricData, SecondFundamentalForm,
};
pub use energy::{
    boundary_quotient, boundary_volume, cr_energy, cr_quotient, yamabe_energy, CRData,
    EnergyReport, FunctionOnDomain, Grids,
};
pub use error::{Error, Result};
pub use escobar::{
    escobar_quotient, escobar_residual, escobar_solution, EscobarParams, EscobarResidual,
};
pub use harmonic::{
    dirichlet_energy, harmonic_extension, nondegeneracy_check, steklov_spectrum, BoundaryTrace,
    DegeneracyVerdict, NondegeneracyReport, SteklovSpectrum, TraceComponent,
};
pub use minimize::{
    euler_lagrange_residual, minimize_q, random_trace, uniqueness_experiment, EulerLagrangeReport,
    MinimizerConfig, MinimizerResult, QuotientProblem, RatioReport, StepRule,
};
pub use quadrature::{radial_volume_quadrature, sphere_quadrature, QuadratureGrid};
pub use schwarzschild::{
    euclidean_annulus_energy, find_m0, schwarzschild_energy, schwarzschild_energy_limit,
    schwarzschild_mean_curvatures, M0Report, SchwarzschildParams,
};
