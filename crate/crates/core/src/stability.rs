//! The auxiliary molecular functional
//! ξ(ρ) = ã²G(ρ) + b̃²L(ρ) − ∫Vρ + D(ρ, ρ) + U and its stability threshold.

use rayon::prelude::*;
use serde::Serialize;

use crate::bound_constants::{a_from_a_tilde, maximize_h, BoundParameters, StabilityInputs};
use crate::coulomb::{attraction_term, direct_term, repulsion_term, MolecularConfig};
use crate::density::DensityProfile;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Relative tolerance for calling a negative ξ a violation; scaled by the sum
/// of the absolute values of the terms.
pub const VIOLATION_TOLERANCE: f64 = 1e-8;

/// Relative slack on z ≤ z_max, covering the bisection error in z_max.
pub const THRESHOLD_SLACK: f64 = 1e-9;

/// The itemized terms of ξ(ρ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalBreakdown<T> {
    /// ã²G(ρ).
    pub gradient_term: T,
    /// b̃²L(ρ).
    pub l_term: T,
    /// ∫Vρ, entering ξ with a minus sign.
    pub attraction: T,
    pub direct: T,
    pub repulsion: T,
    pub xi: T,
    /// Σ_j (1/D_j)[z²/8 − 4/(27b₁⁴)(2z³(π−1) + πa³b₂³)]; `None` when the
    /// charge leaves no admissible split of b̃².
    pub analytic_lower_bound: Option<T>,
    /// z ≤ max_σ h(σ).
    pub stable: bool,
    /// With one nucleus the half distance is undefined and the analytic
    /// bound is reported as 0.
    pub single_nucleus: bool,
}

impl<T: Real> FunctionalBreakdown<T> {
    /// Σ|terms|, the scale of the violation threshold.
    pub fn scale(&self) -> T {
        self.gradient_term.abs() + self.l_term.abs() + self.attraction.abs() + self.direct.abs() + self.repulsion.abs()
    }

    /// ξ < −10⁻⁸·scale.
    pub fn is_violation(&self) -> bool {
        self.xi < -lit::<T>(VIOLATION_TOLERANCE) * self.scale()
    }
}

fn assemble<T: Real>(gradient: T, l: T, attraction: T, direct: T, repulsion: T) -> T {
    gradient + l - attraction + direct + repulsion
}

/// Outcome of [`stability_verdict`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict<T> {
    pub stable: bool,
    pub z_max: T,
    pub sigma_star: T,
}

/// Converts ã² to a, maximizes h and compares z with the maximum
/// (up to [`THRESHOLD_SLACK`]).
pub fn stability_verdict<T: Real>(
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
    z: T,
) -> Result<StabilityVerdict<T>> {
    let a = a_from_a_tilde(a_tilde_sq, params)?;
    let max = maximize_h(params.gamma(), a, b_tilde_sq)?;
    Ok(StabilityVerdict {
        stable: z <= max.h_max * (T::one() + lit::<T>(THRESHOLD_SLACK)),
        z_max: max.h_max,
        sigma_star: max.sigma_star,
    })
}

/// Σ_j (1/D_j)·[z²/8 − 4/(27b₁⁴)(2z³(π−1) + πa³b₂³)].
///
/// Needs at least two nuclei and z ≤ a b₂/2.
pub fn analytic_stability_rhs<T: Real>(config: &MolecularConfig<T>, inputs: &StabilityInputs<T>) -> Result<T> {
    let half = config
        .half_distances()
        .ok_or_else(|| Error::Precondition("the analytic bound needs at least two nuclei".into()))?;
    let StabilityInputs { a, b1, b2, z } = *inputs;
    if z > a * b2 * lit(0.5) * (T::one() + lit::<T>(1e-12)) {
        return Err(Error::Precondition(format!(
            "z = {z} exceeds a·b₂/2 = {}",
            a * b2 * lit(0.5)
        )));
    }
    let bracket = bracket(a, b1, b2, z);
    Ok(half.iter().map(|&d| d.recip()).sum::<T>() * bracket)
}

fn bracket<T: Real>(a: T, b1: T, b2: T, z: T) -> T {
    let pi = T::PI();
    let z3 = z * z * z;
    z * z / lit(8.0)
        - lit::<T>(4.0) / (lit::<T>(27.0) * b1.powi(4)) * (lit::<T>(2.0) * z3 * (pi - T::one()) + pi * (a * b2).powi(3))
}

/// Analytic bound for the configuration with b₂ = 2z/a; 0 when z = 0 or
/// there is a single nucleus, `None` when no split of b̃² exists.
fn analytic_bound_for<T: Real>(
    config: &MolecularConfig<T>,
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
) -> Result<Option<T>> {
    if config.z() == T::zero() || config.half_distances().is_none() {
        return Ok(Some(T::zero()));
    }
    match StabilityInputs::from_tilde(params, a_tilde_sq, b_tilde_sq, config.z()) {
        Ok(inputs) => analytic_stability_rhs(config, &inputs).map(Some),
        Err(Error::Precondition(msg)) => {
            log::debug!("no analytic bound: {msg}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Terms of ξ that depend only on the density.
#[derive(Debug, Clone, Copy)]
struct DensityTerms<T> {
    gradient: T,
    l: T,
    direct: T,
}

fn density_terms<T: Real>(
    rho: &DensityProfile<T>,
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
) -> Result<DensityTerms<T>> {
    let g = rho.evaluate_g(params).map_err(|e| e.in_term("gradient term"))?.value;
    let l = rho.evaluate_l().map_err(|e| e.in_term("L term"))?.value;
    let direct = direct_term(rho)?.value;
    Ok(DensityTerms {
        gradient: a_tilde_sq * g,
        l: b_tilde_sq * l,
        direct,
    })
}

fn breakdown<T: Real>(
    terms: DensityTerms<T>,
    rho: &DensityProfile<T>,
    config: &MolecularConfig<T>,
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
    verdict: &StabilityVerdict<T>,
) -> Result<FunctionalBreakdown<T>> {
    let attraction = attraction_term(rho, config)?.value;
    let repulsion = repulsion_term(config);
    let out = FunctionalBreakdown {
        gradient_term: terms.gradient,
        l_term: terms.l,
        attraction,
        direct: terms.direct,
        repulsion,
        xi: assemble(terms.gradient, terms.l, attraction, terms.direct, repulsion),
        analytic_lower_bound: analytic_bound_for(config, params, a_tilde_sq, b_tilde_sq)?,
        stable: config.z() <= verdict.z_max * (T::one() + lit::<T>(THRESHOLD_SLACK)),
        single_nucleus: config.len() == 1,
    };
    if !out.xi.is_finite() {
        return Err(Error::divergence("ξ is not finite"));
    }
    Ok(out)
}

/// Evaluates every term of ξ(ρ) for one configuration.
pub fn evaluate_xi<T: Real>(
    rho: &DensityProfile<T>,
    config: &MolecularConfig<T>,
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
) -> Result<FunctionalBreakdown<T>> {
    let verdict = stability_verdict(params, a_tilde_sq, b_tilde_sq, config.z())?;
    let terms = density_terms(rho, params, a_tilde_sq, b_tilde_sq)?;
    breakdown(terms, rho, config, params, a_tilde_sq, b_tilde_sq, &verdict)
}

/// One evaluated cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCase<T> {
    pub profile: usize,
    pub config: usize,
    pub breakdown: FunctionalBreakdown<T>,
    pub violation: bool,
}

/// A cell that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCase {
    pub profile: usize,
    pub config: usize,
    pub reason: String,
}

/// Result of [`empirical_stability_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport<T> {
    pub z_max: T,
    pub sigma_star: T,
    pub cases: Vec<SweepCase<T>>,
    pub skipped: Vec<SkippedCase>,
    /// Smallest ξ over the evaluated cells; +∞ when none was evaluated.
    pub min_xi: T,
    pub violations: usize,
}

impl<T: Real> SweepReport<T> {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// ξ over corpus × configs, in row-major order (profile, then config).
///
/// Every configuration must satisfy z ≤ z_max. Divergent cells are skipped
/// and logged.
pub fn empirical_stability_sweep<T: Real>(
    corpus: &[DensityProfile<T>],
    configs: &[MolecularConfig<T>],
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
) -> Result<SweepReport<T>> {
    let z_top = configs.iter().map(|c| c.z()).fold(T::zero(), T::max);
    let verdict = stability_verdict(params, a_tilde_sq, b_tilde_sq, z_top)?;
    if !verdict.stable {
        return Err(Error::Precondition(format!(
            "charge {z_top} exceeds the stability threshold {}",
            verdict.z_max
        )));
    }
    let terms: Vec<Result<DensityTerms<T>>> = corpus
        .par_iter()
        .map(|rho| density_terms(rho, params, a_tilde_sq, b_tilde_sq))
        .collect();
    let cells: Vec<(usize, usize)> = (0..corpus.len())
        .flat_map(|i| (0..configs.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<Result<FunctionalBreakdown<T>>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let t = terms[i].clone()?;
            breakdown(t, &corpus[i], &configs[j], params, a_tilde_sq, b_tilde_sq, &verdict)
        })
        .collect();

    let mut report = SweepReport {
        z_max: verdict.z_max,
        sigma_star: verdict.sigma_star,
        cases: Vec::new(),
        skipped: Vec::new(),
        min_xi: T::infinity(),
        violations: 0,
    };
    for (&(profile, config), result) in cells.iter().zip(results) {
        match result {
            Ok(b) => {
                let violation = b.is_violation();
                if violation {
                    log::error!(
                        "ξ = {} < 0 for profile {profile}, config {config}",
                        to_f64(b.xi)
                    );
                    report.violations += 1;
                }
                report.min_xi = report.min_xi.min(b.xi);
                report.cases.push(SweepCase {
                    profile,
                    config,
                    breakdown: b,
                    violation,
                });
            }
            Err(Error::Divergence(reason)) => {
                log::warn!("skipping profile {profile}, config {config}: {reason}");
                report.skipped.push(SkippedCase { profile, config, reason });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
