//! Small-N symmetric wavefunctions with exact marginals, their indirect
//! Coulomb energy, and the check of the gradient-corrected lower bound
//! E(ψ) ≥ −b̃²L(ρ_ψ) − ã²G(ρ_ψ).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound_constants::{BoundParameters, TheoremConstants};
use crate::coulomb::direct_term;
use crate::density::{DensityProfile, GaussianComponent, Point};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_gaussian_point, stream_rng, Accumulator, McEstimate, DEFAULT_SAMPLES};
use crate::scalar::{lit, to_f64, Real};

/// Relative part of the slack criterion.
pub const SLACK_TOLERANCE: f64 = 1e-6;
/// Standard errors allowed below zero in the slack criterion.
pub const SLACK_SIGMAS: f64 = 3.0;

const PAIR_STREAM: u64 = 2;

/// Shape of |ψ|². Each particle factor is φ_c(x) = (A/π)e^{−A|x−c|²}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WaveFunctionKind<T> {
    /// |ψ|² = Π_i φ_0(x_i).
    GaussianProduct,
    /// |ψ|² = Σ_k w_k Π_i φ_{c_k}(x_i), a convex combination of symmetric
    /// product states (ψ is its square root).
    ShiftedGaussianMixture { centers: Vec<Point<T>>, weights: Vec<T> },
}

/// Symmetric N-particle state in the plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveFunctionSpec<T> {
    n: usize,
    width: T,
    kind: WaveFunctionKind<T>,
    seed: u64,
    samples: usize,
}

impl<T: Real> WaveFunctionSpec<T> {
    pub fn gaussian_product(n: usize, width: T, seed: u64) -> Result<Self> {
        Self::new(n, width, WaveFunctionKind::GaussianProduct, seed)
    }

    /// Weights are normalized to sum to one.
    pub fn shifted_mixture(n: usize, width: T, centers: Vec<Point<T>>, weights: Vec<T>, seed: u64) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() {
            return Err(Error::InvalidDescriptor(format!(
                "need one weight per center ({} centers, {} weights)",
                centers.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidDescriptor("mixture weights must be positive".into()));
        }
        if centers.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDescriptor("mixture centers must be finite".into()));
        }
        let total: T = weights.iter().copied().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(n, width, WaveFunctionKind::ShiftedGaussianMixture { centers, weights }, seed)
    }

    fn new(n: usize, width: T, kind: WaveFunctionKind<T>, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDescriptor(format!("need at least two particles, got {n}")));
        }
        if !(width > T::zero()) || !width.is_finite() {
            return Err(Error::InvalidDescriptor(format!("width must be positive, got {width}")));
        }
        Ok(Self {
            n,
            width,
            kind,
            seed,
            samples: DEFAULT_SAMPLES,
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(2);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn kind(&self) -> &WaveFunctionKind<T> {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// (center, weight) of each product component.
    fn components(&self) -> Vec<(Point<T>, T)> {
        match &self.kind {
            WaveFunctionKind::GaussianProduct => vec![([T::zero(), T::zero()], T::one())],
            WaveFunctionKind::ShiftedGaussianMixture { centers, weights } => {
                centers.iter().copied().zip(weights.iter().copied()).collect()
            }
        }
    }
}

/// JSON form, e.g. `{"kind": "gaussian-product", "N": 5, "A": 1.0, "seed": 7}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WaveFunctionDescriptor {
    GaussianProduct {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "A")]
        a: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        samples: Option<usize>,
    },
    ShiftedGaussianMixture {
        #[serde(rename = "N")]
        n: usize,
        #[serde(rename = "A")]
        a: f64,
        centers: Vec<[f64; 2]>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        samples: Option<usize>,
    },
}

impl WaveFunctionDescriptor {
    pub fn build<T: Real>(&self) -> Result<WaveFunctionSpec<T>> {
        let (spec, samples) = match self {
            Self::GaussianProduct { n, a, seed, samples } => {
                (WaveFunctionSpec::gaussian_product(*n, lit(*a), *seed)?, samples)
            }
            Self::ShiftedGaussianMixture {
                n,
                a,
                centers,
                weights,
                seed,
                samples,
            } => {
                let weights = weights.clone().unwrap_or_else(|| vec![1.0; centers.len()]);
                let spec = WaveFunctionSpec::shifted_mixture(
                    *n,
                    lit(*a),
                    centers.iter().map(|c| [lit(c[0]), lit(c[1])]).collect(),
                    weights.into_iter().map(lit).collect(),
                    *seed,
                )?;
                (spec, samples)
            }
        };
        Ok(match samples {
            Some(s) => spec.with_samples(*s),
            None => spec,
        })
    }
}

/// ρ_ψ = N Σ_k w_k φ_{c_k}; a single Gaussian with C = NA/π for products.
pub fn single_particle_density<T: Real>(spec: &WaveFunctionSpec<T>) -> DensityProfile<T> {
    let n: T = lit(spec.n as f64);
    let amp = n * spec.width / T::PI();
    match &spec.kind {
        WaveFunctionKind::GaussianProduct => {
            DensityProfile::gaussian(amp, spec.width, [T::zero(), T::zero()]).expect("validated spec")
        }
        WaveFunctionKind::ShiftedGaussianMixture { .. } => {
            let comps = spec
                .components()
                .into_iter()
                .map(|(c, w)| GaussianComponent {
                    amplitude: amp * w,
                    width: spec.width,
                    offset: c,
                })
                .collect();
            DensityProfile::mixture(comps, [T::zero(), T::zero()]).expect("validated spec")
        }
    }
}

/// E[1/|x − y|] for x, y independent from φ: √(πA/2).
fn pair_mean<T: Real>(width: T) -> T {
    (T::PI() * width * lit(0.5)).sqrt()
}

fn pair_count<T: Real>(n: usize) -> T {
    lit((n * (n - 1)) as f64 * 0.5)
}

/// Σ_{i<j} 1/|x_i − x_j| with the particles visited in the order `perm`.
pub fn pair_sum(points: &[[f64; 2]], perm: &[usize]) -> f64 {
    let mut total = 0.0;
    for (a, &i) in perm.iter().enumerate() {
        for &j in &perm[a + 1..] {
            let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            total += 1.0 / d;
        }
    }
    total
}

fn sample_configuration<R: rand::Rng>(rng: &mut R, components: &[([f64; 2], f64)], sigma: f64, out: &mut [[f64; 2]]) {
    let center = if components.len() == 1 {
        components[0].0
    } else {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = components[components.len() - 1].0;
        for (c, w) in components {
            acc += w;
            if u < acc {
                pick = *c;
                break;
            }
        }
        pick
    };
    for p in out.iter_mut() {
        *p = sample_gaussian_point(rng, center, sigma);
    }
}

/// Monte Carlo estimate of ⟨ψ, Σ_{i<j}|x_i − x_j|⁻¹ ψ⟩ with particles
/// visited in the order `perm`.
pub fn monte_carlo_pair_repulsion_permuted<T: Real>(spec: &WaveFunctionSpec<T>, perm: &[usize]) -> Result<McEstimate<T>> {
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..spec.n).collect::<Vec<_>>() {
        return Err(Error::domain("not a permutation of the particle indices"));
    }
    let components: Vec<([f64; 2], f64)> = spec
        .components()
        .into_iter()
        .map(|(c, w)| ([to_f64(c[0]), to_f64(c[1])], to_f64(w)))
        .collect();
    let sigma = (0.5 / to_f64(spec.width)).sqrt();
    let mut rng = stream_rng(spec.seed, PAIR_STREAM);
    let mut points = vec![[0.0; 2]; spec.n];
    let mut acc = Accumulator::default();
    for _ in 0..spec.samples {
        sample_configuration(&mut rng, &components, sigma, &mut points);
        acc.push(pair_sum(&points, perm));
    }
    Ok(acc.finish())
}

/// Monte Carlo estimate of the pair repulsion for any spec kind.
pub fn monte_carlo_pair_repulsion<T: Real>(spec: &WaveFunctionSpec<T>) -> Result<McEstimate<T>> {
    let perm: Vec<usize> = (0..spec.n).collect();
    monte_carlo_pair_repulsion_permuted(spec, &perm)
}

/// ⟨ψ, Σ_{i<j}|x_i − x_j|⁻¹ ψ⟩: closed form N(N−1)/2·√(πA/2) for products,
/// Monte Carlo for mixtures.
pub fn pair_repulsion_expectation<T: Real>(spec: &WaveFunctionSpec<T>) -> Result<McEstimate<T>> {
    match spec.kind {
        WaveFunctionKind::GaussianProduct => Ok(McEstimate::exact(pair_count::<T>(spec.n) * pair_mean(spec.width))),
        WaveFunctionKind::ShiftedGaussianMixture { .. } => monte_carlo_pair_repulsion(spec),
    }
}

/// E(ψ) = ⟨ψ, Σ_{i<j}|x_i − x_j|⁻¹ ψ⟩ − D(ρ_ψ, ρ_ψ).
pub fn indirect_energy<T: Real>(spec: &WaveFunctionSpec<T>) -> Result<McEstimate<T>> {
    let pair = pair_repulsion_expectation(spec)?;
    let direct = match spec.kind {
        WaveFunctionKind::GaussianProduct => {
            let n: T = lit(spec.n as f64);
            n * n * lit(0.5) * pair_mean(spec.width)
        }
        WaveFunctionKind::ShiftedGaussianMixture { .. } => direct_term(&single_particle_density(spec))?.value,
    };
    Ok(McEstimate {
        value: pair.value - direct,
        ..pair
    })
}

/// Both sides of the lower bound for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheckResult<T> {
    /// E(ψ).
    pub lhs: T,
    /// −b̃²L(ρ_ψ) − ã²G(ρ_ψ).
    pub rhs: T,
    pub slack: T,
    /// lhs/rhs when rhs < 0.
    pub tightness_ratio: Option<T>,
    pub statistical_error: T,
}

impl<T: Real> BoundCheckResult<T> {
    fn new(lhs: McEstimate<T>, rhs: T) -> Self {
        Self {
            lhs: lhs.value,
            rhs,
            slack: lhs.value - rhs,
            tightness_ratio: (rhs < T::zero()).then(|| lhs.value / rhs),
            statistical_error: lhs.stderr,
        }
    }

    /// slack ≥ −(10⁻⁶|rhs| + 3·stderr).
    pub fn passes(&self) -> bool {
        self.slack >= -(lit::<T>(SLACK_TOLERANCE) * self.rhs.abs() + lit::<T>(SLACK_SIGMAS) * self.statistical_error)
    }
}

/// L(ρ_ψ) and G(ρ_ψ), checking the hypotheses ρ ∈ L^{3/2}, |∇ρ^α| ∈ L^γ.
fn local_terms<T: Real>(rho: &DensityProfile<T>, params: &BoundParameters<T>) -> Result<(T, T)> {
    let hyp = |e: Error| match e {
        Error::Divergence(m) => Error::Precondition(format!("density outside the admissible class: {m}")),
        other => other,
    };
    let l = rho.evaluate_l().map_err(hyp)?.value;
    let g = rho.evaluate_g(params).map_err(hyp)?.value;
    Ok((l, g))
}

/// Checks E(ψ) ≥ −b̃²L(ρ_ψ) − ã²G(ρ_ψ) with the default coefficients.
pub fn check_main_bound<T: Real>(spec: &WaveFunctionSpec<T>, params: &BoundParameters<T>) -> Result<BoundCheckResult<T>> {
    check_main_bound_with(spec, &TheoremConstants::new(*params))
}

/// [`check_main_bound`] with explicit coefficients.
pub fn check_main_bound_with<T: Real>(
    spec: &WaveFunctionSpec<T>,
    constants: &TheoremConstants<T>,
) -> Result<BoundCheckResult<T>> {
    let rho = single_particle_density(spec);
    let (l, g) = local_terms(&rho, &constants.params)?;
    let lhs = indirect_energy(spec)?;
    Ok(BoundCheckResult::new(lhs, bound_rhs(constants, l, g)))
}

fn bound_rhs<T: Real>(constants: &TheoremConstants<T>, l: T, g: T) -> T {
    -constants.b_tilde_sq * l - constants.a_tilde_sq * g
}

/// One cell of a tightness scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow<T> {
    pub spec: usize,
    pub gamma: T,
    pub epsilon: T,
    #[serde(rename = "N")]
    pub n: usize,
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub ratio: Option<T>,
    pub stderr: T,
    pub passes: bool,
}

/// The (γ, ε) with the largest tightness ratio for one spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestCell<T> {
    pub spec: usize,
    pub gamma: T,
    pub epsilon: T,
    pub ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport<T> {
    pub rows: Vec<ScanRow<T>>,
    pub best: Vec<BestCell<T>>,
    /// Cells skipped with the reason, as (spec, γ, ε, message).
    pub skipped: Vec<(usize, T, T, String)>,
}

impl<T: Real> ScanReport<T> {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passes)
    }
}

/// Scales applied to the coefficients of the bound before comparing; both
/// 1 in normal use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientScale<T> {
    pub b_tilde_sq: T,
    pub a_tilde_sq: T,
}

impl<T: Real> Default for CoefficientScale<T> {
    fn default() -> Self {
        Self {
            b_tilde_sq: T::one(),
            a_tilde_sq: T::one(),
        }
    }
}

/// Tightness ratio over specs × γ × ε, rows ordered by (spec, γ, ε) input
/// index.
///
/// E(ψ) and L(ρ_ψ) are computed once per spec and G(ρ_ψ) once per (spec, γ).
/// Monte Carlo streams depend only on each spec's seed.
pub fn tightness_scan<T: Real>(
    specs: &[WaveFunctionSpec<T>],
    gamma_grid: &[T],
    epsilon_grid: &[T],
) -> Result<ScanReport<T>> {
    tightness_scan_scaled(specs, gamma_grid, epsilon_grid, CoefficientScale::default())
}

/// [`tightness_scan`] with rescaled coefficients.
pub fn tightness_scan_scaled<T: Real>(
    specs: &[WaveFunctionSpec<T>],
    gamma_grid: &[T],
    epsilon_grid: &[T],
    scale: CoefficientScale<T>,
) -> Result<ScanReport<T>> {
    let mut params = Vec::with_capacity(gamma_grid.len() * epsilon_grid.len());
    for &g in gamma_grid {
        for &e in epsilon_grid {
            params.push(BoundParameters::new(g, e)?);
        }
    }
    let per_spec: Vec<Result<(McEstimate<T>, T)>> = specs
        .par_iter()
        .map(|spec| {
            let rho = single_particle_density(spec);
            let l = rho.evaluate_l()?.value;
            Ok((indirect_energy(spec)?, l))
        })
        .collect();
    let g_cells: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|s| (0..gamma_grid.len()).map(move |g| (s, g)))
        .collect();
    let g_values: Vec<Result<T>> = g_cells
        .par_iter()
        .map(|&(s, gi)| {
            let p = params[gi * epsilon_grid.len()];
            Ok(single_particle_density(&specs[s]).evaluate_g(&p)?.value)
        })
        .collect();

    let mut report = ScanReport {
        rows: Vec::new(),
        best: Vec::new(),
        skipped: Vec::new(),
    };
    for (s, spec) in specs.iter().enumerate() {
        let mut best: Option<BestCell<T>> = None;
        for (gi, &gamma) in gamma_grid.iter().enumerate() {
            for (ei, &epsilon) in epsilon_grid.iter().enumerate() {
                let p = params[gi * epsilon_grid.len() + ei];
                let inputs = match (&per_spec[s], &g_values[s * gamma_grid.len() + gi]) {
                    (Ok(a), Ok(g)) => Ok((a.0, a.1, *g)),
                    (Err(e), _) | (_, Err(e)) => Err(e.clone()),
                };
                let (energy, l, g) = match inputs {
                    Ok(v) => v,
                    Err(e) => {
                        log::warn!("skipping spec {s} at gamma = {gamma}, epsilon = {epsilon}: {e}");
                        report.skipped.push((s, gamma, epsilon, e.to_string()));
                        continue;
                    }
                };
                let mut tc = TheoremConstants::new(p);
                tc.b_tilde_sq = tc.b_tilde_sq * scale.b_tilde_sq;
                tc.a_tilde_sq = tc.a_tilde_sq * scale.a_tilde_sq;
                let check = BoundCheckResult::new(energy, bound_rhs(&tc, l, g));
                if let Some(ratio) = check.tightness_ratio {
                    if best.is_none_or(|b| ratio > b.ratio) {
                        best = Some(BestCell {
                            spec: s,
                            gamma,
                            epsilon,
                            ratio,
                        });
                    }
                }
                report.rows.push(ScanRow {
                    spec: s,
                    gamma,
                    epsilon,
                    n: spec.n,
                    lhs: check.lhs,
                    rhs: check.rhs,
                    slack: check.slack,
                    ratio: check.tightness_ratio,
                    stderr: check.statistical_error,
                    passes: check.passes(),
                });
            }
        }
        report.best.extend(best);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn product_marginal() {
        let spec = WaveFunctionSpec::gaussian_product(2, 1.0, 0).unwrap();
        let rho = single_particle_density(&spec);
        assert_relative_eq!(rho.value_at([0.0, 0.0]), 2.0 / PI, max_relative = 1e-15);
        assert_relative_eq!(rho.mass().unwrap(), 2.0, max_relative = 1e-10);
    }

    #[test]
    fn mixture_marginal_is_weighted_sum() {
        let c = [[-1.0, 0.0], [1.5, 0.5]];
        let spec = WaveFunctionSpec::shifted_mixture(3, 0.7, c.to_vec(), vec![1.0, 1.0], 0).unwrap();
        let rho = single_particle_density(&spec);
        assert_relative_eq!(rho.mass().unwrap(), 3.0, max_relative = 1e-10);
        let phi = |x: [f64; 2], c: [f64; 2]| 0.7 / PI * (-0.7 * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2))).exp();
        for x in [[0.0, 0.0], [1.0, -0.3], [-2.0, 1.0]] {
            let expect = 3.0 * 0.5 * (phi(x, c[0]) + phi(x, c[1]));
            assert_relative_eq!(rho.value_at(x), expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn pair_repulsion_closed_form_and_counting() {
        let two = WaveFunctionSpec::gaussian_product(2, 2.0, 0).unwrap();
        assert_relative_eq!(pair_repulsion_expectation(&two).unwrap().value, PI.sqrt(), max_relative = 1e-15);
        for n in [3, 5, 10] {
            let s = WaveFunctionSpec::gaussian_product(n, 2.0, 0).unwrap();
            let ratio = pair_repulsion_expectation(&s).unwrap().value / PI.sqrt();
            assert_relative_eq!(ratio, (n * (n - 1)) as f64 / 2.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn monte_carlo_pair_repulsion_on_product() {
        let spec = WaveFunctionSpec::gaussian_product(3, 1.0, 9).unwrap().with_samples(200_000);
        let mc = monte_carlo_pair_repulsion(&spec).unwrap();
        let exact = pair_repulsion_expectation(&spec).unwrap().value;
        assert!(mc.agrees_with(exact, 3.0), "{mc:?} vs {exact}");
    }

    #[test]
    fn estimator_is_permutation_invariant() {
        let spec = WaveFunctionSpec::gaussian_product(4, 1.0, 3).unwrap().with_samples(2_000);
        let a = monte_carlo_pair_repulsion(&spec).unwrap();
        let b = monte_carlo_pair_repulsion_permuted(&spec, &[2, 0, 3, 1]).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-13);
        assert!(monte_carlo_pair_repulsion_permuted(&spec, &[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn product_indirect_energy() {
        for (n, a) in [(2, 1.0), (5, 0.3)] {
            let spec = WaveFunctionSpec::gaussian_product(n, a, 0).unwrap();
            let e = indirect_energy(&spec).unwrap();
            assert_relative_eq!(e.value, -(n as f64) / 2.0 * (PI * a / 2.0).sqrt(), max_relative = 1e-14);
            assert!(e.value < 0.0);
            assert_eq!(e.stderr, 0.0);
        }
    }

    #[test]
    fn mixture_indirect_energy_has_error_bar() {
        let spec = WaveFunctionSpec::shifted_mixture(3, 1.0, vec![[0.0, 0.0], [2.0, 0.0]], vec![1.0, 2.0], 4)
            .unwrap()
            .with_samples(100_000);
        let pair = pair_repulsion_expectation(&spec).unwrap();
        // every component is a translated product state
        assert!(pair.agrees_with(3.0 * (PI / 2.0).sqrt(), 3.0), "{pair:?}");
        let e = indirect_energy(&spec).unwrap();
        assert!(e.stderr > 0.0);
        assert_eq!(e.stderr, pair.stderr);
    }

    #[test]
    fn main_bound_holds_for_product() {
        let spec = WaveFunctionSpec::gaussian_product(5, 1.0, 0).unwrap();
        let r = check_main_bound(&spec, &BoundParameters::new(2.0, 0.5).unwrap()).unwrap();
        assert!(r.slack >= 0.0 && r.passes(), "{r:?}");
        let ratio = r.tightness_ratio.unwrap();
        assert!(ratio > 0.0 && ratio <= 1.0);
    }

    #[test]
    fn gamma_two_matches_quadratic_gradient_form() {
        let spec = WaveFunctionSpec::gaussian_product(3, 0.8, 0).unwrap();
        let beta = crate::bound_constants::beta::<f64>();
        for eps in [0.1, 1.0, 4.0] {
            let p = BoundParameters::new(2.0, eps).unwrap();
            let r = check_main_bound(&spec, &p).unwrap();
            let rho = single_particle_density(&spec);
            let l = rho.evaluate_l().unwrap().value;
            let g = rho.evaluate_g(&p).unwrap().value;
            let expect = -(1.0 + eps) * beta * l - 4.0 / (beta * eps) * g;
            assert_relative_eq!(r.rhs, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn ratio_peaks_at_interior_epsilon() {
        let spec = WaveFunctionSpec::gaussian_product(5, 1.0, 0).unwrap();
        let eps: Vec<f64> = (0..25).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
        let report = tightness_scan(&[spec], &[2.0], &eps).unwrap();
        let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio.unwrap()).collect();
        let (imax, _) = ratios
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!(imax > 0 && imax < eps.len() - 1, "maximum at edge: {imax}");
        assert_eq!(report.best[0].ratio, ratios[imax]);
    }

    #[test]
    fn ratio_decreases_with_particle_number() {
        let specs: Vec<_> = [2, 3, 5, 10]
            .iter()
            .map(|&n| WaveFunctionSpec::gaussian_product(n, 1.0, 0).unwrap())
            .collect();
        let report = tightness_scan(&specs, &[2.0], &[0.5]).unwrap();
        let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio.unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(report.passed());
    }

    #[test]
    fn scaled_coefficients_can_break_the_bound() {
        let spec = WaveFunctionSpec::gaussian_product(2, 1.0, 0).unwrap();
        let scale = CoefficientScale {
            b_tilde_sq: 0.01,
            a_tilde_sq: 1.0,
        };
        let report = tightness_scan_scaled(&[spec], &[2.0], &[10.0], scale).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn descriptors() {
        let d: WaveFunctionDescriptor =
            serde_json::from_str(r#"{"kind": "gaussian-product", "N": 5, "A": 1.0, "seed": 7}"#).unwrap();
        let s: WaveFunctionSpec<f64> = d.build().unwrap();
        assert_eq!((s.particles(), s.seed()), (5, 7));
        let d: WaveFunctionDescriptor = serde_json::from_str(
            r#"{"kind": "shifted-gaussian-mixture", "N": 3, "A": 2.0, "centers": [[0, 0], [1, 1]]}"#,
        )
        .unwrap();
        let s: WaveFunctionSpec<f64> = d.build().unwrap();
        match s.kind() {
            WaveFunctionKind::ShiftedGaussianMixture { weights, .. } => assert_eq!(weights, &vec![0.5, 0.5]),
            _ => panic!(),
        }
        let bad: std::result::Result<WaveFunctionDescriptor, _> =
            serde_json::from_str(r#"{"kind": "gaussian-product", "N": 1, "A": 1.0}"#);
        assert!(bad.unwrap().build::<f64>().is_err());
    }
}
