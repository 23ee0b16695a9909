//! Coulomb-type integrals with the planar 1/|x − y| kernel: the direct term,
//! nuclear attraction and repulsion, and the disk inequalities that bound the
//! Coulomb singularity by the local functionals.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::bound_constants::BoundParameters;
use crate::density::{DensityProfile, GaussianComponent, Point};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_gaussian_point, stream_rng, Accumulator, McEstimate};
use crate::quadrature::{integrate_panels, Estimate, Tolerance};
use crate::scalar::{lit, to_f64, Real};
use crate::special::{bessel_i0_scaled, ellipk_complementary};

/// Relative slack allowed when deciding whether an inequality holds.
pub const INEQUALITY_SLACK: f64 = 1e-9;

const INNER_TOLERANCE: Tolerance = Tolerance::relative(1e-11);
const OUTER_TOLERANCE: Tolerance = Tolerance::relative(1e-9);

/// Nuclear charge and positions of a planar molecule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MolecularConfig<T> {
    z: T,
    positions: Vec<Point<T>>,
    half_distances: Option<Vec<T>>,
}

impl<T: Real> MolecularConfig<T> {
    /// Requires z ≥ 0 and at least one nucleus, all pairwise distinct.
    pub fn new(z: T, positions: Vec<Point<T>>) -> Result<Self> {
        if !(z >= T::zero()) || !z.is_finite() {
            return Err(Error::domain(format!("nuclear charge must be nonnegative, got {z}")));
        }
        if positions.is_empty() {
            return Err(Error::domain("at least one nucleus is required"));
        }
        if positions.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("nuclear positions must be finite"));
        }
        let k = positions.len();
        let mut nearest = vec![T::infinity(); k];
        for i in 0..k {
            for j in i + 1..k {
                let d = distance(positions[i], positions[j]);
                if d == T::zero() {
                    return Err(Error::domain(format!("nuclei {i} and {j} coincide")));
                }
                nearest[i] = nearest[i].min(d);
                nearest[j] = nearest[j].min(d);
            }
        }
        let half_distances = (k >= 2).then(|| nearest.into_iter().map(|d| d * lit(0.5)).collect());
        Ok(Self {
            z,
            positions,
            half_distances,
        })
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// D_j = ½ min_{k≠j} |R_k − R_j|; `None` for a single nucleus, where the
    /// minimum is empty.
    pub fn half_distances(&self) -> Option<&[T]> {
        self.half_distances.as_deref()
    }

    /// Same geometry with a different charge.
    pub fn with_charge(&self, z: T) -> Result<Self> {
        Self::new(z, self.positions.clone())
    }
}

/// JSON form of a nuclear configuration: `{"z": 1.0, "positions": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDescriptor {
    pub z: f64,
    pub positions: Vec<[f64; 2]>,
}

impl ConfigDescriptor {
    pub fn build<T: Real>(&self) -> Result<MolecularConfig<T>> {
        MolecularConfig::new(
            lit(self.z),
            self.positions.iter().map(|p| [lit(p[0]), lit(p[1])]).collect(),
        )
    }
}

/// Disk of radius R > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskSpec<T> {
    radius: T,
    center: Point<T>,
}

impl<T: Real> DiskSpec<T> {
    pub fn new(radius: T, center: Point<T>) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { radius, center })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }
}

fn distance<T: Real>(a: Point<T>, b: Point<T>) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// ∫₀^{2π} (r² + s² − 2rs cos θ)^{−1/2} dθ = 4/(r + s)·K(k), k² = 4rs/(r + s)².
///
/// Infinite at r = s (integrable logarithmic singularity; callers place a
/// breakpoint there).
pub fn angular_coulomb_kernel<T: Real>(r: T, s: T) -> T {
    let sum = r + s;
    if r == s {
        return T::infinity();
    }
    let (lo, hi) = if r < s { (r, s) } else { (s, r) };
    if lo == T::zero() {
        return lit::<T>(2.0) * T::PI() / hi;
    }
    // complementary modulus k′ = |r − s|/(r + s), computed without cancellation
    lit::<T>(4.0) / sum * ellipk_complementary((hi - lo) / sum)
}

/// E[1/|W|] for W ~ N(μ, s²I) in the plane:
/// √(π/2)/s · e^{−|μ|²/(4s²)} I₀(|μ|²/(4s²)).
pub fn gaussian_inverse_distance<T: Real>(mean_distance: T, variance: T) -> T {
    let s = variance.sqrt();
    let x = mean_distance * mean_distance / (lit::<T>(4.0) * variance);
    (T::PI() * lit(0.5)).sqrt() / s * bessel_i0_scaled(x)
}

/// D(ρ, ρ) for a sum of Gaussians, in closed form from the pairwise
/// expectations of 1/|X_j − X_k|.
pub fn gaussian_terms_direct<T: Real>(terms: &[GaussianComponent<T>]) -> T {
    let half = lit::<T>(0.5);
    let mut total = T::zero();
    for (j, a) in terms.iter().enumerate() {
        for (k, b) in terms.iter().enumerate() {
            let var = half / a.width + half / b.width;
            let mu = if j == k { T::zero() } else { distance(a.offset, b.offset) };
            total = total + a.mass() * b.mass() * gaussian_inverse_distance(mu, var);
        }
    }
    total * half
}

fn gaussian_terms_attraction<T: Real>(terms: &[GaussianComponent<T>], nucleus: Point<T>) -> T {
    terms
        .iter()
        .map(|c| c.mass() * gaussian_inverse_distance(distance(c.offset, nucleus), lit::<T>(0.5) / c.width))
        .sum()
}

/// D(ρ, ρ) = ½∬ρ(x)ρ(y)/|x − y|.
///
/// Radial profiles use the elliptic-integral reduction
/// D = 2π∫₀^∞ ρ(r) r ∫₀^r ρ(s) s K(r, s) ds dr, the inner integral ending on
/// the logarithmic diagonal. Mixtures without a common center use the
/// pairwise Gaussian closed form.
pub fn direct_term<T: Real>(rho: &DensityProfile<T>) -> Result<Estimate<T>> {
    if rho.is_zero() {
        return Ok(Estimate::zero());
    }
    if !rho.is_radial() {
        let terms = rho.gaussian_terms().expect("non-radial profiles are mixtures");
        return Ok(Estimate {
            value: gaussian_terms_direct(&terms),
            abs_error: T::zero(),
            evaluations: 0,
        });
    }
    let pts = rho.radial_breakpoints(T::one());
    let failure = RefCell::new(None);
    let mut inner_error = T::zero();
    let mut evaluations = 0;
    let outer = integrate_panels(
        |r: T| {
            let rho_r = rho.radial_value(r);
            if rho_r == T::zero() || r == T::zero() {
                return T::zero();
            }
            let mut inner_pts: Vec<T> = pts.iter().copied().filter(|&p| p < r).collect();
            inner_pts.push(r);
            match integrate_panels(
                |s| rho.radial_value(s) * s * angular_coulomb_kernel(r, s),
                &inner_pts,
                INNER_TOLERANCE,
            ) {
                Ok(est) => {
                    inner_error = inner_error.max(est.abs_error / est.value.abs().max(T::min_positive_value()));
                    evaluations += est.evaluations;
                    rho_r * r * est.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    T::nan()
                }
            }
        },
        &pts,
        OUTER_TOLERANCE,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.in_term("direct term"));
    }
    let outer = outer.map_err(|e| e.in_term("direct term"))?;
    if !outer.value.is_finite() {
        return Err(Error::divergence("direct term is not finite"));
    }
    Ok(Estimate {
        value: outer.value,
        abs_error: outer.abs_error + inner_error * outer.value.abs(),
        evaluations: evaluations + outer.evaluations,
    }
    .scaled(lit::<T>(2.0) * T::PI()))
}

/// ∫ρ(x)/|x − R| dx for a single point R (unit charge).
fn potential_at<T: Real>(rho: &DensityProfile<T>, nucleus: Point<T>) -> Result<Estimate<T>> {
    match rho.radial_center() {
        Some(center) => {
            let d = distance(center, nucleus);
            let mut pts = rho.radial_breakpoints(T::one());
            if d > T::zero() && d < *pts.last().expect("nonempty") {
                pts.push(d);
                pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
                pts.dedup();
            }
            integrate_panels(
                |r| {
                    if d == T::zero() {
                        lit::<T>(2.0) * T::PI() * rho.radial_value(r)
                    } else {
                        rho.radial_value(r) * r * angular_coulomb_kernel(r, d)
                    }
                },
                &pts,
                INNER_TOLERANCE,
            )
        }
        None => {
            let terms = rho.gaussian_terms().expect("non-radial profiles are mixtures");
            Ok(Estimate {
                value: gaussian_terms_attraction(&terms, nucleus),
                abs_error: T::zero(),
                evaluations: 0,
            })
        }
    }
}

/// ∫V(x)ρ(x) dx with V(x) = Σ_i z/|x − R_i|.
pub fn attraction_term<T: Real>(rho: &DensityProfile<T>, config: &MolecularConfig<T>) -> Result<Estimate<T>> {
    if config.z == T::zero() || rho.is_zero() {
        return Ok(Estimate::zero());
    }
    let mut total = Estimate::zero();
    for &nucleus in &config.positions {
        let est = potential_at(rho, nucleus).map_err(|e| e.in_term("nuclear attraction"))?;
        total = total + est;
    }
    if !total.value.is_finite() {
        return Err(Error::divergence("nuclear attraction is not finite"));
    }
    Ok(total.scaled(config.z))
}

/// U = Σ_{i<j} z²/|R_i − R_j|.
pub fn repulsion_term<T: Real>(config: &MolecularConfig<T>) -> T {
    let p = &config.positions;
    let mut total = T::zero();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            total = total + T::one() / distance(p[i], p[j]);
        }
    }
    config.z * config.z * total
}

/// Both sides of a disk inequality lhs ≤ rhs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

impl<T: Real> InequalityCheck<T> {
    fn new(lhs: T, rhs: T) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs * (T::one() + lit(INEQUALITY_SLACK)),
        }
    }
}

fn concentric_radius<T: Real>(profile: &DensityProfile<T>, disk: &DiskSpec<T>) -> Result<T> {
    let center = profile
        .radial_center()
        .ok_or_else(|| Error::domain("disk inequalities need a radial profile"))?;
    let offset = distance(center, disk.center);
    if offset > lit::<T>(1e-12) * disk.radius {
        return Err(Error::domain(format!(
            "disk must be centered on the profile (offset {})",
            to_f64(offset)
        )));
    }
    Ok(disk.radius)
}

fn disk_points<T: Real>(profile: &DensityProfile<T>, radius: T) -> Vec<T> {
    let mut pts: Vec<T> = profile
        .radial_breakpoints(T::one())
        .into_iter()
        .filter(|&p| p < radius)
        .collect();
    pts.push(radius);
    pts
}

/// 2π∫₀^R f(r) r dr.
fn disk_integral<T: Real>(pts: &[T], f: impl Fn(T) -> T) -> Result<T> {
    let est = integrate_panels(|r| f(r) * r, pts, INNER_TOLERANCE)?;
    if !est.value.is_finite() {
        return Err(Error::divergence("disk integral is not finite"));
    }
    Ok(est.value * lit::<T>(2.0) * T::PI())
}

/// Disk uncertainty principle with the weight u(r) = 1/r − 1/R:
///
/// |∫_{D_R}(1/|x| − 2/R) f^{1/α}| ≤ (1/α)(C(γ)∫|∇f|^γ)^{1/γ}(C(δ)∫|x|^δ|u|^δ f^{3/(2α)})^{1/δ}.
///
/// `f` is any nonnegative radial profile concentric with the disk.
pub fn verify_uncertainty_lemma<T: Real>(
    f: &DensityProfile<T>,
    disk: &DiskSpec<T>,
    params: &BoundParameters<T>,
) -> Result<InequalityCheck<T>> {
    let radius = concentric_radius(f, disk)?;
    let pts = disk_points(f, radius);
    let (alpha, g, delta) = (params.alpha(), params.gamma(), params.delta());
    let inv_alpha = alpha.recip();
    let two = lit::<T>(2.0);
    // 2u + r u′ = 1/r − 2/R; the factor r of the area element cancels 1/r
    let lhs = disk_integral(&pts, |r| {
        let w = T::one() / r - two / radius;
        w * f.radial_value(r).powf(inv_alpha)
    })
    .map_err(|e| e.in_term("uncertainty lemma lhs"))?
    .abs();
    let grad = disk_integral(&pts, |r| f.radial_derivative(r).abs().powf(g))
        .map_err(|e| e.in_term("uncertainty lemma gradient"))?;
    let weight = disk_integral(&pts, |r| {
        // |x|·|u(|x|)| = 1 − r/R on the disk
        (T::one() - r / radius).abs().powf(delta) * f.radial_value(r).powf(lit::<T>(1.5) * inv_alpha)
    })
    .map_err(|e| e.in_term("uncertainty lemma weight"))?;
    let rhs = inv_alpha * (params.c_gamma() * grad).powf(g.recip()) * (params.c_delta() * weight).powf(delta.recip());
    Ok(InequalityCheck::new(lhs, rhs))
}

/// Coulomb uncertainty principle on a disk:
///
/// ab·α|∫_{D_R}(1/|x| − 2/R)ρ| ≤ (a^γ C(γ)/γ)∫_{D_R}|∇ρ^α|^γ + (b^δ C(δ)/δ)∫_{D_R}ρ^{3/2}.
pub fn verify_coulomb_uncertainty<T: Real>(
    rho: &DensityProfile<T>,
    disk: &DiskSpec<T>,
    a: T,
    b: T,
    params: &BoundParameters<T>,
) -> Result<InequalityCheck<T>> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::domain("couplings a and b must be positive"));
    }
    let radius = concentric_radius(rho, disk)?;
    let pts = disk_points(rho, radius);
    let (alpha, g, delta) = (params.alpha(), params.gamma(), params.delta());
    let two = lit::<T>(2.0);
    let coulomb = disk_integral(&pts, |r| (T::one() / r - two / radius) * rho.radial_value(r))
        .map_err(|e| e.in_term("Coulomb uncertainty lhs"))?;
    let lhs = a * b * alpha * coulomb.abs();
    let dpow = rho.power_derivative_fn(alpha);
    let grad = disk_integral(&pts, |r| dpow(r).abs().powf(g)).map_err(|e| e.in_term("disk gradient term"))?;
    let local = disk_integral(&pts, |r| rho.radial_value(r).powf(lit(1.5))).map_err(|e| e.in_term("disk L term"))?;
    let rhs = a.powf(g) * params.c_gamma() / g * grad + b.powf(delta) * params.c_delta() / delta * local;
    Ok(InequalityCheck::new(lhs, rhs))
}

fn sample_terms<R: rand::Rng>(rng: &mut R, terms: &[GaussianComponent<f64>], cumulative: &[f64]) -> [f64; 2] {
    let k = if terms.len() == 1 {
        0
    } else {
        let u: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
        cumulative.partition_point(|&c| c <= u).min(terms.len() - 1)
    };
    let c = &terms[k];
    sample_gaussian_point(rng, c.offset, (0.5 / c.width).sqrt())
}

fn f64_terms<T: Real>(rho: &DensityProfile<T>) -> Result<(Vec<GaussianComponent<f64>>, Vec<f64>, f64)> {
    let terms = rho
        .gaussian_terms()
        .ok_or_else(|| Error::domain("Monte Carlo sampling needs a Gaussian or mixture profile"))?;
    let terms: Vec<GaussianComponent<f64>> = terms
        .iter()
        .map(|c| GaussianComponent {
            amplitude: to_f64(c.amplitude),
            width: to_f64(c.width),
            offset: [to_f64(c.offset[0]), to_f64(c.offset[1])],
        })
        .collect();
    let mut acc = 0.0;
    let cumulative: Vec<f64> = terms
        .iter()
        .map(|c| {
            acc += c.mass();
            acc
        })
        .collect();
    Ok((terms, cumulative, acc))
}

/// Monte Carlo estimate of D(ρ, ρ) = (M²/2)·E[1/|X − Y|] with X, Y drawn
/// independently from ρ/M. Gaussian and mixture profiles only.
pub fn monte_carlo_direct_term<T: Real>(rho: &DensityProfile<T>, samples: usize, seed: u64) -> Result<McEstimate<T>> {
    let (terms, cumulative, mass) = f64_terms(rho)?;
    if terms.is_empty() {
        return Ok(McEstimate::exact(T::zero()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        let x = sample_terms(&mut rng, &terms, &cumulative);
        let y = sample_terms(&mut rng, &terms, &cumulative);
        acc.push(1.0 / distance(x, y));
    }
    Ok(acc.finish::<T>().scaled(lit(0.5 * mass * mass)))
}

/// Monte Carlo estimate of ∫Vρ. Gaussian and mixture profiles only.
pub fn monte_carlo_attraction<T: Real>(
    rho: &DensityProfile<T>,
    config: &MolecularConfig<T>,
    samples: usize,
    seed: u64,
) -> Result<McEstimate<T>> {
    let (terms, cumulative, mass) = f64_terms(rho)?;
    if terms.is_empty() {
        return Ok(McEstimate::exact(T::zero()));
    }
    let nuclei: Vec<[f64; 2]> = config.positions.iter().map(|p| [to_f64(p[0]), to_f64(p[1])]).collect();
    let mut rng = stream_rng(seed, 1);
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        let x = sample_terms(&mut rng, &terms, &cumulative);
        acc.push(nuclei.iter().map(|&r| 1.0 / distance(x, r)).sum());
    }
    Ok(acc.finish::<T>().scaled(lit::<T>(mass) * config.z))
}
