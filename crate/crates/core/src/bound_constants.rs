//! Closed-form constants of the gradient-corrected bound and the scalar
//! threshold problem that fixes the largest admissible nuclear charge.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Distance kept from the open ends of the exponent interval (1, 3).
pub const GAMMA_GUARD: f64 = 1e-6;

/// Absolute bisection tolerance in σ for [`maximize_h`].
pub const SIGMA_TOLERANCE: f64 = 1e-12;

/// Sharp constant of |x|^p + |y|^p ≤ C(p)·|x + iy|^p.
///
/// C(p) = 2^{1−p/2} on (0, 2] and 1 on [2, ∞).
pub fn sharp_constant<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero()) || !p.is_finite() {
        return Err(Error::domain(format!("sharp constant needs p > 0, got {p}")));
    }
    Ok(sharp_constant_unchecked(p))
}

pub(crate) fn sharp_constant_unchecked<T: Real>(p: T) -> T {
    let two = lit::<T>(2.0);
    if p >= two {
        T::one()
    } else {
        two.powf(T::one() - p / two)
    }
}

/// Leading-term constant β = (4/3)^{3/2}·√(5π − 1) ≈ 5.9045.
pub fn beta<T: Real>() -> T {
    lit::<T>(4.0 / 3.0).powf(lit(1.5)) * five_pi_minus_one::<T>().sqrt()
}

pub(crate) fn five_pi_minus_one<T: Real>() -> T {
    lit::<T>(5.0) * T::PI() - T::one()
}

/// Checks 1 + guard ≤ γ ≤ 3 − guard.
pub fn validate_gamma<T: Real>(gamma: T) -> Result<()> {
    let lo = lit::<T>(1.0 + GAMMA_GUARD);
    let hi = lit::<T>(3.0 - GAMMA_GUARD);
    if !(gamma >= lo && gamma <= hi) {
        return Err(Error::domain(format!(
            "gradient exponent must lie in [{}, {}], got {gamma}",
            1.0 + GAMMA_GUARD,
            3.0 - GAMMA_GUARD
        )));
    }
    Ok(())
}

/// The exponent pair (γ, ε) of a member of the bound family, together with
/// the derived exponents α = (3 − γ)/(2γ) and δ = γ/(γ − 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParameters<T> {
    gamma: T,
    epsilon: T,
    alpha: T,
    delta: T,
}

impl<T: Real> BoundParameters<T> {
    /// Validates (γ, ε) and derives α and δ.
    pub fn new(gamma: T, epsilon: T) -> Result<Self> {
        validate_gamma(gamma)?;
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::domain(format!("slack ε must be positive, got {epsilon}")));
        }
        let alpha = (lit::<T>(3.0) - gamma) / (lit::<T>(2.0) * gamma);
        let delta = gamma / (gamma - T::one());
        Ok(Self {
            gamma,
            epsilon,
            alpha,
            delta,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Hölder conjugate of γ.
    pub fn delta(&self) -> T {
        self.delta
    }

    /// C(γ).
    pub fn c_gamma(&self) -> T {
        sharp_constant_unchecked(self.gamma)
    }

    /// C(δ). For γ ≤ 2 this is exactly 1 because δ ≥ 2.
    pub fn c_delta(&self) -> T {
        sharp_constant_unchecked(self.delta)
    }

    /// Same γ with a different slack.
    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        Self::new(self.gamma, epsilon)
    }
}

/// See [`BoundParameters::new`].
pub fn derive_parameters<T: Real>(gamma: T, epsilon: T) -> Result<BoundParameters<T>> {
    BoundParameters::new(gamma, epsilon)
}

/// Coefficient of ∫ρ^{3/2}: b̃² = β(1 + ε). Does not depend on γ.
pub fn b_tilde_squared<T: Real>(epsilon: T) -> Result<T> {
    if !(epsilon >= T::zero()) || !epsilon.is_finite() {
        return Err(Error::domain(format!("slack ε must be nonnegative, got {epsilon}")));
    }
    Ok(beta::<T>() * (T::one() + epsilon))
}

/// Coefficient of ∫|∇ρ^α|^γ:
/// ã² = 2^γ C(γ)/(3 − γ) · [ (γ − 1)/(β ε (3 − γ)) · C(δ) ]^{γ−1}.
pub fn a_tilde_squared<T: Real>(params: &BoundParameters<T>) -> T {
    let g = params.gamma;
    let three_minus = lit::<T>(3.0) - g;
    let inner = (g - T::one()) / (beta::<T>() * params.epsilon * three_minus) * params.c_delta();
    lit::<T>(2.0).powf(g) * params.c_gamma() / three_minus * inner.powf(g - T::one())
}

/// Both coefficients of the bound for one (γ, ε).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremConstants<T> {
    pub params: BoundParameters<T>,
    pub b_tilde_sq: T,
    pub a_tilde_sq: T,
}

impl<T: Real> TheoremConstants<T> {
    pub fn new(params: BoundParameters<T>) -> Self {
        Self {
            params,
            b_tilde_sq: beta::<T>() * (T::one() + params.epsilon),
            a_tilde_sq: a_tilde_squared(&params),
        }
    }

    pub fn for_exponents(gamma: T, epsilon: T) -> Result<Self> {
        Ok(Self::new(BoundParameters::new(gamma, epsilon)?))
    }
}

/// Gradient coupling a recovered from ã² = a^γ C(γ)/(2αγ).
pub fn a_from_a_tilde<T: Real>(a_tilde_sq: T, params: &BoundParameters<T>) -> Result<T> {
    if !(a_tilde_sq > T::zero()) || !a_tilde_sq.is_finite() {
        return Err(Error::domain(format!("ã² must be positive, got {a_tilde_sq}")));
    }
    let two_alpha_gamma = lit::<T>(2.0) * params.alpha * params.gamma;
    Ok((two_alpha_gamma * a_tilde_sq / params.c_gamma()).powf(params.gamma.recip()))
}

/// Forward map a ↦ ã² = a^γ C(γ)/(2αγ).
pub fn a_tilde_from_a<T: Real>(a: T, params: &BoundParameters<T>) -> T {
    a.powf(params.gamma) * params.c_gamma() / (lit::<T>(2.0) * params.alpha * params.gamma)
}

/// Couplings entering the molecular stability estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityInputs<T> {
    /// Coupling of the gradient term.
    pub a: T,
    /// b₁ = √(σ b̃²), the part of b̃ left for the ρ^{3/2} term.
    pub b1: T,
    pub b2: T,
    /// Nuclear charge.
    pub z: T,
}

impl<T: Real> StabilityInputs<T> {
    pub fn new(a: T, b1: T, b2: T, z: T) -> Result<Self> {
        for (name, v) in [("a", a), ("b1", b1), ("b2", b2), ("z", z)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { a, b1, b2, z })
    }

    /// Splits (ã², b̃²) for charge z with b₂ = 2z/a, the smallest value
    /// allowed by z ≤ a b₂/2, and b₁² = b̃² − b₂^δ C(δ)/(2αδ).
    pub fn from_tilde(params: &BoundParameters<T>, a_tilde_sq: T, b_tilde_sq: T, z: T) -> Result<Self> {
        let a = a_from_a_tilde(a_tilde_sq, params)?;
        let b2 = lit::<T>(2.0) * z / a;
        let b2_part = b2.powf(params.delta) * params.c_delta() / (lit::<T>(2.0) * params.alpha * params.delta);
        let b1_sq = b_tilde_sq - b2_part;
        if !(b1_sq > T::zero()) {
            return Err(Error::Precondition(format!(
                "charge z = {z} leaves no room for the ρ^(3/2) coupling (b₁² = {b1_sq})"
            )));
        }
        Self::new(a, b1_sq.sqrt(), b2, z)
    }

    /// Recomposes ã² = a^γ C(γ)/(2αγ).
    pub fn a_tilde_sq(&self, params: &BoundParameters<T>) -> T {
        a_tilde_from_a(self.a, params)
    }

    /// Recomposes b̃² = b₂^δ C(δ)/(2αδ) + b₁².
    pub fn b_tilde_sq(&self, params: &BoundParameters<T>) -> T {
        self.b2.powf(params.delta) * params.c_delta() / (lit::<T>(2.0) * params.alpha * params.delta)
            + self.b1 * self.b1
    }

    /// σ = b₁²/b̃².
    pub fn sigma(&self, params: &BoundParameters<T>) -> T {
        self.b1 * self.b1 / self.b_tilde_sq(params)
    }
}

/// The two monotone branches whose pointwise minimum is h(σ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeThreshold<T> {
    gamma: T,
    a: T,
    b_tilde_sq: T,
}

impl<T: Real> ChargeThreshold<T> {
    pub fn new(gamma: T, a: T, b_tilde_sq: T) -> Result<Self> {
        validate_gamma(gamma)?;
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::domain(format!("a must be positive, got {a}")));
        }
        if !(b_tilde_sq > T::zero()) || !b_tilde_sq.is_finite() {
            return Err(Error::domain(format!("b̃² must be positive, got {b_tilde_sq}")));
        }
        Ok(Self { gamma, a, b_tilde_sq })
    }

    /// (a/2)·[ b̃² (3 − γ)/(γ − 1) C(γ/(γ−1))⁻¹ (1 − σ) ]^{(γ−1)/γ}; decreasing in σ.
    pub fn gradient_branch(&self, sigma: T) -> T {
        let g = self.gamma;
        let c_delta = sharp_constant_unchecked(g / (g - T::one()));
        let base = self.b_tilde_sq * (lit::<T>(3.0) - g) / (g - T::one()) / c_delta * (T::one() - sigma);
        self.a * lit(0.5) * base.max(T::zero()).powf((g - T::one()) / g)
    }

    /// (27/64)·(b̃²)²/(5π − 1)·σ²; increasing in σ.
    pub fn leading_branch(&self, sigma: T) -> T {
        lit::<T>(27.0 / 64.0) * self.b_tilde_sq * self.b_tilde_sq / five_pi_minus_one::<T>() * sigma * sigma
    }

    pub fn h(&self, sigma: T) -> Result<T> {
        if !(sigma > T::zero() && sigma < T::one()) {
            return Err(Error::domain(format!("σ must lie in (0, 1), got {sigma}")));
        }
        Ok(self.gradient_branch(sigma).min(self.leading_branch(sigma)))
    }

    /// Crossing of the two branches, located by bisection; this is the
    /// maximizer of h on (0, 1).
    pub fn maximize(&self) -> HMaximum<T> {
        let tol = lit::<T>(SIGMA_TOLERANCE);
        let (mut lo, mut hi) = (T::zero(), T::one());
        let diff = |s: T| self.gradient_branch(s) - self.leading_branch(s);
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                break;
            }
            if diff(mid) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let sigma_star = (lo + hi) * lit(0.5);
        let g = self.gradient_branch(sigma_star);
        let l = self.leading_branch(sigma_star);
        HMaximum {
            sigma_star,
            h_max: g.min(l),
            branch_gap: (g - l).abs(),
        }
    }
}

/// Result of [`maximize_h`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HMaximum<T> {
    pub sigma_star: T,
    pub h_max: T,
    /// |gradient branch − leading branch| at σ*.
    pub branch_gap: T,
}

/// h(σ) = min(gradient branch, leading branch).
pub fn h_of_sigma<T: Real>(sigma: T, gamma: T, a: T, b_tilde_sq: T) -> Result<T> {
    ChargeThreshold::new(gamma, a, b_tilde_sq)?.h(sigma)
}

/// Largest admissible nuclear charge max_σ h(σ) and its maximizer.
pub fn maximize_h<T: Real>(gamma: T, a: T, b_tilde_sq: T) -> Result<HMaximum<T>> {
    let threshold = ChargeThreshold::new(gamma, a, b_tilde_sq)?;
    let max = threshold.maximize();
    log::trace!(
        "h maximum at sigma = {} (h = {})",
        to_f64(max.sigma_star),
        to_f64(max.h_max)
    );
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn sharp_constant_examples() {
        assert_eq!(sharp_constant(2.0_f64).unwrap(), 1.0);
        assert_relative_eq!(sharp_constant(1.0_f64).unwrap(), SQRT2, max_relative = 1e-15);
        assert_eq!(sharp_constant(3.0_f64).unwrap(), 1.0);
        assert_relative_eq!(sharp_constant(0.5_f64).unwrap(), 2f64.powf(0.75), max_relative = 1e-15);
        assert_relative_eq!(sharp_constant(0.5_f64).unwrap(), 1.681_792_830_507_429, max_relative = 1e-14);
        assert!(sharp_constant(0.0_f64).is_err());
        assert!(sharp_constant(-1.0_f64).is_err());
        assert!(sharp_constant(f64::NAN).is_err());
    }

    #[test]
    fn sharp_constant_is_continuous_at_two() {
        let below = sharp_constant(2.0_f64 - 1e-12).unwrap();
        assert!((below - 1.0).abs() < 1e-12);
        assert!(sharp_constant(1e-9_f64).unwrap() < 2.0);
        assert_relative_eq!(sharp_constant(1e-9_f64).unwrap(), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn derive_parameters_examples() {
        let p = derive_parameters(2.0_f64, 0.1).unwrap();
        assert_relative_eq!(p.alpha(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(p.delta(), 2.0, max_relative = 1e-15);
        let p = derive_parameters(1.5_f64, 1.0).unwrap();
        assert_relative_eq!(p.alpha(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(p.delta(), 3.0, max_relative = 1e-15);
        let p = derive_parameters(2.5_f64, 0.5).unwrap();
        assert_relative_eq!(p.alpha(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(p.delta(), 5.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(1.0 / p.gamma() + 1.0 / p.delta(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn derive_parameters_rejects_out_of_range() {
        assert!(derive_parameters(1.0_f64, 0.1).is_err());
        assert!(derive_parameters(3.0_f64, 0.1).is_err());
        assert!(derive_parameters(1.0 + 1e-7_f64, 0.1).is_err());
        assert!(derive_parameters(3.0 - 1e-7_f64, 0.1).is_err());
        assert!(derive_parameters(1.0 + 1e-6_f64, 0.1).is_ok());
        assert!(derive_parameters(2.0_f64, 0.0).is_err());
        assert!(derive_parameters(2.0_f64, -1.0).is_err());
        assert!(derive_parameters(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn beta_value() {
        assert!((beta::<f64>() - 5.9045).abs() <= 1e-4);
        // mpmath, 40 digits: 5.904516943734008283105392770066330874247
        assert_relative_eq!(beta::<f64>(), 5.904_516_943_734_008, max_relative = 1e-15);
        // (4/3)^{3/2} alone, mpmath: 1.539600717839002038691063414671886548394
        assert_relative_eq!((4.0_f64 / 3.0).powf(1.5), 1.539_600_717_839_002, max_relative = 1e-15);
        assert_eq!(b_tilde_squared(0.0_f64).unwrap(), beta::<f64>());
        assert_relative_eq!(beta::<f32>(), 5.904_517, max_relative = 1e-6);
    }

    #[test]
    fn b_tilde_examples() {
        let b = beta::<f64>();
        assert_relative_eq!(b_tilde_squared(0.1_f64).unwrap(), 1.1 * b, max_relative = 1e-15);
        assert_relative_eq!(b_tilde_squared(1.0_f64).unwrap(), 2.0 * b, max_relative = 1e-15);
        // mpmath: 2β = 11.80903388746801656621078554013266174849
        assert_relative_eq!(b_tilde_squared(1.0_f64).unwrap(), 11.809_033_887_468_017, max_relative = 1e-15);
        assert!(b_tilde_squared(-0.1_f64).is_err());
    }

    #[test]
    fn a_tilde_reduces_to_two_dimensional_gradient_coefficient() {
        let b = beta::<f64>();
        for eps in [0.01, 0.1, 1.0, 10.0] {
            let p = derive_parameters(2.0, eps).unwrap();
            assert_relative_eq!(a_tilde_squared(&p) * b * eps, 4.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn a_tilde_near_gamma_one() {
        // mpmath, 40 digits
        let p = derive_parameters(1.001_f64, 0.37).unwrap();
        assert_relative_eq!(a_tilde_squared(&p), 1.403_597_272_081_024_3, max_relative = 1e-12);
        let lo = a_tilde_squared(&derive_parameters(1.001_f64, 0.1).unwrap());
        let hi = a_tilde_squared(&derive_parameters(1.001_f64, 10.0).unwrap());
        assert!((lo - hi).abs() < 1e-2);
        // closer to √2 as γ → 1⁺
        let near = a_tilde_squared(&derive_parameters(1.0001_f64, 0.37).unwrap());
        assert!((near - SQRT2).abs() < (a_tilde_squared(&p) - SQRT2).abs());
        let nearer = a_tilde_squared(&derive_parameters(1.0 + 1e-6_f64, 0.37).unwrap());
        assert!((nearer - SQRT2).abs() < 5e-5);
    }

    #[test]
    fn proof_form_of_gradient_constant_agrees() {
        // (3/4)^{3/2}(5π−1)^{−1/2} = 1/β
        let inv = 0.75_f64.powf(1.5) / five_pi_minus_one::<f64>().sqrt();
        assert_relative_eq!(inv * beta::<f64>(), 1.0, max_relative = 1e-14);
        for (g, e) in [(1.3_f64, 0.2), (2.0, 1.0), (2.7, 5.0)] {
            let p = derive_parameters(g, e).unwrap();
            let proof_form = 2f64.powf(g) * p.c_gamma() / (3.0 - g)
                * (inv / e * (g - 1.0) / (3.0 - g) * p.c_delta()).powf(g - 1.0);
            assert_relative_eq!(a_tilde_squared(&p), proof_form, max_relative = 1e-13);
        }
    }

    #[test]
    fn c_delta_is_one_for_gamma_at_most_two() {
        for g in [1.0 + 1e-6, 1.001, 1.5, 2.0] {
            assert_eq!(derive_parameters(g, 1.0).unwrap().c_delta(), 1.0);
        }
        let p = derive_parameters(2.5_f64, 1.0).unwrap();
        assert_relative_eq!(p.c_delta(), 2f64.powf(1.0 - 5.0 / 6.0), max_relative = 1e-15);
    }

    #[test]
    fn h_limits_and_domain() {
        let t = ChargeThreshold::new(2.0_f64, 1.0, beta()).unwrap();
        assert!(t.h(1e-9).unwrap() < 1e-15);
        assert!(t.h(1.0 - 1e-12).unwrap() < 1e-5);
        assert!(t.h(0.0).is_err());
        assert!(t.h(1.0).is_err());
        assert!(h_of_sigma(0.5_f64, 2.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn h_at_half() {
        // mpmath: gradient branch 0.8591068722613916, leading branch 0.25
        let t = ChargeThreshold::new(2.0_f64, 1.0, beta()).unwrap();
        assert_relative_eq!(t.gradient_branch(0.5), 0.859_106_872_261_391_6, max_relative = 1e-13);
        assert_relative_eq!(t.leading_branch(0.5), 0.25, max_relative = 1e-13);
        assert_relative_eq!(h_of_sigma(0.5_f64, 2.0, 1.0, beta()).unwrap(), 0.25, max_relative = 1e-13);
    }

    #[test]
    fn maximize_h_is_crossing_and_dominates_grid() {
        for (g, a, b) in [(2.0_f64, 1.0, beta::<f64>()), (1.4, 0.3, 12.0), (2.8, 3.0, 2.0)] {
            let max = maximize_h(g, a, b).unwrap();
            assert!(max.branch_gap <= 1e-9 * max.h_max, "{max:?}");
            for i in 1..100 {
                let s = i as f64 / 100.0;
                assert!(max.h_max >= h_of_sigma(s, g, a, b).unwrap() - 1e-15);
            }
        }
    }

    #[test]
    fn theorem_constants_saturate_at_unit_charge() {
        for (g, e) in [(2.0_f64, 0.5), (1.5, 1.0), (2.5, 0.25), (2.2, 0.1)] {
            let k = TheoremConstants::for_exponents(g, e).unwrap();
            let a = a_from_a_tilde(k.a_tilde_sq, &k.params).unwrap();
            let max = maximize_h(g, a, k.b_tilde_sq).unwrap();
            assert!((max.sigma_star - 1.0 / (1.0 + e)).abs() <= 1e-9, "{g} {e} {max:?}");
            assert!((max.h_max - 1.0).abs() <= 1e-9, "{g} {e} {max:?}");
        }
    }

    #[test]
    fn a_from_a_tilde_examples() {
        let p = derive_parameters(2.0_f64, 1.0).unwrap();
        assert_relative_eq!(a_from_a_tilde(3.0, &p).unwrap(), 3f64.sqrt(), max_relative = 1e-15);
        let p = derive_parameters(1.5_f64, 1.0).unwrap();
        // mpmath: 1.470841376716440002082580518045637439816
        assert_relative_eq!(a_from_a_tilde(SQRT2, &p).unwrap(), 1.470_841_376_716_44, max_relative = 1e-13);
        for x in [1e-3, 0.7, 42.0] {
            let a = a_from_a_tilde(x, &p).unwrap();
            assert_relative_eq!(a_tilde_from_a(a, &p), x, max_relative = 1e-12);
        }
        assert!(a_from_a_tilde(0.0, &p).is_err());
        assert!(a_from_a_tilde(-2.0, &p).is_err());
    }

    #[test]
    fn stability_inputs_compose_tilde_constants() {
        let k = TheoremConstants::for_exponents(1.7_f64, 0.8).unwrap();
        let inputs = StabilityInputs::from_tilde(&k.params, k.a_tilde_sq, k.b_tilde_sq, 0.6).unwrap();
        assert_relative_eq!(inputs.a_tilde_sq(&k.params), k.a_tilde_sq, max_relative = 1e-12);
        assert_relative_eq!(inputs.b_tilde_sq(&k.params), k.b_tilde_sq, max_relative = 1e-12);
        assert_relative_eq!(inputs.a * inputs.b2 / 2.0, 0.6, max_relative = 1e-14);
        // at z = z_max the split lands on σ* = 1/(1+ε)
        let at_max = StabilityInputs::from_tilde(&k.params, k.a_tilde_sq, k.b_tilde_sq, 1.0).unwrap();
        assert_relative_eq!(at_max.sigma(&k.params), 1.0 / 1.8, max_relative = 1e-10);
        assert!(StabilityInputs::new(0.0_f64, 1.0, 1.0, 1.0).is_err());
    }
}
