//! Nonnegative densities on the plane and the two local functionals of the
//! bound: L(ρ) = ∫ρ^{3/2} and G(ρ) = ∫|∇ρ^α|^γ.
//!
//! Radial profiles are integrated as 2π∫ f(r) r dr on [0, R_cut]. Finite
//! mixtures whose components do not share a center are integrated over a
//! bounding rectangle with an iterated adaptive rule.

use serde::{Deserialize, Serialize};

use crate::bound_constants::{BoundParameters, TheoremConstants};
use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::{integrate_panels, integrate_rectangle, Estimate, Tolerance};
use crate::scalar::{lit, to_f64, Real};
use crate::special::gamma;

/// Integrands are truncated where ρ^p has fallen below this fraction of its
/// peak.
const CUTOFF_FRACTION: f64 = 1e-22;

/// Relative target for the radial functionals.
pub const RADIAL_TOLERANCE: Tolerance = Tolerance::relative(1e-11);

/// Relative target for the iterated planar integrals of non-concentric
/// mixtures.
pub const PLANAR_TOLERANCE: Tolerance = Tolerance::relative(1e-9);

pub type Point<T> = [T; 2];

/// Behaviour of a tabulated profile beyond its last radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailModel {
    /// ρ vanishes beyond the table; the last tabulated value must be 0.
    Zero,
    /// ρ continues as ρ_n·e^{−k(r − r_n)} with k from the last two nodes.
    Exponential,
}

/// Radial profile given on a grid, interpolated monotone-cubically.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRadial<T> {
    interp: MonotoneCubic<T>,
    tail: TailModel,
    tail_rate: T,
}

impl<T: Real> TabulatedRadial<T> {
    pub fn new(radii: Vec<T>, values: Vec<T>, tail: TailModel) -> Result<Self> {
        if radii.first().copied() != Some(T::zero()) {
            return Err(Error::InvalidDescriptor("tabulated radii must start at r = 0".into()));
        }
        if values.iter().any(|v| !(*v >= T::zero())) {
            return Err(Error::InvalidDescriptor("tabulated density must be nonnegative".into()));
        }
        let interp = MonotoneCubic::new(radii, values)?;
        let n = interp.nodes().len();
        let (r, rho) = (interp.nodes(), interp.values());
        let tail_rate = match tail {
            TailModel::Zero => {
                if rho[n - 1] != T::zero() {
                    return Err(Error::InvalidDescriptor(
                        "zero tail requires the last tabulated value to be 0".into(),
                    ));
                }
                T::zero()
            }
            TailModel::Exponential => {
                let (r0, r1, v0, v1) = (r[n - 2], r[n - 1], rho[n - 2], rho[n - 1]);
                if !(v1 > T::zero() && v0 > v1) {
                    return Err(Error::InvalidDescriptor(
                        "exponential tail requires the last two values positive and decreasing".into(),
                    ));
                }
                (v0 / v1).ln() / (r1 - r0)
            }
        };
        Ok(Self {
            interp,
            tail,
            tail_rate,
        })
    }

    pub fn radii(&self) -> &[T] {
        self.interp.nodes()
    }

    pub fn values(&self) -> &[T] {
        self.interp.values()
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    fn last_radius(&self) -> T {
        *self.radii().last().expect("table is nonempty")
    }

    fn last_value(&self) -> T {
        *self.values().last().expect("table is nonempty")
    }

    fn value(&self, r: T) -> T {
        if r <= self.last_radius() {
            self.interp.eval(r).max(T::zero())
        } else {
            match self.tail {
                TailModel::Zero => T::zero(),
                TailModel::Exponential => self.last_value() * (-self.tail_rate * (r - self.last_radius())).exp(),
            }
        }
    }

    fn derivative(&self, r: T) -> T {
        if r <= self.last_radius() {
            self.interp.derivative(r)
        } else {
            match self.tail {
                TailModel::Zero => T::zero(),
                TailModel::Exponential => -self.tail_rate * self.value(r),
            }
        }
    }

    fn scaled(&self, lambda: T) -> Self {
        let l2 = lambda * lambda;
        let radii = self.radii().iter().map(|&r| r / lambda).collect();
        let values = self.values().iter().map(|&v| v * l2).collect();
        let interp = MonotoneCubic::new(radii, values).expect("scaling keeps the table valid");
        Self {
            interp,
            tail: self.tail,
            tail_rate: self.tail_rate * lambda,
        }
    }

    /// Monotone cubic through (r_i, ρ_i^α), used for the gradient functional.
    fn power_interpolant(&self, alpha: T) -> MonotoneCubic<T> {
        let values = self.values().iter().map(|&v| v.powf(alpha)).collect();
        MonotoneCubic::new(self.radii().to_vec(), values).expect("table already validated")
    }
}

/// One Gaussian term C·e^{−A|x − c|²} of a finite mixture; `offset` is
/// relative to the profile center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent<T> {
    pub amplitude: T,
    pub width: T,
    pub offset: Point<T>,
}

impl<T: Real> GaussianComponent<T> {
    pub fn mass(&self) -> T {
        self.amplitude * T::PI() / self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind<T> {
    /// C·e^{−A r²}
    Gaussian { amplitude: T, width: T },
    /// C·e^{−B r}
    Exponential { amplitude: T, decay: T },
    Tabulated(TabulatedRadial<T>),
    Mixture(Vec<GaussianComponent<T>>),
}

/// A nonnegative density on ℝ².
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile<T> {
    kind: ProfileKind<T>,
    center: Point<T>,
}

fn check_nonneg<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v >= T::zero()) || !v.is_finite() {
        return Err(Error::InvalidDescriptor(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

fn check_pos<T: Real>(name: &str, v: T) -> Result<()> {
    if !(v > T::zero()) || !v.is_finite() {
        return Err(Error::InvalidDescriptor(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

impl<T: Real> DensityProfile<T> {
    /// C·e^{−A|x − center|²}. An amplitude of zero gives the zero density.
    pub fn gaussian(amplitude: T, width: T, center: Point<T>) -> Result<Self> {
        check_nonneg("amplitude C", amplitude)?;
        check_pos("width A", width)?;
        Ok(Self {
            kind: ProfileKind::Gaussian { amplitude, width },
            center,
        })
    }

    /// Gaussian of total mass `mass`: C = mass·A/π.
    pub fn normalized_gaussian(mass: T, width: T, center: Point<T>) -> Result<Self> {
        check_nonneg("mass", mass)?;
        check_pos("width A", width)?;
        Self::gaussian(mass * width / T::PI(), width, center)
    }

    /// C·e^{−B|x − center|}.
    pub fn exponential(amplitude: T, decay: T, center: Point<T>) -> Result<Self> {
        check_nonneg("amplitude C", amplitude)?;
        check_pos("decay B", decay)?;
        Ok(Self {
            kind: ProfileKind::Exponential { amplitude, decay },
            center,
        })
    }

    pub fn tabulated(table: TabulatedRadial<T>, center: Point<T>) -> Self {
        Self {
            kind: ProfileKind::Tabulated(table),
            center,
        }
    }

    /// Σ_k C_k e^{−A_k|x − center − c_k|²}. Zero-amplitude terms are dropped.
    pub fn mixture(components: Vec<GaussianComponent<T>>, center: Point<T>) -> Result<Self> {
        for c in &components {
            check_nonneg("component amplitude", c.amplitude)?;
            check_pos("component width", c.width)?;
            if !c.offset.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidDescriptor("component center must be finite".into()));
            }
        }
        let components = components.into_iter().filter(|c| c.amplitude > T::zero()).collect();
        Ok(Self {
            kind: ProfileKind::Mixture(components),
            center,
        })
    }

    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Mixture(Vec::new()),
            center: [T::zero(), T::zero()],
        }
    }

    pub fn kind(&self) -> &ProfileKind<T> {
        &self.kind
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }

    /// Same profile translated to `center`.
    pub fn with_center(mut self, center: Point<T>) -> Self {
        self.center = center;
        self
    }

    /// True for the identically vanishing density.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, .. } | ProfileKind::Exponential { amplitude, .. } => {
                *amplitude == T::zero()
            }
            ProfileKind::Tabulated(t) => t.values().iter().all(|v| *v == T::zero()),
            ProfileKind::Mixture(c) => c.is_empty(),
        }
    }

    /// Center of radial symmetry, if the profile has one.
    pub fn radial_center(&self) -> Option<Point<T>> {
        match &self.kind {
            ProfileKind::Mixture(components) => {
                let first = components.first().map(|c| c.offset).unwrap_or([T::zero(), T::zero()]);
                if components.iter().all(|c| c.offset == first) {
                    Some([self.center[0] + first[0], self.center[1] + first[1]])
                } else {
                    None
                }
            }
            _ => Some(self.center),
        }
    }

    pub fn is_radial(&self) -> bool {
        self.radial_center().is_some()
    }

    /// ln ρ at squared distances `d2_k` from each mixture component, together
    /// with the softmax weights of the components.
    fn mixture_log_weights(components: &[GaussianComponent<T>], d2: impl Fn(usize) -> T) -> (T, Vec<T>) {
        let logs: Vec<T> = components
            .iter()
            .enumerate()
            .map(|(k, c)| c.amplitude.ln() - c.width * d2(k))
            .collect();
        let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
        if !max.is_finite() {
            return (T::neg_infinity(), vec![T::zero(); components.len()]);
        }
        let exps: Vec<T> = logs.iter().map(|&l| (l - max).exp()).collect();
        let sum: T = exps.iter().copied().sum();
        (max + sum.ln(), exps.into_iter().map(|e| e / sum).collect())
    }

    /// ρ at distance `r` from the radial center. Only meaningful for radial
    /// profiles.
    pub fn radial_value(&self, r: T) -> T {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => *amplitude * (-*width * r * r).exp(),
            ProfileKind::Exponential { amplitude, decay } => *amplitude * (-*decay * r).exp(),
            ProfileKind::Tabulated(t) => t.value(r),
            ProfileKind::Mixture(components) => components
                .iter()
                .map(|c| c.amplitude * (-c.width * r * r).exp())
                .sum(),
        }
    }

    /// dρ/dr for radial profiles.
    pub fn radial_derivative(&self, r: T) -> T {
        let two = lit::<T>(2.0);
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => -two * *width * r * *amplitude * (-*width * r * r).exp(),
            ProfileKind::Exponential { amplitude, decay } => -*decay * *amplitude * (-*decay * r).exp(),
            ProfileKind::Tabulated(t) => t.derivative(r),
            ProfileKind::Mixture(components) => components
                .iter()
                .map(|c| -two * c.width * r * c.amplitude * (-c.width * r * r).exp())
                .sum(),
        }
    }

    /// d(ρ^α)/dr for radial profiles, evaluated without forming ρ^{α−1}
    /// where ρ may underflow. Tabulated profiles use `power_table`, the
    /// monotone cubic through (r_i, ρ_i^α).
    fn radial_power_derivative(&self, r: T, alpha: T, power_table: Option<&MonotoneCubic<T>>) -> T {
        let two = lit::<T>(2.0);
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => {
                if *amplitude == T::zero() {
                    return T::zero();
                }
                -two * alpha * *width * r * amplitude.powf(alpha) * (-alpha * *width * r * r).exp()
            }
            ProfileKind::Exponential { amplitude, decay } => {
                if *amplitude == T::zero() {
                    return T::zero();
                }
                -alpha * *decay * amplitude.powf(alpha) * (-alpha * *decay * r).exp()
            }
            ProfileKind::Tabulated(t) => {
                if r <= t.last_radius() {
                    power_table.expect("power table supplied for tabulated profile").derivative(r)
                } else {
                    match t.tail {
                        TailModel::Zero => T::zero(),
                        TailModel::Exponential => {
                            -alpha * t.tail_rate * t.last_value().powf(alpha)
                                * (-alpha * t.tail_rate * (r - t.last_radius())).exp()
                        }
                    }
                }
            }
            ProfileKind::Mixture(components) => {
                if components.is_empty() {
                    return T::zero();
                }
                let (log_rho, w) = Self::mixture_log_weights(components, |_| r * r);
                let log_ratio: T = components
                    .iter()
                    .zip(&w)
                    .map(|(c, &wk)| -two * c.width * r * wk)
                    .sum();
                alpha * (alpha * log_rho).exp() * log_ratio
            }
        }
    }

    /// d(ρ^α)/dr as a closure; radial profiles only.
    pub(crate) fn power_derivative_fn(&self, alpha: T) -> impl Fn(T) -> T + '_ {
        let table = match &self.kind {
            ProfileKind::Tabulated(t) => Some(t.power_interpolant(alpha)),
            _ => None,
        };
        move |r| self.radial_power_derivative(r, alpha, table.as_ref())
    }

    /// Gaussian terms with absolute centers, for the Gaussian and mixture
    /// kinds.
    pub fn gaussian_terms(&self) -> Option<Vec<GaussianComponent<T>>> {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => Some(if *amplitude > T::zero() {
                vec![GaussianComponent {
                    amplitude: *amplitude,
                    width: *width,
                    offset: self.center,
                }]
            } else {
                Vec::new()
            }),
            ProfileKind::Mixture(components) => Some(
                components
                    .iter()
                    .map(|c| GaussianComponent {
                        offset: [self.center[0] + c.offset[0], self.center[1] + c.offset[1]],
                        ..*c
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// ρ(x) at an arbitrary point.
    pub fn value_at(&self, x: Point<T>) -> T {
        match (&self.kind, self.radial_center()) {
            (ProfileKind::Mixture(components), None) => components
                .iter()
                .map(|c| {
                    let dx = x[0] - self.center[0] - c.offset[0];
                    let dy = x[1] - self.center[1] - c.offset[1];
                    c.amplitude * (-c.width * (dx * dx + dy * dy)).exp()
                })
                .sum(),
            (_, Some(c)) => self.radial_value((x[0] - c[0]).hypot(x[1] - c[1])),
            (_, None) => unreachable!("only mixtures can be non-radial"),
        }
    }

    /// |∇ρ^α|(x) for a non-concentric mixture.
    fn mixture_power_gradient_norm(&self, components: &[GaussianComponent<T>], x: Point<T>, alpha: T) -> T {
        let delta = |k: usize| {
            let c = &components[k];
            [
                x[0] - self.center[0] - c.offset[0],
                x[1] - self.center[1] - c.offset[1],
            ]
        };
        let (log_rho, w) = Self::mixture_log_weights(components, |k| {
            let d = delta(k);
            d[0] * d[0] + d[1] * d[1]
        });
        if !log_rho.is_finite() {
            return T::zero();
        }
        let two = lit::<T>(2.0);
        let (mut gx, mut gy) = (T::zero(), T::zero());
        for (k, c) in components.iter().enumerate() {
            let d = delta(k);
            gx = gx - two * c.width * d[0] * w[k];
            gy = gy - two * c.width * d[1] * w[k];
        }
        alpha * (alpha * log_rho).exp() * gx.hypot(gy)
    }

    /// Radius beyond which ρ^power has dropped below `CUTOFF_FRACTION` of its
    /// peak (measured from the radial center, or from the farthest component
    /// for mixtures).
    pub fn cutoff_radius(&self, power: T) -> T {
        let log_frac = -lit::<T>(CUTOFF_FRACTION).ln() / power;
        match &self.kind {
            ProfileKind::Gaussian { width, .. } => (log_frac / *width).sqrt(),
            ProfileKind::Exponential { decay, .. } => log_frac / *decay,
            ProfileKind::Tabulated(t) => match t.tail {
                TailModel::Zero => t.last_radius(),
                TailModel::Exponential => t.last_radius() + log_frac / t.tail_rate,
            },
            ProfileKind::Mixture(components) => {
                let radial = self.is_radial();
                components
                    .iter()
                    .map(|c| {
                        let reach = if radial { T::zero() } else { c.offset[0].hypot(c.offset[1]) };
                        reach + (log_frac / c.width).sqrt()
                    })
                    .fold(T::zero(), T::max)
            }
        }
    }

    /// Breakpoints for radial integration on [0, R_cut].
    pub(crate) fn radial_breakpoints(&self, power: T) -> Vec<T> {
        let cut = self.cutoff_radius(power);
        let mut pts = vec![T::zero()];
        match &self.kind {
            ProfileKind::Tabulated(t) => {
                pts.extend(t.radii().iter().copied().skip(1));
                if cut > t.last_radius() {
                    pts.push(cut);
                }
            }
            _ => {
                // a first panel near the bulk helps the adaptive scheme
                pts.push(cut * lit(0.125));
                pts.push(cut);
            }
        }
        pts
    }

    /// 2π∫₀^∞ f(r) r dr over the radial support.
    fn radial_integral(&self, power: T, f: impl Fn(T) -> T, tol: Tolerance) -> Result<Estimate<T>> {
        let pts = self.radial_breakpoints(power);
        let est = integrate_panels(|r| f(r) * r, &pts, tol)?;
        Ok(est.scaled(lit::<T>(2.0) * T::PI()))
    }

    /// Bounding rectangle breakpoints for a non-concentric mixture.
    fn planar_breakpoints(&self, components: &[GaussianComponent<T>], power: T) -> (Vec<T>, Vec<T>) {
        let log_frac = -lit::<T>(CUTOFF_FRACTION).ln() / power;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for c in components {
            let reach = (log_frac / c.width).sqrt();
            let cx = self.center[0] + c.offset[0];
            let cy = self.center[1] + c.offset[1];
            xs.extend([cx - reach, cx, cx + reach]);
            ys.extend([cy - reach, cy, cy + reach]);
        }
        let tidy = |mut v: Vec<T>| {
            v.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
            v.dedup();
            v
        };
        (tidy(xs), tidy(ys))
    }

    fn planar_integral(
        &self,
        components: &[GaussianComponent<T>],
        power: T,
        scale_hint: T,
        f: impl Fn(Point<T>) -> T,
    ) -> Result<Estimate<T>> {
        let (xs, ys) = self.planar_breakpoints(components, power);
        let width = xs[xs.len() - 1] - xs[0];
        let inner_abs = to_f64(scale_hint / width) * PLANAR_TOLERANCE.rel * 1e-2;
        integrate_rectangle(|x, y| f([x, y]), &xs, &ys, PLANAR_TOLERANCE, inner_abs)
    }

    /// Total mass ∫ρ.
    pub fn mass(&self) -> Result<T> {
        match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => Ok(*amplitude * T::PI() / *width),
            ProfileKind::Exponential { amplitude, decay } => {
                Ok(lit::<T>(2.0) * T::PI() * *amplitude / (*decay * *decay))
            }
            ProfileKind::Mixture(c) => Ok(c.iter().map(GaussianComponent::mass).sum()),
            ProfileKind::Tabulated(t) => {
                let inner = integrate_panels(|r| t.value(r) * r, t.radii(), Tolerance::relative(1e-13))?;
                let tail = match t.tail {
                    TailModel::Zero => T::zero(),
                    TailModel::Exponential => {
                        let (rn, k) = (t.last_radius(), t.tail_rate);
                        t.last_value() * (rn / k + T::one() / (k * k))
                    }
                };
                Ok(lit::<T>(2.0) * T::PI() * (inner.value + tail))
            }
        }
    }

    /// L(ρ) = ∫ρ^{3/2}.
    pub fn evaluate_l(&self) -> Result<Estimate<T>> {
        if self.is_zero() {
            return Ok(Estimate::zero());
        }
        let p = lit::<T>(1.5);
        let est = match (&self.kind, self.radial_center()) {
            (ProfileKind::Mixture(components), None) => {
                let hint: T = components.iter().map(|c| gaussian_l(c.amplitude, c.width)).sum();
                self.planar_integral(components, p, hint, |x| self.value_at(x).powf(p))?
            }
            _ => self.radial_integral(p, |r| self.radial_value(r).powf(p), RADIAL_TOLERANCE)?,
        };
        finite_or_divergent(est, "L(ρ)")
    }

    /// G(ρ) = ∫|∇ρ^α|^γ.
    pub fn evaluate_g(&self, params: &BoundParameters<T>) -> Result<Estimate<T>> {
        if self.is_zero() {
            return Ok(Estimate::zero());
        }
        let (alpha, g) = (params.alpha(), params.gamma());
        // the integrand of G decays like ρ^{αγ}
        let decay_power = alpha * g;
        let est = match (&self.kind, self.radial_center()) {
            (ProfileKind::Mixture(components), None) => {
                let hint: T = components.iter().map(|c| gaussian_g(c.amplitude, c.width, params)).sum();
                self.planar_integral(components, decay_power, hint, |x| {
                    self.mixture_power_gradient_norm(components, x, alpha).powf(g)
                })?
            }
            (ProfileKind::Tabulated(t), _) => {
                let table = t.power_interpolant(alpha);
                self.radial_integral(
                    decay_power,
                    |r| self.radial_power_derivative(r, alpha, Some(&table)).abs().powf(g),
                    RADIAL_TOLERANCE,
                )?
            }
            _ => self.radial_integral(
                decay_power,
                |r| self.radial_power_derivative(r, alpha, None).abs().powf(g),
                RADIAL_TOLERANCE,
            )?,
        };
        finite_or_divergent(est, "G(ρ)")
    }

    /// Both functionals at once.
    pub fn evaluate(&self, params: &BoundParameters<T>) -> Result<FunctionalValue<T>> {
        let l = self.evaluate_l()?;
        let g = self.evaluate_g(params)?;
        Ok(FunctionalValue {
            l: l.value,
            g: g.value,
            gamma: params.gamma(),
            estimated_quadrature_error: l.abs_error + g.abs_error,
        })
    }

    /// ρ_λ(x) = λ²ρ(λx), which preserves the mass.
    pub fn scaled(&self, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(Error::domain(format!("scale factor must be positive, got {lambda}")));
        }
        let l2 = lambda * lambda;
        let kind = match &self.kind {
            ProfileKind::Gaussian { amplitude, width } => ProfileKind::Gaussian {
                amplitude: *amplitude * l2,
                width: *width * l2,
            },
            ProfileKind::Exponential { amplitude, decay } => ProfileKind::Exponential {
                amplitude: *amplitude * l2,
                decay: *decay * lambda,
            },
            ProfileKind::Tabulated(t) => ProfileKind::Tabulated(t.scaled(lambda)),
            ProfileKind::Mixture(components) => ProfileKind::Mixture(
                components
                    .iter()
                    .map(|c| GaussianComponent {
                        amplitude: c.amplitude * l2,
                        width: c.width * l2,
                        offset: [c.offset[0] / lambda, c.offset[1] / lambda],
                    })
                    .collect(),
            ),
        };
        Ok(Self {
            kind,
            center: [self.center[0] / lambda, self.center[1] / lambda],
        })
    }
}

fn finite_or_divergent<T: Real>(est: Estimate<T>, what: &str) -> Result<Estimate<T>> {
    if est.value.is_finite() && est.abs_error.is_finite() {
        Ok(est)
    } else {
        Err(Error::divergence(format!("{what} is not finite")))
    }
}

/// L and G of one profile with the quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue<T> {
    #[serde(rename = "L")]
    pub l: T,
    #[serde(rename = "G")]
    pub g: T,
    pub gamma: T,
    pub estimated_quadrature_error: T,
}

/// L(ρ) by quadrature.
pub fn evaluate_l<T: Real>(rho: &DensityProfile<T>) -> Result<Estimate<T>> {
    rho.evaluate_l()
}

/// G(ρ) by quadrature.
pub fn evaluate_g<T: Real>(rho: &DensityProfile<T>, params: &BoundParameters<T>) -> Result<Estimate<T>> {
    rho.evaluate_g(params)
}

/// ρ_λ(x) = λ²ρ(λx).
pub fn scale_density<T: Real>(rho: &DensityProfile<T>, lambda: T) -> Result<DensityProfile<T>> {
    rho.scaled(lambda)
}

/// K(ρ) = ã²G(ρ) + b̃²L(ρ); homogeneous of degree one under ρ ↦ ρ_λ.
pub fn kinetic_functional<T: Real>(
    rho: &DensityProfile<T>,
    params: &BoundParameters<T>,
    a_tilde_sq: T,
    b_tilde_sq: T,
) -> Result<T> {
    let g = rho.evaluate_g(params)?.value;
    let l = rho.evaluate_l()?.value;
    Ok(a_tilde_sq * g + b_tilde_sq * l)
}

/// [`kinetic_functional`] with the default coefficients.
pub fn kinetic_functional_with<T: Real>(rho: &DensityProfile<T>, constants: &TheoremConstants<T>) -> Result<T> {
    kinetic_functional(rho, &constants.params, constants.a_tilde_sq, constants.b_tilde_sq)
}

/// L for C·e^{−A r²}: C^{3/2}·2π/(3A).
pub fn gaussian_l<T: Real>(amplitude: T, width: T) -> T {
    amplitude.powf(lit(1.5)) * lit::<T>(2.0) * T::PI() / (lit::<T>(3.0) * width)
}

/// G for C·e^{−A r²}: C^{αγ}·π·2^γ·(Aα)^{γ/2−1}·Γ(1+γ/2)·γ^{−γ/2−1}.
pub fn gaussian_g<T: Real>(amplitude: T, width: T, params: &BoundParameters<T>) -> T {
    let (alpha, g) = (params.alpha(), params.gamma());
    let half_g = g * lit(0.5);
    amplitude.powf(alpha * g)
        * T::PI()
        * lit::<T>(2.0).powf(g)
        * (width * alpha).powf(half_g - T::one())
        * gamma(T::one() + half_g)
        * g.powf(-half_g - T::one())
}

/// G/L for the Gaussian of mass N (C = NA/π):
/// 3(√2/γ)^γ (π/N)^{γ/2} Γ(1+γ/2) (3−γ)^{γ/2−1}. Independent of A.
pub fn gaussian_g_over_l<T: Real>(mass: T, params: &BoundParameters<T>) -> Result<T> {
    if !(mass > T::zero()) || !mass.is_finite() {
        return Err(Error::domain(format!("particle number must be positive, got {mass}")));
    }
    let g = params.gamma();
    let half_g = g * lit(0.5);
    Ok(lit::<T>(3.0)
        * (T::SQRT_2() / g).powf(g)
        * (T::PI() / mass).powf(half_g)
        * gamma(T::one() + half_g)
        * (lit::<T>(3.0) - g).powf(half_g - T::one()))
}

/// JSON form of a density profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileDescriptor {
    Gaussian {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "A")]
        a: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Exponential {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Tabulated {
        r: Vec<f64>,
        rho: Vec<f64>,
        tail: TailModel,
        #[serde(default)]
        center: [f64; 2],
    },
    Mixture {
        components: Vec<ComponentDescriptor>,
        #[serde(default)]
        center: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDescriptor {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(default)]
    pub center: [f64; 2],
}

impl ProfileDescriptor {
    pub fn build<T: Real>(&self) -> Result<DensityProfile<T>> {
        let pt = |p: &[f64; 2]| [lit::<T>(p[0]), lit::<T>(p[1])];
        match self {
            ProfileDescriptor::Gaussian { c, a, center } => DensityProfile::gaussian(lit(*c), lit(*a), pt(center)),
            ProfileDescriptor::Exponential { c, b, center } => {
                DensityProfile::exponential(lit(*c), lit(*b), pt(center))
            }
            ProfileDescriptor::Tabulated { r, rho, tail, center } => {
                let table = TabulatedRadial::new(
                    r.iter().map(|&v| lit(v)).collect(),
                    rho.iter().map(|&v| lit(v)).collect(),
                    *tail,
                )?;
                Ok(DensityProfile::tabulated(table, pt(center)))
            }
            ProfileDescriptor::Mixture { components, center } => DensityProfile::mixture(
                components
                    .iter()
                    .map(|c| GaussianComponent {
                        amplitude: lit(c.c),
                        width: lit(c.a),
                        offset: pt(&c.center),
                    })
                    .collect(),
                pt(center),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(g: f64) -> BoundParameters<f64> {
        BoundParameters::new(g, 1.0).unwrap()
    }

    const ORIGIN: Point<f64> = [0.0, 0.0];

    #[test]
    fn gaussian_l_matches_closed_form() {
        for (c, a) in [(1.0, 1.0), (0.3, 5.0), (7.0, 0.02)] {
            let rho = DensityProfile::gaussian(c, a, ORIGIN).unwrap();
            let est = rho.evaluate_l().unwrap();
            assert_relative_eq!(est.value, gaussian_l(c, a), max_relative = 1e-10);
            assert!(est.abs_error <= 1e-10 * est.value);
        }
    }

    #[test]
    fn gaussian_g_matches_closed_form() {
        for g in [1.1, 1.5, 2.0, 2.5, 2.9] {
            for (c, a) in [(1.0, 1.0), (0.3, 5.0), (7.0, 0.02)] {
                let rho = DensityProfile::gaussian(c, a, ORIGIN).unwrap();
                let est = rho.evaluate_g(&params(g)).unwrap();
                assert_relative_eq!(est.value, gaussian_g(c, a, &params(g)), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn exponential_closed_forms() {
        // L = 2πC^{3/2}/(3B/2)²
        let (c, b) = (2.0, 1.5);
        let rho = DensityProfile::exponential(c, b, ORIGIN).unwrap();
        let l = rho.evaluate_l().unwrap().value;
        assert_relative_eq!(l, 2.0 * std::f64::consts::PI * c.powf(1.5) / (1.5 * b).powi(2), max_relative = 1e-10);
        // γ = 2, α = 1/4: |d ρ^α/dr|² = (αB)² C^{2α} e^{−2αBr}; ∫2πr(...) = 2π C^{2α}(αB)²/(2αB)² = π C^{1/2}/2
        let g = rho.evaluate_g(&params(2.0)).unwrap().value;
        assert_relative_eq!(g, std::f64::consts::PI * c.sqrt() / 2.0, max_relative = 1e-10);
        assert_relative_eq!(rho.mass().unwrap(), 2.0 * std::f64::consts::PI * c / (b * b), max_relative = 1e-15);
    }

    #[test]
    fn zero_density() {
        let zero = DensityProfile::<f64>::zero();
        assert_eq!(zero.evaluate_l().unwrap().value, 0.0);
        assert_eq!(zero.evaluate_g(&params(2.0)).unwrap().value, 0.0);
        let g0 = DensityProfile::gaussian(0.0, 1.0, ORIGIN).unwrap();
        assert_eq!(kinetic_functional(&g0, &params(1.5), 2.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn plateau_has_no_gradient_contribution() {
        // flat on [0, 1], then falls to zero on [1, 1.5]
        let r = vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
        let rho = vec![2.0, 2.0, 2.0, 2.0, 2.0, 1.0, 0.0];
        let t = TabulatedRadial::new(r, rho, TailModel::Zero).unwrap();
        let prof = DensityProfile::tabulated(t, ORIGIN);
        let table = match prof.kind() {
            ProfileKind::Tabulated(t) => t.power_interpolant(0.25),
            _ => unreachable!(),
        };
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            assert_eq!(prof.radial_power_derivative(r, 0.25, Some(&table)), 0.0);
        }
        assert!(prof.evaluate_g(&params(2.0)).unwrap().value > 0.0);
    }

    #[test]
    fn gaussian_scaling_is_substitution() {
        let rho = DensityProfile::gaussian(1.3, 0.7, [0.5, -1.0]).unwrap();
        let s = rho.scaled(2.0).unwrap();
        match s.kind() {
            ProfileKind::Gaussian { amplitude, width } => {
                assert_relative_eq!(*amplitude, 1.3 * 4.0, max_relative = 1e-15);
                assert_relative_eq!(*width, 0.7 * 4.0, max_relative = 1e-15);
            }
            _ => panic!("kind changed"),
        }
        assert_eq!(s.center(), [0.25, -0.5]);
        assert_eq!(rho.scaled(1.0).unwrap(), rho);
        assert!(rho.scaled(0.0).is_err());
        assert!(rho.scaled(-2.0).is_err());
    }

    #[test]
    fn g_over_l_closed_form_examples() {
        for (n, g, a) in [(5.0, 2.0, 1.0), (50.0, 1.5, 3.0), (10.0, 2.5, 0.2)] {
            let p = params(g);
            let rho = DensityProfile::normalized_gaussian(n, a, ORIGIN).unwrap();
            let ratio = rho.evaluate_g(&p).unwrap().value / rho.evaluate_l().unwrap().value;
            assert_relative_eq!(ratio, gaussian_g_over_l(n, &p).unwrap(), max_relative = 1e-6);
        }
        let p = params(1.7);
        let r1 = gaussian_g_over_l(3.0, &p).unwrap();
        let r4 = gaussian_g_over_l(12.0, &p).unwrap();
        assert_relative_eq!(r4 / r1, 4f64.powf(-0.85), max_relative = 1e-10);
        assert!(gaussian_g_over_l(0.0, &p).is_err());
    }

    #[test]
    fn g_over_l_independent_of_width() {
        let p = params(2.3);
        let at = |a: f64| {
            let c = 7.0 * a / std::f64::consts::PI;
            gaussian_g(c, a, &p) / gaussian_l(c, a)
        };
        assert_relative_eq!(at(0.1), at(10.0), max_relative = 1e-10);
        assert_relative_eq!(at(0.1), gaussian_g_over_l(7.0, &p).unwrap(), max_relative = 1e-10);
    }

    #[test]
    fn tabulated_validation() {
        assert!(TabulatedRadial::new(vec![0.1, 1.0], vec![1.0, 0.0], TailModel::Zero).is_err());
        assert!(TabulatedRadial::new(vec![0.0, 1.0], vec![1.0, 0.5], TailModel::Zero).is_err());
        assert!(TabulatedRadial::new(vec![0.0, 1.0], vec![1.0, -0.5], TailModel::Exponential).is_err());
        assert!(TabulatedRadial::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.6], TailModel::Exponential).is_err());
        assert!(TabulatedRadial::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.25], TailModel::Exponential).is_ok());
    }

    #[test]
    fn tabulated_exponential_tail_mass() {
        // exact exponential sampled on a grid: table + tail reproduce 2πC/B²
        let b = 1.3;
        let r: Vec<f64> = (0..=60).map(|i| i as f64 * 0.1).collect();
        let rho: Vec<f64> = r.iter().map(|x| 2.0 * (-b * x).exp()).collect();
        let t = TabulatedRadial::new(r, rho, TailModel::Exponential).unwrap();
        let prof = DensityProfile::tabulated(t, ORIGIN);
        assert_relative_eq!(prof.mass().unwrap(), 2.0 * 2.0 * std::f64::consts::PI / (b * b), max_relative = 1e-5);
    }

    #[test]
    fn mixture_value_is_weighted_sum() {
        let comps = vec![
            GaussianComponent { amplitude: 0.4, width: 1.0, offset: [-2.0, 0.0] },
            GaussianComponent { amplitude: 0.4, width: 1.0, offset: [2.0, 0.0] },
        ];
        let mix = DensityProfile::mixture(comps.clone(), ORIGIN).unwrap();
        assert!(!mix.is_radial());
        for x in [[0.0, 0.0], [1.0, 0.5], [-2.5, 3.0]] {
            let direct: f64 = comps
                .iter()
                .map(|c| {
                    let d2 = (x[0] - c.offset[0]).powi(2) + (x[1] - c.offset[1]).powi(2);
                    c.amplitude * (-c.width * d2).exp()
                })
                .sum();
            assert_relative_eq!(mix.value_at(x), direct, max_relative = 1e-14);
        }
    }

    #[test]
    fn concentric_mixture_is_radial() {
        let comps = vec![
            GaussianComponent { amplitude: 0.4, width: 1.0, offset: [1.0, 1.0] },
            GaussianComponent { amplitude: 0.2, width: 3.0, offset: [1.0, 1.0] },
        ];
        let mix = DensityProfile::mixture(comps, [1.0, 0.0]).unwrap();
        assert_eq!(mix.radial_center(), Some([2.0, 1.0]));
        let g = mix.evaluate_g(&params(2.0)).unwrap().value;
        // finite-difference oracle on d(ρ^{1/4})/dr
        let h = 1e-5;
        let fd = |r: f64| {
            let p = |r: f64| mix.radial_value(r).powf(0.25);
            (p(r + h) - p(r - h)) / (2.0 * h)
        };
        let oracle = integrate_panels(|r| fd(r).powi(2) * r, &[h, 1.0, 3.0, 12.0], Tolerance::relative(1e-9))
            .unwrap()
            .value
            * 2.0
            * std::f64::consts::PI;
        assert_relative_eq!(g, oracle, max_relative = 1e-6);
    }

    #[test]
    fn descriptor_round_trip_and_field_names() {
        let json = r#"{"kind": "gaussian", "C": 0.5, "A": 2.0, "center": [1.0, -1.0]}"#;
        let d: ProfileDescriptor = serde_json::from_str(json).unwrap();
        let p: DensityProfile<f64> = d.build().unwrap();
        assert_eq!(p.center(), [1.0, -1.0]);
        let json = r#"{"kind": "tabulated", "r": [0, 1, 2], "rho": [1, 0.5, 0], "tail": "zero"}"#;
        let d: ProfileDescriptor = serde_json::from_str(json).unwrap();
        assert!(d.build::<f64>().is_ok());
        let json = r#"{"kind": "tabulated", "r": [0, 1, 2], "rho": [1, 0.5, 0.2], "tail": "exponential"}"#;
        let d: ProfileDescriptor = serde_json::from_str(json).unwrap();
        assert!(d.build::<f64>().is_ok());
        let bad = r#"{"kind": "gaussian", "C": -1, "A": 2.0}"#;
        let d: ProfileDescriptor = serde_json::from_str(bad).unwrap();
        assert!(d.build::<f64>().is_err());
        assert!(serde_json::from_str::<ProfileDescriptor>(r#"{"kind": "lorentzian"}"#).is_err());
    }

    #[test]
    fn single_precision_gaussian_l() {
        let rho = DensityProfile::<f32>::gaussian(1.0, 1.0, [0.0, 0.0]).unwrap();
        let l = rho.evaluate_l().unwrap().value;
        assert_relative_eq!(l, gaussian_l(1.0_f32, 1.0), max_relative = 1e-4);
    }
}
