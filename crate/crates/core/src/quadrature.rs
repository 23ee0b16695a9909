//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed error meets the tolerance. Integrable
//! endpoint singularities (logarithmic, inverse square root) converge because
//! the rule never samples an endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule for [`integrate`]: succeed once the error estimate is below
/// `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_panels: 4000,
        }
    }

    pub const fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }

    pub const fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::relative(1e-10)
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_error: T,
    pub evaluations: usize,
}

impl<T: Real> Estimate<T> {
    pub fn zero() -> Self {
        Self {
            value: T::zero(),
            abs_error: T::zero(),
            evaluations: 0,
        }
    }

    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            abs_error: self.abs_error * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

impl<T: Real> std::ops::Add for Estimate<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            abs_error: self.abs_error + rhs.abs_error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// One application of the 15-point Kronrod rule with the embedded 7-point
/// Gauss rule; returns (value, error estimate).
fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Result<(T, T)> {
    let center = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    let f_center = f(center);
    let mut res_k = f_center * lit(WGK[7]);
    let mut res_g = f_center * lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv = [T::zero(); 14];
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        res_k = res_k + lit::<T>(WGK[j]) * (f1 + f2);
        res_abs = res_abs + lit::<T>(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_k.is_finite() || !res_g.is_finite() {
        return Err(Error::divergence(format!(
            "non-finite integrand on [{}, {}]",
            to_f64(a),
            to_f64(b)
        )));
    }
    let mean = res_k * lit(0.5);
    let mut res_asc = lit::<T>(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let abs_half = half.abs();
    res_asc = res_asc * abs_half;
    res_abs = res_abs * abs_half;
    let mut err = ((res_k - res_g) * half).abs();
    // QUADPACK error rescaling
    if res_asc != T::zero() && err != T::zero() {
        let scale = (lit::<T>(200.0) * err / res_asc).powf(lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = lit::<T>(50.0) * T::epsilon() * res_abs;
    if floor > err {
        err = floor;
    }
    Ok((res_k * half, err))
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T: Real, F: FnMut(T) -> T>(f: F, a: T, b: T, tol: Tolerance) -> Result<Estimate<T>> {
    integrate_panels(f, &[a, b], tol)
}

/// Integrates `f` over `[points[0], points[last]]`, seeding the adaptive
/// scheme with the given breakpoints. Interior singular points belong in
/// `points` so that no panel straddles them.
pub fn integrate_panels<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    tol: Tolerance,
) -> Result<Estimate<T>> {
    if points.len() < 2 {
        return Ok(Estimate::zero());
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = T::zero();
    let mut evaluations = 0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (value, error) = kronrod15(&mut f, a, b)?;
        evaluations += 15;
        total = total + value;
        total_err = total_err + error;
        heap.push(Panel { a, b, value, error });
    }
    let abs_tol = lit::<T>(tol.abs);
    // tolerances below the rounding floor of T are unattainable
    let rel_tol = lit::<T>(tol.rel).max(lit::<T>(500.0) * T::epsilon());
    let max_panels = tol.max_panels.max(heap.len());
    loop {
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if heap.len() >= max_panels {
            return Err(Error::divergence(format!(
                "no convergence after {} panels (estimate {:e}, error {:e})",
                heap.len(),
                to_f64(total),
                to_f64(total_err)
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = (worst.a + worst.b) * lit(0.5);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel can no longer be split in this precision.
            heap.push(worst);
            let resummed: T = heap.iter().map(|p| p.error).sum();
            if resummed <= target * lit(10.0) {
                break;
            }
            return Err(Error::divergence(format!(
                "panel width underflow near {:e}",
                to_f64(mid)
            )));
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.error + e1 + e2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        // resum to stop the running totals from drifting
        if heap.len() % 256 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value: T = heap.iter().map(|p| p.value).sum();
    let abs_error: T = heap.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        abs_error,
        evaluations,
    })
}

/// Iterated integral of `f(x, y)` over the rectangle spanned by the
/// breakpoint lists. The inner integral in `y` runs at a tighter relative
/// tolerance than the outer one, with an absolute floor `inner_abs` so that
/// strips where the integrand is negligible terminate quickly.
pub fn integrate_rectangle<T: Real, F: Fn(T, T) -> T>(
    f: F,
    x_points: &[T],
    y_points: &[T],
    tol: Tolerance,
    inner_abs: f64,
) -> Result<Estimate<T>> {
    let inner_tol = Tolerance::relative(tol.rel * 0.1).with_abs(inner_abs);
    let mut inner_error = T::zero();
    let mut inner_evals = 0;
    let mut failure = None;
    let outer = integrate_panels(
        |x| match integrate_panels(|y| f(x, y), y_points, inner_tol) {
            Ok(est) => {
                inner_error = inner_error.max(est.abs_error);
                inner_evals += est.evaluations;
                est.value
            }
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        },
        x_points,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    let width = x_points[x_points.len() - 1] - x_points[0];
    Ok(Estimate {
        value: outer.value,
        abs_error: outer.abs_error + inner_error * width.abs(),
        evaluations: inner_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x: f64| x.powi(5) - 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert_relative_eq!(est.value, 64.0 / 6.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn gaussian_tail() {
        let est = integrate(|x: f64| (-x * x).exp(), 0.0, 12.0, Tolerance::relative(1e-12)).unwrap();
        assert_relative_eq!(est.value, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn logarithmic_endpoint() {
        // ∫₀¹ ln x dx = −1
        let est = integrate(|x: f64| x.ln(), 0.0, 1.0, Tolerance::relative(1e-10)).unwrap();
        assert_relative_eq!(est.value, -1.0, max_relative = 1e-10);
        assert!(est.abs_error < 1e-9);
    }

    #[test]
    fn interior_log_singularity_with_breakpoint() {
        // ∫₀² ln|x − 1| dx = −2
        let est = integrate_panels(|x: f64| (x - 1.0).abs().ln(), &[0.0, 1.0, 2.0], Tolerance::relative(1e-10))
            .unwrap();
        assert_relative_eq!(est.value, -2.0, max_relative = 1e-10);
    }

    #[test]
    fn nonintegrable_singularity_is_divergence() {
        let res = integrate(|x: f64| 1.0 / x, 0.0, 1.0, Tolerance::relative(1e-10));
        assert!(matches!(res, Err(Error::Divergence(_))), "{res:?}");
    }

    #[test]
    fn nan_integrand_is_divergence() {
        let res = integrate(|x: f64| (x - 2.0).sqrt(), 0.0, 1.0, Tolerance::default());
        assert!(matches!(res, Err(Error::Divergence(_))));
    }

    #[test]
    fn reversed_interval_changes_sign() {
        let fwd = integrate(|x: f64| x.cos(), 0.0, 1.0, Tolerance::default()).unwrap();
        let rev = integrate(|x: f64| x.cos(), 1.0, 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(fwd.value, -rev.value, max_relative = 1e-14);
    }

    #[test]
    fn rectangle_gaussian() {
        let est = integrate_rectangle(
            |x: f64, y: f64| (-(x * x + 2.0 * y * y)).exp(),
            &[-8.0, 0.0, 8.0],
            &[-8.0, 0.0, 8.0],
            Tolerance::relative(1e-10),
            1e-16,
        )
        .unwrap();
        assert_relative_eq!(est.value, std::f64::consts::PI / 2f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn single_precision() {
        let est = integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI, Tolerance::relative(1e-5)).unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-5);
    }
}
