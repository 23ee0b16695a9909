//! Monotone piecewise-cubic Hermite interpolation (PCHIP).

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Shape-preserving C¹ cubic interpolant through `(x_i, y_i)`.
///
/// Interior slopes use the weighted harmonic mean of the adjacent secants
/// (Fritsch–Butland), endpoint slopes the one-sided three-point formula
/// limited to preserve monotonicity. Same construction as SciPy's
/// `PchipInterpolator`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic<T> {
    x: Vec<T>,
    y: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> MonotoneCubic<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidDescriptor(format!(
                "abscissae and values differ in length ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidDescriptor("need at least two nodes".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidDescriptor("abscissae must be strictly increasing".into()));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDescriptor("non-finite node".into()));
        }
        let slopes = pchip_slopes(&x, &y);
        Ok(Self { x, y, slopes })
    }

    pub fn nodes(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.y
    }

    /// Index of the interval containing `t`, clamped to the table.
    fn interval(&self, t: T) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value at `t`; outside the table the end segment is extrapolated.
    pub fn eval(&self, t: T) -> T {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn derivative(&self, t: T) -> T {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let six = lit::<T>(6.0);
        let d00 = (six * s2 - six * s) / h;
        let d10 = lit::<T>(3.0) * s2 - lit::<T>(4.0) * s + T::one();
        let d01 = (six * s - six * s2) / h;
        let d11 = lit::<T>(3.0) * s2 - lit::<T>(2.0) * s;
        d00 * self.y[i] + d10 * self.slopes[i] + d01 * self.y[i + 1] + d11 * self.slopes[i + 1]
    }
}

fn pchip_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![T::zero(); n];
    let two = lit::<T>(2.0);
    for k in 1..n - 1 {
        let (d0, d1) = (delta[k - 1], delta[k]);
        if d0 == T::zero() || d1 == T::zero() || d0.signum() != d1.signum() {
            d[k] = T::zero();
        } else {
            let w1 = two * h[k] + h[k - 1];
            let w2 = h[k] + two * h[k - 1];
            d[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope<T: Real>(h0: T, h1: T, m0: T, m1: T) -> T {
    let two = lit::<T>(2.0);
    let three = lit::<T>(3.0);
    let d = ((two * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == T::zero() {
        T::zero()
    } else if m0.signum() != m1.signum() && d.abs() > (three * m0).abs() {
        three * m0
    } else {
        d
    }
}
