//! Small numerical kernels shared by the channel and capacity code.

use num_complex::Complex64;

/// Neumaier-compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a sequence of reals.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

/// Component-wise Neumaier accumulator for complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Unnormalized sinc, `sin(x)/x`, with `sinc(0) = 1`.
///
/// Below `|x| < 1e-4` the Taylor series `1 - x²/6 + x⁴/120` is used.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// The ratio `sinc(count·x) / sinc(x) = sin(count·x) / (count·sin x)`.
///
/// Finite everywhere: at the removable points `x = kπ` the limit
/// `cos(count·x) / cos(x)` is returned.
pub fn sinc_ratio(count: usize, x: f64) -> f64 {
    let n = count as f64;
    if x.abs() < SINC_SERIES_CUTOFF {
        return sinc(n * x) / sinc(x);
    }
    let denom = n * x.sin();
    if denom.abs() < 1e-12 * n {
        (n * x).cos() / x.cos()
    } else {
        (n * x).sin() / denom
    }
}
