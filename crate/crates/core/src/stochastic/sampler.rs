use crate::error::{Error, Result};
use crate::experiment::{closed_form_screen_probability, linspace, Geometry, SourceParams};

/// Number of tabulation intervals used by the Monte Carlo driver.
pub const DEFAULT_SUPPORT_INTERVALS: usize = 10_000;

/// Inverse-CDF sampler over a screen interval.
///
/// The density is tabulated on a uniform grid, integrated with the
/// trapezoid rule, and inverted by linear interpolation of the cumulative
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenSampler {
    x_min: f64,
    x_max: f64,
    support: Vec<f64>,
    /// Normalized cumulative mass at each support point; first 0, last 1.
    cdf: Vec<f64>,
}

impl ScreenSampler {
    /// Tabulates an arbitrary non-negative density over `[x_min, x_max]`
    /// with `intervals` uniform steps.
    pub fn from_density(
        extent: (f64, f64),
        intervals: usize,
        density: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let (x_min, x_max) = extent;
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::invalid(format!("bad screen extent [{x_min}, {x_max}]")));
        }
        if intervals < 2 {
            return Err(Error::invalid("sampler needs at least 2 intervals"));
        }
        let support = linspace(x_min, x_max, intervals + 1);
        let weights: Vec<f64> = support.iter().map(|&x| density(x)).collect();
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= -1e-12)) {
            return Err(Error::invalid(format!("density value {w} is negative or not finite")));
        }

        let mut cdf = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..support.len() {
            let h = support[i] - support[i - 1];
            acc += 0.5 * h * (weights[i].max(0.0) + weights[i - 1].max(0.0));
            cdf.push(acc);
        }
        if acc.is_nan() || acc <= 0.0 {
            return Err(Error::invalid("density has zero total weight over the extent"));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        *cdf.last_mut().expect("non-empty") = 1.0;
        Ok(Self { x_min, x_max, support, cdf })
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.x_min, self.x_max)
    }

    pub fn intervals(&self) -> usize {
        self.support.len() - 1
    }

    /// Maps `u` in `[0, 1)` to a screen position.
    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // first interval whose upper cumulative value exceeds u
        let hi = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let lo = hi - 1;
        let (c0, c1) = (self.cdf[lo], self.cdf[hi]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        let x = self.support[lo] + t * (self.support[hi] - self.support[lo]);
        x.clamp(self.x_min, self.x_max)
    }

    /// Tabulated cumulative distribution at `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.x_min {
            return 0.0;
        }
        if x >= self.x_max {
            return 1.0;
        }
        let h = (self.x_max - self.x_min) / self.intervals() as f64;
        let i = (((x - self.x_min) / h) as usize).min(self.intervals() - 1);
        let t = ((x - self.support[i]) / (self.support[i + 1] - self.support[i])).clamp(0.0, 1.0);
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }
}

/// Sampler whose density follows the analytic screen law over `extent`.
pub fn build_screen_sampler(
    g: &Geometry,
    sp: &SourceParams,
    extent: (f64, f64),
    intervals: usize,
) -> Result<ScreenSampler> {
    sp.validate()?;
    ScreenSampler::from_density(extent, intervals, |x| closed_form_screen_probability(g, sp, x))
}
