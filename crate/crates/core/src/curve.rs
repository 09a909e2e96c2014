//! Initial discount curve `P(0, t)` and instantaneous forwards `f(0, t)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Finite-difference step for `f(0,t) = -d log P(0,t) / dt`, in years.
pub const FORWARD_STEP: f64 = 1e-5;

/// Step for the slope `df(0,t)/dt` of the forward curve.
pub const FORWARD_SLOPE_STEP: f64 = 1e-4;

/// Anything that can quote discount factors off today's curve.
///
/// Implementors provide `log P(0, t)`; forwards default to finite
/// differences of it.
pub trait DiscountCurve {
    /// `log P(0, t)`.
    fn log_discount(&self, t: f64) -> Result<f64>;

    /// Largest time the curve can be evaluated at (`f64::INFINITY` if unbounded).
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }

    fn discount(&self, t: f64) -> Result<f64> {
        Ok(math::exp(self.log_discount(t)?))
    }

    /// Instantaneous forward `f(0, t)`: central difference of `-log P` with
    /// step [`FORWARD_STEP`], one-sided at the ends of the range.
    fn inst_forward(&self, t: f64) -> Result<f64> {
        let h = FORWARD_STEP;
        if t < h {
            self.log_discount(t)?;
            Ok((self.log_discount(t)? - self.log_discount(t + h)?) / h)
        } else if t + h > self.horizon() {
            Ok((self.log_discount(t - h)? - self.log_discount(t)?) / h)
        } else {
            Ok((self.log_discount(t - h)? - self.log_discount(t + h)?) / (2.0 * h))
        }
    }

    /// `df(0, t) / dt`.
    fn forward_slope(&self, t: f64) -> Result<f64> {
        let h = FORWARD_SLOPE_STEP;
        let lo = (t - h).max(0.0);
        let hi = (t + h).min(self.horizon());
        if hi <= lo {
            return Ok(0.0);
        }
        Ok((self.inst_forward(hi)? - self.inst_forward(lo)?) / (hi - lo))
    }
}

impl<C: DiscountCurve + ?Sized> DiscountCurve for &C {
    fn log_discount(&self, t: f64) -> Result<f64> {
        (**self).log_discount(t)
    }
    fn horizon(&self) -> f64 {
        (**self).horizon()
    }
    fn discount(&self, t: f64) -> Result<f64> {
        (**self).discount(t)
    }
    fn inst_forward(&self, t: f64) -> Result<f64> {
        (**self).inst_forward(t)
    }
    fn forward_slope(&self, t: f64) -> Result<f64> {
        (**self).forward_slope(t)
    }
}

/// Pillar curve with log-linear discount interpolation, so forwards are
/// piecewise constant between pillars.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldCurve {
    times: Vec<f64>,
    dfs: Vec<f64>,
    log_dfs: Vec<f64>,
    extrapolate: bool,
}

impl YieldCurve {
    /// Curve through `(t, P(0,t))` pillars. A `(0, 1)` pillar is prepended when
    /// missing; an explicit `t = 0` pillar must carry discount factor 1.
    pub fn from_discount_factors(pillars: &[(f64, f64)]) -> Result<Self> {
        if pillars.is_empty() {
            return Err(Error::InvalidCurve("no pillars"));
        }
        let mut times = Vec::with_capacity(pillars.len() + 1);
        let mut dfs = Vec::with_capacity(pillars.len() + 1);
        if pillars[0].0 != 0.0 {
            times.push(0.0);
            dfs.push(1.0);
        }
        for &(t, df) in pillars {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidCurve("pillar times must be finite and non-negative"));
            }
            if !(df.is_finite() && df > 0.0) {
                return Err(Error::InvalidCurve("discount factors must be positive"));
            }
            if let Some(&last) = times.last() {
                if t <= last {
                    return Err(Error::InvalidCurve("pillar times must be strictly increasing"));
                }
            }
            times.push(t);
            dfs.push(df);
        }
        if (dfs[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCurve("discount factor at t = 0 must be 1"));
        }
        dfs[0] = 1.0;
        if times.len() < 2 {
            return Err(Error::InvalidCurve("need at least one pillar beyond t = 0"));
        }
        let log_dfs = dfs.iter().map(|&d| math::ln(d)).collect();
        Ok(YieldCurve {
            times,
            dfs,
            log_dfs,
            extrapolate: false,
        })
    }

    /// Curve through `(t, z)` pillars of continuously compounded zero rates.
    pub fn from_zero_rates(pillars: &[(f64, f64)]) -> Result<Self> {
        let dfs: Vec<(f64, f64)> = pillars
            .iter()
            .map(|&(t, z)| (t, math::exp(-z * t)))
            .collect();
        Self::from_discount_factors(&dfs)
    }

    /// Flat continuously compounded curve, valid for every horizon.
    pub fn flat(rate: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidCurve("flat rate must be finite"));
        }
        Ok(Self::from_discount_factors(&[(1.0, math::exp(-rate))])?.with_extrapolation(true))
    }

    /// Enable or disable flat-forward extrapolation past the last pillar.
    pub fn with_extrapolation(mut self, enabled: bool) -> Self {
        self.extrapolate = enabled;
        self
    }

    pub fn pillars(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.dfs.iter().copied())
    }

    pub fn last_pillar(&self) -> f64 {
        *self.times.last().expect("curve has pillars")
    }

    fn segment_slope(&self, i: usize) -> f64 {
        (self.log_dfs[i + 1] - self.log_dfs[i]) / (self.times[i + 1] - self.times[i])
    }
}

impl DiscountCurve for YieldCurve {
    fn log_discount(&self, t: f64) -> Result<f64> {
        let last = self.last_pillar();
        if !(t >= 0.0) || (t > last && !self.extrapolate) || !t.is_finite() {
            return Err(Error::OutsideCurve { t, last });
        }
        let n = self.times.len();
        if t >= last {
            let slope = self.segment_slope(n - 2);
            return Ok(self.log_dfs[n - 1] + slope * (t - last));
        }
        // first pillar strictly greater than t
        let i = self.times.partition_point(|&x| x <= t);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        if t == t0 {
            return Ok(self.log_dfs[i - 1]);
        }
        let w = (t - t0) / (t1 - t0);
        Ok(self.log_dfs[i - 1] + w * (self.log_dfs[i] - self.log_dfs[i - 1]))
    }

    fn horizon(&self) -> f64 {
        if self.extrapolate {
            f64::INFINITY
        } else {
            self.last_pillar()
        }
    }

    fn discount(&self, t: f64) -> Result<f64> {
        // exact at pillars
        if let Ok(i) = self.times.binary_search_by(|x| x.total_cmp(&t)) {
            return Ok(self.dfs[i]);
        }
        Ok(math::exp(self.log_discount(t)?))
    }
}
