//! Normal-mixture marginals of the randomized short rate and the
//! local-volatility SDE that reproduces them.
//!
//! At each horizon `t` the randomized `r(t)` is a mixture of the Hull-White
//! normals at the parameter realizations. The SDE
//!
//! ```text
//! dr = sum_n L_n(t, r) lambda_n (psi_n(t) - r) dt + sqrt(sum_n L_n(t, r) eta_n^2) dW
//! L_n(t, y) = w_n f_n(t, y) / sum_k w_k f_k(t, y)
//! ```
//!
//! has the same one-dimensional marginals. The simulator works with the
//! deviation `x = r - f(0, t)`, in which the curve slope drops out exactly.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::curve::DiscountCurve;
use crate::error::{Error, Result};
use crate::hw::{self, HwParams};
use crate::math::{self, norm_cdf, norm_inv_cdf, one_minus_exp_over};
use crate::randomized::{RandomizedSpec, Realization};

/// Minimum sample size accepted by [`density_distance`].
pub const MIN_DISTANCE_SAMPLES: usize = 10_000;
/// Histogram bins of the L1 distance.
pub const L1_BINS: usize = 100;
/// Asymptotic Kolmogorov-Smirnov critical value at the 1% level, times `sqrt(n)`.
pub const KS_CRITICAL_1PCT: f64 = 1.63;

/// Mixture of normals `sum_n w_n N(mean_n, std_n^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDensity {
    weights: Vec<f64>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl MixtureDensity {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, stds: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != means.len() || weights.len() != stds.len() {
            return Err(Error::InvalidArgument("mixture components need equal non-zero length"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("mixture weights must be convex"));
        }
        if stds.iter().any(|s| !(s.is_finite() && *s > 0.0)) || means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidArgument("mixture components need finite means and positive stds"));
        }
        Ok(MixtureDensity { weights, means, stds })
    }

    /// Marginal of the randomized `r(t)`.
    pub fn from_spec<C: DiscountCurve + ?Sized>(curve: &C, spec: &RandomizedSpec, t: f64) -> Result<Self> {
        Self::from_realizations(curve, &spec.realizations()?, t)
    }

    pub fn from_realizations<C: DiscountCurve + ?Sized>(curve: &C, realizations: &[Realization], t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::DegenerateHorizon);
        }
        let mut weights = Vec::with_capacity(realizations.len());
        let mut means = Vec::with_capacity(realizations.len());
        let mut stds = Vec::with_capacity(realizations.len());
        for r in realizations {
            let (m, v) = hw::short_rate_moments(curve, &r.params, t)?;
            weights.push(r.weight);
            means.push(m);
            stds.push(math::sqrt(v));
        }
        Self::new(weights, means, stds)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.weights
            .iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((&w, &m), &s)| (w, m, s))
    }

    /// Copy with every mean moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        MixtureDensity {
            weights: self.weights.clone(),
            means: self.means.iter().map(|m| m + delta).collect(),
            stds: self.stds.clone(),
        }
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.components()
            .map(|(w, m, s)| w * math::exp(math::ln_normal_pdf(y, m, s * s)))
            .sum()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        self.components().map(|(w, m, s)| w * norm_cdf((y - m) / s)).sum()
    }

    /// Posterior component weights at `y`, computed in log space.
    pub fn posterior(&self, y: f64) -> Vec<f64> {
        let logs: Vec<f64> = self
            .components()
            .map(|(w, m, s)| math::ln(w) + math::ln_normal_pdf(y, m, s * s))
            .collect();
        normalize_log_weights(&logs)
    }

    pub fn mean(&self) -> f64 {
        self.components().map(|(w, m, _)| w * m).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.components().map(|(w, m, s)| w * ((m - mu) * (m - mu) + s * s)).sum()
    }

    /// Fourth central moment.
    pub fn fourth_central_moment(&self) -> f64 {
        let mu = self.mean();
        self.components()
            .map(|(w, m, s)| {
                let d2 = (m - mu) * (m - mu);
                let s2 = s * s;
                w * (d2 * d2 + 6.0 * d2 * s2 + 3.0 * s2 * s2)
            })
            .sum()
    }

    /// Excess kurtosis relative to the moment-matched normal.
    pub fn excess_kurtosis(&self) -> f64 {
        let v = self.variance();
        self.fourth_central_moment() / (v * v) - 3.0
    }

    /// One draw: component by its weight, then inverse-CDF within it.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut k = self.len() - 1;
        for (i, &w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                k = i;
                break;
            }
        }
        let v = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        self.means[k] + self.stds[k] * norm_inv_cdf(v)
    }
}

fn normalize_log_weights(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logs.iter().map(|&l| math::exp(l - max)).collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Local drift and variance induced by a set of parameter realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalVolField {
    weights: Vec<f64>,
    lambdas: Vec<f64>,
    eta2: Vec<f64>,
    /// Set when all realizations share one volatility; the local variance is
    /// then exactly that constant.
    common_eta2: Option<f64>,
}

/// Coefficients of every component in deviation space at one time.
#[derive(Debug, Clone)]
struct Slice {
    log_norm: Vec<f64>,
    mean: Vec<f64>,
    inv_two_var: Vec<f64>,
    drift_const: Vec<f64>,
    degenerate: bool,
}

impl LocalVolField {
    pub fn new(realizations: &[Realization]) -> Result<Self> {
        if realizations.is_empty() {
            return Err(Error::InvalidArgument("no realizations"));
        }
        let eta2: Vec<f64> = realizations.iter().map(|r| r.params.eta * r.params.eta).collect();
        if eta2.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter("local-volatility field needs positive eta at every node"));
        }
        let common_eta2 = if eta2.iter().all(|&v| v == eta2[0]) { Some(eta2[0]) } else { None };
        Ok(LocalVolField {
            weights: realizations.iter().map(|r| r.weight).collect(),
            lambdas: realizations.iter().map(|r| r.params.lambda).collect(),
            eta2,
            common_eta2,
        })
    }

    pub fn from_spec(spec: &RandomizedSpec) -> Result<Self> {
        Self::new(&spec.realizations()?)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(min_n eta_n^2, max_n eta_n^2)`: bounds of the local variance.
    pub fn variance_bounds(&self) -> (f64, f64) {
        let lo = self.eta2.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.eta2.iter().copied().fold(0.0, f64::max);
        (lo, hi)
    }

    fn slice(&self, t: f64) -> Slice {
        let n = self.len();
        let mut s = Slice {
            log_norm: vec![0.0; n],
            mean: vec![0.0; n],
            inv_two_var: vec![0.0; n],
            drift_const: vec![0.0; n],
            degenerate: t <= 0.0,
        };
        for i in 0..n {
            let (l, e2) = (self.lambdas[i], self.eta2[i]);
            s.drift_const[i] = e2 * one_minus_exp_over(2.0 * l, t);
            if !s.degenerate {
                let (m, v) = hw::short_rate_deviation_moments(&HwParams { lambda: l, eta: math::sqrt(e2) }, t);
                s.mean[i] = m;
                s.inv_two_var[i] = 0.5 / v;
                s.log_norm[i] = math::ln(self.weights[i]) - 0.5 * math::ln(v);
            }
        }
        s
    }

    /// Posterior weights `L_n(t, y)` for `y` in deviation units
    /// (`x = r - f(0, t)`). At `t = 0` every component sits at the origin
    /// and the weights are the prior ones.
    pub fn deviation_weights(&self, t: f64, x: f64) -> Vec<f64> {
        let s = self.slice(t);
        if s.degenerate {
            return self.weights.clone();
        }
        let logs: Vec<f64> = (0..self.len())
            .map(|i| s.log_norm[i] - (x - s.mean[i]) * (x - s.mean[i]) * s.inv_two_var[i])
            .collect();
        normalize_log_weights(&logs)
    }

    /// Posterior weights at short rate `y`.
    pub fn lambda_weights<C: DiscountCurve + ?Sized>(&self, curve: &C, t: f64, y: f64) -> Result<Vec<f64>> {
        Ok(self.deviation_weights(t, y - curve.inst_forward(t)?))
    }

    /// Local `(drift, variance)` of the short rate at `(t, y)`:
    /// `sum_n L_n [lambda_n (f(0,t) - y) + df(0,t)/dt + eta_n^2 (1 - e^{-2 lambda_n t}) / (2 lambda_n)]`
    /// and `sum_n L_n eta_n^2`.
    pub fn local_coeffs<C: DiscountCurve + ?Sized>(&self, curve: &C, t: f64, y: f64) -> Result<(f64, f64)> {
        let f = curve.inst_forward(t)?;
        let slope = curve.forward_slope(t)?;
        let x = y - f;
        let w = self.deviation_weights(t, x);
        let (drift, var) = self.combine(&w, &self.slice(t).drift_const, x);
        Ok((drift + slope, var))
    }

    fn combine(&self, weights: &[f64], drift_const: &[f64], x: f64) -> (f64, f64) {
        let mut drift = 0.0;
        let mut var = 0.0;
        for i in 0..self.len() {
            drift += weights[i] * (drift_const[i] - self.lambdas[i] * x);
            var += weights[i] * self.eta2[i];
        }
        (drift, self.common_eta2.unwrap_or(var))
    }
}

/// Euler grid: `steps` uniform steps up to the last observation time.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerGrid {
    pub dt: f64,
    pub steps: usize,
    /// Step index at which each observation time is reached.
    pub observations: Vec<usize>,
}

impl EulerGrid {
    /// Grid with at least `steps_per_year` steps per unit time, refined so
    /// every observation time falls on a grid point.
    pub fn new(obs_times: &[f64], steps_per_year: usize) -> Result<Self> {
        if obs_times.is_empty() || steps_per_year == 0 {
            return Err(Error::InvalidArgument("need observation times and a positive step density"));
        }
        if obs_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) || obs_times.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidArgument("observation times must be positive and increasing"));
        }
        let horizon = obs_times[obs_times.len() - 1];
        let steps = libm::ceil(horizon * steps_per_year as f64) as usize;
        let dt = horizon / steps as f64;
        let mut observations = Vec::with_capacity(obs_times.len());
        for &t in obs_times {
            let k = libm::round(t / dt);
            if (k * dt - t).abs() > 1e-9 * t.max(1.0) {
                return Err(Error::InvalidArgument("observation time is not on the Euler grid"));
            }
            observations.push(k as usize);
        }
        Ok(EulerGrid { dt, steps, observations })
    }
}

/// Simulates `paths` Euler paths of the local-volatility SDE from
/// `r(0) = f(0, 0)` and returns the short rate at each observation time as
/// `out[observation][path]`.
///
/// The random stream is ChaCha8 seeded with `seed` on substream `stream`, so
/// disjoint chunks of one run can be generated independently.
pub fn simulate_chunk<C: DiscountCurve + ?Sized>(
    field: &LocalVolField,
    curve: &C,
    grid: &EulerGrid,
    paths: usize,
    seed: u64,
    stream: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let n = field.len();
    let sqrt_dt = math::sqrt(grid.dt);
    let mut x = vec![0.0; paths];
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(grid.observations.len());
    let mut next_obs = 0;
    let mut logs = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in 0..grid.steps {
        let s = field.slice(k as f64 * grid.dt);
        for xi in x.iter_mut() {
            if s.degenerate {
                w.copy_from_slice(&field.weights);
            } else {
                let mut max = f64::NEG_INFINITY;
                for i in 0..n {
                    let d = *xi - s.mean[i];
                    logs[i] = s.log_norm[i] - d * d * s.inv_two_var[i];
                    max = max.max(logs[i]);
                }
                let mut total = 0.0;
                for i in 0..n {
                    w[i] = math::exp(logs[i] - max);
                    total += w[i];
                }
                for wi in w.iter_mut() {
                    *wi /= total;
                }
            }
            let (drift, var) = field.combine(&w, &s.drift_const, *xi);
            let z: f64 = rng.sample(StandardNormal);
            *xi += drift * grid.dt + math::sqrt(var) * sqrt_dt * z;
        }
        while next_obs < grid.observations.len() && grid.observations[next_obs] == k + 1 {
            let f = curve.inst_forward((k + 1) as f64 * grid.dt)?;
            out.push(x.iter().map(|v| v + f).collect());
            next_obs += 1;
        }
    }
    Ok(out)
}

/// Goodness of fit of samples against a mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDistance {
    /// Kolmogorov-Smirnov statistic `sup |F_n - F|`.
    pub ks: f64,
    /// `sum_bins |empirical mass - mixture mass|` over [`L1_BINS`] bins,
    /// plus the mixture mass outside the sample range.
    pub l1: f64,
    /// 1% KS critical value `1.63 / sqrt(n)`.
    pub ks_critical: f64,
    pub samples: usize,
}

impl DensityDistance {
    pub fn passes(&self) -> bool {
        self.ks <= self.ks_critical
    }
}

pub fn density_distance(samples: &[f64], mixture: &MixtureDensity) -> Result<DensityDistance> {
    let n = samples.len();
    if n < MIN_DISTANCE_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: n,
            needed: MIN_DISTANCE_SAMPLES,
        });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("samples must be finite"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let nf = n as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = mixture.cdf(x);
        ks = ks.max(f - i as f64 / nf).max((i + 1) as f64 / nf - f);
    }

    let (lo, hi) = (sorted[0], sorted[n - 1]);
    let width = (hi - lo) / L1_BINS as f64;
    let mut l1 = mixture.cdf(lo) + (1.0 - mixture.cdf(hi));
    if width > 0.0 {
        let mut counts = [0usize; L1_BINS];
        for &x in &sorted {
            let b = (((x - lo) / width) as usize).min(L1_BINS - 1);
            counts[b] += 1;
        }
        let mut prev = mixture.cdf(lo);
        for (b, &c) in counts.iter().enumerate() {
            let edge = if b + 1 == L1_BINS { hi } else { lo + (b + 1) as f64 * width };
            let cur = mixture.cdf(edge);
            l1 += (c as f64 / nf - (cur - prev)).abs();
            prev = cur;
        }
    } else {
        l1 += (1.0 - (mixture.cdf(hi) - mixture.cdf(lo))).abs();
    }

    Ok(DensityDistance {
        ks,
        l1,
        ks_critical: KS_CRITICAL_1PCT / math::sqrt(nf),
        samples: n,
    })
}
