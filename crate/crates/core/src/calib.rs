//! Calibration of randomizer parameters to per-expiry implied-vol strips.
//!
//! The default scheme fixes the mean of a normal mean-reversion randomizer
//! and fits `(eta, sigma)`: `lambda ~ N(mean, sigma^2)`. The fully free
//! scheme also fits the mean. The loss is the RMSE of implied-vol residuals
//! in vol points (`100 * (model - market)`).

use alloc::vec::Vec;

use crate::black::{implied_vol_from_quote, SwapRateQuote};
use crate::curve::DiscountCurve;
use crate::error::{Error, Result};
use crate::hw::{SwaptionSide, SwaptionSpec};
use crate::math;
use crate::optim::{multi_start, Bounds, NelderMeadConfig};
use crate::quadrature::Randomizer;
use crate::randomized::{rswaption, Randomization, RandomizedSpec};

/// Objective value returned when a trial point cannot be priced.
pub const PENALTY: f64 = 1e3;

/// One market quote. `tenor` is in years; the schedule is regular with the
/// configured payment frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quote {
    pub expiry: f64,
    pub tenor: f64,
    pub strike: f64,
    pub market_iv: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuoteSet {
    quotes: Vec<Quote>,
}

impl QuoteSet {
    pub fn new(quotes: Vec<Quote>) -> Result<Self> {
        if quotes.is_empty() {
            return Err(Error::EmptyQuotes);
        }
        for (i, q) in quotes.iter().enumerate() {
            if !(q.expiry > 0.0 && q.tenor > 0.0) {
                return Err(Error::InvalidQuote("expiry and tenor must be positive"));
            }
            if !(q.market_iv.is_finite() && q.market_iv > 0.0) {
                return Err(Error::InvalidQuote("implied volatility must be positive"));
            }
            if !(q.strike.is_finite() && q.shift.is_finite() && q.strike + q.shift > 0.0) {
                return Err(Error::InvalidQuote("shifted strike must be positive"));
            }
            if quotes[..i].iter().any(|p| p.expiry == q.expiry && p.tenor == q.tenor && p.strike == q.strike) {
                return Err(Error::InvalidQuote("duplicate strike within an expiry"));
            }
        }
        Ok(QuoteSet { quotes })
    }

    pub fn quotes(&self) -> &[Quote] {
        &self.quotes
    }

    /// Quotes grouped by expiry, expiries ascending, input order kept within
    /// each group.
    pub fn by_expiry(&self) -> Vec<(f64, Vec<Quote>)> {
        let mut expiries: Vec<f64> = self.quotes.iter().map(|q| q.expiry).collect();
        expiries.sort_by(f64::total_cmp);
        expiries.dedup();
        expiries
            .into_iter()
            .map(|t| (t, self.quotes.iter().copied().filter(|q| q.expiry == t).collect()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// `lambda ~ N(mean, sigma^2)`, `(eta, sigma)` free.
    FixedMean { mean: f64 },
    /// `lambda ~ N(mean, sigma^2)`, `(eta, mean, sigma)` free.
    FullyFree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    pub scheme: Scheme,
    /// Quadrature size during the search.
    pub search_nodes: usize,
    /// Quadrature size of the final repricing. When some realization cannot
    /// be priced at this size (typically an extreme mean-reversion node
    /// pushing the Jamshidian root out of its bracket), the largest smaller
    /// size that prices is used instead.
    pub final_nodes: usize,
    /// Payments per year of the underlying swaps.
    pub frequency: u32,
    pub eta_bounds: (f64, f64),
    pub sigma_bounds: (f64, f64),
    pub mean_bounds: (f64, f64),
    /// Multi-start points per dimension.
    pub starts_per_dim: usize,
    pub optimizer: NelderMeadConfig,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        CalibrationConfig {
            scheme: Scheme::FixedMean { mean: 0.1 },
            search_nodes: 5,
            final_nodes: 20,
            frequency: 1,
            eta_bounds: (1e-4, 0.05),
            sigma_bounds: (0.0, 0.6),
            mean_bounds: (-0.5, 1.0),
            starts_per_dim: 3,
            optimizer: NelderMeadConfig::default(),
        }
    }
}

/// Model parameters of one expiry: `eta` and `lambda ~ N(mean, sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhwParams {
    pub eta: f64,
    pub lambda_mean: f64,
    pub lambda_sigma: f64,
}

impl RhwParams {
    pub fn spec(&self, nodes: usize) -> Result<RandomizedSpec> {
        Ok(RandomizedSpec::new(
            Randomization::Lambda {
                eta: self.eta,
                randomizer: Randomizer::normal(self.lambda_mean, self.lambda_sigma)?,
            },
            nodes,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub expiry: f64,
    pub params: RhwParams,
    /// RMSE in vol points at `final_nodes`; equals the RMSE of `residuals`.
    pub objective: f64,
    /// Quadrature size actually used for `objective` and `residuals`.
    pub final_nodes: usize,
    /// Best RMSE found during the search at `search_nodes`.
    pub search_objective: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// `100 * (model_iv - market_iv)` per quote at `final_nodes`.
    pub residuals: Vec<f64>,
}

/// Swaption for a quote, on the out-of-the-money side.
pub fn quote_swaption<C: DiscountCurve + ?Sized>(curve: &C, q: &Quote, frequency: u32) -> Result<(SwaptionSpec, SwapRateQuote)> {
    let spec = SwaptionSpec::regular(q.expiry, q.tenor, frequency, q.strike, SwaptionSide::Payer)?;
    let rate = SwapRateQuote::from_curve(curve, &spec)?;
    let side = if q.strike >= rate.forward {
        SwaptionSide::Payer
    } else {
        SwaptionSide::Receiver
    };
    Ok((spec.with_side(side), rate))
}

/// Model implied vol of each quote's swaption under `spec`.
pub fn model_ivs<C: DiscountCurve + ?Sized>(curve: &C, spec: &RandomizedSpec, quotes: &[Quote], frequency: u32) -> Result<Vec<f64>> {
    quotes
        .iter()
        .map(|q| {
            let (swaption, rate) = quote_swaption(curve, q, frequency)?;
            let price = rswaption(curve, spec, &swaption)?;
            implied_vol_from_quote(price, &rate, q.strike, swaption.side(), q.shift)
        })
        .collect()
}

/// Residuals in vol points.
pub fn residuals<C: DiscountCurve + ?Sized>(curve: &C, spec: &RandomizedSpec, quotes: &[Quote], frequency: u32) -> Result<Vec<f64>> {
    let ivs = model_ivs(curve, spec, quotes, frequency)?;
    Ok(ivs.iter().zip(quotes).map(|(m, q)| 100.0 * (m - q.market_iv)).collect())
}

pub fn rmse(residuals: &[f64]) -> f64 {
    if residuals.is_empty() {
        return 0.0;
    }
    math::sqrt(residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64)
}

/// Implied-vol RMSE in vol points of `params` against `quotes`.
pub fn objective<C: DiscountCurve + ?Sized>(
    curve: &C,
    params: &RhwParams,
    quotes: &[Quote],
    frequency: u32,
    nodes: usize,
) -> Result<f64> {
    if quotes.is_empty() {
        return Err(Error::EmptyQuotes);
    }
    Ok(rmse(&residuals(curve, &params.spec(nodes)?, quotes, frequency)?))
}

fn unpack(scheme: Scheme, x: &[f64]) -> RhwParams {
    match scheme {
        Scheme::FixedMean { mean } => RhwParams {
            eta: x[0],
            lambda_mean: mean,
            lambda_sigma: x[1],
        },
        Scheme::FullyFree => RhwParams {
            eta: x[0],
            lambda_mean: x[1],
            lambda_sigma: x[2],
        },
    }
}

/// Calibrates one expiry's strip.
pub fn calibrate_expiry<C: DiscountCurve + ?Sized>(curve: &C, quotes: &[Quote], config: &CalibrationConfig) -> Result<CalibrationResult> {
    if quotes.is_empty() {
        return Err(Error::EmptyQuotes);
    }
    let expiry = quotes[0].expiry;
    if quotes.iter().any(|q| q.expiry != expiry) {
        return Err(Error::InvalidQuote("strip mixes expiries"));
    }
    let (e, s, m) = (config.eta_bounds, config.sigma_bounds, config.mean_bounds);
    let bounds = match config.scheme {
        Scheme::FixedMean { .. } => Bounds::new(alloc::vec![e.0, s.0], alloc::vec![e.1, s.1])?,
        Scheme::FullyFree => Bounds::new(alloc::vec![e.0, m.0, s.0], alloc::vec![e.1, m.1, s.1])?,
    };
    let f = |x: &[f64]| -> f64 {
        objective(curve, &unpack(config.scheme, x), quotes, config.frequency, config.search_nodes).unwrap_or(PENALTY)
    };
    let best = multi_start(f, &bounds, config.starts_per_dim, &config.optimizer);
    if !(best.value < PENALTY) {
        return Err(Error::CalibrationFailed {
            best_objective: best.value,
        });
    }
    let params = unpack(config.scheme, &best.x);
    let mut last_err = None;
    let mut priced = None;
    for n in (config.search_nodes.min(config.final_nodes)..=config.final_nodes).rev() {
        match residuals(curve, &params.spec(n)?, quotes, config.frequency) {
            Ok(r) => {
                priced = Some((n, r));
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (final_nodes, res) = match (priced, last_err) {
        (Some(p), _) => p,
        (None, Some(e)) => return Err(e),
        (None, None) => return Err(Error::InvalidArgument("empty repricing range")),
    };
    Ok(CalibrationResult {
        expiry,
        params,
        objective: rmse(&res),
        final_nodes,
        search_objective: best.value,
        evaluations: best.evaluations,
        iterations: best.iterations,
        converged: best.converged,
        residuals: res,
    })
}

/// Independent calibration of every expiry in the set, expiries ascending.
pub fn calibrate<C: DiscountCurve + ?Sized>(curve: &C, quotes: &QuoteSet, config: &CalibrationConfig) -> Result<Vec<CalibrationResult>> {
    quotes
        .by_expiry()
        .iter()
        .map(|(_, strip)| calibrate_expiry(curve, strip, config))
        .collect()
}

/// Quotes generated by the model itself, for round-trip checks.
pub fn synthetic_quotes<C: DiscountCurve + ?Sized>(
    curve: &C,
    params: &RhwParams,
    expiry: f64,
    tenor: f64,
    strikes: &[f64],
    shift: f64,
    frequency: u32,
    nodes: usize,
) -> Result<Vec<Quote>> {
    let templates: Vec<Quote> = strikes
        .iter()
        .map(|&k| Quote {
            expiry,
            tenor,
            strike: k,
            market_iv: 1.0,
            shift,
        })
        .collect();
    let ivs = model_ivs(curve, &params.spec(nodes)?, &templates, frequency)?;
    Ok(templates
        .into_iter()
        .zip(ivs)
        .map(|(q, iv)| Quote { market_iv: iv, ..q })
        .collect())
}
