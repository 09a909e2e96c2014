//! One-factor Hull-White with constant `(lambda, eta)`, fitted to the initial
//! curve:
//!
//! ```text
//! dr = lambda (psi(t) - r) dt + eta dW,   r(0) = f(0, 0)
//! psi(t) = f(0,t) + f'(0,t) / lambda + eta^2 / (2 lambda^2) (1 - e^{-2 lambda t})
//! ```
//!
//! Bonds are reconstituted as `P(T, S) = exp(A(T, S) - B(T, S) r(T))`.
//! Every `1/lambda` singularity goes through [`one_minus_exp_over`], so
//! `lambda` may be zero or negative.

use alloc::vec::Vec;

use crate::curve::DiscountCurve;
use crate::error::{Error, Result};
use crate::math::{self, norm_cdf, norm_pdf, one_minus_exp_over};

const ROOT_TOLERANCE: f64 = 1e-12;
const ROOT_BRACKET: f64 = 5.0;
const ROOT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwParams {
    /// Mean-reversion speed (1/years); any finite value.
    pub lambda: f64,
    /// Short-rate volatility (absolute); `eta = 0` is the deterministic limit.
    pub eta: f64,
}

impl HwParams {
    pub fn new(lambda: f64, eta: f64) -> Result<Self> {
        let p = HwParams { lambda, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::InvalidParameter("eta must be finite and non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionSide {
    Call,
    Put,
}

impl OptionSide {
    pub fn sign(self) -> f64 {
        match self {
            OptionSide::Call => 1.0,
            OptionSide::Put => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwaptionSide {
    Payer,
    Receiver,
}

impl SwaptionSide {
    /// `+1` payer, `-1` receiver.
    pub fn sign(self) -> f64 {
        match self {
            SwaptionSide::Payer => 1.0,
            SwaptionSide::Receiver => -1.0,
        }
    }

    /// A payer swaption is a put on the coupon bond, a receiver a call.
    pub fn bond_option_side(self) -> OptionSide {
        match self {
            SwaptionSide::Payer => OptionSide::Put,
            SwaptionSide::Receiver => OptionSide::Call,
        }
    }
}

/// European physically settled swaption on a fixed-vs-float swap.
#[derive(Debug, Clone, PartialEq)]
pub struct SwaptionSpec {
    expiry: f64,
    pay_times: Vec<f64>,
    strike: f64,
    side: SwaptionSide,
}

impl SwaptionSpec {
    pub fn new(expiry: f64, pay_times: Vec<f64>, strike: f64, side: SwaptionSide) -> Result<Self> {
        if !(expiry.is_finite() && expiry > 0.0) {
            return Err(Error::InvalidSwaption("expiry must be positive"));
        }
        if pay_times.is_empty() {
            return Err(Error::InvalidSwaption("no payment dates"));
        }
        if pay_times[0] <= expiry {
            return Err(Error::InvalidSwaption("first payment must follow expiry"));
        }
        if pay_times.iter().any(|t| !t.is_finite()) || pay_times.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidSwaption("payment dates must be strictly increasing"));
        }
        if !strike.is_finite() {
            return Err(Error::InvalidSwaption("strike must be finite"));
        }
        Ok(SwaptionSpec {
            expiry,
            pay_times,
            strike,
            side,
        })
    }

    /// Regular schedule: `tenor * frequency` payments, `1/frequency` apart.
    pub fn regular(expiry: f64, tenor: f64, frequency: u32, strike: f64, side: SwaptionSide) -> Result<Self> {
        if frequency == 0 || !(tenor > 0.0) {
            return Err(Error::InvalidSwaption("tenor and frequency must be positive"));
        }
        let count = libm::round(tenor * frequency as f64) as usize;
        if count == 0 || (count as f64 - tenor * frequency as f64).abs() > 1e-9 {
            return Err(Error::InvalidSwaption("tenor is not a whole number of periods"));
        }
        let dt = 1.0 / frequency as f64;
        let pay_times = (1..=count).map(|k| expiry + k as f64 * dt).collect();
        Self::new(expiry, pay_times, strike, side)
    }

    pub fn expiry(&self) -> f64 {
        self.expiry
    }

    pub fn pay_times(&self) -> &[f64] {
        &self.pay_times
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn side(&self) -> SwaptionSide {
        self.side
    }

    pub fn tenor(&self) -> f64 {
        self.pay_times[self.pay_times.len() - 1] - self.expiry
    }

    pub fn with_strike(&self, strike: f64) -> Self {
        SwaptionSpec {
            strike,
            ..self.clone()
        }
    }

    pub fn with_side(&self, side: SwaptionSide) -> Self {
        SwaptionSpec {
            side,
            ..self.clone()
        }
    }

    /// Accrual fractions `tau_k = T_k - T_{k-1}`, with `T_{i-1}` the expiry.
    pub fn accruals(&self) -> Vec<f64> {
        let mut prev = self.expiry;
        self.pay_times
            .iter()
            .map(|&t| {
                let tau = t - prev;
                prev = t;
                tau
            })
            .collect()
    }

    /// Coupon-bond coefficients `c_k = K tau_k`, plus the notional on the last.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.accruals().iter().map(|tau| self.strike * tau).collect();
        if let Some(last) = c.last_mut() {
            *last += 1.0;
        }
        c
    }
}

/// `B(T, S; lambda) = (1 - e^{-lambda (S - T)}) / lambda`, equal to `S - T`
/// in the `lambda -> 0` limit.
pub fn b_fun(lambda: f64, t: f64, s: f64) -> f64 {
    one_minus_exp_over(lambda, s - t)
}

/// `A(T, S)` such that `P(T, S) = exp(A - B r(T))`:
/// `log(P(0,S)/P(0,T)) + B f(0,T) - eta^2/(4 lambda) (1 - e^{-2 lambda T}) B^2`.
pub fn a_fun<C: DiscountCurve + ?Sized>(curve: &C, p: &HwParams, t: f64, s: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= t) {
        return Err(Error::InvalidArgument("need 0 <= T <= S"));
    }
    let b = b_fun(p.lambda, t, s);
    let log_ratio = curve.log_discount(s)? - curve.log_discount(t)?;
    Ok(log_ratio + b * curve.inst_forward(t)? - 0.5 * p.eta * p.eta * one_minus_exp_over(2.0 * p.lambda, t) * b * b)
}

/// Model bond `P(T, S)` given the short rate `r(T)`.
/// Evaluated as `log(P(0,S)/P(0,T)) + B (f(0,T) - r) - convexity` so that
/// large `B` (strongly negative `lambda`) does not cancel against `f(0,T)`.
pub fn zcb_price<C: DiscountCurve + ?Sized>(curve: &C, p: &HwParams, t: f64, s: f64, short_rate: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= t) {
        return Err(Error::InvalidArgument("need 0 <= T <= S"));
    }
    let b = b_fun(p.lambda, t, s);
    let log_ratio = curve.log_discount(s)? - curve.log_discount(t)?;
    let convexity = 0.5 * p.eta * p.eta * one_minus_exp_over(2.0 * p.lambda, t) * b * b;
    Ok(math::exp(log_ratio + b * (curve.inst_forward(t)? - short_rate) - convexity))
}

/// Initial short rate `r(0) = f(0, 0)`.
pub fn initial_short_rate<C: DiscountCurve + ?Sized>(curve: &C) -> Result<f64> {
    curve.inst_forward(0.0)
}

/// Mean and variance of the normally distributed `r(t)`:
/// `f(0,t) + eta^2/(2 lambda^2)(1 - e^{-lambda t})^2` and
/// `eta^2 (1 - e^{-2 lambda t}) / (2 lambda)`.
pub fn short_rate_moments<C: DiscountCurve + ?Sized>(curve: &C, p: &HwParams, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument("time must be non-negative"));
    }
    let (shift, variance) = short_rate_deviation_moments(p, t);
    Ok((curve.inst_forward(t)? + shift, variance))
}

/// Moments of `r(t) - f(0, t)`, which do not depend on the curve.
pub fn short_rate_deviation_moments(p: &HwParams, t: f64) -> (f64, f64) {
    let b = one_minus_exp_over(p.lambda, t);
    let eta2 = p.eta * p.eta;
    (0.5 * eta2 * b * b, eta2 * one_minus_exp_over(2.0 * p.lambda, t))
}

/// Standard deviation of `log P(T, S)` seen from today.
pub fn bond_option_vol(p: &HwParams, expiry: f64, maturity: f64) -> f64 {
    p.eta * math::sqrt(one_minus_exp_over(2.0 * p.lambda, expiry)) * b_fun(p.lambda, expiry, maturity)
}

/// European option at `t = 0` on the bond `P(T, S)` with strike `K`.
pub fn zcb_option<C: DiscountCurve + ?Sized>(
    curve: &C,
    p: &HwParams,
    expiry: f64,
    maturity: f64,
    strike: f64,
    side: OptionSide,
) -> Result<f64> {
    if !(expiry > 0.0 && maturity > expiry) {
        return Err(Error::InvalidArgument("need 0 < T < S"));
    }
    if !(strike > 0.0) {
        return Err(Error::InvalidArgument("bond option strike must be positive"));
    }
    let p_s = curve.discount(maturity)?;
    let p_t = curve.discount(expiry)?;
    let chi = side.sign();
    let sigma = bond_option_vol(p, expiry, maturity);
    if sigma == 0.0 {
        return Ok((chi * (p_s - strike * p_t)).max(0.0));
    }
    let d = math::ln(p_s / (p_t * strike)) / sigma + 0.5 * sigma;
    Ok(chi * p_s * norm_cdf(chi * d) - chi * strike * p_t * norm_cdf(chi * (d - sigma)))
}

/// `d zcb_option / d eta` (identical for calls and puts).
pub fn zcb_option_vega<C: DiscountCurve + ?Sized>(
    curve: &C,
    p: &HwParams,
    expiry: f64,
    maturity: f64,
    strike: f64,
) -> Result<f64> {
    let p_s = curve.discount(maturity)?;
    let p_t = curve.discount(expiry)?;
    let unit = math::sqrt(one_minus_exp_over(2.0 * p.lambda, expiry)) * b_fun(p.lambda, expiry, maturity);
    let sigma = p.eta * unit;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let d = math::ln(p_s / (p_t * strike)) / sigma + 0.5 * sigma;
    Ok(p_s * norm_pdf(d) * unit)
}

/// Critical rate `r*` with `sum_k c_k P(T, T_k; r*) = 1` and the implied
/// bond strikes `P(T, T_k; r*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JamshidianRoot {
    pub rate: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bond_strikes: Vec<f64>,
}

pub fn jamshidian_rstar<C: DiscountCurve + ?Sized>(curve: &C, p: &HwParams, spec: &SwaptionSpec) -> Result<JamshidianRoot> {
    let t = spec.expiry();
    let coeffs = spec.coefficients();
    if coeffs.iter().any(|&c| c < 0.0) || coeffs[coeffs.len() - 1] <= 0.0 {
        return Err(Error::InvalidSwaption("coupon-bond coefficients must be non-negative"));
    }
    let terms: Vec<(f64, f64, f64)> = spec
        .pay_times()
        .iter()
        .zip(&coeffs)
        .map(|(&tk, &c)| Ok((c, a_fun(curve, p, t, tk)?, b_fun(p.lambda, t, tk))))
        .collect::<Result<_>>()?;

    // Newton runs on h(r) = log sum_k c_k e^{A_k - B_k r}, which is close to
    // linear in r even when some B_k are large; the residual reported is
    // g(r) = e^h - 1. Both are strictly decreasing since B_k > 0.
    let live: Vec<(f64, f64, f64)> = terms.iter().copied().filter(|t| t.0 > 0.0).collect();
    let eval = |r: f64| -> (f64, f64) {
        let max = live
            .iter()
            .map(|&(c, a, b)| math::ln(c) + a - b * r)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut dsum = 0.0;
        for &(c, a, b) in &live {
            let v = math::exp(math::ln(c) + a - b * r - max);
            sum += v;
            dsum -= b * v;
        }
        (max + math::ln(sum), dsum / sum)
    };
    let residual = |h: f64| math::expm1(h);

    let (mut lo, mut hi) = (-ROOT_BRACKET, ROOT_BRACKET);
    let (h_lo, _) = eval(lo);
    let (h_hi, _) = eval(hi);
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return Err(Error::RootNotBracketed {
            low: lo,
            high: hi,
            low_residual: residual(h_lo),
            high_residual: residual(h_hi),
        });
    }

    let mut r = curve.inst_forward(t)?.clamp(lo, hi);
    for iter in 1..=ROOT_MAX_ITER {
        let (h, dh) = eval(r);
        let g = residual(h);
        if g.abs() <= ROOT_TOLERANCE {
            return Ok(JamshidianRoot {
                rate: r,
                residual: g,
                iterations: iter,
                bond_strikes: terms.iter().map(|&(_, a, b)| math::exp(a - b * r)).collect(),
            });
        }
        if g > 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let newton = r - h / dh;
        r = if dh < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * r.abs().max(1.0) {
            return Err(Error::RootNoConvergence {
                iterations: iter,
                x: r,
                residual: residual(eval(r).0),
            });
        }
    }
    Err(Error::RootNoConvergence {
        iterations: ROOT_MAX_ITER,
        x: r,
        residual: residual(eval(r).0),
    })
}

/// Swaption under Hull-White via the Jamshidian decomposition into bond options.
pub fn swaption_hw<C: DiscountCurve + ?Sized>(curve: &C, p: &HwParams, spec: &SwaptionSpec) -> Result<f64> {
    let root = jamshidian_rstar(curve, p, spec)?;
    let side = spec.side().bond_option_side();
    let t = spec.expiry();
    spec.coefficients()
        .iter()
        .zip(spec.pay_times())
        .zip(&root.bond_strikes)
        .map(|((&c, &tk), &k)| {
            if c == 0.0 {
                Ok(0.0)
            } else if k == 0.0 {
                // strike underflowed: the call is the bond itself, the put is worthless
                Ok(match side {
                    OptionSide::Call => c * curve.discount(tk)?,
                    OptionSide::Put => 0.0,
                })
            } else {
                Ok(c * zcb_option(curve, p, t, tk, k, side)?)
            }
        })
        .sum()
}

/// Discounted value at `t = 0` of the underlying forward-starting swap,
/// `alpha (P(0,T) - sum_k c_k P(0,T_k))` with `alpha = +1` for a payer.
pub fn forward_swap_value<C: DiscountCurve + ?Sized>(curve: &C, spec: &SwaptionSpec) -> Result<f64> {
    let mut v = curve.discount(spec.expiry())?;
    for (&c, &tk) in spec.coefficients().iter().zip(spec.pay_times()) {
        v -= c * curve.discount(tk)?;
    }
    Ok(spec.side().sign() * v)
}
