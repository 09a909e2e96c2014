//! Shifted-Black (displaced lognormal) swaption quotes.

use crate::curve::DiscountCurve;
use crate::error::{Error, Result};
use crate::hw::{SwaptionSide, SwaptionSpec};
use crate::math::{self, norm_cdf, norm_pdf};

const IV_TOLERANCE: f64 = 1e-14;
const IV_MAX_ITER: usize = 300;
const IV_MAX_SIGMA: f64 = 1e3;

/// Undiscounted shifted-Black price of an option on a forward `F0`.
/// `Payer` is the call on the rate, `Receiver` the put.
pub fn black_price(expiry: f64, strike: f64, forward: f64, sigma: f64, side: SwaptionSide, shift: f64) -> Result<f64> {
    if !(forward + shift > 0.0 && strike + shift > 0.0) {
        return Err(Error::InvalidArgument("shifted forward and strike must be positive"));
    }
    if !(sigma >= 0.0 && expiry > 0.0) {
        return Err(Error::InvalidArgument("need sigma >= 0 and expiry > 0"));
    }
    let a = side.sign();
    let sd = sigma * math::sqrt(expiry);
    if sd == 0.0 {
        return Ok((a * (forward - strike)).max(0.0));
    }
    let (f, k) = (forward + shift, strike + shift);
    let d1 = (math::ln(f / k) + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    Ok(a * f * norm_cdf(a * d1) - a * k * norm_cdf(a * d2))
}

/// `d black_price / d sigma`.
pub fn black_vega(expiry: f64, strike: f64, forward: f64, sigma: f64, shift: f64) -> f64 {
    let sd = sigma * math::sqrt(expiry);
    if sd <= 0.0 {
        return 0.0;
    }
    let (f, k) = (forward + shift, strike + shift);
    let d1 = (math::ln(f / k) + 0.5 * sd * sd) / sd;
    f * norm_pdf(d1) * math::sqrt(expiry)
}

/// Forward swap rate and annuity of a swaption's underlying, read off the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapRateQuote {
    pub forward: f64,
    pub annuity: f64,
    pub expiry: f64,
}

impl SwapRateQuote {
    /// `S0 = (P(0,T) - P(0,T_m)) / sum_k tau_k P(0,T_k)`.
    pub fn from_curve<C: DiscountCurve + ?Sized>(curve: &C, spec: &SwaptionSpec) -> Result<Self> {
        let mut annuity = 0.0;
        for (&tau, &t) in spec.accruals().iter().zip(spec.pay_times()) {
            annuity += tau * curve.discount(t)?;
        }
        if !(annuity > 0.0) {
            return Err(Error::InvalidSwaption("annuity must be positive"));
        }
        let last = spec.pay_times()[spec.pay_times().len() - 1];
        let forward = (curve.discount(spec.expiry())? - curve.discount(last)?) / annuity;
        Ok(SwapRateQuote {
            forward,
            annuity,
            expiry: spec.expiry(),
        })
    }
}

/// Swaption price as annuity times the shifted-Black price on the swap rate.
pub fn swaption_black<C: DiscountCurve + ?Sized>(curve: &C, spec: &SwaptionSpec, sigma: f64, shift: f64) -> Result<f64> {
    let q = SwapRateQuote::from_curve(curve, spec)?;
    Ok(q.annuity * black_price(q.expiry, spec.strike(), q.forward, sigma, spec.side(), shift)?)
}

/// Shifted-Black volatility reproducing `price`.
///
/// The admissible band runs from the discounted intrinsic value to
/// `annuity (S0 + s)` for payers and `annuity (K + s)` for receivers.
pub fn implied_vol<C: DiscountCurve + ?Sized>(price: f64, curve: &C, spec: &SwaptionSpec, shift: f64) -> Result<f64> {
    let q = SwapRateQuote::from_curve(curve, spec)?;
    implied_vol_from_quote(price, &q, spec.strike(), spec.side(), shift)
}

pub fn implied_vol_from_quote(price: f64, q: &SwapRateQuote, strike: f64, side: SwaptionSide, shift: f64) -> Result<f64> {
    let (f, k, t) = (q.forward, strike, q.expiry);
    if !(f + shift > 0.0 && k + shift > 0.0) {
        return Err(Error::InvalidArgument("shifted forward and strike must be positive"));
    }
    let lower = q.annuity * (side.sign() * (f - k)).max(0.0);
    let upper = q.annuity
        * match side {
            SwaptionSide::Payer => f + shift,
            SwaptionSide::Receiver => k + shift,
        };
    if !(price.is_finite() && price >= lower - 1e-15 * q.annuity && price < upper) {
        return Err(Error::PriceOutsideBand { price, lower, upper });
    }
    let target = price / q.annuity;
    if target <= lower / q.annuity {
        return Ok(0.0);
    }
    let g = |s: f64| -> Result<f64> { Ok(black_price(t, k, f, s, side, shift)? - target) };

    let (mut lo, mut hi) = (0.0, 1.0);
    while g(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > IV_MAX_SIGMA {
            return Err(Error::PriceOutsideBand { price, lower, upper });
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..IV_MAX_ITER {
        let r = g(s)?;
        if r == 0.0 {
            return Ok(s);
        }
        if r > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let vega = black_vega(t, k, f, s, shift);
        let newton = if vega > 0.0 { s - r / vega } else { f64::NAN };
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - s).abs() < IV_TOLERANCE || hi - lo < IV_TOLERANCE {
            return Ok(next);
        }
        s = next;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::YieldCurve;

    #[test]
    fn zero_vol_is_intrinsic_and_parity_holds() {
        let v = black_price(1.0, 0.02, 0.03, 0.0, SwaptionSide::Payer, 0.0).unwrap();
        assert!((v - 0.01).abs() < 1e-16);
        for &s in &[0.0, 0.01] {
            let c = black_price(2.0, 0.025, 0.03, 0.3, SwaptionSide::Payer, s).unwrap();
            let p = black_price(2.0, 0.025, 0.03, 0.3, SwaptionSide::Receiver, s).unwrap();
            assert!((c - p - 0.005).abs() < 1e-15);
        }
    }

    #[test]
    fn shifted_atm_closed_form() {
        let v = black_price(1.0, 0.03, 0.03, 0.2, SwaptionSide::Payer, 0.01).unwrap();
        let expected = 0.04 * (2.0 * norm_cdf(0.1) - 1.0);
        assert!((v - expected).abs() < 1e-16);
        assert!((v - 0.003_186_2).abs() < 1e-7);
    }

    #[test]
    fn swaption_black_uses_curve_annuity() {
        let c = YieldCurve::flat(0.03).unwrap();
        let spec = SwaptionSpec::regular(1.0, 1.0, 4, 0.0, SwaptionSide::Payer).unwrap();
        let q = SwapRateQuote::from_curve(&c, &spec).unwrap();
        let atm = spec.with_strike(q.forward);
        let annuity: f64 = [1.25, 1.5, 1.75, 2.0].iter().map(|&t| 0.25 * math::exp(-0.03 * t)).sum();
        assert!((q.annuity - annuity).abs() < 1e-15);
        let price = swaption_black(&c, &atm, 0.2, 0.01).unwrap();
        let direct = annuity * black_price(1.0, q.forward, q.forward, 0.2, SwaptionSide::Payer, 0.01).unwrap();
        assert!((price - direct).abs() < 1e-16);
        assert_eq!(swaption_black(&c, &atm, 0.0, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn implied_vol_round_trips() {
        let c = YieldCurve::flat(0.03).unwrap();
        for side in [SwaptionSide::Payer, SwaptionSide::Receiver] {
            for &k in &[0.02, 0.03, 0.045] {
                let spec = SwaptionSpec::regular(2.0, 5.0, 1, k, side).unwrap();
                for &sigma in &[0.05, 0.2, 1.0] {
                    let price = swaption_black(&c, &spec, sigma, 0.01).unwrap();
                    let iv = implied_vol(price, &c, &spec, 0.01).unwrap();
                    assert!((iv - sigma).abs() < 1e-10, "{side:?} k={k} sigma={sigma} iv={iv}");
                }
            }
        }
    }

    #[test]
    fn implied_vol_band() {
        let c = YieldCurve::flat(0.03).unwrap();
        let spec = SwaptionSpec::regular(1.0, 2.0, 1, 0.02, SwaptionSide::Payer).unwrap();
        let q = SwapRateQuote::from_curve(&c, &spec).unwrap();
        let intrinsic = q.annuity * (q.forward - 0.02);
        assert_eq!(implied_vol(intrinsic, &c, &spec, 0.0).unwrap(), 0.0);
        assert!(matches!(implied_vol(0.5 * intrinsic, &c, &spec, 0.0), Err(Error::PriceOutsideBand { .. })));
        assert!(implied_vol(q.annuity * q.forward, &c, &spec, 0.0).is_err());
    }
}
