use proptest::prelude::*;
use rhw_core::black::{black_price, implied_vol, swaption_black};
use rhw_core::calib::{calibrate, calibrate_expiry, objective, synthetic_quotes, CalibrationConfig, Quote, QuoteSet, RhwParams};
use rhw_core::randomized::rswaption;
use rhw_core::{math, Randomization, RandomizedSpec, Randomizer, SwapRateQuote, SwaptionSide, SwaptionSpec, YieldCurve};

fn curve() -> YieldCurve {
    YieldCurve::flat(0.03).unwrap()
}

fn atm(c: &YieldCurve, expiry: f64, tenor: f64, freq: u32) -> (SwaptionSpec, f64) {
    let probe = SwaptionSpec::regular(expiry, tenor, freq, 0.0, SwaptionSide::Payer).unwrap();
    let f = SwapRateQuote::from_curve(c, &probe).unwrap().forward;
    (probe.with_strike(f), f)
}

#[test]
fn atm_shifted_price_matches_lognormal_integration() {
    let (f, s, sigma, t) = (0.03, 0.01, 0.2, 1.0);
    let sd = sigma * f64::sqrt(t);
    // E[(F_T - K)^+] with F_T + s lognormal, integrated over the normal driver.
    let payoff = |z: f64| {
        let ft = (f + s) * (sd * z - 0.5 * sd * sd).exp() - s;
        (ft - f).max(0.0) * (-0.5 * z * z).exp() / (2.0 * core::f64::consts::PI).sqrt()
    };
    let (a, b, n) = (0.0, 12.0, 20_000);
    let h = (b - a) / n as f64;
    let mut integral = payoff(a) + payoff(b);
    for k in 1..n {
        integral += if k % 2 == 1 { 4.0 } else { 2.0 } * payoff(a + k as f64 * h);
    }
    integral *= h / 3.0;
    let closed = black_price(t, f, f, sigma, SwaptionSide::Payer, s).unwrap();
    assert!((closed - integral).abs() < 1e-13, "{closed} vs {integral}");
    assert!((closed - 0.0031862).abs() < 1e-7);
}

#[test]
fn randomized_atm_price_inverts_to_a_sane_vol() {
    let c = curve();
    let (spec, _) = atm(&c, 1.0, 1.0, 1);
    let r = RandomizedSpec::new(
        Randomization::Lambda {
            eta: 0.005,
            randomizer: Randomizer::uniform(-0.15, 0.6).unwrap(),
        },
        5,
    );
    let iv = implied_vol(rswaption(&c, &r, &spec).unwrap(), &c, &spec, 0.0).unwrap();
    assert!(iv > 0.0 && iv < 2.0, "{iv}");
}

#[test]
fn swap_rate_is_the_telescoped_discount_ratio() {
    let c = curve();
    let (spec, f) = atm(&c, 1.0, 1.0, 4);
    let pays = [1.25f64, 1.5, 1.75, 2.0];
    let annuity: f64 = pays.iter().map(|&t| 0.25 * (-0.03 * t).exp()).sum();
    let telescoped = ((-0.03f64).exp() - (-0.06f64).exp()) / annuity;
    assert!((f - telescoped).abs() < 1e-15);
    let px = swaption_black(&c, &spec, 0.2, 0.01).unwrap();
    let direct = annuity * black_price(1.0, f, f, 0.2, SwaptionSide::Payer, 0.01).unwrap();
    assert!((px - direct).abs() < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn implied_vol_increases_with_price(
        expiry in 0.5..10.0f64,
        moneyness in -0.01..0.01f64,
        sigma in 0.05..0.8f64,
        shift in prop::sample::select(vec![0.0, 0.01]),
    ) {
        let c = curve();
        let (probe, f) = atm(&c, expiry, 5.0, 1);
        let spec = probe.with_strike(f + moneyness);
        let lo = swaption_black(&c, &spec, sigma, shift).unwrap();
        let hi = swaption_black(&c, &spec, sigma * 1.05, shift).unwrap();
        prop_assume!(hi > lo);
        let (a, b) = (implied_vol(lo, &c, &spec, shift).unwrap(), implied_vol(hi, &c, &spec, shift).unwrap());
        prop_assert!(b > a);
        prop_assert!((a - sigma).abs() < 1e-8 * (1.0 + sigma));
    }

    #[test]
    fn shifts_change_the_vol_but_not_the_price(
        expiry in 0.5..10.0f64,
        moneyness in -0.005..0.005f64,
        sigma in 0.1..0.5f64,
    ) {
        let c = curve();
        let (probe, f) = atm(&c, expiry, 5.0, 1);
        let spec = probe.with_strike(f + moneyness);
        let price = swaption_black(&c, &spec, sigma, 0.0).unwrap();
        let shifted = implied_vol(price, &c, &spec, 0.01).unwrap();
        prop_assert!((shifted - sigma).abs() > 1e-6);
        let repriced = swaption_black(&c, &spec, shifted, 0.01).unwrap();
        prop_assert!((repriced - price).abs() < 1e-12);
    }
}

fn strip(c: &YieldCurve, expiry: f64, params: &RhwParams) -> Vec<Quote> {
    let f = atm(c, expiry, 1.0, 1).1;
    let strikes: Vec<f64> = (-3..=3).map(|i| f + 0.005 * i as f64).collect();
    synthetic_quotes(c, params, expiry, 1.0, &strikes, 0.01, 1, 5).unwrap()
}

#[test]
fn atm_objective_is_monotone_in_eta_near_the_solution() {
    let c = curve();
    let truth = RhwParams {
        eta: 0.0091,
        lambda_mean: 0.1,
        lambda_sigma: 0.45,
    };
    let quotes = strip(&c, 1.0, &truth);
    let atm_quote = [quotes[3]];
    let at = |eta: f64| objective(&c, &RhwParams { eta, ..truth }, &atm_quote, 1, 5).unwrap();
    let below: Vec<f64> = (0..6).map(|i| at(0.0091 - 0.0005 * i as f64)).collect();
    let above: Vec<f64> = (0..6).map(|i| at(0.0091 + 0.0005 * i as f64)).collect();
    assert!(below[0] < 1e-10);
    assert!(below.windows(2).all(|w| w[1] > w[0]), "{below:?}");
    assert!(above.windows(2).all(|w| w[1] > w[0]), "{above:?}");
}

#[test]
fn atm_vol_rises_with_eta() {
    let c = curve();
    let (spec, _) = atm(&c, 2.0, 1.0, 1);
    let ivs: Vec<f64> = [0.004, 0.006, 0.008, 0.01]
        .iter()
        .map(|&eta| {
            let r = RhwParams {
                eta,
                lambda_mean: 0.1,
                lambda_sigma: 0.3,
            };
            implied_vol(rswaption(&c, &r.spec(5).unwrap(), &spec).unwrap(), &c, &spec, 0.01).unwrap()
        })
        .collect();
    assert!(ivs.windows(2).all(|w| w[1] > w[0]), "{ivs:?}");
}

#[test]
fn plain_hull_white_quotes_drive_sigma_to_its_bound() {
    let c = curve();
    let truth = RhwParams {
        eta: 0.008,
        lambda_mean: 0.1,
        lambda_sigma: 0.0,
    };
    let r = calibrate_expiry(&c, &strip(&c, 2.0, &truth), &CalibrationConfig::default()).unwrap();
    assert!(r.params.lambda_sigma < 1e-3, "{:?}", r.params);
    assert!((r.params.eta - 0.008).abs() < 1e-4, "{:?}", r.params);
    assert!(r.objective < 1e-3);
}

#[test]
fn expiries_calibrate_independently_of_order() {
    let c = curve();
    let one = RhwParams {
        eta: 0.0091,
        lambda_mean: 0.1,
        lambda_sigma: 0.45,
    };
    let three = RhwParams {
        eta: 0.0087,
        lambda_mean: 0.1,
        lambda_sigma: 0.3,
    };
    let (a, b) = (strip(&c, 1.0, &one), strip(&c, 3.0, &three));
    let cfg = CalibrationConfig {
        final_nodes: 5,
        ..CalibrationConfig::default()
    };
    let forward = calibrate(&c, &QuoteSet::new([a.clone(), b.clone()].concat()).unwrap(), &cfg).unwrap();
    let reverse = calibrate(&c, &QuoteSet::new([b.clone(), a.clone()].concat()).unwrap(), &cfg).unwrap();
    assert_eq!(forward, reverse);
    assert_eq!(forward[0], calibrate_expiry(&c, &a, &cfg).unwrap());
    assert_eq!(forward[1], calibrate_expiry(&c, &b, &cfg).unwrap());
    for r in &forward {
        let recomputed = math::sqrt(r.residuals.iter().map(|x| x * x).sum::<f64>() / r.residuals.len() as f64);
        assert!((r.objective - recomputed).abs() <= 1e-14);
    }
}
