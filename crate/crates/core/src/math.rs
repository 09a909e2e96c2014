//! Scalar helpers over `libm` so the crate builds without `std`.

pub const SQRT_2: f64 = core::f64::consts::SQRT_2;
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this magnitude of `x`, [`one_minus_exp_over`] switches to its series.
pub const SMALL_RATE: f64 = 1e-8;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// `(1 - e^{-x t}) / x`, continuous through `x = 0` where it equals `t`.
///
/// With `x = lambda` this is the Hull-White `B(T, T + t)`; with `x = 2 lambda`
/// it is the variance factor `(1 - e^{-2 lambda t}) / (2 lambda)`.
#[inline]
pub fn one_minus_exp_over(x: f64, t: f64) -> f64 {
    if x.abs() < SMALL_RATE {
        // t - x t^2 / 2 + x^2 t^3 / 6
        t * (1.0 - x * t * (0.5 - x * t / 6.0))
    } else {
        -expm1(-x * t) / x
    }
}

/// Standard normal CDF through `erfc`, accurate in both tails.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    exp(-0.5 * x * x - LN_SQRT_2PI)
}

/// Log-density of `N(mean, variance)` at `y`.
#[inline]
pub fn ln_normal_pdf(y: f64, mean: f64, variance: f64) -> f64 {
    let z = y - mean;
    -0.5 * z * z / variance - 0.5 * ln(variance) - LN_SQRT_2PI
}

/// Inverse standard normal CDF (Wichura, AS 241 `PPND16`), about 1e-16
/// relative accuracy on `(0, 1)`.
pub fn norm_inv_cdf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2509.080_928_730_122_7 * r + 33430.575_583_588_128) * r
                + 67265.770_927_008_700)
                * r
                + 45921.953_931_549_871)
                * r
                + 13731.693_765_509_461)
                * r
                + 1971.590_950_306_551_3)
                * r
                + 133.141_667_891_784_38)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((5226.495_278_852_545_5 * r + 28729.085_735_721_943) * r
                + 39307.895_800_092_710)
                * r
                + 21213.794_301_586_595)
                * r
                + 5394.196_021_424_751_1)
                * r
                + 687.187_007_492_057_91)
                * r
                + 42.313_330_701_600_911)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = sqrt(-ln(r));
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((7.745_450_142_783_414_1e-4 * r + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_61)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691_4)
            * r
            + 4.630_337_846_156_545_3)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_344_9e-4) * r
                + 0.015_198_666_563_616_457)
                * r
                + 0.148_103_976_427_480_07)
                * r
                + 0.689_767_334_985_100_05)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_758_8)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_123)
            * r
            + 0.296_560_571_828_504_89)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114_4)
            * r
            + 6.657_904_643_501_103_8)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_132_6e-4)
                * r
                + 0.014_875_361_290_850_615)
                * r
                + 0.136_929_880_922_735_8)
                * r
                + 0.599_832_206_555_887_9)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Numerically stable `ln(sum_i exp(a_i))` over a slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|&v| exp(v - max)).sum();
    max + ln(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_minus_exp_over_is_continuous_through_zero() {
        let t = 7.5;
        for &x in &[-2e-8, -1.0001e-8, -0.9999e-8, 0.0, 0.9999e-8, 1.0001e-8, 2e-8] {
            let exact = if x == 0.0 { t } else { -expm1(-x * t) / x };
            assert!((one_minus_exp_over(x, t) - exact).abs() < 1e-14 * t);
        }
        assert!((one_minus_exp_over(0.1, 10.0) - 6.321_205_588_285_577).abs() < 1e-12);
    }

    #[test]
    fn norm_cdf_reference_values() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-16);
        assert!((norm_cdf(-1.0) - 0.158_655_253_931_457_05).abs() / 0.158_655_253_931_457_05 < 1e-15);
        // far tail keeps relative accuracy
        let p = norm_cdf(-10.0);
        assert!((p - 7.619_853_024_160_527e-24).abs() / p < 1e-13);
    }

    #[test]
    fn inverse_cdf_round_trips() {
        for &p in &[1e-12, 1e-6, 0.01, 0.2, 0.5, 0.7, 0.99, 1.0 - 1e-9] {
            let x = norm_inv_cdf(p);
            assert!((norm_cdf(x) - p).abs() <= 1e-14 * p.max(1e-3), "p={p}");
        }
    }

    #[test]
    fn log_sum_exp_handles_large_offsets() {
        let v = [-1000.0, -1000.0 + ln(3.0)];
        assert!((log_sum_exp(&v) - (-1000.0 + ln(4.0))).abs() < 1e-12);
    }
}
