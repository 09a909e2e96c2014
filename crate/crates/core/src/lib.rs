//! Randomized Hull-White short-rate model.
//!
//! A stochastic model parameter (the volatility `eta`, the mean reversion
//! `lambda`, or both jointly) is replaced by a random variable. Its raw
//! moments are turned into a Gauss quadrature rule, and every price under the
//! randomized model becomes a convex combination of classic Hull-White prices
//! evaluated at the quadrature nodes.
//!
//! The crate is `no_std` (with `alloc`). File formats, the command line and
//! parallel drivers live in the `rhw` companion crate.
//!
//! Module map:
//!
//! * [`quadrature`]: randomizers, raw moments and moment-based Gauss rules.
//! * [`curve`]: initial discount curve and instantaneous forwards.
//! * [`hw`]: constant-parameter Hull-White pricing (bonds, bond options,
//!   Jamshidian swaptions).
//! * [`randomized`]: quadrature-weighted pricing over parameter realizations.
//! * [`mixture`]: normal-mixture marginals, the induced local-volatility SDE
//!   and its Euler simulator.
//! * [`black`]: shifted-Black swaption quotes and implied volatility.
//! * [`calib`]: calibration of randomizer parameters to implied-vol strips.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod dd;
mod error;
pub mod math;

pub mod black;
pub mod calib;
pub mod curve;
pub mod hw;
pub mod mixture;
pub mod optim;
pub mod quadrature;
pub mod randomized;

pub use crate::error::{Error, Result};

pub use crate::black::{black_price, implied_vol, swaption_black, SwapRateQuote};
pub use crate::curve::{DiscountCurve, YieldCurve};
pub use crate::hw::{HwParams, OptionSide, SwaptionSide, SwaptionSpec};
pub use crate::quadrature::{golub_welsch, quadrature_pairs, scale_pairs, QuadraturePairs, Randomizer};
pub use crate::randomized::{BivariateNormal, Randomization, RandomizedSpec, Realization};
