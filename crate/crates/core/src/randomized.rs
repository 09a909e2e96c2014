//! Pricing under randomized Hull-White parameters.
//!
//! Any price under the randomized model is the quadrature-weighted sum of
//! classic Hull-White prices at parameter realizations:
//! `V = sum_n w_n V_HW(theta_n)`.

use alloc::vec::Vec;

use crate::curve::DiscountCurve;
use crate::error::{Error, Result};
use crate::hw::{self, HwParams, OptionSide, SwaptionSpec};
use crate::math;
use crate::quadrature::{quadrature_pairs, QuadraturePairs, Randomizer};

/// Joint normal law of `(eta, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateNormal {
    pub mu_eta: f64,
    pub sigma_eta: f64,
    pub mu_lambda: f64,
    pub sigma_lambda: f64,
    pub rho: f64,
}

impl BivariateNormal {
    /// Standard deviations of zero are accepted as degenerate margins.
    pub fn new(mu_eta: f64, sigma_eta: f64, mu_lambda: f64, sigma_lambda: f64, rho: f64) -> Result<Self> {
        let b = BivariateNormal {
            mu_eta,
            sigma_eta,
            mu_lambda,
            sigma_lambda,
            rho,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu_eta.is_finite() && self.mu_lambda.is_finite()) {
            return Err(Error::InvalidRandomizer("bivariate means must be finite"));
        }
        if !(self.sigma_eta.is_finite() && self.sigma_eta >= 0.0)
            || !(self.sigma_lambda.is_finite() && self.sigma_lambda >= 0.0)
        {
            return Err(Error::InvalidRandomizer("bivariate standard deviations must be non-negative"));
        }
        if !(self.rho.abs() < 1.0) {
            return Err(Error::InvalidRandomizer("correlation must lie in (-1, 1)"));
        }
        Ok(())
    }

    pub fn eta_marginal(&self) -> Randomizer {
        Randomizer::Normal {
            mean: self.mu_eta,
            std_dev: self.sigma_eta,
        }
    }

    /// Law of `lambda | eta`: mean `mu_l + (s_l / s_e) rho (eta - mu_e)`,
    /// standard deviation `sqrt(1 - rho^2) s_l`.
    pub fn lambda_given_eta(&self, eta: f64) -> Randomizer {
        let mean = if self.sigma_eta > 0.0 {
            self.mu_lambda + self.sigma_lambda / self.sigma_eta * self.rho * (eta - self.mu_eta)
        } else {
            self.mu_lambda
        };
        Randomizer::Normal {
            mean,
            std_dev: math::sqrt(1.0 - self.rho * self.rho) * self.sigma_lambda,
        }
    }
}

/// Which Hull-White parameter is random, and the value of the other one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Randomization {
    Eta { lambda: f64, randomizer: Randomizer },
    Lambda { eta: f64, randomizer: Randomizer },
    Both(BivariateNormal),
}

/// A randomization plus the quadrature sizes used to integrate over it.
/// `inner_nodes` is only used by [`Randomization::Both`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomizedSpec {
    pub randomization: Randomization,
    pub nodes: usize,
    pub inner_nodes: usize,
}

/// One parameter realization with its (joint) quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    pub weight: f64,
    pub params: HwParams,
}

/// Outer node of the bivariate rule with its conditional inner rule for lambda.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateNode {
    pub weight: f64,
    pub eta: f64,
    pub inner: QuadraturePairs,
}

/// Parameter of a [`RandomizedSpec`] that can be bumped for sensitivities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecParameter {
    /// The non-random Hull-White coordinate (`lambda` for `Eta`, `eta` for `Lambda`).
    Fixed,
    /// Index into [`Randomizer::params`].
    Randomizer(usize),
    MuEta,
    SigmaEta,
    MuLambda,
    SigmaLambda,
    Rho,
}

impl RandomizedSpec {
    pub fn new(randomization: Randomization, nodes: usize) -> Self {
        RandomizedSpec {
            randomization,
            nodes,
            inner_nodes: nodes,
        }
    }

    pub fn bivariate(b: BivariateNormal, nodes: usize, inner_nodes: usize) -> Self {
        RandomizedSpec {
            randomization: Randomization::Both(b),
            nodes,
            inner_nodes,
        }
    }

    /// Plain Hull-White expressed as a one-node randomization.
    pub fn deterministic(p: HwParams) -> Self {
        Self::new(
            Randomization::Lambda {
                eta: p.eta,
                randomizer: Randomizer::Normal {
                    mean: p.lambda,
                    std_dev: 0.0,
                },
            },
            1,
        )
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        if !matches!(self.randomization, Randomization::Both(_)) {
            self.inner_nodes = nodes;
        }
        self
    }

    /// Flattened list of parameter realizations and joint weights.
    ///
    /// Volatility nodes must be strictly positive; otherwise the offending
    /// node is reported.
    pub fn realizations(&self) -> Result<Vec<Realization>> {
        match self.randomization {
            Randomization::Eta { lambda, randomizer } => {
                let pairs = quadrature_pairs(&randomizer, self.nodes)?;
                pairs
                    .iter()
                    .enumerate()
                    .map(|(i, (w, eta))| {
                        check_eta(i, eta)?;
                        Ok(Realization {
                            weight: w,
                            params: HwParams::new(lambda, eta)?,
                        })
                    })
                    .collect()
            }
            Randomization::Lambda { eta, randomizer } => {
                let pairs = quadrature_pairs(&randomizer, self.nodes)?;
                pairs
                    .iter()
                    .map(|(w, lambda)| {
                        Ok(Realization {
                            weight: w,
                            params: HwParams::new(lambda, eta)?,
                        })
                    })
                    .collect()
            }
            Randomization::Both(b) => {
                let mut out = Vec::with_capacity(self.nodes * self.inner_nodes);
                for node in bivariate_pairs(&b, self.nodes, self.inner_nodes)? {
                    for (w, lambda) in node.inner.iter() {
                        out.push(Realization {
                            weight: node.weight * w,
                            params: HwParams::new(lambda, node.eta)?,
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn parameter(&self, which: SpecParameter) -> Result<f64> {
        match (self.randomization, which) {
            (Randomization::Eta { lambda, .. }, SpecParameter::Fixed) => Ok(lambda),
            (Randomization::Lambda { eta, .. }, SpecParameter::Fixed) => Ok(eta),
            (Randomization::Eta { randomizer, .. }, SpecParameter::Randomizer(i))
            | (Randomization::Lambda { randomizer, .. }, SpecParameter::Randomizer(i)) => randomizer
                .params()
                .get(i)
                .copied()
                .ok_or(Error::InvalidArgument("randomizer parameter index out of range")),
            (Randomization::Both(b), SpecParameter::MuEta) => Ok(b.mu_eta),
            (Randomization::Both(b), SpecParameter::SigmaEta) => Ok(b.sigma_eta),
            (Randomization::Both(b), SpecParameter::MuLambda) => Ok(b.mu_lambda),
            (Randomization::Both(b), SpecParameter::SigmaLambda) => Ok(b.sigma_lambda),
            (Randomization::Both(b), SpecParameter::Rho) => Ok(b.rho),
            _ => Err(Error::InvalidArgument("parameter does not apply to this randomization")),
        }
    }

    /// Copy of the spec with one parameter replaced, validated.
    pub fn with_parameter(&self, which: SpecParameter, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out.randomization, which) {
            (Randomization::Eta { lambda, .. }, SpecParameter::Fixed) => {
                HwParams::new(value, 0.0)?;
                *lambda = value;
            }
            (Randomization::Lambda { eta, .. }, SpecParameter::Fixed) => {
                HwParams::new(0.0, value)?;
                *eta = value;
            }
            (Randomization::Eta { randomizer, .. }, SpecParameter::Randomizer(i))
            | (Randomization::Lambda { randomizer, .. }, SpecParameter::Randomizer(i)) => {
                let mut params = randomizer.params();
                let slot = params
                    .get_mut(i)
                    .ok_or(Error::InvalidArgument("randomizer parameter index out of range"))?;
                *slot = value;
                *randomizer = randomizer.with_params(&params)?;
            }
            (Randomization::Both(b), p) => {
                match p {
                    SpecParameter::MuEta => b.mu_eta = value,
                    SpecParameter::SigmaEta => b.sigma_eta = value,
                    SpecParameter::MuLambda => b.mu_lambda = value,
                    SpecParameter::SigmaLambda => b.sigma_lambda = value,
                    SpecParameter::Rho => b.rho = value,
                    _ => return Err(Error::InvalidArgument("parameter does not apply to this randomization")),
                }
                b.validate()?;
            }
            _ => return Err(Error::InvalidArgument("parameter does not apply to this randomization")),
        }
        Ok(out)
    }
}

fn check_eta(node: usize, eta: f64) -> Result<()> {
    if eta > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveVolatility { node, value: eta })
    }
}

/// Outer rule for `eta` and, per outer node, the rule for the conditional
/// law of `lambda` given that node.
pub fn bivariate_pairs(b: &BivariateNormal, n: usize, m: usize) -> Result<Vec<BivariateNode>> {
    b.validate()?;
    let outer = quadrature_pairs(&b.eta_marginal(), n)?;
    outer
        .iter()
        .enumerate()
        .map(|(i, (w, eta))| {
            check_eta(i, eta)?;
            Ok(BivariateNode {
                weight: w,
                eta,
                inner: quadrature_pairs(&b.lambda_given_eta(eta), m)?,
            })
        })
        .collect()
}

/// `sum_n w_n pricer(theta_n)`. Errors carry the index of the failing node.
pub fn randomized_price<F>(spec: &RandomizedSpec, mut pricer: F) -> Result<f64>
where
    F: FnMut(&HwParams) -> Result<f64>,
{
    let mut total = 0.0;
    for (i, r) in spec.realizations()?.iter().enumerate() {
        let v = pricer(&r.params).map_err(|e| Error::at_node(i, e))?;
        total += r.weight * v;
    }
    Ok(total)
}

/// Randomized zero-coupon bond `P(0, T)`.
pub fn rzcb<C: DiscountCurve + ?Sized>(curve: &C, spec: &RandomizedSpec, maturity: f64) -> Result<f64> {
    let r0 = hw::initial_short_rate(curve)?;
    randomized_price(spec, |p| hw::zcb_price(curve, p, 0.0, maturity, r0))
}

/// Randomized European option on `P(T, S)`.
pub fn rzcb_option<C: DiscountCurve + ?Sized>(
    curve: &C,
    spec: &RandomizedSpec,
    expiry: f64,
    maturity: f64,
    strike: f64,
    side: OptionSide,
) -> Result<f64> {
    randomized_price(spec, |p| hw::zcb_option(curve, p, expiry, maturity, strike, side))
}

/// Randomized swaption, one Jamshidian root per realization.
pub fn rswaption<C: DiscountCurve + ?Sized>(curve: &C, spec: &RandomizedSpec, swaption: &SwaptionSpec) -> Result<f64> {
    randomized_price(spec, |p| hw::swaption_hw(curve, p, swaption))
}

/// Swaption under jointly normal `(eta, lambda)` on an `n x m` grid.
pub fn rswaption_bivariate<C: DiscountCurve + ?Sized>(
    curve: &C,
    b: &BivariateNormal,
    n: usize,
    m: usize,
    swaption: &SwaptionSpec,
) -> Result<f64> {
    rswaption(curve, &RandomizedSpec::bivariate(*b, n, m), swaption)
}

/// Finite-difference derivative and whether a one-sided stencil was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    pub value: f64,
    pub one_sided: bool,
}

/// `(f(x + d) - f(x - d)) / 2d`, falling back to a one-sided difference when
/// one of the bumped evaluations fails (e.g. leaves the parameter domain).
pub fn central_difference<F>(mut f: F, x: f64, delta: f64) -> Result<Sensitivity>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument("bump size must be positive"));
    }
    let up = f(x + delta);
    let down = f(x - delta);
    match (up, down) {
        (Ok(u), Ok(d)) => Ok(Sensitivity {
            value: (u - d) / (2.0 * delta),
            one_sided: false,
        }),
        (Ok(u), Err(_)) => Ok(Sensitivity {
            value: (u - f(x)?) / delta,
            one_sided: true,
        }),
        (Err(_), Ok(d)) => Ok(Sensitivity {
            value: (f(x)? - d) / delta,
            one_sided: true,
        }),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Sensitivity of a randomized price to one spec parameter. The quadrature
/// rule is rebuilt for every bump.
pub fn sensitivity_fd<F>(spec: &RandomizedSpec, which: SpecParameter, delta: f64, mut pricer: F) -> Result<Sensitivity>
where
    F: FnMut(&RandomizedSpec) -> Result<f64>,
{
    let x = spec.parameter(which)?;
    central_difference(|v| pricer(&spec.with_parameter(which, v)?), x, delta)
}
