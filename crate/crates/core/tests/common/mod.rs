//! Independent Monte Carlo oracle for Hull-White on a flat curve.
//!
//! Moments of `(r(T), int_0^T r)` come from Simpson integration of the
//! short-rate ODE and the Ornstein-Uhlenbeck kernels, not from the closed
//! forms under test. Bonds at `T` are reconstituted from the conditional law
//! of `int_T^S r` given `r(T)`.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const GRID: usize = 400;

pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n };
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

#[derive(Clone, Copy, Debug)]
pub struct FlatHw {
    pub rate: f64,
    pub lambda: f64,
    pub eta: f64,
}

impl FlatHw {
    /// `lambda * psi(z)` for a flat curve: `lambda f + eta^2 (1 - e^{-2 lambda z}) / (2 lambda)`.
    fn lambda_psi(&self, z: f64) -> f64 {
        let l = self.lambda;
        let tail = if l == 0.0 { z } else { -(-2.0 * l * z).exp_m1() / (2.0 * l) };
        l * self.rate + self.eta * self.eta * tail
    }

    /// `E[r(u)]` by integrating `dm = (lambda psi - lambda m) du`.
    pub fn mean(&self, u: f64) -> f64 {
        let l = self.lambda;
        self.rate * (-l * u).exp() + simpson(|z| self.lambda_psi(z) * (-l * (u - z)).exp(), 0.0, u, GRID)
    }

    /// `int_s^e e^{-lambda (u - s)} du`.
    fn kernel(&self, s: f64, e: f64) -> f64 {
        simpson(|u| (-self.lambda * (u - s)).exp(), s, e, 64)
    }

    /// Conditional bond coefficients: `log P(T, S) = a - b r(T)`.
    pub fn bond_coeffs(&self, t: f64, s: f64) -> (f64, f64) {
        let mt = self.mean(t);
        let b = self.kernel(t, s);
        let int_mean = simpson(|u| self.mean(u), t, s, 200);
        let var = self.eta * self.eta * simpson(|v| self.kernel(v, s).powi(2), t, s, 200);
        (-int_mean + b * mt + 0.5 * var, b)
    }
}

/// Exact sampler of `(r(T), int_0^T r du)` for one parameter set.
#[derive(Clone, Debug)]
pub struct JointSampler {
    pub mean_r: f64,
    pub mean_int: f64,
    pub sd_r: f64,
    /// Cholesky of the covariance: `int = mean + l21 z1 + l22 z2`.
    pub l21: f64,
    pub l22: f64,
}

impl JointSampler {
    pub fn new(m: &FlatHw, t: f64) -> Self {
        let e2 = m.eta * m.eta;
        let l = m.lambda;
        let var_r = e2 * simpson(|s| (-2.0 * l * (t - s)).exp(), 0.0, t, GRID);
        let var_i = e2 * simpson(|s| m.kernel(s, t).powi(2), 0.0, t, GRID);
        let cov = e2 * simpson(|s| (-l * (t - s)).exp() * m.kernel(s, t), 0.0, t, GRID);
        let sd_r = var_r.sqrt();
        let l21 = cov / sd_r;
        let l22 = (var_i - l21 * l21).max(0.0).sqrt();
        JointSampler {
            mean_r: m.mean(t),
            mean_int: simpson(|u| m.mean(u), 0.0, t, GRID),
            sd_r,
            l21,
            l22,
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        (self.mean_r + self.sd_r * z1, self.mean_int + self.l21 * z1 + self.l22 * z2)
    }
}

/// One mixture component: sampler plus bond coefficients at the pay dates.
pub struct Component {
    pub weight: f64,
    pub sampler: JointSampler,
    pub bonds: Vec<(f64, f64)>,
}

pub fn component(weight: f64, m: &FlatHw, t: f64, pay: &[f64]) -> Component {
    Component {
        weight,
        sampler: JointSampler::new(m, t),
        bonds: pay.iter().map(|&s| m.bond_coeffs(t, s)).collect(),
    }
}

/// Sample mean and standard error of `payoff(r(T), bonds) * e^{-int r}` where
/// each path first draws a component with probability equal to its weight.
pub fn mixture_mc<F>(components: &[Component], paths: usize, seed: u64, payoff: F) -> (f64, f64)
where
    F: Fn(f64, &[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cum: Vec<f64> = components
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c.weight;
            Some(*acc)
        })
        .collect();
    let total = *cum.last().unwrap();
    let mut bonds = vec![0.0; components[0].bonds.len()];
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..paths {
        let u: f64 = rng.random::<f64>() * total;
        let k = cum.iter().position(|&c| u < c).unwrap_or(components.len() - 1);
        let c = &components[k];
        let (r, int) = c.sampler.draw(&mut rng);
        for (b, &(a, bb)) in bonds.iter_mut().zip(&c.bonds) {
            *b = (a - bb * r).exp();
        }
        let v = (-int).exp() * payoff(r, &bonds);
        s += v;
        s2 += v * v;
    }
    let n = paths as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}
