//! Bounded Nelder-Mead simplex search with deterministic multi-start.
//!
//! The search runs in box-normalized coordinates `u in [0, 1]^d`; trial
//! points outside the box are projected back onto it.

use core::cell::Cell;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig {
    /// Simplex diameter (normalized, max-norm) below which the search may stop.
    pub x_tolerance: f64,
    /// Spread of objective values across the simplex below which it may stop.
    pub f_tolerance: f64,
    /// Edge length of the initial simplex, normalized.
    pub initial_step: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            x_tolerance: 1e-6,
            f_tolerance: 1e-8,
            initial_step: 0.1,
            max_evaluations: 2_000,
        }
    }
}

/// Axis-aligned box of admissible parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidArgument("bounds need equal non-zero length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return Err(Error::InvalidArgument("each bound needs lower < upper"));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn to_physical(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &h))| l + v.clamp(0.0, 1.0) * (h - l))
            .collect()
    }

    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &h))| ((v - l) / (h - l)).clamp(0.0, 1.0))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for p in &simplex[1..] {
        for (a, b) in p.iter().zip(&simplex[0]) {
            d = d.max((a - b).abs());
        }
    }
    d
}

/// Minimizes `f` over `bounds` from `start` (physical units).
pub fn nelder_mead<F>(mut f: F, bounds: &Bounds, start: &[f64], config: &NelderMeadConfig) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = bounds.dim();
    let evals = Cell::new(0usize);
    let mut eval = |u: &[f64]| -> f64 {
        evals.set(evals.get() + 1);
        let v = f(&bounds.to_physical(u));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let project = |u: &mut Vec<f64>| {
        for v in u.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    };

    let u0 = bounds.to_unit(start);
    let mut simplex: Vec<Vec<f64>> = vec![u0.clone()];
    for i in 0..d {
        let mut p = u0.clone();
        // step inward when the start sits on the upper face
        p[i] = if p[i] + config.initial_step <= 1.0 {
            p[i] + config.initial_step
        } else {
            p[i] - config.initial_step
        };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| eval(p)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        if diameter(&simplex) < config.x_tolerance && spread < config.f_tolerance {
            converged = true;
            break;
        }
        if evals.get() >= config.max_evaluations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; d];
        for p in &simplex[..d] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / d as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[d])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            project(&mut p);
            p
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(gamma);
            let fe = eval(&xe);
            if fe < fr {
                simplex[d] = xe;
                values[d] = fe;
            } else {
                simplex[d] = xr;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = xr;
            values[d] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[d] {
            let p = along(rho);
            let v = eval(&p);
            (p, v)
        } else {
            let p = along(-rho);
            let v = eval(&p);
            (p, v)
        };
        if fc < values[d].min(fr) {
            simplex[d] = xc;
            values[d] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=d {
            let p: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + sigma * (v - b))
                .collect();
            values[i] = eval(&p);
            simplex[i] = p;
        }
    }

    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    OptimResult {
        x: bounds.to_physical(&simplex[best]),
        value: values[best],
        evaluations: evals.get(),
        iterations,
        converged,
    }
}

/// Runs [`nelder_mead`] from every point of a regular `per_dim^d` grid of
/// cell centres inside the box and keeps the best result. Evaluation counts
/// are summed over all starts.
pub fn multi_start<F>(mut f: F, bounds: &Bounds, per_dim: usize, config: &NelderMeadConfig) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = bounds.dim();
    let per_dim = per_dim.max(1);
    let total = per_dim.pow(d as u32);
    let mut best: Option<OptimResult> = None;
    let mut evaluations = 0;
    for idx in 0..total {
        let mut k = idx;
        let u: Vec<f64> = (0..d)
            .map(|_| {
                let i = k % per_dim;
                k /= per_dim;
                (i as f64 + 0.5) / per_dim as f64
            })
            .collect();
        let start = bounds.to_physical(&u);
        let r = nelder_mead(&mut f, bounds, &start, config);
        evaluations += r.evaluations;
        if best.as_ref().map_or(true, |b| r.value < b.value) {
            best = Some(r);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = evaluations;
    best
}
