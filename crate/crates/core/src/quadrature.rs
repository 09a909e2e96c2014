//! Moment-based Gauss quadrature for parameter randomizers.
//!
//! [`golub_welsch`] builds the `(N+1) x (N+1)` Gram matrix of monomial
//! cross-moments `E[X^{i+j}]`, factors it as `R^T R`, reads the three-term
//! recurrence coefficients of the orthogonal polynomials off `R`, and
//! diagonalizes the resulting Jacobi matrix. Nodes are its eigenvalues, weights
//! the squared first components of its normalized eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::math;

/// Largest supported quadrature size. Beyond it the Gram matrices of the
/// supported families are too ill-conditioned even in double-double.
pub const MAX_NODES: usize = 20;

/// QL iteration: off-diagonal entries below this fraction of the adjacent
/// diagonal mass are treated as zero.
const EIGEN_TOLERANCE: f64 = 1e-14;
const EIGEN_MAX_SWEEPS: usize = 50;

/// A computed rule must reproduce its defining moments to this (scaled)
/// accuracy, otherwise it is reported as ill-conditioned.
const MOMENT_CHECK: f64 = 1e-8;
/// Smallest admissible Cholesky pivot relative to its Hankel diagonal entry;
/// below it fewer than about twelve digits of the double-double moments survive.
const PIVOT_FLOOR: f64 = 1e-20;

/// Distribution of a randomized model parameter, with closed-form raw moments.
///
/// Parameters follow the `(a, b)` convention of the moment table: uniform
/// bounds, normal mean and standard deviation, exponential rate, gamma shape
/// and scale, non-central chi-square degrees of freedom and non-centrality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Randomizer {
    Uniform { lower: f64, upper: f64 },
    /// `std_dev = 0` is accepted and means a point mass at `mean`.
    Normal { mean: f64, std_dev: f64 },
    Exponential { rate: f64 },
    Gamma { shape: f64, scale: f64 },
    ChiSquare { dof: f64, noncentrality: f64 },
}

impl Randomizer {
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::validated(Randomizer::Uniform { lower, upper })
    }

    pub fn normal(mean: f64, std_dev: f64) -> Result<Self> {
        Self::validated(Randomizer::Normal { mean, std_dev })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::validated(Randomizer::Exponential { rate })
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::validated(Randomizer::Gamma { shape, scale })
    }

    pub fn chi_square(dof: f64, noncentrality: f64) -> Result<Self> {
        Self::validated(Randomizer::ChiSquare { dof, noncentrality })
    }

    /// Build from a family name and its `(a, b)` parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidRandomizer("wrong number of parameters for family"))
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "uniform" | "u" => want(2).and_then(|_| Self::uniform(params[0], params[1])),
            "normal" | "n" | "gaussian" => want(2).and_then(|_| Self::normal(params[0], params[1])),
            "exponential" | "exp" => want(1).and_then(|_| Self::exponential(params[0])),
            "gamma" => want(2).and_then(|_| Self::gamma(params[0], params[1])),
            "chi-square" | "chisquare" | "chi2" => {
                want(2).and_then(|_| Self::chi_square(params[0], params[1]))
            }
            _ => Err(Error::InvalidRandomizer("unknown family")),
        }
    }

    fn validated(r: Randomizer) -> Result<Self> {
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64| x.is_finite();
        let ok = match *self {
            Randomizer::Uniform { lower, upper } => finite(lower) && finite(upper) && lower < upper,
            Randomizer::Normal { mean, std_dev } => finite(mean) && finite(std_dev) && std_dev >= 0.0,
            Randomizer::Exponential { rate } => finite(rate) && rate > 0.0,
            Randomizer::Gamma { shape, scale } => {
                finite(shape) && finite(scale) && shape > 0.0 && scale > 0.0
            }
            Randomizer::ChiSquare { dof, noncentrality } => {
                finite(dof) && finite(noncentrality) && dof > 0.0 && noncentrality >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRandomizer(match self {
                Randomizer::Uniform { .. } => "uniform requires lower < upper",
                Randomizer::Normal { .. } => "normal requires std_dev >= 0",
                Randomizer::Exponential { .. } => "exponential requires rate > 0",
                Randomizer::Gamma { .. } => "gamma requires shape > 0 and scale > 0",
                Randomizer::ChiSquare { .. } => "chi-square requires dof > 0 and noncentrality >= 0",
            }))
        }
    }

    /// The `(a, b)` parameter list, in table order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            Randomizer::Uniform { lower, upper } => vec![lower, upper],
            Randomizer::Normal { mean, std_dev } => vec![mean, std_dev],
            Randomizer::Exponential { rate } => vec![rate],
            Randomizer::Gamma { shape, scale } => vec![shape, scale],
            Randomizer::ChiSquare { dof, noncentrality } => vec![dof, noncentrality],
        }
    }

    /// Same family with the parameter list replaced.
    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        Self::from_name(self.name(), params)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Randomizer::Uniform { .. } => "uniform",
            Randomizer::Normal { .. } => "normal",
            Randomizer::Exponential { .. } => "exponential",
            Randomizer::Gamma { .. } => "gamma",
            Randomizer::ChiSquare { .. } => "chi-square",
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Randomizer::Uniform { lower, upper } => 0.5 * (lower + upper),
            Randomizer::Normal { mean, .. } => mean,
            Randomizer::Exponential { rate } => 1.0 / rate,
            Randomizer::Gamma { shape, scale } => shape * scale,
            Randomizer::ChiSquare { dof, noncentrality } => dof + noncentrality,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Randomizer::Uniform { lower, upper } => (upper - lower) * (upper - lower) / 12.0,
            Randomizer::Normal { std_dev, .. } => std_dev * std_dev,
            Randomizer::Exponential { rate } => 1.0 / (rate * rate),
            Randomizer::Gamma { shape, scale } => shape * scale * scale,
            Randomizer::ChiSquare { dof, noncentrality } => 2.0 * (dof + 2.0 * noncentrality),
        }
    }

    /// Bounded support `(lower, upper)`, when the family has one.
    pub fn bounded_support(&self) -> Option<(f64, f64)> {
        match *self {
            Randomizer::Uniform { lower, upper } => Some((lower, upper)),
            _ => None,
        }
    }

    /// `E[X^n]`.
    pub fn raw_moment(&self, n: usize) -> Result<f64> {
        self.validate()?;
        let m = self.raw_moments_dd(n)?;
        Ok(m[n].to_f64())
    }

    /// Raw moments `E[X^0] ..= E[X^max_order]` in double-double.
    pub(crate) fn raw_moments_dd(&self, max_order: usize) -> Result<Vec<Dd>> {
        let mut out = Vec::with_capacity(max_order + 1);
        match *self {
            Randomizer::Uniform { lower, upper } => {
                // (b^{n+1} - a^{n+1}) / ((n+1)(b-a)) = sum_{j<=n} a^j b^{n-j} / (n+1)
                let (a, b) = (Dd::from(lower), Dd::from(upper));
                for n in 0..=max_order {
                    let mut sum = Dd::ZERO;
                    let mut a_pow = Dd::ONE;
                    for j in 0..=n {
                        sum = sum + a_pow * b.powi(n - j);
                        a_pow = a_pow * a;
                    }
                    out.push(sum / Dd::from((n + 1) as f64));
                }
            }
            Randomizer::Normal { mean, std_dev } => {
                // binomial expansion over standard-normal moments (j-1)!!
                let std_moments = standard_normal_moments(max_order);
                let (mu, sigma) = (Dd::from(mean), Dd::from(std_dev));
                for n in 0..=max_order {
                    let mut sum = Dd::ZERO;
                    let mut binom = Dd::ONE;
                    for j in 0..=n {
                        if j % 2 == 0 {
                            sum = sum + binom * mu.powi(n - j) * sigma.powi(j) * std_moments[j];
                        }
                        binom = binom * Dd::from((n - j) as f64) / Dd::from((j + 1) as f64);
                    }
                    out.push(sum);
                }
            }
            Randomizer::Exponential { rate } => {
                // n! / rate^n
                let mut m = Dd::ONE;
                out.push(m);
                for n in 1..=max_order {
                    m = m * Dd::from(n as f64) / Dd::from(rate);
                    out.push(m);
                }
            }
            Randomizer::Gamma { shape, scale } => {
                // scale^n Gamma(n + shape) / Gamma(shape) = scale^n prod_{j<n} (shape + j)
                let mut m = Dd::ONE;
                out.push(m);
                for n in 1..=max_order {
                    m = m * Dd::from(scale) * (Dd::from(shape) + Dd::from((n - 1) as f64));
                    out.push(m);
                }
            }
            Randomizer::ChiSquare { dof, noncentrality } => {
                // E[X^n] = 2^{n-1}(n-1)!(k + n d)
                //        + sum_{j=1}^{n-1} (n-1)! 2^{j-1} / (n-j)! (k + j d) E[X^{n-j}]
                let (k, d) = (Dd::from(dof), Dd::from(noncentrality));
                let cumulant = |j: usize| k + Dd::from(j as f64) * d;
                out.push(Dd::ONE);
                for n in 1..=max_order {
                    let fact_n1 = factorial(n - 1);
                    let mut m = Dd::from(2.0).powi(n - 1) * fact_n1 * cumulant(n);
                    for j in 1..n {
                        let coeff = fact_n1 * Dd::from(2.0).powi(j - 1) / factorial(n - j);
                        m = m + coeff * cumulant(j) * out[n - j];
                    }
                    out.push(m);
                }
            }
        }
        if let Some(order) = out.iter().position(|m| !m.is_finite()) {
            return Err(Error::MomentNotFinite { order });
        }
        Ok(out)
    }
}

fn factorial(n: usize) -> Dd {
    (1..=n).fold(Dd::ONE, |acc, k| acc * Dd::from(k as f64))
}

fn standard_normal_moments(max_order: usize) -> Vec<Dd> {
    let mut m = vec![Dd::ZERO; max_order + 1];
    m[0] = Dd::ONE;
    for n in (2..=max_order).step_by(2) {
        m[n] = m[n - 2] * Dd::from((n - 1) as f64);
    }
    m
}

/// Gauss quadrature weights and nodes `{w_n, x_n}`, nodes strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePairs {
    weights: Vec<f64>,
    nodes: Vec<f64>,
}

impl QuadraturePairs {
    /// Pairs from explicit weights and nodes. Weights must be positive, nodes
    /// strictly increasing, and both of equal non-zero length.
    pub fn new(weights: Vec<f64>, nodes: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.len() != nodes.len() {
            return Err(Error::InvalidArgument("weights and nodes need equal non-zero length"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("weights must be positive"));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidArgument("nodes must be finite and strictly increasing"));
        }
        Ok(QuadraturePairs { weights, nodes })
    }

    /// Single node at `value` with unit weight.
    pub fn point_mass(value: f64) -> Self {
        QuadraturePairs {
            weights: vec![1.0],
            nodes: vec![value],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.nodes.iter().copied())
    }

    /// `sum_n w_n f(x_n)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(w, x)| w * f(x)).sum()
    }

    /// `sum_n w_n x_n^k`.
    pub fn moment(&self, k: usize) -> f64 {
        self.integrate(|x| math::powi(x, k as i32))
    }
}

/// N-point Gauss rule for `randomizer` computed from its raw moments.
///
/// A zero-variance randomizer yields the single pair `(1, mean)` regardless
/// of `n`.
pub fn golub_welsch(randomizer: &Randomizer, n: usize) -> Result<QuadraturePairs> {
    randomizer.validate()?;
    if n == 0 || n > MAX_NODES {
        return Err(Error::InvalidNodeCount {
            requested: n,
            max: MAX_NODES,
        });
    }
    if randomizer.variance() == 0.0 {
        return Ok(QuadraturePairs::point_mass(randomizer.mean()));
    }
    let moments = randomizer.raw_moments_dd(2 * n)?;

    let r = gram_cholesky(&moments, n)?;

    // Recurrence coefficients (1-based r_{i,j} = r[i-1][j-1], r_{0,0}=1, r_{0,1}=0).
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for j in 1..=n {
        let mut alpha = r[j - 1][j] / r[j - 1][j - 1];
        if j > 1 {
            alpha = alpha - r[j - 2][j - 1] / r[j - 2][j - 2];
        }
        diag[j - 1] = alpha.to_f64();
    }
    for j in 1..n {
        // sqrt(beta_j) = r_{j+1,j+1} / r_{j,j}
        off[j - 1] = (r[j][j] / r[j - 1][j - 1]).to_f64();
    }

    let (nodes, first_row) = symmetric_tridiagonal_eigen(diag, off)?;
    let mut pairs: Vec<(f64, f64)> = nodes
        .into_iter()
        .zip(first_row)
        .map(|(x, z)| (x, z * z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let rule = QuadraturePairs::new(weights, nodes).map_err(|_| Error::IllConditioned { nodes: n })?;
    if let Some((lo, hi)) = randomizer.bounded_support() {
        if rule.nodes().iter().any(|&x| !(x > lo && x < hi)) {
            return Err(Error::IllConditioned { nodes: n });
        }
    }

    let moments_f64: Vec<f64> = moments.iter().map(|m| m.to_f64()).collect();
    if max_moment_error(&rule, &moments_f64, 2 * n - 1) > MOMENT_CHECK {
        return Err(Error::IllConditioned { nodes: n });
    }
    Ok(rule)
}

/// Upper Cholesky factor `R` of the `(n+1) x (n+1)` Hankel matrix
/// `M_{ij} = moments[i + j]`, `M = R^T R`.
fn gram_cholesky(moments: &[Dd], n: usize) -> Result<Vec<Vec<Dd>>> {
    let size = n + 1;
    let mut r = vec![vec![Dd::ZERO; size]; size];
    for i in 0..size {
        let mut pivot = moments[2 * i];
        for k in 0..i {
            pivot = pivot - r[k][i] * r[k][i];
        }
        if !(pivot.to_f64() > PIVOT_FLOOR * moments[2 * i].to_f64()) {
            return Err(Error::IllConditioned { nodes: n });
        }
        let rii = pivot.sqrt();
        r[i][i] = rii;
        for j in (i + 1)..size {
            let mut s = moments[i + j];
            for k in 0..i {
                s = s - r[k][i] * r[k][j];
            }
            r[i][j] = s / rii;
        }
    }
    Ok(r)
}

/// Largest moment-reproduction error for orders `0..=max_order`, each
/// relative to `max(|m_k|, sum_n w_n |x_n|^k)`. The second scale keeps
/// vanishing odd moments of symmetric laws meaningful.
pub fn max_moment_error(rule: &QuadraturePairs, moments: &[f64], max_order: usize) -> f64 {
    (0..=max_order)
        .map(|k| {
            let approx = rule.moment(k);
            let scale = rule
                .integrate(|x| math::powi(x.abs(), k as i32))
                .max(moments[k].abs());
            (approx - moments[k]).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off[0..n-1]`, together with the first component of each
/// normalized eigenvector. Implicit QL with Wilkinson-type shifts; only the
/// first row of the eigenvector matrix is accumulated.
fn symmetric_tridiagonal_eigen(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return Ok((d, z));
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= EIGEN_TOLERANCE * scale || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > EIGEN_MAX_SWEEPS {
                return Err(Error::EigenNoConvergence {
                    sweeps: EIGEN_MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Affine image of a rule: nodes `shift + scale * x_n`, weights unchanged.
/// A negative `scale` reverses node order so nodes stay increasing.
pub fn scale_pairs(base: &QuadraturePairs, shift: f64, scale: f64) -> Result<QuadraturePairs> {
    if !(scale.is_finite() && shift.is_finite()) || scale == 0.0 {
        return Err(Error::InvalidArgument("scale must be finite and non-zero"));
    }
    let mut weights = base.weights.clone();
    let mut nodes: Vec<f64> = base.nodes.iter().map(|&x| shift + scale * x).collect();
    if scale < 0.0 {
        weights.reverse();
        nodes.reverse();
    }
    Ok(QuadraturePairs { weights, nodes })
}

/// Quadrature pairs for `randomizer`, taking the linear-scaling shortcut for
/// the normal and uniform families (standard rule, then [`scale_pairs`]).
pub fn quadrature_pairs(randomizer: &Randomizer, n: usize) -> Result<QuadraturePairs> {
    randomizer.validate()?;
    match *randomizer {
        Randomizer::Normal { mean, std_dev } if std_dev > 0.0 => {
            let base = golub_welsch(&Randomizer::Normal { mean: 0.0, std_dev: 1.0 }, n)?;
            scale_pairs(&base, mean, std_dev)
        }
        Randomizer::Uniform { lower, upper } => {
            let base = golub_welsch(&Randomizer::Uniform { lower: -1.0, upper: 1.0 }, n)?;
            scale_pairs(&base, 0.5 * (lower + upper), 0.5 * (upper - lower))
        }
        _ => golub_welsch(randomizer, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn table_moments() {
        let u = Randomizer::uniform(0.0, 1.0).unwrap();
        assert_close(u.raw_moment(2).unwrap(), 1.0 / 3.0, 1e-16);
        let e = Randomizer::exponential(2.0).unwrap();
        assert_close(e.raw_moment(3).unwrap(), 0.75, 1e-16);
        let z = Randomizer::normal(0.0, 1.0).unwrap();
        assert_close(z.raw_moment(4).unwrap(), 3.0, 0.0);
        assert_close(z.raw_moment(5).unwrap(), 0.0, 0.0);
        let c = Randomizer::chi_square(1.0, 0.0).unwrap();
        assert_close(c.raw_moment(1).unwrap(), 1.0, 1e-15);
        assert_close(c.raw_moment(2).unwrap(), 3.0, 1e-15);
        // gamma(shape 2, scale 3): E[X^2] = 9 * 2 * 3
        let g = Randomizer::gamma(2.0, 3.0).unwrap();
        assert_close(g.raw_moment(2).unwrap(), 54.0, 1e-12);
    }

    #[test]
    fn general_normal_moments_by_binomial_expansion() {
        let r = Randomizer::normal(0.1, 0.45).unwrap();
        let (m, s) = (0.1_f64, 0.45_f64);
        assert_close(r.raw_moment(2).unwrap(), m * m + s * s, 1e-16);
        assert_close(r.raw_moment(3).unwrap(), m * m * m + 3.0 * m * s * s, 1e-16);
        let m4 = m.powi(4) + 6.0 * m * m * s * s + 3.0 * s.powi(4);
        assert_close(r.raw_moment(4).unwrap(), m4, 1e-16);
    }

    #[test]
    fn chi_square_noncentral_low_moments() {
        // mean k + d, variance 2(k + 2d)
        let r = Randomizer::chi_square(3.0, 1.5).unwrap();
        let m1 = r.raw_moment(1).unwrap();
        let m2 = r.raw_moment(2).unwrap();
        assert_close(m1, 4.5, 1e-14);
        assert_close(m2 - m1 * m1, 2.0 * (3.0 + 3.0), 1e-12);
    }

    #[test]
    fn invalid_randomizers_are_rejected() {
        assert!(Randomizer::uniform(1.0, 1.0).is_err());
        assert!(Randomizer::exponential(0.0).is_err());
        assert!(Randomizer::normal(0.0, -1.0).is_err());
        assert!(Randomizer::gamma(-1.0, 1.0).is_err());
        assert!(Randomizer::chi_square(0.0, 0.0).is_err());
        assert!(Randomizer::from_name("cauchy", &[0.0, 1.0]).is_err());
        assert!(Randomizer::from_name("normal", &[0.0]).is_err());
    }

    #[test]
    fn moment_overflow_is_a_domain_error() {
        let e = Randomizer::exponential(1e-300).unwrap();
        assert!(matches!(e.raw_moment(3), Err(Error::MomentNotFinite { .. })));
    }

    #[test]
    fn uniform_three_points_is_mapped_gauss_legendre() {
        let rule = golub_welsch(&Randomizer::uniform(0.0, 1.0).unwrap(), 3).unwrap();
        let h = 0.5 * libm::sqrt(0.6);
        let expected_nodes = [0.5 - h, 0.5, 0.5 + h];
        let expected_weights = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
        for i in 0..3 {
            assert_close(rule.nodes()[i], expected_nodes[i], 1e-14);
            assert_close(rule.weights()[i], expected_weights[i], 1e-14);
        }
    }

    #[test]
    fn standard_normal_two_points() {
        let rule = golub_welsch(&Randomizer::normal(0.0, 1.0).unwrap(), 2).unwrap();
        assert_close(rule.nodes()[0], -1.0, 1e-15);
        assert_close(rule.nodes()[1], 1.0, 1e-15);
        assert_close(rule.weights()[0], 0.5, 1e-15);
        assert_close(rule.weights()[1], 0.5, 1e-15);
    }

    #[test]
    fn one_point_rule_is_the_mean() {
        for r in [
            Randomizer::uniform(-0.15, 0.6).unwrap(),
            Randomizer::gamma(2.5, 0.3).unwrap(),
            Randomizer::chi_square(2.0, 1.0).unwrap(),
        ] {
            let rule = golub_welsch(&r, 1).unwrap();
            assert_eq!(rule.len(), 1);
            assert_close(rule.weights()[0], 1.0, 1e-15);
            assert_close(rule.nodes()[0], r.mean(), 1e-14 * r.mean().abs().max(1.0));
        }
    }

    #[test]
    fn zero_variance_gives_a_single_pair() {
        let rule = golub_welsch(&Randomizer::normal(0.3, 0.0).unwrap(), 7).unwrap();
        assert_eq!(rule, QuadraturePairs::point_mass(0.3));
    }

    #[test]
    fn node_count_is_capped() {
        let r = Randomizer::normal(0.0, 1.0).unwrap();
        assert!(matches!(golub_welsch(&r, 0), Err(Error::InvalidNodeCount { .. })));
        assert!(matches!(golub_welsch(&r, 21), Err(Error::InvalidNodeCount { .. })));
        assert!(golub_welsch(&r, 20).is_ok());
    }

    #[test]
    fn scaling_examples() {
        let base = golub_welsch(&Randomizer::normal(0.0, 1.0).unwrap(), 2).unwrap();
        let scaled = scale_pairs(&base, 0.1, 0.45).unwrap();
        assert_close(scaled.nodes()[0], -0.35, 1e-15);
        assert_close(scaled.nodes()[1], 0.55, 1e-15);
        assert_eq!(scaled.weights(), base.weights());
        assert_eq!(scale_pairs(&base, 0.0, 1.0).unwrap(), base);
        assert!(scale_pairs(&base, 0.0, 0.0).is_err());

        let unit = golub_welsch(&Randomizer::uniform(0.0, 1.0).unwrap(), 3).unwrap();
        let mapped = scale_pairs(&unit, -0.15, 0.75).unwrap();
        let direct = golub_welsch(&Randomizer::uniform(-0.15, 0.6).unwrap(), 3).unwrap();
        for i in 0..3 {
            assert_close(mapped.nodes()[i], direct.nodes()[i], 1e-10);
            assert_close(mapped.weights()[i], direct.weights()[i], 1e-10);
            assert!(mapped.nodes()[i] > -0.15 && mapped.nodes()[i] < 0.6);
        }
    }

    #[test]
    fn negative_scale_keeps_nodes_increasing() {
        let base = golub_welsch(&Randomizer::exponential(1.0).unwrap(), 4).unwrap();
        let flipped = scale_pairs(&base, 0.0, -1.0).unwrap();
        assert!(flipped.nodes().windows(2).all(|p| p[0] < p[1]));
        assert_close(flipped.moment(1), -1.0, 1e-13);
    }

    #[test]
    fn shortcut_matches_direct_rule() {
        for n in 1..=10 {
            let r = Randomizer::normal(0.1, 0.45).unwrap();
            let a = quadrature_pairs(&r, n).unwrap();
            let b = golub_welsch(&r, n).unwrap();
            for i in 0..a.len() {
                assert_close(a.nodes()[i], b.nodes()[i], 1e-10);
                assert_close(a.weights()[i], b.weights()[i], 1e-10);
            }
        }
    }

    #[test]
    fn lost_digits_are_reported() {
        let narrow = Randomizer::uniform(0.8478, 0.8578).unwrap();
        assert!(matches!(golub_welsch(&narrow, 8), Err(Error::IllConditioned { nodes: 8 })));
        let mapped = quadrature_pairs(&narrow, 8).unwrap();
        assert!(mapped.nodes().iter().all(|&x| x > 0.8478 && x < 0.8578));
        for r in [Randomizer::uniform(0.0, 1.0).unwrap(), Randomizer::normal(0.0, 1.0).unwrap()] {
            let rule = quadrature_pairs(&r, MAX_NODES).unwrap();
            let m: Vec<f64> = (0..2 * MAX_NODES).map(|k| r.raw_moment(k).unwrap()).collect();
            assert!(max_moment_error(&rule, &m, 2 * MAX_NODES - 1) < 1e-12);
        }
    }
}
