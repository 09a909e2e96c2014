use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rhw_core::hw::short_rate_moments;
use rhw_core::mixture::{density_distance, simulate_chunk, EulerGrid, LocalVolField, MixtureDensity};
use rhw_core::{DiscountCurve, HwParams, Randomization, RandomizedSpec, Randomizer, YieldCurve};

fn curve() -> YieldCurve {
    YieldCurve::flat(0.03).unwrap()
}

fn eta_uniform(n: usize) -> RandomizedSpec {
    RandomizedSpec::new(
        Randomization::Eta {
            lambda: 0.002,
            randomizer: Randomizer::uniform(0.003125, 0.009375).unwrap(),
        },
        n,
    )
}

fn lambda_uniform(n: usize) -> RandomizedSpec {
    RandomizedSpec::new(
        Randomization::Lambda {
            eta: 0.005,
            randomizer: Randomizer::uniform(-0.15, 0.6).unwrap(),
        },
        n,
    )
}

#[test]
fn direct_mixture_samples_pass_and_shifted_ones_fail() {
    let m = MixtureDensity::from_spec(&curve(), &lambda_uniform(5), 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples: Vec<f64> = (0..50_000).map(|_| m.sample(&mut rng)).collect();
    let null = density_distance(&samples, &m).unwrap();
    assert!(null.passes(), "{null:?}");
    assert!(null.l1 < 0.05, "{null:?}");
    let shifted = m.shifted(5.0 * m.variance().sqrt());
    let alt = density_distance(&samples, &shifted).unwrap();
    assert!(!alt.passes() && alt.ks > 0.95, "{alt:?}");
}

#[test]
fn single_node_simulation_reproduces_hw_moments() {
    let c = curve();
    let p = HwParams::new(0.1, 0.02).unwrap();
    let field = LocalVolField::from_spec(&RandomizedSpec::deterministic(p)).unwrap();
    let grid = EulerGrid::new(&[2.0], 200).unwrap();
    let paths = 50_000;
    let out = simulate_chunk(&field, &c, &grid, paths, 42, 0).unwrap();
    let x = &out[0];
    let n = paths as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let (m, v) = short_rate_moments(&c, &p, 2.0).unwrap();
    assert!((mean - m).abs() <= 3.0 * (v / n).sqrt(), "{mean} vs {m}");
    // variance of the sample variance of a normal: 2 v^2 / (n - 1)
    assert!((var - v).abs() <= 3.0 * v * (2.0 / (n - 1.0)).sqrt(), "{var} vs {v}");
}

#[test]
fn simulation_is_reproducible_per_seed_and_stream() {
    let field = LocalVolField::from_spec(&eta_uniform(3)).unwrap();
    let grid = EulerGrid::new(&[0.5, 1.0], 100).unwrap();
    let a = simulate_chunk(&field, &curve(), &grid, 1_000, 9, 3).unwrap();
    let b = simulate_chunk(&field, &curve(), &grid, 1_000, 9, 3).unwrap();
    let c = simulate_chunk(&field, &curve(), &grid, 1_000, 9, 4).unwrap();
    assert_eq!(a.len(), 2);
    assert!(a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| x.to_bits() == y.to_bits()));
    assert_ne!(a, c);
}

#[test]
fn mixture_mean_is_the_quadrature_of_node_means() {
    let c = curve();
    let spec = lambda_uniform(6);
    let t = 5.0;
    let m = MixtureDensity::from_spec(&c, &spec, t).unwrap();
    let expected: f64 = spec
        .realizations()
        .unwrap()
        .iter()
        .map(|r| r.weight * short_rate_moments(&c, &r.params, t).unwrap().0)
        .sum();
    assert!((m.mean() - expected).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let draws: f64 = (0..n).map(|_| m.sample(&mut rng)).sum::<f64>() / n as f64;
    assert!((draws - expected).abs() <= 3.0 * (m.variance() / n as f64).sqrt());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_variance_stays_within_node_bounds(t in 0.01..10.0f64, y in -0.1..0.15f64, n in 1usize..=6) {
        let c = curve();
        let field = LocalVolField::from_spec(&eta_uniform(n)).unwrap();
        let (lo, hi) = field.variance_bounds();
        let (_, var) = field.local_coeffs(&c, t, y).unwrap();
        let slack = 1e-15 * hi;
        prop_assert!(var >= lo - slack && var <= hi + slack, "{} not in [{}, {}]", var, lo, hi);
    }

    #[test]
    fn posterior_is_a_proper_distribution(t in 0.01..10.0f64, y in -0.1..0.15f64, n in 1usize..=6) {
        let c = curve();
        for spec in [eta_uniform(n), lambda_uniform(n)] {
            let field = LocalVolField::from_spec(&spec).unwrap();
            let w = field.lambda_weights(&c, t, y).unwrap();
            prop_assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let dy = 1e-9;
            let w2 = field.lambda_weights(&c, t, y + dy).unwrap();
            prop_assert!(w.iter().zip(&w2).all(|(a, b)| (a - b).abs() < 1e-4));
        }
    }

    #[test]
    fn lambda_target_variance_is_constant(t in 0.01..10.0f64, y in -0.1..0.15f64, n in 1usize..=6) {
        let field = LocalVolField::from_spec(&lambda_uniform(n)).unwrap();
        let (_, var) = field.local_coeffs(&curve(), t, y).unwrap();
        prop_assert_eq!(var, 0.005 * 0.005);
    }

    #[test]
    fn mixture_pdf_matches_its_cdf(t in 0.5..10.0f64, n in 1usize..=6) {
        let c = curve();
        let m = MixtureDensity::from_spec(&c, &lambda_uniform(n), t).unwrap();
        let (mu, sd) = (m.mean(), m.variance().sqrt());
        let (a, b) = (mu - sd, mu + 0.5 * sd);
        let steps = 2_000;
        let h = (b - a) / steps as f64;
        let mut integral = m.pdf(a) + m.pdf(b);
        for k in 1..steps {
            integral += if k % 2 == 1 { 4.0 } else { 2.0 } * m.pdf(a + k as f64 * h);
        }
        integral *= h / 3.0;
        prop_assert!((integral - (m.cdf(b) - m.cdf(a))).abs() < 1e-10);
        prop_assert!(c.inst_forward(t).is_ok());
    }
}
