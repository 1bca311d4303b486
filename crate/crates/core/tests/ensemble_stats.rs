//! Statistical contracts of the samplers: exact binomial quantile bands for
//! nonzero counts, moment calibration of the entry laws, stream
//! independence, and the row-pattern product oracle.

mod common;

use common::binomial_band;
use rmtlab_core::ensemble::{
    fold_matrix, pattern_count, sample_directed_er, sample_matrix, DiagonalPolicy, EnsembleSpec,
    EntryDistribution,
};
use rmtlab_core::rng::{SeedSpec, TrialRng};

#[test]
fn sparse_mask_nonzero_count_in_exact_binomial_band() {
    // 100 x 100 at p = 0.1: 10^4 Bernoulli entries. Frozen two-sided 99.99%
    // band from the exact quantile oracle; recomputed here to pin the oracle.
    let band = binomial_band(10_000, 0.1, 1e-4);
    assert_eq!(band, (885, 1119));
    let spec =
        EnsembleSpec::new(100, 0.1, EntryDistribution::Rademacher, DiagonalPolicy::Iid);
    let m = sample_matrix(&spec, SeedSpec::new(2024, 0)).unwrap();
    let nnz = m.nnz() as u64;
    assert!((band.0..=band.1).contains(&nnz), "nnz {nnz} outside {band:?}");
}

#[test]
fn directed_er_edge_count_in_exact_binomial_band() {
    // n = 50: 2450 off-diagonal Bernoulli(0.2) slots.
    let band = binomial_band(2450, 0.2, 1e-4);
    assert_eq!(band, (414, 568));
    let m = sample_directed_er(50, 0.2, SeedSpec::new(7, 0)).unwrap();
    let edges = m.data().iter().filter(|&&v| v == 1.0).count() as u64;
    assert!((band.0..=band.1).contains(&edges), "edges {edges} outside {band:?}");
    for i in 0..50 {
        assert_eq!(m[(i, i)], 0.0);
    }
}

#[test]
fn centered_distributions_are_moment_calibrated() {
    // Sample mean within ±0.005 of 0 and variance within ±0.01 of 1 over
    // 10^6 draws, for each centered entry law.
    let n = 1_000_000u64;
    for (name, dist) in [
        ("rademacher", EntryDistribution::Rademacher),
        ("gaussian", EntryDistribution::StandardGaussian),
        ("pareto6", EntryDistribution::SymmetricPareto { rho: 6.0 }),
    ] {
        let rng = TrialRng::from_parts(0x0a0a, 0);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for k in 0..n {
            let x = dist.sample_stream(&rng, k);
            sum += x;
            sumsq += x * x;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(mean.abs() <= 0.005, "{name}: mean {mean}");
        assert!((var - 1.0).abs() <= 0.01, "{name}: var {var}");
    }
}

#[test]
fn pareto_tail_follows_power_law() {
    // P(|xi| > t) = (t/t0)^-rho for t >= t0 = sqrt((rho-2)/rho).
    let rho = 4.5;
    let dist = EntryDistribution::SymmetricPareto { rho };
    let rng = TrialRng::from_parts(55, 1);
    let n = 500_000u64;
    let t0 = ((rho - 2.0) / rho).sqrt();
    for t_mult in [1.5, 3.0] {
        let t = t0 * t_mult;
        let hits =
            (0..n).filter(|&k| dist.sample_stream(&rng, k).abs() > t).count() as f64;
        let empirical = hits / n as f64;
        let expected = t_mult.powf(-rho);
        let sd = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(
            (empirical - expected).abs() <= 5.0 * sd + 1e-4,
            "t={t}: {empirical} vs {expected}"
        );
    }
}

#[test]
fn shifted_bernoulli_hits_its_mean() {
    let dist = EntryDistribution::ShiftedBernoulli { mu: 0.3 };
    let rng = TrialRng::from_parts(0x1b1b, 2);
    let n = 200_000u64;
    let ones = (0..n).filter(|&k| dist.sample_stream(&rng, k) == 1.0).count() as f64;
    let freq = ones / n as f64;
    assert!((freq - 0.3).abs() < 0.005, "freq {freq}");
}

#[test]
fn adjacent_trial_streams_are_uncorrelated() {
    // Correlation of entry sums between trials k and k+1 over 10^4 pairs
    // stays within the two-sided 4-sigma band 4/sqrt(10^4).
    let spec =
        EnsembleSpec::new(10, 0.5, EntryDistribution::Rademacher, DiagonalPolicy::Iid);
    let pairs = 10_000u64;
    let sums: Vec<f64> = (0..=pairs)
        .map(|t| {
            let m = sample_matrix(&spec, SeedSpec::new(0xdead, t)).unwrap();
            m.data().iter().sum::<f64>()
        })
        .collect();
    let xs = &sums[..pairs as usize];
    let ys = &sums[1..=pairs as usize];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    let r = cov / (vx.sqrt() * vy.sqrt());
    assert!(r.abs() <= 4.0 / (pairs as f64).sqrt(), "correlation {r}");
}

#[test]
fn pattern_count_mean_matches_product_oracle() {
    // n p (1-p)^{|J| + |J'| - 1} P(|xi| >= 1), |J| = 1, with Rademacher so
    // the entry-tail factor is exactly 1. IID diagonal keeps all rows
    // exchangeable.
    let n = 500;
    let p = 0.02;
    let spec = EnsembleSpec::new(n, p, EntryDistribution::Rademacher, DiagonalPolicy::Iid);
    let j_cols = [0usize];
    let gamma = ((p * n as f64).sqrt()).floor() as usize; // 3
    let jprime: Vec<usize> = (1..=gamma).collect();
    let trials = 1000u64;
    let mut total = 0usize;
    for t in 0..trials {
        let m = sample_matrix(&spec, SeedSpec::new(0xab, t)).unwrap();
        total += pattern_count(&m, &j_cols, &jprime, 1.0).unwrap();
    }
    let mean = total as f64 / trials as f64;
    let per_row = p * (1.0 - p).powi((1 + gamma as i32) - 1);
    let oracle = n as f64 * per_row;
    assert!(
        (mean - oracle).abs() <= 0.15 * oracle,
        "mean {mean} vs oracle {oracle}"
    );
}

#[test]
fn fold_contraction_on_random_pairs() {
    // 2 ||M x||^2 - ||fold(M) x||^2 >= -1e-12 ||M||_F^2 ||x||^2.
    let spec =
        EnsembleSpec::new(6, 0.8, EntryDistribution::StandardGaussian, DiagonalPolicy::Iid);
    for t in 0..200 {
        let m = sample_matrix(&spec, SeedSpec::new(3, t)).unwrap();
        let folded = fold_matrix(&m).unwrap();
        let rng = TrialRng::from_parts(4, t);
        let x: Vec<f64> = (0..6).map(|k| rng.gaussian(2 * k)).collect();
        let mut mx = vec![0.0; 6];
        m.matvec(&x, &mut mx);
        let mut fx = vec![0.0; folded.rows()];
        folded.matvec(&x, &mut fx);
        let lhs = 2.0 * mx.iter().map(|v| v * v).sum::<f64>();
        let rhs = fx.iter().map(|v| v * v).sum::<f64>();
        let slack = 1e-12
            * m.frobenius_norm()
            * m.frobenius_norm()
            * x.iter().map(|v| v * v).sum::<f64>();
        assert!(lhs - rhs >= -slack, "trial {t}: 2||Mx||^2 {lhs} < ||fold x||^2 {rhs}");
    }
}
