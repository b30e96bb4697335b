use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use softrgg_core::analysis::{component_summary, small_component_counts, thresholds, thresholds_by_bisection};
use softrgg_core::connection::{k_eta, validate_class};
use softrgg_core::points::{sample_binomial, sample_poisson};
use softrgg_core::regimes::{
    alpha_from_target, beta_solve, gamma_solve, solve_r, Regime, RegimeSpec,
};
use softrgg_core::softgraph::{
    coupled_process, g_value, h_value, h_value_by_edge_subsets, sample_graph, SamplerMode,
};
use softrgg_core::stats::{mean_and_stderr, tv_distance};
use softrgg_core::{ConnectionFunction, PointSet, SeedSpec};

fn step_or_rayleigh() -> impl Strategy<Value = ConnectionFunction> {
    prop_oneof![
        (0.01..0.5f64, 0.05..1.0f64).prop_map(|(r, p)| ConnectionFunction::step(r, p, 2).unwrap()),
        (0.2..3.0f64, 0.5..4.0f64, 0.01..0.3f64)
            .prop_map(|(b, g, rho)| ConnectionFunction::rayleigh(b, g, rho, 2, 0.5).unwrap()),
    ]
}

fn point_set(max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 0..=max)
        .prop_map(|v| PointSet::from_coords(2, v.into_iter().flat_map(|(x, y)| [x, y]).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn connection_is_nonincreasing(f in step_or_rayleigh(), a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(f.value_at(lo) >= f.value_at(hi));
    }

    #[test]
    fn rho_level_is_nonincreasing(f in step_or_rayleigh(), a in 1e-9..1.0f64, b in 1e-9..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(f.rho_level(lo).unwrap() >= f.rho_level(hi).unwrap());
    }

    #[test]
    fn integral_equals_mu_rho_squared_j2(f in step_or_rayleigh()) {
        let s = f.shape().unwrap();
        let rel = (s.integral - s.mu * s.rho_eta * s.rho_eta * s.j2).abs() / s.integral;
        prop_assert!(rel <= 1e-8, "relative gap {rel}");
    }

    #[test]
    fn class_members_obey_the_envelope_bound(f in step_or_rayleigh()) {
        let eta = f.largest_grid_eta().unwrap();
        let report = validate_class(&f, eta);
        prop_assert!(report.in_phi);
        let bound = f.mu() * report.rho_eta.powi(2) * k_eta(eta, 2).unwrap();
        prop_assert!(f.integral() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn g_grows_with_a(y in (0.0..=1.0f64, 0.0..=1.0f64), a in point_set(6), extra in (0.0..=1.0f64, 0.0..=1.0f64),
                      f in step_or_rayleigh()) {
        let mut coords = a.coords().to_vec();
        coords.extend([extra.0, extra.1]);
        let bigger = PointSet::from_coords(2, coords).unwrap();
        let y = [y.0, y.1];
        prop_assert!(g_value(&y, &bigger, &f) >= g_value(&y, &a, &f));
    }

    #[test]
    fn h_routes_agree(a in point_set(6), f in step_or_rayleigh()) {
        let x = h_value(&a, &f).unwrap();
        let y = h_value_by_edge_subsets(&a, &f).unwrap();
        prop_assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
    }

    #[test]
    fn thresholds_are_ordered_and_match_bisection(n in 2usize..60, p in 0.05..=1.0f64, seed in any::<u64>()) {
        let pts = sample_binomial(n, 2, SeedSpec::new(seed, 0)).unwrap();
        let cp = coupled_process(&pts, p, SeedSpec::new(seed, 1), None).unwrap();
        let t = thresholds(&cp).unwrap();
        prop_assert!(t.sigma <= t.tau);
        prop_assert_eq!(t, thresholds_by_bisection(&cp).unwrap());
    }

    #[test]
    fn component_partition(n in 0usize..300, r in 0.0..0.2f64, seed in any::<u64>()) {
        let f = ConnectionFunction::step(r.max(1e-6), 0.7, 2).unwrap();
        let pts = sample_binomial(n, 2, SeedSpec::new(seed, 0)).unwrap();
        let g = sample_graph(&pts, &f, SeedSpec::new(seed, 1), SamplerMode::default()).unwrap();
        let s = component_summary(&g);
        prop_assert_eq!(s.t_k.iter().map(|(k, c)| k * c).sum::<usize>(), n);
        prop_assert_eq!(s.t_k.get(&1).copied().unwrap_or(0), s.n0);
        if n > 0 {
            prop_assert_eq!(s.connected, s.n_components <= 1);
            prop_assert_eq!(s.connected, s.l2 == 0);
        }
        if s.connected && n >= 2 {
            prop_assert_eq!(s.n0, 0);
        }
        let small = small_component_counts(&g, 3).unwrap();
        for (k, c) in &small {
            prop_assert_eq!(s.t_k.get(k), Some(c));
        }
        let sum_degrees: usize = g.degrees().iter().sum();
        prop_assert_eq!(sum_degrees, 2 * g.n_edges());
    }

    #[test]
    fn tv_is_a_probability(weights in prop::collection::vec(0.0..1.0f64, 1..20), mean in 0.0..10.0f64) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let h: BTreeMap<usize, f64> = weights.iter().enumerate().map(|(k, w)| (k, w / total)).collect();
        let tv = tv_distance(&h, mean).unwrap();
        prop_assert!((0.0..=1.0).contains(&tv));
    }
}

fn regime_spec(regime: Regime) -> impl Strategy<Value = RegimeSpec> {
    (3.0..9.0f64, -6.0..0.0f64, -1.0..1.0f64, 0.5..2.0f64, 1.0..5.0f64).prop_map(move |(ln, lp, la, j1, j2)| {
        RegimeSpec { regime, n: 10f64.powf(ln), p: 10f64.powf(lp), alpha: 10f64.powf(la), j1, j2 }
    })
}

fn check_round_trip(spec: RegimeSpec) -> Result<(), TestCaseError> {
    let Ok(sol) = solve_r(&spec) else {
        return Err(TestCaseError::reject("degenerate target"));
    };
    prop_assert!(sol.r > 0.0);
    let identity = spec.n * spec.p * sol.r * sol.r * spec.j2;
    prop_assert!((identity - sol.n_i_target).abs() <= 1e-12 * sol.n_i_target);
    let alpha = alpha_from_target(&spec, sol.n_i_target).unwrap();
    prop_assert!((alpha - spec.alpha).abs() <= 1e-12 * spec.alpha, "{} vs {}", alpha, spec.alpha);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn core_round_trip(spec in regime_spec(Regime::Core)) { check_round_trip(spec)?; }

    #[test]
    fn side_round_trip(spec in regime_spec(Regime::Side)) { check_round_trip(spec)?; }

    #[test]
    fn corner_round_trip(spec in regime_spec(Regime::Corner)) { check_round_trip(spec)?; }

    #[test]
    fn core_side_round_trip(spec in regime_spec(Regime::CoreSideBoundary)) { check_round_trip(spec)?; }

    #[test]
    fn side_corner_round_trip(spec in regime_spec(Regime::SideCornerBoundary)) { check_round_trip(spec)?; }

    #[test]
    fn quadratic_residuals(spec in regime_spec(Regime::Core)) {
        let RegimeSpec { n, p, alpha, j1, j2, .. } = spec;
        let g = gamma_solve(p, n, alpha, j1, j2).unwrap();
        let lhs = g * g + 2.0 * g * j2.sqrt() / j1 / (p * n.ln()).sqrt();
        prop_assert!((lhs - alpha).abs() <= 1e-12 * alpha);
        let b = beta_solve(n, p, alpha, j1, j2).unwrap();
        let c = (3.0 * j2).powf(-1.5) * j1.powi(3) * (n.cbrt() * p * n.ln()).powf(1.5);
        prop_assert!((c * b * b + b - alpha).abs() <= 1e-12 * alpha);
    }

    /// At the core cutoff `p·log n = 3` the core and core/side targets differ
    /// by at most `2 log(1/γ) + log(4 J2/J1²)` when `α ≤ 4 J2/J1²`.
    #[test]
    fn core_side_continuity(ln in 3.0..9.0f64, j1 in 0.5..2.0f64, j2 in 1.0..5.0f64, frac in 0.001..1.0f64) {
        let n = 10f64.powf(ln);
        let p = 3.0 / n.ln();
        let alpha = frac * 4.0 * j2 / (j1 * j1);
        let core = solve_r(&RegimeSpec { regime: Regime::Core, n, p, alpha, j1, j2 }).unwrap();
        let edge = solve_r(&RegimeSpec { regime: Regime::CoreSideBoundary, n, p, alpha, j1, j2 }).unwrap();
        let gamma = edge.aux_root.unwrap();
        let bound = 2.0 * (1.0 / gamma).ln() + (4.0 * j2 / (j1 * j1)).ln();
        prop_assert!((edge.n_i_target - core.n_i_target).abs() <= bound + 1e-12);
    }
}

#[test]
fn binomial_points_pass_chi_square() {
    let n = 100_000;
    let pts = sample_binomial(n, 2, SeedSpec::new(2024, 3)).unwrap();
    let mut counts = [0f64; 16];
    for p in pts.iter() {
        let cx = ((p[0] * 4.0) as usize).min(3);
        let cy = ((p[1] * 4.0) as usize).min(3);
        counts[cy * 4 + cx] += 1.0;
    }
    let expected = n as f64 / 16.0;
    let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
    let critical = ChiSquared::new(15.0).unwrap().inverse_cdf(1.0 - 1e-4);
    assert!(stat < critical, "chi-square {stat} ≥ {critical}");
}

#[test]
fn poisson_count_moments() {
    let counts: Vec<f64> =
        (0..10_000).map(|t| sample_poisson(100.0, 2, SeedSpec::new(77, t)).unwrap().len() as f64).collect();
    let (mean, _) = mean_and_stderr(&counts);
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() as f64 - 1.0);
    assert!((mean - 100.0).abs() < 3.0, "mean {mean}");
    assert!((var - 100.0).abs() < 10.0, "variance {var}");
}

#[test]
fn edge_count_mean_matches_sum_of_probabilities() {
    let f = ConnectionFunction::rayleigh(1.0, 2.0, 0.15, 2, 0.5).unwrap();
    let pts = sample_binomial(60, 2, SeedSpec::new(5, 0)).unwrap();
    let mut expected = 0.0;
    let mut variance = 0.0;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let q = f.value_at(pts.distance(i, j));
            expected += q;
            variance += q * (1.0 - q);
        }
    }
    let trials = 4000;
    let total: usize = (0..trials)
        .map(|t| sample_graph(&pts, &f, SeedSpec::new(6, t), SamplerMode::Exact).unwrap().n_edges())
        .sum();
    let mean = total as f64 / trials as f64;
    let se = (variance / trials as f64).sqrt();
    assert!((mean - expected).abs() < 3.0 * se, "mean {mean}, expected {expected}, se {se}");
}

#[test]
fn cell_list_matches_exact_in_mean_for_rayleigh() {
    let f = ConnectionFunction::rayleigh(1.0, 2.0, 0.02, 2, 0.5).unwrap();
    let (mut exact, mut cells) = (Vec::new(), Vec::new());
    for s in 0..200 {
        let pts = sample_binomial(2000, 2, SeedSpec::new(s, 0)).unwrap();
        let a = sample_graph(&pts, &f, SeedSpec::new(s, 1), SamplerMode::Exact).unwrap();
        let b = sample_graph(&pts, &f, SeedSpec::new(s, 1), SamplerMode::default()).unwrap();
        exact.push(a.n_edges() as f64);
        cells.push(b.n_edges() as f64);
    }
    let (ma, sa) = mean_and_stderr(&exact);
    let (mb, _) = mean_and_stderr(&cells);
    assert!((ma - mb).abs() < 3.0 * sa, "{ma} vs {mb} (se {sa})");
}

#[test]
fn g_matches_direct_simulation() {
    let f = ConnectionFunction::rayleigh(1.0, 2.0, 0.2, 2, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for size in 1..=4 {
        let a = sample_binomial(size, 2, SeedSpec::new(size as u64, 9)).unwrap();
        let y = [rng.random::<f64>(), rng.random::<f64>()];
        let q: Vec<f64> = a.iter().map(|x| f.eval(&[y[0] - x[0], y[1] - x[1]])).collect();
        let draws = 1_000_000;
        let hits = (0..draws).filter(|_| q.iter().any(|&qi| rng.random::<f64>() < qi)).count();
        let freq = hits as f64 / draws as f64;
        let g = g_value(&y, &a, &f);
        let se = (g * (1.0 - g) / draws as f64).sqrt().max(1e-9);
        assert!((freq - g).abs() < 3.0 * se, "size {size}: {freq} vs {g}");
    }
}
