mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigpatrol::mincover::{
    exact_cover, greedy_cover, local_search_improve, overlap_metrics, to_set_cover, CoveringPlacement, ExactCover,
};
use sigpatrol::model::coverage_set;
use sigpatrol::oracles::Scheme;
use sigpatrol::pipeline::{
    deadline_for, enumerate_placements, evaluate_placement, generate_instance, resolve, GeneratorParams,
    ResolutionConfig,
};
use sigpatrol::routes::covering_routes;

use common::{random_connected, Graph};

fn small_graph(seed: u64, n: usize, extra: usize, deadlines: (u32, u32)) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected(&mut rng, n, extra, deadlines, 0.7)
}

/// Every target set some feasible visiting order from `start` protects.
fn feasible_sets(g: &Graph, start: usize) -> HashSet<u64> {
    let dist = g.distances();
    let mut out = HashSet::new();
    fn walk(g: &Graph, dist: &[Vec<u32>], at: usize, time: u32, mask: u64, out: &mut HashSet<u64>) {
        out.insert(mask);
        for (i, &(v, _, d)) in g.targets.iter().enumerate() {
            let arrive = time + dist[at][v];
            if mask & (1 << i) == 0 && arrive <= d {
                walk(g, dist, v, arrive, mask | (1 << i), out);
            }
        }
    }
    walk(g, &dist, start, 0, 0, &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distances_match_bfs(seed in any::<u64>(), n in 1usize..12, extra in 0usize..6) {
        let g = small_graph(seed, n, extra, (1, 3));
        let setting = g.setting();
        let expected = g.distances();
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(setting.distances().get(u, v), expected[u][v]);
            }
        }
    }

    #[test]
    fn coverage_set_is_deadline_ball(seed in any::<u64>(), n in 1usize..12, extra in 0usize..6) {
        let g = small_graph(seed, n, extra, (1, 4));
        let setting = g.setting();
        let masks = g.cover_masks();
        for v in 0..n {
            let set = coverage_set(&setting, setting.distances(), v);
            for t in 0..g.targets.len() {
                prop_assert_eq!(set.contains(t), masks[v] >> t & 1 == 1);
            }
        }
    }

    #[test]
    fn heuristic_covers_are_valid(seed in any::<u64>(), n in 2usize..14, extra in 0usize..8) {
        let g = small_graph(seed, n, extra, (1, 2));
        let setting = g.setting();
        let instance = to_set_cover(&setting);
        let greedy = greedy_cover(&instance).unwrap();
        let improved = local_search_improve(&greedy, &instance);
        prop_assert!(g.is_cover(greedy.positions()));
        prop_assert!(g.is_cover(improved.positions()));
        prop_assert!(improved.len() <= greedy.len());
        let best = g.exhaustive_min_cover();
        prop_assert!(improved.len() >= best);
        match exact_cover(&instance, Duration::from_secs(10)).unwrap() {
            ExactCover::Optimal(p) => prop_assert_eq!(p.len(), best),
            ExactCover::Timeout(_) => prop_assert!(false, "tiny instance hit the budget"),
        }
    }

    // the bound is about minimum placements on graphs whose vertices are
    // all targets, as produced by the generator
    #[test]
    fn overlap_bounds(seed in any::<u64>(), n in 3usize..12, extra in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(&mut rng, n, extra, (1, 2), 1.0);
        let setting = g.setting();
        let t = g.targets.len() as i64;
        let m = g.exhaustive_min_cover();
        for p in g.covering_placements(m) {
            let metrics = overlap_metrics(&CoveringPlacement::new(p), &setting);
            prop_assert!(metrics.eta >= 0);
            if m >= 2 {
                prop_assert!(metrics.eta <= (t - m as i64) * (m as i64 - 1));
                prop_assert!((0.0..=1.0).contains(&metrics.tau_hat));
            }
        }
    }

    #[test]
    fn routes_are_valid_and_maximal(seed in any::<u64>(), n in 1usize..8, extra in 0usize..4, start in 0usize..8) {
        let g = small_graph(seed, n, extra, (1, 4));
        let setting = g.setting();
        let start = start % n;
        let support: Vec<usize> = (0..g.targets.len()).collect();
        let set = covering_routes(&setting, setting.distances(), start, &support);
        prop_assert!(set.complete);
        let covered: Vec<u64> = set
            .routes
            .iter()
            .map(|r| r.visits.iter().fold(0u64, |m, &t| m | 1 << t))
            .collect();
        for r in &set.routes {
            prop_assert!(r.is_valid(&setting, &support));
        }
        // no route is dominated by another
        for (i, a) in covered.iter().enumerate() {
            for (j, b) in covered.iter().enumerate() {
                prop_assert!(i == j || a & b != *a, "route {} inside route {}", i, j);
            }
        }
        // every feasible visit set lies inside some route
        for mask in feasible_sets(&g, start) {
            prop_assert!(covered.iter().any(|c| c & mask == mask), "set {:b} not dominated", mask);
        }
    }

    #[test]
    fn enumerator_yields_each_covering_placement_once(seed in any::<u64>(), n in 2usize..10, extra in 0usize..5) {
        let g = small_graph(seed, n, extra, (1, 2));
        let setting = g.setting();
        let m = g.exhaustive_min_cover();
        let got: Vec<Vec<usize>> = enumerate_placements(&setting, m, seed)
            .unwrap()
            .map(|p| p.positions().to_vec())
            .collect();
        let unique: HashSet<_> = got.iter().cloned().collect();
        prop_assert_eq!(unique.len(), got.len());
        let expected: HashSet<_> = g.covering_placements(m).into_iter().collect();
        prop_assert_eq!(unique, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_instances_are_connected(seed in any::<u64>(), n in 20usize..120) {
        let inst = generate_instance(&GeneratorParams::new(n, seed)).unwrap();
        let s = &inst.setting;
        prop_assert_eq!(s.num_targets(), n);
        prop_assert!((0..n).all(|v| s.distances().get(0, v) != u32::MAX));
        let degree = 2.0 * s.edges().len() as f64 / n as f64;
        prop_assert!((degree - 3.0).abs() <= 0.5, "mean degree {}", degree);
        prop_assert!(s.targets().iter().all(|t| t.value > 0.0 && t.value <= 1.0 && t.deadline == deadline_for(n)));
    }
}

#[test]
fn deadline_schedule() {
    assert_eq!(deadline_for(20), 3);
    assert_eq!(deadline_for(100), 5);
}

#[test]
fn path_resolution_finds_best_placement() {
    let g = Graph {
        n: 5,
        edges: (0..4).map(|v| (v, v + 1)).collect(),
        targets: vec![(0, 0.9, 1), (1, 0.3, 1), (2, 0.6, 1), (3, 0.5, 1), (4, 0.8, 1)],
    };
    let setting = g.setting();
    let alarm = sigpatrol::model::AlarmSystem::single_signal(setting.num_targets());
    let config = ResolutionConfig::default();
    let report = resolve(&setting, &alarm, &config).unwrap();
    assert_eq!(report.m, 2);
    assert!(report.exhausted);
    let deadline = Instant::now() + Duration::from_secs(60);
    let best = g
        .covering_placements(2)
        .into_iter()
        .map(|p| {
            let eval = evaluate_placement(&setting, &alarm, &CoveringPlacement::new(p), &config, deadline).unwrap();
            eval.values[&Scheme::Fc]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let got = report.best_value(Scheme::Fc).unwrap();
    assert!((got - best).abs() < 1e-9, "{got} vs {best}");
}
