mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigpatrol::game::MixedStrategy;
use sigpatrol::mincover::CoveringPlacement;
use sigpatrol::model::{AlarmSystem, RawSignal};
use sigpatrol::oracles::{
    evaluate_profile, fc_sro, initial_joint_routes, nc_sro, pc_sro, FcOptions, PcOptions, ResponseGame,
    ResponseStrategy, Scheme,
};
use sigpatrol::pipeline::{evaluate_placement, ResolutionConfig};

use common::{joint_choices, support_enumeration_value, Graph};

fn random_game<R: Rng>(rng: &mut R, k: usize, sizes: &[usize], p: f64) -> ResponseGame {
    let values = (0..k).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let coverage = sizes
        .iter()
        .map(|&n| (0..n).map(|_| (0..k).filter(|_| rng.gen_bool(p)).collect()).collect())
        .collect();
    ResponseGame::from_coverage(values, coverage)
}

/// Resources split the targets into consecutive blocks; every route only
/// protects targets of its own block and every target is protected by some
/// route.
fn disjoint_game<R: Rng>(rng: &mut R) -> (ResponseGame, Vec<Vec<usize>>) {
    let m = rng.gen_range(2..=3);
    let mut blocks = Vec::new();
    let mut next = 0;
    for _ in 0..m {
        let len = rng.gen_range(1..=3);
        blocks.push((next..next + len).collect::<Vec<_>>());
        next += len;
    }
    let values: Vec<f64> = (0..next).map(|_| 1.0 - rng.gen::<f64>()).collect();
    let coverage = blocks
        .iter()
        .map(|block| {
            let mut routes: Vec<Vec<usize>> = (0..rng.gen_range(1..=4))
                .map(|_| block.iter().copied().filter(|_| rng.gen_bool(0.5)).collect())
                .collect();
            for &t in block {
                if !routes.iter().any(|r| r.contains(&t)) {
                    let i = rng.gen_range(0..routes.len());
                    routes[i].push(t);
                }
            }
            routes
        })
        .collect();
    (ResponseGame::from_coverage(values, coverage), blocks)
}

/// Value of resource `i` alone against an attacker restricted to `block`.
fn block_value(game: &ResponseGame, i: usize, block: &[usize]) -> f64 {
    let payoff: Vec<Vec<f64>> = (0..game.num_routes(i))
        .map(|r| {
            block
                .iter()
                .map(|&t| if game.protects(i, r, t) { 1.0 } else { 1.0 - game.values()[t] })
                .collect()
        })
        .collect();
    support_enumeration_value(&payoff).expect("every finite game has an equilibrium")
}

/// `1 - max_t π(t)·P(t unprotected)` by summing over every joint choice.
fn brute_value(game: &ResponseGame, profile: &[MixedStrategy]) -> f64 {
    let sizes: Vec<usize> = (0..game.num_resources()).map(|i| game.num_routes(i)).collect();
    let mut exposed = vec![0.0; game.num_targets()];
    for choice in joint_choices(&sizes) {
        let p: f64 = choice.iter().enumerate().map(|(i, &r)| profile[i].probs[r]).product();
        for (t, e) in exposed.iter_mut().enumerate() {
            if !choice.iter().enumerate().any(|(i, &r)| game.protects(i, r, t)) {
                *e += p;
            }
        }
    }
    1.0 - (0..game.num_targets())
        .map(|t| game.values()[t] * exposed[t])
        .fold(0.0, f64::max)
}

fn random_profile<R: Rng>(rng: &mut R, game: &ResponseGame) -> Vec<MixedStrategy> {
    (0..game.num_resources())
        .map(|i| {
            let w: Vec<f64> = (0..game.num_routes(i)).map(|_| rng.gen::<f64>() + 1e-3).collect();
            MixedStrategy::from_weights(&w)
        })
        .collect()
}

#[test]
fn nc_on_disjoint_blocks_is_worst_block_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let (game, blocks) = disjoint_game(&mut rng);
        let expected = blocks
            .iter()
            .enumerate()
            .map(|(i, b)| block_value(&game, i, b))
            .fold(f64::INFINITY, f64::min);
        let nc = nc_sro(&game).unwrap();
        assert!((nc.value - expected).abs() < 1e-7, "NC {} vs {}", nc.value, expected);
    }
}

#[test]
fn pc_matches_nc_without_shared_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let (game, _) = disjoint_game(&mut rng);
        let nc = nc_sro(&game).unwrap();
        let pc = pc_sro(&game, &PcOptions { restarts: 3, ..PcOptions::default() }, None).unwrap();
        assert!((pc.value - nc.value).abs() < 1e-6, "PC {} NC {}", pc.value, nc.value);
    }
}

#[test]
fn profile_evaluation_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
        let k = rng.gen_range(1..=6);
        let game = random_game(&mut rng, k, &sizes, 0.4);
        let profile = random_profile(&mut rng, &game);
        let expected = brute_value(&game, &profile);
        let got = evaluate_profile(&game, &ResponseStrategy::Independent(profile.clone()));
        assert!((got - expected).abs() < 1e-12);
        assert!((game.evaluate_independent(&profile) - expected).abs() < 1e-12);
    }
}

#[test]
fn coordination_ordering_and_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..60 {
        let m = rng.gen_range(2..=3);
        let sizes: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
        let k = rng.gen_range(2..=6);
        let game = random_game(&mut rng, k, &sizes, 0.4);
        let nc = nc_sro(&game).unwrap();
        let pc = pc_sro(&game, &PcOptions::default(), None).unwrap();
        let fc = fc_sro(&game, &FcOptions::default(), &initial_joint_routes(&nc)).unwrap();
        assert!(fc.diagnostics.optimal);
        assert!(fc.value >= pc.value - 1e-6 && pc.value >= nc.value - 1e-6);
        for trace in [&fc.diagnostics.value_trace, &pc.diagnostics.value_trace] {
            assert!(trace.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{trace:?}");
        }
        // reported value is the attacker best response to the strategy
        assert!((evaluate_profile(&game, &fc.strategy) - fc.value).abs() < 1e-9);
        assert!((evaluate_profile(&game, &pc.strategy) - pc.value).abs() < 1e-12);
    }
}

#[test]
fn multi_signal_value_aggregates_per_target() {
    // path v0 - v1 - ... - v5, targets everywhere but v2
    let graph = Graph {
        n: 6,
        edges: (0..5).map(|v| (v, v + 1)).collect(),
        targets: vec![(0, 0.9, 2), (1, 0.4, 3), (3, 0.7, 2), (4, 0.5, 3), (5, 0.8, 2)],
    };
    let setting = graph.setting();
    let name = |t: usize| setting.target_name(t).to_string();
    let raw = vec![
        RawSignal {
            id: "a".into(),
            probs: BTreeMap::from([(name(0), 1.0), (name(1), 0.5), (name(2), 0.3)]),
        },
        RawSignal {
            id: "b".into(),
            probs: BTreeMap::from([(name(1), 0.5), (name(2), 0.7), (name(3), 1.0), (name(4), 1.0)]),
        },
    ];
    let alarm = AlarmSystem::from_raw(&raw, &setting).unwrap();
    let placement = CoveringPlacement::new(vec![1, 4]);
    let config = ResolutionConfig::default();
    let eval = evaluate_placement(&setting, &alarm, &placement, &config, Instant::now() + Duration::from_secs(60)).unwrap();
    for scheme in [Scheme::Fc, Scheme::Pc, Scheme::Nc] {
        let mut worst: f64 = 0.0;
        for t in 0..setting.num_targets() {
            let mut exposed = 0.0;
            for sol in &eval.signals {
                let p = alarm.prob(sol.signal, t);
                if p == 0.0 {
                    continue;
                }
                let game = &sol.game;
                let local = game.targets().iter().position(|&g| g == t).unwrap();
                let miss = match &sol.results[&scheme].strategy {
                    ResponseStrategy::Joint(joint) => joint
                        .iter()
                        .filter(|(c, _)| !c.iter().enumerate().any(|(i, &r)| game.protects(i, r, local)))
                        .map(|(_, q)| q)
                        .sum::<f64>(),
                    ResponseStrategy::Independent(profile) => profile
                        .iter()
                        .enumerate()
                        .map(|(i, s)| {
                            1.0 - (0..game.num_routes(i))
                                .filter(|&r| game.protects(i, r, local))
                                .map(|r| s.probs[r])
                                .sum::<f64>()
                        })
                        .product(),
                };
                exposed += p * miss;
            }
            worst = worst.max(setting.target(t).value * exposed);
        }
        let got = eval.values[&scheme];
        assert!((got - (1.0 - worst)).abs() < 1e-9, "{scheme}: {got} vs {}", 1.0 - worst);
    }
}
