//! Responding to an alarm signal with two resources under full, partial and
//! no coordination, first on a hand-made game and then on a placement of a
//! patrolling instance with two signals.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use sigpatrol::mincover::CoveringPlacement;
use sigpatrol::model::{build_setting, AlarmSystem, RawSetting, RawSignal, RawTarget};
use sigpatrol::oracles::{fc_sro, initial_joint_routes, nc_sro, pc_sro, FcOptions, PcOptions, ResponseGame};
use sigpatrol::pipeline::{evaluate_placement, ResolutionConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // each resource has two routes; route lists give the protected targets
    let game = ResponseGame::from_coverage(
        vec![0.9, 0.7, 0.8],
        vec![vec![vec![0], vec![1]], vec![vec![0], vec![2]]],
    );
    let nc = nc_sro(&game)?;
    let pc = pc_sro(&game, &PcOptions { restarts: 20, ..PcOptions::default() }, None)?;
    let fc = fc_sro(&game, &FcOptions::default(), &initial_joint_routes(&nc))?;
    println!("hand-made game: FC {:.4}  PC {:.4}  NC {:.4}", fc.value, pc.value, nc.value);
    println!("FC joint strategy {:?}", fc.strategy);

    // a ring of eight vertices, every other one a target
    let names: Vec<String> = (0..8).map(|i| format!("r{i}")).collect();
    let raw = RawSetting {
        vertices: names.clone(),
        edges: (0..8).map(|i| (names[i].clone(), names[(i + 1) % 8].clone())).collect(),
        targets: (0..8)
            .step_by(2)
            .map(|i| RawTarget {
                id: names[i].clone(),
                value: 0.4 + 0.05 * i as f64,
                deadline: 3,
            })
            .collect(),
    };
    let setting = build_setting(&raw)?;
    // the north sensor fires for r0 and r2, the south one for r4 and r6; r2
    // and r4 trigger either
    let signals = vec![
        RawSignal {
            id: "north".into(),
            probs: BTreeMap::from([("r0".into(), 1.0), ("r2".into(), 0.6), ("r4".into(), 0.3)]),
        },
        RawSignal {
            id: "south".into(),
            probs: BTreeMap::from([("r2".into(), 0.4), ("r4".into(), 0.7), ("r6".into(), 1.0)]),
        },
    ];
    let alarm = AlarmSystem::from_raw(&signals, &setting)?;
    let placement = CoveringPlacement::new(vec![setting.vertex_index("r1")?, setting.vertex_index("r5")?]);
    let eval = evaluate_placement(
        &setting,
        &alarm,
        &placement,
        &ResolutionConfig::default(),
        Instant::now() + Duration::from_secs(30),
    )?;
    // each signal's game is solved on its own, so the schemes are ordered per
    // signal; the aggregate over signals need not be
    for (scheme, value) in &eval.values {
        println!("ring, placement r1 r5: {scheme} {value:.4}");
    }
    for sol in &eval.signals {
        let per: Vec<String> = sol.results.iter().map(|(s, r)| format!("{s} {:.4}", r.value)).collect();
        println!("  signal {}: {}", alarm.signal_name(sol.signal), per.join(", "));
    }
    Ok(())
}
