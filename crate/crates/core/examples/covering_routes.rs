//! Maximal covering routes from one vertex: every route visits targets
//! before their deadlines, and no route's target set is contained in
//! another's.

use sigpatrol::model::{build_setting, RawSetting, RawTarget};
use sigpatrol::routes::{covering_routes_with, RouteLimits};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a star with two long arms
    let raw = RawSetting {
        vertices: ["hub", "n1", "n2", "e1", "e2", "s1", "w1"].map(String::from).to_vec(),
        edges: [("hub", "n1"), ("n1", "n2"), ("hub", "e1"), ("e1", "e2"), ("hub", "s1"), ("hub", "w1")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .to_vec(),
        targets: [("n2", 0.9, 4), ("e2", 0.8, 6), ("s1", 0.4, 3), ("w1", 0.5, 5)]
            .map(|(id, value, deadline)| RawTarget {
                id: id.to_string(),
                value,
                deadline,
            })
            .to_vec(),
    };
    let setting = build_setting(&raw)?;
    let start = setting.vertex_index("hub")?;
    let support: Vec<usize> = (0..setting.num_targets()).collect();

    let exact = covering_routes_with(&setting, setting.distances(), start, &support, RouteLimits::default());
    println!("{} maximal routes from hub (complete={})", exact.len(), exact.complete);
    for route in &exact.routes {
        let stops: Vec<String> = route
            .visits
            .iter()
            .zip(&route.arrivals)
            .map(|(&t, a)| format!("{}@{a}", setting.target_name(t)))
            .collect();
        println!("  {}", stops.join(" -> "));
    }

    // forcing the beam variant with a tiny width may drop routes
    let limits = RouteLimits {
        exact_support_limit: 0,
        beam_width: 2,
    };
    let beam = covering_routes_with(&setting, setting.distances(), start, &support, limits);
    println!("beam width 2: {} routes (complete={})", beam.len(), beam.complete);
    Ok(())
}
