//! Minimum covering placements on a small street grid: greedy, local search,
//! exact branch and bound, plus the tree recursion on a spanning path.

use std::time::Duration;

use sigpatrol::mincover::{
    exact_cover, greedy_cover, local_search_improve, min_cover, overlap_metrics, to_set_cover, CoverMethod,
};
use sigpatrol::model::{build_setting, RawSetting, RawTarget};

fn grid(w: usize, h: usize, deadline: i64) -> RawSetting {
    let name = |x: usize, y: usize| format!("{x}.{y}");
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((name(x, y), name(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((name(x, y), name(x, y + 1)));
            }
        }
    }
    let vertices: Vec<String> = (0..h).flat_map(|y| (0..w).map(move |x| name(x, y))).collect();
    let targets = vertices
        .iter()
        .enumerate()
        .map(|(i, id)| RawTarget {
            id: id.clone(),
            value: 0.3 + 0.7 * ((i * 7) % 10) as f64 / 10.0,
            deadline,
        })
        .collect();
    RawSetting { vertices, edges, targets }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let setting = build_setting(&grid(6, 4, 2))?;
    let instance = to_set_cover(&setting);

    let greedy = greedy_cover(&instance)?;
    let improved = local_search_improve(&greedy, &instance);
    let exact = exact_cover(&instance, Duration::from_secs(10))?;
    println!("greedy        m={}", greedy.len());
    println!("local search  m={}", improved.len());
    println!("exact         m={} optimal={}", exact.placement().len(), exact.is_optimal());

    let best = exact.placement();
    let names: Vec<&str> = best.positions().iter().map(|&v| setting.vertex_name(v)).collect();
    let metrics = overlap_metrics(best, &setting);
    println!("placement {names:?}");
    println!("eta={} tau={:.3} tau_hat={:.3}", metrics.eta, metrics.tau, metrics.tau_hat);

    // a single row of the grid is a path, where the tree recursion applies
    let path = build_setting(&grid(12, 1, 1))?;
    let outcome = min_cover(&path, CoverMethod::Auto, Duration::from_secs(1))?;
    println!("path of 12: method {:?}, m={}", outcome.method, outcome.placement.len());
    Ok(())
}
