//! Random street-like instances across sizes: deadline schedule, minimum
//! number of resources and overlap of the first placement.

use std::time::Duration;

use sigpatrol::mincover::{min_cover, overlap_metrics, CoverMethod};
use sigpatrol::pipeline::{deadline_for, generate_instance, GeneratorParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>4} {:>3} {:>6} {:>8} {:>6}", "n", "d", "mean m", "mean tau", "diam");
    for n in [10, 20, 40, 60, 80, 100] {
        let seeds = 0..10u64;
        let (mut m, mut tau, mut diam) = (0.0, 0.0, 0.0);
        for seed in seeds.clone() {
            let inst = generate_instance(&GeneratorParams::new(n, seed))?;
            let cover = min_cover(&inst.setting, CoverMethod::Auto, Duration::from_secs(5))?;
            m += cover.placement.len() as f64;
            tau += overlap_metrics(&cover.placement, &inst.setting).tau;
            diam += f64::from(inst.setting.distances().diameter());
        }
        let k = seeds.count() as f64;
        println!("{n:>4} {:>3} {:>6.2} {:>8.3} {:>6.1}", deadline_for(n), m / k, tau / k, diam / k);
    }
    Ok(())
}
