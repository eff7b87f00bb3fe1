//! Anytime resolution: step the resolver over covering placements and watch
//! the incumbents improve.

use std::time::Duration;

use sigpatrol::oracles::Scheme;
use sigpatrol::pipeline::{generate_instance, GeneratorParams, ResolutionConfig, Resolver};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let instance = generate_instance(&GeneratorParams::new(24, 3))?;
    let config = ResolutionConfig {
        budget: Duration::from_secs(20),
        seed: 3,
        ..ResolutionConfig::default()
    };
    let mut resolver = Resolver::new(&instance.setting, &instance.alarm, config)?;
    println!("{} resources, cover by {:?}", resolver.report().m, resolver.report().cover_method);
    let mut last = None;
    while resolver.step()? > 0 {
        let report = resolver.report();
        let best = [Scheme::Fc, Scheme::Pc, Scheme::Nc]
            .map(|s| format!("{s} {:.4}", report.best_value(s).unwrap_or(f64::NAN)))
            .join("  ");
        if last.as_ref() != Some(&best) {
            println!("after {:>3} placements: {best}", report.placements_evaluated);
            last = Some(best);
        }
        if report.placements_evaluated >= 40 {
            break;
        }
    }
    let report = resolver.into_report();
    println!("exhausted={} certified={}", report.exhausted, report.certified());
    Ok(())
}
