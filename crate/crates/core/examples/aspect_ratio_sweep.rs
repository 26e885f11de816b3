//! Compaction error against cell aspect ratio for each load assembly and
//! stabilization, written as CSV to stdout.

use polyvem::loads::LoadMethod;
use polyvem::verify::sweep::{aspect_ratio_sweep, growth_ratio, rows_to_csv, SweepConfig};

fn main() -> polyvem::Result<()> {
    let cfg = SweepConfig {
        methods: vec![LoadMethod::Projection, LoadMethod::Nodal, LoadMethod::DiscreteGradient],
        ..SweepConfig::default()
    };
    let rows = aspect_ratio_sweep(&cfg)?;
    print!("{}", rows_to_csv(&rows));
    eprintln!("series                               slope   max/min");
    for series in rows.chunks(cfg.aspect_ratios.len()) {
        let r = &series[0];
        let refs: Vec<_> = series.iter().collect();
        eprintln!(
            "{:<12} {:<8} {:<12} {:>8.3} {:>9.2e}",
            r.grid.name(),
            r.stab.name(),
            r.method.name(),
            r.slope,
            growth_ratio(&refs)
        );
    }
    Ok(())
}
