// Failure-probability lower bounds for random pure and mixed instances.

use qsep::bounds::bound_report;
use qsep::oracle::{random_instance, EnsembleSpec, PriorMode};

fn main() -> Result<(), qsep::Error> {
    for spec in [EnsembleSpec::pure(4, 3, 1), EnsembleSpec::mixed(3, 3, 0)] {
        let instance = random_instance(&spec.with_priors(PriorMode::Random), spec.dim)?;
        let report = bound_report(&instance, 6, None)?;
        println!("{:?} n={} dim={}: {} pairs in the index set", spec.kind, spec.n, spec.dim, report.delta_set.len());
        for (r, p) in report.series.iter().enumerate() {
            println!("  P_f^({r}) = {p:.12}");
        }
        for (name, value) in report.comparisons.entries() {
            if let Some(v) = value {
                println!("  {name} = {v:.12}");
            }
        }
    }
    Ok(())
}
