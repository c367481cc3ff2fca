// Certificates for three random states sent to three random targets:
// uniform bisection, a prior-weighted search and the brute-force grid.

use qsep::feasibility::{check_certificate, max_uniform_gamma, optimize_gamma, GammaSearch};
use qsep::oracle::{grid_gamma_oracle, random_instance, EnsembleSpec, PriorMode};

fn main() -> Result<(), qsep::Error> {
    let spec = EnsembleSpec::pure(3, 3, 2024).with_priors(PriorMode::Random);
    let instance = random_instance(&spec, 3)?;
    let (x, xp) = instance.grams()?;
    let priors = instance.priors();
    println!("priors {:?}", priors.as_slice());

    let uniform = max_uniform_gamma(&x, &xp, 1e-10)?;
    let grid = grid_gamma_oracle(&x, &xp, Some(priors), 0.02)?;
    println!("uniform: bisection {uniform:.6}, grid {:.2}", grid.uniform);

    let gamma = optimize_gamma(&x, &xp, priors, &GammaSearch::default(), 7)?;
    let cert = check_certificate(&x, &xp, &gamma, 1e-9)?;
    println!(
        "search: gamma {:.4?}, objective {:.6}, residual min eigenvalue {:.2e}, feasible {}",
        gamma.as_slice(),
        gamma.objective(priors.as_slice()),
        cert.residual_min_eigenvalue,
        cert.feasible
    );
    if let Some(g) = grid.general {
        let best: f64 = g.iter().zip(priors.as_slice()).map(|(a, b)| a * b).sum();
        println!("grid optimum at resolution 0.02: {g:.2?}, objective {best:.6}");
    }
    Ok(())
}
