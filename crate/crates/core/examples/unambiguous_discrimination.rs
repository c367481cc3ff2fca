// Unambiguous discrimination of two pure states with overlap `s`.
//
// Success at `γ = 1 - s` on both inputs is the best uniform rate, and the
// constructed channel meets the failure bound `s` exactly.

use qsep::bounds::{base_bound, idp_bound, PriorVector};
use qsep::construction::{build_isometry, extract_kraus, verify_separation};
use qsep::feasibility::{max_uniform_gamma, SeparationInstance, SuccessVector};
use qsep::PureState;

fn main() -> Result<(), qsep::Error> {
    let s: f64 = 0.5;
    let inputs = vec![PureState::from_real(&[1.0, 0.0])?, PureState::from_real(&[s, (1.0 - s * s).sqrt()])?];
    let targets = vec![PureState::basis(2, 0)?, PureState::basis(2, 1)?];
    let instance = SeparationInstance::pure(inputs, targets, PriorVector::uniform(2)?)?;

    let (x, xp) = instance.grams()?;
    let gamma_star = max_uniform_gamma(&x, &xp, 1e-10)?;
    println!("overlap {s}: best uniform success probability {gamma_star:.9}");

    let gamma = SuccessVector::uniform(2, gamma_star)?;
    let channel = extract_kraus(&build_isometry(&instance, &gamma, 1e-9)?);
    let report = verify_separation(&channel, &instance, &gamma, 1e-6)?;
    for (i, v) in report.per_input.iter().enumerate() {
        println!(
            "input {i}: success {:.9}, fidelity with target {:.12}",
            v.success_probability,
            v.success_fidelity.unwrap_or(0.0)
        );
    }
    println!(
        "average failure {:.9}, base bound {:.9}, IDP bound {:.9}",
        report.average_failure,
        base_bound(&instance)?,
        idp_bound(instance.inputs())?
    );
    assert!(report.pass);
    Ok(())
}
