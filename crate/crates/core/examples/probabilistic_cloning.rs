// Exact probabilistic 1 → 2 cloning of two states with overlap 0.6.

use qsep::bounds::{bound_report, CloningComparison, PriorVector};
use qsep::construction::{build_isometry, extract_kraus, verify_separation};
use qsep::feasibility::{max_uniform_gamma, SeparationInstance, StateSet, SuccessVector};
use qsep::PureState;

fn main() -> Result<(), qsep::Error> {
    let single = StateSet::Pure(vec![PureState::from_real(&[1.0, 0.0])?, PureState::from_real(&[0.6, 0.8])?]);
    let instance = SeparationInstance::new(single.tensor_power(1)?, single.tensor_power(2)?, PriorVector::uniform(2)?)?;

    let (x, xp) = instance.grams()?;
    let gamma_star = max_uniform_gamma(&x, &xp, 1e-10)?;
    // For two states the optimum is (1 - s)/(1 - s²) = 1/(1 + s).
    println!("uniform cloning success {gamma_star:.9} (1/(1+s) = {:.9})", 1.0 / 1.6);

    let gamma = SuccessVector::uniform(2, gamma_star)?;
    let iso = build_isometry(&instance, &gamma, 1e-9)?;
    println!("isometry: {} x {}, defect {:.2e}", iso.isometry().nrows(), iso.isometry().ncols(), iso.isometry_defect());
    let report = verify_separation(&extract_kraus(&iso), &instance, &gamma, 1e-6)?;
    println!("verified: {}, average failure {:.9}", report.pass, report.average_failure);

    let task = CloningComparison { states: &single, copies_in: 1, copies_out: 2 };
    let bounds = bound_report(&instance, 4, Some(task))?;
    println!("hierarchy {:?}", bounds.series);
    for (name, value) in bounds.comparisons.entries() {
        if let Some(v) = value {
            println!("{name:>16} {v:.12}");
        }
    }
    Ok(())
}
