// Samples the branches of a constructed channel and compares the counts with
// the exact probabilities.

use qsep::bounds::PriorVector;
use qsep::construction::{apply_channel, build_isometry, extract_kraus, BranchKind};
use qsep::feasibility::{SeparationInstance, SuccessVector};
use qsep::oracle::sampled_channel_check;
use qsep::PureState;

fn main() -> Result<(), qsep::Error> {
    let inputs = vec![PureState::from_real(&[1.0, 0.0])?, PureState::from_real(&[0.5, 0.75f64.sqrt()])?];
    let targets = vec![PureState::basis(2, 0)?, PureState::basis(2, 1)?];
    let instance = SeparationInstance::pure(inputs.clone(), targets, PriorVector::uniform(2)?)?;
    let channel = extract_kraus(&build_isometry(&instance, &SuccessVector::uniform(2, 0.5)?, 1e-9)?);

    for (i, psi) in inputs.iter().enumerate() {
        let rho = psi.density();
        let success: f64 = apply_channel(&channel, &rho)?
            .iter()
            .filter(|o| o.kind == BranchKind::Success)
            .map(|o| o.probability)
            .sum();
        let report = sampled_channel_check(&channel, &rho, 200_000, i as u64)?;
        let worst = report.sigma_deviation.iter().copied().fold(0.0, f64::max);
        println!("input {i}: exact success {success:.6}, worst branch deviation {worst:.2} sigma");
        for (k, (f, p)) in report.frequencies.iter().zip(&report.expected).enumerate() {
            if *p > 0.0 {
                println!("  branch {k}: sampled {f:.5}, exact {p:.5}");
            }
        }
    }
    Ok(())
}
