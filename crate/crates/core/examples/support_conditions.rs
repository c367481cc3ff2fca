// Separability of mixed-state families decided from their supports.

use qsep::bounds::PriorVector;
use qsep::feasibility::{
    discriminate_then_prepare_rates, support_propagation_check, universal_separability, SeparationInstance, StateSet,
};
use qsep::qmat::DEFAULT_RANK_TOL;
use qsep::{DensityMatrix, PureState};

fn mix(a: &PureState, b: &PureState, p: f64) -> DensityMatrix {
    let m = a.density().matrix().map(|z| z * p) + b.density().matrix().map(|z| z * (1.0 - p));
    DensityMatrix::new(m).expect("convex combination of states")
}

fn main() -> Result<(), qsep::Error> {
    let e: Vec<PureState> = (0..3).map(|i| PureState::basis(3, i)).collect::<Result<_, _>>()?;
    // ρ₀ lives on span{e₀, e₁}, ρ₁ on span{e₁}, ρ₂ on span{e₂}.
    let family = vec![mix(&e[0], &e[1], 0.7), e[1].density(), e[2].density()];
    let report = universal_separability(&family, DEFAULT_RANK_TOL)?;
    println!("separable per state: {:?}", report.per_index);
    println!("discriminate-then-prepare rates: {:?}", discriminate_then_prepare_rates(&family, DEFAULT_RANK_TOL)?);

    // Putting ρ₁ inside ρ₀'s support on the target side is allowed; the
    // reverse direction would create separability from nothing.
    let blurred = vec![mix(&e[0], &e[1], 0.5), mix(&e[0], &e[1], 0.5), e[2].density()];
    let forward = SeparationInstance::new(
        StateSet::Mixed(family.clone()),
        StateSet::Mixed(blurred.clone()),
        PriorVector::uniform(3)?,
    )?;
    let backward = SeparationInstance::new(StateSet::Mixed(blurred), StateSet::Mixed(family), PriorVector::uniform(3)?)?;
    println!("family -> blurred: {:?}", support_propagation_check(&forward, DEFAULT_RANK_TOL)?);
    println!("blurred -> family: {:?}", support_propagation_check(&backward, DEFAULT_RANK_TOL)?);
    Ok(())
}
