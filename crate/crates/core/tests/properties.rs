use proptest::prelude::*;

use qsep::bounds::{base_bound, iterated_bound, ud_bound, PriorVector};
use qsep::construction::{build_isometry, extract_kraus};
use qsep::feasibility::{
    check_certificate, max_uniform_gamma, optimize_gamma, GammaSearch, SeparationInstance, StateSet, SuccessVector,
};
use qsep::oracle::{grid_gamma_oracle, random_instance, EnsembleSpec, GaussianStream, PriorMode};
use qsep::qmat::{
    fidelity, gram_matrix, hermitian_sqrt, partial_trace, set_support_rank, spectral_norm, PureState, DEFAULT_RANK_TOL,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

/// `(n, dim)` with `2 ≤ n ≤ dim ≤ 4`.
fn shape() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4).prop_flat_map(|dim| (2usize..=dim, Just(dim)))
}

fn pure_instance(seed: u64, n: usize, dim: usize) -> SeparationInstance {
    random_instance(&EnsembleSpec::pure(n, dim, seed).with_priors(PriorMode::Random), dim).unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed: u64, dim in 2usize..=4) {
        let mut stream = GaussianStream::new(seed);
        let (a, b) = (stream.density(dim), stream.density(dim));
        let ab = fidelity(&a, &b).unwrap();
        let ba = fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn square_root_squares_back(seed: u64, dim in 1usize..=5) {
        let mut stream = GaussianStream::new(seed);
        let g = stream.gaussian_matrix(dim, dim);
        let m = &g * g.adjoint();
        let r = hermitian_sqrt(&m).unwrap();
        let err = spectral_norm(&(&r * &r - &m));
        prop_assert!(err <= 1e-9 * spectral_norm(&m).max(1.0), "error {err}");
    }

    #[test]
    fn partial_trace_recovers_factors(seed: u64, da in 1usize..=3, db in 1usize..=3) {
        let mut stream = GaussianStream::new(seed);
        let (a, b) = (stream.density(da), stream.density(db));
        let joint = a.tensor(&b);
        let left = partial_trace(&joint, &[da, db], &[0]).unwrap();
        let right = partial_trace(&joint, &[da, db], &[1]).unwrap();
        prop_assert!((left.matrix() - a.matrix()).norm() < 1e-12);
        prop_assert!((right.matrix() - b.matrix()).norm() < 1e-12);
    }

    #[test]
    fn support_rank_is_monotone(seed: u64, dim in 2usize..=4, n in 2usize..=4) {
        let mut stream = GaussianStream::new(seed);
        let states: Vec<_> = (0..n).map(|_| stream.haar_state(dim).density()).collect();
        let full = set_support_rank(&states, DEFAULT_RANK_TOL).unwrap();
        for k in 1..n {
            prop_assert!(set_support_rank(&states[..k], DEFAULT_RANK_TOL).unwrap() <= full);
        }
        prop_assert_eq!(full, n.min(dim));
    }

    #[test]
    fn global_phases_change_nothing(seed: u64, (n, dim) in shape(), phase in 0.0f64..6.3) {
        let mut stream = GaussianStream::new(seed);
        let inputs: Vec<PureState> = (0..n).map(|_| stream.haar_state(dim)).collect();
        let targets: Vec<PureState> = (0..n).map(|_| stream.haar_state(dim)).collect();
        let rotated: Vec<PureState> = inputs.iter().map(|s| s.with_phase(phase)).collect();
        let xp = gram_matrix(&targets).unwrap();
        let before = max_uniform_gamma(&gram_matrix(&inputs).unwrap(), &xp, 1e-10).unwrap();
        let after = max_uniform_gamma(&gram_matrix(&rotated).unwrap(), &xp, 1e-10).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
        let priors = PriorVector::uniform(n).unwrap();
        let b0 = base_bound(&SeparationInstance::pure(inputs, targets.clone(), priors.clone()).unwrap()).unwrap();
        let b1 = base_bound(&SeparationInstance::pure(rotated, targets, priors).unwrap()).unwrap();
        prop_assert!((b0 - b1).abs() < 1e-12);
    }

    #[test]
    fn base_bound_equals_ud_bound_for_orthogonal_targets(seed: u64, (n, dim) in shape()) {
        let mut stream = GaussianStream::new(seed);
        let inputs: Vec<PureState> = (0..n).map(|_| stream.haar_state(dim)).collect();
        let targets: Vec<PureState> = (0..n).map(|i| PureState::basis(n, i).unwrap()).collect();
        let priors = PriorVector::new(stream.simplex(n)).unwrap();
        let inst = SeparationInstance::pure(inputs, targets, priors).unwrap();
        let ud = ud_bound(inst.inputs(), inst.priors()).unwrap();
        prop_assert!((base_bound(&inst).unwrap() - ud).abs() < 1e-12);
    }

    #[test]
    fn hierarchy_is_monotone(seed: u64, (n, dim) in shape(), mixed: bool) {
        let spec = if mixed { EnsembleSpec::mixed(n, dim, seed) } else { EnsembleSpec::pure(n, dim, seed) };
        let inst = random_instance(&spec.with_priors(PriorMode::Random), dim).unwrap();
        let series = iterated_bound(&inst, 6).unwrap();
        for w in series.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        prop_assert!(series.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}

proptest! {
    #![proptest_config(config(100))]

    /// Every uniform value below the optimum is certified, none above it.
    #[test]
    fn uniform_feasible_set_is_an_interval(seed: u64, (n, dim) in shape()) {
        let inst = pure_instance(seed, n, dim);
        let (x, xp) = inst.grams().unwrap();
        let star = max_uniform_gamma(&x, &xp, 1e-10).unwrap();
        for k in 0..=1000 {
            let g = k as f64 / 1000.0;
            let cert = check_certificate(&x, &xp, &SuccessVector::uniform(n, g).unwrap(), 1e-9).unwrap();
            if g <= star - 1e-9 {
                prop_assert!(cert.feasible, "γ = {g} below γ* = {star} rejected");
            } else if g >= star + 1e-6 {
                prop_assert!(!cert.feasible, "γ = {g} above γ* = {star} accepted");
            }
        }
        let grid = grid_gamma_oracle(&x, &xp, None, 1e-3).unwrap().uniform;
        prop_assert!((star - grid).abs() <= 2e-3);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn optimized_gamma_is_certified_and_beats_uniform(seed: u64, (n, dim) in shape()) {
        let inst = pure_instance(seed, n, dim);
        let (x, xp) = inst.grams().unwrap();
        let search = GammaSearch { starts: 20, ..GammaSearch::default() };
        let gamma = optimize_gamma(&x, &xp, inst.priors(), &search, seed).unwrap();
        prop_assert!(check_certificate(&x, &xp, &gamma, search.tol).unwrap().feasible);
        let uniform = max_uniform_gamma(&x, &xp, search.precision).unwrap();
        prop_assert!(gamma.objective(inst.priors().as_slice()) >= uniform - 1e-9);
        if n <= 3 && dim <= 3 && n == 2 {
            let grid = grid_gamma_oracle(&x, &xp, Some(inst.priors()), 1e-3).unwrap();
            let best: f64 = grid.general.unwrap().iter().zip(inst.priors().as_slice()).map(|(g, e)| g * e).sum();
            prop_assert!(gamma.objective(inst.priors().as_slice()) >= best - 2e-3);
        }
    }

    #[test]
    fn constructed_channels_are_complete(seed: u64, (n, dim) in shape()) {
        let inst = pure_instance(seed, n, dim);
        let (x, xp) = inst.grams().unwrap();
        let gamma = SuccessVector::uniform(n, max_uniform_gamma(&x, &xp, 1e-10).unwrap()).unwrap();
        let iso = build_isometry(&inst, &gamma, 1e-9).unwrap();
        prop_assert!(iso.isometry_defect() < 1e-9);
        prop_assert!(extract_kraus(&iso).completeness_residual() < 1e-9);
    }

    #[test]
    fn tensor_powers_raise_fidelities(seed: u64, dim in 2usize..=3, copies in 1usize..=3) {
        let mut stream = GaussianStream::new(seed);
        let states = StateSet::Pure(vec![stream.haar_state(dim), stream.haar_state(dim)]);
        let f = states.fidelity(0, 1).unwrap();
        let fk = states.tensor_power(copies).unwrap().fidelity(0, 1).unwrap();
        prop_assert!((fk - f.powi(copies as i32)).abs() < 1e-12);
    }
}
