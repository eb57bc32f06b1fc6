use fourier_qml::analysis::{
    advantage_criterion, bicone_agreement, bicone_contains, bicone_height, count_gates, fit_decay,
    numerical_membership, plateau_stats, predicted_grad_f_sq, resource_report, resrc_classical_full,
    resrc_quantum, variance_bounds, PlateauCase, PlateauConfig, PlateauMode,
};
use fourier_qml::cfflm::FeatureMap;
use fourier_qml::qfflm::{AnsatzSpec, Entangler, Rotation, Topology};
use fourier_qml::spectra::EncodingSpec;
use num_bigint::BigUint;
use proptest::prelude::*;

/// Gates of one trainable module: rotations, the CNOT line and the ring edge.
fn module_gates(n: usize, layers: usize, rotation: Rotation, ring: bool) -> usize {
    let per_rotation = match rotation {
        Rotation::Yz => 2,
        Rotation::Rot => 3,
    };
    layers * (n * per_rotation + n - 1 + usize::from(ring && n >= 2))
}

fn gate_oracle(spec: &AnsatzSpec) -> usize {
    let n = spec.total_qubits();
    let ring = spec.entangler == Entangler::Ring;
    let module = module_gates(n, spec.layers, spec.rotation, ring);
    match spec.topology {
        Topology::Parallel => 2 * module + n,
        // Every variable is uploaded once per block.
        Topology::Serial { blocks } => spec.trainable_modules() * module + blocks * spec.variables,
    }
}

#[test]
fn gate_count_of_small_parallel_ansatz() {
    let spec = AnsatzSpec::parallel_exponential(1, 4, 1).unwrap();
    assert_eq!(count_gates(&spec).unwrap(), 26);
    let no_layers = AnsatzSpec::parallel_exponential(1, 4, 0).unwrap();
    assert_eq!(count_gates(&no_layers).unwrap(), 4);
}

#[test]
fn serial_presets_match_parameter_and_gate_oracles() {
    for l in 1..=4 {
        for exp in [false, true] {
            let mol = AnsatzSpec::molecular_preset(l, exp);
            assert_eq!(mol.param_count(), 126 * l);
            assert_eq!(count_gates(&mol).unwrap(), gate_oracle(&mol));
            let house = AnsatzSpec::housing_preset(l, exp);
            assert_eq!(house.param_count(), 96 * l);
            assert_eq!(count_gates(&house).unwrap(), gate_oracle(&house));
        }
    }
}

#[test]
fn gate_count_works_beyond_the_simulator_cap() {
    let spec = AnsatzSpec::parallel_exponential(1, 40, 1).unwrap();
    assert!(spec.compile::<f64>().is_err());
    assert_eq!(count_gates(&spec).unwrap(), gate_oracle(&spec));
}

proptest! {
    #[test]
    fn gate_count_matches_enumeration(
        m in 1usize..=3,
        n in 1usize..=4,
        l in 0usize..=4,
        ring in any::<bool>(),
        rot in any::<bool>(),
    ) {
        let mut spec = AnsatzSpec::parallel(m, n, l, EncodingSpec::naive(n).unwrap());
        if ring {
            spec.entangler = Entangler::Ring;
        }
        if rot {
            spec.rotation = Rotation::Rot;
        }
        let count = count_gates(&spec).unwrap();
        prop_assert_eq!(count, gate_oracle(&spec));
        // Linear in the layer count with the encoding as intercept.
        let mut one = spec.clone();
        one.layers = 1;
        let slope = count_gates(&one).unwrap() - m * n;
        prop_assert_eq!(count, m * n + l * slope);
    }

    #[test]
    fn advantage_is_monotone_in_precision_and_features(
        n_gt in 1u64..5_000,
        eps in 1e-4f64..1.0,
        grow in 1.0f64..10.0,
        k in 3u64..40,
        m in 1u32..12,
    ) {
        let base = advantage_criterion(n_gt, eps, k, m).unwrap();
        let looser = advantage_criterion(n_gt, (eps * grow).min(1.0), k, m).unwrap();
        let wider = advantage_criterion(n_gt, eps, k + 2, m).unwrap();
        let deeper = advantage_criterion(n_gt, eps, k, m + 1).unwrap();
        if base.holds {
            prop_assert!(looser.holds && wider.holds && deeper.holds);
        }
        prop_assert!(looser.log_margin >= base.log_margin - 1e-12);
    }

    #[test]
    fn quantum_cost_grows_as_precision_tightens(
        n_gt in 1u64..1_000,
        n_tp in 0u64..100,
        eps in 1e-3f64..1.0,
    ) {
        let a = resrc_quantum(n_gt, n_tp, eps, eps).unwrap();
        let b = resrc_quantum(n_gt, n_tp, eps / 2.0, eps / 2.0).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn bicone_grid_agrees_away_from_the_boundary(c0 in -1.5f64..1.5, c1 in -1.5f64..1.5, c2 in -1.5f64..1.5) {
        let c = [c0, c1, c2];
        let h = bicone_height(c);
        prop_assume!((h - 1.0).abs() > 1e-3);
        let fm = FeatureMap::uniform(1, 1).unwrap();
        let m = numerical_membership(&c, &fm, 256).unwrap();
        prop_assert_eq!(m.member, bicone_contains(c));
        prop_assert!(m.max_abs <= h + 1e-12);
    }
}

#[test]
fn classical_full_cost() {
    assert_eq!(resrc_classical_full(27, 2), BigUint::from(3u32 * 729 + 1));
}

#[test]
fn resource_report_of_small_ansatz() {
    let spec = AnsatzSpec::parallel_exponential(1, 4, 1).unwrap();
    let r = resource_report(&spec, 0.1).unwrap();
    assert_eq!(r.n_gt, 26);
    assert_eq!(r.n_tp, 16);
    assert_eq!(r.k, 81);
    assert_eq!(r.features, BigUint::from(81u32));
    // ⌈26/0.01 + 1 + 16 (2·26/0.01 + 3)⌉ evaluated on the binary value of 0.1.
    let q = 26.0 / 0.01 + 1.0 + 16.0 * (52.0 / 0.01 + 3.0);
    let got: f64 = r.resrc_q.to_string().parse().unwrap();
    assert!((got - q).abs() <= 1.0, "{got} vs {q}");
    assert_eq!(r.resrc_c, BigUint::from(3u32 * 81 + 1));
    assert!(!r.advantage);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["resrc_c"], "244");
}

#[test]
fn bicone_grid_maximum_of_known_point() {
    // sup |0.6 + 0.5√2 cos x| = 0.6 + 0.5√2, attained at x = 0.
    let c = [0.6, 0.5, 0.0];
    let expected = 0.6 + 0.5 * 2f64.sqrt();
    assert!((bicone_height(c) - expected).abs() < 1e-15);
    let fm = FeatureMap::uniform(1, 1).unwrap();
    let m = numerical_membership(&c, &fm, 64).unwrap();
    assert!((m.max_abs - expected).abs() < 1e-12);
    assert!(!m.member);
    assert!(bicone_contains([1.0, 0.0, 0.0]));
    assert!(bicone_contains([0.0, 0.5, 0.5]));
    assert!(!bicone_contains([0.0, 0.6, 0.5]));
}

#[test]
fn bicone_agreement_is_reproducible() {
    let a = bicone_agreement(500, 128, 0.05, 3).unwrap();
    let b = bicone_agreement(500, 128, 0.05, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.disagreements_outside_band, 0);
    assert!(bicone_agreement(0, 128, 0.05, 3).is_err());
}

#[test]
fn haar_output_moments_for_small_dimensions() {
    for (qubits, expected) in [(1usize, 1.0 / 3.0), (2, 1.0 / 5.0)] {
        let r = plateau_stats::<f64>(&PlateauConfig::haar(1, qubits, 4000, 11)).unwrap();
        assert_eq!(r.predicted_f_sq, expected);
        assert!((r.f_sq.mean - expected).abs() < 3.0 * r.f_sq.se + 1e-12, "{:?}", r.f_sq);
        assert!(r.f.mean.abs() < 3.0 * r.f.se, "{:?}", r.f);
    }
}

#[test]
fn haar_gradient_moments_match_predictions() {
    for case in PlateauCase::ALL {
        let cfg = PlateauConfig::haar(1, 2, 4000, 21).with_case(case, 2);
        let r = plateau_stats::<f64>(&cfg).unwrap();
        let g = r.gradient.unwrap();
        let p = g.predicted_grad_f_sq.unwrap();
        assert_eq!(p, predicted_grad_f_sq(4, case, true));
        assert!((g.grad_f_sq.mean - p).abs() < 3.0 * g.grad_f_sq.se + 1e-12, "{case:?} {:?}", g.grad_f_sq);
        assert!(g.grad_loss.var <= g.bound.bound, "{case:?}");
    }
}

#[test]
fn case_three_predictions() {
    assert_eq!(predicted_grad_f_sq(8, PlateauCase::III, true), 1.0 / 9.0);
    assert_eq!(predicted_grad_f_sq(8, PlateauCase::III, false), 0.0);
    let off = PlateauConfig::haar(1, 2, 500, 5).with_case(PlateauCase::III, 1);
    let g = plateau_stats::<f64>(&off).unwrap().gradient.unwrap();
    assert!(g.grad_f_sq.mean < 1e-20);
    let b = variance_bounds(8, PlateauCase::III).unwrap();
    assert_eq!(b.bound, 16.0 / 9.0);
    assert_eq!(b.gamma_ii, 1.0 / 9.0);
    assert_eq!(b.gamma_iii_mean, -8.0 / 63.0);
    assert!(variance_bounds(1, PlateauCase::I).is_err());
}

#[test]
fn circuit_mode_runs_and_is_seeded() {
    let mut cfg = PlateauConfig::haar(1, 3, 200, 9).with_case(PlateauCase::II, 1);
    cfg.mode = PlateauMode::Circuit { layers: 2, param: None };
    let a = plateau_stats::<f64>(&cfg).unwrap();
    let b = plateau_stats::<f64>(&cfg).unwrap();
    assert_eq!(a.f, b.f);
    assert!(a.f.mean.abs() <= 1.0);
    assert!(a.gradient.unwrap().predicted_grad_f_sq.is_none());
}

#[test]
fn too_few_trials_are_rejected() {
    assert!(plateau_stats::<f64>(&PlateauConfig::haar(1, 2, 10, 1)).is_err());
}

#[test]
fn decay_fit_recovers_exact_exponential() {
    let pts: Vec<(usize, f64)> = (1..=6).map(|n| (n, 0.7 * 0.5f64.powi(n as i32))).collect();
    let fit = fit_decay(&pts).unwrap();
    assert!((fit.alpha - 2.0).abs() < 1e-12);
    assert!((fit.slope + 2f64.ln()).abs() < 1e-12);
}
