use std::io::Write;

use fourier_qml::cfflm::{ClassicalModel, FeatureMap};
use fourier_qml::qfflm::{AnsatzSpec, QuantumModel};
use fourier_qml::rng::{seeded, standard_normal};
use fourier_qml::trainer::{
    classical_loss_and_gradient, coulomb_features, load_csv_dataset, make_random_fourier_target,
    make_step_dataset, mse_loss, quantum_loss_and_gradient, train_classical, train_quantum, Dataset,
    Normalization, OptimizerConfig, TargetSpec, TrainConfig, TrainStatus,
};
use fourier_qml::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn qmodel(n: usize, l: usize) -> QuantumModel<f64> {
    QuantumModel::from_spec(&AnsatzSpec::parallel_exponential(1, n, l).unwrap()).unwrap()
}

fn zero_target(n: usize) -> Dataset<f64> {
    Dataset::from_function(n, "zero", |_| 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quantum_loss_gradient_matches_finite_differences(n in 1usize..=3, l in 1usize..=2, seed in any::<u64>()) {
        let model = qmodel(n, l);
        let data = make_step_dataset(17).unwrap();
        let theta = model.init_params(&mut seeded(seed));
        let (loss, grad) = quantum_loss_and_gradient(&model, &theta, &data).unwrap();
        let eval = |t: &[f64]| mse_loss(&model.evaluate_batch(t, &data.inputs).unwrap(), &data.outputs).unwrap();
        prop_assert!((loss - eval(&theta)).abs() < 1e-14);
        let h = 1e-6;
        for k in 0..theta.len() {
            let mut p = theta.clone();
            let mut q = theta.clone();
            p[k] += h;
            q[k] -= h;
            prop_assert!(((eval(&p) - eval(&q)) / (2.0 * h) - grad[k]).abs() < 1e-5);
        }
    }

    #[test]
    fn classical_loss_gradient_matches_finite_differences(d_f in 1usize..=6, seed in any::<u64>()) {
        let fm = FeatureMap::uniform(1, d_f).unwrap();
        let model = ClassicalModel::<f64>::zeros(fm.dim());
        let data = make_step_dataset(23).unwrap();
        let mut rng = seeded(seed);
        let theta: Vec<f64> = (0..fm.dim()).map(|_| standard_normal(&mut rng)).collect();
        let (_, grad) = classical_loss_and_gradient(&model, &fm, &theta, &data).unwrap();
        let eval = |t: &[f64]| {
            let m = ClassicalModel::full(t.to_vec());
            let p: Vec<f64> = data.inputs.iter().map(|x| m.evaluate(x, &fm).unwrap()).collect();
            mse_loss(&p, &data.outputs).unwrap()
        };
        let h = 1e-6;
        for k in 0..theta.len() {
            let mut p = theta.clone();
            let mut q = theta.clone();
            p[k] += h;
            q[k] -= h;
            prop_assert!(((eval(&p) - eval(&q)) / (2.0 * h) - grad[k]).abs() < 1e-5);
        }
    }

    #[test]
    fn random_targets_are_bounded(r in 0.01f64..100.0, seed in any::<u64>()) {
        let t = make_random_fourier_target::<f64>(21, 15, r, seed).unwrap();
        prop_assert!((t.ratio(15) - r).abs() <= 1e-9 * r);
        let d = t.dataset(200, "t").unwrap();
        prop_assert!(d.outputs.iter().all(|y| y.abs() <= 1.0));
    }
}

#[test]
fn runs_are_deterministic() {
    let model = qmodel(2, 1);
    let data = make_step_dataset(30).unwrap();
    let exact = TrainConfig::adam(0.05, 15, 9);
    let sampled = TrainConfig { shots: Some(200), batch: Some(10), ..exact.clone() };
    for cfg in [exact, sampled] {
        let a = train_quantum(&model, &data, Some(&data), &cfg).unwrap();
        let b = train_quantum(&model, &data, Some(&data), &cfg).unwrap();
        assert_eq!(a.loss_trace, b.loss_trace);
        assert_eq!(a.final_params, b.final_params);
        assert_eq!(a.trace_csv().unwrap(), b.trace_csv().unwrap());
        assert_eq!(a.test_loss_trace.len(), 15);
    }
}

#[test]
fn shots_change_the_trajectory_but_not_the_counts() {
    let model = qmodel(2, 1);
    let data = make_step_dataset(12).unwrap();
    let cfg = TrainConfig { shots: Some(100), ..TrainConfig::adam(0.05, 3, 1) };
    let rec = train_quantum(&model, &data, None, &cfg).unwrap();
    let per_step = 12 * (1 + 2 * model.n_params() as u64);
    assert_eq!(rec.resource_counters.shots, 3 * per_step * 100);
    let exact = train_quantum(&model, &data, None, &TrainConfig::adam(0.05, 3, 1)).unwrap();
    assert_ne!(rec.final_params, exact.final_params);
    assert_eq!(exact.resource_counters.shots, 0);
}

#[test]
fn classical_model_fits_targets_in_its_span() {
    let fm = FeatureMap::uniform(1, 4).unwrap();
    let mut rng = seeded(31);
    let c: Vec<f64> = (0..fm.dim()).map(|_| 0.2 * standard_normal::<f64, _>(&mut rng)).collect();
    let target = ClassicalModel::full(c);
    let data = Dataset::from_function(200, "span", |x| target.evaluate(&[x], &fm).unwrap()).unwrap();

    // Normal-equations oracle: the least-squares optimum has zero residual.
    let phi = fm.features_batch(&data.inputs).unwrap();
    let a = DMatrix::from_fn(phi.len(), fm.dim(), |i, j| phi[i][j]);
    let y = DVector::from_vec(data.outputs.clone());
    let sol = (a.transpose() * &a).lu().solve(&(a.transpose() * &y)).unwrap();
    assert!((&a * sol - &y).norm_squared() / 200.0 < 1e-20);

    let rec = train_classical(&ClassicalModel::zeros(fm.dim()), &fm, &data, None, &TrainConfig::adam(0.03, 500, 0)).unwrap();
    assert!(rec.final_loss < 1e-3, "final {}", rec.final_loss);
}

#[test]
fn zero_target_loss_decreases_early() {
    let model = qmodel(3, 1);
    let data = zero_target(40);
    let monotone = (0..10u64)
        .filter(|&s| {
            let rec = train_quantum(&model, &data, None, &TrainConfig::adam(0.03, 11, s)).unwrap();
            rec.loss_trace.windows(2).take(10).all(|w| w[1] < w[0])
        })
        .count();
    assert!(monotone >= 9, "{monotone}/10 monotone");
}

#[test]
fn divergence_keeps_a_partial_trace() {
    let fm = FeatureMap::uniform(1, 3).unwrap();
    let data = make_step_dataset(50).unwrap();
    let cfg = TrainConfig {
        optimizer: OptimizerConfig::GradientDescent { lr: 50.0 },
        ..TrainConfig::adam(0.1, 100, 0)
    };
    let rec = train_classical(&ClassicalModel::full(vec![0.1; fm.dim()]), &fm, &data, None, &cfg).unwrap();
    let TrainStatus::Diverged { step } = rec.status else { panic!("expected divergence") };
    assert!(step < 99);
    assert_eq!(rec.loss_trace.len(), step + 1);
    assert!(*rec.loss_trace.last().unwrap() > 1e6);
}

#[test]
fn nyquist_guard_and_override() {
    let model = qmodel(3, 1);
    let sparse = make_step_dataset(20).unwrap();
    let mut cfg = TrainConfig::adam(0.03, 2, 0);
    cfg.recover_coefficients = true;
    assert!(matches!(train_quantum(&model, &sparse, None, &cfg), Err(Error::Validation(_))));
    cfg.allow_undersampled = true;
    assert!(train_quantum(&model, &sparse, None, &cfg).is_ok());
    cfg.allow_undersampled = false;
    assert!(train_quantum(&model, &make_step_dataset(27).unwrap(), None, &cfg).is_ok());
}

#[test]
fn invalid_configs_are_rejected() {
    let model = qmodel(1, 1);
    let data = make_step_dataset(10).unwrap();
    for cfg in [
        TrainConfig::adam(0.0, 10, 0),
        TrainConfig::adam(0.1, 0, 0),
        TrainConfig { batch: Some(11), ..TrainConfig::adam(0.1, 1, 0) },
        TrainConfig { shots: Some(0), ..TrainConfig::adam(0.1, 1, 0) },
    ] {
        assert!(train_quantum(&model, &data, None, &cfg).is_err(), "{cfg:?}");
    }
    let fm = FeatureMap::uniform(1, 1).unwrap();
    let shots = TrainConfig { shots: Some(10), ..TrainConfig::adam(0.1, 1, 0) };
    assert!(train_classical(&ClassicalModel::zeros(3), &fm, &data, None, &shots).is_err());
}

#[test]
fn nyquist_sized_grid_for_the_fig3_target() {
    let d = TargetSpec::RandomFourier { kappa: 81, split: 64, r: 1.6, seed: 2 }.dataset::<f64>(200).unwrap();
    assert!(d.min_distinct_per_variable() > 2 * 81);
}

#[test]
fn target_specs_parse_from_json() {
    let t: TargetSpec = serde_json::from_str(r#"{"kind":"step"}"#).unwrap();
    assert_eq!(t, TargetSpec::Step);
    let t: TargetSpec =
        serde_json::from_str(r#"{"kind":"random_fourier","kappa":81,"split":64,"r":0.05,"seed":1}"#).unwrap();
    assert!(matches!(t, TargetSpec::RandomFourier { kappa: 81, .. }));
    let extra = r#"{"kind":"random_fourier","kappa":81,"split":64,"r":0.05,"seed":1,"extra":1}"#;
    assert!(serde_json::from_str::<TargetSpec>(extra).is_err());
}

#[test]
fn csv_targets_load_from_disk() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "x,noise,y\n0,1,2\n5,1,4\n10,1,3").unwrap();
    let spec = TargetSpec::Csv {
        path: f.path().to_path_buf(),
        inputs: vec!["x".into()],
        output: "y".into(),
        normalization: Normalization::default(),
    };
    let d = spec.dataset::<f64>(0).unwrap();
    assert_eq!(d.len(), 3);
    assert_eq!(d.inputs[1][0], 0.0);
    let (_, rec) = load_csv_dataset::<f64>(f.path(), &["x".into(), "noise".into()], "y", &Normalization::default()).unwrap();
    assert!(rec.inputs[1].is_degenerate());
    assert_eq!(rec.output.invert(1.0), 4.0);
}

#[test]
fn coulomb_feature_count_for_nine_atoms() {
    let pos: Vec<[f64; 3]> = (0..9).map(|i| [i as f64, 0.5 * i as f64, 0.0]).collect();
    let f = coulomb_features(&pos, &[6, 6, 6, 1, 1, 1, 8, 1, 1]).unwrap();
    assert_eq!(f.len(), 36);
    // Pair (0, 1): 36 / |(1, 0.5, 0)|.
    assert!((f[0] - 36.0 / 1.25f64.sqrt()).abs() < 1e-12);
}
