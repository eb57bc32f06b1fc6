use fourier_qml::cfflm::{pca_projection, ClassicalModel, FeatureMap};
use fourier_qml::qfflm::{AnsatzSpec, QuantumModel};
use fourier_qml::rng::{seeded, standard_normal, uniform_angle};
use fourier_qml::trainer::{make_step_dataset, train_quantum, TrainConfig};
use proptest::prelude::*;
use rand::Rng;

fn points<R: Rng>(n: usize, m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| uniform_angle(rng)).collect()).collect()
}

/// Rows of a random `dim × k` matrix with orthonormal rows (Gram-Schmidt).
fn random_isometry<R: Rng>(dim: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while rows.len() < dim {
        let mut v: Vec<f64> = (0..k).map(|_| standard_normal(rng)).collect();
        for r in &rows {
            let d: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= d * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows
}

/// `mean ‖φ‖² - mean ‖Pφ‖²` for orthonormal rows `P`.
fn residual(phi: &[Vec<f64>], rows: &[Vec<f64>]) -> f64 {
    phi.iter()
        .map(|v| {
            let total: f64 = v.iter().map(|x| x * x).sum();
            let kept: f64 = rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().powi(2)).sum();
            total - kept
        })
        .sum::<f64>()
        / phi.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn feature_norm_is_lattice_size(m in 1usize..=3, d_f in 0usize..=4, seed in any::<u64>()) {
        let fm = FeatureMap::uniform(m, d_f).unwrap();
        let k = fm.dim() as f64;
        prop_assert_eq!(fm.dim(), (2 * d_f + 1).pow(m as u32));
        for x in points(30, m, &mut seeded(seed)) {
            let n2: f64 = fm.features(&x).unwrap().iter().map(|v| v * v).sum();
            prop_assert!((n2 - k).abs() < 1e-9);
        }
    }

    #[test]
    fn pca_beats_random_isometries(
        d_f in 1usize..=15,
        n_points in 8usize..=64,
        frac in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let fm = FeatureMap::uniform(1, d_f).unwrap();
        let k = fm.dim();
        let dim = ((k as f64 * frac) as usize).clamp(1, k - 1);
        let mut rng = seeded(seed);
        let phi = fm.features_batch(&points(n_points, 1, &mut rng)).unwrap();
        let p = pca_projection(&phi, dim).unwrap();
        prop_assert!(p.orthonormality_defect() < 1e-10);
        prop_assert!((p.reconstruction_error - p.tail_sum()).abs() < 1e-8);
        let pca_rows: Vec<Vec<f64>> = (0..dim).map(|r| p.projection.row(r).to_vec()).collect();
        let e_pca = residual(&phi, &pca_rows);
        prop_assert!((e_pca - p.reconstruction_error).abs() < 1e-8);
        for _ in 0..200 {
            let e = residual(&phi, &random_isometry(dim, k, &mut rng));
            prop_assert!(e_pca <= e + 1e-9, "PCA {} vs random {}", e_pca, e);
        }
    }
}

#[test]
fn classical_model_reproduces_a_trained_circuit() {
    let spec = AnsatzSpec::parallel_exponential(1, 3, 2).unwrap();
    let model = QuantumModel::<f64>::from_spec(&spec).unwrap();
    let data = make_step_dataset(60).unwrap();
    let rec = train_quantum(&model, &data, None, &TrainConfig::adam(0.05, 40, 3)).unwrap();
    let coeffs = model.fourier_coefficients(&rec.final_params, None).unwrap();
    let fm = FeatureMap::new(model.degrees()).unwrap();
    let classical = ClassicalModel::full(coeffs.coefficient_vector().unwrap());
    for x in points(200, 1, &mut seeded(77)) {
        let q = model.evaluate(&rec.final_params, &x).unwrap();
        let c = classical.evaluate(&x, &fm).unwrap();
        assert!((q - c).abs() < 1e-9, "x={x:?}: {q} vs {c}");
    }
}

#[test]
fn model_document_round_trip() {
    let fm = FeatureMap::uniform(2, 1).unwrap();
    let mut rng = seeded(5);
    let c: Vec<f64> = (0..fm.dim()).map(|_| standard_normal(&mut rng)).collect();
    let model = ClassicalModel::full(c);
    let (back, fm2) = ClassicalModel::<f64>::from_json(&model.to_json(&fm).unwrap()).unwrap();
    assert_eq!(back, model);
    assert_eq!(fm2, fm);
}
