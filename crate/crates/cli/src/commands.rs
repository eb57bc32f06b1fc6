use std::fmt::Write as _;
use std::path::Path;

use fourier_qml::analysis::{
    advantage_criterion, bicone_agreement, crossing_epsilon, fit_decay, plateau_stats, resource_report,
    resrc_classical_full, resrc_quantum, DecayFit, PlateauConfig, PlateauReport, ResourceReport,
};
use fourier_qml::cfflm::{ClassicalModel, FeatureMap};
use fourier_qml::qfflm::{AnsatzSpec, QuantumModel};
use fourier_qml::spectra::{is_dense, is_maximally_nondegenerate, spectrum, EncodingSpec};
use fourier_qml::trainer::{
    fmt, run_compare, train_classical, train_quantum, CompareConfig, ResultRecord, TargetSpec, TrainConfig,
};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{self, Config};
use crate::error::CliError;
use crate::output::{json, OutputDir};

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub weights: Vec<u64>,
    pub support: Vec<i64>,
    pub multiplicity: Vec<u64>,
    #[serde(rename = "d_F")]
    pub d_f: u64,
    pub dense: bool,
    pub nondegenerate: bool,
}

pub fn spectrum_report(enc: &EncodingSpec) -> Result<SpectrumReport, CliError> {
    let s = spectrum(enc)?;
    Ok(SpectrumReport {
        weights: enc.weights().to_vec(),
        support: s.support().to_vec(),
        multiplicity: s.multiplicity().to_vec(),
        d_f: s.d_f(),
        dense: is_dense(enc),
        nondegenerate: is_maximally_nondegenerate(enc),
    })
}

/// Weights from `--weights` or `--exp`, exactly one of which is set.
pub fn encoding_from_flags(weights: Option<&str>, exp: Option<usize>) -> Result<EncodingSpec, CliError> {
    match (weights, exp) {
        (Some(w), None) => {
            let parsed = w
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("weight {t:?} is not a positive integer"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(EncodingSpec::new(parsed)?)
        }
        (None, Some(n)) => Ok(EncodingSpec::exponential(n)?),
        _ => Err(CliError::Usage("give exactly one of --weights or --exp".into())),
    }
}

pub fn cmd_spectrum_flags(weights: Option<&str>, exp: Option<usize>, output: Option<&Path>) -> Result<(), CliError> {
    let report = spectrum_report(&encoding_from_flags(weights, exp)?)?;
    let text = json(&report)? + "\n";
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumBody {
    #[serde(default)]
    weights: Option<Vec<u64>>,
    #[serde(default)]
    exponential: Option<usize>,
}

pub fn cmd_spectrum_config(cfg: &Config) -> Result<(), CliError> {
    let body: SpectrumBody = cfg.body()?;
    let enc = match (body.weights, body.exponential) {
        (Some(w), None) => EncodingSpec::new(w)?,
        (None, Some(n)) => EncodingSpec::exponential(n)?,
        _ => return Err(CliError::Usage("give exactly one of `weights` or `exponential`".into())),
    };
    let report = spectrum_report(&enc)?;
    let out = OutputDir::create(cfg, "spectrum")?;
    out.write_json("spectrum.json", &report)?;
    out.finish(&[])
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum ModelSpec {
    Quantum {
        ansatz: AnsatzSpec,
    },
    Classical {
        degrees: Vec<usize>,
        /// Leading features kept; all when absent.
        #[serde(default)]
        dim: Option<usize>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainBody {
    model: ModelSpec,
    target: TargetSpec,
    /// Grid size for synthetic targets; CSV targets use every row.
    #[serde(default)]
    points: Option<usize>,
    /// Grid size of an optional held-out set.
    #[serde(default)]
    test_points: Option<usize>,
    training: Value,
}

fn resolve_target(cfg: &Config, target: TargetSpec) -> TargetSpec {
    match target {
        TargetSpec::Csv { path, inputs, output, normalization } => {
            TargetSpec::Csv { path: cfg.resolve(&path), inputs, output, normalization }
        }
        t => t,
    }
}

pub fn cmd_train(cfg: &Config) -> Result<(), CliError> {
    let body: TrainBody = cfg.body()?;
    let tc: TrainConfig = config::with_seed(body.training, cfg.header.seed, "training")?;
    tc.validate()?;
    let target = resolve_target(cfg, body.target);
    let is_csv = matches!(target, TargetSpec::Csv { .. });
    let points = match (body.points, is_csv) {
        (Some(n), _) => n,
        (None, true) => 0,
        (None, false) => return Err(CliError::Usage("missing field `points` for a synthetic target".into())),
    };
    let data = target.dataset::<f64>(points)?;
    let test = body.test_points.map(|n| target.dataset::<f64>(n)).transpose()?;
    let record = match body.model {
        ModelSpec::Quantum { ansatz } => {
            let model = QuantumModel::<f64>::from_spec(&ansatz)?;
            train_quantum(&model, &data, test.as_ref(), &tc)?
        }
        ModelSpec::Classical { degrees, dim } => {
            let mut fm = FeatureMap::new(degrees)?;
            if let Some(d) = dim {
                fm = fm.truncated(d)?;
            }
            let model = ClassicalModel::<f64>::zeros(fm.dim());
            train_classical(&model, &fm, &data, test.as_ref(), &tc)?
        }
    };
    let out = OutputDir::create(cfg, "train")?;
    out.write_json("result.json", &record)?;
    out.write("trace.csv", &record.trace_csv()?)?;
    out.finish(&[("train".into(), record.wall_ms)])?;
    divergence(&[&record])
}

fn divergence(records: &[&ResultRecord<f64>]) -> Result<(), CliError> {
    let bad: Vec<String> = records
        .iter()
        .filter(|r| r.diverged())
        .map(|r| format!("{} on {}: {:?}", r.model, r.dataset, r.status))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diverged(bad.join("; ")))
    }
}

pub fn cmd_compare(cfg: &Config) -> Result<(), CliError> {
    let cc: CompareConfig = cfg.body_with_seed()?;
    cc.validate()?;
    let (runs, summary) = run_compare::<f64>(&cc)?;
    let out = OutputDir::create(cfg, "compare")?;
    let mut combined = String::from("r,model,run,step,loss\n");
    let mut times = Vec::new();
    for run in &runs {
        for (name, rec) in [("classical", &run.classical), ("quantum", &run.quantum)] {
            let file = format!("traces/r{}_{name}_run{}.csv", run.r, run.run);
            out.write(&file, &rec.trace_csv()?)?;
            for (step, l) in rec.loss_trace.iter().enumerate() {
                writeln!(combined, "{},{name},{},{step},{}", run.r, run.run, fmt(*l)).expect("string write");
            }
            times.push((file, rec.wall_ms));
        }
    }
    out.write("compare.csv", &combined)?;
    out.write_json("summary.json", &summary)?;
    out.finish(&times)?;
    let records: Vec<&ResultRecord<f64>> = runs.iter().flat_map(|r| [&r.classical, &r.quantum]).collect();
    divergence(&records)
}

#[derive(Serialize)]
struct PlateauOutput {
    reports: Vec<PlateauReport>,
    /// Log-linear fit of `⟨f²⟩` against the qubit count; present for sweeps.
    decay_fit: Option<DecayFit>,
}

pub fn cmd_plateau(cfg: &Config) -> Result<(), CliError> {
    let mut body = Value::Object(cfg.body.clone());
    let sweep: Option<Vec<usize>> = match body.as_object_mut().and_then(|m| m.remove("qubit_sweep")) {
        Some(v) => Some(config::decode(v, "qubit_sweep")?),
        None => None,
    };
    let base: PlateauConfig = config::with_seed(body, cfg.header.seed, "config")?;
    let qubits = sweep.unwrap_or_else(|| vec![base.qubits]);
    if qubits.is_empty() {
        return Err(CliError::Usage("qubit_sweep must not be empty".into()));
    }
    let mut reports = Vec::new();
    for &n in &qubits {
        let pc = PlateauConfig { qubits: n, ..base.clone() };
        reports.push(plateau_stats::<f64>(&pc)?);
    }
    let mut csv = String::from("d,trials,mean_f,se_mean_f,var_f,predicted,zscore\n");
    for r in &reports {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.d,
            r.trials,
            fmt(r.f.mean),
            fmt(r.f.se),
            fmt(r.f.var),
            fmt(r.predicted_f_sq),
            fmt(r.zscore_f_sq)
        )
        .expect("string write");
    }
    let decay_fit = if reports.len() >= 2 {
        let pts: Vec<(usize, f64)> =
            reports.iter().map(|r| (r.variables * r.qubits, r.f_sq.mean)).collect();
        fit_decay(&pts).ok()
    } else {
        None
    };
    let out = OutputDir::create(cfg, "plateau")?;
    out.write("plateau.csv", &csv)?;
    out.write_json("report.json", &PlateauOutput { reports, decay_fit })?;
    out.finish(&[])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResourcesBody {
    /// Per-variable feature count `K`.
    k: u64,
    /// Number of input variables `M`.
    m: u32,
    epsilon: f64,
    /// Gate counts to tabulate.
    n_gt: Vec<u64>,
    #[serde(default)]
    n_tp: u64,
    /// Optional ansatz whose own counts are reported alongside the table.
    #[serde(default)]
    ansatz: Option<AnsatzSpec>,
}

#[derive(Serialize)]
struct ResourcesOutput {
    k: u64,
    m: u32,
    epsilon: f64,
    features: String,
    resrc_c: String,
    /// Gate count at which `N_gt = ε K^{M/2}`.
    crossing_n_gt: f64,
    ansatz: Option<ResourceReport>,
}

pub fn cmd_resources(cfg: &Config) -> Result<(), CliError> {
    let body: ResourcesBody = cfg.body()?;
    if body.n_gt.is_empty() {
        return Err(CliError::Usage("n_gt must list at least one gate count".into()));
    }
    let features = BigUint::from(body.k).pow(body.m);
    let resrc_c = resrc_classical_full(body.k, body.m);
    let mut csv = String::from("n_gt,n_tp,epsilon,resrc_q,resrc_c,advantage,log_margin,crossing_epsilon\n");
    for &n_gt in &body.n_gt {
        let q = resrc_quantum(n_gt, body.n_tp, body.epsilon, body.epsilon)?;
        let a = advantage_criterion(n_gt, body.epsilon, body.k, body.m)?;
        writeln!(
            csv,
            "{n_gt},{},{},{q},{resrc_c},{},{},{}",
            body.n_tp,
            fmt(body.epsilon),
            a.holds,
            fmt(a.log_margin),
            fmt(crossing_epsilon(n_gt, &features))
        )
        .expect("string write");
    }
    let ansatz = body.ansatz.as_ref().map(|s| resource_report(s, body.epsilon)).transpose()?;
    let log_features = fourier_qml::analysis::log_big(&features);
    let report = ResourcesOutput {
        k: body.k,
        m: body.m,
        epsilon: body.epsilon,
        features: features.to_string(),
        resrc_c: resrc_c.to_string(),
        crossing_n_gt: (body.epsilon.ln() + 0.5 * log_features).exp(),
        ansatz,
    };
    let out = OutputDir::create(cfg, "resources")?;
    out.write("resources.csv", &csv)?;
    out.write_json("resources.json", &report)?;
    out.finish(&[])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BiconeBody {
    samples: usize,
    /// Grid points for the numerical sup test.
    grid: usize,
    /// Width of the boundary band `|height - 1| < band`.
    band: f64,
}

pub fn cmd_bicone(cfg: &Config) -> Result<(), CliError> {
    let body: BiconeBody = cfg.body()?;
    if !(body.band >= 0.0) {
        return Err(CliError::Usage("band must be non-negative".into()));
    }
    let summary = bicone_agreement(body.samples, body.grid, body.band, cfg.header.seed)?;
    let out = OutputDir::create(cfg, "bicone")?;
    out.write_json("summary.json", &summary)?;
    out.finish(&[])
}
