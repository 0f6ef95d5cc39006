//! Monte Carlo harness: Gaussian snapshots from the spiked model, paired
//! trials over several estimators, and misdetection sweeps.
//!
//! Every trial owns an independent random stream derived from
//! `(base_seed, trial_index)`, so results do not depend on the order in
//! which trials run and the sweep may execute them in parallel.

mod scenario;

pub use scenario::{preset, preset_names, Scale, ScenarioSpec, SweepAxis, SweepPoint};

use std::fmt::Write as _;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::estimators::{estimate, EstimatorConfig, Method};
use crate::normal::normal_quantile_unchecked;
use crate::spectral::{PopulationModel, SnapshotMatrix, Spectrum};

/// Random stream of one trial.
pub fn trial_rng(base_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(trial_index);
    rng
}

/// Standard normal variate by inversion of the normal CDF.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits, offset by half a step so the result is never 0 or 1
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    normal_quantile_unchecked(u)
}

/// `n` zero-mean Gaussian snapshots with covariance
/// `diag(lambda_1 + s2, ..., lambda_q + s2, s2, ..., s2)`, drawn column by
/// column from the stream of `(base_seed, trial_index)`.
pub fn generate_snapshots(model: &PopulationModel, n: usize, base_seed: u64, trial_index: u64) -> Result<SnapshotMatrix> {
    let p = model.p();
    let scale: Vec<f64> = model.population_eigenvalues().iter().map(|v| v.sqrt()).collect();
    let mut rng = trial_rng(base_seed, trial_index);
    let mut data = vec![0.0; p * n];
    for t in 0..n {
        for (i, s) in scale.iter().enumerate() {
            data[i * n + t] = s * standard_normal(&mut rng);
        }
    }
    SnapshotMatrix::new(p, n, data)
}

/// Per-method estimates of one trial, in the order of the requested methods.
pub type TrialOutcome = Vec<Result<usize>>;

/// Runs every method on the same spectrum. Estimator errors are kept per
/// method rather than aborting the trial.
pub fn run_trial_on_spectrum(spectrum: &Spectrum, methods: &[Method], config: &EstimatorConfig) -> TrialOutcome {
    methods
        .iter()
        .map(|&m| estimate(m, spectrum, config).map(|e| e.q_hat))
        .collect()
}

/// Draws one snapshot set at `point` and runs the scenario's methods on it.
pub fn run_trial(spec: &ScenarioSpec, point: SweepPoint, trial_index: u64) -> Result<TrialOutcome> {
    let model = PopulationModel::new(spec.signal_strengths.clone(), spec.sigma2, point.p)?;
    let x = generate_snapshots(&model, point.n, spec.base_seed, trial_index)?;
    let spectrum = Spectrum::from_snapshots(&x)?;
    Ok(run_trial_on_spectrum(&spectrum, &spec.methods, &spec.config))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    /// `p` for ratio sweeps, `n` for fixed-dimension sweeps.
    pub sweep_value: usize,
    pub p: usize,
    pub n: usize,
    pub method: Method,
    pub trials: usize,
    pub count_under: usize,
    pub count_over: usize,
    /// Trials where the estimator returned an error; counted as neither.
    pub count_failed: usize,
}

impl SweepRow {
    pub fn p_under(&self) -> f64 {
        self.count_under as f64 / self.trials as f64
    }

    pub fn p_over(&self) -> f64 {
        self.count_over as f64 / self.trials as f64
    }

    pub fn p_e(&self) -> f64 {
        (self.count_under + self.count_over) as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepResult {
    /// Sorted by sweep value, then method.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "sweep_value,method,trials,count_under,count_over,p_under,p_over,p_e";

    pub fn row(&self, sweep_value: usize, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6}",
                r.sweep_value,
                r.method,
                r.trials,
                r.count_under,
                r.count_over,
                r.p_under(),
                r.p_over(),
                r.p_e()
            );
        }
        out
    }

    /// Fixed-width table for terminal output.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{:>6} {:>5} {:>5} {:>6} {:>8} {:>8} {:>8}\n",
            "value", "p", "n", "method", "P_under", "P_over", "P_e"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>6} {:>5} {:>5} {:>6} {:>8.4} {:>8.4} {:>8.4}{}",
                r.sweep_value,
                r.p,
                r.n,
                r.method.name(),
                r.p_under(),
                r.p_over(),
                r.p_e(),
                if r.count_failed > 0 {
                    format!("  ({} failed)", r.count_failed)
                } else {
                    String::new()
                }
            );
        }
        out
    }
}

/// Runs `spec.trials` paired trials at every sweep point.
pub fn run_sweep(spec: &ScenarioSpec) -> Result<SweepResult> {
    spec.validate()?;
    let q = spec.signal_strengths.len();
    let mut rows = Vec::new();
    for point in spec.points() {
        let outcomes: Vec<TrialOutcome> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(spec, point, t))
            .collect::<Result<_>>()?;
        for (m_idx, &method) in spec.methods.iter().enumerate() {
            let mut row = SweepRow {
                sweep_value: point.sweep_value,
                p: point.p,
                n: point.n,
                method,
                trials: spec.trials,
                count_under: 0,
                count_over: 0,
                count_failed: 0,
            };
            for outcome in &outcomes {
                match outcome[m_idx] {
                    Ok(q_hat) if q_hat < q => row.count_under += 1,
                    Ok(q_hat) if q_hat > q => row.count_over += 1,
                    Ok(_) => {}
                    Err(_) => row.count_failed += 1,
                }
            }
            rows.push(row);
        }
    }
    rows.sort_by_key(|r| (r.sweep_value, r.method));
    Ok(SweepResult { rows })
}
