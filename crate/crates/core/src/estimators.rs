//! Signal-count estimators: the information criteria (AIC, MDL, modified
//! AIC), the Tracy-Widom sequential test (RMT), the interaction-corrected
//! signal-search test, and the signal-noise search estimator that picks
//! between the last two at every step.
//!
//! The sequential estimators probe `k = 1, 2, ..., min(p, n) - 1`, accept
//! `l_k` as a signal while their test passes, and stop at the first failure
//! with `q_hat = k - 1`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::noise::{estimate_noise_and_spikes, NoiseFit, SolverOptions};
use crate::probabilities::{pe_rmt, pe_srmt, theta_rmt, theta_srmt, ThresholdContext};
use crate::spectral::Spectrum;
use crate::statistics::{decision_statistic, signal_threshold, SignalStat};
use crate::tracy_widom::{centering_mu, scaling_sigma, tw_quantile, Beta};

/// Floor on `ln(g/a)` when trailing eigenvalues are exactly zero.
const LOG_RATIO_FLOOR: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Aic,
    Mdl,
    ModifiedAic,
    Rmt,
    SignalSearch,
    Sns,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Aic,
        Method::Mdl,
        Method::ModifiedAic,
        Method::Rmt,
        Method::SignalSearch,
        Method::Sns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Aic => "aic",
            Method::Mdl => "mdl",
            Method::ModifiedAic => "maic",
            Method::Rmt => "rmt",
            Method::SignalSearch => "srmt",
            Method::Sns => "sns",
        }
    }

    /// Parses a comma-separated method list; `all` expands to every method.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(Method::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(invalid("empty method list"));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .or(match key.as_str() {
                "modified_aic" | "modified-aic" => Some(Method::ModifiedAic),
                "signal_search" | "signal-search" | "e-rmt" => Some(Method::SignalSearch),
                _ => None,
            })
            .ok_or_else(|| invalid(format!("unknown method `{s}` (expected aic, mdl, maic, rmt, srmt, sns or all)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// False-alarm level of the Tracy-Widom test.
    pub alpha: f64,
    /// Detection probability targeted by the signal-search test.
    pub alpha0: f64,
    pub beta: Beta,
    pub solver: SolverOptions,
    /// Penalty multiplier of the modified AIC.
    pub modified_aic_c: f64,
    /// Count free parameters for real data, `k(2p - k + 1)/2`, instead of
    /// the complex-data `k(2p - k)` in the information criteria.
    pub real_dof: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.005,
            alpha0: 0.995,
            beta: Beta::Real,
            solver: SolverOptions::default(),
            modified_aic_c: 2.0,
            real_dof: false,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.alpha0 > 0.5 && self.alpha0 < 1.0) {
            return Err(invalid(format!("alpha0 must lie in (0.5, 1), got {}", self.alpha0)));
        }
        if !(self.modified_aic_c > 0.0) {
            return Err(invalid("modified AIC constant must be positive"));
        }
        Ok(())
    }
}

/// Which test decided step `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Tracy-Widom noise threshold on `l_k`.
    Rmt,
    /// Interaction-corrected statistic against the detection-limit threshold.
    Srmt,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Rmt => "rmt",
            Criterion::Srmt => "srmt",
        }
    }
}

/// The four step scores: signal-search and RMT, each with and without the
/// interaction term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScores {
    pub srmt: f64,
    pub rmt_v: f64,
    pub rmt: f64,
    pub srmt_v: f64,
}

impl StepScores {
    fn evaluate(ctx: &ThresholdContext<'_>, assume_signal: bool) -> Self {
        Self {
            srmt: pe_srmt(ctx, false, assume_signal).p_total,
            rmt_v: pe_rmt(ctx, true, assume_signal).p_total,
            rmt: pe_rmt(ctx, false, assume_signal).p_total,
            srmt_v: pe_srmt(ctx, true, assume_signal).p_total,
        }
    }

    fn is_finite(&self) -> bool {
        [self.srmt, self.rmt_v, self.rmt, self.srmt_v].iter().all(|x| x.is_finite())
    }
}

/// One step of a sequential scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub l_k: f64,
    pub fit: NoiseFit,
    /// Noise level under `k - 1` signals (adaptive estimator only).
    pub sigma2_prev: Option<f64>,
    pub stat: Option<SignalStat>,
    pub theta_rmt: f64,
    pub theta_rmt_noise: Option<f64>,
    pub theta_srmt: Option<f64>,
    /// Acceptance threshold for `z'_k`.
    pub srmt_threshold: Option<f64>,
    /// Scores assuming `l_k` is a signal.
    pub step1: Option<StepScores>,
    /// Scores with the RMT threshold taken under the noise assumption.
    pub step2: Option<StepScores>,
    pub criterion: Criterion,
    pub accepted: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionTrace {
    pub rows: Vec<TraceRow>,
}

impl DecisionTrace {
    pub const CSV_HEADER: &'static str = "k,l_k,sigma2_hat,sigma2_hat_prev,lambda_hat,converged,iterations,\
degenerate_roots,v,kappa,delta,delta_valid,z,theta_rmt,theta_rmt_noise,theta_srmt,srmt_threshold,\
pe_srmt,pe_rmt_v,pe_rmt,pe_srmt_v,pe_rmt_v_bar,pe_rmt_bar,pe_srmt_v_bar,pe_srmt_bar,criterion,accepted";

    /// One row per probed `k`. Missing quantities are empty cells;
    /// `lambda_hat` is `;`-separated.
    pub fn to_csv(&self) -> String {
        fn opt<T: fmt::Display>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let lambda: Vec<String> = r.fit.lambda_hat.iter().map(f64::to_string).collect();
            let degenerate = r.fit.degenerate_roots.iter().filter(|d| **d).count();
            let scores = |s: Option<StepScores>| -> [String; 4] {
                [
                    opt(s.map(|s| s.srmt)),
                    opt(s.map(|s| s.rmt_v)),
                    opt(s.map(|s| s.rmt)),
                    opt(s.map(|s| s.srmt_v)),
                ]
            };
            let [s1a, s1b, s1c, s1d] = scores(r.step1);
            let [s2a, s2b, s2c, s2d] = scores(r.step2);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.k,
                r.l_k,
                r.fit.sigma2_hat,
                opt(r.sigma2_prev),
                lambda.join(";"),
                r.fit.converged,
                r.fit.iterations,
                degenerate,
                opt(r.stat.map(|s| s.v)),
                opt(r.stat.map(|s| s.kappa)),
                opt(r.stat.map(|s| s.delta)),
                opt(r.stat.map(|s| s.delta_valid)),
                opt(r.stat.map(|s| s.z)),
                r.theta_rmt,
                opt(r.theta_rmt_noise),
                opt(r.theta_srmt),
                opt(r.srmt_threshold),
                s1a,
                s1b,
                s1c,
                s1d,
                // barred scores, in the same order as step 1
                s2b,
                s2c,
                s2d,
                s2a,
                r.criterion.name(),
                r.accepted,
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOrderEstimate {
    pub q_hat: usize,
    pub method: Method,
    /// Sequential scan record; empty for the information criteria.
    pub trace: DecisionTrace,
    /// Criterion value per `k = 0..=min(p, n) - 1`; empty for the sequential tests.
    pub criterion_values: Vec<f64>,
    /// A zero eigenvalue hit the log floor, or a step used a clamped or
    /// undefined quantity.
    pub degenerate: bool,
}

/// Runs `method` on `spectrum`.
pub fn estimate(method: Method, spectrum: &Spectrum, config: &EstimatorConfig) -> Result<ModelOrderEstimate> {
    config.validate()?;
    match method {
        Method::Aic => Ok(information_criterion(spectrum, Method::Aic, 1.0, config.real_dof)),
        Method::Mdl => Ok(information_criterion(spectrum, Method::Mdl, 1.0, config.real_dof)),
        Method::ModifiedAic => Ok(information_criterion(
            spectrum,
            Method::ModifiedAic,
            config.modified_aic_c,
            config.real_dof,
        )),
        Method::Rmt => estimate_rmt(spectrum, config),
        Method::SignalSearch => estimate_signal_search(spectrum, config),
        Method::Sns => estimate_sns(spectrum, config),
    }
}

pub fn estimate_aic(spectrum: &Spectrum) -> ModelOrderEstimate {
    information_criterion(spectrum, Method::Aic, 1.0, false)
}

pub fn estimate_mdl(spectrum: &Spectrum) -> ModelOrderEstimate {
    information_criterion(spectrum, Method::Mdl, 1.0, false)
}

/// AIC with the penalty multiplied by `c`.
pub fn estimate_modified_aic(spectrum: &Spectrum, c: f64) -> ModelOrderEstimate {
    information_criterion(spectrum, Method::ModifiedAic, c, false)
}

/// `-n (p - k) ln(g_k / a_k)`, with `g_k`, `a_k` the geometric and arithmetic
/// means of the `p - k` smallest eigenvalues. The flag reports a log floor hit.
pub fn log_likelihood_term(spectrum: &Spectrum, k: usize) -> (f64, bool) {
    let tail = &spectrum.eigenvalues()[k..];
    let m = tail.len() as f64;
    let mean = tail.iter().sum::<f64>() / m;
    let mean_log = tail.iter().map(|l| l.ln()).sum::<f64>() / m;
    let mut ratio = mean_log - mean.ln();
    let mut floored = false;
    if !(ratio >= LOG_RATIO_FLOOR) {
        ratio = LOG_RATIO_FLOOR;
        floored = true;
    }
    (-(spectrum.n() as f64) * m * ratio, floored)
}

fn free_parameters(p: usize, k: usize, real_dof: bool) -> f64 {
    let (p, k) = (p as f64, k as f64);
    if real_dof {
        k * (2.0 * p - k + 1.0) / 2.0
    } else {
        k * (2.0 * p - k)
    }
}

fn information_criterion(spectrum: &Spectrum, method: Method, c: f64, real_dof: bool) -> ModelOrderEstimate {
    let p = spectrum.p();
    let ln_n = (spectrum.n() as f64).ln();
    let mut degenerate = false;
    let values: Vec<f64> = (0..=spectrum.max_order())
        .map(|k| {
            let (data, floored) = log_likelihood_term(spectrum, k);
            degenerate |= floored;
            let dof = free_parameters(p, k, real_dof);
            match method {
                Method::Mdl => data + 0.5 * dof * ln_n,
                _ => 2.0 * data + 2.0 * c * dof,
            }
        })
        .collect();
    let q_hat = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) })
        .0;
    ModelOrderEstimate {
        q_hat,
        method,
        trace: DecisionTrace::default(),
        criterion_values: values,
        degenerate,
    }
}

/// `s2 (mu_{n,p-k} + s(alpha) sigma_{n,p-k})`.
fn rmt_threshold(spectrum: &Spectrum, k: usize, sigma2: f64, s_alpha: f64) -> f64 {
    let (n, dims) = (spectrum.n(), spectrum.p() - k);
    sigma2 * (centering_mu(n, dims) + s_alpha * scaling_sigma(n, dims))
}

fn finish(method: Method, rows: Vec<TraceRow>, max_order: usize, degenerate: bool) -> ModelOrderEstimate {
    let q_hat = match rows.last() {
        Some(r) if !r.accepted => r.k - 1,
        _ => max_order,
    };
    ModelOrderEstimate {
        q_hat,
        method,
        trace: DecisionTrace { rows },
        criterion_values: Vec::new(),
        degenerate,
    }
}

fn base_row(k: usize, spectrum: &Spectrum, fit: NoiseFit, theta: f64) -> TraceRow {
    TraceRow {
        k,
        l_k: spectrum.l(k),
        fit,
        sigma2_prev: None,
        stat: None,
        theta_rmt: theta,
        theta_rmt_noise: None,
        theta_srmt: None,
        srmt_threshold: None,
        step1: None,
        step2: None,
        criterion: Criterion::Rmt,
        accepted: false,
    }
}

/// Sequential Tracy-Widom test: `l_k` is a signal while
/// `l_k > s2(k) (mu_{n,p-k} + s(alpha) sigma_{n,p-k})`.
pub fn estimate_rmt(spectrum: &Spectrum, config: &EstimatorConfig) -> Result<ModelOrderEstimate> {
    config.validate()?;
    let s_alpha = tw_quantile(config.alpha, config.beta)?;
    let mut rows = Vec::new();
    let mut degenerate = false;
    for k in 1..=spectrum.max_order() {
        let fit = estimate_noise_and_spikes(spectrum, k, config.solver)?;
        degenerate |= !fit.converged;
        let theta = rmt_threshold(spectrum, k, fit.sigma2_hat, s_alpha);
        let mut row = base_row(k, spectrum, fit, theta);
        row.accepted = row.l_k > theta;
        let stop = !row.accepted;
        rows.push(row);
        if stop {
            break;
        }
    }
    Ok(finish(Method::Rmt, rows, spectrum.max_order(), degenerate))
}

/// Outcome of the signal-search test at one step.
struct SrmtOutcome {
    stat: Option<SignalStat>,
    threshold: Option<f64>,
    accepted: bool,
    degenerate: bool,
}

fn srmt_test(spectrum: &Spectrum, fit: &NoiseFit, config: &EstimatorConfig) -> Result<SrmtOutcome> {
    match decision_statistic(fit.k, spectrum, fit, config.beta) {
        Ok(stat) => {
            let threshold = signal_threshold(fit.sigma2_hat, stat.delta, spectrum.gamma(), config.alpha0)?;
            Ok(SrmtOutcome {
                stat: Some(stat),
                threshold: Some(threshold),
                accepted: stat.z > threshold,
                degenerate: !stat.delta_valid || fit.degenerate_roots[fit.k - 1],
            })
        }
        // lambda_hat_k <= 0: no spike to speak of
        Err(Error::Domain(_)) => Ok(SrmtOutcome {
            stat: None,
            threshold: None,
            accepted: false,
            degenerate: true,
        }),
        Err(e) => Err(e),
    }
}

/// Sequential signal-search test: `l_k` is a signal while
/// `z'_k > s2(k) sqrt(gamma) - delta'_k Q^{-1}(alpha0)`.
pub fn estimate_signal_search(spectrum: &Spectrum, config: &EstimatorConfig) -> Result<ModelOrderEstimate> {
    config.validate()?;
    let s_alpha = tw_quantile(config.alpha, config.beta)?;
    let mut rows = Vec::new();
    let mut degenerate = false;
    for k in 1..=spectrum.max_order() {
        let fit = estimate_noise_and_spikes(spectrum, k, config.solver)?;
        let theta = rmt_threshold(spectrum, k, fit.sigma2_hat, s_alpha);
        let outcome = srmt_test(spectrum, &fit, config)?;
        degenerate |= outcome.degenerate || !fit.converged;
        let mut row = base_row(k, spectrum, fit, theta);
        row.stat = outcome.stat;
        row.srmt_threshold = outcome.threshold;
        row.criterion = Criterion::Srmt;
        row.accepted = outcome.accepted;
        rows.push(row);
        if !outcome.accepted {
            break;
        }
    }
    Ok(finish(Method::SignalSearch, rows, spectrum.max_order(), degenerate))
}

/// Adaptive estimator: at every step the closed-form miss/over-detection
/// scores decide whether the TW test or the signal-search test judges `l_k`.
///
/// Step 1 (thresholds under the signal assumption) falls back to the TW
/// test when the plain signal-search score exceeds the interaction-aware TW
/// score, or the plain TW score exceeds the interaction-aware signal-search
/// score. Otherwise step 2 recomputes the TW threshold under the noise
/// assumption and selects the signal-search test when, for `gamma < 1`, the
/// interaction-aware TW score exceeds the plain signal-search score, or,
/// for `gamma >= 1`, the interaction-aware signal-search score exceeds the
/// plain TW score.
pub fn estimate_sns(spectrum: &Spectrum, config: &EstimatorConfig) -> Result<ModelOrderEstimate> {
    config.validate()?;
    let s_alpha = tw_quantile(config.alpha, config.beta)?;
    let gamma = spectrum.gamma();
    let mut rows = Vec::new();
    let mut degenerate = false;
    let mut prev = estimate_noise_and_spikes(spectrum, 0, config.solver)?;
    for k in 1..=spectrum.max_order() {
        let fit = estimate_noise_and_spikes(spectrum, k, config.solver)?;
        degenerate |= !fit.converged;
        let theta = rmt_threshold(spectrum, k, fit.sigma2_hat, s_alpha);
        let mut row = base_row(k, spectrum, fit.clone(), theta);
        row.sigma2_prev = Some(prev.sigma2_hat);

        match ThresholdContext::new(spectrum, &fit, &prev, config.alpha, config.alpha0, config.beta) {
            Ok(ctx) => {
                row.stat = Some(ctx.stat);
                row.theta_rmt_noise = Some(theta_rmt(&ctx, false));
                row.theta_srmt = Some(theta_srmt(&ctx));
                row.srmt_threshold = Some(signal_threshold(fit.sigma2_hat, ctx.stat.delta, gamma, config.alpha0)?);
                let s1 = StepScores::evaluate(&ctx, true);
                let s2 = StepScores::evaluate(&ctx, false);
                row.step1 = Some(s1);
                row.step2 = Some(s2);
                if !ctx.stat.delta_valid {
                    degenerate = true;
                }
                row.criterion = if !s1.is_finite() || !s2.is_finite() {
                    degenerate = true;
                    Criterion::Rmt
                } else if s1.srmt > s1.rmt_v || s1.rmt > s1.srmt_v {
                    Criterion::Rmt
                } else if gamma < 1.0 {
                    if s2.rmt_v > s2.srmt {
                        Criterion::Srmt
                    } else {
                        Criterion::Rmt
                    }
                } else if s2.srmt_v > s2.rmt {
                    Criterion::Srmt
                } else {
                    Criterion::Rmt
                };
            }
            Err(Error::Domain(_)) => {
                // signal-search scores undefined (lambda_hat_k <= 0)
                degenerate = true;
                row.criterion = Criterion::Rmt;
            }
            Err(e) => return Err(e),
        }

        row.accepted = match row.criterion {
            Criterion::Rmt => row.l_k > theta,
            Criterion::Srmt => {
                let (stat, thr) = (row.stat.expect("set above"), row.srmt_threshold.expect("set above"));
                stat.z > thr
            }
        };
        let stop = !row.accepted;
        rows.push(row);
        if stop {
            break;
        }
        prev = fit;
    }
    Ok(finish(Method::Sns, rows, spectrum.max_order(), degenerate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(p: usize, n: usize) -> Spectrum {
        Spectrum::new(vec![1.0; p], n).unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!(Method::parse_list("all").unwrap(), Method::ALL.to_vec());
        assert_eq!(Method::parse_list("sns, rmt").unwrap(), vec![Method::Rmt, Method::Sns]);
        assert!(Method::parse_list("bic").is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = EstimatorConfig::default();
        assert!(c.validate().is_ok());
        c.alpha0 = 0.4;
        assert!(c.validate().is_err());
        c.alpha0 = 0.995;
        c.alpha = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn flat_spectrum_gives_zero_everywhere() {
        let s = flat(100, 200);
        let cfg = EstimatorConfig::default();
        for m in Method::ALL {
            assert_eq!(estimate(m, &s, &cfg).unwrap().q_hat, 0, "{m}");
        }
    }

    #[test]
    fn trace_has_a_single_terminal_row() {
        let s = flat(20, 40);
        let est = estimate_sns(&s, &EstimatorConfig::default()).unwrap();
        assert_eq!(est.trace.rows.len(), 1);
        assert!(!est.trace.rows[0].accepted);
        let csv = est.trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        let cols = DecisionTrace::CSV_HEADER.split(',').count();
        assert_eq!(lines[1].split(',').count(), cols);
    }

    #[test]
    fn rejection_when_spike_estimate_is_negative() {
        // l_2 sits well inside the bulk, so lambda_hat_2 can be negative
        let mut v = vec![30.0, 1.0];
        v.extend(std::iter::repeat_n(1.0, 18));
        let s = Spectrum::new(v, 10).unwrap();
        let est = estimate_signal_search(&s, &EstimatorConfig::default()).unwrap();
        assert!(est.q_hat <= 1);
    }
}
