//! Eigenvalue-based estimation of the number of signals in a noisy linear
//! mixture.
//!
//! The library covers the spectral plumbing (sample covariance, a Jacobi
//! eigensolver, spiked-model asymptotics), Tracy-Widom distributions, the
//! joint noise/spike solver, the interaction-corrected decision statistic,
//! closed-form misdetection scores, six estimators and a Monte Carlo harness.
//!
//! ```
//! use sigcount::{estimate, EstimatorConfig, Method, Spectrum};
//!
//! let mut eigs = vec![30.0];
//! eigs.extend(std::iter::repeat_n(1.0, 49));
//! let spectrum = Spectrum::new(eigs, 200).unwrap();
//! let est = estimate(Method::Sns, &spectrum, &EstimatorConfig::default()).unwrap();
//! assert_eq!(est.q_hat, 1);
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod noise;
pub mod normal;
pub mod probabilities;
pub mod simulation;
pub mod spectral;
pub mod statistics;
pub mod tracy_widom;

pub use error::{Error, Result};
pub use estimators::{
    estimate, estimate_aic, estimate_mdl, estimate_modified_aic, estimate_rmt, estimate_signal_search, estimate_sns,
    Criterion, DecisionTrace, EstimatorConfig, Method, ModelOrderEstimate, TraceRow,
};
pub use noise::{estimate_noise_and_spikes, mle_noise, solve_rho, NoiseFit, SolverOptions};
pub use probabilities::{pe_rmt, pe_srmt, theta_rmt, theta_srmt, ProbPair, ThresholdContext};
pub use simulation::{generate_snapshots, run_sweep, run_trial, ScenarioSpec, SweepAxis, SweepResult};
pub use spectral::{
    detection_limit, eig_sym_desc, fluctuation_params, lawley_expectation, sample_covariance, spike_limit,
    PopulationModel, SnapshotMatrix, Spectrum, SymMatrix,
};
pub use statistics::{decision_statistic, signal_threshold, SignalStat};
pub use tracy_widom::{centering_mu, scaling_sigma, tw_cdf, tw_quantile, Beta, TwTable};
