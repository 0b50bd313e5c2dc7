//! Seeded numerical checks of the measure's validity properties: invariance
//! under local unitaries, non-growth under local measurements, the algebraic
//! properties of the induced Bloch maps, and the spectrum of `σ_i ⊗ σ_j`.
//!
//! Trial `k` of a suite draws from ChaCha20 stream `k` of the suite seed, so
//! results do not depend on how trials are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::local_ops::{
    apply_local_povm, apply_local_unitaries, d_matrix, d_transpose_identity_deviation, q_matrix,
    sigma_pair_eigenvalues, KrausSet, LocalUnitary,
};
use crate::pauli::{Axis, Particle};
use crate::rng::{seeded_stream, SpinRng};
use crate::state::random_pure_state;
use crate::tensor::{entanglement_measure, product_tensor, SpinStatistics};

pub const LU_E_TOL: f64 = 1e-9;
pub const POVM_E_TOL: f64 = 1e-9;
pub const BLOCH_CHECK_TOL: f64 = 1e-10;
pub const SIGMA_EIG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Lu,
    Povm,
    QOrth,
    DContract,
    SigmaEig,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Lu, Suite::Povm, Suite::QOrth, Suite::DContract, Suite::SigmaEig];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lu => "lu",
            Suite::Povm => "povm",
            Suite::QOrth => "q-orth",
            Suite::DContract => "d-contract",
            Suite::SigmaEig => "sigma-eig",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Lu | Suite::QOrth => 1000,
            Suite::Povm => 500,
            Suite::DContract => 200,
            Suite::SigmaEig => 9,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// One tracked quantity of a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Largest value of the checked deviation over all trials.
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Trials whose deviation exceeded the tolerance.
    pub violations: usize,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0 && !self.max_deviation.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: usize,
    pub checks: Vec<CheckOutcome>,
    /// Extra human-readable lines (the sigma-eig suite lists each spectrum).
    pub details: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

/// Per-trial deviations, in the order of the suite's check list.
type TrialDeviations = Vec<f64>;

fn collect(
    suite: Suite,
    names: &[(&'static str, f64)],
    per_trial: Vec<TrialDeviations>,
) -> SuiteReport {
    let checks = names
        .iter()
        .enumerate()
        .map(|(k, &(name, tolerance))| {
            let col = per_trial.iter().map(|row| row[k]);
            CheckOutcome {
                name,
                max_deviation: col.clone().fold(f64::NEG_INFINITY, f64::max),
                tolerance,
                violations: col.filter(|d| !(*d <= tolerance)).count(),
            }
        })
        .collect();
    SuiteReport { suite, trials: per_trial.len(), checks, details: Vec::new() }
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<TrialDeviations>>
where
    F: Fn(&mut SpinRng) -> Result<TrialDeviations> + Sync,
{
    (0..trials).into_par_iter().map(|k| f(&mut seeded_stream(seed, k as u64))).collect()
}

fn lu_trial(rng: &mut SpinRng) -> Result<TrialDeviations> {
    let rho = random_pure_state(rng).density_matrix();
    let u1 = LocalUnitary::random(rng);
    let u2 = LocalUnitary::random(rng);
    let out = apply_local_unitaries(&rho, &u1, &u2)?;
    let de = (entanglement_measure(&out)?.value() - entanglement_measure(&rho)?.value()).abs();
    let q1 = q_matrix(&u1)?;
    let q2 = q_matrix(&u2)?;
    let orth = q1.orthogonality_deviation().max(q2.orthogonality_deviation());
    let t = rho.correlation_tensor()?;
    let t_out = out.correlation_tensor()?;
    let cov_t = (t_out.0 - q1.m * t.0 * q2.m.transpose()).amax();
    let tp = product_tensor(&rho.polarization(Particle::First)?, &rho.polarization(Particle::Second)?);
    let tp_out = product_tensor(&out.polarization(Particle::First)?, &out.polarization(Particle::Second)?);
    let cov_tp = (tp_out.0 - q1.m * tp.0 * q2.m.transpose()).amax();
    Ok(vec![de, orth, cov_t, cov_tp])
}

fn povm_trial(rng: &mut SpinRng) -> Result<TrialDeviations> {
    let rho = random_pure_state(rng).density_matrix();
    let n1 = rng.random_range(2..=4);
    let n2 = rng.random_range(2..=4);
    let k1 = KrausSet::random(rng, n1)?;
    let k2 = KrausSet::random(rng, n2)?;
    let out = apply_local_povm(&rho, &k1, &k2)?;
    let growth = entanglement_measure(&out)?.value() - entanglement_measure(&rho)?.value();
    let d1 = d_matrix(&k1)?;
    let d2 = d_matrix(&k2)?;
    let t = rho.correlation_tensor()?;
    let t_out = out.correlation_tensor()?;
    let cov_t = (t_out.0 - d1.m * t.0 * d2.m.transpose()).amax();
    let tp = product_tensor(&rho.polarization(Particle::First)?, &rho.polarization(Particle::Second)?);
    let tp_out = product_tensor(&out.polarization(Particle::First)?, &out.polarization(Particle::Second)?);
    let cov_tp = (tp_out.0 - d1.m * tp.0 * d2.m.transpose()).amax();
    let gain = (d1.max_gain() - 1.0).max(d2.max_gain() - 1.0);
    let normal = d1.normality_deviation().max(d2.normality_deviation());
    let dt = d_transpose_identity_deviation(&k1)?.max(d_transpose_identity_deviation(&k2)?);
    Ok(vec![growth, cov_t, cov_tp, gain, normal, dt])
}

fn q_trial(rng: &mut SpinRng) -> Result<TrialDeviations> {
    let u = LocalUnitary::random(rng);
    let v = LocalUnitary::random(rng);
    let qu = q_matrix(&u)?;
    let qv = q_matrix(&v)?;
    let quv = q_matrix(&u.compose(&v))?;
    let compose = (quv.m - qv.m * qu.m).amax();
    Ok(vec![qu.orthogonality_deviation(), (qu.determinant() - 1.0).abs(), compose])
}

fn d_trial(rng: &mut SpinRng) -> Result<TrialDeviations> {
    let n = rng.random_range(1..=4);
    let k = KrausSet::random(rng, n)?;
    let d = d_matrix(&k)?;
    Ok(vec![d.max_gain() - 1.0, d.normality_deviation(), d_transpose_identity_deviation(&k)?])
}

fn sigma_eig_report() -> SuiteReport {
    let mut details = Vec::new();
    let mut rows = Vec::new();
    for i in Axis::ALL {
        for j in Axis::ALL {
            let ev = sigma_pair_eigenvalues(i, j);
            let dev = ev
                .iter()
                .zip([-1.0, -1.0, 1.0, 1.0])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let shown: Vec<String> = ev.iter().map(|x| format!("{:+}", x.round() as i64)).collect();
            details.push(format!("sigma_{i}1 sigma_{j}2: [{}]", shown.join(",")));
            rows.push(vec![dev]);
        }
    }
    let mut report = collect(Suite::SigmaEig, &[("eigenvalues = {-1,-1,+1,+1}", SIGMA_EIG_TOL)], rows);
    report.details = details;
    report
}

/// Runs one suite. `trials` is ignored by `sigma-eig`, which always checks
/// the nine axis pairs.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteReport> {
    let report = match suite {
        Suite::Lu => collect(
            suite,
            &[
                ("|E(rho') - E(rho)|", LU_E_TOL),
                ("Q orthogonality", BLOCH_CHECK_TOL),
                ("T' = Q1 T Q2^T", BLOCH_CHECK_TOL),
                ("P1'P2' = Q1 (P1 P2) Q2^T", BLOCH_CHECK_TOL),
            ],
            run_trials(trials, seed, lu_trial)?,
        ),
        Suite::Povm => collect(
            suite,
            &[
                ("E(rho') - E(rho)", POVM_E_TOL),
                ("T' = D1 T D2^T", BLOCH_CHECK_TOL),
                ("P1'P2' = D1 (P1 P2) D2^T", BLOCH_CHECK_TOL),
                ("max eig(D^T D) - 1", BLOCH_CHECK_TOL),
                ("[D, D^T]", BLOCH_CHECK_TOL),
                ("sum L s L^+ = D^T s", BLOCH_CHECK_TOL),
            ],
            run_trials(trials, seed, povm_trial)?,
        ),
        Suite::QOrth => collect(
            suite,
            &[
                ("Q Q^T = I", BLOCH_CHECK_TOL),
                ("|det Q - 1|", BLOCH_CHECK_TOL),
                ("Q(UV) = Q(V) Q(U)", BLOCH_CHECK_TOL),
            ],
            run_trials(trials, seed, q_trial)?,
        ),
        Suite::DContract => collect(
            suite,
            &[
                ("max eig(D^T D) - 1", BLOCH_CHECK_TOL),
                ("[D, D^T]", BLOCH_CHECK_TOL),
                ("sum L s L^+ = D^T s", BLOCH_CHECK_TOL),
            ],
            run_trials(trials, seed, d_trial)?,
        ),
        Suite::SigmaEig => sigma_eig_report(),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_small_runs() {
        for s in Suite::ALL {
            let r = run_suite(s, 25, 3).unwrap();
            assert!(r.passed(), "{s}: {:?}", r.checks);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let a = run_suite(Suite::Povm, 40, 11).unwrap();
        let b = run_suite(Suite::Povm, 40, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sigma_eig_lists_nine_spectra() {
        let r = run_suite(Suite::SigmaEig, 1, 0).unwrap();
        assert_eq!(r.details.len(), 9);
        assert!(r.details.iter().all(|l| l.ends_with("[-1,-1,+1,+1]")));
        assert_eq!(r.trials, 9);
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("all".parse::<Suite>().is_err());
    }

    #[test]
    fn nan_deviation_counts_as_violation() {
        let r = collect(Suite::Lu, &[("x", 1.0)], vec![vec![0.5], vec![f64::NAN]]);
        assert_eq!(r.checks[0].violations, 1);
        assert!(!r.passed());
    }
}
