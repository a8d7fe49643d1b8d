//! Scalable Pauli-frame teleportation and its verification harnesses.
//!
//! At frame level a teleportation outcome is a uniformly random Bell label
//! per pair (an exact property of maximally entangled resources, checked
//! against the dense oracle), and the pair's error class rides through the
//! correction conjugation unchanged. Phases are discarded here; the dense
//! path guards the amplitude-level statement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ErrorPatternDistribution;
use crate::dense::{teleport_dense_forced, StateVector, TeleportSetup};
use crate::error::{Error, Result};
use crate::pauli::{
    bell_label_to_error, conjugate, BellLabel, BellPattern, Pauli, PauliString,
};
use crate::sampling::sample_without_replacement;

/// Result of teleporting one frame of pair errors.
#[derive(Debug, Clone)]
pub struct TeleportOutcome {
    /// Alice's Bell-measurement results, one label per pair.
    pub j_pattern: BellPattern,
    /// Per-signal error class after conjugation and correction; always
    /// class-equal to the pair's pre-teleportation error.
    pub effective_error: Vec<Pauli>,
}

/// Teleport one signal per pair: sample the measurement labels uniformly,
/// conjugate the pair errors by the corrections, discard phases.
pub fn teleport_frame(pair_errors: &BellPattern, rng: &mut impl Rng) -> TeleportOutcome {
    let n = pair_errors.n_pairs();
    let j_labels: Vec<BellLabel> = (0..n)
        .map(|_| BellLabel::from_bits(rng.random_range(0..4u8)).expect("two bits"))
        .collect();
    let j_pattern = BellPattern::new(j_labels);
    let corrections =
        PauliString::from_classes(&j_pattern.labels().iter().map(|&l| bell_label_to_error(l)).collect::<Vec<_>>());
    let conjugated = conjugate(&corrections, &pair_errors.error_string())
        .expect("equal lengths by construction");
    TeleportOutcome { j_pattern, effective_error: conjugated.classes() }
}

/// Injective signal→pair map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    signal_to_pair: Vec<usize>,
    n_pairs: usize,
}

impl Assignment {
    pub fn identity(n_signals: usize, n_pairs: usize) -> Result<Self> {
        if n_signals > n_pairs {
            return Err(Error::Bounds(format!("{n_signals} signals exceed {n_pairs} pairs")));
        }
        Ok(Self { signal_to_pair: (0..n_signals).collect(), n_pairs })
    }

    pub fn pair_of(&self, signal: usize) -> usize {
        self.signal_to_pair[signal]
    }

    pub fn n_signals(&self) -> usize {
        self.signal_to_pair.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.signal_to_pair
    }
}

/// Uniform injective assignment of signals to pairs (sampling without
/// replacement; a uniform permutation when the counts are equal).
pub fn assign_random(n_signals: usize, n_pairs: usize, rng: &mut impl Rng) -> Result<Assignment> {
    let signal_to_pair = sample_without_replacement(n_pairs, n_signals, rng)?;
    Ok(Assignment { signal_to_pair, n_pairs })
}

/// A payload for the dense invariance check: a state plus the positions of
/// its teleported qubits (the rest is reference ancilla).
#[derive(Debug, Clone)]
pub struct DensePayload {
    pub state: StateVector,
    pub signals: Vec<usize>,
}

impl DensePayload {
    /// Unentangled single-qubit payload.
    pub fn single(state: StateVector) -> Self {
        Self { state, signals: vec![0] }
    }
}

/// Invariance verification report: per-payload per-signal error rates and
/// the worst-case agreement figures against the closed-form state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub n_signals: usize,
    pub exact: bool,
    /// [payload][signal] non-trivial error probability.
    pub per_payload_rates: Vec<Vec<f64>>,
    /// Max over signals of the rate spread across payloads.
    pub max_spread: f64,
    /// Worst 1 - |⟨teleported|closed-form⟩| over all enumerated branches
    /// (exact path only).
    pub max_state_mismatch: f64,
    /// Worst |p(j) - 4^{-N}| over enumerated branches (exact path only).
    pub max_outcome_deviation: f64,
}

/// Teleport every payload of the family through the same Bell-diagonal
/// noise and compare the induced per-signal error rates.
///
/// When the law enumerates within the dense cap the check is exact: every
/// (pattern, outcome) branch is verified amplitude-wise against the
/// closed-form conjugated state and the rates are exact sums. Otherwise a
/// Monte Carlo sweep over `trials` samples is used.
pub fn verify_invariance(
    payloads: &[DensePayload],
    noise: &ErrorPatternDistribution,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<InvarianceReport> {
    if payloads.is_empty() {
        return Err(Error::Validation("need at least one payload".into()));
    }
    let n = noise.n_pairs();
    for p in payloads {
        if p.signals.len() != n {
            return Err(Error::DimensionMismatch { left: p.signals.len(), right: n });
        }
    }
    match noise.to_explicit(2) {
        Ok(patterns) => verify_invariance_exact(payloads, &patterns, n),
        Err(_) => verify_invariance_monte_carlo(payloads, noise, trials, rng),
    }
}

fn setup_for(payload: &DensePayload, pattern: &BellPattern) -> Result<TeleportSetup> {
    let n = pattern.n_pairs();
    let pairs: Vec<(usize, usize)> = (0..n).map(|k| (2 * k, 2 * k + 1)).collect();
    let clean = crate::dense::singlet_chain(2 * n, &pairs)?;
    let bob: Vec<usize> = (0..n).map(|k| 2 * k + 1).collect();
    let resource = clean.apply_pauli(&pattern.error_string(), &bob)?;
    Ok(TeleportSetup {
        payload: payload.state.clone(),
        payload_signals: payload.signals.clone(),
        resource,
        resource_pairs: pairs,
    })
}

fn verify_invariance_exact(
    payloads: &[DensePayload],
    patterns: &[(BellPattern, f64)],
    n: usize,
) -> Result<InvarianceReport> {
    let outcome_count = 1usize << (2 * n);
    let uniform = 1.0 / outcome_count as f64;
    let mut per_payload_rates = Vec::with_capacity(payloads.len());
    let mut max_state_mismatch: f64 = 0.0;
    let mut max_outcome_deviation: f64 = 0.0;
    for payload in payloads {
        let mut rates = vec![0.0; n];
        for (pattern, p_pattern) in patterns {
            if *p_pattern == 0.0 {
                continue;
            }
            let setup = setup_for(payload, pattern)?;
            let (full, layout) = setup.assemble()?;
            let classes = pattern.error_classes();
            for raw in 0..outcome_count {
                let outcomes: Vec<BellLabel> = (0..n)
                    .map(|k| BellLabel::from_bits(((raw >> (2 * k)) & 0b11) as u8).expect("two bits"))
                    .collect();
                let (prob, state) = teleport_dense_forced(&full, &layout, &outcomes)?;
                let (p_ref, ref_state) = setup.reference_state(&outcomes)?;
                max_outcome_deviation = max_outcome_deviation
                    .max((prob - uniform).abs())
                    .max((p_ref - uniform).abs());
                if let (Some(a), Some(b)) = (state, ref_state) {
                    let overlap = a.inner(&b)?.norm();
                    max_state_mismatch = max_state_mismatch.max(1.0 - overlap);
                }
                for (k, &cls) in classes.iter().enumerate() {
                    let j = PauliString::from_classes(&[bell_label_to_error(outcomes[k])]);
                    let eff = conjugate(&j, &PauliString::from_classes(&[cls]))?;
                    if eff.class_at(0) != Pauli::I {
                        rates[k] += p_pattern * prob;
                    }
                }
            }
        }
        per_payload_rates.push(rates);
    }
    Ok(InvarianceReport {
        n_signals: n,
        exact: true,
        max_spread: rate_spread(&per_payload_rates),
        per_payload_rates,
        max_state_mismatch,
        max_outcome_deviation,
    })
}

fn verify_invariance_monte_carlo(
    payloads: &[DensePayload],
    noise: &ErrorPatternDistribution,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<InvarianceReport> {
    let n = noise.n_pairs();
    if trials == 0 {
        return Err(Error::Validation("Monte Carlo path needs trials > 0".into()));
    }
    let mut per_payload_rates = Vec::with_capacity(payloads.len());
    for payload in payloads {
        let mut hits = vec![0usize; n];
        for _ in 0..trials {
            let pattern = noise.sample(rng);
            let setup = setup_for(payload, &pattern)?;
            let (full, layout) = setup.assemble()?;
            let out = crate::dense::teleport_dense(&full, &layout, rng)?;
            for (k, &cls) in pattern.error_classes().iter().enumerate() {
                let j = PauliString::from_classes(&[bell_label_to_error(out.outcomes[k])]);
                let eff = conjugate(&j, &PauliString::from_classes(&[cls]))?;
                if eff.class_at(0) != Pauli::I {
                    hits[k] += 1;
                }
            }
        }
        per_payload_rates.push(hits.into_iter().map(|h| h as f64 / trials as f64).collect());
    }
    Ok(InvarianceReport {
        n_signals: n,
        exact: false,
        max_spread: rate_spread(&per_payload_rates),
        per_payload_rates,
        max_state_mismatch: f64::NAN,
        max_outcome_deviation: f64::NAN,
    })
}

fn rate_spread(rates: &[Vec<f64>]) -> f64 {
    let n = rates[0].len();
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let column: Vec<f64> = rates.iter().map(|r| r[k]).collect();
        let max = column.iter().cloned().fold(f64::MIN, f64::max);
        let min = column.iter().cloned().fold(f64::MAX, f64::min);
        worst = worst.max(max - min);
    }
    worst
}

/// Signal-to-pair assignment policy for the independence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentMode {
    Random,
    Identity,
}

/// Statistics of the random-assignment independence experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub n_pairs: usize,
    pub n_signals: usize,
    pub trials: usize,
    pub mode: AssignmentMode,
    /// Per-signal non-trivial error frequency.
    pub marginal_rates: Vec<f64>,
    pub mean_rate: f64,
    /// Pairwise indicator covariance estimated directly from the simulated
    /// assignments, averaged over signal pairs, with its standard error.
    pub empirical_cov: f64,
    pub empirical_cov_se: f64,
    /// Covariance with the assignment draw integrated out exactly per
    /// sampled pattern (conditional Monte Carlo; random mode only, equals
    /// the empirical estimator under identity assignment).
    pub conditional_cov: f64,
    /// Exact covariance of the configured law under random assignment.
    pub closed_form_cov: Option<f64>,
    /// Pearson χ² (1 dof) of the 2x2 indicator table for signals (0, 1).
    pub chi2: f64,
}

/// Run `trials` rounds of pattern sampling, signal assignment, and frame
/// teleportation; report marginal error rates, pairwise indicator
/// covariances, and a χ² independence statistic. Under random assignment
/// the indicators are exchangeable with covariance of order 1/n_pairs.
pub fn independence_test(
    noise: &ErrorPatternDistribution,
    n_signals: usize,
    trials: usize,
    mode: AssignmentMode,
    rng: &mut impl Rng,
) -> Result<IndependenceReport> {
    let n = noise.n_pairs();
    if n_signals < 2 || n_signals > n {
        return Err(Error::Bounds(format!("need 2..={n} signals, got {n_signals}")));
    }
    if trials == 0 {
        return Err(Error::Validation("trials must be positive".into()));
    }
    let s = n_signals as f64;
    let nf = n as f64;
    let mut marginal_hits = vec![0usize; n_signals];
    // per-trial moments for the empirical estimator
    let (mut sum_h1, mut sum_h2) = (0.0, 0.0);
    let (mut sum_h1_sq, mut sum_h2_sq, mut sum_h1_h2) = (0.0, 0.0, 0.0);
    // conditional (assignment-integrated) moments
    let (mut sum_c1, mut sum_c2) = (0.0, 0.0);
    // 2x2 table for signals (0, 1)
    let mut table = [[0usize; 2]; 2];

    for _ in 0..trials {
        let pattern = noise.sample(rng);
        let assignment = match mode {
            AssignmentMode::Random => assign_random(n_signals, n, rng)?,
            AssignmentMode::Identity => Assignment::identity(n_signals, n)?,
        };
        let sub_labels: Vec<_> =
            (0..n_signals).map(|sig| pattern.label(assignment.pair_of(sig))).collect();
        let outcome = teleport_frame(&BellPattern::new(sub_labels), rng);
        let flags: Vec<bool> =
            outcome.effective_error.iter().map(|&c| c != Pauli::I).collect();

        let x = flags.iter().filter(|&&b| b).count() as f64;
        let h1 = x / s;
        let h2 = if n_signals > 1 { x * (x - 1.0) / (s * (s - 1.0)) } else { 0.0 };
        sum_h1 += h1;
        sum_h2 += h2;
        sum_h1_sq += h1 * h1;
        sum_h2_sq += h2 * h2;
        sum_h1_h2 += h1 * h2;

        let w = pattern.nontrivial_count() as f64;
        sum_c1 += w / nf;
        sum_c2 += w * (w - 1.0) / (nf * (nf - 1.0));

        for (sig, &flag) in flags.iter().enumerate() {
            if flag {
                marginal_hits[sig] += 1;
            }
        }
        table[usize::from(flags[0])][usize::from(flags[1])] += 1;
    }

    let t = trials as f64;
    let m1 = sum_h1 / t;
    let m2 = sum_h2 / t;
    let empirical_cov = m2 - m1 * m1;
    // delta method for Var(m2 - m1²)
    let var_h1 = (sum_h1_sq / t - m1 * m1).max(0.0);
    let var_h2 = (sum_h2_sq / t - m2 * m2).max(0.0);
    let cov_h1_h2 = sum_h1_h2 / t - m1 * m2;
    let var_est =
        ((var_h2 - 4.0 * m1 * cov_h1_h2 + 4.0 * m1 * m1 * var_h1) / t).max(0.0);
    let empirical_cov_se = var_est.sqrt();

    let conditional_cov = match mode {
        AssignmentMode::Random => sum_c2 / t - (sum_c1 / t).powi(2),
        AssignmentMode::Identity => empirical_cov,
    };
    let closed_form_cov = match mode {
        AssignmentMode::Random => {
            let (m1w, m2w) = noise.nontrivial_count_moments();
            Some(m2w / (nf * (nf - 1.0)) - (m1w / nf).powi(2))
        }
        AssignmentMode::Identity => None,
    };

    Ok(IndependenceReport {
        n_pairs: n,
        n_signals,
        trials,
        mode,
        marginal_rates: marginal_hits.iter().map(|&h| h as f64 / t).collect(),
        mean_rate: m1,
        empirical_cov,
        empirical_cov_se,
        conditional_cov,
        closed_form_cov,
        chi2: chi2_of(&table),
    })
}

fn chi2_of(table: &[[usize; 2]; 2]) -> f64 {
    let t: usize = table.iter().flatten().sum();
    let tf = t as f64;
    let row: [f64; 2] = [table[0][0] as f64 + table[0][1] as f64, table[1][0] as f64 + table[1][1] as f64];
    let col: [f64; 2] = [table[0][0] as f64 + table[1][0] as f64, table[0][1] as f64 + table[1][1] as f64];
    let mut chi2 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = row[i] * col[j] / tf;
            if expected > 0.0 {
                chi2 += (table[i][j] as f64 - expected).powi(2) / expected;
            }
        }
    }
    chi2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{to_distribution, AttackSpec};
    use crate::dense::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn clean_pairs_stay_clean_for_any_outcome() {
        let mut r = rng(1);
        for _ in 0..50 {
            let out = teleport_frame(&BellPattern::all_singlet(8), &mut r);
            assert!(out.effective_error.iter().all(|&c| c == Pauli::I));
        }
    }

    #[test]
    fn error_class_lands_on_the_matching_signal() {
        let mut classes = vec![Pauli::I; 6];
        classes[3] = Pauli::X;
        let pattern = BellPattern::from_error_classes(&classes);
        let mut r = rng(2);
        for _ in 0..50 {
            let out = teleport_frame(&pattern, &mut r);
            assert_eq!(out.effective_error, classes);
        }
    }

    #[test]
    fn effective_error_always_class_equal_to_input() {
        let mut r = rng(3);
        for _ in 0..20 {
            let classes: Vec<Pauli> =
                (0..10).map(|_| Pauli::ALL[r.random_range(0..4)]).collect();
            let pattern = BellPattern::from_error_classes(&classes);
            let out = teleport_frame(&pattern, &mut r);
            assert_eq!(out.effective_error, classes);
        }
    }

    #[test]
    fn frame_rate_matches_exact_dense_rate() {
        // law {I: 0.8, Z: 0.2} per pair on 2 pairs
        let law = crate::channel::ErrorPatternDistribution::homogeneous(
            2,
            [0.8, 0.0, 0.0, 0.2],
        )
        .unwrap();
        // frame path, 10^4 samples
        let mut r = rng(4);
        let trials = 10_000;
        let mut hits = [0usize; 2];
        for _ in 0..trials {
            let out = teleport_frame(&law.sample(&mut r), &mut r);
            for k in 0..2 {
                if out.effective_error[k] != Pauli::I {
                    hits[k] += 1;
                }
            }
        }
        for k in 0..2 {
            let rate = hits[k] as f64 / trials as f64;
            assert!((rate - 0.2).abs() < 0.015, "signal {k} rate {rate}");
        }
        // dense path is exact
        let mut r2 = rng(5);
        let payload = DensePayload {
            state: random_state(2, &mut r2).unwrap(),
            signals: vec![0, 1],
        };
        let report = verify_invariance(&[payload], &law, 0, &mut r2).unwrap();
        assert!(report.exact);
        for k in 0..2 {
            assert_close(report.per_payload_rates[0][k], 0.2, 1e-10);
        }
    }

    #[test]
    fn invariance_noiseless_and_depolarizing() {
        let mut r = rng(6);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = crate::dense::StateVector::from_amplitudes(vec![
            num_complex::Complex64::new(h, 0.0),
            num_complex::Complex64::new(h, 0.0),
        ])
        .unwrap();
        let payloads = vec![
            DensePayload::single(crate::dense::StateVector::zero_state(1).unwrap()),
            DensePayload::single(plus),
            // entangled payload: signal qubit 1, reference qubit 0
            DensePayload {
                state: crate::dense::bell_state(BellLabel::PHI_PLUS),
                signals: vec![1],
            },
        ];

        let clean = to_distribution(&AttackSpec::None, 1).unwrap();
        let report = verify_invariance(&payloads, &clean, 0, &mut r).unwrap();
        assert!(report.exact);
        for rates in &report.per_payload_rates {
            assert_close(rates[0], 0.0, 1e-12);
        }
        assert!(report.max_spread <= 1e-10);
        assert!(report.max_state_mismatch <= 1e-10);
        assert!(report.max_outcome_deviation <= 1e-10);

        let depol = to_distribution(&AttackSpec::Depolarizing { p: 0.3 }, 1).unwrap();
        let report = verify_invariance(&payloads, &depol, 0, &mut r).unwrap();
        for rates in &report.per_payload_rates {
            assert_close(rates[0], 0.3, 1e-10);
        }
        assert!(report.max_spread <= 1e-10);
        assert!(report.max_state_mismatch <= 1e-10);
    }

    #[test]
    fn invariance_under_adversarial_correlated_law() {
        let mut r = rng(7);
        let law = crate::channel::ErrorPatternDistribution::explicit(vec![
            (BellPattern::from_error_classes(&[Pauli::I, Pauli::I]), 0.5),
            (BellPattern::from_error_classes(&[Pauli::X, Pauli::Y]), 0.3),
            (BellPattern::from_error_classes(&[Pauli::Z, Pauli::I]), 0.2),
        ])
        .unwrap();
        let payloads = vec![
            DensePayload { state: random_state(2, &mut r).unwrap(), signals: vec![0, 1] },
            DensePayload { state: random_state(3, &mut r).unwrap(), signals: vec![1, 2] },
        ];
        let report = verify_invariance(&payloads, &law, 0, &mut r).unwrap();
        assert!(report.exact);
        assert!(report.max_spread <= 1e-10, "spread {}", report.max_spread);
        assert!(report.max_state_mismatch <= 1e-10);
        // marginals: signal 0 bad in patterns 2 and 3 → 0.5; signal 1 bad in
        // pattern 2 → 0.3
        assert_close(report.per_payload_rates[0][0], 0.5, 1e-10);
        assert_close(report.per_payload_rates[0][1], 0.3, 1e-10);
    }

    #[test]
    fn assignment_edge_cases() {
        let mut r = rng(8);
        let a = assign_random(1, 1, &mut r).unwrap();
        assert_eq!(a.map(), &[0]);
        assert!(assign_random(5, 3, &mut r).is_err());
        assert_eq!(Assignment::identity(3, 10).unwrap().map(), &[0, 1, 2]);
    }

    #[test]
    fn two_of_two_assignment_is_a_fair_permutation() {
        let mut r = rng(9);
        let trials = 10_000;
        let mut swapped = 0usize;
        for _ in 0..trials {
            let a = assign_random(2, 2, &mut r).unwrap();
            if a.map() == [1, 0] {
                swapped += 1;
            }
        }
        let p = swapped as f64 / trials as f64;
        // binomial 3σ band around 1/2
        assert!((p - 0.5).abs() < 0.015, "swap rate {p}");
    }

    #[test]
    fn three_of_ten_assignment_uniform_over_injections() {
        let mut r = rng(10);
        let trials = 100_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..trials {
            let a = assign_random(3, 10, &mut r).unwrap();
            *counts.entry(a.map().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 720);
        let expected = trials as f64 / 720.0;
        let chi2: f64 =
            counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // df = 719; far tail at ~1e-3 is ≈ 842
        assert!(chi2 < 900.0, "chi2 {chi2}");
    }

    #[test]
    fn iid_noise_has_vanishing_covariance() {
        let law =
            crate::channel::ErrorPatternDistribution::homogeneous(50, [0.7, 0.1, 0.1, 0.1])
                .unwrap();
        let mut r = rng(11);
        let report =
            independence_test(&law, 5, 20_000, AssignmentMode::Random, &mut r).unwrap();
        let closed = report.closed_form_cov.unwrap();
        assert_close(closed, 0.0, 1e-12);
        assert!(
            report.empirical_cov.abs() <= 4.0 * report.empirical_cov_se,
            "cov {} vs se {}",
            report.empirical_cov,
            report.empirical_cov_se
        );
        for rate in &report.marginal_rates {
            assert!((rate - 0.3).abs() < 0.02);
        }
    }

    #[test]
    fn burst_covariance_matches_finite_population_formula() {
        // all-or-nothing XXX on 3 of 100 pairs
        let law = crate::channel::ErrorPatternDistribution::burst(100, 1.0, 3, 1.0).unwrap();
        let mut r = rng(12);
        let report =
            independence_test(&law, 3, 30_000, AssignmentMode::Random, &mut r).unwrap();
        let closed = report.closed_form_cov.unwrap();
        // exact: 3·2/(100·99) - (3/100)² = -2.9394e-4, order 1/n
        assert_close(closed, 6.0 / 9900.0 - 0.0009, 1e-12);
        assert!(closed.abs() <= 3.3e-4);
        assert!(
            (report.empirical_cov - closed).abs() <= 4.0 * report.empirical_cov_se,
            "empirical {} closed {closed} se {}",
            report.empirical_cov,
            report.empirical_cov_se
        );
        // conditional Monte Carlo is exact here (W deterministic)
        assert_close(report.conditional_cov, closed, 1e-12);
    }

    #[test]
    fn identity_assignment_over_burst_flags_dependence() {
        let law = crate::channel::ErrorPatternDistribution::burst(100, 1.0, 30, 1.0).unwrap();
        let mut r = rng(13);
        let random =
            independence_test(&law, 30, 20_000, AssignmentMode::Random, &mut r).unwrap();
        let control =
            independence_test(&law, 30, 20_000, AssignmentMode::Identity, &mut r).unwrap();
        assert!(
            control.empirical_cov >= 10.0 * random.conditional_cov.abs(),
            "control {} vs random {}",
            control.empirical_cov,
            random.conditional_cov
        );
        // the χ² statistic separates the two by orders of magnitude
        assert!(control.chi2 > 100.0, "control chi2 {}", control.chi2);
        assert!(random.chi2 < 20.0, "random chi2 {}", random.chi2);
    }
}
