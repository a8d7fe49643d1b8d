//! Alice/Bob protocol runtime over an adversarial channel.
//!
//! One run executes, in order: pair distribution through the attack (the
//! only step where Eve acts), receipt confirmation, random test-subset
//! measurement with public announcement, estimation and confidence bound,
//! the budget-based accept/abort decision, frame teleportation of the
//! surviving pairs, block error correction, and common-axis key
//! generation. Every public message lands in the transcript, in step
//! order; identical (config, attack, seed) inputs produce byte-identical
//! transcripts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{reduce_unitary, to_distribution, AttackSpec, ErrorPatternDistribution};
use crate::error::{Error, Result};
use crate::pauli::{Axis, BellPattern, Pauli};
use crate::qecc::{budget, CodeSpec, Decoder, ErrorBudget};
use crate::rng::substream;
use crate::sampling::{
    confidence_bound, run_sampling_frame, BoundMethod, ConfidenceBound, SamplingRecord,
};
use crate::teleport::teleport_frame;

pub const SCHEMA_VERSION: u32 = 1;

fn default_ops_per_qubit() -> usize {
    4
}

fn default_code() -> String {
    "steane".into()
}

fn default_bound_method() -> BoundMethod {
    BoundMethod::ExactHypergeometric
}

/// Run parameters. The block structure must tile exactly:
/// (R / k_logical) blocks of n_physical qubits equal N - m.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// N: EPR pairs distributed.
    pub n_pairs: usize,
    /// m: pairs sacrificed for testing.
    pub m_test: usize,
    /// R: logical key bits.
    pub r_logical: usize,
    #[serde(default = "default_code")]
    pub code: String,
    /// Confidence failure probability for the sampling bound.
    pub epsilon: f64,
    /// Security exponent k feeding the key-privacy bound.
    pub k_sec: f64,
    #[serde(default)]
    pub local_rate: f64,
    /// Located local operations charged per teleported physical qubit.
    #[serde(default = "default_ops_per_qubit")]
    pub ops_per_qubit: usize,
    #[serde(default = "default_bound_method")]
    pub bound_method: BoundMethod,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<CodeSpec> {
        let code = CodeSpec::by_name(&self.code)?;
        if self.m_test == 0 || self.m_test >= self.n_pairs {
            return Err(Error::Config(format!(
                "need 0 < m < N, got m = {}, N = {}",
                self.m_test, self.n_pairs
            )));
        }
        if self.r_logical == 0 || self.r_logical % code.k_logical != 0 {
            return Err(Error::Config(format!(
                "R = {} is not a positive multiple of k = {}",
                self.r_logical, code.k_logical
            )));
        }
        let blocks = self.r_logical / code.k_logical;
        if blocks * code.n_physical != self.n_pairs - self.m_test {
            return Err(Error::Config(format!(
                "block structure mismatch: {} blocks x {} qubits != N - m = {}",
                blocks,
                code.n_physical,
                self.n_pairs - self.m_test
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if !(0.0..1.0).contains(&self.local_rate) {
            return Err(Error::Config(format!("local_rate {} outside [0, 1)", self.local_rate)));
        }
        Ok(code)
    }

    pub fn n_blocks(&self) -> usize {
        self.r_logical
            / CodeSpec::by_name(&self.code).map(|c| c.k_logical).unwrap_or(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AbortReason {
    SamplingBoundExceeded,
    BudgetExceeded,
    ConfigError,
}

/// Public-channel messages, in protocol step order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "msg", rename_all = "snake_case")]
pub enum Message {
    Receipt { n_pairs: usize },
    TestSelection { indices: Vec<usize> },
    TestAxes { axes: Vec<Axis> },
    TestOutcomes { alice: Vec<i8>, bob: Vec<i8> },
    BellOutcomes { j_pattern: BellPattern },
    Decision { accept: bool, abort_reason: Option<AbortReason> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub schema_version: u32,
    pub messages: Vec<Message>,
    /// Present iff the run accepted.
    pub alice_key: Option<String>,
    pub bob_key: Option<String>,
}

/// Accept/abort decision with the inputs that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbortDecision {
    pub accept: bool,
    pub reason: Option<AbortReason>,
}

/// Accept iff the budget allocates; a failing budget is attributed to the
/// channel bound alone when that bound already exceeds capacity.
pub fn decide_abort(
    _sr: &SamplingRecord,
    cb: &ConfidenceBound,
    eb: &ErrorBudget,
) -> AbortDecision {
    if eb.accept {
        AbortDecision { accept: true, reason: None }
    } else if cb.upper_untested_bad > eb.capacity {
        AbortDecision { accept: false, reason: Some(AbortReason::SamplingBoundExceeded) }
    } else {
        AbortDecision { accept: false, reason: Some(AbortReason::BudgetExceeded) }
    }
}

/// Key-privacy exponent: c = k - log2(2R + k + 1/ln 2), with Eve's mutual
/// information on the R-bit key bounded by 2^{-c} plus an unresolved
/// 2^{O(-2k)} residual that is reported symbolically, never folded into
/// the numeric bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Bound {
    pub r_bits: usize,
    pub k_sec: f64,
    pub c_exponent: f64,
    pub eve_info_bound: f64,
    pub residual_term: String,
    /// False when k_sec is too small for a meaningful (positive) exponent.
    pub positive: bool,
}

pub fn lemma1_bound(r_bits: usize, k_sec: f64) -> Lemma1Bound {
    let c = k_sec - (2.0 * r_bits as f64 + k_sec + std::f64::consts::LOG2_E).log2();
    Lemma1Bound {
        r_bits,
        k_sec,
        c_exponent: c,
        eve_info_bound: 2f64.powf(-c),
        residual_term: "2^{O(-2k)} (constant unresolved; reported symbolically)".into(),
        positive: c > 0.0,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SecurityReport {
    pub schema_version: u32,
    pub accepted: bool,
    pub abort_reason: Option<AbortReason>,
    pub sampling: SamplingRecord,
    pub confidence: ConfidenceBound,
    pub budget: ErrorBudget,
    /// Fidelity floor 1 - 2^{-k_sec} assumed by the key-privacy bound.
    pub fidelity_floor: f64,
    pub lemma1: Lemma1Bound,
    pub epsilon: f64,
    pub bound_method: BoundMethod,
}

/// Frame-semantics key generation from the per-logical-qubit residual
/// classes: Alice's bit is a fair coin; Bob measures the anti-correlated
/// member and complements, so his bit differs from Alice's exactly when the
/// residual class flips z-basis outcomes (X or Y).
pub fn generate_key(
    logical_residuals: &[Pauli],
    decision: &AbortDecision,
    rng: &mut impl Rng,
) -> Result<(String, String)> {
    if !decision.accept {
        return Err(Error::ProtocolOrder(
            "key generation requires an accept decision".into(),
        ));
    }
    let mut alice = String::with_capacity(logical_residuals.len());
    let mut bob = String::with_capacity(logical_residuals.len());
    for &residual in logical_residuals {
        let a = rng.random::<bool>();
        let b = a ^ residual.flips_z_outcome();
        alice.push(if a { '1' } else { '0' });
        bob.push(if b { '1' } else { '0' });
    }
    Ok((alice, bob))
}

/// Frame-path law of the attack over N pairs. Custom unitaries reduce on
/// the dense path and tile as independent blocks across the run.
fn attack_law(attack: &AttackSpec, n_pairs: usize) -> Result<ErrorPatternDistribution> {
    match attack {
        AttackSpec::CustomUnitary { matrix, n_eve_qubits } => {
            let block = attack.block_pairs()?;
            if n_pairs % block != 0 {
                return Err(Error::Config(format!(
                    "custom unitary covers {block} pairs; N = {n_pairs} does not tile"
                )));
            }
            let law = reduce_unitary(matrix, *n_eve_qubits, block)?;
            ErrorPatternDistribution::blocks(law.to_explicit(block)?, n_pairs / block)
        }
        other => to_distribution(other, n_pairs),
    }
}

/// Execute protocol steps 1-7 under the given attack. Aborts are normal
/// outcomes (accept = false); configuration mismatches surface as errors
/// before any quantum step runs.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    attack: &AttackSpec,
    seed: u64,
) -> Result<(ProtocolTranscript, SecurityReport)> {
    let code = cfg.validate()?;
    attack.validate()?;
    let n = cfg.n_pairs;
    let law = attack_law(attack, n)?;
    let n_blocks = cfg.r_logical / code.k_logical;

    // step 1: distribution through the noisy channel; Eve acts here only
    let pattern = law.sample(&mut substream(seed, "distribution"));

    // step 2: receipt confirmation
    let mut messages = vec![Message::Receipt { n_pairs: n }];

    // steps 3-4: random test subset, announced axes and outcomes, estimate
    let record = run_sampling_frame(&pattern, cfg.m_test, &mut substream(seed, "sampling"))?;
    messages.push(Message::TestSelection { indices: record.tested.clone() });
    messages.push(Message::TestAxes { axes: record.axes.clone() });
    messages.push(Message::TestOutcomes {
        alice: record.outcomes.iter().map(|&(a, _)| a).collect(),
        bob: record.outcomes.iter().map(|&(_, b)| b).collect(),
    });
    let bound = confidence_bound(n, cfg.m_test, record.k_anti, cfg.epsilon, cfg.bound_method)?;
    let op_count = cfg.ops_per_qubit * (n - cfg.m_test);
    let error_budget = budget(&bound, cfg.local_rate, op_count, &code, n_blocks)?;
    let decision = decide_abort(&record, &bound, &error_budget);

    let lemma1 = lemma1_bound(cfg.r_logical, cfg.k_sec);
    let report = |accepted: bool, reason: Option<AbortReason>| SecurityReport {
        schema_version: SCHEMA_VERSION,
        accepted,
        abort_reason: reason,
        sampling: record.clone(),
        confidence: bound.clone(),
        budget: error_budget.clone(),
        fidelity_floor: 1.0 - 2f64.powf(-cfg.k_sec),
        lemma1: lemma1.clone(),
        epsilon: cfg.epsilon,
        bound_method: cfg.bound_method,
    };

    if !decision.accept {
        messages.push(Message::Decision { accept: false, abort_reason: decision.reason });
        let transcript = ProtocolTranscript {
            schema_version: SCHEMA_VERSION,
            messages,
            alice_key: None,
            bob_key: None,
        };
        return Ok((transcript, report(false, decision.reason)));
    }

    // steps 5-6: the untested pairs teleport the encoded qubits; the pattern
    // on survivors was fixed at distribution time and classes survive the
    // correction conjugation, so the step-4 estimate remains valid
    let mut tested_flags = vec![false; n];
    for &idx in &record.tested {
        tested_flags[idx] = true;
    }
    let survivors: Vec<usize> = (0..n).filter(|&i| !tested_flags[i]).collect();
    let survivor_pattern =
        BellPattern::new(survivors.iter().map(|&i| pattern.label(i)).collect());
    let outcome = teleport_frame(&survivor_pattern, &mut substream(seed, "teleport"));
    debug_assert_eq!(outcome.effective_error, survivor_pattern.error_classes());
    messages.push(Message::BellOutcomes { j_pattern: outcome.j_pattern.clone() });

    // local noise: independent per-located-operation class flips
    let mut physical = outcome.effective_error;
    if cfg.local_rate > 0.0 {
        let mut local_rng = substream(seed, "local-noise");
        for cls in physical.iter_mut() {
            for _ in 0..cfg.ops_per_qubit {
                if local_rng.random::<f64>() < cfg.local_rate {
                    let flip = [Pauli::X, Pauli::Y, Pauli::Z][local_rng.random_range(0..3)];
                    *cls = cls.compose(flip);
                }
            }
        }
    }

    // step 7: block correction and common-axis key generation
    let decoder = Decoder::new(&code)?;
    let residuals = crate::qecc::protect_frame(&decoder, &physical)?;
    let (alice_key, bob_key) =
        generate_key(&residuals, &decision, &mut substream(seed, "key"))?;

    messages.push(Message::Decision { accept: true, abort_reason: None });
    let transcript = ProtocolTranscript {
        schema_version: SCHEMA_VERSION,
        messages,
        alice_key: Some(alice_key),
        bob_key: Some(bob_key),
    };
    Ok((transcript, report(true, None)))
}
