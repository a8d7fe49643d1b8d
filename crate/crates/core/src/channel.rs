//! Eavesdropping attacks and channel noise.
//!
//! Every attack ends up in one of two forms: a classical probability law over
//! Bell-basis error patterns (the frame path), or an explicit unitary with
//! ancilla on the dense path, reduced to such a law by [`reduce_unitary`].

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{bell_project, singlet_chain, CMatrix, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{Axis, BellLabel, BellPattern, Pauli};

const PROB_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

/// Cap on explicit pattern maps (4^16 patterns); larger laws must be
/// generators.
pub const EXPLICIT_PAIR_CAP: usize = 16;

/// Per-pair class probabilities ordered [I, X, Y, Z].
pub type ClassProbs = [f64; 4];

fn check_probs(p: &ClassProbs) -> Result<()> {
    let mut sum = 0.0;
    for &v in p {
        if !(0.0..=1.0 + PROB_TOL).contains(&v) {
            return Err(Error::Validation(format!("probability {v} out of range")));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::Validation(format!("class probabilities sum to {sum}")));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Law {
    /// Independent per-pair class probabilities.
    Factorized(Vec<ClassProbs>),
    /// Explicit pattern → probability map.
    Explicit(Vec<(BellPattern, f64)>),
    /// Independent identical blocks, each drawn from an explicit block law.
    Blocks { block: Vec<(BellPattern, f64)>, n_blocks: usize },
    /// Seeded sampler for the correlated burst family: with probability
    /// `p_burst` a window of `burst_len` consecutive pairs starts uniformly
    /// at random, and each pair inside it independently picks up an X error
    /// with probability `p_inside`.
    Burst { p_burst: f64, burst_len: usize, p_inside: f64 },
}

/// Classical probability law over N-pair Bell error patterns.
#[derive(Debug, Clone)]
pub struct ErrorPatternDistribution {
    n_pairs: usize,
    law: Law,
}

impl ErrorPatternDistribution {
    pub fn factorized(per_pair: Vec<ClassProbs>) -> Result<Self> {
        if per_pair.is_empty() {
            return Err(Error::Validation("factorized law needs at least one pair".into()));
        }
        for p in &per_pair {
            check_probs(p)?;
        }
        Ok(Self { n_pairs: per_pair.len(), law: Law::Factorized(per_pair) })
    }

    /// Same class probabilities on every pair.
    pub fn homogeneous(n_pairs: usize, probs: ClassProbs) -> Result<Self> {
        check_probs(&probs)?;
        if n_pairs == 0 {
            return Err(Error::Validation("law needs at least one pair".into()));
        }
        Ok(Self { n_pairs, law: Law::Factorized(vec![probs; n_pairs]) })
    }

    /// Point mass on the all-singlet pattern.
    pub fn noiseless(n_pairs: usize) -> Self {
        Self::homogeneous(n_pairs, [1.0, 0.0, 0.0, 0.0]).expect("valid point mass")
    }

    pub fn explicit(patterns: Vec<(BellPattern, f64)>) -> Result<Self> {
        if patterns.is_empty() {
            return Err(Error::Validation("explicit law needs at least one pattern".into()));
        }
        let n_pairs = patterns[0].0.n_pairs();
        if n_pairs > EXPLICIT_PAIR_CAP {
            return Err(Error::Validation(format!(
                "explicit laws are capped at {EXPLICIT_PAIR_CAP} pairs; use a generator"
            )));
        }
        let mut sum = 0.0;
        for (pat, p) in &patterns {
            if pat.n_pairs() != n_pairs {
                return Err(Error::DimensionMismatch { left: pat.n_pairs(), right: n_pairs });
            }
            if *p < -PROB_TOL {
                return Err(Error::Validation(format!("negative probability {p}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::Validation(format!("explicit law sums to {sum}")));
        }
        Ok(Self { n_pairs, law: Law::Explicit(patterns) })
    }

    /// Independent identical blocks.
    pub fn blocks(block: Vec<(BellPattern, f64)>, n_blocks: usize) -> Result<Self> {
        let single = Self::explicit(block)?;
        let block = match single.law {
            Law::Explicit(b) => b,
            _ => unreachable!(),
        };
        Ok(Self { n_pairs: single.n_pairs * n_blocks, law: Law::Blocks { block, n_blocks } })
    }

    pub fn burst(n_pairs: usize, p_burst: f64, burst_len: usize, p_inside: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_burst) || !(0.0..=1.0).contains(&p_inside) {
            return Err(Error::Validation("burst probabilities must lie in [0,1]".into()));
        }
        if burst_len == 0 || burst_len > n_pairs {
            return Err(Error::Validation(format!(
                "burst length {burst_len} invalid for {n_pairs} pairs"
            )));
        }
        Ok(Self { n_pairs, law: Law::Burst { p_burst, burst_len, p_inside } })
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Draw one Bell error pattern.
    pub fn sample(&self, rng: &mut impl Rng) -> BellPattern {
        match &self.law {
            Law::Factorized(per_pair) => {
                let classes: Vec<Pauli> =
                    per_pair.iter().map(|p| sample_class(p, rng)).collect();
                BellPattern::from_error_classes(&classes)
            }
            Law::Explicit(patterns) => sample_explicit(patterns, rng),
            Law::Blocks { block, n_blocks } => {
                let mut labels = Vec::with_capacity(self.n_pairs);
                for _ in 0..*n_blocks {
                    labels.extend_from_slice(sample_explicit(block, rng).labels());
                }
                BellPattern::new(labels)
            }
            Law::Burst { p_burst, burst_len, p_inside } => {
                let mut classes = vec![Pauli::I; self.n_pairs];
                if rng.random::<f64>() < *p_burst {
                    let start = rng.random_range(0..=self.n_pairs - burst_len);
                    for c in classes.iter_mut().skip(start).take(*burst_len) {
                        if rng.random::<f64>() < *p_inside {
                            *c = Pauli::X;
                        }
                    }
                }
                BellPattern::from_error_classes(&classes)
            }
        }
    }

    /// Exact class marginal [I, X, Y, Z] of one pair.
    pub fn class_marginal(&self, pair: usize) -> ClassProbs {
        match &self.law {
            Law::Factorized(per_pair) => per_pair[pair],
            Law::Explicit(patterns) => {
                let mut out = [0.0; 4];
                for (pat, p) in patterns {
                    out[class_index(bell_label_to_error_class(pat.label(pair)))] += p;
                }
                out
            }
            Law::Blocks { block, .. } => {
                let width = block[0].0.n_pairs();
                let mut out = [0.0; 4];
                for (pat, p) in block {
                    out[class_index(bell_label_to_error_class(pat.label(pair % width)))] += p;
                }
                out
            }
            Law::Burst { p_burst, burst_len, p_inside } => {
                let n = self.n_pairs;
                let starts = (n - burst_len + 1) as f64;
                let lo = pair.saturating_sub(burst_len - 1);
                let hi = pair.min(n - burst_len);
                let covering = if hi >= lo { (hi - lo + 1) as f64 } else { 0.0 };
                let p_x = p_burst * (covering / starts) * p_inside;
                [1.0 - p_x, p_x, 0.0, 0.0]
            }
        }
    }

    /// Probability that `pair` carries a non-trivial error.
    pub fn nontrivial_rate(&self, pair: usize) -> f64 {
        1.0 - self.class_marginal(pair)[0]
    }

    /// Exact expectation and second factorial moment of the pattern-wide
    /// non-trivial count: (E[W], E[W(W-1)]).
    pub fn nontrivial_count_moments(&self) -> (f64, f64) {
        match &self.law {
            Law::Factorized(per_pair) => {
                let rates: Vec<f64> = per_pair.iter().map(|p| 1.0 - p[0]).collect();
                let s1: f64 = rates.iter().sum();
                let s2: f64 = rates.iter().map(|r| r * r).sum();
                (s1, s1 * s1 - s2)
            }
            Law::Explicit(patterns) => explicit_moments(patterns),
            Law::Blocks { block, n_blocks } => {
                let (m1, m2) = explicit_moments(block);
                let k = *n_blocks as f64;
                // independent blocks: E[W] = k m1, E[W(W-1)] = k m2 + k(k-1) m1²
                (k * m1, k * m2 + k * (k - 1.0) * m1 * m1)
            }
            Law::Burst { p_burst, burst_len, p_inside } => {
                let l = *burst_len as f64;
                let m1 = p_burst * l * p_inside;
                let m2 = p_burst * l * (l - 1.0) * p_inside * p_inside;
                (m1, m2)
            }
        }
    }

    /// Enumerate the full pattern law. Available for every law kind at small
    /// pair counts; the cap keeps the expansion at most 4^max_pairs entries.
    pub fn to_explicit(&self, max_pairs: usize) -> Result<Vec<(BellPattern, f64)>> {
        if self.n_pairs > max_pairs {
            return Err(Error::Bounds(format!(
                "law over {} pairs exceeds enumeration cap {max_pairs}",
                self.n_pairs
            )));
        }
        match &self.law {
            Law::Explicit(patterns) => Ok(patterns.clone()),
            Law::Factorized(per_pair) => {
                let mut acc: Vec<(Vec<Pauli>, f64)> = vec![(Vec::new(), 1.0)];
                for probs in per_pair {
                    let mut next = Vec::with_capacity(acc.len() * 4);
                    for (prefix, p) in &acc {
                        for (ci, &cp) in probs.iter().enumerate() {
                            if cp > 0.0 {
                                let mut classes = prefix.clone();
                                classes.push(Pauli::ALL[ci]);
                                next.push((classes, p * cp));
                            }
                        }
                    }
                    acc = next;
                }
                Ok(acc
                    .into_iter()
                    .map(|(classes, p)| (BellPattern::from_error_classes(&classes), p))
                    .collect())
            }
            Law::Blocks { block, n_blocks } => {
                let mut acc: Vec<(Vec<BellLabel>, f64)> = vec![(Vec::new(), 1.0)];
                for _ in 0..*n_blocks {
                    let mut next = Vec::with_capacity(acc.len() * block.len());
                    for (prefix, p) in &acc {
                        for (pat, bp) in block {
                            if *bp > 0.0 {
                                let mut labels = prefix.clone();
                                labels.extend_from_slice(pat.labels());
                                next.push((labels, p * bp));
                            }
                        }
                    }
                    acc = next;
                }
                Ok(acc.into_iter().map(|(l, p)| (BellPattern::new(l), p)).collect())
            }
            Law::Burst { p_burst, burst_len, p_inside } => {
                let n = self.n_pairs;
                let mut map: HashMap<Vec<u8>, f64> = HashMap::new();
                let clean = BellPattern::all_singlet(n);
                if *p_burst < 1.0 {
                    *map.entry(key_of(&clean)).or_insert(0.0) += 1.0 - p_burst;
                }
                let starts = n - burst_len + 1;
                let p_start = p_burst / starts as f64;
                for start in 0..starts {
                    for subset in 0..(1usize << burst_len) {
                        let mut classes = vec![Pauli::I; n];
                        let mut p = p_start;
                        for k in 0..*burst_len {
                            if subset & (1 << k) != 0 {
                                classes[start + k] = Pauli::X;
                                p *= p_inside;
                            } else {
                                p *= 1.0 - p_inside;
                            }
                        }
                        if p > 0.0 {
                            let pat = BellPattern::from_error_classes(&classes);
                            *map.entry(key_of(&pat)).or_insert(0.0) += p;
                        }
                    }
                }
                Ok(map
                    .into_iter()
                    .map(|(key, p)| (pattern_of(&key), p))
                    .collect())
            }
        }
    }
}

fn key_of(pat: &BellPattern) -> Vec<u8> {
    pat.labels().iter().map(|l| l.bits()).collect()
}

fn pattern_of(key: &[u8]) -> BellPattern {
    BellPattern::new(key.iter().map(|&b| BellLabel::from_bits(b).expect("two bits")).collect())
}

fn bell_label_to_error_class(l: BellLabel) -> Pauli {
    crate::pauli::bell_label_to_error(l)
}

fn class_index(c: Pauli) -> usize {
    match c {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

fn explicit_moments(patterns: &[(BellPattern, f64)]) -> (f64, f64) {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (pat, p) in patterns {
        let w = pat.nontrivial_count() as f64;
        m1 += p * w;
        m2 += p * w * (w - 1.0);
    }
    (m1, m2)
}

fn sample_class(probs: &ClassProbs, rng: &mut impl Rng) -> Pauli {
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if draw < acc {
            return Pauli::ALL[i];
        }
    }
    *Pauli::ALL.last().expect("non-empty")
}

fn sample_explicit(patterns: &[(BellPattern, f64)], rng: &mut impl Rng) -> BellPattern {
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    for (pat, p) in patterns {
        acc += p;
        if draw < acc {
            return pat.clone();
        }
    }
    patterns.last().expect("non-empty").0.clone()
}

/// Eve's measurement axis policy for intercept-resend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AxisPolicy {
    Fixed { axis: Axis },
    UniformRandom,
}

/// Attack menu. `custom_unitary` realizes the general joint attack at small
/// pair counts; the rest are named desk-scale instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    None,
    Depolarizing { p: f64 },
    Independent { p_i: f64, p_x: f64, p_y: f64, p_z: f64 },
    Burst { p_burst: f64, burst_len: usize, p_inside: f64 },
    InterceptResend { policy: AxisPolicy },
    /// Joint unitary on the Bob-bound halves of a block of pairs plus
    /// `n_eve_qubits` ancilla qubits; dim = 2^(block_pairs + n_eve_qubits).
    CustomUnitary { matrix: CMatrix, n_eve_qubits: usize },
}

impl AttackSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            AttackSpec::None => Ok(()),
            AttackSpec::Depolarizing { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::Validation(format!("depolarizing p={p} out of range")));
                }
                Ok(())
            }
            AttackSpec::Independent { p_i, p_x, p_y, p_z } => check_probs(&[*p_i, *p_x, *p_y, *p_z]),
            AttackSpec::Burst { p_burst, burst_len, p_inside } => {
                if !(0.0..=1.0).contains(p_burst) || !(0.0..=1.0).contains(p_inside) {
                    return Err(Error::Validation("burst probabilities out of range".into()));
                }
                if *burst_len == 0 {
                    return Err(Error::Validation("burst length must be positive".into()));
                }
                Ok(())
            }
            AttackSpec::InterceptResend { .. } => Ok(()),
            AttackSpec::CustomUnitary { matrix, n_eve_qubits } => {
                matrix.validate_unitary(UNITARY_TOL)?;
                let _ = custom_block_pairs(matrix, *n_eve_qubits)?;
                Ok(())
            }
        }
    }

    /// Pairs covered by one application of a custom unitary.
    pub fn block_pairs(&self) -> Result<usize> {
        match self {
            AttackSpec::CustomUnitary { matrix, n_eve_qubits } => {
                custom_block_pairs(matrix, *n_eve_qubits)
            }
            _ => Err(Error::Unsupported("block_pairs applies to custom_unitary only".into())),
        }
    }
}

fn custom_block_pairs(matrix: &CMatrix, n_eve: usize) -> Result<usize> {
    let dim = matrix.dim();
    if !dim.is_power_of_two() {
        return Err(Error::Validation(format!("unitary dim {dim} is not a power of two")));
    }
    let total = dim.trailing_zeros() as usize;
    if total <= n_eve {
        return Err(Error::Validation(format!(
            "unitary on {total} qubits leaves no room for {n_eve} Eve qubits"
        )));
    }
    Ok(total - n_eve)
}

/// Frame-path law of an attack on `n_pairs` pairs.
///
/// General unitaries are reduced through the dense path instead; see
/// [`reduce_unitary`].
pub fn to_distribution(attack: &AttackSpec, n_pairs: usize) -> Result<ErrorPatternDistribution> {
    attack.validate()?;
    match attack {
        AttackSpec::None => Ok(ErrorPatternDistribution::noiseless(n_pairs)),
        AttackSpec::Depolarizing { p } => {
            ErrorPatternDistribution::homogeneous(n_pairs, [1.0 - p, p / 3.0, p / 3.0, p / 3.0])
        }
        AttackSpec::Independent { p_i, p_x, p_y, p_z } => {
            ErrorPatternDistribution::homogeneous(n_pairs, [*p_i, *p_x, *p_y, *p_z])
        }
        AttackSpec::Burst { p_burst, burst_len, p_inside } => {
            ErrorPatternDistribution::burst(n_pairs, *p_burst, *burst_len, *p_inside)
        }
        AttackSpec::InterceptResend { policy } => {
            let probs = intercept_resend_class_probs(*policy)?;
            ErrorPatternDistribution::homogeneous(n_pairs, probs)
        }
        AttackSpec::CustomUnitary { .. } => Err(Error::Unsupported(
            "custom_unitary has no direct frame law; reduce it on the dense path \
             with reduce_unitary"
                .into(),
        )),
    }
}

/// Exact Bell-pattern law of a joint unitary acting on the Bob-bound halves
/// of `n_pairs` pairs plus Eve's ancilla, computed on the dense path. By the
/// dephasing identity the returned classical law reproduces every
/// coarse-grained statistic of the true post-attack state.
pub fn reduce_unitary(
    matrix: &CMatrix,
    n_eve_qubits: usize,
    n_pairs: usize,
) -> Result<ErrorPatternDistribution> {
    matrix.validate_unitary(UNITARY_TOL)?;
    let block = custom_block_pairs(matrix, n_eve_qubits)?;
    if block != n_pairs {
        return Err(Error::DimensionMismatch { left: block, right: n_pairs });
    }
    if n_pairs > 2 {
        return Err(Error::Bounds(format!(
            "dense reduction is limited to 2 pairs, got {n_pairs}"
        )));
    }
    let n_total = 2 * n_pairs + n_eve_qubits;
    let pairs: Vec<(usize, usize)> = (0..n_pairs).map(|k| (2 * k, 2 * k + 1)).collect();
    let state = singlet_chain(n_total, &pairs)?;
    let targets: Vec<usize> =
        (0..n_pairs).map(|k| 2 * k + 1).chain(2 * n_pairs..n_total).collect();
    let state = state.apply_unitary(matrix, &targets)?;
    bell_pattern_marginal(&state, &pairs)
}

/// Bell-pattern probabilities of the given pairs of a dense state.
pub fn bell_pattern_marginal(
    state: &StateVector,
    pairs: &[(usize, usize)],
) -> Result<ErrorPatternDistribution> {
    let n_pairs = pairs.len();
    let mut patterns = Vec::new();
    for raw in 0..(1usize << (2 * n_pairs)) {
        let labels: Vec<BellLabel> = (0..n_pairs)
            .map(|k| BellLabel::from_bits(((raw >> (2 * k)) & 0b11) as u8).expect("two bits"))
            .collect();
        let mut branch = state.clone();
        let mut prob = 1.0;
        for (k, &pair) in pairs.iter().enumerate() {
            let (p, next) = bell_project(&branch, pair, labels[k])?;
            prob *= p;
            match next {
                Some(next) => branch = next,
                None => {
                    prob = 0.0;
                    break;
                }
            }
        }
        if prob > PROB_TOL {
            patterns.push((BellPattern::new(labels), prob));
        }
    }
    // numerical renormalization of the surviving branches
    let total: f64 = patterns.iter().map(|(_, p)| p).sum();
    for (_, p) in &mut patterns {
        *p /= total;
    }
    ErrorPatternDistribution::explicit(patterns)
}

/// Eve measures each listed qubit along a policy-chosen axis and resends the
/// collapsed eigenstate.
pub fn apply_intercept_resend(
    state: &StateVector,
    bob_qubits: &[usize],
    policy: AxisPolicy,
    rng: &mut impl Rng,
) -> Result<StateVector> {
    let mut s = state.clone();
    for &q in bob_qubits {
        let axis = match policy {
            AxisPolicy::Fixed { axis } => axis,
            AxisPolicy::UniformRandom => Axis::ALL[rng.random_range(0..3)],
        };
        let (_, next) = crate::dense::measure_axis(&s, q, axis, rng)?;
        s = next;
    }
    Ok(s)
}

/// Per-pair class law induced by intercept-resend, obtained by modelling
/// Eve's measurement as a basis-change + CNOT into an ancilla and reducing
/// on the dense path (the single reduction code path for all attacks).
fn intercept_resend_class_probs(policy: AxisPolicy) -> Result<ClassProbs> {
    match policy {
        AxisPolicy::Fixed { axis } => {
            let law = reduce_unitary(&measurement_unitary(axis), 1, 1)?;
            Ok(law.class_marginal(0))
        }
        AxisPolicy::UniformRandom => {
            let mut acc = [0.0; 4];
            for axis in Axis::ALL {
                let per_axis = intercept_resend_class_probs(AxisPolicy::Fixed { axis })?;
                for (a, v) in acc.iter_mut().zip(per_axis) {
                    *a += v / 3.0;
                }
            }
            Ok(acc)
        }
    }
}

/// 4x4 unitary on (Bob qubit, Eve qubit) copying Bob's `axis` eigenbasis
/// into the ancilla: (R_a ⊗ I) · CNOT · (R_a† ⊗ I).
fn measurement_unitary(axis: Axis) -> CMatrix {
    let r = basis_rotation(axis);
    let r_dag = dagger(&r);
    let cnot = cnot_low_to_high();
    mat_mul(&mat_mul(&kron_low_high(&r, &identity2()), &cnot), &kron_low_high(&r_dag, &identity2()))
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn identity2() -> CMatrix {
    CMatrix::identity(2)
}

/// Maps the z eigenbasis to the `axis` eigenbasis.
fn basis_rotation(axis: Axis) -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match axis {
        Axis::Z => identity2(),
        Axis::X => CMatrix::new(2, vec![c64(h, 0.0), c64(h, 0.0), c64(h, 0.0), c64(-h, 0.0)])
            .expect("2x2"),
        // S·H: |0⟩ → (|0⟩+i|1⟩)/√2, |1⟩ → (|0⟩-i|1⟩)/√2
        Axis::Y => CMatrix::new(2, vec![c64(h, 0.0), c64(h, 0.0), c64(0.0, h), c64(0.0, -h)])
            .expect("2x2"),
    }
}

fn dagger(m: &CMatrix) -> CMatrix {
    let d = m.dim();
    let mut data = vec![c64(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            data[i * d + j] = m.at(j, i).conj();
        }
    }
    CMatrix::new(d, data).expect("square")
}

fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let d = a.dim();
    let mut data = vec![c64(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = c64(0.0, 0.0);
            for k in 0..d {
                acc += a.at(i, k) * b.at(k, j);
            }
            data[i * d + j] = acc;
        }
    }
    CMatrix::new(d, data).expect("square")
}

/// Kronecker product with `low` on index bit 0 and `high` on index bit 1.
fn kron_low_high(low: &CMatrix, high: &CMatrix) -> CMatrix {
    let mut data = vec![c64(0.0, 0.0); 16];
    for rl in 0..2 {
        for rh in 0..2 {
            for cl in 0..2 {
                for ch in 0..2 {
                    data[(rl + 2 * rh) * 4 + (cl + 2 * ch)] = low.at(rl, cl) * high.at(rh, ch);
                }
            }
        }
    }
    CMatrix::new(4, data).expect("4x4")
}

/// CNOT with control on index bit 0 and target on index bit 1.
fn cnot_low_to_high() -> CMatrix {
    let mut data = vec![c64(0.0, 0.0); 16];
    for b in 0..2usize {
        for e in 0..2usize {
            let col = b + 2 * e;
            let row = b + 2 * (e ^ b);
            data[row * 4 + col] = c64(1.0, 0.0);
        }
    }
    CMatrix::new(4, data).expect("4x4")
}
