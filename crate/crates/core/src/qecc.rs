//! Stabilizer error correction at the Pauli-frame level, plus the
//! error-budget accounting that feeds the accept/abort decision.
//!
//! Decoding is by exhaustive syndrome table (minimum-weight coset
//! representative, first found in a deterministic weight-ordered sweep), so
//! there are no decoder heuristics in the trust base. Desk scale only: the
//! table build enumerates 4^n Pauli classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::sampling::{ConfidenceBound, LnFactorials};

/// Stabilizer code description.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub name: String,
    pub n_physical: usize,
    pub k_logical: usize,
    pub t_correct: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeSpecWire {
    name: String,
    n_physical: usize,
    k_logical: usize,
    t_correct: usize,
    generators: Vec<String>,
    logical_x: Vec<String>,
    logical_z: Vec<String>,
}

impl CodeSpec {
    /// Steane [[7,1,3]]: CSS code from the Hamming(7,4) checks.
    pub fn steane() -> Self {
        let supports = [vec![3, 4, 5, 6], vec![1, 2, 5, 6], vec![0, 2, 4, 6]];
        let mut generators = Vec::new();
        for cls in [Pauli::X, Pauli::Z] {
            for support in &supports {
                let mut classes = vec![Pauli::I; 7];
                for &q in support {
                    classes[q] = cls;
                }
                generators.push(PauliString::from_classes(&classes));
            }
        }
        CodeSpec {
            name: "steane".into(),
            n_physical: 7,
            k_logical: 1,
            t_correct: 1,
            generators,
            logical_x: vec![PauliString::from_classes(&[Pauli::X; 7])],
            logical_z: vec![PauliString::from_classes(&[Pauli::Z; 7])],
        }
    }

    /// The [[5,1,3]] code: XZZXI and its cyclic shifts.
    pub fn five_qubit() -> Self {
        let base = [Pauli::X, Pauli::Z, Pauli::Z, Pauli::X, Pauli::I];
        let generators = (0..4)
            .map(|shift| {
                let classes: Vec<Pauli> = (0..5).map(|q| base[(q + 5 - shift) % 5]).collect();
                PauliString::from_classes(&classes)
            })
            .collect();
        CodeSpec {
            name: "five_qubit".into(),
            n_physical: 5,
            k_logical: 1,
            t_correct: 1,
            generators,
            logical_x: vec![PauliString::from_classes(&[Pauli::X; 5])],
            logical_z: vec![PauliString::from_classes(&[Pauli::Z; 5])],
        }
    }

    /// Built-in codes by config name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "steane" => Ok(Self::steane()),
            "five_qubit" => Ok(Self::five_qubit()),
            other => Err(Error::Config(format!(
                "unknown code {other:?}; built-ins: steane, five_qubit"
            ))),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let wire: CodeSpecWire =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("code JSON: {e}")))?;
        let parse_all = |texts: &[String]| -> Result<Vec<PauliString>> {
            texts.iter().map(|t| t.parse()).collect()
        };
        let code = CodeSpec {
            name: wire.name,
            n_physical: wire.n_physical,
            k_logical: wire.k_logical,
            t_correct: wire.t_correct,
            generators: parse_all(&wire.generators)?,
            logical_x: parse_all(&wire.logical_x)?,
            logical_z: parse_all(&wire.logical_z)?,
        };
        code.validate()?;
        Ok(code)
    }

    pub fn to_json(&self) -> String {
        let wire = CodeSpecWire {
            name: self.name.clone(),
            n_physical: self.n_physical,
            k_logical: self.k_logical,
            t_correct: self.t_correct,
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            logical_x: self.logical_x.iter().map(|g| g.to_string()).collect(),
            logical_z: self.logical_z.iter().map(|g| g.to_string()).collect(),
        };
        serde_json::to_string_pretty(&wire).expect("plain struct")
    }

    /// Structural checks: commutation relations, operator sizes, and the
    /// distance claim d >= 2t+1 via an exhaustive weight sweep.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_physical;
        let all_ops = self.generators.iter().chain(&self.logical_x).chain(&self.logical_z);
        for op in all_ops {
            if op.n_qubits() != n {
                return Err(Error::Validation(format!(
                    "operator {op} has {} qubits, code has {n}",
                    op.n_qubits()
                )));
            }
        }
        if self.logical_x.len() != self.k_logical || self.logical_z.len() != self.k_logical {
            return Err(Error::Validation("logical operator count != k_logical".into()));
        }
        if self.generators.len() != n - self.k_logical {
            return Err(Error::Validation(format!(
                "{} generators for an [[{n},{}]] code",
                self.generators.len(),
                self.k_logical
            )));
        }
        for (i, a) in self.generators.iter().enumerate() {
            for b in self.generators.iter().skip(i + 1) {
                if a.anticommutes(b) {
                    return Err(Error::Validation(format!("generators {a} and {b} anticommute")));
                }
            }
        }
        for logical in self.logical_x.iter().chain(&self.logical_z) {
            for g in &self.generators {
                if logical.anticommutes(g) {
                    return Err(Error::Validation(format!(
                        "logical {logical} anticommutes with generator {g}"
                    )));
                }
            }
        }
        for (i, lx) in self.logical_x.iter().enumerate() {
            for (j, lz) in self.logical_z.iter().enumerate() {
                let anti = lx.anticommutes(lz);
                if anti != (i == j) {
                    return Err(Error::Validation(format!(
                        "logical pair ({i}, {j}) has wrong commutation"
                    )));
                }
            }
        }
        // distance: no error of weight <= 2t may act as a non-trivial logical
        for w in 1..=(2 * self.t_correct) {
            for e in errors_of_weight(n, w) {
                let syn = syndrome_bits(self, &e);
                if syn == 0 && logical_classes(self, &e).iter().any(|&c| c != Pauli::I) {
                    return Err(Error::Validation(format!(
                        "weight-{w} error {e} is an undetected logical; distance < {}",
                        2 * self.t_correct + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All Pauli classes of weight exactly `w` on `n` qubits, deterministic
/// order (positions lexicographic, classes X < Y < Z per position).
pub fn errors_of_weight(n: usize, w: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    let mut positions = Vec::with_capacity(w);
    fill_positions(n, w, 0, &mut positions, &mut out);
    out
}

fn fill_positions(
    n: usize,
    w: usize,
    start: usize,
    positions: &mut Vec<usize>,
    out: &mut Vec<PauliString>,
) {
    if positions.len() == w {
        let nontrivial = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut choice = vec![0usize; w];
        loop {
            let mut classes = vec![Pauli::I; n];
            for (slot, &pos) in positions.iter().enumerate() {
                classes[pos] = nontrivial[choice[slot]];
            }
            out.push(PauliString::from_classes(&classes));
            // odometer over class choices
            let mut carry = true;
            for digit in choice.iter_mut().rev() {
                if carry {
                    *digit += 1;
                    if *digit == 3 {
                        *digit = 0;
                    } else {
                        carry = false;
                    }
                }
            }
            if carry {
                break;
            }
        }
        return;
    }
    for pos in start..n {
        positions.push(pos);
        fill_positions(n, w, pos + 1, positions, out);
        positions.pop();
    }
}

/// Measured stabilizer syndrome: bit g is the commutation parity of the
/// error with generator g.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syndrome {
    pub bits: u64,
    pub len: usize,
}

impl Syndrome {
    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }
}

fn syndrome_bits(code: &CodeSpec, e: &PauliString) -> u64 {
    let mut bits = 0u64;
    for (g, generator) in code.generators.iter().enumerate() {
        if e.anticommutes(generator) {
            bits |= 1 << g;
        }
    }
    bits
}

/// Syndrome of an error against a code's generators.
pub fn syndrome_of(code: &CodeSpec, e: &PauliString) -> Result<Syndrome> {
    if e.n_qubits() != code.n_physical {
        return Err(Error::DimensionMismatch { left: e.n_qubits(), right: code.n_physical });
    }
    Ok(Syndrome { bits: syndrome_bits(code, e), len: code.generators.len() })
}

fn logical_classes(code: &CodeSpec, residual: &PauliString) -> Vec<Pauli> {
    (0..code.k_logical)
        .map(|i| {
            let x_part = residual.anticommutes(&code.logical_z[i]);
            let z_part = residual.anticommutes(&code.logical_x[i]);
            Pauli::from_bits(x_part, z_part)
        })
        .collect()
}

/// Decoding result: the applied correction and the residual logical class
/// per logical qubit (I whenever the error weight is within t).
#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub correction: PauliString,
    pub logical_error: Vec<Pauli>,
}

/// Syndrome-table decoder. Build once, reuse across blocks.
pub struct Decoder {
    code: CodeSpec,
    table: Vec<PauliString>,
}

impl Decoder {
    pub fn new(code: &CodeSpec) -> Result<Self> {
        code.validate()?;
        let n = code.n_physical;
        let n_syndromes = 1usize << code.generators.len();
        let mut table: Vec<Option<PauliString>> = vec![None; n_syndromes];
        let mut filled = 0usize;
        'sweep: for w in 0..=n {
            for e in errors_of_weight(n, w) {
                let syn = syndrome_bits(code, &e) as usize;
                if table[syn].is_none() {
                    table[syn] = Some(e);
                    filled += 1;
                    if filled == n_syndromes {
                        break 'sweep;
                    }
                }
            }
        }
        let table = table
            .into_iter()
            .map(|slot| slot.ok_or_else(|| Error::Validation("unreachable syndrome".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { code: code.clone(), table })
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    /// Minimum-weight coset-representative decoding: always returns; the
    /// logical part is guaranteed trivial only for weight <= t.
    pub fn decode(&self, e: &PauliString) -> Result<DecodeOutcome> {
        let syn = syndrome_of(&self.code, e)?;
        let correction = self.table[syn.bits as usize].clone();
        let residual = correction.mul(e)?;
        Ok(DecodeOutcome { correction, logical_error: logical_classes(&self.code, &residual) })
    }
}

/// One-shot decode; prefer [`Decoder`] for bulk work.
pub fn correct(code: &CodeSpec, e: &PauliString) -> Result<DecodeOutcome> {
    Decoder::new(code)?.decode(e)
}

/// Block-decode a channel pattern of per-physical-qubit classes into
/// per-logical-qubit residual classes. With reliable local operations,
/// encoding and decoding add no error at frame level; local noise is
/// injected separately through the budget model.
pub fn protect_frame(decoder: &Decoder, channel_pattern: &[Pauli]) -> Result<Vec<Pauli>> {
    let n = decoder.code.n_physical;
    if channel_pattern.is_empty() || channel_pattern.len() % n != 0 {
        return Err(Error::Config(format!(
            "pattern length {} is not a positive multiple of block size {n}",
            channel_pattern.len()
        )));
    }
    let mut logical = Vec::with_capacity(channel_pattern.len() / n * decoder.code.k_logical);
    for block in channel_pattern.chunks(n) {
        let outcome = decoder.decode(&PauliString::from_classes(block))?;
        logical.extend(outcome.logical_error);
    }
    Ok(logical)
}

/// Error-budget accounting: channel-error bound plus a binomial tail bound
/// on local-operation errors, compared against the code capacity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub channel_errors_bound: usize,
    pub local_error_rate: f64,
    pub local_errors_bound: usize,
    pub total_bound: usize,
    /// n_blocks · t: the generous per-block allocation limit.
    pub capacity: usize,
    pub accept: bool,
}

/// Combine the sampling confidence bound with a one-sided binomial tail
/// bound (at the same epsilon) on `op_count` located local operations.
/// Accept iff the total allocates within t errors per block.
pub fn budget(
    cb: &ConfidenceBound,
    local_rate: f64,
    op_count: usize,
    code: &CodeSpec,
    n_blocks: usize,
) -> Result<ErrorBudget> {
    if !(0.0..1.0).contains(&local_rate) {
        return Err(Error::Validation(format!("local rate {local_rate} outside [0, 1)")));
    }
    let local_errors_bound = if local_rate == 0.0 || op_count == 0 {
        0
    } else {
        let lf = LnFactorials::up_to(op_count);
        let mut bound = op_count;
        for l in 0..=op_count {
            if lf.binom_tail_geq(op_count, local_rate, l + 1) <= cb.epsilon {
                bound = l;
                break;
            }
        }
        bound
    };
    let total_bound = cb.upper_untested_bad + local_errors_bound;
    let capacity = n_blocks * code.t_correct;
    Ok(ErrorBudget {
        channel_errors_bound: cb.upper_untested_bad,
        local_error_rate: local_rate,
        local_errors_bound,
        total_bound,
        capacity,
        accept: total_bound <= capacity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::BoundMethod;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashSet;

    fn rng(seed: u64) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(seed)
    }

    #[test]
    fn builtin_codes_validate() {
        CodeSpec::steane().validate().unwrap();
        CodeSpec::five_qubit().validate().unwrap();
        assert!(CodeSpec::by_name("steane").is_ok());
        assert!(CodeSpec::by_name("nope").is_err());
    }

    #[test]
    fn identity_has_zero_syndrome_and_trivial_logical() {
        let code = CodeSpec::steane();
        let decoder = Decoder::new(&code).unwrap();
        let out = decoder.decode(&PauliString::identity(7)).unwrap();
        assert_eq!(out.correction.weight(), 0);
        assert_eq!(out.logical_error, vec![Pauli::I]);
    }

    #[test]
    fn steane_single_errors_have_distinct_nonzero_syndromes() {
        let code = CodeSpec::steane();
        let singles = errors_of_weight(7, 1);
        assert_eq!(singles.len(), 21);
        let mut seen = HashSet::new();
        for e in &singles {
            let syn = syndrome_of(&code, e).unwrap();
            assert!(!syn.is_trivial(), "error {e} invisible");
            assert!(seen.insert(syn.bits), "syndrome collision at {e}");
        }
    }

    #[test]
    fn steane_corrects_all_single_errors() {
        let decoder = Decoder::new(&CodeSpec::steane()).unwrap();
        for e in errors_of_weight(7, 1) {
            let out = decoder.decode(&e).unwrap();
            assert_eq!(out.logical_error, vec![Pauli::I], "failed on {e}");
        }
    }

    #[test]
    fn five_qubit_corrects_all_single_errors() {
        let decoder = Decoder::new(&CodeSpec::five_qubit()).unwrap();
        for e in errors_of_weight(5, 1) {
            let out = decoder.decode(&e).unwrap();
            assert_eq!(out.logical_error, vec![Pauli::I], "failed on {e}");
        }
    }

    #[test]
    fn stabilizer_elements_decode_to_nothing() {
        let code = CodeSpec::steane();
        let decoder = Decoder::new(&code).unwrap();
        let mut r = rng(1);
        for _ in 0..50 {
            let mut e = PauliString::identity(7);
            for g in &code.generators {
                if r.random::<bool>() {
                    e = e.mul(g).unwrap();
                }
            }
            let out = decoder.decode(&e).unwrap();
            assert_eq!(out.logical_error, vec![Pauli::I], "stabilizer {e} decoded wrong");
            assert!(syndrome_of(&code, &e).unwrap().is_trivial());
        }
    }

    #[test]
    fn weight_two_sweep_finds_logical_witnesses() {
        let decoder = Decoder::new(&CodeSpec::steane()).unwrap();
        let mut witnesses = 0usize;
        for e in errors_of_weight(7, 2) {
            let out = decoder.decode(&e).unwrap();
            if out.logical_error[0] != Pauli::I {
                witnesses += 1;
            }
        }
        assert!(witnesses > 0, "no weight-2 witness found");
    }

    #[test]
    fn degenerate_errors_share_logical_class() {
        let code = CodeSpec::steane();
        let decoder = Decoder::new(&code).unwrap();
        let mut r = rng(2);
        for _ in 0..100 {
            let classes: Vec<Pauli> = (0..7).map(|_| Pauli::ALL[r.random_range(0..4)]).collect();
            let e = PauliString::from_classes(&classes);
            let mut shifted = e.clone();
            for g in &code.generators {
                if r.random::<bool>() {
                    shifted = shifted.mul(g).unwrap();
                }
            }
            let a = decoder.decode(&e).unwrap().logical_error;
            let b = decoder.decode(&shifted).unwrap().logical_error;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn protect_frame_blocks() {
        let decoder = Decoder::new(&CodeSpec::steane()).unwrap();
        // all clean
        let clean = vec![Pauli::I; 14];
        assert_eq!(protect_frame(&decoder, &clean).unwrap(), vec![Pauli::I; 2]);
        // one X per block
        let mut pattern = vec![Pauli::I; 14];
        pattern[2] = Pauli::X;
        pattern[7 + 5] = Pauli::X;
        assert_eq!(protect_frame(&decoder, &pattern).unwrap(), vec![Pauli::I; 2]);
        // a collision witness in block 2 flips that block only
        let witness = errors_of_weight(7, 2)
            .into_iter()
            .find(|e| decoder.decode(e).unwrap().logical_error[0] != Pauli::I)
            .unwrap();
        let mut pattern = vec![Pauli::I; 14];
        for (q, &c) in witness.classes().iter().enumerate() {
            pattern[7 + q] = c;
        }
        let logical = protect_frame(&decoder, &pattern).unwrap();
        assert_eq!(logical[0], Pauli::I);
        assert_ne!(logical[1], Pauli::I);
        // size mismatch
        assert!(protect_frame(&decoder, &vec![Pauli::I; 13]).is_err());
    }

    #[test]
    fn frame_level_linearity_on_correctable_compositions() {
        let decoder = Decoder::new(&CodeSpec::steane()).unwrap();
        let mut r = rng(3);
        let mut checked = 0usize;
        while checked < 50 {
            let q = r.random_range(0..7);
            let e1 = PauliString::single(7, q, Pauli::ALL[1 + r.random_range(0..3)]).unwrap();
            let e2 = PauliString::single(7, q, Pauli::ALL[1 + r.random_range(0..3)]).unwrap();
            let composed = e1.mul(&e2).unwrap();
            if composed.weight() > decoder.code().t_correct {
                continue;
            }
            let la = decoder.decode(&e1).unwrap().logical_error[0];
            let lb = decoder.decode(&e2).unwrap().logical_error[0];
            let lc = decoder.decode(&composed).unwrap().logical_error[0];
            let expect = PauliString::from_classes(&[la])
                .mul(&PauliString::from_classes(&[lb]))
                .unwrap()
                .class_at(0);
            assert_eq!(lc, expect);
            checked += 1;
        }
    }

    #[test]
    fn syndrome_is_linear() {
        let code = CodeSpec::steane();
        let mut r = rng(4);
        for _ in 0..50 {
            let a = PauliString::from_classes(
                &(0..7).map(|_| Pauli::ALL[r.random_range(0..4)]).collect::<Vec<_>>(),
            );
            let b = PauliString::from_classes(
                &(0..7).map(|_| Pauli::ALL[r.random_range(0..4)]).collect::<Vec<_>>(),
            );
            let sa = syndrome_of(&code, &a).unwrap().bits;
            let sb = syndrome_of(&code, &b).unwrap().bits;
            let sab = syndrome_of(&code, &a.mul(&b).unwrap()).unwrap().bits;
            assert_eq!(sab, sa ^ sb);
        }
    }

    #[test]
    fn code_json_round_trip() {
        let code = CodeSpec::steane();
        let json = code.to_json();
        let back = CodeSpec::from_json(&json).unwrap();
        assert_eq!(back.name, code.name);
        assert_eq!(back.generators, code.generators);
        assert!(CodeSpec::from_json("{\"name\": \"broken\"}").is_err());
    }

    fn bound_with(b: usize, eps: f64) -> ConfidenceBound {
        ConfidenceBound {
            epsilon: eps,
            upper_untested_bad: b,
            lower_untested_good: 0,
            method: BoundMethod::ExactHypergeometric,
        }
    }

    #[test]
    fn budget_without_local_noise_is_the_channel_bound() {
        let code = CodeSpec::steane();
        let eb = budget(&bound_with(2, 0.05), 0.0, 10_000, &code, 5).unwrap();
        assert_eq!(eb.total_bound, 2);
        assert_eq!(eb.local_errors_bound, 0);
        assert!(eb.accept);
    }

    #[test]
    fn clean_bound_accepts() {
        let code = CodeSpec::steane();
        let eb = budget(&bound_with(0, 0.05), 0.0, 0, &code, 1).unwrap();
        assert_eq!(eb.total_bound, 0);
        assert!(eb.accept);
    }

    #[test]
    fn overfull_allocation_aborts() {
        // channel bound 3 against two t=1 blocks
        let code = CodeSpec::steane();
        let eb = budget(&bound_with(3, 0.05), 0.0, 0, &code, 2).unwrap();
        assert_eq!(eb.capacity, 2);
        assert!(!eb.accept);
    }

    #[test]
    fn local_noise_bound_is_a_binomial_tail() {
        let code = CodeSpec::steane();
        let eb = budget(&bound_with(0, 0.05), 1e-4, 10_000, &code, 300).unwrap();
        // Bin(10^4, 1e-4) has mean 1; the 95% tail sits at 3
        assert_eq!(eb.local_errors_bound, 3);
        assert!(eb.accept);
        assert!(budget(&bound_with(0, 0.05), 1.0, 10, &code, 1).is_err());
    }
}
