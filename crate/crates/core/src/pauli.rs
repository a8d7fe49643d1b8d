//! Pauli operators, Bell-basis labels, and Pauli-by-Pauli conjugation.
//!
//! Multi-qubit operators are stored in symplectic form: two packed bit
//! vectors (x, z) plus a fourth-root-of-unity phase. Qubit `q` has class
//! `(x_q, z_q)` with (0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z. The global phase
//! convention is `Y = iXZ`, which keeps the bit-pair encoding closed under
//! multiplication. Bit vectors are packed 64 qubits per machine word; all
//! values are immutable after construction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-qubit Pauli class. `I` is the unique trivial class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Symplectic bit pair (x, z).
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn is_trivial(self) -> bool {
        self == Pauli::I
    }

    /// Class part of the product (phase dropped): bitwise XOR.
    pub fn compose(self, other: Pauli) -> Pauli {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        Pauli::from_bits(x1 ^ x2, z1 ^ z2)
    }

    /// Whether this class flips z-basis measurement outcomes.
    pub fn flips_z_outcome(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Measurement axis for the pair-testing procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// Fourth root of unity, encoded as the exponent k in i^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Phase {
    PlusOne = 0,
    PlusI = 1,
    MinusOne = 2,
    MinusI = 3,
}

impl Phase {
    pub fn from_exponent(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            3 => Phase::MinusI,
            _ => unreachable!(),
        }
    }

    pub fn exponent(self) -> u8 {
        self as u8
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(i64::from(self.exponent()) + i64::from(other.exponent()))
    }

    pub fn negate(self) -> Phase {
        self.mul(Phase::MinusOne)
    }

    pub fn as_complex(self) -> num_complex::Complex64 {
        match self {
            Phase::PlusOne => num_complex::Complex64::new(1.0, 0.0),
            Phase::PlusI => num_complex::Complex64::new(0.0, 1.0),
            Phase::MinusOne => num_complex::Complex64::new(-1.0, 0.0),
            Phase::MinusI => num_complex::Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PlusOne => write!(f, "+1"),
            Phase::PlusI => write!(f, "+i"),
            Phase::MinusOne => write!(f, "-1"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}

const WORD_BITS: usize = 64;

fn word_count(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// N-qubit Pauli operator: packed (x, z) bit vectors plus a global phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_words: Vec<u64>,
    z_words: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    /// The identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x_words: vec![0; word_count(n)],
            z_words: vec![0; word_count(n)],
            phase: Phase::PlusOne,
        }
    }

    pub fn from_classes(classes: &[Pauli]) -> Self {
        let mut p = Self::identity(classes.len());
        for (q, &c) in classes.iter().enumerate() {
            p.set_class(q, c);
        }
        p
    }

    /// Single-qubit class `c` at position `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, c: Pauli) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: n });
        }
        let mut p = Self::identity(n);
        p.set_class(q, c);
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn class_at(&self, q: usize) -> Pauli {
        debug_assert!(q < self.n);
        let (w, b) = (q / WORD_BITS, q % WORD_BITS);
        let x = (self.x_words[w] >> b) & 1 == 1;
        let z = (self.z_words[w] >> b) & 1 == 1;
        Pauli::from_bits(x, z)
    }

    fn set_class(&mut self, q: usize, c: Pauli) {
        let (w, b) = (q / WORD_BITS, q % WORD_BITS);
        let (x, z) = c.bits();
        self.x_words[w] = (self.x_words[w] & !(1 << b)) | (u64::from(x) << b);
        self.z_words[w] = (self.z_words[w] & !(1 << b)) | (u64::from(z) << b);
    }

    pub fn classes(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.class_at(q)).collect()
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.x_words
            .iter()
            .zip(&self.z_words)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Positions carrying a non-identity class, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.class_at(q) != Pauli::I).collect()
    }

    /// Symplectic commutation: true iff the operators anticommute.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        let mut parity = 0u32;
        for i in 0..self.x_words.len() {
            parity ^= (self.x_words[i] & other.z_words[i]).count_ones() & 1;
            parity ^= (self.z_words[i] & other.x_words[i]).count_ones() & 1;
        }
        parity & 1 == 1
    }

    /// Group product `self · other` with exact phase.
    ///
    /// Per qubit, each class (x, z) stands for i^{xz} X^x Z^z; collecting the
    /// reordering sign (-1)^{z1·x2} and the Y bookkeeping factors gives the
    /// exponent x1z1 + x2z2 - x3z3 + 2·z1x2 (mod 4) on top of the two input
    /// phases, where (x3, z3) = (x1^x2, z1^z2).
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let words = self.x_words.len();
        let mut x_words = vec![0u64; words];
        let mut z_words = vec![0u64; words];
        let mut exponent: i64 = 0;
        for i in 0..words {
            let (x1, z1) = (self.x_words[i], self.z_words[i]);
            let (x2, z2) = (other.x_words[i], other.z_words[i]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            exponent += i64::from((x1 & z1).count_ones());
            exponent += i64::from((x2 & z2).count_ones());
            exponent -= i64::from((x3 & z3).count_ones());
            exponent += 2 * i64::from((z1 & x2).count_ones());
            x_words[i] = x3;
            z_words[i] = z3;
        }
        let phase = self.phase.mul(other.phase).mul(Phase::from_exponent(exponent));
        Ok(PauliString { n: self.n, x_words, z_words, phase })
    }

    pub fn to_dense_string(&self) -> String {
        format!("{self}")
    }
}

/// `σ_j σ_i σ_j` for a plain (phase +1) correction `j`.
///
/// Conjugation fixes every per-qubit class: the result differs from `i` by
/// at most a sign, which flips exactly when `j` and `i` anticommute. The
/// trivial/non-trivial partition of classes is therefore preserved.
pub fn conjugate(j: &PauliString, i: &PauliString) -> Result<PauliString> {
    if j.phase() != Phase::PlusOne {
        return Err(Error::Validation(
            "conjugation is defined for plain (phase +1) corrections".into(),
        ));
    }
    j.mul(i)?.mul(j)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::PlusOne => "",
            Phase::PlusI => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.class_at(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Grammar: `[+-]? i? [IXYZ]+`.
    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut negative = false;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            negative = bytes[pos] == b'-';
            pos += 1;
        }
        let mut imaginary = false;
        if pos < bytes.len() && bytes[pos] == b'i' {
            imaginary = true;
            pos += 1;
        }
        let mut classes = Vec::new();
        let start = pos;
        while pos < bytes.len() {
            let c = match bytes[pos] {
                b'I' => Pauli::I,
                b'X' => Pauli::X,
                b'Y' => Pauli::Y,
                b'Z' => Pauli::Z,
                other => {
                    return Err(Error::Parse {
                        position: pos,
                        message: format!("invalid character {:?}, expected one of IXYZ", other as char),
                    })
                }
            };
            classes.push(c);
            pos += 1;
        }
        if classes.is_empty() {
            return Err(Error::Parse {
                position: start,
                message: "expected at least one of IXYZ".into(),
            });
        }
        let phase = match (negative, imaginary) {
            (false, false) => Phase::PlusOne,
            (false, true) => Phase::PlusI,
            (true, false) => Phase::MinusOne,
            (true, true) => Phase::MinusI,
        };
        Ok(PauliString::from_classes(&classes).with_phase(phase))
    }
}

/// Parse a Pauli string from its text form.
pub fn parse_pauli(text: &str) -> Result<PauliString> {
    text.parse()
}

/// Canonical text form of a Pauli string.
pub fn format_pauli(p: &PauliString) -> String {
    p.to_string()
}

/// Two-bit Bell-state label: Φ+=00, Ψ+=01, Φ-=10, Ψ-=11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct BellLabel(u8);

impl BellLabel {
    pub const PHI_PLUS: BellLabel = BellLabel(0b00);
    pub const PSI_PLUS: BellLabel = BellLabel(0b01);
    pub const PHI_MINUS: BellLabel = BellLabel(0b10);
    pub const PSI_MINUS: BellLabel = BellLabel(0b11);
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PHI_PLUS,
        BellLabel::PSI_PLUS,
        BellLabel::PHI_MINUS,
        BellLabel::PSI_MINUS,
    ];

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits > 0b11 {
            return Err(Error::Validation(format!("Bell label bits out of range: {bits}")));
        }
        Ok(BellLabel(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for BellLabel {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        BellLabel::from_bits(v)
    }
}

impl From<BellLabel> for u8 {
    fn from(l: BellLabel) -> u8 {
        l.0
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (self.0 >> 1) & 1, self.0 & 1)
    }
}

/// Error class `e` such that `(e ⊗ I)|Ψ-⟩` is proportional to the Bell state
/// named by `label`. The standard pair Ψ- carries no error.
pub fn bell_label_to_error(label: BellLabel) -> Pauli {
    match label {
        BellLabel::PSI_MINUS => Pauli::I,
        BellLabel::PHI_MINUS => Pauli::X,
        BellLabel::PHI_PLUS => Pauli::Y,
        BellLabel::PSI_PLUS => Pauli::Z,
        _ => unreachable!(),
    }
}

/// Inverse of [`bell_label_to_error`].
pub fn error_to_bell_label(e: Pauli) -> BellLabel {
    match e {
        Pauli::I => BellLabel::PSI_MINUS,
        Pauli::X => BellLabel::PHI_MINUS,
        Pauli::Y => BellLabel::PHI_PLUS,
        Pauli::Z => BellLabel::PSI_PLUS,
    }
}

/// Bell-basis label per pair; the 2N-bit classical description of an
/// N-pair error pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellPattern {
    labels: Vec<BellLabel>,
}

impl BellPattern {
    pub fn new(labels: Vec<BellLabel>) -> Self {
        Self { labels }
    }

    /// The no-error pattern: every pair in Ψ-.
    pub fn all_singlet(n_pairs: usize) -> Self {
        Self { labels: vec![BellLabel::PSI_MINUS; n_pairs] }
    }

    pub fn from_error_classes(classes: &[Pauli]) -> Self {
        Self { labels: classes.iter().map(|&c| error_to_bell_label(c)).collect() }
    }

    pub fn n_pairs(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BellLabel] {
        &self.labels
    }

    pub fn label(&self, pair: usize) -> BellLabel {
        self.labels[pair]
    }

    /// Per-pair error classes relative to Ψ-.
    pub fn error_classes(&self) -> Vec<Pauli> {
        self.labels.iter().map(|&l| bell_label_to_error(l)).collect()
    }

    pub fn error_string(&self) -> PauliString {
        PauliString::from_classes(&self.error_classes())
    }

    /// Count of pairs still in the standard state.
    pub fn singlet_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == BellLabel::PSI_MINUS).count()
    }

    pub fn nontrivial_count(&self) -> usize {
        self.n_pairs() - self.singlet_count()
    }

    /// Hex encoding of the 2N-bit string, pair 0 in the two most significant
    /// bits, right-padded with zeros to a nibble boundary.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.labels.len().div_ceil(2));
        let mut nibble = 0u8;
        let mut filled = 0;
        for &l in &self.labels {
            nibble = (nibble << 2) | l.bits();
            filled += 2;
            if filled == 4 {
                out.push(char::from_digit(u32::from(nibble), 16).unwrap());
                nibble = 0;
                filled = 0;
            }
        }
        if filled > 0 {
            nibble <<= 4 - filled;
            out.push(char::from_digit(u32::from(nibble), 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, n_pairs: usize) -> Result<Self> {
        let expected = (2 * n_pairs).div_ceil(4);
        if hex.len() != expected {
            return Err(Error::Parse {
                position: hex.len().min(expected),
                message: format!("expected {expected} hex digits for {n_pairs} pairs"),
            });
        }
        let mut labels = Vec::with_capacity(n_pairs);
        for (i, ch) in hex.chars().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| Error::Parse {
                position: i,
                message: format!("invalid hex digit {ch:?}"),
            })? as u8;
            for shift in [2u8, 0u8] {
                if labels.len() < n_pairs {
                    labels.push(BellLabel((v >> shift) & 0b11));
                }
            }
        }
        Ok(Self { labels })
    }
}

impl Serialize for BellPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            n_pairs: usize,
            hex: &'a str,
        }
        Wire { n_pairs: self.n_pairs(), hex: &self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BellPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n_pairs: usize,
            hex: String,
        }
        let w = Wire::deserialize(d)?;
        BellPattern::from_hex(&w.hex, w.n_pairs).map_err(serde::de::Error::custom)
    }
}
