//! Exact state-vector simulation for small registers.
//!
//! This is the ground-truth path: every frame-level shortcut elsewhere in the
//! crate is validated against amplitudes computed here. Registers are capped
//! (default 12 qubits) because the scalable path handles large pair counts.
//!
//! Conventions: qubit `q` is bit `q` of the basis index (qubit 0 is the least
//! significant bit). Mixed states are pure-state ensembles, never density
//! matrices. Global phase is physically meaningless; comparisons go through
//! [`StateVector::equiv_up_to_phase`].

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{bell_label_to_error, conjugate, Axis, BellLabel, Pauli, PauliString};

/// Default register cap; 2 payload + 2 ancilla + 4 pair + 4 Eve qubits cover
/// every two-pair configuration exactly.
pub const DEFAULT_QUBIT_CAP: usize = 12;

const NORM_TOL: f64 = 1e-12;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::zero_state_with_cap(n, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_state_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 || n > cap {
            return Err(Error::Validation(format!(
                "register size {n} outside supported range 1..={cap}"
            )));
        }
        let mut amps = vec![c64(0.0, 0.0); 1 << n];
        amps[0] = c64(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Basis state |index⟩.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(n)?;
        if index >= s.amps.len() {
            return Err(Error::Validation(format!("basis index {index} out of range")));
        }
        s.amps[0] = c64(0.0, 0.0);
        s.amps[index] = c64(1.0, 0.0);
        Ok(s)
    }

    /// Build from explicit amplitudes; the L2 norm must be 1 within 1e-12.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Validation(format!("amplitude count {len} is not 2^n")));
        }
        let n = len.trailing_zeros() as usize;
        let s = Self { n_qubits: n, amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("state norm {norm} deviates from 1")));
        }
        Ok(s)
    }

    fn raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Physical equivalence: |⟨self|other⟩| ≥ 1 - tol.
    pub fn equiv_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        match self.inner(other) {
            Ok(ip) => ip.norm() >= 1.0 - tol,
            Err(_) => false,
        }
    }

    /// Tensor product; `self` keeps qubits `0..n`, `other` is shifted up.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        if n > 2 * DEFAULT_QUBIT_CAP {
            return Err(Error::Validation(format!("tensor register too large: {n}")));
        }
        let mask = (1usize << self.n_qubits) - 1;
        let amps = (0..1usize << n)
            .map(|idx| self.amps[idx & mask] * other.amps[idx >> self.n_qubits])
            .collect();
        Ok(Self { n_qubits: n, amps })
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        let mut seen = 0usize;
        for &t in targets {
            if t >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: t, n_qubits: self.n_qubits });
            }
            if seen & (1 << t) != 0 {
                return Err(Error::Validation(format!("duplicate target qubit {t}")));
            }
            seen |= 1 << t;
        }
        Ok(())
    }

    /// Apply a Pauli operator, qubit `k` of `p` acting on `targets[k]`.
    /// Exact amplitude-level action including the operator phase.
    pub fn apply_pauli(&self, p: &PauliString, targets: &[usize]) -> Result<Self> {
        if p.n_qubits() != targets.len() {
            return Err(Error::DimensionMismatch { left: p.n_qubits(), right: targets.len() });
        }
        self.check_targets(targets)?;
        let mut x_mask = 0usize;
        // (mask, class) for phase-carrying classes
        let mut phased: Vec<(usize, Pauli)> = Vec::new();
        for (k, &t) in targets.iter().enumerate() {
            let cls = p.class_at(k);
            let (x, z) = cls.bits();
            if x {
                x_mask |= 1 << t;
            }
            if z {
                phased.push((1 << t, cls));
            }
        }
        let global = p.phase().as_complex();
        let mut amps = vec![c64(0.0, 0.0); self.amps.len()];
        for (idx, out) in amps.iter_mut().enumerate() {
            let src = idx ^ x_mask;
            let mut factor = global;
            for &(mask, cls) in &phased {
                let bit = idx & mask != 0;
                factor *= match cls {
                    // Z|b⟩ = (-1)^b |b⟩
                    Pauli::Z => {
                        if bit {
                            c64(-1.0, 0.0)
                        } else {
                            c64(1.0, 0.0)
                        }
                    }
                    // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
                    Pauli::Y => {
                        if bit {
                            c64(0.0, 1.0)
                        } else {
                            c64(0.0, -1.0)
                        }
                    }
                    _ => unreachable!(),
                };
            }
            *out = factor * self.amps[src];
        }
        Ok(Self { n_qubits: self.n_qubits, amps })
    }

    /// Apply a 2^k x 2^k unitary to `targets` (sub-index bit `t` is
    /// `targets[t]`).
    pub fn apply_unitary(&self, m: &CMatrix, targets: &[usize]) -> Result<Self> {
        let k = targets.len();
        if m.dim() != 1 << k {
            return Err(Error::DimensionMismatch { left: m.dim(), right: 1 << k });
        }
        self.check_targets(targets)?;
        let mut amps = self.amps.clone();
        let target_mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let mut old = vec![c64(0.0, 0.0); 1 << k];
        for base in 0..self.amps.len() {
            if base & target_mask != 0 {
                continue;
            }
            for sub in 0..1usize << k {
                let mut idx = base;
                for (t, &q) in targets.iter().enumerate() {
                    if sub & (1 << t) != 0 {
                        idx |= 1 << q;
                    }
                }
                old[sub] = amps[idx];
            }
            for row in 0..1usize << k {
                let mut acc = c64(0.0, 0.0);
                for (col, &amp) in old.iter().enumerate() {
                    acc += m.at(row, col) * amp;
                }
                let mut idx = base;
                for (t, &q) in targets.iter().enumerate() {
                    if row & (1 << t) != 0 {
                        idx |= 1 << q;
                    }
                }
                amps[idx] = acc;
            }
        }
        Ok(Self { n_qubits: self.n_qubits, amps })
    }

    fn normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
        self
    }

    /// Debug dump: one `basis_index,re,im` row per amplitude.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis_index,re,im\n");
        for (idx, a) in self.amps.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", idx, a.re, a.im));
        }
        out
    }
}

/// Haar-ish random pure state: normalized complex Gaussian amplitudes.
pub fn random_state(n: usize, rng: &mut impl Rng) -> Result<StateVector> {
    let mut s = StateVector::zero_state(n)?;
    for a in &mut s.amps {
        *a = c64(standard_normal(rng), standard_normal(rng));
    }
    Ok(s.normalized())
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; u clamped away from zero.
    let u: f64 = rng.random::<f64>().max(1e-300);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Dense complex matrix (row-major), serialized as nested `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Validation(format!(
                "matrix data length {} does not match dim {dim}",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![c64(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c64(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Max-entry deviation of U†U from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = c64(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.at(k, i).conj() * self.at(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - c64(expect, 0.0)).norm());
            }
        }
        worst
    }

    pub fn validate_unitary(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tol {
            return Err(Error::Validation(format!(
                "matrix is not unitary: defect {defect:.3e} exceeds {tol:.1e}"
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for CMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::Validation("matrix is not square".into()));
            }
            for &[re, im] in row {
                data.push(c64(re, im));
            }
        }
        CMatrix::new(dim, data)
    }
}

impl From<CMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: CMatrix) -> Self {
        (0..m.dim)
            .map(|r| (0..m.dim).map(|c| [m.at(r, c).re, m.at(r, c).im]).collect())
            .collect()
    }
}

/// Haar-distributed random unitary via Gram-Schmidt on a complex Gaussian
/// matrix.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| c64(standard_normal(rng), standard_normal(rng))).collect())
        .collect();
    for i in 0..dim {
        for j in 0..i {
            let proj: Complex64 =
                cols[j].iter().zip(&cols[i]).map(|(a, b)| a.conj() * b).sum();
            for k in 0..dim {
                let d = proj * cols[j][k];
                cols[i][k] -= d;
            }
        }
        let norm: f64 = cols[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for v in &mut cols[i] {
            *v /= norm;
        }
    }
    let mut data = vec![c64(0.0, 0.0); dim * dim];
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            data[i * dim + j] = v;
        }
    }
    CMatrix { dim, data }
}

// ---------------------------------------------------------------------------
// Measurements
// ---------------------------------------------------------------------------

/// Projection of `s` onto the ±1 eigenspace of the Pauli `axis` on qubit `q`.
/// Returns the Born probability and the normalized post-measurement state
/// (None when the branch has zero weight).
pub fn project_axis(
    s: &StateVector,
    q: usize,
    axis: Axis,
    outcome: i8,
) -> Result<(f64, Option<StateVector>)> {
    if q >= s.n_qubits() {
        return Err(Error::QubitOutOfRange { index: q, n_qubits: s.n_qubits() });
    }
    let sigma = PauliString::from_classes(&[axis.as_pauli()]);
    let rotated = s.apply_pauli(&sigma, &[q])?;
    let sign = if outcome >= 0 { 1.0 } else { -1.0 };
    let amps: Vec<Complex64> = s
        .amps
        .iter()
        .zip(&rotated.amps)
        .map(|(a, b)| 0.5 * (a + sign * b))
        .collect();
    let branch = StateVector::raw(s.n_qubits(), amps);
    let prob = branch.norm().powi(2);
    if prob < 1e-30 {
        Ok((prob, None))
    } else {
        Ok((prob, Some(branch.normalized())))
    }
}

/// Born-rule measurement of qubit `q` along `axis`.
pub fn measure_axis(
    s: &StateVector,
    q: usize,
    axis: Axis,
    rng: &mut impl Rng,
) -> Result<(i8, StateVector)> {
    let (p_plus, up) = project_axis(s, q, axis, 1)?;
    if rng.random::<f64>() < p_plus {
        Ok((1, up.expect("positive-probability branch has a state")))
    } else {
        let (_, down) = project_axis(s, q, axis, -1)?;
        Ok((-1, down.expect("positive-probability branch has a state")))
    }
}

/// Canonical two-qubit Bell state for `label`, qubit 0 = Alice's member,
/// qubit 1 = Bob's member.
pub fn bell_state(label: BellLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // index = alice_bit + 2 * bob_bit
    let amps = match label {
        BellLabel::PHI_PLUS => vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(h, 0.0)],
        BellLabel::PSI_PLUS => vec![c64(0.0, 0.0), c64(h, 0.0), c64(h, 0.0), c64(0.0, 0.0)],
        BellLabel::PHI_MINUS => vec![c64(h, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-h, 0.0)],
        BellLabel::PSI_MINUS => vec![c64(0.0, 0.0), c64(-h, 0.0), c64(h, 0.0), c64(0.0, 0.0)],
        _ => unreachable!(),
    };
    StateVector::raw(2, amps)
}

/// |Ψ-⟩^⊗N placed at the given (alice, bob) positions of an `n`-qubit
/// register, |0⟩ elsewhere.
pub fn singlet_chain(n: usize, pairs: &[(usize, usize)]) -> Result<StateVector> {
    let mut parts: Vec<(Vec<usize>, StateVector)> = Vec::new();
    let mut used = vec![false; n];
    for &(a, b) in pairs {
        parts.push((vec![a, b], bell_state(BellLabel::PSI_MINUS)));
        for q in [a, b] {
            if q >= n || used[q] {
                return Err(Error::Validation(format!("bad pair qubit {q}")));
            }
            used[q] = true;
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&q| !used[q]).collect();
    if !rest.is_empty() {
        let zero = StateVector::zero_state_with_cap(rest.len(), DEFAULT_QUBIT_CAP)?;
        parts.push((rest, zero));
    }
    let part_refs: Vec<(&[usize], &StateVector)> =
        parts.iter().map(|(p, s)| (p.as_slice(), s)).collect();
    embed_product(n, &part_refs)
}

/// Assemble a full-register state as a product of parts, each part giving a
/// sub-state and the full-register positions of its qubits (sub qubit `t` at
/// `positions[t]`). Positions must partition `0..n`.
pub fn embed_product(n: usize, parts: &[(&[usize], &StateVector)]) -> Result<StateVector> {
    let mut seen = vec![false; n];
    for (positions, state) in parts {
        if positions.len() != state.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: positions.len(),
                right: state.n_qubits(),
            });
        }
        for &p in *positions {
            if p >= n || seen[p] {
                return Err(Error::Validation(format!("bad or duplicate position {p}")));
            }
            seen[p] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::Validation("positions do not cover the register".into()));
    }
    let mut amps = vec![c64(1.0, 0.0); 1 << n];
    for (idx, amp) in amps.iter_mut().enumerate() {
        for (positions, state) in parts {
            let mut sub = 0usize;
            for (t, &p) in positions.iter().enumerate() {
                if idx & (1 << p) != 0 {
                    sub |= 1 << t;
                }
            }
            *amp *= state.amps[sub];
        }
    }
    Ok(StateVector::raw(n, amps))
}

/// Partial inner product ⟨sub|big⟩ over `sub_positions`, returning the
/// residual (unnormalized) coefficients over the complement qubits, indexed
/// by the complement positions in ascending order.
pub fn partial_inner(
    big: &StateVector,
    sub: &StateVector,
    sub_positions: &[usize],
) -> Result<Vec<Complex64>> {
    if sub.n_qubits() != sub_positions.len() {
        return Err(Error::DimensionMismatch {
            left: sub.n_qubits(),
            right: sub_positions.len(),
        });
    }
    big.check_targets(sub_positions)?;
    let comp: Vec<usize> =
        (0..big.n_qubits()).filter(|q| !sub_positions.contains(q)).collect();
    let mut out = vec![c64(0.0, 0.0); 1 << comp.len()];
    for (idx, &amp) in big.amps.iter().enumerate() {
        let mut sub_idx = 0usize;
        for (t, &p) in sub_positions.iter().enumerate() {
            if idx & (1 << p) != 0 {
                sub_idx |= 1 << t;
            }
        }
        let mut comp_idx = 0usize;
        for (t, &p) in comp.iter().enumerate() {
            if idx & (1 << p) != 0 {
                comp_idx |= 1 << t;
            }
        }
        out[comp_idx] += sub.amps[sub_idx].conj() * amp;
    }
    Ok(out)
}

/// Projection of the pair `(a, b)` onto the Bell state `label`.
/// Returns the Born probability and the normalized projected state.
pub fn bell_project(
    s: &StateVector,
    pair: (usize, usize),
    label: BellLabel,
) -> Result<(f64, Option<StateVector>)> {
    let branch = bell_project_raw(s, pair, label)?;
    let prob = branch.norm().powi(2);
    if prob < 1e-30 {
        Ok((prob, None))
    } else {
        Ok((prob, Some(branch.normalized())))
    }
}

fn bell_project_raw(
    s: &StateVector,
    pair: (usize, usize),
    label: BellLabel,
) -> Result<StateVector> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::Validation("pair qubits must be distinct".into()));
    }
    let bell = bell_state(label);
    let coeff = partial_inner(s, &bell, &[a, b])?;
    let comp: Vec<usize> = (0..s.n_qubits()).filter(|&q| q != a && q != b).collect();
    let mut amps = vec![c64(0.0, 0.0); s.amps.len()];
    for (idx, out) in amps.iter_mut().enumerate() {
        let mut sub_idx = 0usize;
        if idx & (1 << a) != 0 {
            sub_idx |= 1;
        }
        if idx & (1 << b) != 0 {
            sub_idx |= 2;
        }
        let mut comp_idx = 0usize;
        for (t, &p) in comp.iter().enumerate() {
            if idx & (1 << p) != 0 {
                comp_idx |= 1 << t;
            }
        }
        *out = bell.amps[sub_idx] * coeff[comp_idx];
    }
    Ok(StateVector::raw(s.n_qubits(), amps))
}

/// Born-rule Bell measurement of the pair `(a, b)`.
pub fn bell_measure(
    s: &StateVector,
    pair: (usize, usize),
    rng: &mut impl Rng,
) -> Result<(BellLabel, StateVector)> {
    let mut branches = Vec::with_capacity(4);
    for &label in &BellLabel::ALL {
        branches.push(bell_project(s, pair, label)?);
    }
    let draw: f64 = rng.random();
    let mut acc = 0.0;
    for (&label, (prob, state)) in BellLabel::ALL.iter().zip(branches.into_iter()) {
        acc += prob;
        if draw < acc {
            let state = state.ok_or_else(|| {
                Error::Validation("sampled a zero-norm measurement branch".into())
            })?;
            return Ok((label, state));
        }
    }
    // numerical leftover: take the heaviest branch
    let mut best = None;
    let mut best_p = -1.0;
    for &label in &BellLabel::ALL {
        let (p, st) = bell_project(s, pair, label)?;
        if p > best_p {
            best_p = p;
            best = st.map(|st| (label, st));
        }
    }
    best.ok_or_else(|| Error::Validation("no positive-probability Bell branch".into()))
}

/// Joint outcome probabilities (parallel, anti-parallel) for measuring both
/// members of `pair` along `axis`.
pub fn pair_correlation_probs(
    s: &StateVector,
    pair: (usize, usize),
    axis: Axis,
) -> Result<(f64, f64)> {
    let (a, b) = pair;
    let mut parallel = 0.0;
    let mut anti = 0.0;
    for oa in [1i8, -1] {
        let (pa, state_a) = project_axis(s, a, axis, oa)?;
        let Some(state_a) = state_a else { continue };
        for ob in [1i8, -1] {
            let (pb, _) = project_axis(&state_a, b, axis, ob)?;
            let joint = pa * pb;
            if oa == ob {
                parallel += joint;
            } else {
                anti += joint;
            }
        }
    }
    Ok((parallel, anti))
}

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

/// Mixed state as a pure-state ensemble.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, StateVector)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Validation("ensemble needs at least one member".into()));
        }
        let n = members[0].1.n_qubits();
        let mut total = 0.0;
        for (p, s) in &members {
            if *p < 0.0 {
                return Err(Error::Validation(format!("negative probability {p}")));
            }
            if s.n_qubits() != n {
                return Err(Error::DimensionMismatch { left: s.n_qubits(), right: n });
            }
            total += p;
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("ensemble weight {total} deviates from 1")));
        }
        Ok(Self { members })
    }

    pub fn pure(s: StateVector) -> Self {
        Self { members: vec![(1.0, s)] }
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].1.n_qubits()
    }

    /// Ensemble average of an observable evaluated per member.
    pub fn expect<F: FnMut(&StateVector) -> Result<f64>>(&self, mut f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (p, s) in &self.members {
            acc += p * f(s)?;
        }
        Ok(acc)
    }
}

/// Complete von Neumann measurement along the N-Bell basis of `pairs`,
/// with the outcome forgotten: every member splits into its Bell-pattern
/// branches and all coherence between distinct patterns is removed.
/// Qubits outside `pairs` (e.g. Eve's ancilla) are untouched.
pub fn bell_dephase(e: &Ensemble, pairs: &[(usize, usize)]) -> Result<Ensemble> {
    let n_pairs = pairs.len();
    let mut members = Vec::new();
    for (p, s) in e.members() {
        for pattern in 0..(1usize << (2 * n_pairs)) {
            let mut branch = s.clone();
            let mut dead = false;
            for (k, &pair) in pairs.iter().enumerate() {
                let bits = ((pattern >> (2 * k)) & 0b11) as u8;
                let label = BellLabel::from_bits(bits).expect("two bits");
                branch = bell_project_raw(&branch, pair, label)?;
                if branch.norm() < 1e-16 {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            let w = branch.norm().powi(2);
            if w > 1e-24 {
                members.push((p * w, branch.normalized()));
            }
        }
    }
    Ensemble::new(members)
}

/// Ensemble-target fidelity Σ p_i |⟨target|ψ_i⟩|².
pub fn fidelity(e: &Ensemble, target: &StateVector) -> Result<f64> {
    let mut acc = 0.0;
    for (p, s) in e.members() {
        acc += p * target.inner(s)?.norm_sqr();
    }
    Ok(acc)
}

/// Fidelity ⟨target|ρ_sub|target⟩ of the reduced state on `qubits`.
pub fn fidelity_on(e: &Ensemble, target: &StateVector, qubits: &[usize]) -> Result<f64> {
    let mut acc = 0.0;
    for (p, s) in e.members() {
        let coeff = partial_inner(s, target, qubits)?;
        acc += p * coeff.iter().map(|c| c.norm_sqr()).sum::<f64>();
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Teleportation
// ---------------------------------------------------------------------------

/// Role of one register qubit in a teleportation experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitRole {
    Payload,
    AncillaR,
    AlicePair,
    BobPair,
    EveAncilla,
}

/// Role assignment for every qubit of a register. Signal `k` is the k-th
/// payload qubit (ascending index) and is wired to the k-th Alice/Bob pair.
#[derive(Debug, Clone)]
pub struct RegisterLayout {
    roles: Vec<QubitRole>,
}

impl RegisterLayout {
    pub fn new(roles: Vec<QubitRole>) -> Result<Self> {
        let layout = Self { roles };
        let (p, a, b) = (
            layout.of_role(QubitRole::Payload).len(),
            layout.of_role(QubitRole::AlicePair).len(),
            layout.of_role(QubitRole::BobPair).len(),
        );
        if p == 0 || p != a || p != b {
            return Err(Error::Config(format!(
                "incomplete teleport wiring: {p} payload, {a} alice, {b} bob qubits"
            )));
        }
        Ok(layout)
    }

    fn of_role(&self, role: QubitRole) -> Vec<usize> {
        (0..self.roles.len()).filter(|&q| self.roles[q] == role).collect()
    }

    pub fn n_qubits(&self) -> usize {
        self.roles.len()
    }

    pub fn n_signals(&self) -> usize {
        self.of_role(QubitRole::Payload).len()
    }

    pub fn payload(&self) -> Vec<usize> {
        self.of_role(QubitRole::Payload)
    }

    pub fn ancilla_r(&self) -> Vec<usize> {
        self.of_role(QubitRole::AncillaR)
    }

    pub fn alice(&self) -> Vec<usize> {
        self.of_role(QubitRole::AlicePair)
    }

    pub fn bob(&self) -> Vec<usize> {
        self.of_role(QubitRole::BobPair)
    }

    pub fn eve(&self) -> Vec<usize> {
        self.of_role(QubitRole::EveAncilla)
    }
}

/// Outcome of a dense teleportation run.
#[derive(Debug, Clone)]
pub struct DenseTeleport {
    pub outcomes: Vec<BellLabel>,
    pub state: StateVector,
}

fn correction_for(label: BellLabel) -> PauliString {
    PauliString::from_classes(&[bell_label_to_error(label)])
}

/// Teleport the payload qubits through the shared pairs: Bell-measure
/// (payload_k, alice_k), then apply the correction class named by the
/// outcome label to bob_k. The measurement-to-correction dictionary is the
/// same table as [`bell_label_to_error`].
pub fn teleport_dense(
    s: &StateVector,
    layout: &RegisterLayout,
    rng: &mut impl Rng,
) -> Result<DenseTeleport> {
    check_layout(s, layout)?;
    let payload = layout.payload();
    let alice = layout.alice();
    let bob = layout.bob();
    let mut state = s.clone();
    let mut outcomes = Vec::with_capacity(payload.len());
    for k in 0..payload.len() {
        let (label, next) = bell_measure(&state, (payload[k], alice[k]), rng)?;
        state = next.apply_pauli(&correction_for(label), &[bob[k]])?;
        outcomes.push(label);
    }
    Ok(DenseTeleport { outcomes, state })
}

/// Deterministic-branch teleportation: condition every Bell measurement on
/// the given outcome labels. Returns the branch probability and the final
/// state (None for zero-probability branches).
pub fn teleport_dense_forced(
    s: &StateVector,
    layout: &RegisterLayout,
    outcomes: &[BellLabel],
) -> Result<(f64, Option<StateVector>)> {
    check_layout(s, layout)?;
    let payload = layout.payload();
    let alice = layout.alice();
    let bob = layout.bob();
    if outcomes.len() != payload.len() {
        return Err(Error::DimensionMismatch { left: outcomes.len(), right: payload.len() });
    }
    let mut state = s.clone();
    let mut prob = 1.0;
    for k in 0..payload.len() {
        let (p, next) = bell_project(&state, (payload[k], alice[k]), outcomes[k])?;
        prob *= p;
        match next {
            Some(next) => state = next.apply_pauli(&correction_for(outcomes[k]), &[bob[k]])?,
            None => return Ok((0.0, None)),
        }
    }
    Ok((prob, Some(state)))
}

fn check_layout(s: &StateVector, layout: &RegisterLayout) -> Result<()> {
    if s.n_qubits() != layout.n_qubits() {
        return Err(Error::Config(format!(
            "layout covers {} qubits but register has {}",
            layout.n_qubits(),
            s.n_qubits()
        )));
    }
    Ok(())
}

/// A teleportation experiment built from an explicit payload and resource.
///
/// The payload register holds the signal qubits plus any ancilla they are
/// entangled with; the resource register holds the shared pairs plus any Eve
/// ancilla. [`assemble`](Self::assemble) produces the combined register
/// (payload qubits first) together with its role layout.
#[derive(Debug, Clone)]
pub struct TeleportSetup {
    pub payload: StateVector,
    pub payload_signals: Vec<usize>,
    pub resource: StateVector,
    pub resource_pairs: Vec<(usize, usize)>,
}

impl TeleportSetup {
    pub fn n_signals(&self) -> usize {
        self.payload_signals.len()
    }

    pub fn assemble(&self) -> Result<(StateVector, RegisterLayout)> {
        if self.payload_signals.len() != self.resource_pairs.len() {
            return Err(Error::Config(format!(
                "{} signals but {} pairs",
                self.payload_signals.len(),
                self.resource_pairs.len()
            )));
        }
        let np = self.payload.n_qubits();
        let full = self.payload.tensor(&self.resource)?;
        let mut roles = vec![QubitRole::AncillaR; np];
        for &q in &self.payload_signals {
            roles[q] = QubitRole::Payload;
        }
        let mut resource_roles = vec![QubitRole::EveAncilla; self.resource.n_qubits()];
        for &(a, b) in &self.resource_pairs {
            resource_roles[a] = QubitRole::AlicePair;
            resource_roles[b] = QubitRole::BobPair;
        }
        roles.extend(resource_roles);
        // signal k must be the k-th payload qubit and wired to pair k
        let layout = RegisterLayout::new(roles)?;
        let mut want_payload = self.payload_signals.clone();
        want_payload.sort_unstable();
        if want_payload != self.payload_signals {
            return Err(Error::Config("payload_signals must be ascending".into()));
        }
        let mut want_pairs: Vec<usize> = self.resource_pairs.iter().map(|&(a, _)| a + np).collect();
        want_pairs.sort_unstable();
        if want_pairs != layout.alice() {
            return Err(Error::Config("resource_pairs must be ascending in alice index".into()));
        }
        Ok((full, layout))
    }

    /// Closed-form post-teleportation state for outcome labels `{j_k}`:
    /// every error pattern of the resource keeps its coefficient while its
    /// per-signal error is conjugated by the corrections. Returns the branch
    /// probability and the normalized state on the assembled register,
    /// computed without running any measurement.
    pub fn reference_state(&self, outcomes: &[BellLabel]) -> Result<(f64, Option<StateVector>)> {
        let n = self.n_signals();
        if outcomes.len() != n {
            return Err(Error::DimensionMismatch { left: outcomes.len(), right: n });
        }
        let (full, layout) = self.assemble()?;
        let total = full.n_qubits();
        let np = self.payload.n_qubits();

        // resource-register positions
        let pair_positions: Vec<usize> = self
            .resource_pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .collect();
        let eve_positions_res: Vec<usize> = (0..self.resource.n_qubits())
            .filter(|q| !pair_positions.contains(q))
            .collect();
        let n_eve = eve_positions_res.len();

        // full-register positions
        let bob_full = layout.bob();
        let eve_full: Vec<usize> = eve_positions_res.iter().map(|&q| q + np).collect();
        let measured_full: Vec<Vec<usize>> = self
            .resource_pairs
            .iter()
            .zip(&self.payload_signals)
            .map(|(&(a, _), &s)| vec![s, a + np])
            .collect();

        // payload-register part positions after relocation: signal k moves to
        // bob_full[k], every other payload qubit stays put.
        let mut relocated: Vec<usize> = (0..np).collect();
        for (k, &s) in self.payload_signals.iter().enumerate() {
            relocated[s] = bob_full[k];
        }

        let mut total_amps = vec![c64(0.0, 0.0); 1 << total];
        let singlets = singlet_chain_state(n)?;
        for pattern in 0..(1usize << (2 * n)) {
            let classes: Vec<Pauli> = (0..n)
                .map(|k| {
                    let bits = ((pattern >> (2 * (n - 1 - k))) & 0b11) as u8;
                    bell_label_to_error(BellLabel::from_bits(bits).expect("two bits"))
                })
                .collect();
            // B_i on [alice_0, bob_0, alice_1, bob_1, ...]
            let err = PauliString::from_classes(&classes);
            let bob_sub: Vec<usize> = (0..n).map(|k| 2 * k + 1).collect();
            let b_i = singlets.apply_pauli(&err, &bob_sub)?;
            let chi = partial_inner(&self.resource, &b_i, &pair_positions)?;
            let weight: f64 = chi.iter().map(|v| v.norm_sqr()).sum();
            if weight < 1e-30 {
                continue;
            }

            // conjugated error with exact phase
            let mut op = PauliString::identity(n);
            for (k, &cls) in classes.iter().enumerate() {
                let j = PauliString::from_classes(&[bell_label_to_error(outcomes[k])]);
                let i = PauliString::from_classes(&[cls]);
                let conj = conjugate(&j, &i)?;
                let single = PauliString::single(n, k, conj.class_at(0))?
                    .with_phase(conj.phase());
                op = op.mul(&single)?;
            }
            let moved = self.payload.apply_pauli(&op, &self.payload_signals)?;

            // assemble this pattern's term on the full register
            let chi_state = StateVector::raw(n_eve.max(1), pad_coeffs(&chi, n_eve));
            let mut parts: Vec<(Vec<usize>, StateVector)> = Vec::new();
            parts.push((relocated.clone(), moved));
            for (k, positions) in measured_full.iter().enumerate() {
                parts.push((positions.clone(), bell_state(outcomes[k])));
            }
            if n_eve > 0 {
                parts.push((eve_full.clone(), chi_state));
            }
            let part_refs: Vec<(&[usize], &StateVector)> =
                parts.iter().map(|(p, s)| (p.as_slice(), s)).collect();
            let term = embed_product(total, &part_refs)?;
            for (acc, v) in total_amps.iter_mut().zip(&term.amps) {
                *acc += v;
            }
        }
        let expr = StateVector::raw(total, total_amps);
        let norm_sqr = expr.norm().powi(2);
        let prob = norm_sqr / 4f64.powi(n as i32);
        if norm_sqr < 1e-24 {
            Ok((prob, None))
        } else {
            Ok((prob, Some(expr.normalized())))
        }
    }
}

/// |Ψ-⟩^⊗N on a 2N-qubit register ordered [alice_0, bob_0, alice_1, ...].
fn singlet_chain_state(n: usize) -> Result<StateVector> {
    let pairs: Vec<(usize, usize)> = (0..n).map(|k| (2 * k, 2 * k + 1)).collect();
    singlet_chain(2 * n, &pairs)
}

fn pad_coeffs(chi: &[Complex64], n_eve: usize) -> Vec<Complex64> {
    if n_eve == 0 {
        // scalar coefficient carried on a dummy 1-qubit factor
        vec![chi[0], c64(0.0, 0.0)]
    } else {
        chi.to_vec()
    }
}
