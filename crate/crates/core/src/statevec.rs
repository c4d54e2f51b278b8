// Copyright 2026 The rio-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Labelled multi-qubit pure states.
//!
//! A [`StateVector`] carries an explicit label sequence (its "space
//! structure"). Index bit `j`, counted from the most significant end,
//! belongs to `labels[j]`. Gates are applied to arbitrary label subsets by
//! index arithmetic; the full `2^Q` matrix of an embedded gate is only built
//! by [`DenseOperator::embed`], which exists for cross-checks.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::par;
use crate::{Error, Result};

/// Tolerance for normalization and equality checks.
pub const NORM_TOL: f64 = 1e-12;

/// Forced outcomes with probability below this are rejected.
pub const MIN_FORCED_PROB: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which party or register a qubit belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Alice's half of a shared Bell pair.
    A,
    /// Bob's half of a shared Bell pair.
    B,
    /// Bob's unknown input register.
    Y,
}

/// A qubit label such as `A1`, `B2` or `Y3` (1-based index).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub role: Role,
    pub index: u32,
}

impl Label {
    pub const fn new(role: Role, index: u32) -> Self {
        Label { role, index }
    }
    pub const fn a(index: u32) -> Self {
        Label::new(Role::A, index)
    }
    pub const fn b(index: u32) -> Self {
        Label::new(Role::B, index)
    }
    pub const fn y(index: u32) -> Self {
        Label::new(Role::Y, index)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.role {
            Role::A => 'A',
            Role::B => 'B',
            Role::Y => 'Y',
        };
        write!(f, "{}{}", r, self.index)
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Parses `A1`, `b2`, `Y10`; a bare role letter means index 1.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let role = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Role::A,
            Some('B') => Role::B,
            Some('Y') => Role::Y,
            _ => return Err(Error::BadParameter(format!("bad qubit label {s:?}"))),
        };
        let rest = chars.as_str();
        let index = if rest.is_empty() {
            1
        } else {
            rest.parse::<u32>()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::BadParameter(format!("bad qubit label {s:?}")))?
        };
        Ok(Label { role, index })
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a compact label string such as `"A1B1A2B2"` or `"ABY"`.
pub fn parse_labels(s: &str) -> Result<Vec<Label>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in s.chars().filter(|c| !c.is_whitespace() && *c != ',') {
        if c.is_ascii_alphabetic() && !cur.is_empty() {
            out.push(cur.parse()?);
            cur.clear();
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur.parse()?);
    }
    Ok(out)
}

fn check_distinct(labels: &[Label]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(*l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// Bit shift of position `pos` in a `q`-qubit index (MSB first).
#[inline]
fn shift_of(q: usize, pos: usize) -> usize {
    q - 1 - pos
}

/// Precomputed index arithmetic for a gate on a subset of positions.
struct SubsetIndex {
    shifts: Vec<usize>,
    mask: usize,
    offsets: Vec<usize>,
}

impl SubsetIndex {
    fn new(q: usize, positions: &[usize]) -> Self {
        let k = positions.len();
        let shifts: Vec<usize> = positions.iter().map(|&p| shift_of(q, p)).collect();
        let mask = shifts.iter().fold(0usize, |m, &s| m | (1 << s));
        let offsets = (0..1usize << k)
            .map(|j| {
                shifts
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| (j >> (k - 1 - t)) & 1 == 1)
                    .fold(0usize, |acc, (_, &s)| acc | (1 << s))
            })
            .collect();
        SubsetIndex {
            shifts,
            mask,
            offsets,
        }
    }

    #[inline]
    fn local(&self, i: usize) -> usize {
        let k = self.shifts.len();
        self.shifts
            .iter()
            .enumerate()
            .fold(0usize, |acc, (t, &s)| acc | (((i >> s) & 1) << (k - 1 - t)))
    }
}

/// A pure state over an ordered set of labelled qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<Label>,
    amps: Vec<Complex64>,
}

/// Result of a single-qubit computational-basis measurement.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub outcome: u8,
    pub prob: f64,
    pub post: StateVector,
}

impl StateVector {
    /// Builds a normalized state, validating shape, labels and norm.
    pub fn new(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        let s = Self::unnormalized(labels, amps)?;
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Builds a state without the norm check. Products containing
    /// projectors (the monolithic protocol operator) produce these.
    pub fn unnormalized(labels: Vec<Label>, amps: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize
            .checked_shl(labels.len() as u32)
            .ok_or(Error::CapExceeded {
                what: "qubits",
                value: labels.len(),
                cap: usize::BITS as usize - 1,
            })?;
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: amps.len(),
            });
        }
        check_distinct(&labels)?;
        if let Some(i) = amps
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(StateVector { labels, amps })
    }

    /// Computational basis state `|bits⟩` over `labels`.
    pub fn basis_state(labels: &[Label], bits: &[u8]) -> Result<Self> {
        if bits.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                got: bits.len(),
            });
        }
        let mut idx = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::BadParameter(format!("bit value {b}")));
            }
            idx = (idx << 1) | b as usize;
        }
        let mut amps = vec![ZERO; 1 << labels.len()];
        amps[idx] = ONE;
        Self::new(labels.to_vec(), amps)
    }

    /// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2` on the two given labels.
    pub fn bell_pair(first: Label, second: Label) -> Result<Self> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(vec![first, second], vec![h, ZERO, ZERO, h])
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn position(&self, label: Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn positions(&self, targets: &[Label]) -> Result<Vec<usize>> {
        check_distinct(targets)?;
        targets.iter().map(|&t| self.position(t)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns a copy scaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let amps = self.amps.iter().map(|a| a / n).collect();
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Kronecker product; labels are concatenated `self ‖ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        if let Some(l) = self.labels.iter().find(|l| other.labels.contains(l)) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(StateVector { labels, amps })
    }

    /// Applies `op` to the qubits `targets` (in that order), identity elsewhere.
    pub fn apply_on(&self, op: &DenseOperator, targets: &[Label]) -> Result<Self> {
        let positions = self.positions(targets)?;
        if op.dim() != 1 << positions.len() {
            return Err(Error::DimensionMismatch {
                dim: op.dim(),
                qubits: positions.len(),
            });
        }
        let q = self.num_qubits();
        let sub = SubsetIndex::new(q, &positions);
        let dim = op.dim();
        let len = self.amps.len();
        let amps = par::map_indices(len, par::for_len(len), |i| {
            let row = sub.local(i);
            let base = i & !sub.mask;
            let coeffs = &op.entries[row * dim..(row + 1) * dim];
            coeffs
                .iter()
                .zip(&sub.offsets)
                .filter(|(c, _)| **c != ZERO)
                .map(|(c, &off)| c * self.amps[base | off])
                .sum()
        });
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Applies a generalized permutation to `targets`: local row `r`
    /// receives `phases[r]` times the amplitude of local column `cols[r]`.
    /// `cols` is 0-based and must be a bijection.
    pub fn apply_generalized_permutation(
        &self,
        targets: &[Label],
        cols: &[usize],
        phases: &[Complex64],
    ) -> Result<Self> {
        let positions = self.positions(targets)?;
        let dim = 1usize << positions.len();
        if cols.len() != dim || phases.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: cols.len().min(phases.len()),
            });
        }
        let mut seen = vec![false; dim];
        for &c in cols {
            if c >= dim || std::mem::replace(&mut seen[c], true) {
                return Err(Error::NotAPermutation(format!("{cols:?}")));
            }
        }
        let sub = SubsetIndex::new(self.num_qubits(), &positions);
        let len = self.amps.len();
        let amps = par::map_indices(len, par::for_len(len), |i| {
            let row = sub.local(i);
            phases[row] * self.amps[(i & !sub.mask) | sub.offsets[cols[row]]]
        });
        Ok(StateVector {
            labels: self.labels.clone(),
            amps,
        })
    }

    /// Probability that measuring `target` yields 1.
    pub fn prob_one(&self, target: Label) -> Result<f64> {
        let s = shift_of(self.num_qubits(), self.position(target)?);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> s) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of `target` in the computational basis.
    ///
    /// With `forced` set the outcome is post-selected; otherwise it is
    /// sampled from `rng`. The measured qubit stays in the register, collapsed,
    /// and the post-measurement state is renormalized.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        target: Label,
        forced: Option<u8>,
        rng: &mut R,
    ) -> Result<Measurement> {
        let pos = self.position(target)?;
        let s = shift_of(self.num_qubits(), pos);
        let total = self.norm_sqr();
        let p1 = self.prob_one(target)? / total;
        let p0 = 1.0 - p1;
        let outcome = match forced {
            Some(b) if b > 1 => return Err(Error::BadParameter(format!("bit value {b}"))),
            Some(b) => b,
            None => u8::from(rng.gen::<f64>() < p1),
        };
        let prob = if outcome == 1 { p1 } else { p0 };
        if prob < MIN_FORCED_PROB {
            return Err(Error::ForcedOutcomeImpossible {
                label: target.to_string(),
                outcome,
                prob,
            });
        }
        let scale = 1.0 / (prob * total).sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if ((i >> s) & 1) as u8 == outcome {
                    a * scale
                } else {
                    ZERO
                }
            })
            .collect();
        Ok(Measurement {
            outcome,
            prob,
            post: StateVector {
                labels: self.labels.clone(),
                amps,
            },
        })
    }

    /// `⟨self|other⟩`; label sequences must match exactly.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Largest element-wise deviation `max_i |self_i - other_i|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Amplitudes of the remaining qubits with the `fixed` qubits pinned to
    /// the given bits. Not renormalized.
    pub fn slice(&self, fixed: &[(Label, u8)]) -> Result<Self> {
        let q = self.num_qubits();
        let mut pinned_mask = 0usize;
        let mut pinned_val = 0usize;
        for &(l, b) in fixed {
            let s = shift_of(q, self.position(l)?);
            if pinned_mask & (1 << s) != 0 {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            pinned_mask |= 1 << s;
            pinned_val |= ((b & 1) as usize) << s;
        }
        let free: Vec<usize> = (0..q)
            .filter(|&p| pinned_mask & (1 << shift_of(q, p)) == 0)
            .collect();
        let labels: Vec<Label> = free.iter().map(|&p| self.labels[p]).collect();
        let sub = SubsetIndex::new(q, &free);
        let amps = sub
            .offsets
            .iter()
            .map(|&off| self.amps[pinned_val | off])
            .collect();
        Ok(StateVector { labels, amps })
    }

    /// Reads the JSON state format `{"labels": [...], "amps": [[re, im], ...]}`.
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: StateFile = serde_json::from_str(text)?;
        let amps = f
            .amps
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Self::new(f.labels, amps)
    }

    pub fn to_json_string(&self) -> String {
        let f = StateFile {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string_pretty(&f).expect("state serializes")
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    labels: Vec<Label>,
    amps: Vec<[f64; 2]>,
}

/// A dense `2^k × 2^k` operator, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if let Some(i) = entries
            .iter()
            .position(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(DenseOperator { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: r.len(),
            });
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(dim, vec![ZERO; dim * dim])
    }

    /// Identity on `k` qubits.
    pub fn identity(k: usize) -> Self {
        Self::diagonal(&vec![ONE; 1 << k]).expect("power of two")
    }

    pub fn diagonal(d: &[Complex64]) -> Result<Self> {
        let dim = d.len();
        let mut e = vec![ZERO; dim * dim];
        for (i, v) in d.iter().enumerate() {
            e[i * dim + i] = *v;
        }
        Self::new(dim, e)
    }

    /// `σ_0` (identity), `σ_1` (X), `σ_2` (Y) or `σ_3` (Z).
    pub fn pauli(i: u8) -> Result<Self> {
        let c = |re, im| Complex64::new(re, im);
        let rows = match i {
            0 => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
            1 => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
            2 => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
            3 => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
            _ => return Err(Error::BadParameter(format!("pauli index {i}"))),
        };
        Self::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[&[h, h], &[h, -h]]).expect("2x2")
    }

    /// Projector `|b⟩⟨b|`.
    pub fn projector(b: u8) -> Self {
        let mut d = [ZERO; 2];
        d[(b & 1) as usize] = ONE;
        Self::diagonal(&d).expect("2x2")
    }

    /// Swap of two neighbouring qubits.
    pub fn swap() -> Self {
        Self::from_real(&[
            &[1., 0., 0., 0.],
            &[0., 0., 1., 0.],
            &[0., 1., 0., 0.],
            &[0., 0., 0., 1.],
        ])
        .expect("4x4")
    }

    /// Controlled-NOT whose target is the first qubit and control the last,
    /// separated by `gap` idle qubits: `σ0⊗I⊗|0⟩⟨0| + σ1⊗I⊗|1⟩⟨1|`.
    pub fn separated_cnot(gap: usize) -> Self {
        let mid = Self::identity(gap);
        let a = Self::pauli(0).unwrap().kron(&mid).kron(&Self::projector(0));
        let b = Self::pauli(1).unwrap().kron(&mid).kron(&Self::projector(1));
        a.add(&b).expect("same dims")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                dim: other.dim,
                qubits: self.num_qubits(),
            });
        }
        let e = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.dim, e)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// `self · other`; zero entries of `self` are skipped.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                dim: other.dim,
                qubits: self.num_qubits(),
            });
        }
        let d = self.dim;
        let rows = par::map_indices(d, par::for_len(d * d), |r| {
            let mut out = vec![ZERO; d];
            for (k, a) in self.row(r).iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
            out
        });
        Ok(DenseOperator {
            dim: d,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (d1, d2) = (self.dim, other.dim);
        let d = d1 * d2;
        let mut e = vec![ZERO; d * d];
        for r1 in 0..d1 {
            for c1 in 0..d1 {
                let a = self.entry(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..d2 {
                    for c2 in 0..d2 {
                        e[(r1 * d2 + r2) * d + c1 * d2 + c2] = a * other.entry(r2, c2);
                    }
                }
            }
        }
        DenseOperator { dim: d, entries: e }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut e = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                e[c * d + r] = self.entry(r, c).conj();
            }
        }
        DenseOperator { dim: d, entries: e }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dagger()
            .matmul(self)
            .map(|p| p.approx_eq(&Self::identity(self.num_qubits()), tol))
            .unwrap_or(false)
    }

    /// Dense matrix-vector product.
    pub fn apply_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Applies the full matrix to a state with matching qubit count.
    pub fn apply_state(&self, s: &StateVector) -> Result<StateVector> {
        let amps = self.apply_vec(s.amps())?;
        StateVector::unnormalized(s.labels().to_vec(), amps)
    }

    /// Expands this operator, acting on `positions` (0-based, in order), to
    /// the full `2^total` space. Entry `(r, c)` is `op[r_T, c_T]` when the
    /// non-target bits of `r` and `c` agree and zero otherwise.
    pub fn embed(&self, positions: &[usize], total: usize) -> Result<Self> {
        if self.dim != 1 << positions.len() {
            return Err(Error::DimensionMismatch {
                dim: self.dim,
                qubits: positions.len(),
            });
        }
        if let Some(&p) = positions.iter().find(|&&p| p >= total) {
            return Err(Error::PositionOutOfRange { pos: p, n: total });
        }
        let d = 1usize << total;
        let bit = |i: usize, p: usize| (i >> (total - 1 - p)) & 1;
        let local = |i: usize| positions.iter().fold(0, |acc, &p| (acc << 1) | bit(i, p));
        let rest_mask = (0..total)
            .filter(|p| !positions.contains(p))
            .fold(0usize, |m, p| m | (1 << (total - 1 - p)));
        let mut e = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                if r & rest_mask == c & rest_mask {
                    e[r * d + c] = self.entry(local(r), local(c));
                }
            }
        }
        Ok(DenseOperator { dim: d, entries: e })
    }

    /// Reads the matrix format `{"dim": d, "entries": [[[re, im], ...], ...]}`.
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let f: MatrixFile = serde_json::from_str(text)?;
        if f.entries.len() != f.dim {
            return Err(Error::LengthMismatch {
                expected: f.dim,
                got: f.entries.len(),
            });
        }
        Self::from_rows(
            f.entries
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn to_json_string(&self) -> String {
        let f = MatrixFile {
            dim: self.dim,
            entries: (0..self.dim)
                .map(|r| self.row(r).iter().map(|a| [a.re, a.im]).collect())
                .collect(),
        };
        serde_json::to_string(&f).expect("matrix serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}
