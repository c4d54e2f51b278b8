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

//! Restricted-set operations: generalized permutation matrices.
//!
//! An `N`-qubit restricted operation `T(x, t)` has exactly one nonzero entry
//! per row and column. Row `m` (1-based, basis `|m,D⟩` = binary `m − 1`)
//! holds `t_m` in column `p_m(x)`, where `p(x)` is the `x`-th permutation of
//! `1..=2^N` in lexicographic order. `R(x)` is the same matrix with every
//! nonzero set to 1; it is the fixed part of the receiver's recovery.
//!
//! Ranks are arbitrary precision: `(2^N)!` overflows 64 bits from `N = 5`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::statevec::{DenseOperator, NORM_TOL};
use crate::{Error, Result};

/// Default zero threshold for [`classify`].
pub const CLASSIFY_EPS: f64 = 1e-10;

/// Largest qubit count accepted by rank arithmetic.
pub const MAX_RANK_QUBITS: usize = 10;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `m!` as a big integer.
pub fn factorial(m: usize) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Number of restricted sets on `n_qubits` qubits, `(2^N)!`.
pub fn set_count(n_qubits: usize) -> Result<BigUint> {
    check_qubits(n_qubits)?;
    Ok(factorial(1 << n_qubits))
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_RANK_QUBITS {
        return Err(Error::BadParameter(format!(
            "qubit count {n_qubits} outside 1..={MAX_RANK_QUBITS}"
        )));
    }
    Ok(())
}

/// 1-based lexicographic rank of a permutation of `1..=2^N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PermRank(BigUint);

impl PermRank {
    pub fn new(x: impl Into<BigUint>) -> Self {
        PermRank(x.into())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// Rank `1`, the identity permutation.
    pub fn first() -> Self {
        PermRank(BigUint::one())
    }

    /// Errors unless `1 <= x <= (2^N)!`.
    pub fn check(&self, n_qubits: usize) -> Result<()> {
        let max = set_count(n_qubits)?;
        if self.0.is_zero() || self.0 > max {
            return Err(Error::RankOutOfRange {
                rank: self.0.to_string(),
                max: max.to_string(),
            });
        }
        Ok(())
    }
}

impl From<u64> for PermRank {
    fn from(x: u64) -> Self {
        PermRank(BigUint::from(x))
    }
}

impl fmt::Display for PermRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for PermRank {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigUint>()
            .map(PermRank)
            .map_err(|_| Error::BadParameter(format!("bad rank {s:?}")))
    }
}

/// A permutation of `1..=2^N`, stored 1-based as in `p(x) = (p_1, …, p_{2^N})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Validates that `images` is a bijection on `1..=len` with a
    /// power-of-two length.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let m = images.len();
        if !m.is_power_of_two() || m < 2 {
            return Err(Error::NotAPermutation(format!(
                "length {m} is not 2^N for N >= 1"
            )));
        }
        let mut seen = vec![false; m];
        for &v in &images {
            if v == 0 || v > m || std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Permutation {
            images: (1..=1 << n_qubits).collect(),
        }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.images.len().trailing_zeros() as usize
    }

    /// 0-based column of the nonzero in each row.
    pub fn columns(&self) -> Vec<usize> {
        self.images.iter().map(|v| v - 1).collect()
    }

    /// Advances to the next permutation in lexicographic order.
    /// Returns `false` (leaving `self` unchanged) at the last one.
    pub fn advance(&mut self) -> bool {
        let v = &mut self.images;
        let Some(i) = (0..v.len().saturating_sub(1))
            .rev()
            .find(|&i| v[i] < v[i + 1])
        else {
            return false;
        };
        let j = (i + 1..v.len())
            .rev()
            .find(|&j| v[j] > v[i])
            .expect("pivot exists");
        v.swap(i, j);
        v[i + 1..].reverse();
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Unranks `x` by the factorial number system.
pub fn rank_to_perm(n_qubits: usize, x: &PermRank) -> Result<Permutation> {
    x.check(n_qubits)?;
    let m = 1usize << n_qubits;
    let mut rest = &x.0 - BigUint::one();
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut images = Vec::with_capacity(m);
    for i in 0..m {
        let f = factorial(m - 1 - i);
        let digit = (&rest / &f).to_usize().expect("digit < m");
        rest %= &f;
        images.push(pool.remove(digit));
    }
    Ok(Permutation { images })
}

/// Inverse of [`rank_to_perm`].
pub fn perm_to_rank(p: &Permutation) -> PermRank {
    let m = p.len();
    let mut pool: Vec<usize> = (1..=m).collect();
    let mut rank = BigUint::zero();
    for (i, v) in p.images.iter().enumerate() {
        let digit = pool.binary_search(v).expect("valid permutation");
        pool.remove(digit);
        rank += factorial(m - 1 - i) * BigUint::from(digit);
    }
    PermRank(rank + BigUint::one())
}

/// Iterator over every permutation of `1..=2^N` in rank order.
pub fn enumerate(n_qubits: usize) -> impl Iterator<Item = Permutation> {
    let mut next = Some(Permutation::identity(n_qubits));
    std::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        if succ.advance() {
            next = Some(succ);
        }
        Some(cur)
    })
}

/// A member `T(x, t)` of the restricted sets.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedOp {
    n_qubits: usize,
    rank: PermRank,
    perm: Permutation,
    phases: Vec<Complex64>,
}

impl RestrictedOp {
    /// `T(x, t) = Σ_m t_m |m,D⟩⟨p_m(x),D|`.
    pub fn build_t(n_qubits: usize, x: &PermRank, phases: Vec<Complex64>) -> Result<Self> {
        let perm = rank_to_perm(n_qubits, x)?;
        Self::with_perm(perm, x.clone(), phases)
    }

    /// `R(x)`: the 0/1 permutation matrix with the structure of `T(x, ·)`.
    pub fn build_r(n_qubits: usize, x: &PermRank) -> Result<Self> {
        Self::build_t(n_qubits, x, vec![ONE; 1 << n_qubits])
    }

    pub fn from_permutation(perm: Permutation, phases: Vec<Complex64>) -> Result<Self> {
        let rank = perm_to_rank(&perm);
        Self::with_perm(perm, rank, phases)
    }

    fn with_perm(perm: Permutation, rank: PermRank, phases: Vec<Complex64>) -> Result<Self> {
        if phases.len() != perm.len() {
            return Err(Error::LengthMismatch {
                expected: perm.len(),
                got: phases.len(),
            });
        }
        if let Some(i) = phases
            .iter()
            .position(|t| !t.re.is_finite() || !t.im.is_finite())
        {
            return Err(Error::NonFinite(i));
        }
        Ok(RestrictedOp {
            n_qubits: perm.n_qubits(),
            rank,
            perm,
            phases,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn rank(&self) -> &PermRank {
        &self.rank
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    /// The fixed form `R(x)` of this operation.
    pub fn fixed_form(&self) -> Self {
        RestrictedOp {
            phases: vec![ONE; self.dim()],
            ..self.clone()
        }
    }

    /// Unitary iff every `|t_m| = 1` within `1e-12`.
    pub fn is_unitary(&self) -> bool {
        self.phases
            .iter()
            .all(|t| (t.norm() - 1.0).abs() <= NORM_TOL)
    }

    /// Sparse action on a `2^N` amplitude vector: `out[m] = t_m · v[p_m]`.
    pub fn apply_to(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(self
            .perm
            .images
            .iter()
            .zip(&self.phases)
            .map(|(&p, t)| t * v[p - 1])
            .collect())
    }

    pub fn to_dense(&self) -> DenseOperator {
        let mut m = DenseOperator::zeros(self.dim()).expect("power of two");
        for (row, (&p, t)) in self.perm.images.iter().zip(&self.phases).enumerate() {
            m.set(row, p - 1, *t);
        }
        m
    }
}

/// Recovers `(x, t)` from a dense matrix with one nonzero per row and
/// column. Entries with magnitude below `eps` count as zero.
pub fn classify(m: &DenseOperator, eps: f64) -> Result<RestrictedOp> {
    let d = m.dim();
    if d < 2 {
        return Err(Error::NotRestricted("dimension must be at least 2".into()));
    }
    let mut images = Vec::with_capacity(d);
    let mut phases = Vec::with_capacity(d);
    for r in 0..d {
        let mut hits = m.row(r).iter().enumerate().filter(|(_, v)| v.norm() >= eps);
        match (hits.next(), hits.next()) {
            (Some((c, v)), None) => {
                images.push(c + 1);
                phases.push(*v);
            }
            (None, _) => return Err(Error::NotRestricted(format!("row {} is zero", r + 1))),
            _ => {
                return Err(Error::NotRestricted(format!(
                    "row {} has more than one nonzero",
                    r + 1
                )))
            }
        }
    }
    let perm = Permutation::new(images)
        .map_err(|_| Error::NotRestricted("a column has more than one nonzero".into()))?;
    RestrictedOp::from_permutation(perm, phases)
}

/// Checks `T(1, t) · R(x) == T(x, t)` densely within `1e-12`.
pub fn compose_check(n_qubits: usize, x: &PermRank, phases: &[Complex64]) -> Result<bool> {
    let diag = RestrictedOp::build_t(n_qubits, &PermRank::first(), phases.to_vec())?;
    let r = RestrictedOp::build_r(n_qubits, x)?;
    let t = RestrictedOp::build_t(n_qubits, x, phases.to_vec())?;
    let lhs = diag.to_dense().matmul(&r.to_dense())?;
    Ok(lhs.approx_eq(&t.to_dense(), NORM_TOL))
}

fn unit_phases(u: &[Complex64]) -> Result<()> {
    if let Some(v) = u.iter().find(|v| (v.norm() - 1.0).abs() > NORM_TOL) {
        return Err(Error::BadParameter(format!(
            "phase {v} is not unit modulus"
        )));
    }
    Ok(())
}

/// One-qubit restricted operation: `d = 0` gives `diag(u₀, u₁)`,
/// `d = 1` gives `[[0, u₀], [u₁, 0]]`.
pub fn one_qubit(d: u8, u: [Complex64; 2]) -> Result<RestrictedOp> {
    let images = match d {
        0 => vec![1, 2],
        1 => vec![2, 1],
        _ => return Err(Error::BadParameter(format!("d must be 0 or 1, got {d}"))),
    };
    RestrictedOp::from_permutation(Permutation::new(images)?, u.to_vec())
}

/// Controlled-controlled-`U(d)` on three qubits: identity on the control
/// states `00, 01, 10` and `U(d)` (see [`one_qubit`]) on `11`.
pub fn cc_u(d: u8, u: [Complex64; 2]) -> Result<RestrictedOp> {
    unit_phases(&u)?;
    let tail = match d {
        0 => [7, 8],
        1 => [8, 7],
        _ => return Err(Error::BadParameter(format!("d must be 0 or 1, got {d}"))),
    };
    let mut images: Vec<usize> = (1..=6).collect();
    images.extend(tail);
    let mut phases = vec![ONE; 6];
    phases.extend(u);
    RestrictedOp::from_permutation(Permutation::new(images)?, phases)
}

/// The four two-qubit controlled operations `U_C(1..=4)`; `first` and
/// `second` fill the two free entries of the flipped block in row order.
///
/// | gate | rank | block acted on |
/// |------|------|----------------|
/// | 1 | 2  | target 2, control 1 = 1 |
/// | 2 | 6  | target 1, control 2 = 1 |
/// | 3 | 7  | target 2, control 1 = 0 |
/// | 4 | 15 | target 1, control 2 = 0 |
pub fn controlled_gate(which: u8, first: Complex64, second: Complex64) -> Result<RestrictedOp> {
    let (rank, rows) = match which {
        1 => (2u64, [2, 3]),
        2 => (6, [1, 3]),
        3 => (7, [0, 1]),
        4 => (15, [0, 2]),
        _ => {
            return Err(Error::BadParameter(format!(
                "controlled gate index {which}"
            )))
        }
    };
    let mut phases = vec![ONE; 4];
    phases[rows[0]] = first;
    phases[rows[1]] = second;
    RestrictedOp::build_t(2, &PermRank::from(rank), phases)
}
