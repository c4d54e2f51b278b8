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

//! Swapping transformations as qubit-position permutations.
//!
//! Every reordering of the joint register is a [`QubitRouting`]: `dest[i]`
//! is the new position of the qubit currently at position `i`. Constructors
//! take 1-based positions; everything is 0-based internally.
//!
//! The block reorderings used by the protocol's formal expressions are:
//!
//! * `Λ(2,N)`: `⊗|a_i b_i⟩ → (⊗|a_i⟩)(⊗|b_j⟩)`
//! * `Ω(2,N)`: `(⊗|a_i⟩)(⊗|b_j⟩) → (⊗|b_i⟩)(⊗|a_j⟩)`
//! * `Υ(3,N)`: `(⊗|a_i b_i⟩)(⊗|y_j⟩) → ⊗|a_i b_i y_i⟩`
//! * `Γ(3,N)`: `(⊗|a_i b_i⟩)(⊗|y_j⟩) → (⊗|a_i⟩)(⊗|y_j⟩)(⊗|b_k⟩)`

use std::fmt::Debug;

use num_complex::Complex64;

use crate::par;
use crate::statevec::{DenseOperator, StateVector};
use crate::{Error, Result};

/// A permutation of qubit positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QubitRouting {
    dest: Vec<usize>,
}

impl QubitRouting {
    pub fn identity(n: usize) -> Self {
        QubitRouting {
            dest: (0..n).collect(),
        }
    }

    /// Builds a routing from 0-based destinations, checking bijectivity.
    pub fn from_dest(dest: Vec<usize>) -> Result<Self> {
        let n = dest.len();
        let mut seen = vec![false; n];
        for &d in &dest {
            if d >= n || std::mem::replace(&mut seen[d], true) {
                return Err(Error::NotAPermutation(format!("{dest:?}")));
            }
        }
        Ok(QubitRouting { dest })
    }

    pub fn len(&self) -> usize {
        self.dest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dest.is_empty()
    }

    /// 0-based destinations.
    pub fn dest(&self) -> &[usize] {
        &self.dest
    }

    /// 1-based destinations, as printed by the CLI.
    pub fn dest_one_based(&self) -> Vec<usize> {
        self.dest.iter().map(|d| d + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.dest.iter().enumerate().all(|(i, &d)| i == d)
    }

    /// `self` followed by `next` (matrix product `next · self`).
    pub fn then(&self, next: &QubitRouting) -> Result<Self> {
        if self.len() != next.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: next.len(),
            });
        }
        Ok(QubitRouting {
            dest: self.dest.iter().map(|&d| next.dest[d]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &d) in self.dest.iter().enumerate() {
            inv[d] = i;
        }
        QubitRouting { dest: inv }
    }

    /// Embeds this routing at position `offset` (0-based) of a `total`-qubit
    /// register, identity elsewhere.
    pub fn embed(&self, offset: usize, total: usize) -> Result<Self> {
        if offset + self.len() > total {
            return Err(Error::PositionOutOfRange {
                pos: offset + self.len(),
                n: total,
            });
        }
        let mut dest: Vec<usize> = (0..total).collect();
        for (i, &d) in self.dest.iter().enumerate() {
            dest[offset + i] = offset + d;
        }
        Ok(QubitRouting { dest })
    }

    /// Moves each item of `seq` to its routed position.
    pub fn permute<T: Clone>(&self, seq: &[T]) -> Result<Vec<T>> {
        if seq.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: seq.len(),
            });
        }
        let mut out = seq.to_vec();
        for (i, item) in seq.iter().enumerate() {
            out[self.dest[i]] = item.clone();
        }
        Ok(out)
    }

    /// Index of the basis state that `index` is sent to.
    pub fn route_index(&self, index: usize) -> usize {
        let n = self.len();
        (0..n).fold(0usize, |acc, i| {
            let bit = (index >> (n - 1 - i)) & 1;
            acc | (bit << (n - 1 - self.dest[i]))
        })
    }

    /// The `2^n × 2^n` permutation matrix. Oracle use only.
    pub fn to_dense(&self) -> DenseOperator {
        let d = 1usize << self.len();
        let mut m = DenseOperator::zeros(d).expect("power of two");
        for col in 0..d {
            m.set(self.route_index(col), col, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Reorders the qubits of `state`; labels follow their qubits.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        apply_routing(state, self)
    }
}

/// Applies `r` to `state`: basis bit `j` moves to position `dest[j]`.
pub fn apply_routing(state: &StateVector, r: &QubitRouting) -> Result<StateVector> {
    if state.num_qubits() != r.len() {
        return Err(Error::LengthMismatch {
            expected: r.len(),
            got: state.num_qubits(),
        });
    }
    let labels = r.permute(state.labels())?;
    let inv = r.inverse();
    let src = state.amps();
    let len = src.len();
    let amps = par::map_indices(len, par::for_len(len), |i| src[inv.route_index(i)]);
    StateVector::unnormalized(labels, amps)
}

fn check_pos(n: usize, pos: usize) -> Result<()> {
    if pos == 0 || pos > n {
        return Err(Error::PositionOutOfRange { pos, n });
    }
    Ok(())
}

/// `S_n(i, i+1)`: transposes positions `i` and `i+1` (1-based).
pub fn s_adjacent(n: usize, i: usize) -> Result<QubitRouting> {
    check_pos(n, i)?;
    check_pos(n, i + 1)?;
    let mut dest: Vec<usize> = (0..n).collect();
    dest.swap(i - 1, i);
    Ok(QubitRouting { dest })
}

/// `F_n(i, j)`: moves the qubit at `j` forward to `i`, shifting `i..j-1`
/// back by one.
pub fn f_forward(n: usize, i: usize, j: usize) -> Result<QubitRouting> {
    check_pos(n, i)?;
    check_pos(n, j)?;
    if i >= j {
        return Err(Error::BadParameter(format!(
            "forward move needs i < j, got {i} >= {j}"
        )));
    }
    let (i, j) = (i - 1, j - 1);
    let dest = (0..n)
        .map(|p| match p {
            p if p == j => i,
            p if (i..j).contains(&p) => p + 1,
            p => p,
        })
        .collect();
    Ok(QubitRouting { dest })
}

/// `P_n(j, k)`: moves the qubit at `j` backward to `k`, shifting `j+1..k`
/// forward by one.
pub fn p_backward(n: usize, j: usize, k: usize) -> Result<QubitRouting> {
    check_pos(n, j)?;
    check_pos(n, k)?;
    if j >= k {
        return Err(Error::BadParameter(format!(
            "backward move needs j < k, got {j} >= {k}"
        )));
    }
    let (j, k) = (j - 1, k - 1);
    let dest = (0..n)
        .map(|p| match p {
            p if p == j => k,
            p if (j + 1..=k).contains(&p) => p - 1,
            p => p,
        })
        .collect();
    Ok(QubitRouting { dest })
}

/// Composes routings listed in application order (the rightmost factor of
/// an operator product comes first).
pub fn compose_in_order<'a, I>(n: usize, factors: I) -> Result<QubitRouting>
where
    I: IntoIterator<Item = &'a QubitRouting>,
{
    factors
        .into_iter()
        .try_fold(QubitRouting::identity(n), |acc, f| acc.then(f))
}

fn lambda_any(n_pairs: usize) -> Result<QubitRouting> {
    let total = 2 * n_pairs;
    let factors = (1..n_pairs)
        .map(|i| p_backward(total, 2 * (n_pairs - i), total - i))
        .collect::<Result<Vec<_>>>()?;
    compose_in_order(total, &factors)
}

/// `Λ(2,N) = ∏_{i=1←}^{N-1} P_{2N}(2(N−i), 2N−i)`.
pub fn lambda_route(n_pairs: usize) -> Result<QubitRouting> {
    if n_pairs < 2 {
        return Err(Error::BadParameter(format!(
            "Λ(2,N) needs N >= 2, got {n_pairs}"
        )));
    }
    lambda_any(n_pairs)
}

/// `Ω(2,N)`: exchanges the first and second `N`-qubit blocks.
pub fn omega_route(n_pairs: usize) -> Result<QubitRouting> {
    if n_pairs < 1 {
        return Err(Error::BadParameter("Ω(2,N) needs N >= 1".into()));
    }
    let total = 2 * n_pairs;
    Ok(QubitRouting {
        dest: (0..total).map(|p| (p + n_pairs) % total).collect(),
    })
}

/// `Υ(3,N) = ∏_{i=1←}^{N-1} F_{3N}(3i, 2N+i)`; identity for `N = 1`.
pub fn upsilon_route(n_pairs: usize) -> Result<QubitRouting> {
    if n_pairs < 1 {
        return Err(Error::BadParameter("Υ(3,N) needs N >= 1".into()));
    }
    let total = 3 * n_pairs;
    let factors = (1..n_pairs)
        .map(|i| f_forward(total, 3 * i, 2 * n_pairs + i))
        .collect::<Result<Vec<_>>>()?;
    compose_in_order(total, &factors)
}

/// `Γ(3,N) = (I ⊗ Ω(2,N)) (Λ(2,N) ⊗ I)`.
pub fn gamma_route(n_pairs: usize) -> Result<QubitRouting> {
    if n_pairs < 1 {
        return Err(Error::BadParameter("Γ(3,N) needs N >= 1".into()));
    }
    let total = 3 * n_pairs;
    let lambda = lambda_any(n_pairs)?.embed(0, total)?;
    let omega = omega_route(n_pairs)?.embed(n_pairs, total)?;
    lambda.then(&omega)
}

/// General swap `W[from → to]`: sends each item's position in `from` to its
/// position in `to`.
pub fn w_route<T: PartialEq + Debug>(from: &[T], to: &[T]) -> Result<QubitRouting> {
    if from.len() != to.len() {
        return Err(Error::NotAPermutation(format!("{from:?} -> {to:?}")));
    }
    let dest = from
        .iter()
        .map(|f| {
            let mut hits = to.iter().enumerate().filter(|(_, t)| *t == f);
            match (hits.next(), hits.next()) {
                (Some((p, _)), None) => Ok(p),
                _ => Err(Error::NotAPermutation(format!("{from:?} -> {to:?}"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    QubitRouting::from_dest(dest)
}
