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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("duplicate qubit label {0}")]
    DuplicateLabel(String),
    #[error("unknown qubit label {0}")]
    UnknownLabel(String),
    #[error("label sequences differ")]
    LabelMismatch,
    #[error("operator of dimension {dim} cannot act on {qubits} qubit(s)")]
    DimensionMismatch { dim: usize, qubits: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("forced outcome {outcome} on {label} has probability {prob:e}")]
    ForcedOutcomeImpossible {
        label: String,
        outcome: u8,
        prob: f64,
    },
    #[error("position {pos} out of range for {n} qubit(s)")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: String, max: String },
    #[error("operator is not in a restricted set: {0}")]
    NotRestricted(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("{what} = {value} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
