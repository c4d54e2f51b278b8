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

//! Remote implementation of partially unknown multi-qubit operations.
//!
//! The crate simulates a two-party protocol in which a sender (Alice) holds
//! a generalized permutation operation `T(x, t)` on `N` qubits and a receiver
//! (Bob) holds an unknown `N`-qubit state `|ξ⟩`. Using `N` shared Bell pairs
//! and classical messages, the action `T|ξ⟩` ends up on Bob's register.
//!
//! Modules:
//!
//! * [`statevec`]: state vectors with labelled qubits, subset gate kernels
//!   and projective measurement.
//! * [`swapnet`]: qubit-position permutations (adjacent swaps, forward and
//!   backward rearrangements, block reorderings).
//! * [`restricted`]: permutation ranking, restricted-set operations and
//!   their classification.
//! * [`protocol`]: the five-step protocol, the one-qubit variants and the
//!   verification harness.
//! * [`resources`]: entanglement and classical-bit accounting.
//! * [`cli`]: the `rio` command-line front end.

pub mod cli;
mod error;
pub mod par;
pub mod protocol;
pub mod resources;
pub mod restricted;
pub mod statevec;
pub mod swapnet;

pub use error::{Error, Result};
pub use num_complex::Complex64;
