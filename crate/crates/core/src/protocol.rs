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

//! The five-step remote implementation protocol.
//!
//! Alice (sender) holds `T(x, t)`; Bob (receiver) holds `|ξ⟩` on `Y₁…Y_N`.
//! They share `N` Bell pairs `A_m B_m`. The joint register is laid out as
//! `A₁B₁A₂B₂…A_NB_N Y₁…Y_N`.
//!
//! 1. Bob: `CNOT(Y_m → B_m)` for every `m`, then measures `B₁…B_N` → `b`.
//! 2. Bob → Alice: `b`.
//! 3. Alice: `⊗σ_{b_m}` on `A`, `T(x, t)` on `A₁…A_N`, `⊗H`, measures
//!    `A₁…A_N` → `a`.
//! 4. Alice → Bob: `a` and the index `x`.
//! 5. Bob: `R(x)` on `Y₁…Y_N`, then `σ₃` on each `Y_m` with `a_m = 1`.
//!
//! Afterwards the `Y` register holds `T(x, t)|ξ⟩` for every outcome.
//!
//! Measurements renormalize the state. The product of their probabilities
//! is kept as `branch_prob` (always `1/4^N`); the unnormalized amplitude
//! prefactor `1/2^N` of the all-in-one operator is its square root, see
//! [`apply_monolithic`].
//!
//! Bob's functions never receive the phases `t`; they only see `x`.

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::par::{self, Execution};
use crate::resources::{x_message_bits, XEncoding};
use crate::restricted::{one_qubit, set_count, PermRank, RestrictedOp};
use crate::statevec::{DenseOperator, Label, StateVector, NORM_TOL};
use crate::swapnet::{lambda_route, upsilon_route, QubitRouting};
use crate::{Error, Result};

/// Default cap on `N` for [`run_protocol`] (`2^{3N}` amplitudes).
pub const DEFAULT_MAX_QUBITS: usize = 6;

/// Cap on `N` for dense `2^{3N}` cross-checks.
pub const DENSE_MAX_QUBITS: usize = 3;

/// Verification pass threshold used by the CLI.
pub const PASS_FIDELITY: f64 = 1.0 - 1e-9;

/// Joint labels in the initial layout `∏(A_m B_m) ∏ Y_n`.
pub fn joint_labels(n: usize) -> Vec<Label> {
    let n32 = n as u32;
    (1..=n32)
        .flat_map(|m| [Label::a(m), Label::b(m)])
        .chain((1..=n32).map(Label::y))
        .collect()
}

pub fn alice_labels(n: usize) -> Vec<Label> {
    (1..=n as u32).map(Label::a).collect()
}

pub fn pair_labels(n: usize) -> Vec<Label> {
    (1..=n as u32).map(Label::b).collect()
}

pub fn y_labels(n: usize) -> Vec<Label> {
    (1..=n as u32).map(Label::y).collect()
}

fn check_bits(bits: &[u8], n: usize, what: &str) -> Result<()> {
    if bits.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: bits.len(),
        });
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::BadParameter(format!("{what} bit {b}")));
    }
    Ok(())
}

/// Formats bits as a `0`/`1` string.
pub fn bit_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|b| if *b == 1 { '1' } else { '0' })
        .collect()
}

/// Parses a `0`/`1` string.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::BadParameter(format!("bad bit string {s:?}"))),
        })
        .collect()
}

/// Encodes `x` as `x − 1` in the tight fixed width, MSB first.
pub fn encode_x(n: usize, x: &PermRank) -> Result<String> {
    x.check(n)?;
    let width = x_message_bits(n, XEncoding::Tight)?;
    let v = x.value() - BigUint::one();
    Ok(format!("{:0>width$}", v.to_str_radix(2), width = width))
}

/// Inverse of [`encode_x`].
pub fn decode_x(n: usize, bits: &str) -> Result<PermRank> {
    let width = x_message_bits(n, XEncoding::Tight)?;
    if bits.len() != width {
        return Err(Error::LengthMismatch {
            expected: width,
            got: bits.len(),
        });
    }
    let v = BigUint::parse_bytes(bits.as_bytes(), 2)
        .ok_or_else(|| Error::BadParameter(format!("bad x message {bits:?}")))?;
    let x = PermRank::new(v + BigUint::one());
    x.check(n)?;
    Ok(x)
}

/// The joint state in the fixed label layout.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    n: usize,
    state: StateVector,
}

impl JointState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn into_state(self) -> StateVector {
        self.state
    }

    fn with(&self, state: StateVector) -> Self {
        JointState { n: self.n, state }
    }

    /// The `Y` register with `A` and `B` pinned to `a` and `b`,
    /// renormalized. Its squared norm before renormalization is returned
    /// as well; it is 1 exactly when `A`/`B` sit in `|a b⟩`.
    pub fn y_register(&self, a: &[u8], b: &[u8]) -> Result<(StateVector, f64)> {
        check_bits(a, self.n, "a")?;
        check_bits(b, self.n, "b")?;
        let n32 = self.n as u32;
        let fixed: Vec<(Label, u8)> = (1..=n32)
            .flat_map(|m| {
                let i = (m - 1) as usize;
                [(Label::a(m), a[i]), (Label::b(m), b[i])]
            })
            .collect();
        let slice = self.state.slice(&fixed)?;
        let weight = slice.norm_sqr();
        Ok((slice.normalized()?, weight))
    }
}

/// `(⊗|Φ⁺⟩_{A_m B_m}) ⊗ |ξ⟩`. `xi` is relabelled onto `Y₁…Y_N`.
pub fn init_state(n: usize, xi: &StateVector) -> Result<JointState> {
    if n == 0 {
        return Err(Error::BadParameter("N must be at least 1".into()));
    }
    if xi.num_qubits() != n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            got: xi.amps().len(),
        });
    }
    let xi = StateVector::new(y_labels(n), xi.amps().to_vec())?;
    let mut state = StateVector::bell_pair(Label::a(1), Label::b(1))?;
    for m in 2..=n as u32 {
        state = state.tensor(&StateVector::bell_pair(Label::a(m), Label::b(m))?)?;
    }
    Ok(JointState {
        n,
        state: state.tensor(&xi)?,
    })
}

/// Outcome of a measuring step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: JointState,
    pub bits: Vec<u8>,
    /// Product of the step's measurement probabilities.
    pub prob: f64,
    pub log: Vec<String>,
}

fn measure_all<R: Rng + ?Sized>(
    mut state: StateVector,
    targets: &[Label],
    forced: Option<&[u8]>,
    rng: &mut R,
    log: &mut Vec<String>,
) -> Result<(StateVector, Vec<u8>, f64)> {
    let mut bits = Vec::with_capacity(targets.len());
    let mut prob = 1.0;
    for (i, &t) in targets.iter().enumerate() {
        let m = state.measure(t, forced.map(|f| f[i]), rng)?;
        log.push(format!("measure {t} -> {} (p = {})", m.outcome, m.prob));
        bits.push(m.outcome);
        prob *= m.prob;
        state = m.post;
    }
    Ok((state, bits, prob))
}

/// Step one: Bob entangles `B_m` with `Y_m` and measures `B₁…B_N`.
pub fn bob_prepare<R: Rng + ?Sized>(
    s: &JointState,
    forced_b: Option<&[u8]>,
    rng: &mut R,
) -> Result<StepOutcome> {
    let n = s.n;
    if let Some(b) = forced_b {
        check_bits(b, n, "b")?;
    }
    let cnot = DenseOperator::separated_cnot(0);
    let mut state = s.state.clone();
    let mut log = Vec::new();
    for m in 1..=n as u32 {
        state = state.apply_on(&cnot, &[Label::b(m), Label::y(m)])?;
        log.push(format!("bob: cnot Y{m} -> B{m}"));
    }
    let (state, bits, prob) = measure_all(state, &pair_labels(n), forced_b, rng, &mut log)?;
    Ok(StepOutcome {
        state: s.with(state),
        bits,
        prob,
        log,
    })
}

/// Step three: Alice applies `σ_b`, the operation, Hadamards, and measures.
pub fn alice_send<R: Rng + ?Sized>(
    s: &JointState,
    b_bits: &[u8],
    op: &RestrictedOp,
    forced_a: Option<&[u8]>,
    rng: &mut R,
) -> Result<StepOutcome> {
    let n = s.n;
    check_bits(b_bits, n, "b")?;
    if let Some(a) = forced_a {
        check_bits(a, n, "a")?;
    }
    if op.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            dim: op.dim(),
            qubits: n,
        });
    }
    let mut state = s.state.clone();
    let mut log = Vec::new();
    let x_gate = DenseOperator::pauli(1)?;
    for (m, &b) in (1..=n as u32).zip(b_bits) {
        if b == 1 {
            state = state.apply_on(&x_gate, &[Label::a(m)])?;
            log.push(format!("alice: sigma_1 on A{m}"));
        }
    }
    let a_block = alice_labels(n);
    state = state.apply_generalized_permutation(&a_block, &op.perm().columns(), op.phases())?;
    log.push(format!("alice: T(x = {}) on A block", op.rank()));
    let h = DenseOperator::hadamard();
    for &l in &a_block {
        state = state.apply_on(&h, &[l])?;
    }
    log.push("alice: hadamard on A block".into());
    let (state, bits, prob) = measure_all(state, &a_block, forced_a, rng, &mut log)?;
    Ok(StepOutcome {
        state: s.with(state),
        bits,
        prob,
        log,
    })
}

/// Step five: Bob applies `R(x)` then `𝔯(a_m) = σ₃^{a_m}` on the `Y` block.
pub fn bob_recover(s: &JointState, a_bits: &[u8], x: &PermRank) -> Result<JointState> {
    let n = s.n;
    check_bits(a_bits, n, "a")?;
    let r = RestrictedOp::build_r(n, x)?;
    let y_block = y_labels(n);
    let mut state =
        s.state
            .apply_generalized_permutation(&y_block, &r.perm().columns(), r.phases())?;
    let z = DenseOperator::pauli(3)?;
    for (&l, &a) in y_block.iter().zip(a_bits) {
        if a == 1 {
            state = state.apply_on(&z, &[l])?;
        }
    }
    Ok(s.with(state))
}

/// Message direction on the classical channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "B2A")]
    BobToAlice,
    #[serde(rename = "A2B")]
    AliceToBob,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub dir: Direction,
    pub bits: String,
}

fn ser_rank<S: Serializer>(x: &PermRank, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

fn de_rank<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<PermRank, D::Error> {
    String::deserialize(d)?
        .parse()
        .map_err(serde::de::Error::custom)
}

/// Record of one protocol run; serializes to the transcript file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub n: usize,
    #[serde(serialize_with = "ser_rank", deserialize_with = "de_rank")]
    pub x: PermRank,
    pub b: Vec<u8>,
    pub a: Vec<u8>,
    pub messages: Vec<Message>,
    pub branch_prob: f64,
    #[serde(default)]
    pub steps: Vec<String>,
}

impl ProtocolTranscript {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Parameters of one run.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub n: usize,
    pub x: PermRank,
    pub phases: Vec<Complex64>,
    pub forced_b: Option<Vec<u8>>,
    pub forced_a: Option<Vec<u8>>,
    pub seed: u64,
    /// Bob announced `b` before the run; no Bob→Alice message is sent.
    pub bob_fixed_b: bool,
    pub max_qubits: usize,
}

impl ProtocolConfig {
    pub fn new(n: usize, x: PermRank, phases: Vec<Complex64>) -> Self {
        ProtocolConfig {
            n,
            x,
            phases,
            forced_b: None,
            forced_a: None,
            seed: 0,
            bob_fixed_b: false,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn forced(mut self, b: Vec<u8>, a: Vec<u8>) -> Self {
        self.forced_b = Some(b);
        self.forced_a = Some(a);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadParameter("N must be at least 1".into()));
        }
        if self.n > self.max_qubits {
            return Err(Error::CapExceeded {
                what: "N",
                value: self.n,
                cap: self.max_qubits,
            });
        }
        self.x.check(self.n)?;
        if self.phases.len() != 1 << self.n {
            return Err(Error::LengthMismatch {
                expected: 1 << self.n,
                got: self.phases.len(),
            });
        }
        if let Some(b) = &self.forced_b {
            check_bits(b, self.n, "b")?;
        }
        if let Some(a) = &self.forced_a {
            check_bits(a, self.n, "a")?;
        }
        Ok(())
    }

    /// Alice's operation `T(x, t)`.
    pub fn operation(&self) -> Result<RestrictedOp> {
        RestrictedOp::build_t(self.n, &self.x, self.phases.clone())
    }
}

/// Runs all five steps on `init_state(cfg.n, xi)`.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    xi: &StateVector,
) -> Result<(JointState, ProtocolTranscript)> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut steps = Vec::new();
    let mut messages = Vec::new();

    let joint = init_state(n, xi)?;
    steps.push(format!("init: {n} bell pair(s) and xi"));

    let forced_b = match (&cfg.forced_b, cfg.bob_fixed_b) {
        (Some(b), _) => Some(b.clone()),
        (None, true) => Some(vec![0; n]),
        (None, false) => None,
    };
    let prep = bob_prepare(&joint, forced_b.as_deref(), &mut rng)?;
    steps.extend(prep.log);
    if !cfg.bob_fixed_b {
        messages.push(Message {
            dir: Direction::BobToAlice,
            bits: bit_string(&prep.bits),
        });
    }

    let op = cfg.operation()?;
    if !op.is_unitary() {
        steps.push("warning: operation is not unitary".into());
    }
    let sent = alice_send(
        &prep.state,
        &prep.bits,
        &op,
        cfg.forced_a.as_deref(),
        &mut rng,
    )?;
    steps.extend(sent.log);
    let x_bits = encode_x(n, &cfg.x)?;
    messages.push(Message {
        dir: Direction::AliceToBob,
        bits: bit_string(&sent.bits),
    });
    messages.push(Message {
        dir: Direction::AliceToBob,
        bits: x_bits.clone(),
    });

    // Bob only learns x from the wire.
    let x_received = decode_x(n, &x_bits)?;
    let final_state = bob_recover(&sent.state, &sent.bits, &x_received)?;
    steps.push(format!(
        "bob: R(x = {x_received}) and phase corrections on Y block"
    ));

    let transcript = ProtocolTranscript {
        n,
        x: cfg.x.clone(),
        b: prep.bits,
        a: sent.bits,
        messages,
        branch_prob: prep.prob * sent.prob,
        steps,
    };
    Ok((final_state, transcript))
}

fn kron_all<I: IntoIterator<Item = DenseOperator>>(ops: I) -> DenseOperator {
    ops.into_iter()
        .reduce(|acc, o| acc.kron(&o))
        .unwrap_or_else(|| DenseOperator::identity(0))
}

/// `Λ(2,N)`, with the trivial reordering at `N = 1`.
fn lambda_or_identity(n: usize) -> Result<QubitRouting> {
    if n == 1 {
        Ok(QubitRouting::identity(2))
    } else {
        lambda_route(n)
    }
}

/// Builds the whole run `ℛ_B · 𝒮_A · 𝒫_B` as one dense `2^{3N}` operator,
/// using the formal reorderings `Υ` and `Λ` to place the local factors,
/// and applies it to the initial state. Needs forced `a` and `b`.
///
/// The result is unnormalized: `(1/2^N) (⊗|a_m b_m⟩) ⊗ T|ξ⟩` in the
/// initial layout.
pub fn apply_monolithic(cfg: &ProtocolConfig, xi: &StateVector) -> Result<StateVector> {
    cfg.validate()?;
    let n = cfg.n;
    if n > DENSE_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "N",
            value: n,
            cap: DENSE_MAX_QUBITS,
        });
    }
    let (b, a) = match (&cfg.forced_b, &cfg.forced_a) {
        (Some(b), Some(a)) => (b.clone(), a.clone()),
        _ => {
            return Err(Error::BadParameter(
                "the monolithic operator needs forced a and b".into(),
            ))
        }
    };
    let sigma0 = DenseOperator::identity(1);

    // P_B = Υ⁻¹ {⊗_m σ0 ⊗ [(|b_m⟩⟨b_m| ⊗ σ0) C^not(0,1)]} Υ
    let cnot = DenseOperator::separated_cnot(0);
    let block = kron_all(b.iter().map(|&bm| {
        let local = DenseOperator::projector(bm)
            .kron(&sigma0)
            .matmul(&cnot)
            .expect("4x4");
        sigma0.kron(&local)
    }));
    let ups = upsilon_route(n)?.to_dense();
    let prep = ups.dagger().matmul(&block)?.matmul(&ups)?;

    // S_A = (Λ⁻¹ ⊗ I) {[Π_a (⊗H) T (⊗σ_b)] ⊗ I} (Λ ⊗ I)
    let op = cfg.operation()?.to_dense();
    let proj = kron_all(a.iter().map(|&am| DenseOperator::projector(am)));
    let hads = kron_all((0..n).map(|_| DenseOperator::hadamard()));
    let flips = kron_all(
        b.iter()
            .map(|&bm| DenseOperator::pauli(bm).expect("0 or 1")),
    );
    let alice_local = proj.matmul(&hads)?.matmul(&op)?.matmul(&flips)?;
    let alice_full = alice_local.kron(&DenseOperator::identity(2 * n));
    let lam = lambda_or_identity(n)?.embed(0, 3 * n)?.to_dense();
    let send = lam.dagger().matmul(&alice_full)?.matmul(&lam)?;

    // R_B = I ⊗ [(⊗𝔯(a_m)) R(x)]
    let r = RestrictedOp::build_r(n, &cfg.x)?.to_dense();
    let phases = kron_all(
        a.iter()
            .map(|&am| DenseOperator::pauli(3 * am).expect("0 or 3")),
    );
    let recover = DenseOperator::identity(2 * n).kron(&phases.matmul(&r)?);

    let whole = recover.matmul(&send)?.matmul(&prep)?;
    whole.apply_state(init_state(n, xi)?.state())
}

/// Outcome of the one-qubit protocol with Bob's original preparation.
#[derive(Clone, Debug)]
pub struct HpvRun {
    /// State over `A B Y` after the closing swap.
    pub final_state: StateVector,
    /// State over `A B Y` before the closing swap; the result sits on `B`.
    pub before_swap: StateVector,
    pub a: u8,
    pub b: u8,
    pub branch_prob: f64,
}

/// One-qubit protocol in its original form: Bob's CNOT is controlled by his
/// half of the pair and targets `Y`; he measures `Y`, corrects `B`, and a
/// final swap moves the result from `B` to `Y`.
pub fn hpv_original<R: Rng + ?Sized>(
    d: u8,
    u: [Complex64; 2],
    xi: &StateVector,
    forced_b: Option<u8>,
    forced_a: Option<u8>,
    rng: &mut R,
) -> Result<HpvRun> {
    let op = one_qubit(d, u)?;
    let (a_l, b_l, y_l) = (Label::a(1), Label::b(1), Label::y(1));
    let s = init_state(1, xi)?.into_state();

    // Bob: CNOT(B -> Y), measure Y, σ_b on B
    let s = s.apply_on(&DenseOperator::separated_cnot(0), &[y_l, b_l])?;
    let mb = s.measure(y_l, forced_b, rng)?;
    let b = mb.outcome;
    let s = s_pauli(mb.post, b, b_l)?;

    // Alice: σ_b, U(d), H, measure A
    let s = s_pauli(s, b, a_l)?;
    let s = s.apply_on(&op.to_dense(), &[a_l])?;
    let s = s.apply_on(&DenseOperator::hadamard(), &[a_l])?;
    let ma = s.measure(a_l, forced_a, rng)?;
    let a = ma.outcome;

    // Bob: [𝔯(a) σ_d] on B, then swap B and Y
    let fix = DenseOperator::pauli(3 * a)?.matmul(&DenseOperator::pauli(d)?)?;
    let before_swap = ma.post.apply_on(&fix, &[b_l])?;
    let final_state = before_swap.apply_on(&DenseOperator::swap(), &[b_l, y_l])?;
    Ok(HpvRun {
        final_state,
        before_swap,
        a,
        b,
        branch_prob: mb.prob * ma.prob,
    })
}

fn s_pauli(s: StateVector, bit: u8, target: Label) -> Result<StateVector> {
    if bit == 1 {
        s.apply_on(&DenseOperator::pauli(1)?, &[target])
    } else {
        Ok(s)
    }
}

/// The simplified one-qubit protocol, i.e. [`run_protocol`] at `N = 1`
/// with `U(d)` from [`one_qubit`].
pub fn hpv_simplified(
    d: u8,
    u: [Complex64; 2],
    xi: &StateVector,
    forced_b: Option<u8>,
    forced_a: Option<u8>,
    seed: u64,
) -> Result<(JointState, ProtocolTranscript)> {
    let op = one_qubit(d, u)?;
    let mut cfg = ProtocolConfig::new(1, op.rank().clone(), op.phases().to_vec()).seed(seed);
    cfg.forced_b = forced_b.map(|b| vec![b]);
    cfg.forced_a = forced_a.map(|a| vec![a]);
    run_protocol(&cfg, xi)
}

/// Haar-like random pure state on `labels` (normalized complex Gaussian).
pub fn random_state<R: Rng + ?Sized>(labels: &[Label], rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<Complex64> = (0..1usize << labels.len())
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let amps = amps.into_iter().map(|a| a / norm).collect();
            return StateVector::new(labels.to_vec(), amps).expect("normalized");
        }
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `count` unit-modulus phases `e^{iφ}` with uniform `φ`.
pub fn random_phases<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Complex64> {
    (0..count)
        .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Uniform rank in `1..=(2^N)!`.
pub fn random_rank<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PermRank> {
    let count = set_count(n)?;
    let mut r = ChaCha8Rng::from_seed(rng.gen());
    Ok(PermRank::new(r.gen_biguint_below(&count) + BigUint::one()))
}

/// Independent generator for trial `index` of a sweep seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Which runs a verification sweep performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// Every rank, every forced `(a, b)`, `reps` random `(ξ, t)` each.
    Exhaustive { n: usize, reps: usize },
    /// Random rank and `(ξ, t)` per trial; outcomes forced at random or
    /// sampled by the measurements.
    Sampled {
        n: usize,
        trials: usize,
        forced: bool,
    },
}

impl Sweep {
    pub fn n(&self) -> usize {
        match *self {
            Sweep::Exhaustive { n, .. } | Sweep::Sampled { n, .. } => n,
        }
    }
}

/// Largest `N` accepted for exhaustive sweeps.
pub const EXHAUSTIVE_MAX_QUBITS: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub trials: usize,
    pub min_fidelity: f64,
    pub max_deviation: f64,
    /// Largest `|branch_prob − 1/4^N|`.
    pub max_branch_prob_error: f64,
    /// Largest weight outside `|a b⟩` on the `A`/`B` registers.
    pub max_ab_leak: f64,
    /// Runs per outcome, keyed `"a=…,b=…"`.
    pub histogram: BTreeMap<String, usize>,
    pub failures: usize,
}

impl VerifyReport {
    pub fn passed(&self, min_fidelity: f64) -> bool {
        self.failures == 0 && self.min_fidelity >= min_fidelity
    }
}

/// Result of checking one run against the direct application `T|ξ⟩`.
#[derive(Clone, Debug)]
pub struct TrialCheck {
    pub fidelity: f64,
    pub deviation: f64,
    pub branch_prob: f64,
    pub ab_leak: f64,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

/// Runs the protocol and compares the `Y` register with the dense product
/// `T · ξ`.
pub fn check_run(cfg: &ProtocolConfig, xi: &StateVector) -> Result<TrialCheck> {
    let (joint, tr) = run_protocol(cfg, xi)?;
    let (y, weight) = joint.y_register(&tr.a, &tr.b)?;
    let direct = cfg.operation()?.to_dense().apply_vec(xi.amps())?;
    let expected = StateVector::unnormalized(y_labels(cfg.n), direct)?.normalized()?;
    Ok(TrialCheck {
        fidelity: y.fidelity(&expected)?,
        deviation: y.max_abs_diff(&expected)?,
        branch_prob: tr.branch_prob,
        ab_leak: (1.0 - weight).abs(),
        a: tr.a,
        b: tr.b,
    })
}

fn outcome_bits(index: usize, n: usize) -> (Vec<u8>, Vec<u8>) {
    let bit = |k: usize| ((index >> k) & 1) as u8;
    let b = (0..n).map(|m| bit(2 * n - 1 - m)).collect();
    let a = (0..n).map(|m| bit(n - 1 - m)).collect();
    (a, b)
}

fn trial_case(sweep: Sweep, seed: u64, index: usize) -> Result<TrialCheck> {
    let n = sweep.n();
    let mut rng = trial_rng(seed, index as u64);
    let xi = random_state(&y_labels(n), &mut rng);
    let phases = random_phases(1 << n, &mut rng);
    let cfg = match sweep {
        Sweep::Exhaustive { reps, .. } => {
            let outcomes = 1usize << (2 * n);
            let per_rank = outcomes * reps;
            let x = PermRank::from((index / per_rank) as u64 + 1);
            let (a, b) = outcome_bits((index % per_rank) / reps, n);
            ProtocolConfig::new(n, x, phases).forced(b, a)
        }
        Sweep::Sampled { forced, .. } => {
            let x = random_rank(n, &mut rng)?;
            let cfg = ProtocolConfig::new(n, x, phases).seed(rng.gen());
            if forced {
                let (a, b) = outcome_bits(rng.gen_range(0..1usize << (2 * n)), n);
                cfg.forced(b, a)
            } else {
                cfg
            }
        }
    };
    check_run(&cfg, &xi)
}

/// Runs a verification sweep. Each trial draws from its own generator
/// derived from `(seed, index)`, so results do not depend on `exec`.
pub fn verify(sweep: Sweep, seed: u64, exec: Execution) -> Result<VerifyReport> {
    let n = sweep.n();
    if n == 0 || n > DEFAULT_MAX_QUBITS {
        return Err(Error::CapExceeded {
            what: "N",
            value: n,
            cap: DEFAULT_MAX_QUBITS,
        });
    }
    let trials = match sweep {
        Sweep::Exhaustive { reps, .. } => {
            if n > EXHAUSTIVE_MAX_QUBITS {
                return Err(Error::CapExceeded {
                    what: "N (exhaustive)",
                    value: n,
                    cap: EXHAUSTIVE_MAX_QUBITS,
                });
            }
            let ranks = set_count(n)?.to_usize().expect("small");
            ranks * (1 << (2 * n)) * reps
        }
        Sweep::Sampled { trials, .. } => trials,
    };
    let checks = par::map_indices(trials, exec, |i| trial_case(sweep, seed, i));
    let want_prob = 0.25f64.powi(n as i32);
    let mut report = VerifyReport {
        n,
        trials,
        min_fidelity: 1.0,
        max_deviation: 0.0,
        max_branch_prob_error: 0.0,
        max_ab_leak: 0.0,
        histogram: BTreeMap::new(),
        failures: 0,
    };
    for c in checks {
        let c = c?;
        report.min_fidelity = report.min_fidelity.min(c.fidelity);
        report.max_deviation = report.max_deviation.max(c.deviation);
        report.max_branch_prob_error = report
            .max_branch_prob_error
            .max((c.branch_prob - want_prob).abs());
        report.max_ab_leak = report.max_ab_leak.max(c.ab_leak);
        if c.fidelity < 1.0 - NORM_TOL || c.deviation > NORM_TOL {
            report.failures += 1;
        }
        let key = format!("a={},b={}", bit_string(&c.a), bit_string(&c.b));
        *report.histogram.entry(key).or_default() += 1;
    }
    Ok(report)
}
