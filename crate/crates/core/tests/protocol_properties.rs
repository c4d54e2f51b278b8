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

//! Protocol-level properties and resource accounting.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use rio_core::protocol::{
    init_state, random_phases, random_rank, random_state, run_protocol, trial_rng, y_labels,
    ProtocolConfig,
};
use rio_core::resources::{audit, ledger, x_message_bits, XEncoding};
use rio_core::restricted::{set_count, PermRank, RestrictedOp};
use rio_core::statevec::{DenseOperator, Label, StateVector};

const TOL: f64 = 1e-12;

fn bits_of(v: usize, width: usize) -> Vec<u8> {
    (0..width)
        .map(|k| ((v >> (width - 1 - k)) & 1) as u8)
        .collect()
}

fn final_y(cfg: &ProtocolConfig, xi: &StateVector) -> (StateVector, f64, f64) {
    let (joint, tr) = run_protocol(cfg, xi).unwrap();
    let (y, weight) = joint.y_register(&tr.a, &tr.b).unwrap();
    (y, weight, tr.branch_prob)
}

fn expected(n: usize, x: &PermRank, t: &[Complex64], xi: &StateVector) -> Vec<Complex64> {
    RestrictedOp::build_t(n, x, t.to_vec())
        .unwrap()
        .apply_to(xi.amps())
        .unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_outcome_gives_t_xi(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let xi = random_state(&y_labels(n), &mut rng);
        let t = random_phases(1 << n, &mut rng);
        let x = random_rank(n, &mut rng).unwrap();
        let want = expected(n, &x, &t, &xi);
        let mut prob_sum = 0.0;
        for o in 0..1usize << (2 * n) {
            let bits = bits_of(o, 2 * n);
            let cfg = ProtocolConfig::new(n, x.clone(), t.clone())
                .forced(bits[..n].to_vec(), bits[n..].to_vec());
            let (y, weight, prob) = final_y(&cfg, &xi);
            prop_assert!(max_diff(y.amps(), &want) < TOL);
            prop_assert!((weight - 1.0).abs() < TOL);
            prop_assert!((prob - 0.25f64.powi(n as i32)).abs() < TOL);
            prob_sum += prob;
        }
        prop_assert!((prob_sum - 1.0).abs() < TOL);
    }

    #[test]
    fn result_does_not_depend_on_b(n in 1usize..=2, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 1);
        let xi = random_state(&y_labels(n), &mut rng);
        let t = random_phases(1 << n, &mut rng);
        let x = random_rank(n, &mut rng).unwrap();
        let a = bits_of(rng.gen_range(0..1usize << n), n);
        let runs: Vec<StateVector> = (0..1usize << n)
            .map(|b| {
                let cfg = ProtocolConfig::new(n, x.clone(), t.clone()).forced(bits_of(b, n), a.clone());
                final_y(&cfg, &xi).0
            })
            .collect();
        for r in &runs[1..] {
            prop_assert!(r.max_abs_diff(&runs[0]).unwrap() < TOL);
        }
    }

    #[test]
    fn unforced_runs_are_seed_reproducible(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 2);
        let xi = random_state(&y_labels(n), &mut rng);
        let x = random_rank(n, &mut rng).unwrap();
        let cfg = ProtocolConfig::new(n, x, random_phases(1 << n, &mut rng)).seed(seed);
        let (j1, t1) = run_protocol(&cfg, &xi).unwrap();
        let (j2, t2) = run_protocol(&cfg, &xi).unwrap();
        prop_assert_eq!(j1.state().amps(), j2.state().amps());
        prop_assert_eq!(t1.to_json_string(), t2.to_json_string());
    }

    #[test]
    fn transcript_matches_ledger(n in 1usize..=3, fixed in any::<bool>(), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 3);
        let xi = random_state(&y_labels(n), &mut rng);
        let x = random_rank(n, &mut rng).unwrap();
        let mut cfg = ProtocolConfig::new(n, x, random_phases(1 << n, &mut rng)).seed(seed);
        cfg.bob_fixed_b = fixed;
        let (_, tr) = run_protocol(&cfg, &xi).unwrap();
        let l = ledger(n, XEncoding::Tight, fixed).unwrap();
        prop_assert_eq!(audit(&tr), (l.cbits_b_to_a, l.cbits_a_to_b));
        prop_assert_eq!(l.cbits_b_to_a == 0, fixed);
    }
}

#[test]
fn ebits_match_bell_factors() {
    for n in 1..=4usize {
        // with ξ = |0…0⟩ the state is ⊗|Φ⁺⟩ ⊗ |0…0⟩: 2^N equal nonzero amplitudes
        let xi = StateVector::basis_state(&y_labels(n), &vec![0; n]).unwrap();
        let s = init_state(n, &xi).unwrap();
        let nonzero: Vec<&Complex64> = s.state().amps().iter().filter(|z| z.norm() > 0.0).collect();
        let pairs = nonzero.len().trailing_zeros() as usize;
        assert_eq!(nonzero.len(), 1 << pairs);
        let amp = (0.5f64).powf(pairs as f64 / 2.0);
        assert!(nonzero
            .iter()
            .all(|z| (z.re - amp).abs() < TOL && z.im == 0.0));
        assert_eq!(ledger(n, XEncoding::Tight, false).unwrap().ebits, pairs);
    }
}

#[test]
fn floor_plus_one_exceeds_tight_only_for_powers_of_two() {
    for n in 1..=8usize {
        let count = set_count(n).unwrap();
        let power_of_two = count.count_ones() == 1;
        let floor = x_message_bits(n, XEncoding::FloorPlusOne).unwrap();
        let tight = x_message_bits(n, XEncoding::Tight).unwrap();
        assert_eq!(floor == tight + 1, power_of_two, "N={n}");
        assert!(floor == tight || floor == tight + 1);
        assert_eq!(power_of_two, n == 1);
    }
}

#[test]
fn flip_by_outcome_sends_b_to_zero() {
    let sigma = |b: u8| DenseOperator::pauli(b).unwrap();
    let q = [Label::y(1)];
    for b in 0..2u8 {
        let same = StateVector::basis_state(&q, &[b]).unwrap();
        let other = StateVector::basis_state(&q, &[1 - b]).unwrap();
        let zero = StateVector::basis_state(&q, &[0]).unwrap();
        let one = StateVector::basis_state(&q, &[1]).unwrap();
        assert_eq!(same.apply_on(&sigma(b), &q).unwrap(), zero);
        assert_eq!(other.apply_on(&sigma(b), &q).unwrap(), one);
    }
}

#[test]
fn hadamard_overlap_with_sign_is_constant() {
    let h = DenseOperator::hadamard();
    for a in 0..2usize {
        for j in 0..2usize {
            let sign = if a * j == 1 { -1.0 } else { 1.0 };
            let v = h.entry(a, j) * sign;
            assert!((v - Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        }
    }
}
