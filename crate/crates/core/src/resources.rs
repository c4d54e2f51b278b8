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

//! Entanglement (e-bit) and classical-bit (c-bit) accounting.

use serde::{Deserialize, Serialize};

use crate::protocol::{Direction, ProtocolTranscript};
use crate::restricted::set_count;
use crate::{Error, Result};

/// How many bits the restricted-set index `x` costs on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XEncoding {
    /// `⌊log₂((2^N)!)⌋ + 1`.
    FloorPlusOne,
    /// `⌈log₂((2^N)!)⌉`, the minimum that distinguishes every set.
    Tight,
}

impl std::str::FromStr for XEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" | "floor-plus-one" => Ok(XEncoding::FloorPlusOne),
            "tight" => Ok(XEncoding::Tight),
            _ => Err(Error::BadParameter(format!("unknown encoding {s:?}"))),
        }
    }
}

/// Bits needed to send `x` for `n_qubits`-qubit operations.
pub fn x_message_bits(n_qubits: usize, encoding: XEncoding) -> Result<usize> {
    let count = set_count(n_qubits)?;
    let floor_log2 = count.bits() as usize - 1;
    let is_pow2 = count.count_ones() == 1;
    Ok(match encoding {
        XEncoding::FloorPlusOne => floor_log2 + 1,
        XEncoding::Tight if is_pow2 => floor_log2,
        XEncoding::Tight => floor_log2 + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLedger {
    pub ebits: usize,
    pub cbits_b_to_a: usize,
    pub cbits_a_to_b: usize,
    /// `None` for baselines that never send `x`.
    pub x_encoding: Option<XEncoding>,
    pub bob_fixed_b: bool,
}

impl ResourceLedger {
    pub fn total_cbits(&self) -> usize {
        self.cbits_b_to_a + self.cbits_a_to_b
    }
}

/// Costs of one protocol run on `n_qubits` qubits.
///
/// When Bob fixes his measurement outcomes in advance the `N` Bob→Alice bits
/// are never sent.
pub fn ledger(n_qubits: usize, encoding: XEncoding, bob_fixed_b: bool) -> Result<ResourceLedger> {
    if n_qubits == 0 {
        return Err(Error::BadParameter("N must be at least 1".into()));
    }
    Ok(ResourceLedger {
        ebits: n_qubits,
        cbits_b_to_a: if bob_fixed_b { 0 } else { n_qubits },
        cbits_a_to_b: n_qubits + x_message_bits(n_qubits, encoding)?,
        x_encoding: Some(encoding),
        bob_fixed_b,
    })
}

/// Bidirectional state teleportation: `N` qubits out and back, one e-bit and
/// two c-bits per qubit per direction.
pub fn bqst_baseline(n_qubits: usize) -> Result<ResourceLedger> {
    if n_qubits == 0 {
        return Err(Error::BadParameter("N must be at least 1".into()));
    }
    Ok(ResourceLedger {
        ebits: 2 * n_qubits,
        cbits_b_to_a: 2 * n_qubits,
        cbits_a_to_b: 2 * n_qubits,
        x_encoding: None,
        bob_fixed_b: false,
    })
}

/// Counts the bits actually carried by a transcript's messages.
pub fn audit(transcript: &ProtocolTranscript) -> (usize, usize) {
    transcript
        .messages
        .iter()
        .fold((0, 0), |(b2a, a2b), m| match m.dir {
            Direction::BobToAlice => (b2a + m.bits.len(), a2b),
            Direction::AliceToBob => (b2a, a2b + m.bits.len()),
        })
}

#[derive(Serialize)]
struct CbitsJson {
    b_to_a: usize,
    a_to_b: usize,
    total: usize,
}

#[derive(Serialize)]
struct BaselineJson {
    ebits: usize,
    cbits: CbitsJson,
}

#[derive(Serialize)]
struct ReportJson {
    n: usize,
    encoding: XEncoding,
    bob_fixed_b: bool,
    ebits: usize,
    cbits: CbitsJson,
    bqst: BaselineJson,
}

fn cbits(l: &ResourceLedger) -> CbitsJson {
    CbitsJson {
        b_to_a: l.cbits_b_to_a,
        a_to_b: l.cbits_a_to_b,
        total: l.total_cbits(),
    }
}

/// JSON report emitted by the `resources` subcommand.
pub fn report_json(n_qubits: usize, encoding: XEncoding, bob_fixed_b: bool) -> Result<String> {
    let l = ledger(n_qubits, encoding, bob_fixed_b)?;
    let b = bqst_baseline(n_qubits)?;
    let r = ReportJson {
        n: n_qubits,
        encoding,
        bob_fixed_b,
        ebits: l.ebits,
        cbits: cbits(&l),
        bqst: BaselineJson {
            ebits: b.ebits,
            cbits: cbits(&b),
        },
    };
    Ok(serde_json::to_string_pretty(&r)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_counts() {
        let l = ledger(2, XEncoding::FloorPlusOne, false).unwrap();
        assert_eq!(
            (l.ebits, l.cbits_b_to_a, l.cbits_a_to_b, l.total_cbits()),
            (2, 2, 7, 9)
        );
        assert_eq!(x_message_bits(2, XEncoding::FloorPlusOne).unwrap(), 5);
        let fixed = ledger(2, XEncoding::FloorPlusOne, true).unwrap();
        assert_eq!((fixed.cbits_b_to_a, fixed.total_cbits()), (0, 7));
    }

    #[test]
    fn one_qubit_counts() {
        let l = ledger(1, XEncoding::Tight, false).unwrap();
        assert_eq!((l.ebits, l.total_cbits()), (1, 3));
        assert_eq!(ledger(1, XEncoding::Tight, true).unwrap().total_cbits(), 2);
        // the general formula over-allocates by one here
        assert_eq!(
            ledger(1, XEncoding::FloorPlusOne, false)
                .unwrap()
                .total_cbits(),
            4
        );
    }

    #[test]
    fn three_qubit_counts() {
        // 8! = 40320, ⌊log₂ 40320⌋ = 15
        let l = ledger(3, XEncoding::FloorPlusOne, false).unwrap();
        assert_eq!((l.ebits, l.total_cbits()), (3, 6 + 15 + 1));
    }

    #[test]
    fn formulas_differ_only_on_powers_of_two() {
        for n in 1..=8 {
            let floor = x_message_bits(n, XEncoding::FloorPlusOne).unwrap();
            let tight = x_message_bits(n, XEncoding::Tight).unwrap();
            let pow2 = set_count(n).unwrap().count_ones() == 1;
            assert_eq!(floor == tight + 1, pow2, "N = {n}");
            assert!(floor == tight || floor == tight + 1);
        }
    }

    #[test]
    fn baseline() {
        let b1 = bqst_baseline(1).unwrap();
        assert_eq!((b1.ebits, b1.total_cbits()), (2, 4));
        let b2 = bqst_baseline(2).unwrap();
        assert_eq!((b2.ebits, b2.total_cbits()), (4, 8));
        for n in 1..=6 {
            let l = ledger(n, XEncoding::Tight, false).unwrap();
            assert_eq!(2 * l.ebits, bqst_baseline(n).unwrap().ebits);
        }
        assert!(bqst_baseline(0).is_err());
        assert!(ledger(0, XEncoding::Tight, false).is_err());
    }

    #[test]
    fn report_shape() {
        let v: serde_json::Value =
            serde_json::from_str(&report_json(2, XEncoding::FloorPlusOne, false).unwrap()).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["ebits"], 2);
        assert_eq!(v["cbits"]["total"], 9);
        assert_eq!(v["cbits"]["b_to_a"], 2);
        assert_eq!(v["bqst"]["ebits"], 4);
        assert_eq!(v["encoding"], "floor-plus-one");
    }
}
