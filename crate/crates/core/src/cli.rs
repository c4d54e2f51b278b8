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

//! The `rio` command-line harness.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure,
//! 3 matrix not in a restricted set.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::par::Execution;
use crate::protocol::{
    self, bit_string, parse_bits, random_state, run_protocol, trial_rng, y_labels, ProtocolConfig,
    Sweep, PASS_FIDELITY,
};
use crate::resources::{self, XEncoding};
use crate::restricted::{self, PermRank, CLASSIFY_EPS};
use crate::statevec::{DenseOperator, StateVector};
use crate::swapnet;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_NOT_RESTRICTED: i32 = 3;

/// Largest `N` the `enumerate` subcommand will list.
pub const ENUMERATE_MAX_QUBITS: usize = 3;

#[derive(Parser, Debug)]
#[command(
    name = "rio",
    version,
    about = "Remote implementation of restricted-set quantum operations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteKind {
    Adjacent,
    Forward,
    Backward,
    Lambda,
    Omega,
    Upsilon,
    Gamma,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the protocol once and check the result against T|ξ⟩.
    Run {
        #[arg(long)]
        n: usize,
        /// Restricted-set index, 1-based decimal.
        #[arg(long)]
        x: String,
        /// Comma-separated phases: angles in radians, or complex values
        /// written `re+imi`. Defaults to all ones.
        #[arg(long, allow_hyphen_values = true)]
        phases: Option<String>,
        /// Input state file for ξ; random from the seed when omitted.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Forced outcomes of Bob's measurements.
        #[arg(long)]
        b: Option<String>,
        /// Forced outcomes of Alice's measurements.
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bob fixes b before the run, so no b message is sent.
        #[arg(long)]
        bob_fixed_b: bool,
        #[arg(long)]
        out_state: Option<PathBuf>,
        #[arg(long)]
        out_transcript: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a verification sweep.
    Verify {
        #[arg(long)]
        n: usize,
        /// Every rank and every forced outcome pair.
        #[arg(long)]
        exhaustive: bool,
        /// Random (ξ, t) per (x, outcome) in exhaustive mode.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Trials in sampled mode.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Sample outcomes from the measurements instead of forcing them.
        #[arg(long)]
        unforced: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the permutations p(x) in rank order.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Recover (x, t) from a matrix file.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = CLASSIFY_EPS)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// E-bit and c-bit costs, with the bidirectional teleportation baseline.
    Resources {
        #[arg(long)]
        n: usize,
        /// `floor` (floor + 1) or `tight` (ceil).
        #[arg(long, default_value = "floor")]
        encoding: String,
        #[arg(long)]
        bob_fixed_b: bool,
    },
    /// Print the destinations of a qubit routing (1-based).
    Route {
        #[arg(long, value_enum)]
        kind: RouteKind,
        /// Pairs N for the block routings, register size for the others.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Parses one phase: a bare number is an angle `φ` giving `e^{iφ}`;
/// a value containing `i` is an explicit complex number.
pub fn parse_phase(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::BadParameter(format!("bad phase {s:?}"));
    let Some(body) = s.strip_suffix('i') else {
        let angle: f64 = s.parse().map_err(|_| bad())?;
        return Ok(Complex64::from_polar(1.0, angle));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => t.parse().map_err(|_| bad()),
        }
    };
    let (re, im) = match split {
        Some(k) => (body[..k].parse().map_err(|_| bad())?, coef(&body[k..])?),
        None => (0.0, coef(body)?),
    };
    let z = Complex64::new(re, im);
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

pub fn parse_phases(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_phase).collect()
}

/// Parses arguments and runs the selected subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NotRestricted(_) => EXIT_NOT_RESTRICTED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Run {
            n,
            x,
            phases,
            state,
            b,
            a,
            seed,
            bob_fixed_b,
            out_state,
            out_transcript,
            format,
        } => {
            let x: PermRank = x.parse()?;
            let phases = match phases {
                Some(p) => parse_phases(&p)?,
                None => vec![Complex64::new(1.0, 0.0); 1usize.checked_shl(n as u32).unwrap_or(0)],
            };
            let mut cfg = ProtocolConfig::new(n, x, phases).seed(seed);
            cfg.forced_b = b.as_deref().map(parse_bits).transpose()?;
            cfg.forced_a = a.as_deref().map(parse_bits).transpose()?;
            cfg.bob_fixed_b = bob_fixed_b;
            cfg.validate()?;
            let xi = match state {
                Some(path) => StateVector::read_json(path)?,
                None => random_state(&y_labels(n), &mut trial_rng(seed, u64::MAX)),
            };
            cmd_run(&cfg, &xi, out_state, out_transcript, format, out)
        }
        Command::Verify {
            n,
            exhaustive,
            reps,
            trials,
            unforced,
            seed,
            sequential,
            format,
        } => {
            let sweep = if exhaustive {
                Sweep::Exhaustive { n, reps }
            } else {
                Sweep::Sampled {
                    n,
                    trials,
                    forced: !unforced,
                }
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let report = protocol::verify(sweep, seed, exec)?;
            let passed = report.passed(PASS_FIDELITY);
            match format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report)?;
                    v["passed"] = json!(passed);
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                Format::Text => {
                    writeln!(
                        out,
                        "n={} trials={} min_fidelity={:.15} max_deviation={:.3e} failures={} {}",
                        report.n,
                        report.trials,
                        report.min_fidelity,
                        report.max_deviation,
                        report.failures,
                        if passed { "PASS" } else { "FAIL" }
                    )?;
                }
            }
            Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Enumerate { n } => {
            if n == 0 || n > ENUMERATE_MAX_QUBITS {
                return Err(Error::CapExceeded {
                    what: "N (enumerate)",
                    value: n,
                    cap: ENUMERATE_MAX_QUBITS,
                });
            }
            for p in restricted::enumerate(n) {
                writeln!(out, "{p}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify {
            matrix,
            eps,
            format,
        } => {
            let m = DenseOperator::read_json(matrix)?;
            let op = restricted::classify(&m, eps)?;
            match format {
                Format::Json => {
                    let v = json!({
                        "n": op.n_qubits(),
                        "x": op.rank().to_string(),
                        "permutation": op.perm().images(),
                        "phases": op.phases().iter().map(|t| [t.re, t.im]).collect::<Vec<_>>(),
                        "unitary": op.is_unitary(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                Format::Text => {
                    writeln!(out, "x = {}", op.rank())?;
                    for (m, t) in op.phases().iter().enumerate() {
                        writeln!(out, "t{} = {} {:+}i", m + 1, t.re, t.im)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Resources {
            n,
            encoding,
            bob_fixed_b,
        } => {
            let enc: XEncoding = encoding.parse()?;
            writeln!(out, "{}", resources::report_json(n, enc, bob_fixed_b)?)?;
            Ok(EXIT_OK)
        }
        Command::Route {
            kind,
            n,
            i,
            j,
            format,
        } => {
            let need = |v: Option<usize>, name: &str| {
                v.ok_or_else(|| Error::BadParameter(format!("--{name} is required for this kind")))
            };
            let r = match kind {
                RouteKind::Adjacent => swapnet::s_adjacent(n, need(i, "i")?)?,
                RouteKind::Forward => swapnet::f_forward(n, need(i, "i")?, need(j, "j")?)?,
                RouteKind::Backward => swapnet::p_backward(n, need(i, "i")?, need(j, "j")?)?,
                RouteKind::Lambda => swapnet::lambda_route(n)?,
                RouteKind::Omega => swapnet::omega_route(n)?,
                RouteKind::Upsilon => swapnet::upsilon_route(n)?,
                RouteKind::Gamma => swapnet::gamma_route(n)?,
            };
            let dest = r.dest_one_based();
            match format {
                Format::Json => {
                    let v = json!({
                        "kind": format!("{kind:?}").to_lowercase(),
                        "n": n,
                        "qubits": r.len(),
                        "dest": dest,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                Format::Text => {
                    let parts: Vec<String> = dest.iter().map(|d| d.to_string()).collect();
                    writeln!(out, "{}", parts.join(" "))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_run(
    cfg: &ProtocolConfig,
    xi: &StateVector,
    out_state: Option<PathBuf>,
    out_transcript: Option<PathBuf>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32> {
    let (joint, tr) = run_protocol(cfg, xi)?;
    let (y, _) = joint.y_register(&tr.a, &tr.b)?;
    let direct = cfg.operation()?.to_dense().apply_vec(xi.amps())?;
    let expected = StateVector::unnormalized(y_labels(cfg.n), direct)?.normalized()?;
    let fidelity = y.fidelity(&expected)?;
    let deviation = y.max_abs_diff(&expected)?;
    let passed = fidelity >= PASS_FIDELITY;

    if let Some(path) = out_state {
        joint.state().write_json(path)?;
    }
    if let Some(path) = out_transcript {
        std::fs::write(path, tr.to_json_string() + "\n")?;
    }
    match format {
        Format::Json => {
            let v = json!({
                "n": cfg.n,
                "x": cfg.x.to_string(),
                "b": bit_string(&tr.b),
                "a": bit_string(&tr.a),
                "branch_prob": tr.branch_prob,
                "fidelity": fidelity,
                "max_deviation": deviation,
                "passed": passed,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Text => {
            writeln!(
                out,
                "n={} x={} b={} a={} branch_prob={} fidelity={:.15} {}",
                cfg.n,
                cfg.x,
                bit_string(&tr.b),
                bit_string(&tr.a),
                tr.branch_prob,
                fidelity,
                if passed { "PASS" } else { "FAIL" }
            )?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_syntax() {
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-15;
        assert!(close(parse_phase("0").unwrap(), Complex64::new(1.0, 0.0)));
        assert!(close(
            parse_phase("3.141592653589793").unwrap(),
            Complex64::new(-1.0, 0.0)
        ));
        assert!(close(
            parse_phase("0.6+0.8i").unwrap(),
            Complex64::new(0.6, 0.8)
        ));
        assert!(close(
            parse_phase("0.6-0.8i").unwrap(),
            Complex64::new(0.6, -0.8)
        ));
        assert!(close(parse_phase("-i").unwrap(), Complex64::new(0.0, -1.0)));
        assert!(close(parse_phase("i").unwrap(), Complex64::new(0.0, 1.0)));
        assert!(close(
            parse_phase("2.5i").unwrap(),
            Complex64::new(0.0, 2.5)
        ));
        assert!(close(
            parse_phase("1e-3+1e+2i").unwrap(),
            Complex64::new(1e-3, 100.0)
        ));
        assert!(parse_phase("abc").is_err());
        assert!(parse_phase("1+xi").is_err());
        assert_eq!(parse_phases("0,0,i,-i").unwrap().len(), 4);
    }

    #[test]
    fn usage_errors_exit_one() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run(["rio", "bogus"], &mut out, &mut err), EXIT_USAGE);
        assert_eq!(
            run(["rio", "enumerate", "--n", "9"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(run(["rio", "--help"], &mut out, &mut err), EXIT_OK);
    }
}
