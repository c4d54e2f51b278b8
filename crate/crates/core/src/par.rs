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

//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the helpers fan work out on
//! the rayon global pool. Without it, or when [`Execution::Sequential`] is
//! requested, they run on the calling thread. Results are identical either
//! way: every item is computed independently and collected in index order.

/// How a batch of independent work items is executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Amplitude arrays below this length are always processed sequentially.
pub const PAR_THRESHOLD: usize = 1 << 12;

/// Maps `f` over `0..len`, collecting in order.
pub fn map_indices<T, F>(len: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Execution mode for an amplitude kernel of the given length.
pub(crate) fn for_len(len: usize) -> Execution {
    if len >= PAR_THRESHOLD {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let f = |i: usize| i * i + 1;
        let a = map_indices(1000, Execution::Sequential, f);
        let b = map_indices(1000, Execution::Parallel, f);
        assert_eq!(a, b);
    }
}
