//! Exhaustive failure-pattern verification.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{GraphCode, OracleDecoder};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Also require bit-identical agreement with the oracle decoder.
    pub compare_oracle: bool,
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { trials: 10, seed: 0, compare_oracle: false, jobs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternFailure {
    pub failed_nodes: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub family: String,
    pub n: usize,
    pub q: u32,
    pub rho: usize,
    pub patterns_total: usize,
    pub patterns_ok: usize,
    pub failures: Vec<PatternFailure>,
    pub elapsed_ms: u128,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.patterns_ok == self.patterns_total
    }
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn failure_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < n - k + p) else {
            return out;
        };
        cur[pos] += 1;
        for p in pos + 1..k {
            cur[p] = cur[p - 1] + 1;
        }
    }
}

/// Seed for one (pattern, trial) cell, independent of scheduling.
pub fn pattern_seed(seed: u64, pattern: usize, trial: usize) -> u64 {
    let mut z = seed ^ (pattern as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).rotate_left(32);
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_pattern(code: &dyn GraphCode, idx: usize, failed: &[usize], opts: &VerifyOptions) -> Result<(), String> {
    let spec = code.spec();
    let q = spec.field().order();
    let oracle = if opts.compare_oracle {
        Some(OracleDecoder::for_failure(spec, failed).map_err(|e| e.to_string())?)
    } else {
        None
    };
    for trial in 0..opts.trials.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(pattern_seed(opts.seed, idx, trial));
        let info: Vec<u32> = (0..code.info_len()).map(|_| rng.gen_range(0..q)).collect();
        let word = code.encode(&info).map_err(|e| format!("encode: {e}"))?;
        let erased = word.apply_erasure(failed).map_err(|e| e.to_string())?;
        let decoded = code.decode(&erased).map_err(|e| e.to_string())?;
        if decoded.graph != word {
            return Err(format!("trial {trial}: decoded graph differs from the original"));
        }
        if let Some(oracle) = &oracle {
            let reference = oracle.decode(&erased).map_err(|e| format!("oracle: {e}"))?;
            if reference.graph != decoded.graph {
                return Err(format!("trial {trial}: decoded graph differs from the oracle"));
            }
        }
    }
    Ok(())
}

/// Runs every `rho`-node failure pattern against `trials` random codewords.
pub fn verify_exhaustive(code: &dyn GraphCode, rho: usize, opts: &VerifyOptions) -> VerifyReport {
    let start = Instant::now();
    let spec = code.spec();
    let patterns = failure_sets(spec.n(), rho);
    let run = |(idx, failed): (usize, &Vec<usize>)| {
        check_pattern(code, idx, failed, opts)
            .err()
            .map(|reason| PatternFailure { failed_nodes: failed.clone(), reason })
    };
    let failures: Vec<PatternFailure> = if opts.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
        pool.install(|| patterns.par_iter().enumerate().filter_map(run).collect())
    } else {
        patterns.iter().enumerate().filter_map(run).collect()
    };
    VerifyReport {
        family: spec.family().to_string(),
        n: spec.n(),
        q: spec.field().order(),
        rho,
        patterns_total: patterns.len(),
        patterns_ok: patterns.len() - failures.len(),
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets() {
        assert_eq!(failure_sets(4, 2).len(), 6);
        assert_eq!(failure_sets(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(failure_sets(3, 3), vec![vec![0, 1, 2]]);
        assert!(failure_sets(2, 3).is_empty());
        assert_eq!(failure_sets(13, 3).len(), 286);
        assert_eq!(failure_sets(5, 2)[..3], [vec![0, 1], vec![0, 2], vec![0, 3]]);
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(pattern_seed(0, 0, 0), pattern_seed(0, 0, 1));
        assert_ne!(pattern_seed(0, 1, 0), pattern_seed(0, 0, 1));
        assert_eq!(pattern_seed(5, 2, 3), pattern_seed(5, 2, 3));
    }
}
