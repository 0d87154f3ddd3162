//! Named-stream seed splitting.
//!
//! Every random draw in a run descends from one root seed. A child seed is
//! `SHA-256(parent_le_bytes || name)` truncated to 64 bits, so the value of a
//! stream depends only on its path of names and never on scheduling order.
//!
//! Stream names used by the pipeline:
//!
//! | path                         | consumer                                  |
//! |------------------------------|-------------------------------------------|
//! | `trace-<k>`                  | episode seed of the k-th sampling attempt |
//! | `<episode>/init`             | initial position draw                     |
//! | `<episode>/target`           | landing target draw                       |
//! | `<episode>/perception`       | bounded pixel perturbation                |
//! | `heldout`                    | held-out validation traces                |
//! | `partition-<i>`              | sub-run for the i-th initial-set cell     |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const INIT: &str = "init";
pub const TARGET: &str = "target";
pub const PERCEPTION: &str = "perception";
pub const HELDOUT: &str = "heldout";

/// Derives the seed of the child stream `name` of `parent`.
pub fn derive(parent: u64, name: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(parent.to_le_bytes());
    h.update(name.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn trace_stream(k: usize) -> String {
    format!("trace-{k}")
}

pub fn partition_stream(i: usize) -> String {
    format!("partition-{i}")
}

/// A generator for the child stream `name` of `parent`.
pub fn rng(parent: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(parent, name))
}
