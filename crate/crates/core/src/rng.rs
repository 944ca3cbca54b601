//! Seeded randomness for generic choices. Every draw is a pure function of
//! the run seed, a purpose label and the attempt number.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn stream(seed: u64, label: &str, attempt: u32) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.update(attempt.to_le_bytes());
    let d = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&d[..32]);
    ChaCha8Rng::from_seed(key)
}

/// Nonzero integers in `[-bound, bound]`.
pub fn small_nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.random_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

pub fn small_ints(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Vec<i64> {
    (0..n).map(|_| small_nonzero(rng, bound)).collect()
}
