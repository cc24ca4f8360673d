//! Seeded random graph families for tests, benchmarks and the `gen` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Erdős–Rényi G(n, p) on nodes `1..=n`.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(labels(n), edges)
}

/// G(n, p) conditioned on connectivity by rejection.
pub fn connected_gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if n > 1 && p == 0.0 {
        return Err(Error::InvalidParameter("p = 0 never gives a connected graph".into()));
    }
    loop {
        let g = gnp(n, p, rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
}

/// Uniform-ish simple cubic graph by pairing stubs with restarts.
pub fn cubic<R: Rng>(n: usize, rng: &mut R) -> Result<Graph> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("cubic graphs need an even n >= 4, got {n}")));
    }
    'retry: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
        stubs.shuffle(rng);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(3 * n / 2);
        for pair in stubs.chunks(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !seen.insert((a, b)) {
                continue 'retry;
            }
            edges.push((a, b));
        }
        let g = Graph::new(labels(n), edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_reproducible() {
        let a = gnp(8, 0.5, &mut rng(7)).unwrap();
        let b = gnp(8, 0.5, &mut rng(7)).unwrap();
        assert!(a.same_as(&b));
    }

    #[test]
    fn cubic_degrees() {
        for seed in 0..5 {
            let g = cubic(8, &mut rng(seed)).unwrap();
            assert!((0..8).all(|v| g.degree(v) == 3));
        }
        assert!(cubic(5, &mut rng(0)).is_err());
    }
}
