#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabsynth::f2linalg::BinMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> BinMatrix {
    BinMatrix::from_fn(rows, cols, |_, _| rng.gen())
}

pub fn random_invertible(n: usize, rng: &mut ChaCha8Rng) -> BinMatrix {
    loop {
        let m = random_matrix(n, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> BinMatrix {
    let mut m = BinMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if rng.gen() {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    m
}

/// Independent reference product: the textbook triple loop over bools.
pub fn naive_mul(a: &BinMatrix, b: &BinMatrix) -> BinMatrix {
    BinMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).fold(false, |acc, k| acc ^ (a.get(i, k) & b.get(k, j))))
}
