#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symtest::linalg::{kron, ComplexMatrix, C64};
use symtest::random::{random_channel, random_unitary};
use symtest::KrausChannel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random channel pair sharing input/output dimensions in {2, 4} with
/// Kraus ranks in 1..=3.
pub fn channel_pair(rng: &mut ChaCha8Rng) -> (KrausChannel, KrausChannel) {
    let din = if rng.random_bool(0.5) { 2 } else { 4 };
    let dout = if rng.random_bool(0.5) { 2 } else { 4 };
    let draw = |rng: &mut ChaCha8Rng| loop {
        let rank = rng.random_range(1..=3);
        if let Ok(ch) = random_channel(din, dout, rank, rng) {
            return ch;
        }
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

/// |Φ⟩⟨Φ| on ℂ^d ⊗ ℂ^d.
pub fn max_entangled(d: usize) -> ComplexMatrix {
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    ComplexMatrix::outer(&v, &v)
}

/// (id ⊗ 𝒩) applied to an operator on ℂ^{d_in} ⊗ ℂ^{d_in}.
pub fn apply_second(ch: &KrausChannel, x: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(ch.in_dim());
    let dout = ch.out_dim();
    let n = ch.in_dim() * dout;
    let mut out = ComplexMatrix::zeros(n, n);
    for k in ch.kraus_ops() {
        let big = kron(&id, k);
        out = &out + &(&(&big * x) * &big.adjoint());
    }
    out
}

pub fn random_unitary_channel(d: usize, rng: &mut ChaCha8Rng) -> (ComplexMatrix, KrausChannel) {
    let u = random_unitary(d, rng);
    let ch = KrausChannel::unitary(&u).unwrap();
    (u, ch)
}
