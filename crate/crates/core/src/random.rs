//! Random states, unitaries, channels and POVMs for tests and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{KrausChannel, PovmChannel};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_function, ComplexMatrix, C64};

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(r, c)] = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    m
}

/// Haar-random unitary: Gram–Schmidt on a Ginibre matrix, column by column.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(d, d, rng)
}

/// `rows × cols` matrix with orthonormal columns (rows ≥ cols).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows ≥ cols");
    let g = ginibre(rows, cols, rng);
    let mut q = ComplexMatrix::zeros(rows, cols);
    for c in 0..cols {
        let mut v = g.column(c);
        // two passes of modified Gram–Schmidt for stability
        for _ in 0..2 {
            for p in 0..c {
                let dot: C64 = (0..rows).map(|r| q[(r, p)].conj() * v[r]).sum();
                for (r, vr) in v.iter_mut().enumerate() {
                    *vr -= dot * q[(r, p)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (r, vr) in v.iter().enumerate() {
            q[(r, c)] = vr / norm;
        }
    }
    q
}

/// Random density matrix GG†/Tr[GG†] with G of shape d × rank.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale_real(1.0 / tr).hermitian_part()
}

/// Random channel with `rank` Kraus operators cut from a random isometry
/// ℂ^{d_in} → ℂ^{rank} ⊗ ℂ^{d_out}.
pub fn random_channel<R: Rng + ?Sized>(
    din: usize,
    dout: usize,
    rank: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if rank == 0 || rank * dout < din {
        return Err(Error::InvalidInput(format!(
            "rank {rank} with output dimension {dout} cannot carry a {din}-dimensional input"
        )));
    }
    let v = random_isometry(rank * dout, din, rng);
    let kraus = (0..rank)
        .map(|k| {
            let mut op = ComplexMatrix::zeros(dout, din);
            for a in 0..dout {
                for i in 0..din {
                    op[(a, i)] = v[(k * dout + a, i)];
                }
            }
            op
        })
        .collect();
    KrausChannel::new(din, dout, kraus)
}

/// Random POVM S^{-1/2} A_x S^{-1/2} with A_x = G_x G_x† and S = Σ A_x.
pub fn random_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Result<PovmChannel> {
    if outcomes == 0 {
        return Err(Error::InvalidInput(
            "POVM needs at least one outcome".into(),
        ));
    }
    let a: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * &g.adjoint()
        })
        .collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for x in &a {
        s = &s + x;
    }
    let inv_sqrt = hermitian_function(&s.hermitian_part(), |l| 1.0 / l.sqrt())?;
    let effects = a
        .iter()
        .map(|x| (&(&inv_sqrt * x) * &inv_sqrt).hermitian_part())
        .collect();
    PovmChannel::new(d, effects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 4] {
            assert!(random_unitary(d, &mut rng).is_unitary(1e-12));
            let rho = random_density(d, 2, &mut rng);
            crate::channels::validate_density(&rho, d, 1e-12).unwrap();
            for rank in 1..=3 {
                let ch = random_channel(d, d, rank, &mut rng).unwrap();
                assert_eq!(ch.num_kraus(), rank);
            }
            assert_eq!(random_povm(d, 3, &mut rng).unwrap().outcomes(), 3);
        }
        assert!(random_channel(4, 2, 1, &mut rng).is_err());
        assert!(random_channel(4, 2, 2, &mut rng).is_ok());
    }
}
