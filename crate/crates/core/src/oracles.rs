//! Closed-form reference values and brute-force recomputations.

use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, PovmChannel};
use crate::error::{Error, Result};
use crate::groups::GroupRep;
use crate::linalg::{kron, ComplexMatrix, C64};

/// Largest input dimension the brute-force oracles accept by default.
pub const BRUTE_FORCE_MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: Vec<(String, f64)>,
    pub value: f64,
}

impl SweepPoint {
    pub fn new(params: &[(&str, f64)], value: f64) -> Result<Self> {
        if !value.is_finite() || value < -1e-9 {
            return Err(Error::Numerical(format!(
                "sweep value {value} is not a finite nonnegative number"
            )));
        }
        Ok(Self {
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
        })
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

fn check_nonneg(what: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "{what} = {x} must be finite and ≥ 0"
        )));
    }
    Ok(())
}

/// X asymmetry of amplitude damping: ½(1 − e^{−Γt})².
pub fn amp_damp_x_asymmetry(gamma_rate: f64, t: f64) -> Result<f64> {
    check_nonneg("Γ", gamma_rate)?;
    check_nonneg("t", t)?;
    let gamma = -(-gamma_rate * t).exp_m1();
    Ok(0.5 * gamma * gamma)
}

/// X₁X₂ asymmetry of the damped XX chain. With x = Γt and y = Jt,
///
/// e^{−2x}(−x² cos 4y − 16y² cosh x + (16y² + x²) cosh 2x) / (32y² + 2x²),
///
/// defined as 0 at x = y = 0. At J = 0 this reduces to e^{−2x}(cosh 2x − 1)/2.
pub fn spin_chain_xx_asymmetry(j: f64, gamma_rate: f64, t: f64) -> Result<f64> {
    if !j.is_finite() {
        return Err(Error::InvalidInput(format!("J = {j} must be finite")));
    }
    check_nonneg("Γ", gamma_rate)?;
    check_nonneg("t", t)?;
    let x = gamma_rate * t;
    let y = j * t;
    let den = 32.0 * y * y + 2.0 * x * x;
    if den == 0.0 {
        return Ok(0.0);
    }
    let num = -x * x * (4.0 * y).cos() - 16.0 * y * y * x.cosh()
        + (16.0 * y * y + x * x) * (2.0 * x).cosh();
    Ok((-2.0 * x).exp() * num / den)
}

/// Choi matrix (id ⊗ 𝒩)(|Φ⟩⟨Φ|) formed from the explicit maximally entangled
/// vector, one Kraus operator at a time.
fn raw_choi(kraus: &[ComplexMatrix], din: usize) -> ComplexMatrix {
    let mut phi = vec![C64::new(0.0, 0.0); din * din];
    for i in 0..din {
        phi[i * din + i] = C64::new(1.0 / (din as f64).sqrt(), 0.0);
    }
    let phi = ComplexMatrix::outer(&phi, &phi);
    let id = ComplexMatrix::identity(din);
    let dout = kraus[0].rows();
    let mut out = ComplexMatrix::zeros(din * dout, din * dout);
    for k in kraus {
        let big = kron(&id, k);
        out = &out + &(&(&big * &phi) * &big.adjoint());
    }
    out
}

fn frob_sq(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = (a - b).norm();
    n * n
}

/// (1/|G|) Σ_g ‖Φ^{𝒱(g)∘𝒩} − Φ^{𝒩∘𝒰(g)}‖₂², from raw Choi matrices.
pub fn brute_force_channel_asymmetry(ch: &KrausChannel, rep: &GroupRep) -> Result<f64> {
    brute_force_channel_asymmetry_capped(ch, rep, BRUTE_FORCE_MAX_DIM)
}

pub fn brute_force_channel_asymmetry_capped(
    ch: &KrausChannel,
    rep: &GroupRep,
    max_dim: usize,
) -> Result<f64> {
    let (din, dout) = (ch.in_dim(), ch.out_dim());
    if din > max_dim || dout > max_dim {
        return Err(Error::InvalidInput(format!(
            "brute-force oracle limited to dimension {max_dim}, channel maps {din}→{dout}"
        )));
    }
    if rep.dim() != din || rep.out_dim() != dout {
        return Err(Error::dims(
            "brute_force_channel_asymmetry",
            "representation does not match channel",
        ));
    }
    let mut acc = 0.0;
    for g in 0..rep.order() {
        let (u, v) = (rep.element(g), rep.out_element(g));
        let left: Vec<ComplexMatrix> = ch.kraus_ops().iter().map(|k| v * k).collect();
        let right: Vec<ComplexMatrix> = ch.kraus_ops().iter().map(|k| k * u).collect();
        acc += frob_sq(&raw_choi(&left, din), &raw_choi(&right, din));
    }
    Ok(acc / rep.order() as f64)
}

/// (1/|G|) Σ_g ‖UρU† − ρ‖₂².
pub fn brute_force_state_asymmetry(rho: &ComplexMatrix, rep: &GroupRep) -> Result<f64> {
    if rep.dim() != rho.rows() {
        return Err(Error::dims(
            "brute_force_state_asymmetry",
            "representation does not match state",
        ));
    }
    let acc: f64 = rep
        .elements()
        .iter()
        .map(|u| frob_sq(&(&(u * rho) * &u.adjoint()), rho))
        .sum();
    Ok(acc / rep.order() as f64)
}

/// Choi matrix of the dephased measurement channel, entry by entry:
/// (1/d) Σ_{ij} |i⟩⟨j| ⊗ Σ_x ⟨j|N_x|i⟩ |x⟩⟨x|.
fn measurement_choi(effects: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let k = effects.len();
    let mut m = ComplexMatrix::zeros(d * k, d * k);
    for i in 0..d {
        for j in 0..d {
            for (x, e) in effects.iter().enumerate() {
                m[(i * k + x, j * k + x)] = e[(j, i)] / d as f64;
            }
        }
    }
    m
}

/// (1/|G|) Σ_g ‖Φ^{𝒲(g)∘𝒩} − Φ^{𝒩∘𝒰(g)}‖₂² for a measurement channel.
pub fn brute_force_measurement_asymmetry(povm: &PovmChannel, rep: &GroupRep) -> Result<f64> {
    let d = povm.in_dim();
    if d > BRUTE_FORCE_MAX_DIM {
        return Err(Error::InvalidInput(format!(
            "brute-force oracle limited to dimension {BRUTE_FORCE_MAX_DIM}"
        )));
    }
    let perms = rep
        .out_perm()
        .ok_or_else(|| Error::InvalidInput("representation has no outcome permutations".into()))?;
    let k = povm.outcomes();
    let mut acc = 0.0;
    for (g, perm) in perms.iter().enumerate() {
        let u = rep.element(g);
        // 𝒲∘𝒩 has effect N_x at label π(x); 𝒩∘𝒰 has effects U†N_xU.
        let mut shifted = vec![ComplexMatrix::zeros(d, d); k];
        for (x, e) in povm.effects().iter().enumerate() {
            shifted[perm[x]] = e.clone();
        }
        let rotated: Vec<ComplexMatrix> = povm
            .effects()
            .iter()
            .map(|e| &(&u.adjoint() * e) * u)
            .collect();
        acc += frob_sq(
            &measurement_choi(&shifted, d),
            &measurement_choi(&rotated, d),
        );
    }
    Ok(acc / rep.order() as f64)
}
