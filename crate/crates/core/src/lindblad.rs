//! Lindblad generators, column-stacking vectorization, the exact channel
//! e^{ℒt} and its symmetric Trotter realization.
//!
//! Vectorization stacks columns: vec(ρ)[i + d·j] = ρ[i, j], so AρB ↦ (Bᵀ ⊗ A).

use crate::channels::{self, compose, ChoiState, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{gates, kron, matexp, ComplexMatrix, C64};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Jump {
    pub op: ComplexMatrix,
    pub rate: f64,
}

/// H together with jump operators L_k and rates Γ_k.
///
/// `hamiltonian_terms`, when non-empty, splits H into the pieces that the
/// Trotter realization exponentiates one at a time.
#[derive(Clone, Debug)]
pub struct LindbladSpec {
    dim: usize,
    hamiltonian: ComplexMatrix,
    hamiltonian_terms: Vec<ComplexMatrix>,
    jumps: Vec<Jump>,
}

impl LindbladSpec {
    pub fn new(dim: usize, hamiltonian: ComplexMatrix, jumps: Vec<Jump>) -> Result<Self> {
        Self::with_terms(dim, hamiltonian, Vec::new(), jumps)
    }

    pub fn with_terms(
        dim: usize,
        hamiltonian: ComplexMatrix,
        hamiltonian_terms: Vec<ComplexMatrix>,
        jumps: Vec<Jump>,
    ) -> Result<Self> {
        check_op("hamiltonian", &hamiltonian, dim)?;
        if !hamiltonian.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidInput("Hamiltonian is not Hermitian".into()));
        }
        if !hamiltonian_terms.is_empty() {
            let mut sum = ComplexMatrix::zeros(dim, dim);
            for h in &hamiltonian_terms {
                check_op("hamiltonian term", h, dim)?;
                if !h.is_hermitian(HERMITIAN_TOL) {
                    return Err(Error::InvalidInput(
                        "Hamiltonian term is not Hermitian".into(),
                    ));
                }
                sum = &sum + h;
            }
            if sum.max_abs_diff(&hamiltonian) > HERMITIAN_TOL {
                return Err(Error::InvalidInput(
                    "Hamiltonian terms do not sum to H".into(),
                ));
            }
        }
        for j in &jumps {
            check_op("jump operator", &j.op, dim)?;
            if !(j.rate.is_finite() && j.rate >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "jump rate {} must be ≥ 0",
                    j.rate
                )));
            }
        }
        Ok(Self {
            dim,
            hamiltonian,
            hamiltonian_terms,
            jumps,
        })
    }

    /// Single-qubit amplitude damping: H = 0, L = σ⁺ at rate Γ.
    pub fn amp_damp(gamma_rate: f64) -> Result<Self> {
        Self::new(
            2,
            ComplexMatrix::zeros(2, 2),
            vec![Jump {
                op: gates::sigma_plus(),
                rate: gamma_rate,
            }],
        )
    }

    /// Two-qubit chain H = J(X₁X₂ + Y₁Y₂) with σ⁺ damping on both qubits.
    pub fn xx_chain(j: f64, gamma_rate: f64) -> Result<Self> {
        let xx = kron(&gates::pauli_x(), &gates::pauli_x()).scale_real(j);
        let yy = kron(&gates::pauli_y(), &gates::pauli_y()).scale_real(j);
        let h = &xx + &yy;
        let jumps = (0..2)
            .map(|q| Jump {
                op: gates::on_qubit(&gates::sigma_plus(), q, 2),
                rate: gamma_rate,
            })
            .collect();
        Self::with_terms(4, h, vec![xx, yy], jumps)
    }

    /// Parses "amp-damp(G)" or "xx-chain(J,G)".
    pub fn builtin(name: &str) -> Result<Self> {
        let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, args) = compact
            .strip_suffix(')')
            .and_then(|s| s.split_once('('))
            .ok_or_else(|| Error::Parse(format!("expected name(args), got {name:?}")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| {
                a.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number {a:?} in {name:?}")))
            })
            .collect::<Result<_>>()?;
        match (head, nums.as_slice()) {
            ("amp-damp", [g]) => Self::amp_damp(*g),
            ("xx-chain", [j, g]) => Self::xx_chain(*j, *g),
            _ => Err(Error::Parse(format!(
                "unknown Lindbladian {name:?} (known: amp-damp(G), xx-chain(J,G))"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn hamiltonian_terms(&self) -> &[ComplexMatrix] {
        &self.hamiltonian_terms
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Exact channel e^{ℒt}.
    pub fn exp_channel(&self, t: f64) -> Result<KrausChannel> {
        vectorize(self).exp_channel(t)
    }
}

fn check_op(what: &str, m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::InvalidInput(format!(
            "{what} is {}x{}, expected {dim}x{dim}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Matrix acting on column-stacked operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != dim * dim || matrix.cols() != dim * dim {
            return Err(Error::dims(
                "Superoperator",
                format!("{}x{} matrix for d = {dim}", matrix.rows(), matrix.cols()),
            ));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Applies the superoperator to an operator via vec/unvec.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let v = self.matrix.mul_vec(&vec_op(rho))?;
        unvec_op(&v, self.dim)
    }

    /// e^{ℒt} as a Kraus channel, through its Choi matrix.
    pub fn exp_channel(&self, t: f64) -> Result<KrausChannel> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "evolution time {t} must be ≥ 0"
            )));
        }
        let e = matexp(&self.matrix.scale_real(t))?;
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d, d * d);
        let norm = 1.0 / d as f64;
        for i in 0..d {
            for j in 0..d {
                let col = i + d * j;
                for a in 0..d {
                    for b in 0..d {
                        choi[(i * d + a, j * d + b)] = e[(a + d * b, col)] * norm;
                    }
                }
            }
        }
        let choi = ChoiState::new_lenient(d, d, choi.hermitian_part())?;
        choi.to_kraus()
    }
}

/// vec(ρ) with column stacking.
pub fn vec_op(rho: &ComplexMatrix) -> Vec<C64> {
    rho.vec_columns()
}

pub fn unvec_op(v: &[C64], dim: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::from_vec_columns(dim, dim, v)
}

/// ℒ = −i(I⊗H − Hᵀ⊗I) + Σ_k Γ_k (L̄_k⊗L_k − ½ I⊗L_k†L_k − ½ (L_k†L_k)ᵀ⊗I).
pub fn vectorize(spec: &LindbladSpec) -> Superoperator {
    let d = spec.dim;
    let id = ComplexMatrix::identity(d);
    let h = &spec.hamiltonian;
    let mut l = (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(C64::new(0.0, -1.0));
    for jump in &spec.jumps {
        let lk = &jump.op;
        let ldl = &lk.adjoint() * lk;
        let term = &(&kron(&lk.conj(), lk) - &kron(&id, &ldl).scale_real(0.5))
            - &kron(&ldl.transpose(), &id).scale_real(0.5);
        l = &l + &term.scale_real(jump.rate);
    }
    Superoperator { dim: d, matrix: l }
}

/// Superoperator of ρ ↦ UρU†, namely Ū ⊗ U.
pub fn unitary_superop(u: &ComplexMatrix) -> Superoperator {
    Superoperator {
        dim: u.rows(),
        matrix: kron(&u.conj(), u),
    }
}

/// ‖A·B − B·A‖₂ for two superoperators.
pub fn superop_commutator_norm(a: &Superoperator, b: &Superoperator) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::dims(
            "superop_commutator_norm",
            "superoperators act on different spaces",
        ));
    }
    let ab = a.matrix.matmul(&b.matrix)?;
    let ba = b.matrix.matmul(&a.matrix)?;
    Ok((&ab - &ba).norm())
}

/// Locates q with op = σ⁺ acting on qubit q of a dim-dimensional register.
fn damping_qubit(op: &ComplexMatrix, dim: usize) -> Option<usize> {
    if !dim.is_power_of_two() {
        return None;
    }
    let n = dim.trailing_zeros() as usize;
    (0..n).find(|&q| gates::on_qubit(&gates::sigma_plus(), q, n).max_abs_diff(op) < 1e-14)
}

enum Piece {
    Unitary(ComplexMatrix),
    Damping { qubit: usize, rate: f64 },
}

/// Symmetric product formula (Π_j e^{ℒ_j t/2N} Π_j^{reversed} e^{ℒ_j t/2N})^N.
///
/// Hamiltonian terms become unitaries e^{−iH_j t/2N}; each σ⁺ jump becomes a
/// fresh amplitude-damping dilation with γ = 1 − e^{−Γt/2N}. Terms run in
/// the order H-terms then jumps on the forward half-step.
pub fn trotter_channel(spec: &LindbladSpec, t: f64, n_steps: usize) -> Result<KrausChannel> {
    if n_steps == 0 {
        return Err(Error::InvalidInput("Trotter step count must be ≥ 1".into()));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "evolution time {t} must be ≥ 0"
        )));
    }
    let d = spec.dim;
    let tau = t / (2.0 * n_steps as f64);

    let mut pieces = Vec::new();
    let h_terms: Vec<&ComplexMatrix> = if spec.hamiltonian_terms.is_empty() {
        vec![&spec.hamiltonian]
    } else {
        spec.hamiltonian_terms.iter().collect()
    };
    for h in h_terms {
        if h.norm() == 0.0 {
            continue;
        }
        pieces.push(Piece::Unitary(matexp(&h.scale(C64::new(0.0, -tau)))?));
    }
    for jump in &spec.jumps {
        let qubit = damping_qubit(&jump.op, d).ok_or_else(|| {
            Error::Unsupported(
                "Trotter realization supports only σ⁺ damping jumps on single qubits".into(),
            )
        })?;
        if jump.rate > 0.0 {
            pieces.push(Piece::Damping {
                qubit,
                rate: jump.rate,
            });
        }
    }

    let n_qubits = d.trailing_zeros() as usize;
    let realize = |p: &Piece| -> Result<KrausChannel> {
        match p {
            Piece::Unitary(u) => KrausChannel::unitary(u),
            Piece::Damping { qubit, rate } => {
                let gamma = 1.0 - (-rate * tau).exp();
                let dil = channels::amp_damp_dilation(gamma)?;
                KrausChannel::from_dilation(&dil, 2)?.on_qubit(*qubit, n_qubits)
            }
        }
    };
    let forward: Vec<KrausChannel> = pieces.iter().map(realize).collect::<Result<_>>()?;

    let mut step = KrausChannel::identity(d);
    for ch in forward.iter().chain(forward.iter().rev()) {
        step = compose(ch, &step)?.compressed()?;
    }
    let mut total = KrausChannel::identity(d);
    for _ in 0..n_steps {
        total = compose(&step, &total)?.compressed()?;
    }
    Ok(total)
}
