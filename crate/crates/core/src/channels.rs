//! Quantum channels in Kraus form, Choi states and measurement channels.
//!
//! Choi states put the reference system first:
//! Φ^𝒩 = (1/d) Σ_{ij} |i⟩⟨j| ⊗ 𝒩(|i⟩⟨j|), an operator on ℂ^{d_in} ⊗ ℂ^{d_out}.

use crate::error::{Error, Result};
use crate::linalg::{self, gates, kron, partial_trace, trace_product, ComplexMatrix, C64, ZERO};

/// Tolerance for Σ K†K = I and Σ N_x = I.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Lowest eigenvalue accepted as "positive" for Choi matrices and effects.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues in [-this, 0] are clipped when factoring a Choi matrix.
pub const FACTOR_CLIP_TOL: f64 = 1e-8;
/// Acceptance tolerance for density-matrix inputs to [`KrausChannel::apply`].
pub const DENSITY_TOL: f64 = 1e-8;

/// Checks that `rho` is a d×d density matrix within `tol`.
pub fn validate_density(rho: &ComplexMatrix, d: usize, tol: f64) -> Result<()> {
    let n = rho.square_dim("density matrix")?;
    if n != d {
        return Err(Error::dims(
            "density matrix",
            format!("expected {d}x{d}, got {n}x{n}"),
        ));
    }
    if !rho.is_hermitian(tol) {
        return Err(Error::InvalidInput(
            "density matrix is not Hermitian".into(),
        ));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::InvalidInput(format!(
            "density matrix has trace {tr}"
        )));
    }
    let min = linalg::min_eigenvalue(rho)?;
    if min < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// Completely positive trace-preserving map given by Kraus operators, each
/// `out_dim × in_dim`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidInput(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        for (k, op) in kraus.iter().enumerate() {
            if op.rows() != out_dim || op.cols() != in_dim {
                return Err(Error::dims(
                    "KrausChannel::new",
                    format!(
                        "Kraus operator {k} is {}x{}, expected {out_dim}x{in_dim}",
                        op.rows(),
                        op.cols()
                    ),
                ));
            }
        }
        let ch = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let dev = ch.completeness_error();
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidInput(format!(
                "Kraus operators are not trace preserving (|ΣK†K - I| = {dev:e})"
            )));
        }
        Ok(ch)
    }

    /// Largest entry of Σ K†K − I.
    pub fn completeness_error(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.in_dim))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            in_dim: d,
            out_dim: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// Unitary channel ρ ↦ UρU†.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let d = u.square_dim("unitary channel")?;
        if !u.is_unitary(1e-10) {
            return Err(Error::InvalidInput("matrix is not unitary".into()));
        }
        Ok(Self {
            in_dim: d,
            out_dim: d,
            kraus: vec![u.clone()],
        })
    }

    /// Amplitude damping 𝒟_γ with K₀ = diag(1, √(1−γ)), K₁ = √γ |0⟩⟨1|.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability("amplitude damping γ", gamma)?;
        let k0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()]);
        let k1 = ComplexMatrix::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0]);
        Self::new(2, 2, vec![k0, k1])
    }

    /// Replaces the input by I/d.
    pub fn fully_depolarizing(d: usize) -> Self {
        let s = (1.0 / d as f64).sqrt();
        let mut kraus = Vec::with_capacity(d * d);
        for a in 0..d {
            for i in 0..d {
                kraus.push(ComplexMatrix::unit(d, a, i).scale_real(s));
            }
        }
        Self {
            in_dim: d,
            out_dim: d,
            kraus,
        }
    }

    /// Single-qubit depolarizing ρ ↦ (1−p)ρ + p I/2.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("depolarizing p", p)?;
        let paulis = [gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
        let mut kraus = vec![ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt())];
        kraus.extend(paulis.iter().map(|s| s.scale_real((p / 4.0).sqrt())));
        Self::new(2, 2, kraus)
    }

    /// Single-qubit dephasing ρ ↦ (1−p)ρ + p ZρZ.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_probability("dephasing p", p)?;
        Self::new(
            2,
            2,
            vec![
                ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
                gates::pauli_z().scale_real(p.sqrt()),
            ],
        )
    }

    /// Channel ρ ↦ Tr_env[U(|0⟩⟨0|_env ⊗ ρ)U†] for a unitary on env ⊗ system
    /// (environment is the leading tensor factor).
    pub fn from_dilation(u: &ComplexMatrix, env_dim: usize) -> Result<Self> {
        let n = u.square_dim("dilation")?;
        if env_dim == 0 || n % env_dim != 0 {
            return Err(Error::dims(
                "from_dilation",
                format!("{n}x{n} unitary cannot split off a {env_dim}-dimensional environment"),
            ));
        }
        if !u.is_unitary(1e-10) {
            return Err(Error::InvalidInput("dilation is not unitary".into()));
        }
        let d = n / env_dim;
        let kraus = (0..env_dim)
            .map(|e| {
                let mut k = ComplexMatrix::zeros(d, d);
                for a in 0..d {
                    for i in 0..d {
                        k[(a, i)] = u[(e * d + a, i)];
                    }
                }
                k
            })
            .filter(|k| k.norm() > 0.0)
            .collect();
        Self::new(d, d, kraus)
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// Applies the channel to a density matrix, validating input and output.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        validate_density(rho, self.in_dim, DENSITY_TOL)?;
        let out = self.apply_operator(rho)?;
        validate_density(&out, self.out_dim, 1e-9)?;
        Ok(out)
    }

    /// Linear extension Σ K X K† to an arbitrary operator X.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(Error::dims(
                "apply",
                format!(
                    "channel input is {}-dimensional, operator is {}x{}",
                    self.in_dim,
                    x.rows(),
                    x.cols()
                ),
            ));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        Ok(out)
    }

    /// Choi state (id ⊗ 𝒩)(Φ^d).
    pub fn choi(&self) -> ChoiState {
        let (din, dout) = (self.in_dim, self.out_dim);
        let n = din * dout;
        let mut m = ComplexMatrix::zeros(n, n);
        let norm = 1.0 / din as f64;
        for k in &self.kraus {
            // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
            let mut v = vec![ZERO; n];
            for i in 0..din {
                for a in 0..dout {
                    v[i * dout + a] = k[(a, i)];
                }
            }
            for r in 0..n {
                if v[r] == ZERO {
                    continue;
                }
                for c in 0..n {
                    m[(r, c)] += v[r] * v[c].conj() * norm;
                }
            }
        }
        ChoiState {
            dim_in: din,
            dim_out: dout,
            matrix: m,
        }
    }

    /// Equivalent channel with at most d_in·d_out Kraus operators, obtained by
    /// factoring the Choi matrix.
    pub fn canonical(&self) -> Result<Self> {
        self.choi().to_kraus()
    }

    /// Re-factors only when the Kraus list has grown past the minimal size.
    pub fn compressed(self) -> Result<Self> {
        if self.kraus.len() > self.in_dim * self.out_dim {
            self.canonical()
        } else {
            Ok(self)
        }
    }

    /// 𝒩 ∘ 𝒰 for a unitary U on the input.
    pub fn precompose_unitary(&self, u: &ComplexMatrix) -> Result<Self> {
        compose(self, &Self::unitary(u)?)
    }

    /// 𝒱 ∘ 𝒩 for a unitary V on the output.
    pub fn postcompose_unitary(&self, v: &ComplexMatrix) -> Result<Self> {
        compose(&Self::unitary(v)?, self)
    }

    /// Tensor product 𝒜 ⊗ ℬ.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| kron(a, b)))
            .collect();
        Self {
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
            kraus,
        }
    }

    /// Embeds a qubit channel so it acts on qubit `q` of an `n`-qubit register.
    pub fn on_qubit(&self, q: usize, n: usize) -> Result<Self> {
        if self.in_dim != 2 || self.out_dim != 2 {
            return Err(Error::dims(
                "on_qubit",
                "only single-qubit channels can be embedded",
            ));
        }
        if q >= n {
            return Err(Error::dims(
                "on_qubit",
                format!("qubit {q} of a {n}-qubit register"),
            ));
        }
        let d = 1usize << n;
        Ok(Self {
            in_dim: d,
            out_dim: d,
            kraus: self
                .kraus
                .iter()
                .map(|k| gates::on_qubit(k, q, n))
                .collect(),
        })
    }
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!(
            "{what} = {p} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// outer ∘ inner, with Kraus operators {K_o K_i}.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if inner.out_dim != outer.in_dim {
        return Err(Error::dims(
            "compose",
            format!(
                "inner channel outputs dimension {}, outer expects {}",
                inner.out_dim, outer.in_dim
            ),
        ));
    }
    let kraus = outer
        .kraus
        .iter()
        .flat_map(|ko| inner.kraus.iter().map(move |ki| ko * ki))
        .filter(|k| k.norm() > 0.0)
        .collect();
    KrausChannel::new(inner.in_dim, outer.out_dim, kraus)
}

/// Choi state of a channel with `dim_in`-dimensional input.
#[derive(Clone, Debug)]
pub struct ChoiState {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix,
}

impl ChoiState {
    /// Validates PSD, unit trace and the I/d input marginal.
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.square_dim("ChoiState")?;
        if n != dim_in * dim_out {
            return Err(Error::dims(
                "ChoiState::new",
                format!("{n}x{n} matrix for dims {dim_in}x{dim_out}"),
            ));
        }
        let state = Self {
            dim_in,
            dim_out,
            matrix,
        };
        state.validate(1e-10, PSD_TOL)?;
        Ok(state)
    }

    /// Like [`ChoiState::new`] but accepts eigenvalues down to −1e-8 and
    /// trace errors up to 1e-9, for matrices produced by matexp.
    pub(crate) fn new_lenient(
        dim_in: usize,
        dim_out: usize,
        matrix: ComplexMatrix,
    ) -> Result<Self> {
        let state = Self {
            dim_in,
            dim_out,
            matrix,
        };
        state.validate(1e-9, FACTOR_CLIP_TOL)?;
        Ok(state)
    }

    fn validate(&self, tol: f64, psd_tol: f64) -> Result<()> {
        if !self.matrix.is_hermitian(tol) {
            return Err(Error::InvalidInput("Choi matrix is not Hermitian".into()));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!("Choi matrix has trace {tr}")));
        }
        let marginal = partial_trace(&self.matrix, &[self.dim_in, self.dim_out], &[0])?;
        let target = ComplexMatrix::identity(self.dim_in).scale_real(1.0 / self.dim_in as f64);
        if marginal.max_abs_diff(&target) > tol {
            return Err(Error::InvalidInput(
                "Choi matrix input marginal is not maximally mixed (not trace preserving)".into(),
            ));
        }
        let min = linalg::min_eigenvalue(&self.matrix)?;
        if min < -psd_tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).unwrap().re
    }

    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(Error::dims(
                "Choi overlap",
                "Choi states act on different spaces",
            ));
        }
        Ok(trace_product(&self.matrix, &other.matrix)?.re)
    }

    /// Factors the Choi matrix into Kraus operators K = √(dλ) unvec(v).
    ///
    /// Eigenvalues in [−1e-8, 0] are clipped and the spectrum renormalized to
    /// unit trace; anything more negative signals an invalid map.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let (din, dout) = (self.dim_in, self.dim_out);
        let (vals, vecs) = linalg::eigh(&self.matrix)?;
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -FACTOR_CLIP_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let clipped: Vec<f64> = vals.iter().map(|&l| l.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::Numerical("Choi matrix has zero trace".into()));
        }
        let cutoff = 1e-15 * clipped.iter().cloned().fold(0.0, f64::max);
        let mut kraus = Vec::new();
        for (k, &lam) in clipped.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let s = (din as f64 * lam / total).sqrt();
            let mut op = ComplexMatrix::zeros(dout, din);
            for i in 0..din {
                for a in 0..dout {
                    op[(a, i)] = vecs[(i * dout + a, k)] * s;
                }
            }
            kraus.push(op);
        }
        let ch = KrausChannel {
            in_dim: din,
            out_dim: dout,
            kraus,
        };
        let dev = ch.completeness_error();
        if dev > COMPLETENESS_TOL {
            return Err(Error::Numerical(format!(
                "factored Kraus operators miss completeness by {dev:e}"
            )));
        }
        Ok(ch)
    }
}

/// Measurement channel ω ↦ Σ_x Tr[N_x ω] |x⟩⟨x| given by a POVM.
#[derive(Clone, Debug)]
pub struct PovmChannel {
    in_dim: usize,
    effects: Vec<ComplexMatrix>,
}

impl PovmChannel {
    pub fn new(in_dim: usize, effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidInput(
                "a POVM needs at least one effect".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(in_dim, in_dim);
        for (x, e) in effects.iter().enumerate() {
            if e.rows() != in_dim || e.cols() != in_dim {
                return Err(Error::dims(
                    "PovmChannel::new",
                    format!(
                        "effect {x} is {}x{}, expected {in_dim}x{in_dim}",
                        e.rows(),
                        e.cols()
                    ),
                ));
            }
            if !e.is_hermitian(1e-10) {
                return Err(Error::InvalidInput(format!("effect {x} is not Hermitian")));
            }
            let min = linalg::min_eigenvalue(e)?;
            if min < -PSD_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
            sum = &sum + e;
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(in_dim)) > COMPLETENESS_TOL {
            return Err(Error::InvalidInput(
                "POVM effects do not sum to the identity".into(),
            ));
        }
        Ok(Self { in_dim, effects })
    }

    /// Computational-basis measurement of `n` qubits.
    pub fn computational_basis(n: usize) -> Self {
        let d = 1usize << n;
        Self {
            in_dim: d,
            effects: (0..d)
                .map(|x| ComplexMatrix::basis_projector(d, x))
                .collect(),
        }
    }

    /// Projective measurement in the orthonormal basis given by the columns
    /// of `u`.
    pub fn from_basis(u: &ComplexMatrix) -> Result<Self> {
        let d = u.square_dim("basis measurement")?;
        if !u.is_unitary(1e-10) {
            return Err(Error::InvalidInput("basis matrix is not unitary".into()));
        }
        let effects = (0..d)
            .map(|x| {
                let col = u.column(x);
                ComplexMatrix::outer(&col, &col)
            })
            .collect();
        Self::new(d, effects)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    /// Effects {U†N_xU} of 𝒩 ∘ 𝒰.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.in_dim || !u.is_square() {
            return Err(Error::dims(
                "PovmChannel::conjugated",
                "unitary does not match POVM input",
            ));
        }
        let ud = u.adjoint();
        Ok(Self {
            in_dim: self.in_dim,
            effects: self.effects.iter().map(|e| &(&ud * e) * u).collect(),
        })
    }

    /// Effects {N_{π⁻¹(x)}} of 𝒲 ∘ 𝒩 where W|x⟩ = |π(x)⟩.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.effects.len() {
            return Err(Error::dims(
                "PovmChannel::relabeled",
                "permutation size differs from alphabet",
            ));
        }
        let mut effects = vec![ComplexMatrix::zeros(self.in_dim, self.in_dim); perm.len()];
        for (x, &px) in perm.iter().enumerate() {
            effects[px] = self.effects[x].clone();
        }
        Ok(Self {
            in_dim: self.in_dim,
            effects,
        })
    }

    /// Induced Kraus channel with classical output: K = √λ |x⟩⟨v| for each
    /// eigenpair (λ, v) of each effect N_x.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let out = self.effects.len();
        let mut kraus = Vec::new();
        for (x, e) in self.effects.iter().enumerate() {
            let (vals, vecs) = linalg::eigh(e)?;
            for (j, &lam) in vals.iter().enumerate() {
                if lam <= 1e-15 {
                    continue;
                }
                let mut k = ComplexMatrix::zeros(out, self.in_dim);
                for i in 0..self.in_dim {
                    k[(x, i)] = vecs[(i, j)].conj() * lam.sqrt();
                }
                kraus.push(k);
            }
        }
        KrausChannel::new(self.in_dim, out, kraus)
    }

    /// Outcome probabilities Tr[N_x ρ].
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Result<Vec<f64>> {
        self.effects
            .iter()
            .map(|e| Ok(trace_product(e, rho)?.re))
            .collect()
    }
}

/// The 4×4 unitary dilation of 𝒟_γ on environment ⊗ system.
pub fn amp_damp_dilation(gamma: f64) -> Result<ComplexMatrix> {
    check_probability("amplitude damping γ", gamma)?;
    let (s, c) = (gamma.sqrt(), (1.0 - gamma).sqrt());
    #[rustfmt::skip]
    let d = ComplexMatrix::from_real(4, 4, &[
        0.0, s,   -c,  0.0,
        0.0, 0.0, 0.0, 1.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, c,   s,   0.0,
    ]);
    Ok(d)
}

fn check_same_shape(op: &'static str, n: &KrausChannel, m: &KrausChannel) -> Result<()> {
    if n.in_dim != m.in_dim || n.out_dim != m.out_dim {
        return Err(Error::dims(
            op,
            format!(
                "channels map {}→{} and {}→{}",
                n.in_dim, n.out_dim, m.in_dim, m.out_dim
            ),
        ));
    }
    Ok(())
}

/// Tr[Φ^𝒩 Φ^ℳ] from the Choi matrices themselves.
pub fn choi_overlap_direct(n: &KrausChannel, m: &KrausChannel) -> Result<f64> {
    check_same_shape("choi_overlap_direct", n, m)?;
    n.choi().overlap(&m.choi())
}

/// Tr[Φ^𝒩 Φ^ℳ] = (1/d²) Σ_{ij} Tr[𝒩(|i⟩⟨j|) ℳ(|j⟩⟨i|)].
pub fn choi_overlap_elementary(n: &KrausChannel, m: &KrausChannel) -> Result<f64> {
    check_same_shape("choi_overlap_elementary", n, m)?;
    let d = n.in_dim;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            let a = n.apply_operator(&ComplexMatrix::unit(d, i, j))?;
            let b = m.apply_operator(&ComplexMatrix::unit(d, j, i))?;
            acc += trace_product(&a, &b)?;
        }
    }
    Ok(acc.re / (d * d) as f64)
}

/// Exact Choi overlap; both computation routes must agree to 1e-10 and the
/// elementary-matrix sum is returned.
pub fn exact_choi_overlap(n: &KrausChannel, m: &KrausChannel) -> Result<f64> {
    let elementary = choi_overlap_elementary(n, m)?;
    let direct = choi_overlap_direct(n, m)?;
    if (elementary - direct).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "Choi overlap routes disagree: elementary {elementary}, direct {direct}"
        )));
    }
    Ok(elementary)
}

/// (1/d²) Σ_{x,y} δ_{x,y} Tr[(N_x ⊗ M_y) SWAP].
pub fn exact_meas_choi_overlap(n: &PovmChannel, m: &PovmChannel) -> Result<f64> {
    if n.in_dim != m.in_dim || n.outcomes() != m.outcomes() {
        return Err(Error::dims(
            "exact_meas_choi_overlap",
            format!(
                "POVMs have (dim, outcomes) = ({}, {}) and ({}, {})",
                n.in_dim,
                n.outcomes(),
                m.in_dim,
                m.outcomes()
            ),
        ));
    }
    let d = n.in_dim;
    let swap = gates::swap(d);
    let acc: f64 = n
        .effects
        .iter()
        .zip(&m.effects)
        .map(|(nx, my)| (&kron(nx, my) * &swap).trace().re)
        .sum();
    Ok(acc / (d * d) as f64)
}

/// ‖Φ^𝒩 − Φ^ℳ‖₂² via the purity/overlap expansion.
pub fn hs_choi_distance_sq(n: &KrausChannel, m: &KrausChannel) -> Result<f64> {
    check_same_shape("hs_choi_distance_sq", n, m)?;
    let pn = exact_choi_overlap(n, n)?;
    let pm = exact_choi_overlap(m, m)?;
    let c = exact_choi_overlap(n, m)?;
    Ok(pn + pm - 2.0 * c)
}
