//! Shot-based estimators built on the destructive SWAP test.
//!
//! Register layout: a 2n-qubit register holds two n-qubit copies, qubits
//! 0..n and n..2n, and Bell measurements pair qubit i with qubit n+i. The
//! Bell label Φ^{kℓ} uses k for the parity bit and ℓ for the phase bit:
//! Φ^{00} = Φ⁺, Φ^{01} = Φ⁻, Φ^{10} = Ψ⁺, Φ^{11} = Ψ⁻.
//!
//! Every circuit is simulated exactly on density matrices. With the
//! memoized backend the Born distribution of each distinct configuration
//! (Bell input label, group element) is computed once; each shot then draws
//! its configuration and a full measurement record from its own random
//! stream, derived from (seed, shot index). Shot results are combined by
//! integer sums, so reports do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{compose, validate_density, KrausChannel, PovmChannel, DENSITY_TOL};
use crate::error::{Error, Result};
use crate::groups::GroupRep;
use crate::linalg::{gates, kron, kron_all, trace_product, ComplexMatrix};

/// Width M of the interval holding each shot term.
pub const TERM_RANGE: f64 = 2.0;

const CHUNK: u64 = 1 << 12;

/// How Born distributions are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    /// One simulation per distinct configuration, reused across shots.
    #[default]
    Memoized,
    /// Re-simulate the circuit for every shot.
    PerShot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub shots_override: Option<u64>,
    pub seed: u64,
    /// Single-qubit depolarizing probability after gates and channels.
    pub noise_p: f64,
    pub backend: Backend,
}

impl EstimatorConfig {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let cfg = Self {
            epsilon,
            delta,
            shots_override: None,
            seed: 0,
            noise_p: 0.0,
            backend: Backend::Memoized,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_shots(mut self, shots: u64) -> Self {
        self.shots_override = Some(shots);
        self
    }

    pub fn with_noise(mut self, p: f64) -> Self {
        self.noise_p = p;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "epsilon = {} must be > 0",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta = {} must lie in (0, 1)",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return Err(Error::InvalidInput(format!(
                "noise_p = {} must lie in [0, 1]",
                self.noise_p
            )));
        }
        if self.shots_override == Some(0) {
            return Err(Error::InvalidInput("shot count must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Override if set, else the Hoeffding count for (ε, δ).
    pub fn shots(&self) -> Result<u64> {
        match self.shots_override {
            Some(s) => Ok(s),
            None => hoeffding_shots(self.epsilon, self.delta, TERM_RANGE),
        }
    }
}

/// Number of +1, −1 and 0 shot terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    pub plus: u64,
    pub minus: u64,
    pub zero: u64,
}

impl TermCounts {
    fn add(self, o: Self) -> Self {
        Self {
            plus: self.plus + o.plus,
            minus: self.minus + o.minus,
            zero: self.zero + o.zero,
        }
    }

    fn record(&mut self, z: i8) {
        match z {
            1 => self.plus += 1,
            -1 => self.minus += 1,
            _ => self.zero += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.plus + self.minus + self.zero
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub shots: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    pub terms: TermCounts,
}

/// T = ⌈M²/(2ε²) ln(2/δ)⌉.
pub fn hoeffding_shots(epsilon: f64, delta: f64, range_width: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "Hoeffding bound needs ε > 0 and 0 < δ < 1 (got ε = {epsilon}, δ = {delta})"
        )));
    }
    if !(range_width > 0.0 && range_width.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "range width {range_width} must be > 0"
        )));
    }
    let t = range_width * range_width / (2.0 * epsilon * epsilon) * (2.0 / delta).ln();
    Ok(t.ceil() as u64)
}

/// Mixes a sub-estimator tag into a seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Bell measurement result on n pairs; bit i of `k` and `l` belongs to pair i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BellOutcome {
    pub k: u64,
    pub l: u64,
}

impl BellOutcome {
    /// Decodes a computational-basis record of the measurement ladder.
    /// Qubit 0 is the most significant bit; ℓ_i is read from control qubit
    /// i and k_i from target qubit n+i.
    pub fn from_ladder_index(r: usize, n: usize) -> Self {
        let (mut k, mut l) = (0u64, 0u64);
        for i in 0..n {
            l |= (((r >> (2 * n - 1 - i)) & 1) as u64) << i;
            k |= (((r >> (n - 1 - i)) & 1) as u64) << i;
        }
        Self { k, l }
    }

    /// (−1)^{k⃗·ℓ⃗}.
    pub fn sign(&self) -> i8 {
        parity_sign(self.k & self.l)
    }
}

fn parity_sign(bits: u64) -> i8 {
    if bits.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn qubit_count(d: usize, what: &str) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::Unsupported(format!(
            "{what} has dimension {d}, not a qubit register"
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

/// Single-qubit depolarizing noise on the listed qubits of a w-qubit state.
fn depolarize(
    rho: &ComplexMatrix,
    qubits: impl IntoIterator<Item = usize>,
    w: usize,
    p: f64,
) -> ComplexMatrix {
    if p == 0.0 {
        return rho.clone();
    }
    let paulis = [gates::pauli_x(), gates::pauli_y(), gates::pauli_z()];
    let mut out = rho.clone();
    for q in qubits {
        let mut acc = out.scale_real(1.0 - 0.75 * p);
        for s in &paulis {
            let full = gates::on_qubit(s, q, w);
            acc = &acc + &out.conjugate_by(&full).scale_real(0.25 * p);
        }
        out = acc;
    }
    out
}

/// Probabilities of the 4ⁿ ladder records for a 2n-qubit state: CNOT(i → n+i)
/// followed by noise on both qubits, then H on qubit i.
fn ladder_distribution(state: &ComplexMatrix, n: usize, noise_p: f64) -> Vec<f64> {
    let w = 2 * n;
    let mut rho = state.clone();
    for i in 0..n {
        rho = rho.conjugate_by(&gates::cnot(i, n + i, w));
        rho = depolarize(&rho, [i, n + i], w, noise_p);
    }
    for i in 0..n {
        rho = rho.conjugate_by(&gates::on_qubit(&gates::hadamard(), i, w));
    }
    (0..rho.rows()).map(|r| rho[(r, r)].re.max(0.0)).collect()
}

/// Exact Bell-outcome probabilities Tr[Φ^{k⃗ℓ⃗} state], indexed by ladder record.
pub fn bell_distribution(state: &ComplexMatrix) -> Result<Vec<(BellOutcome, f64)>> {
    let d = state.square_dim("bell_distribution")?;
    let w = qubit_count(d, "Bell-measured state")?;
    if w % 2 != 0 {
        return Err(Error::dims(
            "bell_distribution",
            "state needs an even number of qubits",
        ));
    }
    validate_density(state, d, DENSITY_TOL)?;
    let n = w / 2;
    Ok(ladder_distribution(state, n, 0.0)
        .into_iter()
        .enumerate()
        .map(|(r, p)| (BellOutcome::from_ladder_index(r, n), p))
        .collect())
}

/// Draws one Bell-measurement outcome from a 2n-qubit state.
pub fn bell_sample<R: Rng + ?Sized>(state: &ComplexMatrix, rng: &mut R) -> Result<BellOutcome> {
    let dist = bell_distribution(state)?;
    let probs: Vec<f64> = dist.iter().map(|&(_, p)| p).collect();
    let idx = Dist::new(probs, vec![0; dist.len()]).draw(rng.random::<f64>());
    Ok(dist[idx].0)
}

/// Φ^{k⃗ℓ⃗} prepared by H on qubit i (holding ℓ_i) then CNOT onto qubit n+i
/// (holding k_i), with noise after each CNOT.
fn bell_input(kl: usize, n: usize, noise_p: f64) -> ComplexMatrix {
    let w = 2 * n;
    let (k, l) = (kl & ((1 << n) - 1), kl >> n);
    // qubit i = ℓ_i, qubit n+i = k_i, with qubit 0 the most significant bit
    let mut idx = 0usize;
    for i in 0..n {
        idx |= ((l >> i) & 1) << (w - 1 - i);
        idx |= ((k >> i) & 1) << (n - 1 - i);
    }
    let mut rho = ComplexMatrix::basis_projector(1 << w, idx);
    for i in 0..n {
        rho = rho.conjugate_by(&gates::on_qubit(&gates::hadamard(), i, w));
    }
    for i in 0..n {
        rho = rho.conjugate_by(&gates::cnot(i, n + i, w));
        rho = depolarize(&rho, [i, n + i], w, noise_p);
    }
    rho
}

fn kl_sign(kl: usize, n: usize) -> i8 {
    let (k, l) = (kl & ((1 << n) - 1), kl >> n);
    parity_sign((k & l) as u64)
}

/// Applies `ch` to the middle factor of before ⊗ in ⊗ after.
fn apply_on_block(
    rho: &ComplexMatrix,
    ch: &KrausChannel,
    before: usize,
    after: usize,
) -> Result<ComplexMatrix> {
    let (ib, ia) = (
        ComplexMatrix::identity(before),
        ComplexMatrix::identity(after),
    );
    let din = before * ch.in_dim() * after;
    if rho.rows() != din {
        return Err(Error::dims(
            "apply_on_block",
            "register size does not match channel",
        ));
    }
    let dout = before * ch.out_dim() * after;
    let mut out = ComplexMatrix::zeros(dout, dout);
    for k in ch.kraus_ops() {
        let full = kron_all([&ib, k, &ia]);
        out = &out + &(&(&full * rho) * &full.adjoint());
    }
    Ok(out)
}

/// Memoizable per-configuration outcome distribution with its shot terms.
#[derive(Clone, Debug)]
struct Dist {
    cdf: Vec<f64>,
    z: Vec<i8>,
}

impl Dist {
    fn new(probs: Vec<f64>, z: Vec<i8>) -> Self {
        let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p.max(0.0) / total;
                acc
            })
            .collect();
        Self { cdf, z }
    }

    fn draw(&self, u: f64) -> usize {
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }

    fn mean(&self) -> f64 {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .zip(&self.z)
            .map(|(&c, &z)| {
                let p = c - prev;
                prev = c;
                p * z as f64
            })
            .sum()
    }
}

/// A family of circuits indexed by (Bell input label, group element).
trait Circuit: Sync {
    /// Number of Bell input labels drawn uniformly per shot (1 if none).
    fn n_inputs(&self) -> usize;
    fn group(&self) -> Option<&GroupRep>;
    fn simulate(&self, input: usize, g: usize) -> Result<Dist>;
}

fn draw_config(rng: &mut ChaCha8Rng, n_inputs: usize, group: Option<&GroupRep>) -> (usize, usize) {
    let input = if n_inputs > 1 {
        rng.random_range(0..n_inputs)
    } else {
        0
    };
    let g = group.map_or(0, |r| r.sample(rng));
    (input, g)
}

fn run<C: Circuit>(circuit: &C, cfg: &EstimatorConfig) -> Result<EstimateReport> {
    cfg.validate()?;
    let shots = cfg.shots()?;
    let order = circuit.group().map_or(1, |g| g.order());
    let n_inputs = circuit.n_inputs();

    let table: Option<Vec<Dist>> = match cfg.backend {
        Backend::Memoized => Some(
            (0..n_inputs * order)
                .into_par_iter()
                .map(|c| circuit.simulate(c / order, c % order))
                .collect::<Result<_>>()?,
        ),
        Backend::PerShot => None,
    };

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chunks = shots.div_ceil(CHUNK);
    let terms = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<TermCounts> {
            let mut counts = TermCounts::default();
            let lo = c * CHUNK;
            for shot in lo..(lo + CHUNK).min(shots) {
                let mut rng = base.clone();
                rng.set_stream(shot);
                rng.set_word_pos(0);
                let (input, g) = draw_config(&mut rng, n_inputs, circuit.group());
                let u = rng.random::<f64>();
                let z = match &table {
                    Some(t) => {
                        let d = &t[input * order + g];
                        d.z[d.draw(u)]
                    }
                    None => {
                        let d = circuit.simulate(input, g)?;
                        d.z[d.draw(u)]
                    }
                };
                counts.record(z);
            }
            Ok(counts)
        })
        .try_reduce(TermCounts::default, |a, b| Ok(a.add(b)))?;

    let estimate = (terms.plus as f64 - terms.minus as f64) / shots as f64;
    Ok(EstimateReport {
        estimate,
        shots,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        seed: cfg.seed,
        terms,
    })
}

/// Expected value of the shot term, averaged over all configurations with
/// the same weights the sampler uses. Useful for checking noisy circuits.
fn exact_mean<C: Circuit>(circuit: &C) -> Result<f64> {
    let order = circuit.group().map_or(1, |g| g.order());
    let n = circuit.n_inputs() * order;
    let mut acc = 0.0;
    for c in 0..n {
        acc += circuit.simulate(c / order, c % order)?.mean();
    }
    Ok(acc / n as f64)
}

struct StateOverlap<'a> {
    rho: &'a ComplexMatrix,
    sigma: &'a ComplexMatrix,
    rep: Option<&'a GroupRep>,
    n: usize,
    noise_p: f64,
}

impl Circuit for StateOverlap<'_> {
    fn n_inputs(&self) -> usize {
        1
    }

    fn group(&self) -> Option<&GroupRep> {
        self.rep
    }

    fn simulate(&self, _input: usize, g: usize) -> Result<Dist> {
        let n = self.n;
        let second = match self.rep {
            Some(rep) => {
                let rotated = self.sigma.conjugate_by(rep.element(g));
                depolarize(&rotated, 0..n, n, self.noise_p)
            }
            None => self.sigma.clone(),
        };
        let state = kron(self.rho, &second);
        let probs = ladder_distribution(&state, n, self.noise_p);
        let z = (0..probs.len())
            .map(|r| BellOutcome::from_ladder_index(r, n).sign())
            .collect();
        Ok(Dist::new(probs, z))
    }
}

fn check_state_pair(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<usize> {
    let d = rho.square_dim("state overlap")?;
    if sigma.rows() != d || sigma.cols() != d {
        return Err(Error::dims(
            "state overlap",
            format!("states are {d}x{d} and {}x{}", sigma.rows(), sigma.cols()),
        ));
    }
    validate_density(rho, d, DENSITY_TOL)?;
    validate_density(sigma, d, DENSITY_TOL)?;
    qubit_count(d, "state")
}

/// Destructive SWAP test estimate of Tr[ρσ].
pub fn estimate_state_overlap(
    rho: &ComplexMatrix,
    sigma: &ComplexMatrix,
    cfg: &EstimatorConfig,
) -> Result<EstimateReport> {
    let n = check_state_pair(rho, sigma)?;
    run(
        &StateOverlap {
            rho,
            sigma,
            rep: None,
            n,
            noise_p: cfg.noise_p,
        },
        cfg,
    )
}

/// Estimate of Tr[ρ 𝒯_G(ρ)]: each shot compares ρ with U(g)ρU(g)† for a
/// uniformly drawn g.
pub fn estimate_twirled_overlap(
    rho: &ComplexMatrix,
    rep: &GroupRep,
    cfg: &EstimatorConfig,
) -> Result<EstimateReport> {
    let n = check_state_pair(rho, rho)?;
    if rep.dim() != rho.rows() {
        return Err(Error::dims(
            "estimate_twirled_overlap",
            "representation does not match state",
        ));
    }
    run(
        &StateOverlap {
            rho,
            sigma: rho,
            rep: Some(rep),
            n,
            noise_p: cfg.noise_p,
        },
        cfg,
    )
}

struct ChoiOverlap {
    /// Per group element: (𝒱(g)∘𝒩, ℳ∘𝒰(g)).
    pairs: Vec<(KrausChannel, KrausChannel)>,
    rep: Option<GroupRep>,
    n: usize,
    m: usize,
    noise_p: f64,
}

impl Circuit for ChoiOverlap {
    fn n_inputs(&self) -> usize {
        1 << (2 * self.n)
    }

    fn group(&self) -> Option<&GroupRep> {
        self.rep.as_ref()
    }

    fn simulate(&self, input: usize, g: usize) -> Result<Dist> {
        let (n, m, p) = (self.n, self.m, self.noise_p);
        let (a, b) = &self.pairs[g];
        let din = 1usize << n;
        let dout = 1usize << m;
        let rho = bell_input(input, n, p);
        let rho = apply_on_block(&rho, a, 1, din)?;
        let rho = depolarize(&rho, 0..m, m + n, p);
        let rho = apply_on_block(&rho, b, dout, 1)?;
        let rho = depolarize(&rho, m..2 * m, 2 * m, p);
        let probs = ladder_distribution(&rho, m, p);
        let s = kl_sign(input, n);
        let z = (0..probs.len())
            .map(|r| s * BellOutcome::from_ladder_index(r, m).sign())
            .collect();
        Ok(Dist::new(probs, z))
    }
}

/// Estimate of Tr[Φ^𝒩 Φ^ℳ] from random Bell inputs.
///
/// With `symmetrize`, each shot draws g and runs (𝒱(g)∘𝒩) ⊗ (ℳ∘𝒰(g)),
/// estimating (1/|G|) Σ_g Tr[Φ^{𝒱(g)∘𝒩} Φ^{ℳ∘𝒰(g)}].
pub fn estimate_choi_overlap(
    n_ch: &KrausChannel,
    m_ch: &KrausChannel,
    cfg: &EstimatorConfig,
    symmetrize: Option<&GroupRep>,
) -> Result<EstimateReport> {
    run(&choi_circuit(n_ch, m_ch, cfg, symmetrize)?, cfg)
}

fn choi_circuit(
    n_ch: &KrausChannel,
    m_ch: &KrausChannel,
    cfg: &EstimatorConfig,
    symmetrize: Option<&GroupRep>,
) -> Result<ChoiOverlap> {
    if n_ch.in_dim() != m_ch.in_dim() || n_ch.out_dim() != m_ch.out_dim() {
        return Err(Error::dims(
            "estimate_choi_overlap",
            "channels have different shapes",
        ));
    }
    let n = qubit_count(n_ch.in_dim(), "channel input")?;
    let m = qubit_count(n_ch.out_dim(), "channel output")?;
    let pairs = match symmetrize {
        None => vec![(n_ch.clone(), m_ch.clone())],
        Some(rep) => {
            if rep.dim() != n_ch.in_dim() || rep.out_dim() != n_ch.out_dim() {
                return Err(Error::dims(
                    "estimate_choi_overlap",
                    "representation does not match channel dimensions",
                ));
            }
            (0..rep.order())
                .map(|g| {
                    let v = KrausChannel::unitary(rep.out_element(g))?;
                    let u = KrausChannel::unitary(rep.element(g))?;
                    Ok((compose(&v, n_ch)?, compose(m_ch, &u)?))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(ChoiOverlap {
        pairs,
        rep: symmetrize.cloned(),
        n,
        m,
        noise_p: cfg.noise_p,
    })
}

/// Mean shot term of the Choi-overlap circuit including noise, computed
/// from exact Born probabilities.
pub fn choi_overlap_circuit_mean(
    n_ch: &KrausChannel,
    m_ch: &KrausChannel,
    cfg: &EstimatorConfig,
    symmetrize: Option<&GroupRep>,
) -> Result<f64> {
    exact_mean(&choi_circuit(n_ch, m_ch, cfg, symmetrize)?)
}

struct MeasOverlap {
    n_povm: PovmChannel,
    /// Per group element: effects of ℳ∘𝒰(g).
    m_povms: Vec<PovmChannel>,
    perms: Vec<Vec<usize>>,
    rep: Option<GroupRep>,
    n: usize,
    noise_p: f64,
}

impl Circuit for MeasOverlap {
    fn n_inputs(&self) -> usize {
        1 << (2 * self.n)
    }

    fn group(&self) -> Option<&GroupRep> {
        self.rep.as_ref()
    }

    fn simulate(&self, input: usize, g: usize) -> Result<Dist> {
        let n = self.n;
        let rho = bell_input(input, n, self.noise_p);
        let rho = if self.rep.is_some() {
            depolarize(&rho, n..2 * n, 2 * n, self.noise_p)
        } else {
            rho
        };
        let s = kl_sign(input, n);
        let k = self.n_povm.outcomes();
        let mut probs = Vec::with_capacity(k * k);
        let mut z = Vec::with_capacity(k * k);
        for (x, nx) in self.n_povm.effects().iter().enumerate() {
            for (y, my) in self.m_povms[g].effects().iter().enumerate() {
                probs.push(trace_product(&kron(nx, my), &rho)?.re);
                z.push(if self.perms[g][x] == y { s } else { 0 });
            }
        }
        Ok(Dist::new(probs, z))
    }
}

/// Estimate of Tr[Φ^𝒩 Φ^ℳ] for measurement channels; the shot term is
/// δ_{x⃗,y⃗}(−1)^{k⃗·ℓ⃗}.
///
/// With `symmetrize`, each shot draws g, measures ℳ after U(g) and compares
/// π_g(x⃗) with y⃗. The representation must carry outcome permutations.
pub fn estimate_meas_choi_overlap(
    n_povm: &PovmChannel,
    m_povm: &PovmChannel,
    cfg: &EstimatorConfig,
    symmetrize: Option<&GroupRep>,
) -> Result<EstimateReport> {
    if n_povm.in_dim() != m_povm.in_dim() || n_povm.outcomes() != m_povm.outcomes() {
        return Err(Error::dims(
            "estimate_meas_choi_overlap",
            "POVMs differ in dimension or alphabet",
        ));
    }
    let n = qubit_count(n_povm.in_dim(), "measured system")?;
    let k = n_povm.outcomes();
    let (m_povms, perms) = match symmetrize {
        None => (vec![m_povm.clone()], vec![(0..k).collect()]),
        Some(rep) => {
            if rep.dim() != n_povm.in_dim() {
                return Err(Error::dims(
                    "estimate_meas_choi_overlap",
                    "representation does not match POVM",
                ));
            }
            let perms = rep.out_perm().ok_or_else(|| {
                Error::InvalidInput("representation has no outcome permutation".into())
            })?;
            if perms[0].len() != k {
                return Err(Error::dims(
                    "estimate_meas_choi_overlap",
                    "permutation size differs from alphabet",
                ));
            }
            let povms = rep
                .elements()
                .iter()
                .map(|u| m_povm.conjugated(u))
                .collect::<Result<_>>()?;
            (povms, perms.to_vec())
        }
    };
    run(
        &MeasOverlap {
            n_povm: n_povm.clone(),
            m_povms,
            perms,
            rep: symmetrize.cloned(),
            n,
            noise_p: cfg.noise_p,
        },
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::exact_choi_overlap;
    use crate::groups::{bit_flip_perm, builtin_rep};
    use crate::linalg::C64;

    fn proj(i: usize) -> ComplexMatrix {
        ComplexMatrix::basis_projector(2, i)
    }

    fn cfg(shots: u64) -> EstimatorConfig {
        EstimatorConfig::new(0.01, 0.01)
            .unwrap()
            .with_shots(shots)
            .with_seed(7)
    }

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_shots(0.01, 0.01, 2.0).unwrap(), 105967);
        assert_eq!(hoeffding_shots(1.0, 0.5, 2.0).unwrap(), 3);
        let a = hoeffding_shots(0.02, 0.05, 2.0).unwrap();
        let b = hoeffding_shots(0.04, 0.05, 2.0).unwrap();
        assert!((a as f64 / b as f64 - 4.0).abs() < 0.01);
        assert!(hoeffding_shots(0.0, 0.1, 2.0).is_err());
        assert!(hoeffding_shots(0.1, 1.0, 2.0).is_err());
        assert!(hoeffding_shots(0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::new(-1.0, 0.1).is_err());
        assert!(EstimatorConfig::new(0.1, 0.0).is_err());
        let c = EstimatorConfig::new(0.1, 0.1).unwrap().with_noise(1.5);
        assert!(c.validate().is_err());
    }

    fn bell_state(kl: usize) -> ComplexMatrix {
        bell_input(kl, 1, 0.0)
    }

    #[test]
    fn bell_labels() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = C64::new(s, 0.0);
        let z = C64::new(0.0, 0.0);
        // Φ^{kℓ} for (k, ℓ) = (0,0), (0,1), (1,0), (1,1)
        let kets = [[h, z, z, h], [h, z, z, -h], [z, h, h, z], [z, h, -h, z]];
        for (label, ket) in kets.iter().enumerate() {
            let (k, l) = (label >> 1, label & 1);
            let kl = k | (l << 1);
            let want = ComplexMatrix::outer(ket, ket);
            assert!(bell_state(kl).max_abs_diff(&want) < 1e-15, "label {label}");
            let dist = bell_distribution(&want).unwrap();
            let hit: Vec<_> = dist.iter().filter(|(_, p)| *p > 0.5).collect();
            assert_eq!(hit.len(), 1);
            assert_eq!(
                hit[0].0,
                BellOutcome {
                    k: k as u64,
                    l: l as u64
                }
            );
        }
    }

    #[test]
    fn bell_sample_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let o = bell_sample(&bell_state(0), &mut rng).unwrap();
            assert_eq!((o.k, o.l), (0, 0));
        }
        let zero = kron(&proj(0), &proj(0));
        let dist = bell_distribution(&zero).unwrap();
        for (o, p) in dist {
            let want = if o.k == 0 { 0.5 } else { 0.0 };
            assert!((p - want).abs() < 1e-15);
        }
    }

    #[test]
    fn bell_sample_frequencies() {
        let rho = ComplexMatrix::from_rows(&[
            &[C64::new(0.7, 0.0), C64::new(0.1, 0.3)],
            &[C64::new(0.1, -0.3), C64::new(0.3, 0.0)],
        ]);
        let sigma = ComplexMatrix::from_real(2, 2, &[0.4, 0.2, 0.2, 0.6]);
        let state = kron(&rho, &sigma);
        let exact = bell_distribution(&state).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shots = 100_000;
        let mut freq = std::collections::HashMap::new();
        for _ in 0..shots {
            *freq
                .entry(bell_sample(&state, &mut rng).unwrap())
                .or_insert(0usize) += 1;
        }
        let tv: f64 = exact
            .iter()
            .map(|(o, p)| (p - *freq.get(o).unwrap_or(&0) as f64 / shots as f64).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "total variation {tv}");
    }

    #[test]
    fn state_overlap_examples() {
        let r = estimate_state_overlap(&proj(0), &proj(0), &cfg(2000)).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.terms.minus, 0);
        let r = estimate_state_overlap(&proj(0), &proj(1), &cfg(20_000)).unwrap();
        assert!(r.estimate.abs() < 0.03);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let r = estimate_state_overlap(&mixed, &mixed, &cfg(20_000)).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.03);
        assert!(estimate_state_overlap(&proj(0), &ComplexMatrix::identity(4), &cfg(10)).is_err());
    }

    #[test]
    fn twirled_overlap_examples() {
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let z = builtin_rep("I,Z", 1).unwrap();
        let r = estimate_twirled_overlap(&plus, &z, &cfg(20_000)).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.03);
        let r = estimate_twirled_overlap(&proj(0), &z, &cfg(5_000)).unwrap();
        assert_eq!(r.estimate, 1.0);
        let triv = GroupRep::trivial(2);
        let a = estimate_twirled_overlap(&plus, &triv, &cfg(5_000)).unwrap();
        assert_eq!(a.estimate, 1.0);
    }

    #[test]
    fn choi_overlap_examples() {
        let id = KrausChannel::identity(2);
        assert_eq!(
            estimate_choi_overlap(&id, &id, &cfg(3000), None)
                .unwrap()
                .estimate,
            1.0
        );

        let d = KrausChannel::amplitude_damping(0.5).unwrap();
        let x = KrausChannel::unitary(&gates::pauli_x()).unwrap();
        let n = compose(&x, &d).unwrap();
        let m = compose(&d, &x).unwrap();
        let r = estimate_choi_overlap(&n, &m, &cfg(40_000), None).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.02, "{}", r.estimate);
    }

    #[test]
    fn choi_circuit_mean_is_exact_overlap() {
        let d = KrausChannel::amplitude_damping(0.3).unwrap();
        let dep = KrausChannel::depolarizing(0.4).unwrap();
        let c = EstimatorConfig::new(0.1, 0.1).unwrap();
        let mean = choi_overlap_circuit_mean(&d, &dep, &c, None).unwrap();
        assert!((mean - exact_choi_overlap(&d, &dep).unwrap()).abs() < 1e-12);

        let two = d.tensor(&dep);
        let other = dep.tensor(&KrausChannel::identity(2));
        let mean = choi_overlap_circuit_mean(&two, &other, &c, None).unwrap();
        assert!((mean - exact_choi_overlap(&two, &other).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn meas_overlap_examples() {
        let z = PovmChannel::computational_basis(1);
        let x = PovmChannel::from_basis(&gates::hadamard()).unwrap();
        let r = estimate_meas_choi_overlap(&z, &z, &cfg(40_000), None).unwrap();
        assert!((r.estimate - 0.5).abs() < 0.02);
        let r = estimate_meas_choi_overlap(&z, &x, &cfg(40_000), None).unwrap();
        assert!((r.estimate - 0.25).abs() < 0.02);
        assert!(r.terms.zero > 0);

        let rep = builtin_rep("I,X", 1).unwrap();
        assert!(estimate_meas_choi_overlap(&z, &z, &cfg(10), Some(&rep)).is_err());
        let rep = rep
            .with_out_perm(vec![vec![0, 1], bit_flip_perm(1)])
            .unwrap();
        let sym = estimate_meas_choi_overlap(&z, &z, &cfg(40_000), Some(&rep)).unwrap();
        assert!((sym.estimate - 0.5).abs() < 0.02);
    }

    #[test]
    fn per_shot_backend_matches_memoized() {
        let d = KrausChannel::amplitude_damping(0.4).unwrap();
        let rep = builtin_rep("I,X", 1).unwrap();
        let base = cfg(300).with_noise(0.05);
        let a = estimate_choi_overlap(&d, &d, &base, Some(&rep)).unwrap();
        let b = estimate_choi_overlap(
            &d,
            &d,
            &base.clone().with_backend(Backend::PerShot),
            Some(&rep),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let d = KrausChannel::amplitude_damping(0.4).unwrap();
        let c = cfg(20_000);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| estimate_choi_overlap(&d, &d, &c, None).unwrap());
        let b = four.install(|| estimate_choi_overlap(&d, &d, &c, None).unwrap());
        assert_eq!(a, b);
        let other = estimate_choi_overlap(&d, &d, &c.clone().with_seed(8), None).unwrap();
        assert_ne!(a.estimate, other.estimate);
    }

    #[test]
    fn noise_reduces_purity_estimate() {
        let id = KrausChannel::identity(2);
        let c = EstimatorConfig::new(0.1, 0.1).unwrap().with_noise(0.05);
        let mean = choi_overlap_circuit_mean(&id, &id, &c, None).unwrap();
        assert!(mean < 0.95);
    }

    #[test]
    fn derive_seed_spreads() {
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_ne!(derive_seed(1, 1), derive_seed(0, 1));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }
}
