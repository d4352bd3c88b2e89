//! Hilbert–Schmidt asymmetry measures, each available exactly or from shots.
//!
//! Every measure has the shape 2·(purity − cross). In sampled mode the two
//! terms come from independent estimator runs, each targeting ε/4 at
//! confidence 1 − δ/2, so the combined value is within ε with probability
//! at least 1 − δ.

use serde::{Deserialize, Serialize};

use crate::channels::{
    compose, exact_choi_overlap, exact_meas_choi_overlap, KrausChannel, PovmChannel,
};
use crate::error::{Error, Result};
use crate::groups::GroupRep;
use crate::linalg::{trace_product, ComplexMatrix};
use crate::lindblad::{trotter_channel, LindbladSpec};
use crate::sampler::{self, derive_seed, EstimateReport, EstimatorConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            _ => Err(Error::Parse(format!(
                "mode must be exact or sampled, got {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        })
    }
}

/// How e^{ℒt} is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realization {
    ExactExp,
    Trotter(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryResult {
    pub value: f64,
    pub mode: Mode,
    pub purity: f64,
    pub cross: f64,
    /// Reports for the purity and cross estimators (sampled mode only).
    pub reports: Option<(EstimateReport, EstimateReport)>,
}

impl AsymmetryResult {
    fn exact(purity: f64, cross: f64) -> Self {
        Self {
            value: 2.0 * (purity - cross),
            mode: Mode::Exact,
            purity,
            cross,
            reports: None,
        }
    }

    fn sampled(a: EstimateReport, b: EstimateReport) -> Self {
        Self {
            value: 2.0 * (a.estimate - b.estimate),
            mode: Mode::Sampled,
            purity: a.estimate,
            cross: b.estimate,
            reports: Some((a, b)),
        }
    }

    /// Total shots spent (0 in exact mode).
    pub fn shots(&self) -> u64 {
        self.reports.as_ref().map_or(0, |(a, b)| a.shots + b.shots)
    }
}

/// Configurations of the purity and cross sub-estimators.
pub fn split_budget(cfg: &EstimatorConfig) -> Result<(EstimatorConfig, EstimatorConfig)> {
    cfg.validate()?;
    let mut sub = cfg.clone();
    sub.epsilon = cfg.epsilon / 4.0;
    sub.delta = cfg.delta / 2.0;
    let mut a = sub.clone();
    let mut b = sub;
    a.seed = derive_seed(cfg.seed, 1);
    b.seed = derive_seed(cfg.seed, 2);
    Ok((a, b))
}

/// 2(Tr[ρ²] − Tr[ρ 𝒯_G(ρ)]).
pub fn state_asymmetry(
    rho: &ComplexMatrix,
    rep: &GroupRep,
    mode: Mode,
    cfg: &EstimatorConfig,
) -> Result<AsymmetryResult> {
    if rep.dim() != rho.rows() || !rho.is_square() {
        return Err(Error::dims(
            "state_asymmetry",
            "representation does not match state",
        ));
    }
    match mode {
        Mode::Exact => {
            crate::channels::validate_density(rho, rep.dim(), crate::channels::DENSITY_TOL)?;
            let purity = trace_product(rho, rho)?.re;
            let cross = trace_product(rho, &rep.twirl(rho)?)?.re;
            Ok(AsymmetryResult::exact(purity, cross))
        }
        Mode::Sampled => {
            let (ca, cb) = split_budget(cfg)?;
            let a = sampler::estimate_state_overlap(rho, rho, &ca)?;
            let b = sampler::estimate_twirled_overlap(rho, rep, &cb)?;
            Ok(AsymmetryResult::sampled(a, b))
        }
    }
}

fn check_channel_rep(ch: &KrausChannel, rep: &GroupRep) -> Result<()> {
    if rep.dim() != ch.in_dim() || rep.out_dim() != ch.out_dim() {
        return Err(Error::dims(
            "channel_asymmetry",
            format!(
                "channel maps {}→{}, representation acts on {} and {}",
                ch.in_dim(),
                ch.out_dim(),
                rep.dim(),
                rep.out_dim()
            ),
        ));
    }
    Ok(())
}

/// 2(Tr[(Φ^𝒩)²] − (1/|G|) Σ_g Tr[Φ^{𝒱(g)∘𝒩} Φ^{𝒩∘𝒰(g)}]).
pub fn channel_asymmetry(
    ch: &KrausChannel,
    rep: &GroupRep,
    mode: Mode,
    cfg: &EstimatorConfig,
) -> Result<AsymmetryResult> {
    check_channel_rep(ch, rep)?;
    match mode {
        Mode::Exact => {
            let purity = exact_choi_overlap(ch, ch)?;
            let mut cross = 0.0;
            for g in 0..rep.order() {
                let left = compose(&KrausChannel::unitary(rep.out_element(g))?, ch)?;
                let right = compose(ch, &KrausChannel::unitary(rep.element(g))?)?;
                cross += exact_choi_overlap(&left, &right)?;
            }
            Ok(AsymmetryResult::exact(purity, cross / rep.order() as f64))
        }
        Mode::Sampled => {
            let (ca, cb) = split_budget(cfg)?;
            let a = sampler::estimate_choi_overlap(ch, ch, &ca, None)?;
            let b = sampler::estimate_choi_overlap(ch, ch, &cb, Some(rep))?;
            Ok(AsymmetryResult::sampled(a, b))
        }
    }
}

/// The channel e^{ℒt} or its Trotter approximation.
pub fn realize(spec: &LindbladSpec, t: f64, realization: Realization) -> Result<KrausChannel> {
    match realization {
        Realization::ExactExp => spec.exp_channel(t),
        Realization::Trotter(n) => trotter_channel(spec, t, n),
    }
}

/// a(ℒ, t, G): the channel asymmetry of the realized evolution.
pub fn lindbladian_asymmetry(
    spec: &LindbladSpec,
    t: f64,
    rep: &GroupRep,
    mode: Mode,
    realization: Realization,
    cfg: &EstimatorConfig,
) -> Result<AsymmetryResult> {
    let ch = realize(spec, t, realization)?;
    channel_asymmetry(&ch, rep, mode, cfg)
}

/// Measurement asymmetry with outcome relabelings π_g:
/// 2(Tr[(Φ^𝒩)²] − (1/|G|) Σ_g Tr[Φ^{𝒲(g)∘𝒩} Φ^{𝒩∘𝒰(g)}]).
pub fn measurement_asymmetry(
    povm: &PovmChannel,
    rep: &GroupRep,
    mode: Mode,
    cfg: &EstimatorConfig,
) -> Result<AsymmetryResult> {
    let perms = rep.out_perm().ok_or_else(|| {
        Error::InvalidInput("measurement asymmetry needs outcome permutations".into())
    })?;
    if rep.dim() != povm.in_dim() {
        return Err(Error::dims(
            "measurement_asymmetry",
            "representation does not match POVM",
        ));
    }
    if perms[0].len() != povm.outcomes() {
        return Err(Error::dims(
            "measurement_asymmetry",
            "permutation size differs from alphabet",
        ));
    }
    match mode {
        Mode::Exact => {
            let purity = exact_meas_choi_overlap(povm, povm)?;
            let mut cross = 0.0;
            for (g, perm) in perms.iter().enumerate() {
                let shifted = povm.relabeled(perm)?;
                let rotated = povm.conjugated(rep.element(g))?;
                cross += exact_meas_choi_overlap(&shifted, &rotated)?;
            }
            Ok(AsymmetryResult::exact(purity, cross / rep.order() as f64))
        }
        Mode::Sampled => {
            let (ca, cb) = split_budget(cfg)?;
            let a = sampler::estimate_meas_choi_overlap(povm, povm, &ca, None)?;
            let b = sampler::estimate_meas_choi_overlap(povm, povm, &cb, Some(rep))?;
            Ok(AsymmetryResult::sampled(a, b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{bit_flip_perm, builtin_rep};
    use crate::linalg::gates;

    fn cfg() -> EstimatorConfig {
        EstimatorConfig::new(0.05, 0.05).unwrap().with_seed(3)
    }

    #[test]
    fn state_examples() {
        let z = builtin_rep("I,Z", 1).unwrap();
        let zero = ComplexMatrix::basis_projector(2, 0);
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        let v = |rho: &ComplexMatrix, rep: &GroupRep| {
            state_asymmetry(rho, rep, Mode::Exact, &cfg())
                .unwrap()
                .value
        };
        assert!(v(&zero, &z).abs() < 1e-15);
        assert!((v(&plus, &z) - 1.0).abs() < 1e-15);
        assert!(v(&mixed, &z).abs() < 1e-15);
        assert!(v(&mixed, &builtin_rep("I,X", 1).unwrap()).abs() < 1e-15);
        assert!(
            state_asymmetry(&zero, &builtin_rep("I,Z", 2).unwrap(), Mode::Exact, &cfg()).is_err()
        );
    }

    #[test]
    fn state_sampled() {
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let z = builtin_rep("I,Z", 1).unwrap();
        let r = state_asymmetry(&plus, &z, Mode::Sampled, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 0.05);
        let (a, b) = r.reports.unwrap();
        assert_eq!(a.shots, b.shots);
        assert_eq!(
            a.shots,
            sampler::hoeffding_shots(0.0125, 0.025, 2.0).unwrap()
        );
        assert_ne!(a.seed, b.seed);
    }

    #[test]
    fn channel_examples() {
        let x = builtin_rep("I,X", 1).unwrap();
        let z = builtin_rep("I,Z", 1).unwrap();
        for g in [0.0, 0.3, 0.7, 1.0] {
            let d = KrausChannel::amplitude_damping(g).unwrap();
            let ax = channel_asymmetry(&d, &x, Mode::Exact, &cfg())
                .unwrap()
                .value;
            let az = channel_asymmetry(&d, &z, Mode::Exact, &cfg())
                .unwrap()
                .value;
            assert!((ax - g * g / 2.0).abs() < 1e-12);
            assert!(az.abs() < 1e-12);
            let t = channel_asymmetry(&d, &GroupRep::trivial(2), Mode::Exact, &cfg()).unwrap();
            assert!(t.value.abs() < 1e-12);
        }
    }

    #[test]
    fn channel_sampled() {
        let d = KrausChannel::amplitude_damping(0.6).unwrap();
        let x = builtin_rep("I,X", 1).unwrap();
        let r = channel_asymmetry(&d, &x, Mode::Sampled, &cfg()).unwrap();
        assert!((r.value - 0.18).abs() < 0.05);
    }

    #[test]
    fn covariant_channels() {
        let z = builtin_rep("I,Z", 1).unwrap();
        let x = builtin_rep("I,X", 1).unwrap();
        let deph = KrausChannel::dephasing(0.3).unwrap();
        assert!(
            channel_asymmetry(&deph, &z, Mode::Exact, &cfg())
                .unwrap()
                .value
                .abs()
                < 1e-10
        );
        let dep = KrausChannel::depolarizing(0.4).unwrap();
        for rep in [&z, &x] {
            assert!(
                channel_asymmetry(&dep, rep, Mode::Exact, &cfg())
                    .unwrap()
                    .value
                    .abs()
                    < 1e-10
            );
        }
    }

    #[test]
    fn output_rep_used() {
        // XZ = −ZX, so 𝒵∘𝒳 = 𝒳∘𝒵 as channels.
        let x = KrausChannel::unitary(&gates::pauli_x()).unwrap();
        let rep = GroupRep::with_outputs(
            vec![ComplexMatrix::identity(2), gates::pauli_z()],
            Some(vec![ComplexMatrix::identity(2), gates::pauli_z()]),
            None,
        )
        .unwrap();
        assert!(
            channel_asymmetry(&x, &rep, Mode::Exact, &cfg())
                .unwrap()
                .value
                .abs()
                < 1e-12
        );
        let broken = GroupRep::with_outputs(
            vec![ComplexMatrix::identity(2), gates::pauli_z()],
            Some(vec![ComplexMatrix::identity(2), gates::pauli_x()]),
            None,
        )
        .unwrap();
        assert!(
            channel_asymmetry(&x, &broken, Mode::Exact, &cfg())
                .unwrap()
                .value
                > 0.1
        );
    }

    #[test]
    fn lindbladian_examples() {
        let spec = LindbladSpec::amp_damp(1.0).unwrap();
        let x = builtin_rep("I,X", 1).unwrap();
        for t in [0.0, 0.5, 1.5] {
            let a = lindbladian_asymmetry(&spec, t, &x, Mode::Exact, Realization::ExactExp, &cfg())
                .unwrap();
            let want = 0.5 * (1.0 - (-t).exp()).powi(2);
            assert!((a.value - want).abs() < 1e-12);
        }
        let chain = LindbladSpec::xx_chain(1.0, 1.0).unwrap();
        for name in ["I,Z1Z2", "I,SWAP"] {
            let rep = builtin_rep(name, 2).unwrap();
            let a = lindbladian_asymmetry(
                &chain,
                1.0,
                &rep,
                Mode::Exact,
                Realization::Trotter(4),
                &cfg(),
            )
            .unwrap();
            assert!(a.value.abs() < 1e-10, "{name}: {}", a.value);
        }
    }

    #[test]
    fn measurement_examples() {
        let z = PovmChannel::computational_basis(1);
        let zrep = builtin_rep("I,Z", 1)
            .unwrap()
            .with_identity_perm(2)
            .unwrap();
        assert!(
            measurement_asymmetry(&z, &zrep, Mode::Exact, &cfg())
                .unwrap()
                .value
                .abs()
                < 1e-12
        );
        let xrep = builtin_rep("I,X", 1).unwrap();
        assert!(measurement_asymmetry(&z, &xrep, Mode::Exact, &cfg()).is_err());
        let covariant = xrep
            .clone()
            .with_out_perm(vec![vec![0, 1], bit_flip_perm(1)])
            .unwrap();
        assert!(
            measurement_asymmetry(&z, &covariant, Mode::Exact, &cfg())
                .unwrap()
                .value
                .abs()
                < 1e-12
        );
        let plain = xrep.with_identity_perm(2).unwrap();
        let v = measurement_asymmetry(&z, &plain, Mode::Exact, &cfg())
            .unwrap()
            .value;
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exact".parse::<Mode>().unwrap(), Mode::Exact);
        assert_eq!("sampled".parse::<Mode>().unwrap(), Mode::Sampled);
        assert!("fast".parse::<Mode>().is_err());
        assert_eq!(Mode::Sampled.to_string(), "sampled");
    }
}
