use std::path::Path;

use rayon::prelude::*;
use symtest::groups::{bit_flip_perm, builtin_rep, BUILTIN_REPS};
use symtest::symmetry::{self, AsymmetryResult};
use symtest::{formats, ComplexMatrix, EstimatorConfig, GroupRep, LindbladSpec, Mode, Realization};

use crate::args::{parse_grid, Cli, Common, ModeArg, PermChoice, Scenario};
use crate::output::{write_rows, Row};
use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))
}

fn qubits_of(dim: usize) -> Result<usize, Failure> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Failure::Invariant(format!(
            "built-in representations act on qubits; dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A built-in name, or else a path to a rep file.
fn load_rep(spec: &str, dim: usize) -> Result<GroupRep, Failure> {
    let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if BUILTIN_REPS.contains(&compact.as_str()) {
        return Ok(builtin_rep(&compact, qubits_of(dim)?)?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Failure::Parse(format!(
            "--rep {spec:?} is neither a built-in ({}) nor an existing file",
            BUILTIN_REPS.join(" ")
        )));
    }
    Ok(formats::parse_rep(&read(path)?)?)
}

fn config(c: &Common) -> Result<EstimatorConfig, Failure> {
    let mut cfg = EstimatorConfig::new(c.epsilon, c.delta)?
        .with_seed(c.seed)
        .with_noise(c.noise_p);
    if let Some(s) = c.shots {
        cfg = cfg.with_shots(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn mode(c: &Common) -> Mode {
    match c.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Sampled => Mode::Sampled,
    }
}

/// Evaluates `f` in exact mode and, when requested, in sampled mode.
fn evaluate(
    params: Vec<(&'static str, f64)>,
    c: &Common,
    f: impl Fn(Mode) -> symtest::Result<AsymmetryResult>,
) -> Result<Row, Failure> {
    let exact = f(Mode::Exact)?;
    let (estimate, shots) = match mode(c) {
        Mode::Exact => (exact.value, 0),
        Mode::Sampled => {
            let s = f(Mode::Sampled)?;
            (s.value, s.shots())
        }
    };
    Ok(Row {
        params,
        estimate,
        exact: exact.value,
        shots,
        seed: c.seed,
        mode: mode(c),
    })
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let (rows, common) = match &cli.scenario {
        Scenario::State { state, common } => {
            let rho: ComplexMatrix = formats::parse_matrix(&read(state)?)?;
            let rep = load_rep(&common.rep, rho.rows())?;
            let cfg = config(common)?;
            let row = evaluate(vec![], common, |m| {
                symmetry::state_asymmetry(&rho, &rep, m, &cfg)
            })?;
            (vec![row], common)
        }
        Scenario::Channel { channel, common } => {
            let ch = formats::parse_channel(&read(channel)?)?;
            let rep = load_rep(&common.rep, ch.in_dim())?;
            let cfg = config(common)?;
            let row = evaluate(vec![], common, |m| {
                symmetry::channel_asymmetry(&ch, &rep, m, &cfg)
            })?;
            (vec![row], common)
        }
        Scenario::Measurement {
            povm,
            out_perm,
            common,
        } => {
            let povm = formats::parse_povm(&read(povm)?)?;
            let mut rep = load_rep(&common.rep, povm.in_dim())?;
            if rep.out_perm().is_none() {
                rep = attach_perm(rep, *out_perm, povm.outcomes())?;
            }
            let cfg = config(common)?;
            let row = evaluate(vec![], common, |m| {
                symmetry::measurement_asymmetry(&povm, &rep, m, &cfg)
            })?;
            (vec![row], common)
        }
        Scenario::AmpDamp { gamma_t, common } => {
            let grid = parse_grid(gamma_t)?;
            if grid.iter().any(|&g| g < 0.0) {
                return Err(Failure::Invariant("Γt must be ≥ 0".into()));
            }
            let rep = load_rep(&common.rep, 2)?;
            let spec = LindbladSpec::amp_damp(1.0)?;
            let cfg = config(common)?;
            let rows = grid
                .par_iter()
                .map(|&gt| {
                    evaluate(vec![("gamma_t", gt)], common, |m| {
                        symmetry::lindbladian_asymmetry(
                            &spec,
                            gt,
                            &rep,
                            m,
                            Realization::ExactExp,
                            &cfg,
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (rows, common)
        }
        Scenario::SpinChain {
            j,
            gamma_t,
            t,
            common,
        } => {
            let js = parse_grid(j)?;
            let gts = parse_grid(gamma_t)?;
            if !(*t > 0.0 && t.is_finite()) {
                return Err(Failure::Invariant(format!("--t must be positive, got {t}")));
            }
            if gts.iter().any(|&g| g < 0.0) {
                return Err(Failure::Invariant("Γt must be ≥ 0".into()));
            }
            if common.trotter_steps == 0 {
                return Err(Failure::Invariant("--trotter-steps must be ≥ 1".into()));
            }
            let rep = load_rep(&common.rep, 4)?;
            let cfg = config(common)?;
            let points: Vec<(f64, f64)> = js
                .iter()
                .flat_map(|&j| gts.iter().map(move |&g| (j, g)))
                .collect();
            let t = *t;
            let rows = points
                .par_iter()
                .map(|&(j, gt)| {
                    let spec = LindbladSpec::xx_chain(j, gt / t)?;
                    evaluate(vec![("j", j), ("gamma_t", gt), ("t", t)], common, |m| {
                        let realization = match m {
                            Mode::Exact => Realization::ExactExp,
                            Mode::Sampled => Realization::Trotter(common.trotter_steps),
                        };
                        symmetry::lindbladian_asymmetry(&spec, t, &rep, m, realization, &cfg)
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (rows, common)
        }
    };
    write_rows(&rows, common.format, common.output.as_deref())
}

fn attach_perm(rep: GroupRep, choice: PermChoice, outcomes: usize) -> Result<GroupRep, Failure> {
    match choice {
        PermChoice::Identity => Ok(rep.with_identity_perm(outcomes)?),
        PermChoice::BitFlip => {
            if rep.order() != 2 || !outcomes.is_power_of_two() {
                return Err(Failure::Invariant(
                    "bit-flip permutation needs a two-element group and 2^m outcomes".into(),
                ));
            }
            let id: Vec<usize> = (0..outcomes).collect();
            let flip = bit_flip_perm(outcomes.trailing_zeros() as usize);
            Ok(rep.with_out_perm(vec![id, flip])?)
        }
    }
}
