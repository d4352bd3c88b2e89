use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "symtest",
    version,
    about = "Estimate Hilbert–Schmidt asymmetry of states, channels, Lindbladians and measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub scenario: Scenario,
}

#[derive(Subcommand, Debug)]
pub enum Scenario {
    /// Asymmetry of a density matrix read from a matrix file.
    State {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Asymmetry of a channel read from a channel file.
    Channel {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Asymmetry of a measurement read from a POVM file.
    Measurement {
        #[arg(long)]
        povm: PathBuf,
        /// Outcome permutation used with built-in representations.
        #[arg(long, value_enum, default_value_t = PermChoice::Identity)]
        out_perm: PermChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Amplitude damping at unit rate over a grid of Γt.
    AmpDamp {
        /// Grid of Γt values, as a:b:step or a comma list.
        #[arg(long, default_value = "0:2:0.25")]
        gamma_t: String,
        #[command(flatten)]
        common: Common,
    },
    /// Damped two-qubit XX chain over a grid of (J, Γt) at fixed t.
    SpinChain {
        /// Coupling values, as a:b:step or a comma list.
        #[arg(long, default_value = "0.5,1,2")]
        j: String,
        /// Grid of Γt values, as a:b:step or a comma list.
        #[arg(long, default_value = "0,0.5,1,2")]
        gamma_t: String,
        /// Evolution time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Built-in representation (I,X  I,Z  I,Z1Z2  I,X1X2  I,SWAP) or a rep file.
    #[arg(long)]
    pub rep: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Total accuracy target of a sampled asymmetry.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Total failure probability of a sampled asymmetry.
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    /// Shots per sub-estimator, overriding the Hoeffding count.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Single-qubit depolarizing probability after two-qubit gates and channels.
    #[arg(long, default_value_t = 0.0)]
    pub noise_p: f64,
    /// Trotter steps for sampled Lindbladian runs.
    #[arg(long, default_value_t = 16)]
    pub trotter_steps: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Exact,
    Sampled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermChoice {
    Identity,
    BitFlip,
}

/// Parses "a:b:step" (inclusive) or "x,y,z".
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Parse(format!("invalid grid {s:?}: {why}"));
    let num = |t: &str| -> Result<f64, Failure> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| bad(&format!("{t:?} is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("values must be finite"))
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step <= 0.0 {
                return Err(bad("step must be positive"));
            }
            if b < a {
                return Err(bad("end lies before start"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(bad("too many points"));
            }
            (0..n).map(|i| a + i as f64 * step).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad("expected a:b:step or a comma-separated list")),
    };
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let g = parse_grid("0:2:0.25").unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[8], 2.0);
        assert_eq!(parse_grid("1:1:0.5").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0:1:0.3").unwrap().len(), 4);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
    }

    #[test]
    fn rejects() {
        for s in ["", "a", "0:1", "0:1:0", "1:0:0.1", "0:1:-1", "nan", "1,,2"] {
            assert!(parse_grid(s).is_err(), "{s}");
        }
    }
}
