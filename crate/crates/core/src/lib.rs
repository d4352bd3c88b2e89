//! Hilbert–Schmidt asymmetry measures for quantum states, channels,
//! Lindbladian evolutions and measurements, with exact evaluation and
//! shot-based estimation through destructive SWAP tests.

pub mod channels;
pub mod error;
pub mod formats;
pub mod groups;
pub mod linalg;
pub mod lindblad;
pub mod oracles;
pub mod random;
pub mod sampler;
pub mod symmetry;

pub use channels::{ChoiState, KrausChannel, PovmChannel};
pub use error::{Error, Result};
pub use groups::{builtin_rep, GroupRep};
pub use linalg::{ComplexMatrix, C64};
pub use lindblad::{LindbladSpec, Superoperator};
pub use sampler::{EstimateReport, EstimatorConfig};
pub use symmetry::{AsymmetryResult, Mode, Realization};
