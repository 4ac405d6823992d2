//! Fixed-depth time-evolution circuits `e^{-itH} = K e^{-ith} K†` for
//! Pauli-sum Hamiltonians, found by a sequence of small Rotosolve
//! subproblems over fragments of the Cartan algebra `k`.
//!
//! ```
//! use redcard::models::{build, ModelSpec};
//! use redcard::optimize::{run_redcard, SynthesisConfig};
//!
//! let h = build(&ModelSpec::tfim(3, 1.0, 0.5)).unwrap();
//! let result = run_redcard(&h, &SynthesisConfig::default()).unwrap();
//! assert!(result.residual < 1e-3);
//! ```

pub mod adjoint;
pub mod algebra;
pub mod bench;
pub mod cartan;
pub mod circuits;
pub mod error;
pub mod models;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod qsim;

pub use adjoint::{conjugate, inner, residual, Ansatz, Direction};
pub use algebra::{frustration_components, generate_dla, Dla, FrustrationGraph};
pub use cartan::{CartanStructure, DecomposeOptions};
pub use circuits::{build_evolution_circuit, export_qasm, parse_qasm, Circuit, Gate};
pub use error::{Error, Result};
pub use models::{build, Family, ModelSpec};
pub use optimize::{run_redcard, run_standard, Backend, SynthesisConfig, SynthesisResult};
pub use pauli::{PauliString, PauliSum};
pub use qsim::ShotConfig;
