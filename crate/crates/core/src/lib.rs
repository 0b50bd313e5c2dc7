//! Spin correlation tensor and tensor-norm entanglement measure for
//! two-electron (two-qubit) spin states.
//!
//! The measure is `E = ||T - P₁ ⊗ P₂||`, the scaled Frobenius distance between
//! the spin correlation tensor `T_ij = <σ_i ⊗ σ_j>` and the outer product of
//! the two polarization vectors. It vanishes exactly on product states and
//! equals one on the four Bell states.
//!
//! ```
//! use spincorr::{bell_state, entanglement_measure, BellKind};
//!
//! let e = entanglement_measure(&bell_state(BellKind::Singlet)).unwrap();
//! assert!((e.value() - 1.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod format;
pub mod local_ops;
pub mod measurement;
pub mod pauli;
pub mod rng;
pub mod scattering;
pub mod state;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use local_ops::{
    apply_local_povm, apply_local_unitaries, d_matrix, d_transpose_identity_check, q_matrix,
    random_kraus_set, random_local_unitary, sigma_pair_eigenvalues, BlochKind, BlochMap, KrausSet,
    LocalUnitary,
};
pub use measurement::{
    estimate, outcome_distribution, pool_columns, read_tables, run_experiment, sample_table,
    simulate_data, write_tables, Bootstrap, DataMatrix, EstimationReport, OutcomeTable, PooledColumn,
    Spin,
};
pub use pauli::{Axis, Particle, C64};
pub use scattering::{
    amplitude, psi_antisymmetric, psi_symmetric, scattering_state, sweep, verify_phi_independence,
    ScatteringParams, SweepGrid, SweepRow,
};
pub use state::{bell_state, density_matrix, normalize, BellKind, DensityMatrix4, SpinCoefficients, TwoElectronState};
pub use tensor::{
    correlation_tensor_closed, correlation_tensor_trace, entanglement_measure, polarization,
    polarization_trace, product_tensor, swap_symmetry_check, tensor_norm, CorrelationTensor,
    EntanglementValue, Polarization, SpinStatistics,
};
