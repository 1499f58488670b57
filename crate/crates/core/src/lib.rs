//! Berry phase imprinted on one half of an entangled spin-½ pair.
//!
//! * [`quantum`]: state vectors, projectors and expectation values on ℂ² and ℂ²⊗ℂ².
//! * [`berry`]: rotating-field Hamiltonian, analytic Berry/dynamical phases,
//!   an RK4 Schrödinger oracle, phase extraction and the spin-echo sequence.
//! * [`bell`]: phase-imprinted singlet, correlations, the CHSH S-function,
//!   the azimuthal compensation rule, Bell angles and the S_max curve.
//! * [`neutron`]: single-neutron path⊗spin analogue with simulated counts.
//! * [`optimize`]: grid and golden-section search used by the S_max oracle.
//!
//! Everything is generic over [`Real`]; the aliases below fix `f64`.
//! Units: ħ ≡ 1, angles in radians.

// `!(x < tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod berry;
pub mod error;
pub mod format;
pub mod neutron;
pub mod optimize;
pub mod quantum;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Tolerance tiers.
pub mod tol {
    use crate::scalar::Real;

    /// Construction and unitarity.
    pub const UNITARY: f64 = 1e-12;
    /// Symmetry defect above which an operator is rejected as non-Hermitian.
    pub const HERMITIAN: f64 = 1e-10;
    /// Oracle-vs-analytic agreement, dominated by adiabaticity.
    pub const ORACLE: f64 = 1e-3;
    /// Norm drift budget of a stored trajectory.
    pub const TRAJECTORY_NORM: f64 = 1e-9;

    /// `tol`, but never below what the scalar type can resolve.
    pub fn tier<T: Real>(tol: f64) -> T {
        T::lit(tol).max(T::epsilon() * T::lit(64.0))
    }
}

pub type SpinState = quantum::SpinState<f64>;
pub type PairState = quantum::PairState<f64>;
pub type MeasurementDirection = quantum::MeasurementDirection<f64>;
pub type Op2 = quantum::Op2<f64>;
pub type Op4 = quantum::Op4<f64>;
pub type FieldConfig = berry::FieldConfig<f64>;
pub type PhasePair = berry::PhasePair<f64>;
pub type Trajectory = berry::Trajectory<f64>;
pub type BellSetting = bell::BellSetting<f64>;
pub type BerryParameter = bell::BerryParameter<f64>;
pub type NeutronState = neutron::NeutronState<f64>;
pub type InterferometerConfig = neutron::InterferometerConfig<f64>;
pub type CountRecord = neutron::CountRecord<f64>;

pub type SpinStateF32 = quantum::SpinState<f32>;
pub type MeasurementDirectionF32 = quantum::MeasurementDirection<f32>;
pub type BerryParameterF32 = bell::BerryParameter<f32>;
