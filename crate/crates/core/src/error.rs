use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("under-resolved integration: {steps} steps < floor {floor}")]
    UnderResolved { steps: usize, floor: usize },

    #[error("trajectory is not cyclic: distance {distance:.3e} to the reference")]
    NotCyclic { distance: f64 },

    #[error("state left the followed eigenstate (overlap {overlap:.3e} at t = {time})")]
    LostEigenstate { overlap: f64, time: f64 },

    #[error("count record has zero total events")]
    ZeroCounts,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
