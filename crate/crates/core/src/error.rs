use thiserror::Error;

/// Errors raised by the walk, limit and propagator routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (|H - H^dagger| = {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("input operator is not Hermitian (|A - A^dagger| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("axis is not normalized (|n| = {norm})")]
    AxisNotNormalized { norm: f64 },

    #[error("schedule needs at least 4 points, got {0}")]
    DegenerateSchedule(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("continuous-time limit requires an even step count, got n = {0}")]
    OddStepCount(u32),

    #[error("insufficient data for a slope fit: {0}")]
    InsufficientData(String),

    #[error("Bessel kernel cutoff {cutoff} below required {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("Hamiltonian is not a continuous-time family member: {0}")]
    NotContinuousTime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
