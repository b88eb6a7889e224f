use thiserror::Error;

/// Errors surfaced by the simulation and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An initial coin state whose norm deviates from 1 by more than 1e-9.
    #[error("initial coin state is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// The walker has used up the step budget its array was allocated for.
    /// The lattice is logically infinite; running past the budget would wrap,
    /// so it is a hard error instead.
    #[error("step budget exhausted: walker at t = {t} with budget {budget}")]
    StepBudgetExhausted { t: usize, budget: usize },

    /// Coin amplitudes must satisfy lambda^2 + gamma^2 <= 1.
    #[error("coin parameters out of range: lambda^2 + gamma^2 = {sum} > 1")]
    CoinParamsOutOfRange { sum: f64 },

    /// Joint moments are supported up to total degree 8; beyond that,
    /// floating-point cancellation dominates at the lattice sizes in use.
    #[error("moment total degree {degree} exceeds the supported maximum of 8")]
    MomentDegreeTooHigh { degree: u32 },

    /// The computed radial variance came out below -1e-12, which cannot
    /// happen for a valid probability field.
    #[error("radial variance {variance:.3e} is negative beyond tolerance")]
    NegativeVariance { variance: f64 },

    /// A momentum-space node too close to a band edge (|b| -> 1), where the
    /// eigenphase gradient is singular. Quadrature grids must avoid these.
    #[error("momentum node too close to a band edge: |b| = {b_abs}")]
    BandEdge { b_abs: f64 },

    /// The asymptotic moment theorem only covers even total degree.
    #[error("asymptotic moment requires even total degree, got {degree}")]
    OddMomentDegree { degree: u32 },

    /// A probability field that is not a valid distribution.
    #[error("invalid probability field: {reason}")]
    InvalidField { reason: String },

    /// Exact walk enumeration is capped at a desk-scale path length.
    #[error("enumeration of {n}-step walks exceeds the budget of {max} steps")]
    EnumerationBudget { n: usize, max: usize },
}
