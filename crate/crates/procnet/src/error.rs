use thiserror::Error;

/// Everything that can go wrong when evaluating, optimizing, or simulating
/// a network configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A noise intensity or variance that must be strictly positive is not.
    #[error("{field} must be > 0, got {value}")]
    NonPositiveNoise { field: &'static str, value: f64 },

    /// A delay-law parameter is negative (or zero where positivity is required).
    #[error("{field} must be nonnegative, got {value}")]
    NegativeDelayParam { field: &'static str, value: f64 },

    /// The network has no sensors.
    #[error("sensors must be >= 1")]
    ZeroSensors,

    /// A decay exponent or rate that must be strictly positive is not.
    #[error("{field} must be > 0, got {value}")]
    NonPositiveRate { field: &'static str, value: f64 },

    /// The initial variance is negative.
    #[error("p0 must be >= 0, got {value}")]
    NegativeInitialVariance { value: f64 },

    /// A preprocessing delay outside the domain of an inverse decay law.
    #[error("tau must be > 0 for this model, got {tau}")]
    NonPositiveTau { tau: f64 },

    /// Requested more active sensors than the network has.
    #[error("sensor count {used} out of range 1..={available}")]
    SensorCountOutOfRange { used: u32, available: u32 },

    /// The bracket-growing phase of a line search never saw the objective rise.
    #[error("objective never increased after {doublings} bracket doublings")]
    BracketFailure { doublings: u32 },

    /// The critical-point scan found no positive root in its search range.
    #[error("no positive root found in [{lo}, {hi}]")]
    RootScanFailure { lo: f64, hi: f64 },

    /// The simulation plan leaves too little data after burn-in and delay.
    #[error("horizon too short: {samples} samples after burn-in, need >= {needed}")]
    HorizonTooShort { samples: u64, needed: u64 },

    /// A simulation plan parameter is outside its domain.
    #[error("invalid simulation plan: {reason}")]
    InvalidPlan { reason: &'static str },
}
