use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("n = {n} has the wrong parity for statistic `{statistic}`")]
    Parity { statistic: &'static str, n: u64 },

    #[error("brute-force enumeration refused for n = {n} (limit {limit})")]
    EnumerationTooLarge { n: u32, limit: u32 },

    /// `f_z'` is discontinuous at `x = z`; both one-sided values are carried.
    #[error("derivative jumps at x = z: left {left}, right {right}")]
    Jump { left: f64, right: f64 },

    #[error("singular Stein system: nullity {nullity}")]
    SingularSystem { nullity: usize },

    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
