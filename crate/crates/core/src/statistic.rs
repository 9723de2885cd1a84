use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The simple-random-walk statistics with a half-normal limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    /// `K_n`: number of returns to the origin up to time `n = 2m`.
    Returns,
    /// `M_n`: running maximum up to time `n = 2m`.
    Max,
    /// `N_n = floor((M_n + 1) / 2)`, the auxiliary companion of `M_n`.
    HalfMax,
    /// `C_n`: number of sign changes up to time `n = 2m + 1`.
    SignChanges,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::Returns,
        Statistic::Max,
        Statistic::HalfMax,
        Statistic::SignChanges,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Returns => "returns",
            Statistic::Max => "max",
            Statistic::HalfMax => "halfmax",
            Statistic::SignChanges => "signchanges",
        }
    }

    /// Whether the walk length must be odd (`2m + 1`) rather than even (`2m`).
    pub fn needs_odd_n(self) -> bool {
        matches!(self, Statistic::SignChanges)
    }

    /// Walk length for parameter `m`.
    pub fn n_for_m(self, m: u64) -> u64 {
        if self.needs_odd_n() {
            2 * m + 1
        } else {
            2 * m
        }
    }

    /// Inverse of [`Statistic::n_for_m`]; rejects the wrong parity and `m = 0`.
    pub fn m_for_n(self, n: u64) -> crate::Result<u64> {
        let ok = if self.needs_odd_n() {
            n % 2 == 1 && n >= 3
        } else {
            n.is_multiple_of(2) && n >= 2
        };
        if !ok {
            return Err(Error::Parity {
                statistic: self.name(),
                n,
            });
        }
        Ok(n / 2)
    }

    /// Largest value the statistic can take for walk length `n`.
    pub fn max_value(self, n: u64) -> u64 {
        match self {
            Statistic::Returns | Statistic::HalfMax => n / 2,
            Statistic::Max => n,
            Statistic::SignChanges => n.saturating_sub(1) / 2,
        }
    }

    /// Lattice spacing of the normalized variable (`1/sqrt(n)` or `2/sqrt(n)`).
    pub fn scale(self, n: u64) -> f64 {
        let root = (n as f64).sqrt();
        match self {
            Statistic::Returns | Statistic::Max => 1.0 / root,
            Statistic::HalfMax | Statistic::SignChanges => 2.0 / root,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "returns" | "k" => Ok(Statistic::Returns),
            "max" | "m" => Ok(Statistic::Max),
            "halfmax" | "n" => Ok(Statistic::HalfMax),
            "signchanges" | "c" => Ok(Statistic::SignChanges),
            other => Err(Error::UnknownStatistic(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_is_checked() {
        assert_eq!(Statistic::Returns.m_for_n(100).unwrap(), 50);
        assert!(Statistic::Returns.m_for_n(101).is_err());
        assert_eq!(Statistic::SignChanges.m_for_n(101).unwrap(), 50);
        assert!(Statistic::SignChanges.m_for_n(100).is_err());
        assert!(Statistic::SignChanges.m_for_n(1).is_err());
        assert!(Statistic::Max.m_for_n(0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for s in Statistic::ALL {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("bogus".parse::<Statistic>().is_err());
    }
}
