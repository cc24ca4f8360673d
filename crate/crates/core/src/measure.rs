//! Curvature measures behind a single interface, plus rational helpers.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use crate::cycles;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::gromov::{self, SlimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Geometric { d: usize },
    GromovSlim(SlimOptions),
    GromovFourPoint,
}

impl Measure {
    pub fn evaluate(&self, g: &Graph) -> Result<Rational64> {
        match self {
            Measure::Geometric { d } => Ok(cycles::geometric_curvature(g, *d)?.into()),
            Measure::GromovSlim(opts) => Ok(gromov::slim_hyperbolicity(g, opts)?.value),
            Measure::GromovFourPoint => gromov::four_point_hyperbolicity(g),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Geometric { .. } => "geometric",
            Measure::GromovSlim(_) => "gromov-slim",
            Measure::GromovFourPoint => "gromov-4pt",
        }
    }

    pub fn is_geometric(&self) -> bool {
        matches!(self, Measure::Geometric { .. })
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Geometric { d } => write!(f, "geometric(d={d})"),
            Measure::GromovSlim(o) => write!(f, "gromov-slim({:?})", o.aggregation),
            Measure::GromovFourPoint => write!(f, "gromov-4pt"),
        }
    }
}

/// Parses `p/q` or an integer.
pub fn parse_ratio(s: &str) -> Result<Rational64> {
    let r = Rational64::from_str(s.trim()).map_err(|_| Error::InvalidParameter(format!("not a rational: {s:?}")))?;
    Ok(r)
}

/// Canonical text form: `3`, `-1/2`.
pub fn ratio_string(r: &Rational64) -> String {
    r.to_string()
}

pub fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

/// Serialisable wrapper rendering as a `p/q` string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ratio(pub Rational64);

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_ratio(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/5").unwrap(), Rational64::new(1, 5));
        assert_eq!(parse_ratio("2/4").unwrap(), Rational64::new(1, 2));
        assert_eq!(parse_ratio("-3").unwrap(), Rational64::from(-3));
        assert!(parse_ratio("x").is_err());
        assert_eq!(ratio_string(&Rational64::new(6, 4)), "3/2");
        assert_eq!(ratio_string(&Rational64::from(3)), "3");
    }
}
