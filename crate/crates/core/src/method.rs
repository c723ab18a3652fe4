use std::fmt;
use std::str::FromStr;

use crate::error::OptimError;

/// The closed set of first-order methods this crate implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gd,
    Mom,
    /// Nesterov in velocity form: gradient at `theta + mu * v`.
    Nag,
    /// Nesterov as a smoothed extrapolation of the last two iterates.
    NagOriginal,
    /// Nesterov as a regulariser step followed by a lookahead step.
    NagTwoStage,
    Rud,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Gd,
        Method::Mom,
        Method::Nag,
        Method::NagOriginal,
        Method::NagTwoStage,
        Method::Rud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Mom => "mom",
            Method::Nag => "nag",
            Method::NagOriginal => "nag-original",
            Method::NagTwoStage => "nag-two-stage",
            Method::Rud => "rud",
        }
    }

    /// Maps the Nesterov variants onto `Nag` and leaves the rest untouched.
    pub fn analysis_alias(self) -> Method {
        match self {
            Method::NagOriginal | Method::NagTwoStage => Method::Nag,
            m => m,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = OptimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| OptimError::InvalidArgument(format!("unknown method `{s}`")))
    }
}
