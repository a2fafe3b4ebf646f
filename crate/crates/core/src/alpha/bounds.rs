//! Sample sizes that make a Bernoulli proportion estimate `eps`-accurate
//! with probability at least `1 - delta`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Chebyshev,
    Hoeffding,
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" => Ok(BoundKind::Chebyshev),
            "hoeffding" => Ok(BoundKind::Hoeffding),
            other => Err(Error::Domain(format!("unknown bound kind `{other}`"))),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Chebyshev => "chebyshev",
            BoundKind::Hoeffding => "hoeffding",
        })
    }
}

/// Worst-case Chebyshev bound `1 / (4 eps^2 r)` on the failure probability.
pub fn chebyshev_bound(eps: f64, r: u64) -> f64 {
    1.0 / (4.0 * eps * eps * r as f64)
}

/// Hoeffding bound `2 exp(-2 r eps^2)` on the failure probability.
pub fn hoeffding_bound(eps: f64, r: u64) -> f64 {
    2.0 * (-2.0 * r as f64 * eps * eps).exp()
}

/// Smallest `r` for which the chosen bound is at most `delta`.
pub fn required_samples(eps: f64, delta: f64, kind: BoundKind) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie in (0,1), got {eps}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    let real = match kind {
        BoundKind::Chebyshev => 1.0 / (4.0 * eps * eps * delta),
        BoundKind::Hoeffding => (2.0 / delta).ln() / (2.0 * eps * eps),
    };
    // absorb rounding noise such as 1/(4 * 0.1^2 * 0.05) = 500.0000000000001
    let r = (real * (1.0 - 1e-12)).ceil().max(1.0);
    Ok(r as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(
            required_samples(0.1, 0.05, BoundKind::Chebyshev).unwrap(),
            500
        );
        assert_eq!(
            required_samples(0.1, 0.05, BoundKind::Hoeffding).unwrap(),
            185
        );
        assert_eq!(
            required_samples(0.34, 0.2, BoundKind::Hoeffding).unwrap(),
            10
        );
    }

    #[test]
    fn minimality() {
        for &(eps, delta) in &[(0.1, 0.05), (0.05, 0.01), (0.34, 0.2), (0.2, 0.5)] {
            let r = required_samples(eps, delta, BoundKind::Hoeffding).unwrap();
            assert!(hoeffding_bound(eps, r) <= delta * (1.0 + 1e-9));
            assert!(hoeffding_bound(eps, r - 1) > delta);
            let r = required_samples(eps, delta, BoundKind::Chebyshev).unwrap();
            assert!(chebyshev_bound(eps, r) <= delta * (1.0 + 1e-9));
            if r > 1 {
                assert!(chebyshev_bound(eps, r - 1) > delta);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(required_samples(0.0, 0.05, BoundKind::Chebyshev).is_err());
        assert!(required_samples(1.0, 0.05, BoundKind::Chebyshev).is_err());
        assert!(required_samples(0.1, 0.0, BoundKind::Hoeffding).is_err());
        assert!(required_samples(0.1, f64::NAN, BoundKind::Hoeffding).is_err());
        assert!("bogus".parse::<BoundKind>().is_err());
    }
}
