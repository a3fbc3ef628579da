use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Largest accepted denominator; keeps `t * (|C| - 1)` comfortably inside `u64`.
pub const MAX_DENOMINATOR: u64 = 1 << 32;

/// The tie reward `alpha = s / t`, kept in lowest terms.
///
/// Scores are never computed with `alpha` directly: a candidate with `w`
/// wins and `d` ties has the scaled score `t * w + s * d`, which compares
/// exactly like the rational score `w + alpha * d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alpha {
    num: u64,
    den: u64,
}

impl Alpha {
    pub const ZERO: Alpha = Alpha { num: 0, den: 1 };
    pub const HALF: Alpha = Alpha { num: 1, den: 2 };
    pub const ONE: Alpha = Alpha { num: 1, den: 1 };

    /// Builds `num / den`, reducing the fraction.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den || den > MAX_DENOMINATOR {
            return Err(Error::InvalidAlpha(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        Ok(Alpha {
            num: num / g,
            den: den / g,
        })
    }

    /// `s`
    pub fn num(self) -> u64 {
        self.num
    }

    /// `t`
    pub fn den(self) -> u64 {
        self.den
    }

    /// Strictly between zero and one.
    pub fn is_interior(self) -> bool {
        self.num > 0 && self.num < self.den
    }

    /// Scaled points for a win, a tie and a loss: `(t, s, 0)`.
    pub fn win_points(self) -> u64 {
        self.den
    }

    pub fn tie_points(self) -> u64 {
        self.num
    }

    /// The test grid used throughout the crate: 0, 1/3, 1/2, 2/3, 1.
    pub fn grid() -> [Alpha; 5] {
        [
            Alpha::ZERO,
            Alpha { num: 1, den: 3 },
            Alpha::HALF,
            Alpha { num: 2, den: 3 },
            Alpha::ONE,
        ]
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAlpha(s.to_string());
        let (n, d) = s.trim().split_once('/').ok_or_else(bad)?;
        let num = n.trim().parse::<u64>().map_err(|_| bad())?;
        let den = d.trim().parse::<u64>().map_err(|_| bad())?;
        Alpha::new(num, den)
    }
}
