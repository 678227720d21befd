use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Side of a cooriented hyperplane. `Minus < Plus`, so codewords sort
/// lexicographically with `-` before `+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// Sign of a nonzero value; `None` for zero and NaN.
    pub fn of(value: f64) -> Option<Sign> {
        if value > 0.0 {
            Some(Sign::Plus)
        } else if value < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Sign vector of a region with respect to an ordered arrangement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Codeword(Vec<Sign>);

impl Codeword {
    pub fn new(signs: Vec<Sign>) -> Self {
        Codeword(signs)
    }

    pub fn all(sign: Sign, len: usize) -> Self {
        Codeword(vec![sign; len])
    }

    /// The `index`-th word of `{-,+}^len` in lexicographic order (bit `len-1-k`
    /// of `index` set means position `k` is `+`).
    pub fn from_rank(index: u64, len: usize) -> Self {
        Codeword(
            (0..len)
                .map(|k| {
                    if index >> (len - 1 - k) & 1 == 1 {
                        Sign::Plus
                    } else {
                        Sign::Minus
                    }
                })
                .collect(),
        )
    }

    /// Inverse of [`Codeword::from_rank`].
    pub fn rank(&self) -> u64 {
        self.0
            .iter()
            .fold(0, |acc, s| (acc << 1) | u64::from(*s == Sign::Plus))
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, sign: Sign) -> usize {
        self.0.iter().filter(|&&s| s == sign).count()
    }

    /// Coordinates permuted so that position `k` holds the sign at `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Codeword {
        Codeword(perm.iter().map(|&i| self.0[i]).collect())
    }
}

impl Neg for &Codeword {
    type Output = Codeword;

    fn neg(self) -> Codeword {
        Codeword(self.0.iter().map(|&s| -s).collect())
    }
}

impl Neg for Codeword {
    type Output = Codeword;

    fn neg(self) -> Codeword {
        -&self
    }
}

impl std::ops::Index<usize> for Codeword {
    type Output = Sign;

    fn index(&self, i: usize) -> &Sign {
        &self.0[i]
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.as_char()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("codewords use only '+' and '-', found {0:?}")]
pub struct ParseCodewordError(pub char);

impl FromStr for Codeword {
    type Err = ParseCodewordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' | '\u{2212}' => Ok(Sign::Minus),
                other => Err(ParseCodewordError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Codeword)
    }
}

impl From<Codeword> for String {
    fn from(c: Codeword) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Codeword {
    type Error = ParseCodewordError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_matches_lexicographic_order() {
        let words: Vec<Codeword> = (0..8).map(|i| Codeword::from_rank(i, 3)).collect();
        assert_eq!(words[0].to_string(), "---");
        assert_eq!(words[5].to_string(), "+-+");
        assert_eq!(words[7].to_string(), "+++");
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(sorted, words);
        for (i, w) in words.iter().enumerate() {
            assert_eq!(w.rank(), i as u64);
        }
    }

    #[test]
    fn parse_display_negate() {
        let c: Codeword = "+-+".parse().unwrap();
        assert_eq!((-&c).to_string(), "-+-");
        assert_eq!(c.count(Sign::Plus), 2);
        assert!("+x".parse::<Codeword>().is_err());
        assert_eq!(serde_json::to_string(&c).unwrap(), "\"+-+\"");
    }
}
