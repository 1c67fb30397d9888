use std::fmt;
use std::ops::Mul;

use num_bigint::BigUint;
use num_traits::One;

/// Exact natural number, used for `α!` and the factorial inequalities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BigNat(BigUint);

impl BigNat {
    pub fn one() -> Self {
        Self(BigUint::one())
    }

    pub fn from_u64(n: u64) -> Self {
        Self(BigUint::from(n))
    }

    pub fn factorial(n: u32) -> Self {
        Self((2..=n as u64).fold(BigUint::one(), |acc, j| acc * j))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Fits in a `u64`?
    pub fn to_u64(&self) -> Option<u64> {
        let digits = self.0.to_u64_digits();
        match digits.len() {
            0 => Some(0),
            1 => Some(digits[0]),
            _ => None,
        }
    }
}

impl From<BigUint> for BigNat {
    fn from(v: BigUint) -> Self {
        Self(v)
    }
}

impl Mul for &BigNat {
    type Output = BigNat;
    fn mul(self, rhs: &BigNat) -> BigNat {
        BigNat(&self.0 * &rhs.0)
    }
}

impl fmt::Display for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lazily grown table of `n!`.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    values: Vec<BigNat>,
}

impl Default for FactorialTable {
    fn default() -> Self {
        Self::new()
    }
}

impl FactorialTable {
    pub fn new() -> Self {
        Self {
            values: vec![BigNat::one()],
        }
    }

    pub fn get(&mut self, n: u32) -> &BigNat {
        while self.values.len() <= n as usize {
            let j = self.values.len() as u64;
            let next = self.values.last().unwrap() * &BigNat::from_u64(j);
            self.values.push(next);
        }
        &self.values[n as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_direct() {
        let mut t = FactorialTable::new();
        for n in [0u32, 1, 5, 20, 3] {
            assert_eq!(t.get(n), &BigNat::factorial(n));
        }
        assert_eq!(BigNat::factorial(20).to_u64(), Some(2_432_902_008_176_640_000));
    }
}
