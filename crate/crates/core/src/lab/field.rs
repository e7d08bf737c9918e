//! Exact coefficient fields for the sampling lab: the rationals and
//! prime fields with a dynamically chosen modulus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} does not fit 31 bits")]
    ModulusTooLarge(u64),
    #[error("cannot parse {0:?} as a field element")]
    BadElement(String),
    #[error("sections of the left term fail injectivity at twist {k}")]
    AlphaH0NotInjective { k: i64 },
    #[error("no admissible sample after {tries} attempts with seed {seed}")]
    ResampleBudget { tries: u32, seed: u64 },
    #[error("{0}")]
    BadInput(String),
}

/// Exact field operations over a cloneable element type.  Everything the
/// lab does reduces to these plus the rank routine, which the rationals
/// override with fraction-free elimination.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn format_elem(&self, a: &Self::Elem) -> String;
    fn parse_elem(&self, s: &str) -> Result<Self::Elem, LabError>;

    /// Rank of a row-major dense matrix; consumes the buffer.
    fn mat_rank(&self, rows: usize, cols: usize, data: &mut [Self::Elem]) -> usize {
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| !self.is_zero(&data[i * cols + c])) else {
                continue;
            };
            if piv != r {
                for j in 0..cols {
                    data.swap(r * cols + j, piv * cols + j);
                }
            }
            let inv = self.inv(&data[r * cols + c]).expect("pivot is nonzero");
            for i in (r + 1)..rows {
                let factor = self.mul(&data[i * cols + c], &inv);
                if self.is_zero(&factor) {
                    continue;
                }
                for j in c..cols {
                    let t = self.mul(&factor, &data[r * cols + j]);
                    data[i * cols + j] = self.sub(&data[i * cols + j], &t);
                }
            }
            r += 1;
        }
        r
    }
}

/// The rational numbers with arbitrary-precision representation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn name(&self) -> String {
        "Q".to_string()
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_i64(&self, x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn format_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<BigRational, LabError> {
        BigRational::from_str(s.trim()).map_err(|_| LabError::BadElement(s.to_string()))
    }

    /// Clears denominators row by row, then runs fraction-free integer
    /// elimination; avoids the coefficient blowup of rational pivoting.
    fn mat_rank(&self, rows: usize, cols: usize, data: &mut [BigRational]) -> usize {
        let mut ints = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            let mut scale = BigInt::one();
            for j in 0..cols {
                let d = data[i * cols + j].denom();
                if !(&scale % d).is_zero() {
                    scale = num_integer::lcm(scale, d.clone());
                }
            }
            for j in 0..cols {
                let x = &data[i * cols + j];
                ints.push(x.numer() * (&scale / x.denom()));
            }
        }
        super::linalg::bareiss_rank(rows, cols, &mut ints)
    }
}

/// F_p for a prime modulus below 2^31; elements are canonical residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<PrimeField, LabError> {
        if p >= 1 << 31 {
            return Err(LabError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(LabError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * base as u128 % self.p as u128) as u64;
            }
            base = (base as u128 * base as u128 % self.p as u128) as u64;
            e >>= 1;
        }
        acc
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn name(&self) -> String {
        format!("F_{}", self.p)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b % self.p) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        (*a as u128 * *b as u128 % self.p as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.pow(*a, self.p - 2))
        }
    }

    fn is_zero(&self, a: &u64) -> bool {
        a % self.p == 0
    }

    fn format_elem(&self, a: &u64) -> String {
        (a % self.p).to_string()
    }

    fn parse_elem(&self, s: &str) -> Result<u64, LabError> {
        s.trim()
            .parse::<i64>()
            .map(|x| self.from_i64(x))
            .map_err(|_| LabError::BadElement(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_prime_field_construction() {
        assert!(PrimeField::new(101).is_ok());
        assert!(PrimeField::new(10007).is_ok());
        assert!(matches!(PrimeField::new(100), Err(LabError::NotPrime(100))));
        assert!(matches!(PrimeField::new(1), Err(LabError::NotPrime(1))));
        assert!(matches!(
            PrimeField::new(1 << 32),
            Err(LabError::ModulusTooLarge(_))
        ));
    }

    #[test]
    fn test_prime_field_arithmetic() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.from_i64(-1), 100);
        assert_eq!(f.add(&100, &1), 0);
        assert_eq!(f.mul(&100, &100), 1);
        for a in 1..101u64 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1, "a={a}");
        }
        assert_eq!(f.inv(&0), None);
    }

    #[test]
    fn test_rational_parse_format() {
        let f = Rationals;
        let half = f.parse_elem("1/2").unwrap();
        assert_eq!(f.format_elem(&half), "1/2");
        let three = f.parse_elem("3").unwrap();
        assert_eq!(f.format_elem(&three), "3");
        assert!(f.parse_elem("x").is_err());
        assert_eq!(f.add(&half, &half), f.one());
    }

    #[test]
    fn test_generic_rank() {
        let f = PrimeField::new(7).unwrap();
        // [[1,2],[2,4]] has rank 1 mod 7.
        let mut data = vec![1u64, 2, 2, 4];
        assert_eq!(f.mat_rank(2, 2, &mut data), 1);
        let mut id = vec![1u64, 0, 0, 1];
        assert_eq!(f.mat_rank(2, 2, &mut id), 2);
    }

    #[test]
    fn test_rational_rank_matches_generic_shape() {
        let f = Rationals;
        // Rank 2: rows are (1/2, 1/3), (1/4, 1/5).
        let mut data = vec![
            f.parse_elem("1/2").unwrap(),
            f.parse_elem("1/3").unwrap(),
            f.parse_elem("1/4").unwrap(),
            f.parse_elem("1/5").unwrap(),
        ];
        assert_eq!(f.mat_rank(2, 2, &mut data), 2);
        // Proportional rows collapse to rank 1.
        let mut dep = vec![
            f.parse_elem("1/2").unwrap(),
            f.parse_elem("1/3").unwrap(),
            f.parse_elem("3/2").unwrap(),
            f.parse_elem("1").unwrap(),
        ];
        assert_eq!(f.mat_rank(2, 2, &mut dep), 1);
    }
}
