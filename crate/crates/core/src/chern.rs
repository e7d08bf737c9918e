//! Truncated Chern series, K-classes and slopes, all in exact arithmetic.
//!
//! A Chern series is a polynomial in the hyperplane-power class truncated
//! at the dimension of the ambient variety, with `BigRational` coefficients.
//! A K-class is a finite multiset of line-bundle twists with integer
//! multiplicities; Euler characteristics are linear over it.  Slopes are
//! small exact rationals.

use crate::monads::{MonadShape, MonadSpec};
use crate::varieties::{chi_line_bundle, Variety, VarietyError};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ChernError {
    #[error("series inversion needs constant term 1, got {0}")]
    NonUnitConstant(String),
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("no Euler characteristic oracle for summand {0}")]
    NoChiOracle(String),
    #[error("Chern data is only defined for monads of twists of O_X")]
    SpinorShape,
    #[error(transparent)]
    Variety(#[from] VarietyError),
}

// ---- Chern series ----

/// Polynomial in the ample generator class, truncated beyond degree `order`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChernSeries {
    /// Coefficients by degree, length order + 1.
    pub coeffs: Vec<BigRational>,
}

impl ChernSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order + 1];
        coeffs[0] = BigRational::one();
        ChernSeries { coeffs }
    }

    /// 1 + c*t for an integer c (the total Chern class of O_X(c)).
    pub fn line(order: usize, c: i64) -> Self {
        let mut s = ChernSeries::one(order);
        if order >= 1 {
            s.coeffs[1] = BigRational::from(BigInt::from(c));
        }
        s
    }

    /// Truncated product.
    pub fn mul(&self, other: &ChernSeries) -> Result<ChernSeries, ChernError> {
        if self.order() != other.order() {
            return Err(ChernError::OrderMismatch(self.order(), other.order()));
        }
        let order = self.order();
        let mut coeffs = vec![BigRational::zero(); order + 1];
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(order - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let term = &self.coeffs[i] * &other.coeffs[j];
                coeffs[i + j] += term;
            }
        }
        Ok(ChernSeries { coeffs })
    }

    /// Truncated multiplicative inverse; the constant term must be 1.
    pub fn inverse(&self) -> Result<ChernSeries, ChernError> {
        if !self.coeffs[0].is_one() {
            return Err(ChernError::NonUnitConstant(self.coeffs[0].to_string()));
        }
        let order = self.order();
        let mut inv = vec![BigRational::zero(); order + 1];
        inv[0] = BigRational::one();
        for d in 1..=order {
            let mut acc = BigRational::zero();
            for j in 1..=d {
                acc += &self.coeffs[j] * &inv[d - j];
            }
            inv[d] = -acc;
        }
        Ok(ChernSeries { coeffs: inv })
    }

    /// Truncated non-negative power by repeated squaring.
    pub fn pow(&self, e: u32) -> Result<ChernSeries, ChernError> {
        let mut result = ChernSeries::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Coefficients as exact-rational strings, constant term first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rational_string).collect()
    }
}

impl fmt::Display for ChernSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && d > 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{}", rational_string(c))?,
                1 => write!(f, "{}*t", rational_string(c))?,
                _ => write!(f, "{}*t^{}", rational_string(c), d)?,
            }
        }
        Ok(())
    }
}

/// Renders "p/q", or just "p" for integers.
fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Total Chern class of the monad cohomology: the middle term is trivial,
/// so c(E) = 1 / ((1 - l t)^a (1 + l t)^c), truncated at the dimension.
pub fn chern_of_monad(m: &MonadSpec, v: &Variety) -> Result<ChernSeries, ChernError> {
    if m.shape != MonadShape::M1 {
        return Err(ChernError::SpinorShape);
    }
    let order = v.n as usize;
    let left = ChernSeries::line(order, -v.l).pow(m.a)?;
    let right = ChernSeries::line(order, v.l).pow(m.c)?;
    left.mul(&right)?.inverse()
}

/// (rank, c1) of the monad cohomology, c1 in Picard-generator units.
pub fn rank_and_c1(m: &MonadSpec, v: &Variety) -> (i64, i64) {
    (
        m.b as i64 - m.a as i64 - m.c as i64,
        (m.a as i64 - m.c as i64) * v.l,
    )
}

// ---- K-classes ----

/// Formal integer combination of line-bundle twists, plus opaque spinor
/// summands that carry no Euler-characteristic oracle.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct KClass {
    /// twist -> multiplicity (omitted means 0).
    pub line_terms: BTreeMap<i64, i64>,
    /// Labels of summands without a chi oracle (spinor twists).
    pub opaque_terms: Vec<String>,
}

impl KClass {
    pub fn zero() -> Self {
        KClass::default()
    }

    pub fn line(k: i64, mult: i64) -> Self {
        let mut c = KClass::zero();
        c.add_line(k, mult);
        c
    }

    pub fn add_line(&mut self, k: i64, mult: i64) {
        if mult == 0 {
            return;
        }
        let entry = self.line_terms.entry(k).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.line_terms.remove(&k);
        }
    }

    pub fn add(&self, other: &KClass) -> KClass {
        let mut out = self.clone();
        for (&k, &m) in &other.line_terms {
            out.add_line(k, m);
        }
        out.opaque_terms.extend(other.opaque_terms.iter().cloned());
        out
    }

    pub fn negate(&self) -> KClass {
        let mut out = KClass::zero();
        for (&k, &m) in &self.line_terms {
            out.add_line(k, -m);
        }
        assert!(
            self.opaque_terms.is_empty(),
            "cannot negate opaque summands"
        );
        out
    }

    /// Tensor product: convolution of the twist supports.
    pub fn tensor(&self, other: &KClass) -> KClass {
        assert!(
            self.opaque_terms.is_empty() && other.opaque_terms.is_empty(),
            "tensor with opaque summands is not supported"
        );
        let mut out = KClass::zero();
        for (&k1, &m1) in &self.line_terms {
            for (&k2, &m2) in &other.line_terms {
                out.add_line(k1 + k2, m1 * m2);
            }
        }
        out
    }

    /// Shift every twist by k.
    pub fn twist(&self, k: i64) -> KClass {
        let mut out = KClass::zero();
        for (&t, &m) in &self.line_terms {
            out.add_line(t + k, m);
        }
        out.opaque_terms = self
            .opaque_terms
            .iter()
            .map(|s| format!("{s}({k:+})"))
            .collect();
        out
    }
}

/// K-class of the monad cohomology: b[O] - a[O(-l)] - c[O(l)] for twist
/// monads; spinor left terms become opaque summands.
pub fn kclass_of_monad(m: &MonadSpec, v: &Variety) -> KClass {
    let mut c = KClass::zero();
    c.add_line(0, m.b as i64);
    c.add_line(v.l, -(m.c as i64));
    match m.shape {
        MonadShape::M1 => c.add_line(-v.l, -(m.a as i64)),
        MonadShape::M2_1 => {
            if m.a > 0 {
                c.opaque_terms.push(format!("-{}*S(-1)", m.a));
            }
        }
        MonadShape::M2_2 => {
            if m.a > 0 {
                c.opaque_terms.push(format!("-{}*S1(-1)", m.a));
            }
            if m.a2 > 0 {
                c.opaque_terms.push(format!("-{}*S2(-1)", m.a2));
            }
        }
    }
    c
}

/// Euler characteristic of a K-class on v; errors if an opaque summand is
/// present or the line-bundle chi is undetermined.
pub fn chi_of_kclass(c: &KClass, v: &Variety) -> Result<i64, ChernError> {
    if let Some(t) = c.opaque_terms.first() {
        return Err(ChernError::NoChiOracle(t.clone()));
    }
    let mut acc = 0i64;
    for (&k, &m) in &c.line_terms {
        acc += m * chi_line_bundle(v, k)?;
    }
    Ok(acc)
}

/// chi(E tensor E) for a twist monad, evaluated through the display
/// sequences: chi(E x E) = b chi(E) - c chi(E(l)) - a chi(E(-l)) with
/// chi(E(k)) = b chi(O(k)) - a chi(O(k-l)) - c chi(O(k+l)).  This is an
/// independent route from squaring the K-class; the two must agree.
pub fn chi_tensor_display_chain(m: &MonadSpec, v: &Variety) -> Result<i64, ChernError> {
    if m.shape != MonadShape::M1 {
        return Err(ChernError::SpinorShape);
    }
    let (a, b, c, l) = (m.a as i64, m.b as i64, m.c as i64, v.l);
    let chi_e = |k: i64| -> Result<i64, ChernError> {
        Ok(b * chi_line_bundle(v, k)? - a * chi_line_bundle(v, k - l)?
            - c * chi_line_bundle(v, k + l)?)
    };
    Ok(b * chi_e(0)? - c * chi_e(l)? - a * chi_e(-l)?)
}

// ---- Slopes ----

/// Slope of a sheaf class with respect to the ample generator, as an exact
/// rational: c1 * degree / rank.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct SlopeValue(pub Rational64);

impl SlopeValue {
    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl fmt::Display for SlopeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for SlopeValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SlopeValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let parse = |s: &str| s.trim().parse::<i64>().ok();
        let r = match text.split_once('/') {
            Some((num, den)) => match (parse(num), parse(den)) {
                (Some(n), Some(d)) if d != 0 => Some(Rational64::new(n, d)),
                _ => None,
            },
            None => parse(&text).map(Rational64::from_integer),
        };
        r.map(SlopeValue)
            .ok_or_else(|| serde::de::Error::custom(format!("bad slope {text:?}")))
    }
}

/// mu = c1 * degree / rank.  `c1` is in Picard-generator units; `rank`
/// must be positive.
pub fn slope(c1: i64, rank: i64, v: &Variety) -> SlopeValue {
    assert!(rank > 0, "slope needs positive rank");
    SlopeValue(Rational64::new(c1 * v.degree, rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monads::MonadSpec;

    fn p(n: u32) -> Variety {
        Variety::projective(n).unwrap()
    }

    fn big(i: i64) -> BigRational {
        BigRational::from(BigInt::from(i))
    }

    // Independent oracle: naive untruncated polynomial ops, truncated at
    // the end.
    fn naive_mul(a: &[i64], b: &[i64], order: usize) -> Vec<i64> {
        let mut out = vec![0i64; order + 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    fn naive_pow(base: &[i64], e: u32, order: usize) -> Vec<i64> {
        let mut acc = vec![0i64; order + 1];
        acc[0] = 1;
        for _ in 0..e {
            acc = naive_mul(&acc, base, order);
        }
        acc
    }

    #[test]
    fn test_instanton_chern_series() {
        // Charge c instanton: c(E) = (1 + t^2 + t^4 + ...)^c.
        for n in 2..=8u32 {
            let v = p(n);
            for charge in 1..=5u32 {
                let m = MonadSpec::twist_monad(charge, charge + 2 * charge + 1, charge);
                let series = chern_of_monad(&m, &v).unwrap();
                let mut geometric = vec![0i64; n as usize + 1];
                for d in (0..=n as usize).step_by(2) {
                    geometric[d] = 1;
                }
                let expect = naive_pow(&geometric, charge, n as usize);
                let got: Vec<i64> = series
                    .coeffs
                    .iter()
                    .map(|c| {
                        assert!(c.denom().is_one());
                        i64::try_from(c.numer().clone()).unwrap()
                    })
                    .collect();
                assert_eq!(got, expect, "n={n}, charge={charge}");
            }
        }
    }

    #[test]
    fn test_chern_examples() {
        let v = p(4);
        let charge1 = chern_of_monad(&MonadSpec::twist_monad(1, 4, 1), &v).unwrap();
        assert_eq!(
            charge1.coeffs,
            vec![big(1), big(0), big(1), big(0), big(1)]
        );
        let charge2 = chern_of_monad(&MonadSpec::twist_monad(2, 8, 2), &v).unwrap();
        assert_eq!(
            charge2.coeffs,
            vec![big(1), big(0), big(2), big(0), big(3)]
        );
        let skew = chern_of_monad(&MonadSpec::twist_monad(2, 7, 1), &v).unwrap();
        assert_eq!(skew.coeffs[1], big(1));
    }

    #[test]
    fn test_inverse_is_two_sided() {
        let s = ChernSeries::line(5, -1).pow(3).unwrap();
        let inv = s.inverse().unwrap();
        assert_eq!(s.mul(&inv).unwrap(), ChernSeries::one(5));
    }

    #[test]
    fn test_rank_and_c1() {
        let v = p(4);
        assert_eq!(rank_and_c1(&MonadSpec::twist_monad(2, 7, 1), &v), (4, 1));
        assert_eq!(rank_and_c1(&MonadSpec::twist_monad(4, 13, 5), &v), (4, -1));
        assert_eq!(rank_and_c1(&MonadSpec::twist_monad(1, 4, 1), &v), (2, 0));
    }

    #[test]
    fn test_kclass_square_chi() {
        // chi of the square of the (2, n+3, 1) class equals 8 - n(n+1)/2.
        for n in 4..=10u32 {
            let v = p(n);
            let m = MonadSpec::twist_monad(2, n + 3, 1);
            let k = kclass_of_monad(&m, &v);
            let square = k.tensor(&k);
            let chi = chi_of_kclass(&square, &v).unwrap();
            assert_eq!(chi, 8 - (n as i64) * (n as i64 + 1) / 2, "n={n}");
            assert_eq!(chi, chi_tensor_display_chain(&m, &v).unwrap());
        }
        assert_eq!(
            chi_tensor_display_chain(&MonadSpec::twist_monad(2, 7, 1), &p(4)).unwrap(),
            -2
        );
    }

    #[test]
    fn test_display_chain_matches_square_exhaustively() {
        for n in 1..=8u32 {
            let v = p(n);
            for a in 0..=6u32 {
                for b in 0..=6u32 {
                    for c in 0..=6u32 {
                        let m = MonadSpec::twist_monad(a, b, c);
                        let k = kclass_of_monad(&m, &v);
                        let via_square = chi_of_kclass(&k.tensor(&k), &v).unwrap();
                        let via_chain = chi_tensor_display_chain(&m, &v).unwrap();
                        assert_eq!(via_square, via_chain, "n={n} ({a},{b},{c})");
                    }
                }
            }
        }
    }

    #[test]
    fn test_kclass_tensor_unit_and_twist() {
        let unit = KClass::line(0, 1);
        let k = KClass::line(-1, -2).add(&KClass::line(0, 5)).add(&KClass::line(1, -1));
        assert_eq!(k.tensor(&unit), k);
        assert_eq!(k.tensor(&KClass::line(3, 1)), k.twist(3));
    }

    #[test]
    fn test_chi_linear_in_kclass() {
        let v = p(3);
        let k1 = KClass::line(2, 3).add(&KClass::line(-1, 1));
        let k2 = KClass::line(0, -2).add(&KClass::line(1, 4));
        assert_eq!(
            chi_of_kclass(&k1.add(&k2), &v).unwrap(),
            chi_of_kclass(&k1, &v).unwrap() + chi_of_kclass(&k2, &v).unwrap()
        );
    }

    #[test]
    fn test_spinor_kclass_has_no_chi() {
        let v = Variety::quadric(5).unwrap();
        let m = MonadSpec::spinor_monad_odd(1, 6, 1);
        let k = kclass_of_monad(&m, &v);
        assert!(matches!(
            chi_of_kclass(&k, &v),
            Err(ChernError::NoChiOracle(_))
        ));
    }

    #[test]
    fn test_slopes() {
        let q3 = Variety::quadric(3).unwrap();
        assert_eq!(slope(1, 2, &q3).0, Rational64::new(1, 1));
        for n in 2..=6 {
            let v = p(n);
            assert_eq!(slope(1, n as i64, &v).0, Rational64::new(1, n as i64));
        }
        assert!(!slope(0, 4, &p(4)).is_positive());
    }

    #[test]
    fn test_slope_twist_law() {
        // Twisting by O(l)^k shifts c1 by rank*k*l, so mu moves by
        // k*l*degree.
        let vs = [p(3), p(5), Variety::quadric(4).unwrap()];
        for v in &vs {
            for c1 in -4i64..=4 {
                for rank in 1i64..=5 {
                    for k in -3i64..=3 {
                        let base = slope(c1, rank, v).0;
                        let twisted = slope(c1 + rank * k * v.l, rank, v).0;
                        assert_eq!(
                            twisted - base,
                            Rational64::from_integer(k * v.l * v.degree)
                        );
                    }
                }
            }
        }
    }
}
