//! Ambient varieties and closed-form cohomology oracles.
//!
//! A variety here is always cyclic: Pic is generated by an ample class
//! `O_X(1)`, the twisting sheaf used by monads is `O_X(l)`, and the
//! canonical sheaf is `O_X(lambda)`.  The oracles in this module are the
//! ground truth every derived table rests on: exact values where a closed
//! form exists (projective space, smooth quadrics, twisted forms on P^n),
//! and honest `[0, inf)` intervals everywhere else.  A dimension is never
//! invented; an unknown entry stays an interval.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

// ---- Dimension intervals ----

/// Interval of possible values for a cohomology dimension.
///
/// `lo <= hi` always; `hi = None` means unbounded above.  The lattice
/// operations only narrow: `lo` may grow, `hi` may shrink.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DimRange {
    pub lo: u64,
    pub hi: Option<u64>,
}

impl DimRange {
    pub const ZERO: DimRange = DimRange { lo: 0, hi: Some(0) };

    pub fn exact(v: u64) -> Self {
        DimRange { lo: v, hi: Some(v) }
    }

    pub fn unknown() -> Self {
        DimRange { lo: 0, hi: None }
    }

    pub fn is_exact(&self) -> bool {
        self.hi == Some(self.lo)
    }

    /// Exact value if the interval has collapsed to a point.
    pub fn value(&self) -> Option<u64> {
        if self.is_exact() {
            Some(self.lo)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.hi == Some(0)
    }

    /// Interval sum.
    pub fn add(&self, other: &DimRange) -> DimRange {
        DimRange {
            lo: self.lo + other.lo,
            hi: match (self.hi, other.hi) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
        }
    }

    /// Interval scaling by a non-negative multiplicity.
    pub fn scale(&self, m: u64) -> DimRange {
        if m == 0 {
            return DimRange::ZERO;
        }
        DimRange {
            lo: self.lo * m,
            hi: self.hi.map(|h| h * m),
        }
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) if h == self.lo => write!(f, "{}", self.lo),
            Some(h) => write!(f, "[{},{}]", self.lo, h),
            None => write!(f, "[{},inf)", self.lo),
        }
    }
}

// ---- Variety descriptors ----

/// Which closed-form oracle backs a descriptor.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum VarietyKind {
    /// Projective space P^n.
    Projective,
    /// Smooth quadric hypersurface Q_n in P^{n+1}, n >= 3.
    Quadric,
    /// User-supplied cyclic variety; only the vanishing ranges implied by
    /// its flags are known.
    Custom,
}

/// Numerical data of a cyclic variety.
///
/// `l` is the twist of the ample line bundle the monads use, `lambda` the
/// canonical twist (`omega_X = O_X(lambda)`), `degree` the top
/// self-intersection of the Picard generator, and `h0_l` the dimension of
/// the space of sections of `O_X(l)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Variety {
    pub kind: VarietyKind,
    pub name: String,
    /// Dimension of the variety.
    pub n: u32,
    /// Monad twist: the monad's outer terms are O_X(-l) and O_X(l).
    pub l: i64,
    /// Canonical twist.
    pub lambda: i64,
    /// Top self-intersection of the Picard generator.
    pub degree: i64,
    /// h^0(O_X(l)).
    pub h0_l: i64,
    /// Whether H^p(O_X(k)) = 0 for all 0 < p < n and all k.
    pub vanishing_hypothesis: bool,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error("projective space needs dimension >= 1, got {0}")]
    BadProjectiveDim(u32),
    #[error("quadric oracle needs dimension >= 3, got {0}")]
    BadQuadricDim(u32),
    #[error("custom variety {0:?} needs l >= 1 and degree >= 1")]
    BadCustomData(String),
    #[error("Euler characteristic of O_{{{variety}}}({k}) is not determined by the available vanishing ranges")]
    ChiUndetermined { variety: String, k: i64 },
    #[error("spinor variant {variant:?} does not live on Q_{n}")]
    SpinorParity { variant: SpinorVariant, n: u32 },
}

impl Variety {
    /// P^n with its standard data: l = 1, omega = O(-n-1), degree 1.
    pub fn projective(n: u32) -> Result<Self, VarietyError> {
        if n < 1 {
            return Err(VarietyError::BadProjectiveDim(n));
        }
        Ok(Variety {
            kind: VarietyKind::Projective,
            name: format!("P{n}"),
            n,
            l: 1,
            lambda: -(n as i64) - 1,
            degree: 1,
            h0_l: n as i64 + 1,
            vanishing_hypothesis: true,
        })
    }

    /// Smooth quadric Q_n, n >= 3: l = 1, omega = O(-n), degree 2.
    pub fn quadric(n: u32) -> Result<Self, VarietyError> {
        if n < 3 {
            return Err(VarietyError::BadQuadricDim(n));
        }
        Ok(Variety {
            kind: VarietyKind::Quadric,
            name: format!("Q{n}"),
            n,
            l: 1,
            lambda: -(n as i64),
            degree: 2,
            h0_l: n as i64 + 2,
            vanishing_hypothesis: true,
        })
    }

    pub fn custom(
        name: &str,
        n: u32,
        l: i64,
        lambda: i64,
        degree: i64,
        h0_l: i64,
        vanishing_hypothesis: bool,
    ) -> Result<Self, VarietyError> {
        if n < 1 || l < 1 || degree < 1 || h0_l < 0 {
            return Err(VarietyError::BadCustomData(name.to_string()));
        }
        Ok(Variety {
            kind: VarietyKind::Custom,
            name: name.to_string(),
            n,
            l,
            lambda,
            degree,
            h0_l,
            vanishing_hypothesis,
        })
    }

    pub fn is_projective_space(&self) -> bool {
        self.kind == VarietyKind::Projective
    }

    pub fn is_quadric(&self) -> bool {
        self.kind == VarietyKind::Quadric
    }
}

// ---- Binomial helpers ----

/// Binomial coefficient with the usual conventions: 0 for k < 0 or k > n,
/// and n >= 0 expected.  Values stay inside i64 for every window this
/// workbench touches; overflow panics in debug and is avoided by keeping
/// windows modest.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i as i128 + 1);
    }
    acc as i64
}

/// Product form of binomial(n + k, n) as a polynomial in k: exact for every
/// integer k, with the sign that the polynomial extension carries at
/// negative arguments.
pub fn chi_projective(n: u32, k: i64) -> i64 {
    let mut num: i128 = 1;
    for i in 1..=n as i128 {
        num *= k as i128 + i;
    }
    let mut den: i128 = 1;
    for i in 1..=n as i128 {
        den *= i;
    }
    (num / den) as i64
}

// ---- Line bundle cohomology ----

fn h_projective(n: u32, q: u32, k: i64) -> u64 {
    let n_i = n as i64;
    if q == 0 {
        if k >= 0 {
            binomial(n_i + k, n_i) as u64
        } else {
            0
        }
    } else if q == n {
        if k <= -n_i - 1 {
            binomial(-k - 1, n_i) as u64
        } else {
            0
        }
    } else {
        0
    }
}

fn h_quadric(n: u32, q: u32, k: i64) -> u64 {
    // Restriction from the ambient P^{n+1}: O_P(k-2) -> O_P(k) -> O_Q(k).
    let m = n + 1;
    if q == 0 {
        h_projective(m, 0, k).saturating_sub(h_projective(m, 0, k - 2))
    } else if q == n {
        h_projective(m, m, k - 2).saturating_sub(h_projective(m, m, k))
    } else {
        0
    }
}

/// h^q(X, O_X(k)) as an interval: exact on P^n and Q_n; on a custom variety
/// exact zero exactly in the ranges its flags guarantee and unknown
/// elsewhere.
pub fn h_line_bundle(v: &Variety, q: u32, k: i64) -> DimRange {
    assert!(q <= v.n, "cohomological degree {q} beyond dimension {}", v.n);
    match v.kind {
        VarietyKind::Projective => DimRange::exact(h_projective(v.n, q, k)),
        VarietyKind::Quadric => DimRange::exact(h_quadric(v.n, q, k)),
        VarietyKind::Custom => {
            if !v.vanishing_hypothesis {
                return DimRange::unknown();
            }
            let middle = q >= 1 && q < v.n;
            let bottom_zero = q == 0 && k <= -1;
            let top_zero = q == v.n && k >= v.lambda + 1;
            if middle || bottom_zero || top_zero {
                DimRange::ZERO
            } else {
                DimRange::unknown()
            }
        }
    }
}

/// Euler characteristic of O_X(k).  Closed form on P^n and Q_n; on custom
/// varieties only where every cohomology entry is pinned (which for a
/// variety with the vanishing hypothesis is the strip lambda < k < 0, where
/// chi = 0).
pub fn chi_line_bundle(v: &Variety, k: i64) -> Result<i64, VarietyError> {
    match v.kind {
        VarietyKind::Projective => Ok(chi_projective(v.n, k)),
        VarietyKind::Quadric => {
            Ok(chi_projective(v.n + 1, k) - chi_projective(v.n + 1, k - 2))
        }
        VarietyKind::Custom => {
            let mut acc: i64 = 0;
            let mut sign = 1i64;
            for q in 0..=v.n {
                match h_line_bundle(v, q, k).value() {
                    Some(d) => acc += sign * d as i64,
                    None => {
                        return Err(VarietyError::ChiUndetermined {
                            variety: v.name.clone(),
                            k,
                        })
                    }
                }
                sign = -sign;
            }
            Ok(acc)
        }
    }
}

// ---- Twisted forms on projective space ----

/// h^q(P^n, Omega^p(k)), closed form.  Zero for p > n or q > n.
pub fn h_form_projective(n: u32, q: u32, p: u32, k: i64) -> u64 {
    if p > n || q > n {
        return 0;
    }
    let (n_i, p_i) = (n as i64, p as i64);
    if q == p && k == 0 {
        1
    } else if q == 0 {
        if k > p_i {
            (binomial(k + n_i - p_i, k) * binomial(k - 1, p_i)) as u64
        } else {
            0
        }
    } else if q == n {
        if k < p_i - n_i {
            (binomial(-k + p_i, -k) * binomial(-k - 1, n_i - p_i)) as u64
        } else {
            0
        }
    } else {
        0
    }
}

// ---- Spinor bundles on quadrics ----

/// Spinor bundle selector on Q_n: one bundle for n odd, a pair for n even.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum SpinorVariant {
    Odd,
    Even1,
    Even2,
}

/// Rank of a spinor bundle on Q_n: 2^floor((n-1)/2).
pub fn spinor_rank(n: u32) -> u64 {
    1u64 << ((n - 1) / 2)
}

/// h^q(Q_n, Sigma(k)) as an interval, from the three quoted vanishing
/// ranges: no sections below twist 0, no intermediate cohomology at any
/// twist, and no top cohomology for k >= n.  The top range as quoted sits
/// oddly against the k >= -n+1 range that O_Q(k) satisfies; the oracle
/// encodes the quoted range as is and tags such entries so downstream
/// reports can point at the discrepancy instead of papering over it.
pub fn spinor_cohomology(
    v: &Variety,
    variant: SpinorVariant,
    q: u32,
    k: i64,
) -> Result<DimRange, VarietyError> {
    if !v.is_quadric() {
        return Err(VarietyError::SpinorParity { variant, n: v.n });
    }
    let n = v.n;
    let parity_ok = match variant {
        SpinorVariant::Odd => n % 2 == 1,
        SpinorVariant::Even1 | SpinorVariant::Even2 => n % 2 == 0,
    };
    if !parity_ok {
        return Err(VarietyError::SpinorParity { variant, n });
    }
    assert!(q <= n);
    let zero = if q == 0 {
        k <= -1
    } else if q < n {
        true
    } else {
        k >= n as i64
    };
    Ok(if zero { DimRange::ZERO } else { DimRange::unknown() })
}

/// Marker for the quoted-but-suspect top range of the spinor oracle; lets
/// report code flag entries whose only support is that quote.
pub fn spinor_top_range_is_quoted_only(q: u32, n: u32, k: i64) -> bool {
    q == n && k >= n as i64
}

// ---- Known sheaf identifiers ----

/// Sheaves the oracles can price directly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum KnownSheaf {
    /// O_X(k).
    Line { k: i64 },
    /// Omega^p(k) on projective space.
    Form { p: u32, k: i64 },
    /// Spinor bundle twist Sigma(k) (resp. Sigma_1/Sigma_2) on a quadric.
    Spinor { variant: SpinorVariant, k: i64 },
}

impl KnownSheaf {
    /// Dimension interval for h^q of this sheaf twisted by O(extra).
    pub fn h(&self, v: &Variety, q: u32, extra: i64) -> Result<DimRange, VarietyError> {
        match *self {
            KnownSheaf::Line { k } => Ok(h_line_bundle(v, q, k + extra)),
            KnownSheaf::Form { p, k } => {
                assert!(v.is_projective_space(), "form oracle lives on P^n");
                Ok(DimRange::exact(h_form_projective(v.n, q, p, k + extra)))
            }
            KnownSheaf::Spinor { variant, k } => {
                spinor_cohomology(v, variant, q, k + extra)
            }
        }
    }
}

impl SpinorVariant {
    pub fn label(&self) -> &'static str {
        match self {
            SpinorVariant::Odd => "S",
            SpinorVariant::Even1 => "S1",
            SpinorVariant::Even2 => "S2",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Variety {
        Variety::projective(n).unwrap()
    }

    fn q(n: u32) -> Variety {
        Variety::quadric(n).unwrap()
    }

    // Independent oracle: count monomials of degree k in n+1 variables.
    fn count_monomials(n: u32, k: i64) -> u64 {
        if k < 0 {
            return 0;
        }
        fn rec(vars: u32, deg: i64) -> u64 {
            if vars == 1 {
                return 1;
            }
            (0..=deg).map(|d| rec(vars - 1, deg - d)).sum()
        }
        rec(n + 1, k)
    }

    #[test]
    fn test_sections_match_monomial_count() {
        for n in 1..=5 {
            for k in 0..=6 {
                assert_eq!(
                    h_line_bundle(&p(n), 0, k).value().unwrap(),
                    count_monomials(n, k),
                    "P{n}, k={k}"
                );
            }
        }
        assert_eq!(h_line_bundle(&p(3), 0, 2), DimRange::exact(10));
    }

    #[test]
    fn test_top_cohomology_by_serre_duality() {
        assert_eq!(h_line_bundle(&p(3), 3, -4), DimRange::exact(1));
        for n in 1..=5 {
            let v = p(n);
            for k in -12..=12 {
                let dual_k = v.lambda - k;
                assert_eq!(
                    h_line_bundle(&v, v.n, k),
                    h_line_bundle(&v, 0, dual_k),
                    "P{n}, k={k}"
                );
            }
        }
    }

    #[test]
    fn test_middle_cohomology_vanishes() {
        for n in 2..=6 {
            let v = p(n);
            for q in 1..v.n {
                for k in -15..=15 {
                    assert!(h_line_bundle(&v, q, k).is_zero());
                }
            }
        }
    }

    #[test]
    fn test_quadric_sections() {
        assert_eq!(h_line_bundle(&q(3), 0, 1), DimRange::exact(5));
        // Ambient restriction: h^0(Q_n, O(k)) = C(n+1+k, n+1) - C(n-1+k, n+1).
        for n in 3..=6 {
            let v = q(n);
            let m = n as i64 + 1;
            for k in 0..=6 {
                let expect = binomial(m + k, m) - binomial(m + k - 2, m);
                assert_eq!(h_line_bundle(&v, 0, k).value().unwrap() as i64, expect);
            }
        }
    }

    #[test]
    fn test_quadric_serre_duality() {
        for n in 3..=6 {
            let v = q(n);
            for k in -12..=12 {
                assert_eq!(
                    h_line_bundle(&v, v.n, k),
                    h_line_bundle(&v, 0, v.lambda - k),
                    "Q{n}, k={k}"
                );
            }
        }
    }

    #[test]
    fn test_chi_matches_alternating_sum() {
        for n in 1..=5 {
            let v = p(n);
            for k in -12..=12 {
                let sum: i64 = (0..=v.n)
                    .map(|qq| {
                        let d = h_line_bundle(&v, qq, k).value().unwrap() as i64;
                        if qq % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .sum();
                assert_eq!(chi_line_bundle(&v, k).unwrap(), sum, "P{n}, k={k}");
            }
        }
        for n in 3..=5 {
            let v = q(n);
            for k in -12..=12 {
                let sum: i64 = (0..=v.n)
                    .map(|qq| {
                        let d = h_line_bundle(&v, qq, k).value().unwrap() as i64;
                        if qq % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .sum();
                assert_eq!(chi_line_bundle(&v, k).unwrap(), sum, "Q{n}, k={k}");
            }
        }
    }

    #[test]
    fn test_chi_examples() {
        assert_eq!(chi_line_bundle(&p(3), -4).unwrap(), -1);
        assert_eq!(chi_line_bundle(&p(4), 1).unwrap(), 5);
        assert_eq!(
            chi_line_bundle(&q(3), 1).unwrap(),
            chi_projective(4, 1) - chi_projective(4, -1)
        );
    }

    #[test]
    fn test_custom_variety_ranges() {
        let v = Variety::custom("X", 3, 1, -4, 5, 6, true).unwrap();
        assert!(h_line_bundle(&v, 1, 7).is_zero());
        assert!(h_line_bundle(&v, 0, -1).is_zero());
        assert!(h_line_bundle(&v, 3, -3).is_zero());
        assert_eq!(h_line_bundle(&v, 0, 2), DimRange::unknown());
        assert_eq!(h_line_bundle(&v, 3, -5), DimRange::unknown());
        // chi pinned (zero) only on the strip between the known ranges.
        assert_eq!(chi_line_bundle(&v, -2).unwrap(), 0);
        assert!(chi_line_bundle(&v, 1).is_err());

        let loose = Variety::custom("Y", 3, 1, -4, 5, 6, false).unwrap();
        assert_eq!(h_line_bundle(&loose, 1, 0), DimRange::unknown());
    }

    #[test]
    fn test_forms_bott_values() {
        assert_eq!(h_form_projective(2, 0, 1, 2), 3);
        assert_eq!(h_form_projective(3, 1, 1, 0), 1);
        assert_eq!(h_form_projective(4, 4, 2, -4), 45);
        // Hodge diagonal.
        for n in 1..=5 {
            for pp in 0..=n {
                assert_eq!(h_form_projective(n, pp, pp, 0), 1, "n={n}, p={pp}");
            }
        }
        // Euler sequence endpoint: Omega^n = O(-n-1).
        for n in 1..=5 {
            for k in -10..=10 {
                assert_eq!(
                    h_form_projective(n, 0, n, k),
                    h_projective(n, 0, k - n as i64 - 1)
                );
            }
        }
    }

    #[test]
    fn test_forms_serre_symmetry() {
        for n in 1..=4 {
            for pp in 0..=n {
                for qq in 0..=n {
                    for k in -(2 * n as i64 + 4)..=(2 * n as i64 + 4) {
                        assert_eq!(
                            h_form_projective(n, qq, pp, k),
                            h_form_projective(n, n - qq, n - pp, -k),
                            "n={n} q={qq} p={pp} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn test_spinor_ranges() {
        let v = q(5);
        assert!(spinor_cohomology(&v, SpinorVariant::Odd, 2, -3)
            .unwrap()
            .is_zero());
        assert!(spinor_cohomology(&v, SpinorVariant::Odd, 0, -1)
            .unwrap()
            .is_zero());
        assert_eq!(
            spinor_cohomology(&v, SpinorVariant::Odd, 0, 0).unwrap(),
            DimRange::unknown()
        );
        assert!(spinor_cohomology(&v, SpinorVariant::Odd, 5, 5)
            .unwrap()
            .is_zero());
        assert_eq!(
            spinor_cohomology(&v, SpinorVariant::Odd, 5, 4).unwrap(),
            DimRange::unknown()
        );
        assert!(spinor_top_range_is_quoted_only(5, 5, 5));

        let v4 = q(4);
        assert!(spinor_cohomology(&v4, SpinorVariant::Even1, 1, 3)
            .unwrap()
            .is_zero());
        assert!(spinor_cohomology(&v4, SpinorVariant::Odd, 0, 0).is_err());
        assert!(spinor_cohomology(&q(5), SpinorVariant::Even2, 0, 0).is_err());
    }

    #[test]
    fn test_spinor_rank_values() {
        assert_eq!(spinor_rank(3), 2);
        assert_eq!(spinor_rank(4), 2);
        assert_eq!(spinor_rank(5), 4);
        assert_eq!(spinor_rank(6), 4);
        assert_eq!(spinor_rank(7), 8);
    }

    #[test]
    fn test_section_monotonicity() {
        for n in 1..=6 {
            let v = p(n);
            let mut prev = 0;
            for k in -1..=10 {
                let cur = h_line_bundle(&v, 0, k).value().unwrap();
                assert!(cur >= prev);
                prev = cur;
            }
        }
    }

    #[test]
    fn test_binomial_edge_cases() {
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(5, 6), 0);
        assert_eq!(binomial(5, -1), 0);
        assert_eq!(binomial(-2, 1), 0);
        assert_eq!(binomial(10, 4), 210);
    }
}
