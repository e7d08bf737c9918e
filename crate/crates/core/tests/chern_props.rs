//! Chern-series and K-class arithmetic checked against brute-force
//! polynomial computation and against each other.

use linmonad::chern::{
    chern_of_monad, chi_of_kclass, chi_tensor_display_chain, kclass_of_monad, rank_and_c1,
    slope, ChernSeries, KClass,
};
use linmonad::monads::MonadSpec;
use linmonad::varieties::Variety;
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

fn p(n: u32) -> Variety {
    Variety::projective(n).unwrap()
}

fn poly_mul_trunc(a: &[i64], b: &[i64], order: usize) -> Vec<i64> {
    let mut out = vec![0i64; order + 1];
    for (i, &x) in a.iter().enumerate().take(order + 1) {
        for (j, &y) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow_trunc(base: &[i64], e: u32, order: usize) -> Vec<i64> {
    let mut out = vec![0i64; order + 1];
    out[0] = 1;
    for _ in 0..e {
        out = poly_mul_trunc(&out, base, order);
    }
    out
}

fn as_ints(s: &ChernSeries) -> Vec<i64> {
    s.coeffs
        .iter()
        .map(|c| {
            assert!(c.is_integer(), "chern coefficient not an integer: {c}");
            let v: BigInt = c.to_integer();
            i64::try_from(v).expect("coefficient out of i64 range")
        })
        .collect()
}

#[test]
fn instanton_series_matches_geometric_power() {
    // Total Chern class of a charge-c instanton is the truncation of
    // (1 + t^2 + t^4 + ...)^c, computed here by plain polynomial powering.
    for n in 2..=8u32 {
        let v = p(n);
        for c in 1..=5u32 {
            let m = MonadSpec::twist_monad(c, 2 * c + 2, c);
            let series = as_ints(&chern_of_monad(&m, &v).unwrap());
            let mut geo = vec![0i64; n as usize + 1];
            for (d, g) in geo.iter_mut().enumerate() {
                if d % 2 == 0 {
                    *g = 1;
                }
            }
            let expected = poly_pow_trunc(&geo, c, n as usize);
            assert_eq!(series, expected, "n={n} c={c}");
        }
    }
}

#[test]
fn instanton_series_has_no_odd_terms() {
    for n in 2..=8u32 {
        let v = p(n);
        for c in 1..=5u32 {
            let m = MonadSpec::twist_monad(c, 2 * c + 2, c);
            let series = chern_of_monad(&m, &v).unwrap();
            for (d, coeff) in series.coeffs.iter().enumerate() {
                if d % 2 == 1 {
                    assert!(coeff.is_zero(), "odd term at degree {d}");
                }
            }
        }
    }
}

#[test]
fn chern_series_inverts_the_end_terms() {
    // c(E) (1 - l t)^a (1 + l t)^c = 1 truncated, straight from the
    // multiplicativity of total Chern classes over the three-term complex.
    for n in 2..=6u32 {
        let v = p(n);
        let order = n as usize;
        for a in 1..=4u32 {
            for c in 1..=4u32 {
                let m = MonadSpec::twist_monad(a, a + c + 2, c);
                let series = chern_of_monad(&m, &v).unwrap();
                let left = ChernSeries::line(order, -v.l).pow(a).unwrap();
                let right = ChernSeries::line(order, v.l).pow(c).unwrap();
                let product = series.mul(&left).unwrap().mul(&right).unwrap();
                assert_eq!(product, ChernSeries::one(order), "a={a} c={c} n={n}");
            }
        }
    }
}

#[test]
fn first_chern_coefficient_agrees_with_rank_and_c1() {
    for n in 2..=5u32 {
        let v = p(n);
        for a in 0..=3u32 {
            for c in 0..=3u32 {
                let m = MonadSpec::twist_monad(a, a + c + 2, c);
                let series = as_ints(&chern_of_monad(&m, &v).unwrap());
                let (_, c1) = rank_and_c1(&m, &v);
                assert_eq!(series[1], c1, "a={a} c={c} n={n}");
            }
        }
    }
}

#[test]
fn display_chain_chi_equals_kclass_square() {
    for n in 2..=8u32 {
        let v = p(n);
        for a in 1..=6u32 {
            for c in 1..=6u32 {
                for r in 1..=4u32 {
                    let m = MonadSpec::twist_monad(a, a + c + r, c);
                    let k = kclass_of_monad(&m, &v);
                    let square = k.tensor(&k);
                    let via_square = chi_of_kclass(&square, &v).unwrap();
                    let via_chain = chi_tensor_display_chain(&m, &v).unwrap();
                    assert_eq!(via_chain, via_square, "a={a} c={c} r={r} n={n}");
                }
            }
        }
    }
}

#[test]
fn self_tensor_chi_closed_form_for_rank_n_blocks() {
    // chi(F tensor F) for the rank-n degree-one block (2, n+3, 1) follows
    // the quadratic 8 - n(n+1)/2; the n=4 instance lands at -2.
    for n in 4..=10u32 {
        let v = p(n);
        let m = MonadSpec::twist_monad(2, n + 3, 1);
        let expected = 8 - (n as i64) * (n as i64 + 1) / 2;
        assert_eq!(chi_tensor_display_chain(&m, &v).unwrap(), expected, "n={n}");
    }
    let v4 = p(4);
    let m4 = MonadSpec::twist_monad(2, 7, 1);
    assert_eq!(chi_tensor_display_chain(&m4, &v4).unwrap(), -2);
}

#[test]
fn kclass_chi_of_line_products() {
    for n in 2..=5u32 {
        let v = p(n);
        for j in -4..=4i64 {
            for k in -4..=4i64 {
                let prod = KClass::line(j, 1).tensor(&KClass::line(k, 1));
                assert_eq!(
                    chi_of_kclass(&prod, &v).unwrap(),
                    chi_of_kclass(&KClass::line(j + k, 1), &v).unwrap(),
                    "j={j} k={k} n={n}"
                );
            }
        }
    }
}

#[test]
fn dualize_is_an_involution_negating_c1() {
    for a in 1..=5u32 {
        for c in 1..=5u32 {
            for r in 1..=3u32 {
                let m = MonadSpec::twist_monad(a, a + c + r, c);
                let d = m.dualize().unwrap();
                assert_eq!(d.dualize().unwrap(), m);
                let v = p(3);
                let (rm, cm) = rank_and_c1(&m, &v);
                let (rd, cd) = rank_and_c1(&d, &v);
                assert_eq!(rm, rd);
                assert_eq!(cm, -cd);
            }
        }
    }
}

proptest! {
    #[test]
    fn chi_is_additive_on_kclasses(
        n in 2u32..6,
        j1 in -6i64..6, m1 in -5i64..5,
        j2 in -6i64..6, m2 in -5i64..5,
    ) {
        let v = p(n);
        let x = KClass::line(j1, m1);
        let y = KClass::line(j2, m2);
        let lhs = chi_of_kclass(&x.add(&y), &v).unwrap();
        let rhs = chi_of_kclass(&x, &v).unwrap() + chi_of_kclass(&y, &v).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chi_tensor_is_bilinear(
        n in 2u32..5,
        j1 in -4i64..4, m1 in -3i64..3,
        j2 in -4i64..4, m2 in -3i64..3,
        j3 in -4i64..4, m3 in -3i64..3,
    ) {
        let v = p(n);
        let x = KClass::line(j1, m1);
        let y = KClass::line(j2, m2);
        let z = KClass::line(j3, m3);
        let lhs = chi_of_kclass(&x.add(&y).tensor(&z), &v).unwrap();
        let rhs = chi_of_kclass(&x.tensor(&z), &v).unwrap()
            + chi_of_kclass(&y.tensor(&z), &v).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twisting_shifts_slope_by_degree(
        n in 2u32..7,
        a in 1u32..5, c in 1u32..5, r in 1u32..5,
        t in -6i64..6,
    ) {
        // Twisting by O(t) adds rank * t to c1, hence degree * t to the
        // slope, independent of the sheaf.
        let v = p(n);
        let m = MonadSpec::twist_monad(a, a + c + r, c);
        let (rank, c1) = rank_and_c1(&m, &v);
        let base = slope(c1, rank, &v);
        let twisted = slope(c1 + rank * t, rank, &v);
        prop_assert_eq!(twisted.0 - base.0, num_rational::Rational64::from_integer(t * v.degree));
    }

    #[test]
    fn kclass_twist_matches_tensor_with_line(
        j in -5i64..5, m in -4i64..4, t in -5i64..5,
    ) {
        let x = KClass::line(j, m);
        prop_assert_eq!(x.twist(t), x.tensor(&KClass::line(t, 1)));
    }
}
