//! Verdict-level properties: the status lattice, twist normalization,
//! duality invariance, certificate replay, and the two boundary families
//! showing the rank thresholds cannot be relaxed.

use linmonad::chern::chi_tensor_display_chain;
use linmonad::monads::{MonadShape, MonadSpec};
use linmonad::stability::{
    instanton_verdict, linear_verdict, normalize_twist, replay_certificate, sharpness_block,
    sharpness_pair, special_verdict, Certificate, Flags, SheafExpr, Status,
};
use linmonad::varieties::Variety;
use proptest::prelude::*;

fn p(n: u32) -> Variety {
    Variety::projective(n).unwrap()
}

fn lf() -> Flags {
    Flags {
        locally_free: true,
        torsion_free: true,
        reflexive: false,
    }
}

#[test]
fn status_lattice_is_coherent() {
    use Status::*;
    let cases = [
        (Stable, false, true),
        (Semistable, false, true),
        (ProperlySemistable, true, true),
        (NotStable, true, false),
        (NotSemistable, true, false),
        (Undetermined, false, false),
    ];
    for (s, excludes, implies) in cases {
        assert_eq!(s.excludes_stable(), excludes, "{s:?}");
        assert_eq!(s.implies_semistable(), implies, "{s:?}");
        // No status may simultaneously grant semistability and deny it.
        assert!(!(s.implies_semistable() && s == NotSemistable));
    }
}

#[test]
fn benchmark_verdicts() {
    let v3 = p(3);
    let v4 = p(4);

    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 4, 1));
    let verdict = instanton_verdict(&m, &v3, lf()).unwrap();
    assert_eq!(verdict.status, Status::Semistable);
    assert_eq!(verdict.rank, 2);

    let m = SheafExpr::Monad(MonadSpec::twist_monad(2, 7, 1));
    let verdict = linear_verdict(&m, &v4, lf()).unwrap();
    assert_eq!(verdict.status, Status::Stable);
    assert_eq!((verdict.rank, verdict.c1), (4, 1));

    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 5, 1));
    let verdict = instanton_verdict(&m, &v3, lf()).unwrap();
    assert_eq!(verdict.status, Status::ProperlySemistable);
    let section = verdict.certificates.iter().find_map(|c| match c {
        Certificate::SectionWitness { h0_lower, .. } => Some(*h0_lower),
        _ => None,
    });
    assert!(section.unwrap_or(0) >= 1, "missing section witness");
}

#[test]
fn hoppe_certificates_replay() {
    let cases = [
        (MonadSpec::twist_monad(1, 5, 1), p(3)),
        (MonadSpec::twist_monad(2, 7, 1), p(4)),
        (MonadSpec::twist_monad(1, 6, 1), p(4)),
    ];
    let mut replayed = 0;
    for (m, v) in cases {
        let expr = SheafExpr::Monad(m);
        let (_, d) = linmonad::chern::rank_and_c1(&m, &v);
        let verdict = if d == 0 {
            instanton_verdict(&expr, &v, lf()).unwrap()
        } else {
            linear_verdict(&expr, &v, lf()).unwrap()
        };
        for cert in &verdict.certificates {
            if matches!(cert, Certificate::HoppeEvidence { .. }) {
                assert!(replay_certificate(cert, &m, &v).unwrap());
                replayed += 1;
            }
        }
    }
    assert!(replayed >= 3, "only {replayed} certificates replayed");
}

#[test]
fn verdict_agrees_with_dual() {
    // (m, dual) pairs with nonzero degree; each side replays on whichever
    // of the two has positive degree, and the statuses must coincide.
    let cases = [
        (MonadSpec::twist_monad(2, 7, 1), p(4)),
        (MonadSpec::twist_monad(1, 7, 2), p(4)),
        (MonadSpec::twist_monad(2, 8, 1), p(5)),
    ];
    for (m, v) in cases {
        let d = m.dualize().unwrap();
        let lhs = linear_verdict(&SheafExpr::Monad(m), &v, lf()).unwrap();
        let rhs = linear_verdict(&SheafExpr::Monad(d), &v, lf()).unwrap();
        assert_eq!(lhs.status, rhs.status, "({},{},{})", m.a, m.b, m.c);
        assert_eq!(lhs.rank, rhs.rank);
        assert_eq!(lhs.c1, -rhs.c1);
    }
}

#[test]
fn rank_one_and_two_low_routes() {
    let v = p(3);
    // Rank one is outright stable, monad-backed or not.
    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 3, 1));
    let verdict = instanton_verdict(&m, &v, lf()).unwrap();
    assert_eq!(verdict.status, Status::Stable);
    assert_eq!(verdict.rank, 1);
    let one = SheafExpr::Trivial { mult: 1 };
    let verdict = instanton_verdict(&one, &v, lf()).unwrap();
    assert_eq!(verdict.status, Status::Stable);
    // Rank two rides the degree-zero theorem to semistability.
    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 4, 1));
    let flags = Flags { torsion_free: true, ..Flags::default() };
    let verdict = instanton_verdict(&m, &v, flags).unwrap();
    assert_eq!(verdict.status, Status::Semistable);
}

#[test]
fn no_flags_means_no_positive_verdict() {
    let v = p(3);
    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 4, 1));
    let verdict = instanton_verdict(&m, &v, Flags::default()).unwrap();
    assert_eq!(verdict.status, Status::Undetermined);
    assert!(verdict.certificates.is_empty());
}

#[test]
fn conjecture_flags_are_recorded_not_decided() {
    let v = p(4);
    // Rank 3 <= n with only the torsion-free flag: no cited route applies,
    // so the verdict stays open and records the conjectured coverage.
    let m = SheafExpr::Monad(MonadSpec::twist_monad(1, 5, 1));
    let flags = Flags {
        torsion_free: true,
        ..Flags::default()
    };
    let verdict = instanton_verdict(&m, &v, flags).unwrap();
    assert_eq!(verdict.status, Status::Undetermined);
    assert!(verdict
        .conjectures
        .iter()
        .any(|c| c.contains("torsionfree-low-rank")));
}

#[test]
fn threshold_families_destabilize() {
    for n in 2..=6u32 {
        let report = sharpness_pair(n).unwrap();

        let dz = &report.degree_zero_case;
        assert_eq!(dz.verdict.rank, 2 * n as i64);
        assert_eq!(dz.verdict.status, Status::NotSemistable, "n={n}");
        let witness = dz.verdict.certificates.iter().find_map(|c| match c {
            Certificate::SubobjectWitness {
                sub_rank,
                sub_c1,
                strict,
                ..
            } => Some((*sub_rank, *sub_c1, *strict)),
            _ => None,
        });
        let (sub_rank, sub_c1, strict) = witness.expect("missing destabilizer");
        assert!(strict);
        assert_eq!(sub_c1, 1);
        assert_eq!(sub_rank, n as i64, "destabilizer slope should be 1/n");

        let chi = dz.chi_self_tensor.unwrap();
        assert_eq!(chi, chi_tensor_display_chain(&sharpness_block(n), &p(n)).unwrap());
        assert!(chi < 0, "n={n}: chi = {chi} leaves no room for extensions");
        assert_eq!(dz.ext_lower_bound.unwrap(), -chi);
        if n >= 4 {
            assert_eq!(chi, 8 - (n as i64) * (n as i64 + 1) / 2);
        }

        let nz = &report.nonzero_degree_case;
        assert_eq!(nz.verdict.rank, n as i64 + 1);
        assert!(nz.verdict.status.excludes_stable(), "n={n}");
        assert!(nz
            .verdict
            .certificates
            .iter()
            .any(|c| matches!(c, Certificate::SectionWitness { h0_lower, .. } if *h0_lower >= 1)));
        assert_eq!(nz.h1_dual_bound.unwrap(), 3 * n as i64 - 5);
    }
}

#[test]
fn twisted_shapes_need_a_declared_degree() {
    let v = Variety::quadric(3).unwrap();
    let m = MonadSpec::spinor_monad_odd(1, 8, 1);
    let open = special_verdict(&m, &v, lf(), None).unwrap();
    assert_eq!(open.status, Status::Undetermined);

    let decided = special_verdict(&m, &v, lf(), Some(0)).unwrap();
    assert!(decided
        .assumptions
        .iter()
        .any(|a| a.contains("declared degree")));
    assert!(matches!(
        decided.status,
        Status::Semistable | Status::Undetermined
    ));
    assert!(m.shape == MonadShape::M2_1);
}

proptest! {
    #[test]
    fn normalization_lands_in_the_window(r in 1i64..20, c1 in -100i64..100) {
        let t = normalize_twist(r, c1);
        let shifted = c1 + r * t;
        prop_assert!(shifted <= 0 && shifted > -r);
    }

    #[test]
    fn normalization_absorbs_formal_twists(r in 1i64..20, c1 in -60i64..60, k in -8i64..8) {
        // Twisting by O(k) moves c1 by r k and the normalizing twist back
        // by k, so the normalized sheaf, and with it the verdict input, is
        // unchanged.
        prop_assert_eq!(normalize_twist(r, c1 + r * k), normalize_twist(r, c1) - k);
    }
}
