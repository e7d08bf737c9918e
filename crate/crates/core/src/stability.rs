//! Slope-stability verdicts for monad cohomology and composites.
//!
//! A verdict is never bare: positive results carry the theorem route and
//! the section-vanishing evidence that was actually re-derived, negative
//! results carry a destabilizing subobject or a section witness.  What
//! the toolkit cannot settle comes back `Undetermined`, possibly with
//! conjecture markers for the open low-rank cases.
//!
//! Status semantics: `Stable` and `NotSemistable` are definitive;
//! `Semistable` leaves stability open; `NotStable` leaves semistability
//! open; `ProperlySemistable` pins both sides.

use crate::chern::{self, slope, SlopeValue};
use crate::engine::{derive_monad_tables, exterior_replay, EngineError, ExteriorEvidence};
use crate::monads::{MonadShape, MonadSpec};
use crate::varieties::Variety;
use num_integer::binomial as ubinomial;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum StabilityError {
    #[error("{0}")]
    Invalid(String),
    #[error("degree of a twisted-shape monad is not derivable; declare one")]
    NeedsDeclaredC1,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("{0}")]
    Engine(String),
}

impl From<EngineError> for StabilityError {
    fn from(e: EngineError) -> Self {
        StabilityError::Engine(e.to_string())
    }
}

/// A sheaf given by structure rather than by equations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SheafExpr {
    Monad(MonadSpec),
    /// Trivial bundle O^mult.
    Trivial { mult: u32 },
    Sum(Vec<SheafExpr>),
    /// An extension 0 -> sub -> E -> quot -> 0.
    Extension {
        sub: Box<SheafExpr>,
        quot: Box<SheafExpr>,
    },
}

impl SheafExpr {
    pub fn describe(&self) -> String {
        match self {
            SheafExpr::Monad(m) => format!("monad({},{},{})", m.a, m.b, m.c),
            SheafExpr::Trivial { mult } => format!("O^{mult}"),
            SheafExpr::Sum(parts) => {
                let inner: Vec<String> = parts.iter().map(|p| p.describe()).collect();
                inner.join(" + ")
            }
            SheafExpr::Extension { sub, quot } => {
                format!("[{} by {}]", quot.describe(), sub.describe())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Stable,
    Semistable,
    ProperlySemistable,
    NotStable,
    NotSemistable,
    Undetermined,
}

impl Status {
    /// True when the status rules out stability.
    pub fn excludes_stable(&self) -> bool {
        matches!(
            self,
            Status::ProperlySemistable | Status::NotStable | Status::NotSemistable
        )
    }

    /// True when the status guarantees semistability.
    pub fn implies_semistable(&self) -> bool {
        matches!(
            self,
            Status::Stable | Status::Semistable | Status::ProperlySemistable
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// A named result applied with its hypotheses discharged.
    TheoremCitation { token: String, detail: String },
    /// Re-derived section vanishing for the exterior powers, at the
    /// normalized twists (shifted once more for the semistable form).
    HoppeEvidence {
        token: String,
        strict: bool,
        established: Vec<(u32, i64)>,
    },
    /// A subobject whose slope obstructs (semi)stability.
    SubobjectWitness {
        description: String,
        sub_rank: i64,
        sub_c1: i64,
        strict: bool,
    },
    /// A nonzero section space obstructing stability.
    SectionWitness { h0_lower: u64, token: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub rank: i64,
    pub c1: i64,
    pub slope: SlopeValue,
    pub certificates: Vec<Certificate>,
    pub assumptions: Vec<String>,
    pub conjectures: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub locally_free: bool,
    pub torsion_free: bool,
    pub reflexive: bool,
}

impl Flags {
    fn effective_torsion_free(&self) -> bool {
        self.torsion_free || self.reflexive || self.locally_free
    }

    fn describe(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.locally_free {
            out.push("locally free".to_string());
        }
        if self.reflexive {
            out.push("reflexive".to_string());
        }
        if self.torsion_free {
            out.push("torsion free".to_string());
        }
        out
    }
}

/// The twist putting the first Chern class into (-rank, 0].
pub fn normalize_twist(rank: i64, c1: i64) -> i64 {
    assert!(rank > 0, "normalization needs positive rank");
    (-c1).div_euclid(rank)
}

/// Rank and degree of a composite built from plain monads.
pub fn rank_c1(expr: &SheafExpr, v: &Variety) -> Result<(i64, i64), StabilityError> {
    match expr {
        SheafExpr::Monad(m) => {
            if m.shape != MonadShape::M1 {
                return Err(StabilityError::NeedsDeclaredC1);
            }
            m.validate(v)
                .map_err(|e| StabilityError::Invalid(e.to_string()))?;
            Ok(chern::rank_and_c1(m, v))
        }
        SheafExpr::Trivial { mult } => Ok((*mult as i64, 0)),
        SheafExpr::Sum(parts) => {
            let mut r = 0;
            let mut d = 0;
            for p in parts {
                let (pr, pd) = rank_c1(p, v)?;
                r += pr;
                d += pd;
            }
            Ok((r, d))
        }
        SheafExpr::Extension { sub, quot } => {
            let (r1, d1) = rank_c1(sub, v)?;
            let (r2, d2) = rank_c1(quot, v)?;
            Ok((r1 + r2, d1 + d2))
        }
    }
}

/// Collapses a sum tree of monads and trivial bundles into one monad
/// spec; extensions do not collapse.
fn combined_monad(expr: &SheafExpr) -> Option<MonadSpec> {
    match expr {
        SheafExpr::Monad(m) if m.shape == MonadShape::M1 => Some(*m),
        SheafExpr::Monad(_) => None,
        SheafExpr::Trivial { mult } => Some(MonadSpec::twist_monad(0, *mult, 0)),
        SheafExpr::Sum(parts) => {
            let mut acc = MonadSpec::twist_monad(0, 0, 0);
            for p in parts {
                let m = combined_monad(p)?;
                acc.a += m.a;
                acc.b += m.b;
                acc.c += m.c;
            }
            Some(acc)
        }
        SheafExpr::Extension { .. } => None,
    }
}

struct SubInfo {
    description: String,
    rank: i64,
    c1: i64,
    trivial_mult: Option<u32>,
}

/// Structurally visible proper subsheaves: summands (recursively) and
/// extension subs (recursively).
fn proper_subs(expr: &SheafExpr, v: &Variety, out: &mut Vec<SubInfo>) -> Result<(), StabilityError> {
    fn push(e: &SheafExpr, v: &Variety, out: &mut Vec<SubInfo>) -> Result<(), StabilityError> {
        let (r, d) = rank_c1(e, v)?;
        out.push(SubInfo {
            description: e.describe(),
            rank: r,
            c1: d,
            trivial_mult: match e {
                SheafExpr::Trivial { mult } => Some(*mult),
                _ => None,
            },
        });
        Ok(())
    }
    match expr {
        SheafExpr::Monad(_) | SheafExpr::Trivial { .. } => Ok(()),
        SheafExpr::Sum(parts) => {
            for p in parts {
                push(p, v, out)?;
                proper_subs(p, v, out)?;
            }
            Ok(())
        }
        SheafExpr::Extension { sub, .. } => {
            push(sub, v, out)?;
            proper_subs(sub, v, out)?;
            Ok(())
        }
    }
}

/// Lower bound on h^0 of the cohomology sheaf forced by counting in
/// 0 -> K -> O^b -> O(l)^c: sections of K number at least b - c h^0(O(l)),
/// and they all survive to E because the left term has no sections.
pub fn sections_obstruction(m: &MonadSpec, v: &Variety) -> Option<u64> {
    let bound = m.b as i64 - v.h0_l * m.c as i64;
    if bound >= 1 {
        Some(bound as u64)
    } else {
        None
    }
}

fn hoppe_requests(r: i64, d: i64, strict: bool) -> Vec<(u32, i64)> {
    let mut out = Vec::new();
    for q in 1..r {
        let rk_q = ubinomial(r as u64, q as u64) as i64;
        let c1_q = ubinomial((r - 1) as u64, (q - 1) as u64) as i64 * d;
        let t = normalize_twist(rk_q, c1_q);
        out.push((q as u32, if strict { t } else { t - 1 }));
    }
    out
}

fn exterior_certificate(
    ev: &ExteriorEvidence,
    token: &str,
    strict: bool,
) -> Certificate {
    Certificate::HoppeEvidence {
        token: token.to_string(),
        strict,
        established: ev.entries.keys().copied().collect(),
    }
}

/// Re-runs the exterior replay recorded in a certificate; true when every
/// recorded cell still comes out zero.
pub fn replay_certificate(
    cert: &Certificate,
    m: &MonadSpec,
    v: &Variety,
) -> Result<bool, StabilityError> {
    match cert {
        Certificate::HoppeEvidence { established, .. } => {
            let ev = exterior_replay(m, v, established, true)?;
            Ok(ev.all_zero())
        }
        _ => Err(StabilityError::Invalid(
            "only exterior-vanishing certificates replay".into(),
        )),
    }
}

/// Verdict for degree-zero composites of plain monads.
pub fn instanton_verdict(
    expr: &SheafExpr,
    v: &Variety,
    flags: Flags,
) -> Result<Verdict, StabilityError> {
    let (r, d) = rank_c1(expr, v)?;
    if d != 0 {
        return Err(StabilityError::Invalid(format!(
            "degree {d} is nonzero; use the nonzero-degree route"
        )));
    }
    if r < 1 {
        return Err(StabilityError::Invalid(format!("rank {r} below 1")));
    }
    let mut verdict = Verdict {
        status: Status::Undetermined,
        rank: r,
        c1: 0,
        slope: slope(0, r, v),
        certificates: Vec::new(),
        assumptions: flags.describe(),
        conjectures: Vec::new(),
        notes: Vec::new(),
    };

    if r == 1 && flags.effective_torsion_free() {
        verdict.status = Status::Stable;
        verdict.certificates.push(Certificate::TheoremCitation {
            token: "rank-one-stable".into(),
            detail: "a torsion-free sheaf of rank one has no destabilizing subsheaf".into(),
        });
        return Ok(verdict);
    }

    // Structural destabilizers first.
    let mut subs = Vec::new();
    proper_subs(expr, v, &mut subs)?;
    let mut not_stable_witness = false;
    for s in &subs {
        if s.rank <= 0 || s.rank >= r {
            continue;
        }
        // mu(sub) vs mu(total) with degree > 0 cancelled: compare
        // c1_sub * r against c1 * r_sub = 0.
        if s.c1 * r > 0 {
            verdict.status = Status::NotSemistable;
            verdict.certificates.push(Certificate::SubobjectWitness {
                description: s.description.clone(),
                sub_rank: s.rank,
                sub_c1: s.c1,
                strict: true,
            });
            return Ok(verdict);
        }
        if s.c1 == 0 {
            not_stable_witness = true;
            verdict.certificates.push(Certificate::SubobjectWitness {
                description: s.description.clone(),
                sub_rank: s.rank,
                sub_c1: s.c1,
                strict: false,
            });
            if let Some(mult) = s.trivial_mult {
                verdict.certificates.push(Certificate::SectionWitness {
                    h0_lower: mult as u64,
                    token: "trivial-subsheaf-section".into(),
                });
            }
        }
    }

    // Section count obstruction from the middle term.
    if let Some(combined) = combined_monad(expr) {
        if let Some(h0) = sections_obstruction(&combined, v) {
            not_stable_witness = true;
            verdict.certificates.push(Certificate::SectionWitness {
                h0_lower: h0,
                token: "sections-bound-from-middle-term".into(),
            });
        }
    }

    // Positive routes.
    let mut semistable = false;
    if flags.effective_torsion_free() && r == 2 {
        semistable = true;
        verdict.certificates.push(Certificate::TheoremCitation {
            token: "rank-two-degree-zero-semistable".into(),
            detail: "a destabilizer of a rank-two degree-zero sheaf would need positive \
                     degree and sections"
                .into(),
        });
    } else if flags.locally_free && r <= 2 * v.n as i64 - 1 {
        if let Some(combined) = combined_monad(expr) {
            let reqs = hoppe_requests(r, 0, false);
            let ev = exterior_replay(&combined, v, &reqs, true)?;
            if ev.all_zero() {
                semistable = true;
                verdict.certificates.push(exterior_certificate(
                    &ev,
                    "exterior-section-vanishing-semistable",
                    false,
                ));
                verdict.certificates.push(Certificate::TheoremCitation {
                    token: "locally-free-below-rank-2n-semistable".into(),
                    detail: format!(
                        "rank {r} <= 2n-1 = {}: all exterior-power section spaces vanish \
                         one twist below normalization",
                        2 * v.n - 1
                    ),
                });
            } else {
                verdict.notes.push(format!(
                    "exterior replay left gaps: {:?}",
                    ev.gaps().iter().map(|(k, _)| *k).collect::<Vec<_>>()
                ));
            }
        }
    }

    verdict.status = match (semistable, not_stable_witness) {
        (true, true) => Status::ProperlySemistable,
        (true, false) => Status::Semistable,
        (false, true) => Status::NotStable,
        (false, false) => Status::Undetermined,
    };
    if verdict.status == Status::Undetermined {
        if flags.effective_torsion_free() && r <= v.n as i64 {
            verdict
                .conjectures
                .push("conjecture-torsionfree-low-rank-semistable".into());
        }
        if flags.reflexive && r <= v.n as i64 + 1 {
            verdict
                .conjectures
                .push("conjecture-reflexive-low-rank-stable".into());
        }
    }
    Ok(verdict)
}

/// Verdict for nonzero-degree composites of plain monads.
pub fn linear_verdict(
    expr: &SheafExpr,
    v: &Variety,
    flags: Flags,
) -> Result<Verdict, StabilityError> {
    let (r, d) = rank_c1(expr, v)?;
    if d == 0 {
        return Err(StabilityError::Invalid(
            "degree zero; use the degree-zero route".into(),
        ));
    }
    if r < 1 {
        return Err(StabilityError::Invalid(format!("rank {r} below 1")));
    }
    let mut verdict = Verdict {
        status: Status::Undetermined,
        rank: r,
        c1: d,
        slope: slope(d, r, v),
        certificates: Vec::new(),
        assumptions: flags.describe(),
        conjectures: Vec::new(),
        notes: Vec::new(),
    };

    let mut subs = Vec::new();
    proper_subs(expr, v, &mut subs)?;
    let mut not_stable_witness = false;
    let mut not_semistable = false;
    for s in &subs {
        if s.rank <= 0 || s.rank >= r {
            continue;
        }
        let cmp = (s.c1 * r).cmp(&(d * s.rank));
        if cmp == std::cmp::Ordering::Greater {
            not_semistable = true;
            verdict.certificates.push(Certificate::SubobjectWitness {
                description: s.description.clone(),
                sub_rank: s.rank,
                sub_c1: s.c1,
                strict: true,
            });
            if let Some(mult) = s.trivial_mult {
                verdict.certificates.push(Certificate::SectionWitness {
                    h0_lower: mult as u64,
                    token: "trivial-subsheaf-section".into(),
                });
            }
        } else if cmp == std::cmp::Ordering::Equal {
            not_stable_witness = true;
            verdict.certificates.push(Certificate::SubobjectWitness {
                description: s.description.clone(),
                sub_rank: s.rank,
                sub_c1: s.c1,
                strict: false,
            });
        }
    }
    if not_semistable {
        verdict.status = Status::NotSemistable;
        return Ok(verdict);
    }

    // Section witness: a section of a negative-degree sheaf defeats
    // semistability outright.
    if d < 0 {
        if let Some(combined) = combined_monad(expr) {
            if let Some(h0) = sections_obstruction(&combined, v) {
                verdict.certificates.push(Certificate::SectionWitness {
                    h0_lower: h0,
                    token: "sections-bound-from-middle-term".into(),
                });
                verdict.status = Status::NotSemistable;
                return Ok(verdict);
            }
        }
    }

    let mut stable = false;
    if flags.locally_free && r <= v.n as i64 {
        if let Some(combined) = combined_monad(expr) {
            // A sheaf and its dual share their stability; replay on the
            // side with positive degree.
            let (replay_spec, replay_d) = if d > 0 {
                (combined, d)
            } else {
                (
                    combined
                        .dualize()
                        .map_err(|e| StabilityError::Invalid(e.to_string()))?,
                    -d,
                )
            };
            let reqs = hoppe_requests(r, replay_d, true);
            let ev = exterior_replay(&replay_spec, v, &reqs, true)?;
            if ev.all_zero() {
                stable = true;
                verdict.certificates.push(exterior_certificate(
                    &ev,
                    "exterior-section-vanishing-stable",
                    true,
                ));
                verdict.certificates.push(Certificate::TheoremCitation {
                    token: "locally-free-below-rank-n-stable".into(),
                    detail: format!(
                        "rank {r} <= n = {}: all exterior-power section spaces vanish at \
                         the normalized twists",
                        v.n
                    ),
                });
                if d < 0 {
                    verdict
                        .notes
                        .push("replayed on the dual, which has positive degree".into());
                }
            } else {
                verdict.notes.push(format!(
                    "exterior replay left gaps: {:?}",
                    ev.gaps().iter().map(|(k, _)| *k).collect::<Vec<_>>()
                ));
            }
        }
    }

    if stable && not_stable_witness {
        return Err(StabilityError::Inconsistent(
            "stable route succeeded against an equal-slope subobject".into(),
        ));
    }
    verdict.status = if stable {
        Status::Stable
    } else if not_stable_witness {
        Status::NotStable
    } else {
        Status::Undetermined
    };
    Ok(verdict)
}

/// Verdict for a twisted-shape monad on a quadric.  The degree is not
/// derivable from the quoted spinor data, so the caller declares it; the
/// declaration is recorded as an assumption.
pub fn special_verdict(
    m: &MonadSpec,
    v: &Variety,
    flags: Flags,
    declared_c1: Option<i64>,
) -> Result<Verdict, StabilityError> {
    m.validate(v)
        .map_err(|e| StabilityError::Invalid(e.to_string()))?;
    if m.shape == MonadShape::M1 {
        let expr = SheafExpr::Monad(*m);
        let (_, d) = rank_c1(&expr, v)?;
        return if d == 0 {
            instanton_verdict(&expr, v, flags)
        } else {
            linear_verdict(&expr, v, flags)
        };
    }
    let r = m.rank(v);
    let mut verdict = Verdict {
        status: Status::Undetermined,
        rank: r,
        c1: declared_c1.unwrap_or(0),
        slope: slope(declared_c1.unwrap_or(0), r, v),
        certificates: Vec::new(),
        assumptions: flags.describe(),
        conjectures: Vec::new(),
        notes: Vec::new(),
    };
    let Some(d) = declared_c1 else {
        verdict
            .notes
            .push("no declared degree; twisted-shape degrees are not derivable here".into());
        return Ok(verdict);
    };
    verdict
        .assumptions
        .push(format!("declared degree {d} (taken on trust)"));

    if d == 0 {
        if flags.effective_torsion_free() && r == 2 {
            verdict.status = Status::Semistable;
            verdict.certificates.push(Certificate::TheoremCitation {
                token: "twisted-shape-rank-two-semistable".into(),
                detail: "rank two, degree zero, torsion free".into(),
            });
        } else if flags.locally_free && r <= 2 * v.n as i64 - 1 {
            // Re-derive the boundary section vanishing on both sides as
            // supporting evidence.
            let t = derive_monad_tables(m, v, true, (-2, 0))?;
            let e0 = t.e.get(0, -1).map(|r| r.is_zero()).unwrap_or(false);
            let ed0 = t.e_star.get(0, -1).map(|r| r.is_zero()).unwrap_or(false);
            if e0 && ed0 {
                verdict.status = Status::Semistable;
                verdict.certificates.push(Certificate::TheoremCitation {
                    token: "twisted-shape-degree-zero-semistable-below-rank-2n".into(),
                    detail: format!(
                        "rank {r} <= 2n-1 = {}; boundary section vanishing re-derived \
                         on both the sheaf and its dual",
                        2 * v.n - 1
                    ),
                });
            } else {
                verdict
                    .notes
                    .push("boundary section vanishing did not re-derive".into());
            }
        }
    } else if flags.locally_free && r <= v.n as i64 {
        verdict.status = Status::Stable;
        verdict.certificates.push(Certificate::TheoremCitation {
            token: "twisted-shape-nonzero-degree-stable-below-rank-n".into(),
            detail: format!("rank {r} <= n = {} with declared degree {d}", v.n),
        });
    }
    Ok(verdict)
}

/// The two boundary examples showing the rank thresholds are sharp.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SharpnessCase {
    pub expr: SheafExpr,
    pub verdict: Verdict,
    /// chi of the self tensor product, the obstruction count behind the
    /// existence of a nonsplit extension.
    pub chi_self_tensor: Option<i64>,
    pub ext_lower_bound: Option<i64>,
    /// Symbolic lower bound for h^1 of the dual of the quotient.
    pub h1_dual_bound: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub n: u32,
    pub degree_zero_case: SharpnessCase,
    pub nonzero_degree_case: SharpnessCase,
}

/// The positive-degree building block: rank n, degree one.
pub fn sharpness_block(n: u32) -> MonadSpec {
    if n >= 4 {
        MonadSpec::twist_monad(2, n + 3, 1)
    } else {
        MonadSpec::twist_monad(4, n + 7, 3)
    }
}

pub fn sharpness_pair(n: u32) -> Result<SharpnessReport, StabilityError> {
    if n < 2 {
        return Err(StabilityError::Invalid("need dimension at least 2".into()));
    }
    let v = Variety::projective(n).map_err(|e| StabilityError::Invalid(e.to_string()))?;
    let flags = Flags {
        locally_free: true,
        torsion_free: true,
        reflexive: false,
    };

    // Degree-zero side: F + F* has rank 2n, one past the semistable
    // threshold, and F destabilizes it.
    let f = sharpness_block(n);
    let fd = f.dualize().map_err(|e| StabilityError::Invalid(e.to_string()))?;
    let sum = SheafExpr::Sum(vec![SheafExpr::Monad(f), SheafExpr::Monad(fd)]);
    let sum_verdict = instanton_verdict(&sum, &v, flags)?;
    let kf = chern::kclass_of_monad(&f, &v);
    let square = kf.tensor(&kf);
    let chi = chern::chi_of_kclass(&square, &v)
        .map_err(|e| StabilityError::Invalid(e.to_string()))?;
    let degree_zero_case = SharpnessCase {
        expr: sum,
        verdict: sum_verdict,
        chi_self_tensor: Some(chi),
        ext_lower_bound: Some((-chi).max(0)),
        h1_dual_bound: None,
    };

    // Nonzero-degree side: an extension of a rank-n degree -1 sheaf by O
    // has rank n+1, one past the stable threshold, and the trivial sub
    // defeats stability through its section.
    let g = MonadSpec::twist_monad(4, n + 9, 5);
    let ext = SheafExpr::Extension {
        sub: Box::new(SheafExpr::Trivial { mult: 1 }),
        quot: Box::new(SheafExpr::Monad(g)),
    };
    let ext_verdict = linear_verdict(&ext, &v, flags)?;
    let h1_dual_bound = 4 * (n as i64 + 1) - (n as i64 + 9);
    let nonzero_degree_case = SharpnessCase {
        expr: ext,
        verdict: ext_verdict,
        chi_self_tensor: None,
        ext_lower_bound: None,
        h1_dual_bound: Some(h1_dual_bound),
    };

    Ok(SharpnessReport {
        n,
        degree_zero_case,
        nonzero_degree_case,
    })
}
