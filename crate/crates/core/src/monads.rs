//! Monad specifications and their formal structure.
//!
//! A monad here is a three-term complex A -> B -> C with B a sum of copies
//! of O_X, C a sum of copies of O_X(l), and A either O_X(-l)^a (shape `M1`)
//! or a sum of twisted spinor bundles on a quadric (shapes `M2.1`/`M2.2`).
//! The complex is exact at A and at C; its interest is the middle
//! cohomology sheaf E.  This module handles the bookkeeping that does not
//! require any cohomology: validation, duals, display sequences, existence
//! ranges and the instanton invariants.

use crate::varieties::{spinor_rank, SpinorVariant, Variety, VarietyKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Monad shape: twist monad, odd-spinor left term, or even-spinor pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum MonadShape {
    /// O(-l)^a -> O^b -> O(l)^c.
    M1,
    /// S(-1)^a -> O^b -> O(1)^c on an odd quadric.
    #[serde(rename = "M2.1")]
    M2_1,
    /// S1(-1)^a + S2(-1)^a2 -> O^b -> O(1)^c on an even quadric.
    #[serde(rename = "M2.2")]
    M2_2,
}

/// Multiplicity data of a monad.  For `M2_2` the left term splits into the
/// two half-spinor bundles with multiplicities `a` and `a2`; every other
/// shape keeps `a2 = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MonadSpec {
    pub shape: MonadShape,
    pub a: u32,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub a2: u32,
    pub b: u32,
    pub c: u32,
}

fn is_zero_u32(x: &u32) -> bool {
    *x == 0
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MonadError {
    #[error("monad ({a},{b},{c}) on a {n}-fold has non-positive expected rank {rank}")]
    NonPositiveRank { a: u32, b: u32, c: u32, n: u32, rank: i64 },
    #[error("shape {shape:?} needs a quadric of {parity} dimension, got {variety}")]
    ShapeVarietyMismatch {
        shape: MonadShape,
        parity: &'static str,
        variety: String,
    },
    #[error("dual of a spinor-shaped monad is outside this toolkit")]
    SpinorDual,
    #[error("left multiplicity a2 = {0} is only meaningful for the even-spinor shape")]
    StrayA2(u32),
}

impl MonadSpec {
    /// Twist monad O(-l)^a -> O^b -> O(l)^c.
    pub fn twist_monad(a: u32, b: u32, c: u32) -> Self {
        MonadSpec { shape: MonadShape::M1, a, a2: 0, b, c }
    }

    /// Odd-quadric spinor monad S(-1)^a -> O^b -> O(1)^c.
    pub fn spinor_monad_odd(a: u32, b: u32, c: u32) -> Self {
        MonadSpec { shape: MonadShape::M2_1, a, a2: 0, b, c }
    }

    /// Even-quadric spinor monad S1(-1)^a1 + S2(-1)^a2 -> O^b -> O(1)^c.
    pub fn spinor_monad_even(a1: u32, a2: u32, b: u32, c: u32) -> Self {
        MonadSpec { shape: MonadShape::M2_2, a: a1, a2, b, c }
    }

    /// Rank of the left term as a sheaf.
    pub fn left_rank(&self, v: &Variety) -> i64 {
        match self.shape {
            MonadShape::M1 => self.a as i64,
            MonadShape::M2_1 => self.a as i64 * spinor_rank(v.n) as i64,
            MonadShape::M2_2 => {
                (self.a as i64 + self.a2 as i64) * spinor_rank(v.n) as i64
            }
        }
    }

    /// Rank of the cohomology sheaf.
    pub fn rank(&self, v: &Variety) -> i64 {
        self.b as i64 - self.left_rank(v) - self.c as i64
    }

    /// Spinor variants present in the left term, with multiplicities.
    pub fn left_spinors(&self) -> Vec<(SpinorVariant, u32)> {
        match self.shape {
            MonadShape::M1 => vec![],
            MonadShape::M2_1 => vec![(SpinorVariant::Odd, self.a)],
            MonadShape::M2_2 => vec![
                (SpinorVariant::Even1, self.a),
                (SpinorVariant::Even2, self.a2),
            ],
        }
    }

    /// Checks shape/variety compatibility and rank positivity.
    pub fn validate(&self, v: &Variety) -> Result<(), MonadError> {
        match self.shape {
            MonadShape::M1 => {
                if self.a2 != 0 {
                    return Err(MonadError::StrayA2(self.a2));
                }
            }
            MonadShape::M2_1 => {
                if !(v.kind == VarietyKind::Quadric && v.n % 2 == 1) {
                    return Err(MonadError::ShapeVarietyMismatch {
                        shape: self.shape,
                        parity: "odd",
                        variety: v.name.clone(),
                    });
                }
                if self.a2 != 0 {
                    return Err(MonadError::StrayA2(self.a2));
                }
            }
            MonadShape::M2_2 => {
                if !(v.kind == VarietyKind::Quadric && v.n % 2 == 0) {
                    return Err(MonadError::ShapeVarietyMismatch {
                        shape: self.shape,
                        parity: "even",
                        variety: v.name.clone(),
                    });
                }
            }
        }
        let rank = self.rank(v);
        if rank < 1 {
            return Err(MonadError::NonPositiveRank {
                a: self.a,
                b: self.b,
                c: self.c,
                n: v.n,
                rank,
            });
        }
        Ok(())
    }

    /// Dual monad: reverses the complex, swapping the outer multiplicities.
    /// Only twist monads dualize inside this toolkit.
    pub fn dualize(&self) -> Result<MonadSpec, MonadError> {
        match self.shape {
            MonadShape::M1 => Ok(MonadSpec::twist_monad(self.c, self.b, self.a)),
            _ => Err(MonadError::SpinorDual),
        }
    }
}

// ---- Instanton invariants ----

/// Numeric summary of a monad's cohomology sheaf.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SheafInvariants {
    pub rank: i64,
    /// c1 in Picard-generator units; None when the left term is a spinor
    /// sum, whose first Chern class this toolkit does not price.
    pub c1: Option<i64>,
    /// Charge c when the monad is an instanton (a = c twist monad, c1 = 0).
    pub charge: Option<u32>,
    pub is_instanton: bool,
    pub is_linear_candidate: bool,
}

/// Rank, degree and instanton data of the cohomology sheaf.
pub fn charge_and_kind(m: &MonadSpec, v: &Variety) -> SheafInvariants {
    let rank = m.rank(v);
    match m.shape {
        MonadShape::M1 => {
            let c1 = (m.a as i64 - m.c as i64) * v.l;
            let is_instanton = m.a == m.c;
            SheafInvariants {
                rank,
                c1: Some(c1),
                charge: if is_instanton { Some(m.c) } else { None },
                is_instanton,
                is_linear_candidate: true,
            }
        }
        _ => SheafInvariants {
            rank,
            c1: None,
            charge: None,
            is_instanton: false,
            is_linear_candidate: false,
        },
    }
}

// ---- Display sequences ----

/// A symbolic sheaf occurring in a display sequence.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum DisplayNode {
    /// O_X(k)^mult.
    Line { k: i64, mult: u32 },
    /// Spinor twist with multiplicity.
    Spinor { variant: SpinorVariant, k: i64, mult: u32 },
    /// The kernel bundle K = ker(B -> C), twisted.
    Kernel { twist: i64 },
    /// The cohomology sheaf E, twisted.
    Cohomology { twist: i64 },
    /// The dual kernel bundle K*, twisted.
    KernelDual { twist: i64 },
    /// The dual sheaf E*, twisted.
    CohomologyDual { twist: i64 },
    /// Ext^1(E, O_X): the cokernel correction of the dual sequence, whose
    /// support is the locus where the left map degenerates.
    ExtCorrection,
}

/// One exact sequence of the display: three terms when short exact, four
/// when the trailing correction term is present.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DisplaySequence {
    /// Role tag: "ker1", "ker2", "ker1d", "ker2d".
    pub id: String,
    pub terms: Vec<DisplayNode>,
    pub note: Option<String>,
}

/// The display of a monad at a given twist k: the kernel and cokernel
/// sequences and their duals.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DisplayDiagram {
    pub twist: i64,
    pub kernel_rank: i64,
    pub sequences: Vec<DisplaySequence>,
}

/// Builds the four display sequences of a monad, twisted by O(k).
///
/// `ker1`: 0 -> K(k) -> O(k)^b -> O(k+l)^c -> 0 and `ker2`:
/// 0 -> A(k) -> K(k) -> E(k) -> 0 always hold.  The dual `ker1d` holds
/// because K is a bundle; `ker2d` is short exact precisely when E is
/// locally free, and otherwise gains the Ext^1 correction as a fourth
/// term supported on the degeneration locus.
pub fn display_sequences(
    m: &MonadSpec,
    v: &Variety,
    k: i64,
    locally_free: bool,
) -> Result<DisplayDiagram, MonadError> {
    m.validate(v)?;
    let l = v.l;
    let left_at = |twist: i64| -> Vec<DisplayNode> {
        match m.shape {
            MonadShape::M1 => vec![DisplayNode::Line { k: twist - l, mult: m.a }],
            MonadShape::M2_1 => vec![DisplayNode::Spinor {
                variant: SpinorVariant::Odd,
                k: twist - 1,
                mult: m.a,
            }],
            MonadShape::M2_2 => vec![
                DisplayNode::Spinor {
                    variant: SpinorVariant::Even1,
                    k: twist - 1,
                    mult: m.a,
                },
                DisplayNode::Spinor {
                    variant: SpinorVariant::Even2,
                    k: twist - 1,
                    mult: m.a2,
                },
            ],
        }
    };

    let mut sequences = Vec::new();
    sequences.push(DisplaySequence {
        id: "ker1".into(),
        terms: vec![
            DisplayNode::Kernel { twist: k },
            DisplayNode::Line { k, mult: m.b },
            DisplayNode::Line { k: k + l, mult: m.c },
        ],
        note: None,
    });
    let degenerate = m.left_rank(v) == 0;
    let mut ker2_terms = left_at(k);
    ker2_terms.push(DisplayNode::Kernel { twist: k });
    ker2_terms.push(DisplayNode::Cohomology { twist: k });
    sequences.push(DisplaySequence {
        id: "ker2".into(),
        terms: ker2_terms,
        note: degenerate.then(|| "left term vanishes: K = E".to_string()),
    });

    if m.shape == MonadShape::M1 {
        sequences.push(DisplaySequence {
            id: "ker1d".into(),
            terms: vec![
                DisplayNode::Line { k: -k - l, mult: m.c },
                DisplayNode::Line { k: -k, mult: m.b },
                DisplayNode::KernelDual { twist: -k },
            ],
            note: None,
        });
        let mut ker2d = vec![
            DisplayNode::CohomologyDual { twist: -k },
            DisplayNode::KernelDual { twist: -k },
            DisplayNode::Line { k: -k + l, mult: m.a },
        ];
        let note = if locally_free {
            None
        } else {
            ker2d.push(DisplayNode::ExtCorrection);
            Some("correction term supported on the degeneration locus".to_string())
        };
        sequences.push(DisplaySequence { id: "ker2d".into(), terms: ker2d, note });
    }

    Ok(DisplayDiagram {
        twist: k,
        kernel_rank: m.b as i64 - m.c as i64,
        sequences,
    })
}

// ---- Existence ----

/// Verdict on whether a monad with the given invariants can exist.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ExistenceVerdict {
    Exists { citation: String },
    NotExists { citation: String },
    Unknown,
}

/// Existence of instantons and low-rank linear sheaves on P^n and Q_n.
///
/// Instantons of every charge exist once rank >= n-1 on both families.
/// On Q_n there are no linear sheaves of rank <= n-1 with negative degree,
/// and none of rank <= n-2 with degree zero.  Everything else is out of
/// range of the supported criteria and stays Unknown.
pub fn existence_check(m: &MonadSpec, v: &Variety) -> ExistenceVerdict {
    if m.shape != MonadShape::M1 {
        return ExistenceVerdict::Unknown;
    }
    let inv = charge_and_kind(m, v);
    let n = v.n as i64;
    match v.kind {
        VarietyKind::Projective | VarietyKind::Quadric => {
            if inv.is_instanton && inv.rank >= n - 1 {
                return ExistenceVerdict::Exists {
                    citation: "instanton-existence-above-rank-n-minus-1".into(),
                };
            }
        }
        VarietyKind::Custom => return ExistenceVerdict::Unknown,
    }
    if v.kind == VarietyKind::Quadric {
        if let Some(c1) = inv.c1 {
            if c1 < 0 && inv.rank <= n - 1 {
                return ExistenceVerdict::NotExists {
                    citation: "quadric-no-negative-degree-below-rank-n".into(),
                };
            }
            if c1 == 0 && inv.rank <= n - 2 {
                return ExistenceVerdict::NotExists {
                    citation: "quadric-no-degree-zero-below-rank-n-minus-1".into(),
                };
            }
        }
    }
    ExistenceVerdict::Unknown
}
