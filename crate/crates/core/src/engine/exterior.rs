//! Section vanishing for exterior powers of monad cohomology.
//!
//! For 0 -> K -> O^b -> O(l)^c -> 0 and 0 -> O(-l)^a -> K -> E -> 0, the
//! exterior powers of K and E resolve into long exact complexes of line
//! bundles:
//!
//! * wedge^j K:  0 -> wedge^j K -> wedge^j O^b -> ... -> S^j(O(l)^c) -> 0
//! * wedge^q E:  0 -> S^q A -> S^{q-1} A (x) K -> ... -> wedge^q K ->
//!   wedge^q E -> 0 with A = O(-l)^a
//!
//! Cutting these into short exact sequences and propagating pins
//! h^0(wedge^q E(t)) for q up to n-1.  Higher powers reroute through
//! wedge^q E = wedge^{r-q} E* (x) det E when E is locally free, replaying
//! the same chains on the dual monad.  Requests outside both reaches come
//! back as explicit gaps, never as silent failures.

use super::{Engine, EngineError, Term};
use crate::monads::{MonadShape, MonadSpec};
use crate::varieties::{binomial, h_line_bundle, Variety};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GapKind {
    /// The chain route needs E locally free and the caller did not grant it.
    NeedsLocallyFree,
    /// Both q and r - q exceed what the chains reach in this dimension.
    DepthBeyondDuality,
    /// The chains apply but did not pin the cell to zero.
    NotDerived,
}

#[derive(Clone, Debug)]
pub enum ExteriorCell {
    Zero { trace: String },
    Gap { kind: GapKind, detail: String },
}

impl ExteriorCell {
    pub fn is_zero(&self) -> bool {
        matches!(self, ExteriorCell::Zero { .. })
    }
}

#[derive(Debug)]
pub struct ExteriorEvidence {
    pub rank: i64,
    pub c1: i64,
    pub entries: BTreeMap<(u32, i64), ExteriorCell>,
}

impl ExteriorEvidence {
    pub fn all_zero(&self) -> bool {
        self.entries.values().all(|c| c.is_zero())
    }

    pub fn gaps(&self) -> Vec<((u32, i64), &ExteriorCell)> {
        self.entries
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (*k, c))
            .collect()
    }
}

/// Establishes h^0(wedge^q E(t)) = 0 for each requested (q, t).
pub fn exterior_replay(
    m: &MonadSpec,
    v: &Variety,
    requests: &[(u32, i64)],
    locally_free: bool,
) -> Result<ExteriorEvidence, EngineError> {
    if m.shape != MonadShape::M1 {
        return Err(EngineError::BadRequest(
            "exterior replay handles the plain monad shape only".into(),
        ));
    }
    m.validate(v)
        .map_err(|e| EngineError::BadRequest(e.to_string()))?;
    let r = m.rank(v);
    let (_, c1) = crate::chern::rank_and_c1(m, v);
    let max_direct = v.n.saturating_sub(1);
    let mut direct = Vec::new();
    let mut via_dual = Vec::new();
    let mut entries: BTreeMap<(u32, i64), ExteriorCell> = BTreeMap::new();
    for &(q, t) in requests {
        if q == 0 || q as i64 >= r {
            return Err(EngineError::BadRequest(format!(
                "exterior power {q} outside 1..{}",
                r - 1
            )));
        }
        if q >= 2 && !locally_free {
            entries.insert(
                (q, t),
                ExteriorCell::Gap {
                    kind: GapKind::NeedsLocallyFree,
                    detail: format!(
                        "wedge^{q} of the display sequences needs locally free cohomology"
                    ),
                },
            );
        } else if q <= max_direct {
            direct.push((q, t));
        } else if locally_free && r - q as i64 <= max_direct as i64 {
            via_dual.push((q, t));
        } else {
            entries.insert(
                (q, t),
                ExteriorCell::Gap {
                    kind: GapKind::DepthBeyondDuality,
                    detail: format!(
                        "wedge^{q} unreachable: q > {max_direct} and rank - q = {} > {max_direct}",
                        r - q as i64
                    ),
                },
            );
        }
    }

    if !direct.is_empty() {
        replay_direct(m, v, &direct, &mut entries)?;
    }
    if !via_dual.is_empty() {
        let dual = m.dualize().map_err(|e| EngineError::BadRequest(e.to_string()))?;
        let mapped: Vec<(u32, i64)> = via_dual
            .iter()
            .map(|&(q, t)| ((r - q as i64) as u32, t + c1))
            .collect();
        let mut dual_entries = BTreeMap::new();
        replay_direct(&dual, v, &mapped, &mut dual_entries)?;
        for (&(q, t), &(dq, dt)) in via_dual.iter().zip(mapped.iter()) {
            let cell = match dual_entries.get(&(dq, dt)) {
                Some(ExteriorCell::Zero { trace }) => ExteriorCell::Zero {
                    trace: format!("dual[wedge^{dq}({dt})]:{trace}"),
                },
                Some(ExteriorCell::Gap { kind, detail }) => ExteriorCell::Gap {
                    kind: *kind,
                    detail: format!("via dual wedge^{dq} at twist {dt}: {detail}"),
                },
                None => ExteriorCell::Gap {
                    kind: GapKind::NotDerived,
                    detail: "dual replay returned nothing".into(),
                },
            };
            entries.insert((q, t), cell);
        }
    }

    Ok(ExteriorEvidence { rank: r, c1, entries })
}

fn replay_direct(
    m: &MonadSpec,
    v: &Variety,
    requests: &[(u32, i64)],
    entries: &mut BTreeMap<(u32, i64), ExteriorCell>,
) -> Result<(), EngineError> {
    let l = v.l;
    let deepest = requests.iter().map(|&(q, _)| q).max().unwrap() as i64;
    let t_min = requests.iter().map(|&(_, t)| t).min().unwrap();
    let t_max = requests.iter().map(|&(_, t)| t).max().unwrap().max(0);
    let window = (
        t_min - (2 * deepest + 2) * l - 2,
        t_max + (2 * deepest + 2) * l + 2,
    );
    let mut eng = Engine::new(v.n, window)?;
    let vo = v.clone();
    let o = eng.add_oracle_node("O", move |q, k| h_line_bundle(&vo, q, k));

    // wedge^j K resolved by line bundles, one chain per exterior degree.
    let mut wk: Vec<Option<super::NodeId>> = vec![None; deepest as usize + 1];
    for j in 1..=deepest {
        let node = eng.add_node(&format!("wedge{j}K"));
        let mut chain = vec![vec![Term::new(node, 0, 1)]];
        for t in 0..=j {
            let sym = if t == 0 {
                1
            } else {
                binomial(m.c as i64 + t - 1, t)
            };
            let mult = binomial(m.b as i64, j - t) * sym;
            chain.push(vec![Term::new(o, t * l, mult as u64)]);
        }
        eng.add_chain(&format!("wedge{j}K-res"), chain);
        wk[j as usize] = Some(node);
    }

    // wedge^q E resolved by symmetric powers of the left term against
    // exterior powers of K.
    let mut we: BTreeMap<u32, super::NodeId> = BTreeMap::new();
    for &(q, _) in requests {
        if we.contains_key(&q) {
            continue;
        }
        let node = eng.add_node(&format!("wedge{q}E"));
        let qi = q as i64;
        let mut chain = Vec::new();
        for j in 0..=qi {
            let drop = qi - j;
            let sym = if drop == 0 {
                1
            } else {
                binomial(m.a as i64 + drop - 1, drop)
            };
            let term_node = if j == 0 { o } else { wk[j as usize].unwrap() };
            chain.push(vec![Term::new(term_node, -drop * l, sym as u64)]);
        }
        chain.push(vec![Term::new(node, 0, 1)]);
        eng.add_chain(&format!("wedge{q}E-res"), chain);
        we.insert(q, node);
    }

    eng.propagate()?;

    for &(q, t) in requests {
        let node = we[&q];
        let cell = eng.range(node, 0, t);
        if cell.is_zero() {
            let table = eng.table(node, (t, t));
            let trace = table
                .entries
                .iter()
                .find(|e| e.q == 0 && e.k == t)
                .and_then(|e| e.trace.clone())
                .unwrap_or_else(|| "oracle".into());
            entries.insert((q, t), ExteriorCell::Zero { trace });
        } else {
            entries.insert(
                (q, t),
                ExteriorCell::Gap {
                    kind: GapKind::NotDerived,
                    detail: format!(
                        "h0(wedge^{q}E({t})) stayed at {} after propagation",
                        cell
                    ),
                },
            );
        }
    }
    Ok(())
}
