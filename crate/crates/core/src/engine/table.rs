//! Cohomology tables: extraction from an engine, serialization, and the
//! combinators that build tables for sums, extensions and twists.

use super::{Engine, NodeId, Premise};
use crate::varieties::DimRange;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One (q, k) cell of an exported table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub q: u32,
    pub k: i64,
    pub lo: u64,
    pub hi: Option<u64>,
    /// Trace step id that last narrowed this cell, if any.
    pub trace: Option<String>,
}

/// Exported trace step.  Premise references are by node name so the
/// record stays meaningful outside the engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub id: String,
    pub constraint: String,
    pub rule: String,
    pub node: String,
    pub q: u32,
    pub k: i64,
    pub lo: u64,
    pub hi: Option<u64>,
    pub premises: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohTable {
    pub sheaf: String,
    pub n: u32,
    pub window: (i64, i64),
    pub entries: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CohTable {
    pub fn get(&self, q: u32, k: i64) -> Option<DimRange> {
        self.entries
            .iter()
            .find(|e| e.q == q && e.k == k)
            .map(|e| DimRange { lo: e.lo, hi: e.hi })
    }

    /// Entries as a map keyed by (q, k).
    pub fn cells(&self) -> BTreeMap<(u32, i64), DimRange> {
        self.entries
            .iter()
            .map(|e| ((e.q, e.k), DimRange { lo: e.lo, hi: e.hi }))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<CohTable, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// CSV rows `q,k,lo,hi,trace`; `hi` is empty for an unbounded cell.
    /// The trace list itself is not part of the CSV form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,k,lo,hi,trace\n");
        for e in &self.entries {
            let hi = e.hi.map(|h| h.to_string()).unwrap_or_default();
            let trace = e.trace.clone().unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", e.q, e.k, e.lo, hi, trace).unwrap();
        }
        out
    }

    /// Parses the CSV form back into a table (entries only).
    pub fn from_csv(sheaf: &str, n: u32, s: &str) -> Result<CohTable, String> {
        let mut entries = Vec::new();
        let mut lo_k = i64::MAX;
        let mut hi_k = i64::MIN;
        for (i, line) in s.lines().enumerate() {
            if i == 0 {
                if line.trim() != "q,k,lo,hi,trace" {
                    return Err(format!("unexpected header {line:?}"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.splitn(5, ',').collect();
            if parts.len() != 5 {
                return Err(format!("line {}: expected 5 fields", i + 1));
            }
            let q: u32 = parts[0].parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            let k: i64 = parts[1].parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            let lo: u64 = parts[2].parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            let hi = if parts[3].is_empty() {
                None
            } else {
                Some(parts[3].parse().map_err(|e| format!("line {}: {e}", i + 1))?)
            };
            let trace = if parts[4].is_empty() {
                None
            } else {
                Some(parts[4].to_string())
            };
            lo_k = lo_k.min(k);
            hi_k = hi_k.max(k);
            entries.push(TableEntry { q, k, lo, hi, trace });
        }
        if entries.is_empty() {
            return Err("no entries".into());
        }
        Ok(CohTable {
            sheaf: sheaf.to_string(),
            n,
            window: (lo_k, hi_k),
            entries,
            trace: Vec::new(),
            notes: Vec::new(),
        })
    }
}

fn premise_label(eng: &Engine, p: &Premise) -> String {
    match p.step {
        Some(s) => format!("s{s}"),
        None if eng.is_oracle(p.node) => format!(
            "oracle:{}[q={},k={}]={}",
            eng.node_name(p.node),
            p.q,
            p.k,
            p.used
        ),
        None => format!("trivial:{}[q={},k={}]", eng.node_name(p.node), p.q, p.k),
    }
}

pub(super) fn extract(eng: &Engine, node: NodeId, window: (i64, i64)) -> CohTable {
    let mut entries = Vec::new();
    let mut needed = std::collections::BTreeSet::new();
    let (wlo, whi) = window;
    for q in 0..=eng.n() {
        for k in wlo..=whi {
            let cell = eng.cell(node, q, k);
            if let Some(s) = cell.step {
                needed.insert(s);
            }
            entries.push(TableEntry {
                q,
                k,
                lo: cell.range.lo,
                hi: cell.range.hi,
                trace: cell.step.map(|s| format!("s{s}")),
            });
        }
    }
    // Transitive closure of premise steps.
    let mut stack: Vec<u32> = needed.iter().copied().collect();
    while let Some(s) = stack.pop() {
        for p in &eng.steps()[s as usize].premises {
            if let Some(ps) = p.step {
                if needed.insert(ps) {
                    stack.push(ps);
                }
            }
        }
    }
    let trace = needed
        .iter()
        .map(|&s| {
            let step = &eng.steps()[s as usize];
            TraceRecord {
                id: format!("s{s}"),
                constraint: step.constraint.clone(),
                rule: step.rule.label().to_string(),
                node: eng.node_name(step.node).to_string(),
                q: step.q,
                k: step.k,
                lo: step.after.lo,
                hi: step.after.hi,
                premises: step.premises.iter().map(|p| premise_label(eng, p)).collect(),
            }
        })
        .collect();
    CohTable {
        sheaf: eng.node_name(node).to_string(),
        n: eng.n(),
        window,
        entries,
        trace,
        notes: Vec::new(),
    }
}

fn combine_windows(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
    (a.0.max(b.0), a.1.min(b.1))
}

/// Table of a direct sum: cellwise interval sum.
pub fn sum_tables(parts: &[&CohTable]) -> Result<CohTable, String> {
    let first = parts.first().ok_or("empty sum")?;
    let n = first.n;
    let mut window = first.window;
    for p in parts.iter().skip(1) {
        if p.n != n {
            return Err("sum over different ambient dimensions".into());
        }
        window = combine_windows(window, p.window);
    }
    if window.0 > window.1 {
        return Err("sum windows do not overlap".into());
    }
    let maps: Vec<BTreeMap<(u32, i64), DimRange>> = parts.iter().map(|p| p.cells()).collect();
    let mut entries = Vec::new();
    for q in 0..=n {
        for k in window.0..=window.1 {
            let mut acc = DimRange::ZERO;
            for m in &maps {
                let r = m.get(&(q, k)).copied().unwrap_or_else(DimRange::unknown);
                acc = acc.add(&r);
            }
            entries.push(TableEntry {
                q,
                k,
                lo: acc.lo,
                hi: acc.hi,
                trace: None,
            });
        }
    }
    let names: Vec<&str> = parts.iter().map(|p| p.sheaf.as_str()).collect();
    Ok(CohTable {
        sheaf: names.join(" + "),
        n,
        window,
        entries,
        trace: Vec::new(),
        notes: vec![format!(
            "cellwise sum of {} summand tables; cohomology is additive over direct sums",
            parts.len()
        )],
    })
}

/// Table of an extension 0 -> A -> E -> B -> 0 known only through the
/// tables of A and B: the long exact sequence gives subadditive upper
/// bounds, and a cell is exact when both neighbours' contributions pin it
/// (in particular zero when the flanking cells vanish).
pub fn extension_table(sub: &CohTable, quot: &CohTable) -> Result<CohTable, String> {
    if sub.n != quot.n {
        return Err("extension over different ambient dimensions".into());
    }
    let n = sub.n;
    let window = combine_windows(sub.window, quot.window);
    if window.0 > window.1 {
        return Err("extension windows do not overlap".into());
    }
    let sm = sub.cells();
    let qm = quot.cells();
    let get = |m: &BTreeMap<(u32, i64), DimRange>, q: i64, k: i64| -> DimRange {
        if q < 0 || q > n as i64 {
            return DimRange::ZERO;
        }
        m.get(&(q as u32, k)).copied().unwrap_or_else(DimRange::unknown)
    };
    let mut entries = Vec::new();
    for q in 0..=n as i64 {
        for k in window.0..=window.1 {
            let a = get(&sm, q, k);
            let b = get(&qm, q, k);
            // h^q(E) <= h^q(A) + h^q(B); h^q(E) >= bounds from the
            // connecting maps: at least h^q(B) - h^{q+1}(A) surjects and
            // h^q(A) - h^{q-1}(B) injects.
            let hi = match (a.hi, b.hi) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            };
            let a_next = get(&sm, q + 1, k);
            let b_prev = get(&qm, q - 1, k);
            // dim h^q(E) = h^q(A) + h^q(B) minus the ranks of the two
            // connecting maps, which are bounded by h^{q-1}(B) and
            // h^{q+1}(A) respectively.
            let lo = match (b_prev.hi, a_next.hi) {
                (Some(x), Some(y)) => (a.lo + b.lo).saturating_sub(x + y),
                (Some(x), None) => a.lo.saturating_sub(x),
                (None, Some(y)) => b.lo.saturating_sub(y),
                (None, None) => 0,
            };
            entries.push(TableEntry {
                q: q as u32,
                k,
                lo,
                hi,
                trace: None,
            });
        }
    }
    Ok(CohTable {
        sheaf: format!("[{} by {}]", quot.sheaf, sub.sheaf),
        n,
        window,
        entries,
        trace: Vec::new(),
        notes: vec![
            "bounds from the long exact sequence of the extension; exact where both flanks vanish"
                .to_string(),
        ],
    })
}

/// Reindexes a table by a twist shift: entry (q, k) of the result is
/// entry (q, k + t) of the input.
pub fn twist_table(t: &CohTable, shift: i64) -> CohTable {
    let window = (t.window.0 - shift, t.window.1 - shift);
    let entries = t
        .entries
        .iter()
        .map(|e| TableEntry {
            q: e.q,
            k: e.k - shift,
            lo: e.lo,
            hi: e.hi,
            trace: e.trace.clone(),
        })
        .collect();
    CohTable {
        sheaf: format!("{}({shift})", t.sheaf),
        n: t.n,
        window,
        entries,
        trace: t.trace.clone(),
        notes: t.notes.clone(),
    }
}
