//! The cohomological test for being a linear (instanton-type) sheaf on
//! projective space.  The required vanishing touches the boundary cells
//! of the rows a monad construction delivers:
//!
//! * h^0(E(-1)) = 0 and h^n(E(-n)) = 0,
//! * for n >= 3 also h^1(E(-2)) = 0 and h^{n-1}(E(1-n)) = 0,
//! * for n >= 4 the full middle rows h^q(E(k)) = 0, 2 <= q <= n-2.
//!
//! The middle rows are checked across the table's window; the verdict is
//! only as wide as the table.

use super::table::CohTable;
use crate::varieties::DimRange;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredicateOutcome {
    Satisfied,
    /// A required cell is provably nonzero.
    Fails { q: u32, k: i64, lo: u64 },
    /// A required cell is not pinned to zero by the table.
    Indeterminate { q: u32, k: i64 },
}

pub fn linear_sheaf_predicate(table: &CohTable) -> PredicateOutcome {
    let n = table.n;
    let cells = table.cells();
    let mut required: Vec<(u32, i64)> = vec![(0, -1), (n, -(n as i64))];
    if n >= 3 {
        required.push((1, -2));
        required.push((n - 1, 1 - n as i64));
    }
    if n >= 4 {
        for q in 2..=(n - 2) {
            for k in table.window.0..=table.window.1 {
                required.push((q, k));
            }
        }
    }
    let mut indeterminate: Option<(u32, i64)> = None;
    for (q, k) in required {
        let r = cells
            .get(&(q, k))
            .copied()
            .unwrap_or_else(DimRange::unknown);
        if r.lo >= 1 {
            return PredicateOutcome::Fails { q, k, lo: r.lo };
        }
        if !r.is_zero() && indeterminate.is_none() {
            indeterminate = Some((q, k));
        }
    }
    match indeterminate {
        None => PredicateOutcome::Satisfied,
        Some((q, k)) => PredicateOutcome::Indeterminate { q, k },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::derive_monad_tables;
    use crate::monads::MonadSpec;
    use crate::varieties::Variety;

    #[test]
    fn test_instanton_satisfies_predicate() {
        for n in 2..=5u32 {
            let v = Variety::projective(n).unwrap();
            let m = MonadSpec::twist_monad(1, 2 + n.max(2), 1);
            if m.validate(&v).is_err() {
                continue;
            }
            let t = derive_monad_tables(&m, &v, true, (-8, 8)).unwrap();
            assert_eq!(
                linear_sheaf_predicate(&t.e),
                PredicateOutcome::Satisfied,
                "n={n}"
            );
        }
    }

    #[test]
    fn test_line_bundle_sum_fails() {
        // O(-2) + O(2) has h^0(F(-1)) = h^0(O(1)) > 0.
        use crate::engine::table::{CohTable, TableEntry};
        use crate::varieties::h_line_bundle;
        let v = Variety::projective(3).unwrap();
        let mut entries = Vec::new();
        for q in 0..=3u32 {
            for k in -6..=6i64 {
                let r = h_line_bundle(&v, q, k - 2).add(&h_line_bundle(&v, q, k + 2));
                entries.push(TableEntry {
                    q,
                    k,
                    lo: r.lo,
                    hi: r.hi,
                    trace: None,
                });
            }
        }
        let t = CohTable {
            sheaf: "O(-2)+O(2)".into(),
            n: 3,
            window: (-6, 6),
            entries,
            trace: Vec::new(),
            notes: Vec::new(),
        };
        assert!(matches!(
            linear_sheaf_predicate(&t),
            PredicateOutcome::Fails { q: 0, k: -1, .. }
        ));
    }

    #[test]
    fn test_unpinned_cell_is_indeterminate() {
        use crate::engine::table::{CohTable, TableEntry};
        let mut entries = Vec::new();
        for q in 0..=2u32 {
            for k in -3..=3i64 {
                entries.push(TableEntry {
                    q,
                    k,
                    lo: 0,
                    hi: None,
                    trace: None,
                });
            }
        }
        let t = CohTable {
            sheaf: "mystery".into(),
            n: 2,
            window: (-3, 3),
            entries,
            trace: Vec::new(),
            notes: Vec::new(),
        };
        assert!(matches!(
            linear_sheaf_predicate(&t),
            PredicateOutcome::Indeterminate { q: 0, k: -1 }
        ));
    }
}
