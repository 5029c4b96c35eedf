//! Pointwise orders and Dedekind cuts induced by an extended triangular
//! system, and the maximality test built on them.
//!
//! On a refinement cell `x` the system induces `i ⪯ₓ j ⇔ x ⊆ S_ij`, together
//! with `A_x = {i : x ⊆ C_i}` and `B_x = {i : x ⊆ R_i}`. A system is maximal
//! iff on every cell the order is linear, `A_x ∪ B_x` is everything, and
//! either `min A_x = max B_x` or the cut is a virtual one the ambient order
//! admits (no least element of `A_x`, no greatest of `B_x`).

use serde::{Deserialize, Serialize};

use crate::borel::{Interval, Rational, RefinementPartition};
use crate::error::{Error, Result};

use super::check::{check_extended, AxiomReport, CheckMode, Violation};
use super::system::{ExtTriSystem, OrderKind, VirtualTag};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub cell: Interval,
    /// `relation[i][j]` is `i ⪯ₓ j`.
    pub relation: Vec<Vec<bool>>,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "virtual")]
    pub tag: VirtualTag,
}

impl Cut {
    fn on_cell(sys: &ExtTriSystem, cell: Interval) -> Self {
        let n = sys.size();
        let relation: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| sys.s(i, j).contains_interval(&cell)).collect())
            .collect();
        let a: Vec<usize> = (0..n).filter(|&i| sys.c(i).contains_interval(&cell)).collect();
        let b: Vec<usize> = (0..n).filter(|&i| sys.r(i).contains_interval(&cell)).collect();
        let meets = a.iter().any(|i| b.contains(i));
        let tag = if meets {
            VirtualTag::None
        } else if a.is_empty() {
            VirtualTag::AEmptyAtInfinity
        } else if b.is_empty() {
            VirtualTag::BEmptyAtInfinity
        } else {
            VirtualTag::Gap
        };
        Self { cell, relation, a, b, tag }
    }

    pub fn size(&self) -> usize {
        self.relation.len()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.relation[i][j]
    }

    pub fn is_linear(&self) -> bool {
        let n = self.size();
        (0..n).all(|i| (0..n).all(|j| self.le(i, j) || self.le(j, i)))
    }

    /// Indices in neither `A` nor `B`.
    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.size()).filter(|i| !self.a.contains(i) && !self.b.contains(i)).collect()
    }

    /// Least element of `A` under `⪯ₓ`, if one exists.
    pub fn min_a(&self) -> Option<usize> {
        self.a.iter().copied().find(|&x| self.a.iter().all(|&y| self.le(x, y)))
    }

    /// Greatest element of `B` under `⪯ₓ`, if one exists.
    pub fn max_b(&self) -> Option<usize> {
        self.b.iter().copied().find(|&x| self.b.iter().all(|&y| self.le(y, x)))
    }

    /// Case (b) of the maximality characterization: `min A = max B`.
    pub fn is_pinned(&self) -> bool {
        matches!((self.min_a(), self.max_b()), (Some(p), Some(q)) if p == q)
    }

    /// Whether this cut is maximal under `mode` for the given ambient order.
    pub fn is_maximal(&self, kind: OrderKind, mode: MaximalityMode) -> bool {
        self.is_linear() && self.uncovered().is_empty() && self.extremes_ok(kind, mode)
    }

    fn extremes_ok(&self, kind: OrderKind, mode: MaximalityMode) -> bool {
        if self.is_pinned() {
            return true;
        }
        mode == MaximalityMode::Truncated
            && self.tag != VirtualTag::None
            && kind.admits(self.tag)
    }
}

/// How cuts with `A ∩ B = ∅` are judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximalityMode {
    /// The index set is exactly the represented indices; only `min A = max B`
    /// cuts are maximal.
    Finite,
    /// The represented indices truncate an infinite order; the order's
    /// legitimate virtual cuts are also accepted.
    Truncated,
}

impl MaximalityMode {
    /// Natural mode for a template kind.
    pub fn for_kind(kind: OrderKind) -> Self {
        if kind == OrderKind::Finite {
            MaximalityMode::Finite
        } else {
            MaximalityMode::Truncated
        }
    }
}

/// The cut on every refinement cell of the system.
pub fn cuts(sys: &ExtTriSystem) -> Vec<Cut> {
    cuts_on(sys, &sys.refinement())
}

pub(crate) fn cuts_on(sys: &ExtTriSystem, cells: &RefinementPartition) -> Vec<Cut> {
    cells.cells().iter().map(|&cell| Cut::on_cell(sys, cell)).collect()
}

/// The cut on the refinement cell containing `x`.
pub fn induced_cut_at(sys: &ExtTriSystem, x: Rational) -> Result<Cut> {
    let cells = sys.refinement();
    let n = cells.cell_of(x)?;
    Ok(Cut::on_cell(sys, cells.cells()[n]))
}

/// Maximality report for a system that already passes the extended check.
pub fn is_maximal(sys: &ExtTriSystem, mode: MaximalityMode) -> Result<AxiomReport> {
    let pre = check_extended(sys, CheckMode::Extended);
    if !pre.passed {
        return Err(Error::InvalidInput(format!(
            "maximality needs an extended triangular system; {} axiom violation(s), first: axiom {} at {:?} on {}",
            pre.violations.len(),
            pre.violations[0].axiom,
            pre.violations[0].indices,
            pre.violations[0].cell
        )));
    }
    let kind = sys.template().kind;
    let mut out = Vec::new();
    for cut in cuts(sys) {
        let n = cut.size();
        let mut linear = true;
        for i in 0..n {
            for j in (i + 1)..n {
                if !cut.le(i, j) && !cut.le(j, i) {
                    linear = false;
                    out.push(Violation { axiom: 7, indices: vec![i, j], cell: cut.cell });
                }
            }
        }
        let uncovered = cut.uncovered();
        for &i in &uncovered {
            out.push(Violation { axiom: 8, indices: vec![i], cell: cut.cell });
        }
        if linear && uncovered.is_empty() && !cut.extremes_ok(kind, mode) {
            let witness: Vec<usize> = cut.min_a().into_iter().chain(cut.max_b()).collect();
            out.push(Violation { axiom: 9, indices: witness, cell: cut.cell });
        }
    }
    Ok(AxiomReport::from_violations(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::{rat, BorelSet};
    use crate::tsys::system::{IndexTemplate, TriSystem};

    fn two_by_two(s01: BorelSet, s10: BorelSet, kind: OrderKind) -> TriSystem {
        TriSystem::new(
            IndexTemplate::integers(kind, 1, 2),
            vec![vec![BorelSet::full(), s01], vec![s10, BorelSet::full()]],
        )
        .unwrap()
    }

    #[test]
    fn empty_cut_everywhere() {
        let sys = ExtTriSystem::with_empty_cut(two_by_two(
            BorelSet::full(),
            BorelSet::empty(),
            OrderKind::Finite,
        ));
        for x in [rat(0, 1), rat(1, 3), rat(9, 10)] {
            let cut = induced_cut_at(&sys, x).unwrap();
            assert!(cut.a.is_empty() && cut.b.is_empty());
        }
        assert!(induced_cut_at(&sys, rat(1, 1)).is_err());
    }

    #[test]
    fn incomparable_cell_fails_linearity() {
        let half = BorelSet::interval(rat(1, 2), rat(1, 1)).unwrap();
        let sys = ExtTriSystem::with_empty_cut(two_by_two(half, BorelSet::empty(), OrderKind::Finite));
        let report = is_maximal(&sys, MaximalityMode::Finite).unwrap();
        assert!(!report.passed);
        let lin: Vec<_> = report.for_axiom(7).collect();
        assert_eq!(lin.len(), 1);
        assert_eq!(lin[0].cell, Interval::new(rat(0, 1), rat(1, 2)).unwrap());
    }

    #[test]
    fn pinned_cut_is_maximal_in_both_modes() {
        let base = two_by_two(BorelSet::full(), BorelSet::empty(), OrderKind::Nat);
        // A = {1}, B = {0, 1}: min A = max B = 1.
        let sys = ExtTriSystem::new(
            base,
            vec![BorelSet::full(), BorelSet::full()],
            vec![BorelSet::empty(), BorelSet::full()],
        )
        .unwrap();
        assert!(is_maximal(&sys, MaximalityMode::Finite).unwrap().passed);
        assert!(is_maximal(&sys, MaximalityMode::Truncated).unwrap().passed);
    }

    #[test]
    fn cut_at_infinity_depends_on_mode() {
        let base = two_by_two(BorelSet::full(), BorelSet::empty(), OrderKind::Nat);
        let sys = ExtTriSystem::new(base, vec![BorelSet::full(); 2], vec![BorelSet::empty(); 2])
            .unwrap();
        let cut = induced_cut_at(&sys, rat(1, 2)).unwrap();
        assert_eq!(cut.tag, VirtualTag::AEmptyAtInfinity);
        assert!(is_maximal(&sys, MaximalityMode::Truncated).unwrap().passed);
        let finite = is_maximal(&sys, MaximalityMode::Finite).unwrap();
        assert!(finite.has_axiom(9));
    }

    #[test]
    fn non_extended_input_is_rejected() {
        let base = two_by_two(BorelSet::full(), BorelSet::full(), OrderKind::Finite);
        let sys = ExtTriSystem::with_empty_cut(base);
        assert!(matches!(
            is_maximal(&sys, MaximalityMode::Finite),
            Err(Error::InvalidInput(_))
        ));
    }
}
