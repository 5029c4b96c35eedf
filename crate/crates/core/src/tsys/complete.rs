//! Enlarging an extended triangular system to a maximal one.
//!
//! The procedure alternates two stages until nothing changes.
//!
//! Stage 1 visits ordered pairs `(i0, j0)`, `i0 ≠ j0`, in row-major order. On
//! the set `D` where the two indices are incomparable it declares `i0 ⪯ j0`
//! and closes transitively: `S_ij ← S_ij ∪ (S_{i,i0} ∩ D ∩ S_{j0,j})` for all
//! `i, j`. Rows and columns are then pulled along the enlarged order,
//! `R_i ← ∪_b S_ib ∩ R_b` and `C_i ← ∪_a C_a ∩ S_ai`. After stage 1 every
//! pointwise order is linear.
//!
//! Stage 2 visits each `i0` in index order. On the cells where the cut is not
//! yet maximal and `i0` sits between the cut's halves (above all of `B`,
//! below all of `A`), `i0` is added to both halves together with everything
//! below it (rows) or above it (columns).

use crate::borel::{union_all, BorelSet};
use crate::error::{Error, Result};

use super::check::{check_extended, CheckMode};
use super::cut::{cuts, MaximalityMode};
use super::system::ExtTriSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub system: ExtTriSystem,
    /// Rounds of stage 1 + stage 2 run, counting the final round that
    /// changed nothing. An already maximal input takes one round.
    pub passes: usize,
}

/// Completes `sys` to a maximal extended triangular system, judging cuts in
/// the natural mode of its template kind.
pub fn complete_to_maximal(sys: &ExtTriSystem) -> Result<Completion> {
    complete_with(sys, MaximalityMode::for_kind(sys.template().kind))
}

pub fn complete_with(sys: &ExtTriSystem, mode: MaximalityMode) -> Result<Completion> {
    let pre = check_extended(sys, CheckMode::Extended);
    if let Some(v) = pre.violations.first() {
        return Err(Error::InvalidInput(format!(
            "completion needs an extended triangular system; axiom {} fails for {:?} on {}",
            v.axiom, v.indices, v.cell
        )));
    }
    let mut out = sys.clone();
    let mut passes = 0;
    loop {
        passes += 1;
        let linearized = linearize(&mut out);
        let pinned = pin_cuts(&mut out, mode);
        if !linearized && !pinned {
            break;
        }
    }
    Ok(Completion { system: out, passes })
}

/// Stage 1. Returns whether anything changed.
fn linearize(sys: &mut ExtTriSystem) -> bool {
    let n = sys.size();
    let mut changed = false;
    for i0 in 0..n {
        for j0 in 0..n {
            if i0 == j0 {
                continue;
            }
            let (s, r, c) = sys.parts_mut();
            let gap = s[i0][j0].union(&s[j0][i0]).complement();
            if gap.is_empty() {
                continue;
            }
            changed = true;
            let left: Vec<BorelSet> = (0..n).map(|i| s[i][i0].intersect(&gap)).collect();
            let right: Vec<BorelSet> = (0..n).map(|j| s[j0][j].clone()).collect();
            for i in 0..n {
                if left[i].is_empty() {
                    continue;
                }
                for j in 0..n {
                    let add = left[i].intersect(&right[j]);
                    if !add.is_empty() {
                        s[i][j] = s[i][j].union(&add);
                    }
                }
            }
            let rows: Vec<BorelSet> = (0..n)
                .map(|i| union_all(&(0..n).map(|b| s[i][b].intersect(&r[b])).collect::<Vec<_>>()))
                .collect();
            let cols: Vec<BorelSet> = (0..n)
                .map(|i| union_all(&(0..n).map(|a| c[a].intersect(&s[a][i])).collect::<Vec<_>>()))
                .collect();
            *r = rows;
            *c = cols;
        }
    }
    changed
}

/// Stage 2. Returns whether anything changed.
fn pin_cuts(sys: &mut ExtTriSystem, mode: MaximalityMode) -> bool {
    let n = sys.size();
    let kind = sys.template().kind;
    let mut changed = false;
    for i0 in 0..n {
        let mask = BorelSet::from_cells(
            cuts(sys)
                .iter()
                .filter(|cut| {
                    cut.is_linear()
                        && !cut.is_maximal(kind, mode)
                        && cut.b.iter().all(|&b| cut.le(b, i0))
                        && cut.a.iter().all(|&a| cut.le(i0, a))
                })
                .map(|cut| &cut.cell)
                .collect::<Vec<_>>(),
        );
        if mask.is_empty() {
            continue;
        }
        changed = true;
        let (s, r, c) = sys.parts_mut();
        for i in 0..n {
            r[i] = r[i].union(&s[i][i0].intersect(&mask));
            c[i] = c[i].union(&s[i0][i].intersect(&mask));
        }
    }
    changed
}
