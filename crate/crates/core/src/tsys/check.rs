//! Axiom checking for triangular, nearly triangular and extended triangular
//! systems.
//!
//! Each axiom is an inclusion between Boolean combinations of the system's
//! sets. The checker computes the exceptional set of every inclusion with
//! exact set algebra and then reports the refinement cells it covers.
//!
//! Axiom numbering used in reports:
//!
//! | id | condition |
//! |----|-----------|
//! | 1 | `S_ii = [0,1)` |
//! | 2 | `S_ij ∩ S_ji = ∅` for `i < j` |
//! | 3 | `S_ij ∩ S_jk ⊆ S_ik` |
//! | 4 | `C_i ∩ S_ij ⊆ C_j` |
//! | 5 | `S_ij ∩ R_j ⊆ R_i` |
//! | 6 | `R_i ∩ C_j ⊆ S_ij` |
//! | 7 | `⪯ₓ` is linear (maximality) |
//! | 8 | `A_x ∪ B_x` is the whole index set (maximality) |
//! | 9 | `min A_x = max B_x`, or an admissible virtual cut (maximality) |

use serde::{Deserialize, Serialize};

use crate::borel::{BorelSet, Interval, RefinementPartition};

use super::system::{ExtTriSystem, TriSystem};

/// One failed condition on one cell.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: u8,
    pub indices: Vec<usize>,
    pub cell: Interval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub(crate) fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        Self { passed: violations.is_empty(), violations }
    }

    pub fn has_axiom(&self, axiom: u8) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }

    pub fn for_axiom(&self, axiom: u8) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

/// Which axioms to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// Axioms 1–3.
    Triangular,
    /// Axioms 1–5 (no row/column compatibility).
    Nearly,
    /// Axioms 1–6.
    Extended,
}

/// Collects witness cells for exceptional sets on a fixed partition.
struct Witnesses<'a> {
    cells: &'a RefinementPartition,
    verbose: bool,
    out: Vec<Violation>,
}

impl Witnesses<'_> {
    fn record(&mut self, axiom: u8, indices: &[usize], exceptional: &BorelSet) {
        if exceptional.is_empty() {
            return;
        }
        for cell in self.cells.cells() {
            if exceptional.contains_interval(cell) {
                self.out.push(Violation { axiom, indices: indices.to_vec(), cell: *cell });
                if !self.verbose {
                    break;
                }
            }
        }
    }
}

fn check_s(s: &[Vec<BorelSet>], w: &mut Witnesses<'_>) {
    let n = s.len();
    for i in 0..n {
        w.record(1, &[i], &s[i][i].complement());
    }
    for i in 0..n {
        for j in (i + 1)..n {
            w.record(2, &[i, j], &s[i][j].intersect(&s[j][i]));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if s[i][j].is_empty() {
                continue;
            }
            for k in 0..n {
                w.record(3, &[i, j, k], &s[i][j].intersect(&s[j][k]).difference(&s[i][k]));
            }
        }
    }
}

fn check_rc(s: &[Vec<BorelSet>], r: &[BorelSet], c: &[BorelSet], full: bool, w: &mut Witnesses<'_>) {
    let n = s.len();
    for i in 0..n {
        for j in 0..n {
            w.record(4, &[i, j], &c[i].intersect(&s[i][j]).difference(&c[j]));
            w.record(5, &[i, j], &s[i][j].intersect(&r[j]).difference(&r[i]));
            if full {
                w.record(6, &[i, j], &r[i].intersect(&c[j]).difference(&s[i][j]));
            }
        }
    }
}

/// Checks axioms 1–3. Reports the first violating cell per (axiom, indices).
pub fn check_triangular(sys: &TriSystem) -> AxiomReport {
    check_triangular_with(sys, false)
}

/// As [`check_triangular`]; `verbose` reports every violating cell.
pub fn check_triangular_with(sys: &TriSystem, verbose: bool) -> AxiomReport {
    let cells = sys.refinement();
    let mut w = Witnesses { cells: &cells, verbose, out: Vec::new() };
    check_s(sys.s_matrix(), &mut w);
    AxiomReport::from_violations(w.out)
}

/// Checks axioms 1–6 (or 1–5 in [`CheckMode::Nearly`]).
pub fn check_extended(sys: &ExtTriSystem, mode: CheckMode) -> AxiomReport {
    check_extended_with(sys, mode, false)
}

pub fn check_extended_with(sys: &ExtTriSystem, mode: CheckMode, verbose: bool) -> AxiomReport {
    let cells = sys.refinement();
    let mut w = Witnesses { cells: &cells, verbose, out: Vec::new() };
    check_s(sys.base().s_matrix(), &mut w);
    if mode != CheckMode::Triangular {
        check_rc(sys.base().s_matrix(), sys.rows(), sys.cols(), mode == CheckMode::Extended, &mut w);
    }
    AxiomReport::from_violations(w.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::rat;
    use crate::tsys::system::IndexTemplate;

    fn half() -> BorelSet {
        BorelSet::interval(rat(0, 1), rat(1, 2)).unwrap()
    }

    fn sys(s: Vec<Vec<BorelSet>>) -> TriSystem {
        TriSystem::new(IndexTemplate::finite(s.len()), s).unwrap()
    }

    #[test]
    fn linear_order_passes() {
        let f = BorelSet::full;
        let e = BorelSet::empty;
        let report = check_triangular(&sys(vec![vec![f(), f()], vec![e(), f()]]));
        assert!(report.passed);
    }

    #[test]
    fn antisymmetry_breach_is_witnessed() {
        let f = BorelSet::full;
        let report = check_triangular(&sys(vec![vec![f(), half()], vec![half(), f()]]));
        assert!(!report.passed);
        assert_eq!(
            report.violations,
            vec![Violation {
                axiom: 2,
                indices: vec![0, 1],
                cell: Interval::new(rat(0, 1), rat(1, 2)).unwrap()
            }]
        );
    }

    #[test]
    fn transitivity_breach_is_witnessed() {
        let f = BorelSet::full;
        let e = BorelSet::empty;
        let report = check_triangular(&sys(vec![
            vec![f(), f(), e()],
            vec![e(), f(), f()],
            vec![e(), e(), f()],
        ]));
        let v: Vec<_> = report.for_axiom(3).collect();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].indices, vec![0, 1, 2]);
        assert_eq!(v[0].cell, Interval::new(rat(0, 1), rat(1, 1)).unwrap());
    }

    #[test]
    fn missing_diagonal_is_axiom_one() {
        let f = BorelSet::full;
        let e = BorelSet::empty;
        let report = check_triangular(&sys(vec![vec![half(), e()], vec![e(), f()]]));
        assert!(report.has_axiom(1));
    }

    #[test]
    fn verbose_mode_lists_every_cell() {
        let f = BorelSet::full;
        let split = BorelSet::from_pairs([(rat(0, 1), rat(1, 4)), (rat(1, 2), rat(3, 4))]).unwrap();
        let s = vec![vec![f(), f()], vec![split, f()]];
        let verbose = check_triangular_with(&sys(s.clone()), true);
        let terse = check_triangular(&sys(s));
        assert_eq!(verbose.for_axiom(2).count(), 2);
        assert_eq!(terse.for_axiom(2).count(), 1);
        assert_eq!(terse.violations[0].cell, Interval::new(rat(0, 1), rat(1, 4)).unwrap());
    }

    #[test]
    fn empty_rows_and_columns_are_vacuous() {
        let f = BorelSet::full;
        let base = sys(vec![vec![f(), half()], vec![half().complement(), f()]]);
        let ext = ExtTriSystem::with_empty_cut(base);
        assert!(check_extended(&ext, CheckMode::Extended).passed);
    }

    #[test]
    fn row_column_compatibility_only_in_extended_mode() {
        let f = BorelSet::full;
        let e = BorelSet::empty;
        let base = sys(vec![vec![f(), f()], vec![e(), f()]]);
        let ext = ExtTriSystem::new(base, vec![f(), f()], vec![f(), f()]).unwrap();
        let full = check_extended(&ext, CheckMode::Extended);
        assert!(!full.passed);
        assert!(full.violations.iter().all(|v| v.axiom == 6 && v.indices == vec![1, 0]));
        assert!(check_extended(&ext, CheckMode::Nearly).passed);
    }
}
