use serde::{Deserialize, Serialize};

use crate::borel::{BorelSet, Interval, Rational};
use crate::error::{Error, Result};
use crate::tsys::ExtTriSystem;

use super::operator::BlockOperator;
use super::seminorm::{cell_values, liminal_values, Axis, BlockSet};
use super::space::ModelSpace;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub indices: Vec<usize>,
    pub cell: Interval,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub violations: Vec<ConditionViolation>,
    /// Measure of the union of the violating cells.
    #[serde(with = "crate::borel::rational_pair")]
    pub exception_measure: Rational,
}

impl ConditionReport {
    fn from_violations(violations: Vec<ConditionViolation>) -> Self {
        let cells: Vec<Interval> = violations.iter().map(|v| v.cell).collect();
        let exception_measure = BorelSet::from_cells(&cells).measure();
        Self { violations, exception_measure }
    }

    /// Union of the violating cells.
    pub fn region(&self) -> BorelSet {
        BorelSet::from_cells(self.violations.iter().map(|v| &v.cell))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// Largest entry carrying a cell to a later cell.
    pub nest_defect: f64,
    /// `i(E_i X E_j) = 0` off `S_ij`.
    pub condition1: ConditionReport,
    /// Liminal row seminorm of row `i` vanishes off `R_i`.
    pub condition2: ConditionReport,
    /// Liminal column seminorm of column `j` vanishes off `C_j`.
    pub condition3: ConditionReport,
    pub tol: f64,
    #[serde(with = "crate::borel::rational_pair")]
    pub eta: Rational,
    pub w_floor: usize,
    pub member: bool,
}

impl MembershipReport {
    pub fn condition(&self, n: u8) -> &ConditionReport {
        match n {
            1 => &self.condition1,
            2 => &self.condition2,
            3 => &self.condition3,
            _ => panic!("membership conditions are numbered 1 to 3"),
        }
    }
}

fn aligned_cells(space: &ModelSpace, set: &BorelSet) -> Result<Vec<bool>> {
    let inside = space.cells_of(set)?;
    let mut mask = vec![false; space.m];
    for q in inside {
        mask[q] = true;
    }
    Ok(mask)
}

/// Tests `X ∈ 𝒯(S, R, C)` at model scale: values above `tol` count as
/// nonzero, and each condition may fail on cells of total measure at most
/// `eta`. `X` must also leave the nest invariant up to `tol`.
pub fn membership(x: &BlockOperator, sys: &ExtTriSystem, tol: f64, eta: Rational, w_floor: usize) -> Result<MembershipReport> {
    let sp = x.space();
    if sys.size() != sp.k {
        return Err(Error::Shape(format!("system has {} indices but the space has {} blocks", sys.size(), sp.k)));
    }
    let n = sp.k;
    let mut s_mask = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            s_mask.push(aligned_cells(sp, sys.s(i, j))?);
        }
    }
    let r_mask = sys.rows().iter().map(|r| aligned_cells(sp, r)).collect::<Result<Vec<_>>>()?;
    let c_mask = sys.cols().iter().map(|c| aligned_cells(sp, c)).collect::<Result<Vec<_>>>()?;

    let collect = |indices: Vec<usize>, vals: Vec<f64>, allowed: &[bool], out: &mut Vec<ConditionViolation>| {
        for (q, v) in vals.into_iter().enumerate() {
            if !allowed[q] && v > tol {
                out.push(ConditionViolation { indices: indices.clone(), cell: sp.cell_interval(q), value: v });
            }
        }
    };

    let mut c1 = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let allowed = &s_mask[i * n + j];
            if allowed.iter().all(|&a| a) {
                continue;
            }
            collect(vec![i, j], cell_values(x, &BlockSet::entry(i, j), w_floor)?, allowed, &mut c1);
        }
    }
    let (mut c2, mut c3) = (Vec::new(), Vec::new());
    if n >= 2 {
        for i in 0..n {
            if !r_mask[i].iter().all(|&a| a) {
                collect(vec![i], liminal_values(x, Axis::Row, i, w_floor)?, &r_mask[i], &mut c2);
            }
            if !c_mask[i].iter().all(|&a| a) {
                collect(vec![i], liminal_values(x, Axis::Col, i, w_floor)?, &c_mask[i], &mut c3);
            }
        }
    }
    let nest_defect = x.nest_defect();
    let (condition1, condition2, condition3) =
        (ConditionReport::from_violations(c1), ConditionReport::from_violations(c2), ConditionReport::from_violations(c3));
    let member = nest_defect <= tol
        && [&condition1, &condition2, &condition3].iter().all(|c| c.exception_measure <= eta);
    Ok(MembershipReport { nest_defect, condition1, condition2, condition3, tol, eta, w_floor, member })
}

/// Whether the single-cell seminorm of `x` is at most `tol` off a set of
/// cells of measure at most `eta`.
pub fn is_larson_member(x: &BlockOperator, tol: f64, eta: Rational) -> Result<bool> {
    let vals = cell_values(x, &BlockSet::all(x.space()), 1)?;
    let bad = vals.iter().filter(|&&v| v > tol).count();
    Ok(Rational::new(bad as i64, x.space().m as i64) <= eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::rat;
    use crate::nestlab::operator::{project, Selector};
    use crate::tsys::{build_example, CutCase, ExampleKind, ExampleSpec};

    #[test]
    fn diagonal_operators_belong_everywhere() {
        let sys = build_example(&ExampleSpec::new(ExampleKind::Nat, 3, CutCase::AEmpty)).unwrap();
        let sp = ModelSpace::new(4, 3, 2).unwrap();
        let rep = membership(&BlockOperator::identity(&sp), &sys, 1e-9, rat(0, 1), 1).unwrap();
        assert!(rep.member, "{rep:?}");
    }

    #[test]
    fn size_mismatch_and_alignment() {
        let sys = build_example(&ExampleSpec::new(ExampleKind::Nat, 3, CutCase::AEmpty)).unwrap();
        let sp = ModelSpace::new(4, 2, 1).unwrap();
        assert!(matches!(
            membership(&BlockOperator::identity(&sp), &sys, 1e-9, rat(0, 1), 1),
            Err(Error::Shape(_))
        ));
        let mixed = build_example(&ExampleSpec::mixed(3, 8)).unwrap();
        let sp = ModelSpace::new(4, 3, 1).unwrap();
        assert!(matches!(
            membership(&BlockOperator::identity(&sp), &mixed, 1e-9, rat(0, 1), 1),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn larson_examples() {
        let sp = ModelSpace::new(4, 2, 1).unwrap();
        assert!(!is_larson_member(&BlockOperator::identity(&sp), 1e-9, rat(0, 1)).unwrap());
        let half = project(&sp, &Selector::NestPrefix(2)).unwrap();
        assert!(is_larson_member(&half, 1e-9, rat(1, 2)).unwrap());
        assert!(!is_larson_member(&half, 1e-9, rat(1, 4)).unwrap());
    }
}
