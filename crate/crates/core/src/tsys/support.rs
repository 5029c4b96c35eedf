//! Reading a set system off a family of operators.

use crate::borel::{BorelSet, Interval};
use crate::error::{Error, Result};
use crate::nestlab::{cell_values, liminal_values, Axis, BlockOperator, BlockSet, ModelSpace};

use super::check::{check_extended, AxiomReport, CheckMode};
use super::system::{ExtTriSystem, TriSystem};

/// A system derived from operators, with its nearly-triangular check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSystem {
    pub system: ExtTriSystem,
    pub report: AxiomReport,
}

/// `S_ij` is the union over operators `X` and thresholds `a` of the cells
/// where `i(E_i X E_j) ≥ a − tol` (single-cell windows), with `S_ii` forced
/// to `[0,1)`. `R_i` and `C_j` are built the same way from the liminal row
/// and column seminorms.
pub fn derive_support_system(
    space: &ModelSpace,
    ops: &[BlockOperator],
    thresholds: &[f64],
    tol: f64,
) -> Result<SupportSystem> {
    if let Some(bad) = ops.iter().position(|x| x.space() != space) {
        return Err(Error::Shape(format!("operator {bad} lives on a different model space")));
    }
    if let Some(a) = thresholds.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::Domain(format!("thresholds must be positive (got {a})")));
    }
    let floor = thresholds.iter().copied().fold(f64::INFINITY, f64::min) - tol;
    let n = space.k;
    let cells_where = |vals: Vec<f64>, acc: &mut Vec<Interval>| {
        for (q, v) in vals.into_iter().enumerate() {
            if v >= floor {
                acc.push(space.cell_interval(q));
            }
        }
    };
    let mut s = vec![vec![Vec::new(); n]; n];
    let mut r = vec![Vec::new(); n];
    let mut c = vec![Vec::new(); n];
    for x in ops {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    cells_where(cell_values(x, &BlockSet::entry(i, j), 1)?, &mut s[i][j]);
                }
            }
            if n >= 2 {
                cells_where(liminal_values(x, Axis::Row, i, 1)?, &mut r[i]);
                cells_where(liminal_values(x, Axis::Col, i, 1)?, &mut c[i]);
            }
        }
    }
    let s = s
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, cells)| if i == j { BorelSet::full() } else { BorelSet::canonicalize(cells) })
                .collect()
        })
        .collect();
    let base = TriSystem::new(space.template.clone(), s)?;
    let system = ExtTriSystem::new(
        base,
        r.into_iter().map(BorelSet::canonicalize).collect(),
        c.into_iter().map(BorelSet::canonicalize).collect(),
    )?;
    let report = check_extended(&system, CheckMode::Nearly);
    Ok(SupportSystem { system, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_gives_the_trivial_system() {
        let sp = ModelSpace::new(4, 3, 1).unwrap();
        for ops in [vec![BlockOperator::identity(&sp)], vec![]] {
            let out = derive_support_system(&sp, &ops, &[0.5], 1e-9).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(out.system.s(i, j).is_full(), i == j);
                    assert_eq!(out.system.s(i, j).is_empty(), i != j);
                }
                assert!(out.system.r(i).is_empty() && out.system.c(i).is_empty());
            }
            assert!(out.report.passed);
        }
    }

    #[test]
    fn mismatched_space_is_a_shape_error() {
        let sp = ModelSpace::new(4, 3, 1).unwrap();
        let other = ModelSpace::new(4, 3, 2).unwrap();
        let res = derive_support_system(&sp, &[BlockOperator::identity(&other)], &[1.0], 0.0);
        assert!(matches!(res, Err(Error::Shape(_))));
    }
}
