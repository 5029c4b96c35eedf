//! Window norms and the seminorms built from them.
//!
//! The diagonal seminorm at a cell is the least norm of the compression to a
//! window of whole cells containing it. Windows are at least `w_floor` cells
//! wide; compressing to a sub-window cannot increase the norm, so only
//! windows of width exactly `w_floor` (clipped to the grid) are visited.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borel::Interval;
use crate::error::{Error, Result};

use super::operator::{spectral_norm, BlockOperator};
use super::space::ModelSpace;

/// Row and column blocks of a compression `E_rows X E_cols`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSet {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl BlockSet {
    pub fn all(space: &ModelSpace) -> Self {
        Self { rows: space.all_blocks(), cols: space.all_blocks() }
    }

    /// `E_i X E_j`.
    pub fn entry(i: usize, j: usize) -> Self {
        Self { rows: vec![i], cols: vec![j] }
    }

    /// `E_i X M_n^⊥` with the index itself left out of the tail.
    pub fn row_tail(space: &ModelSpace, i: usize, n: usize) -> Self {
        Self { rows: vec![i], cols: (n..space.k).filter(|&b| b != i).collect() }
    }

    /// `M_n^⊥ X E_j` with the index itself left out of the tail.
    pub fn col_tail(space: &ModelSpace, j: usize, n: usize) -> Self {
        Self { rows: (n..space.k).filter(|&b| b != j).collect(), cols: vec![j] }
    }

    pub fn along(axis: Axis, index: usize, others: Vec<usize>) -> Self {
        match axis {
            Axis::Row => Self { rows: vec![index], cols: others },
            Axis::Col => Self { rows: others, cols: vec![index] },
        }
    }

    fn check(&self, space: &ModelSpace) -> Result<()> {
        for &b in self.rows.iter().chain(&self.cols) {
            space.check_block(b)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Row,
    Col,
}

fn check_window(space: &ModelSpace, s: usize, t: usize) -> Result<()> {
    if s >= t || t > space.m {
        return Err(Error::Domain(format!("window [{s}, {t}) is empty or leaves the {}-cell grid", space.m)));
    }
    Ok(())
}

/// `‖(N_t − N_s) E_rows X E_cols (N_t − N_s)‖` for cells `s..t`.
pub fn compressed_window_norm(x: &BlockOperator, sel: &BlockSet, s: usize, t: usize) -> Result<f64> {
    let sp = x.space();
    check_window(sp, s, t)?;
    sel.check(sp)?;
    Ok(window_norm_unchecked(x, sel, s, t))
}

fn window_norm_unchecked(x: &BlockOperator, sel: &BlockSet, s: usize, t: usize) -> f64 {
    let sp = x.space();
    let rows = sp.indices(s..t, &sel.rows);
    let cols = sp.indices(s..t, &sel.cols);
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let sub = x.matrix().select_rows(rows.iter()).select_columns(cols.iter());
    spectral_norm(&sub)
}

/// Norm of the compression of `x` to cells `s..t`.
pub fn window_norm(x: &BlockOperator, s: usize, t: usize) -> Result<f64> {
    compressed_window_norm(x, &BlockSet::all(x.space()), s, t)
}

fn check_floor(space: &ModelSpace, w_floor: usize) -> Result<()> {
    if w_floor == 0 || w_floor > space.m {
        return Err(Error::Domain(format!("window floor {w_floor} outside 1..={}", space.m)));
    }
    Ok(())
}

/// Starting cells of the width-`w` windows containing `cell`.
fn window_starts(m: usize, cell: usize, w: usize) -> std::ops::RangeInclusive<usize> {
    let lo = (cell + 1).saturating_sub(w);
    let hi = cell.min(m - w);
    lo..=hi
}

/// Diagonal seminorm of `E_rows X E_cols` at `cell`.
pub fn compressed_seminorm(x: &BlockOperator, sel: &BlockSet, cell: usize, w_floor: usize) -> Result<f64> {
    let sp = x.space();
    sp.check_cell(cell)?;
    check_floor(sp, w_floor)?;
    sel.check(sp)?;
    Ok(seminorm_unchecked(x, sel, cell, w_floor))
}

fn seminorm_unchecked(x: &BlockOperator, sel: &BlockSet, cell: usize, w: usize) -> f64 {
    let m = x.space().m;
    let mut best = f64::INFINITY;
    for s in window_starts(m, cell, w) {
        best = best.min(window_norm_unchecked(x, sel, s, s + w));
        if best == 0.0 {
            break;
        }
    }
    best
}

/// Diagonal seminorm of `x` at `cell`.
pub fn diag_seminorm(x: &BlockOperator, cell: usize, w_floor: usize) -> Result<f64> {
    compressed_seminorm(x, &BlockSet::all(x.space()), cell, w_floor)
}

/// [`compressed_seminorm`] at every cell, in cell order.
pub fn cell_values(x: &BlockOperator, sel: &BlockSet, w_floor: usize) -> Result<Vec<f64>> {
    let sp = x.space();
    check_floor(sp, w_floor)?;
    sel.check(sp)?;
    Ok((0..sp.m).into_par_iter().map(|q| seminorm_unchecked(x, sel, q, w_floor)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub cell: Interval,
    /// Truncation index `n` of `M_n^⊥`, for liminal profiles.
    pub truncation: Option<usize>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormProfile {
    pub w_floor: usize,
    pub rows: Vec<ProfileRow>,
}

impl SeminormProfile {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// The last value: the reported liminal seminorm for a truncation
    /// profile.
    pub fn final_value(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.value)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].value <= w[0].value + tol)
    }

    /// `cell_lo,cell_hi,value,truncation` with exact endpoints.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell_lo,cell_hi,value,truncation\n");
        for r in &self.rows {
            let t = r.truncation.map(|n| n.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", r.cell.lo(), r.cell.hi(), r.value, t));
        }
        out
    }

    pub fn append(&mut self, other: SeminormProfile) {
        self.rows.extend(other.rows);
    }
}

/// Per-cell profile of `E_rows X E_cols`.
pub fn cell_profile(x: &BlockOperator, sel: &BlockSet, w_floor: usize) -> Result<SeminormProfile> {
    let vals = cell_values(x, sel, w_floor)?;
    let sp = x.space();
    let rows = vals
        .into_iter()
        .enumerate()
        .map(|(q, value)| ProfileRow { cell: sp.cell_interval(q), truncation: None, value })
        .collect();
    Ok(SeminormProfile { w_floor, rows })
}

fn need_truncation(space: &ModelSpace) -> Result<()> {
    if space.k < 2 {
        return Err(Error::InsufficientTruncation(format!(
            "liminal seminorms need at least two blocks (k = {})",
            space.k
        )));
    }
    Ok(())
}

/// Truncation profile `n ↦ i(E_i X M_n^⊥)` (row) or `i(M_n^⊥ X E_j)`
/// (column) for `n = 1..k−1` at one cell. The final entry is the liminal
/// seminorm.
pub fn liminal(x: &BlockOperator, axis: Axis, index: usize, cell: usize, w_floor: usize) -> Result<SeminormProfile> {
    let sp = x.space();
    need_truncation(sp)?;
    sp.check_block(index)?;
    sp.check_cell(cell)?;
    check_floor(sp, w_floor)?;
    let rows = (1..sp.k)
        .map(|n| {
            let sel = match axis {
                Axis::Row => BlockSet::row_tail(sp, index, n),
                Axis::Col => BlockSet::col_tail(sp, index, n),
            };
            ProfileRow {
                cell: sp.cell_interval(cell),
                truncation: Some(n),
                value: seminorm_unchecked(x, &sel, cell, w_floor),
            }
        })
        .collect();
    Ok(SeminormProfile { w_floor, rows })
}

/// Liminal seminorm at every cell, in cell order.
pub fn liminal_values(x: &BlockOperator, axis: Axis, index: usize, w_floor: usize) -> Result<Vec<f64>> {
    let sp = x.space();
    need_truncation(sp)?;
    sp.check_block(index)?;
    let sel = match axis {
        Axis::Row => BlockSet::row_tail(sp, index, sp.k - 1),
        Axis::Col => BlockSet::col_tail(sp, index, sp.k - 1),
    };
    cell_values(x, &sel, w_floor)
}

/// Least seminorm of `E_i X M_S` (row) or `M_S X E_j` (column) over block
/// sets `S` not containing the index with `|S| ≥ s_min`.
///
/// Enlarging `S` cannot lower the value, so only `|S| = s_min` is searched.
/// The search is exact branch and bound, pruned by the largest single-block
/// value already chosen.
pub fn rinf_seminorm(
    x: &BlockOperator,
    axis: Axis,
    index: usize,
    cell: usize,
    s_min: usize,
    w_floor: usize,
) -> Result<f64> {
    let sp = x.space();
    sp.check_block(index)?;
    sp.check_cell(cell)?;
    check_floor(sp, w_floor)?;
    let others: Vec<usize> = (0..sp.k).filter(|&b| b != index).collect();
    if s_min > others.len() {
        return Err(Error::Domain(format!(
            "subset floor {s_min} exceeds the {} blocks available besides index {index}",
            others.len()
        )));
    }
    if s_min == 0 {
        return Ok(0.0);
    }
    let single: Vec<f64> = others
        .iter()
        .map(|&b| seminorm_unchecked(x, &BlockSet::along(axis, index, vec![b]), cell, w_floor))
        .collect();
    // Visit cheap blocks first so good bounds appear early.
    let mut order: Vec<usize> = (0..others.len()).collect();
    order.sort_by(|&a, &b| single[a].total_cmp(&single[b]));
    let mut search = Search { x, axis, index, cell, w_floor, others: &others, single: &single, order: &order, best: f64::INFINITY };
    search.run(0, &mut Vec::with_capacity(s_min), 0.0, s_min);
    Ok(search.best)
}

struct Search<'a> {
    x: &'a BlockOperator,
    axis: Axis,
    index: usize,
    cell: usize,
    w_floor: usize,
    others: &'a [usize],
    single: &'a [f64],
    order: &'a [usize],
    best: f64,
}

impl Search<'_> {
    fn run(&mut self, start: usize, chosen: &mut Vec<usize>, bound: f64, want: usize) {
        if bound >= self.best {
            return;
        }
        if chosen.len() == want {
            let blocks = chosen.iter().map(|&p| self.others[p]).collect();
            let v = seminorm_unchecked(self.x, &BlockSet::along(self.axis, self.index, blocks), self.cell, self.w_floor);
            self.best = self.best.min(v);
            return;
        }
        let left = want - chosen.len();
        for pos in start..=(self.order.len() - left) {
            let p = self.order[pos];
            chosen.push(p);
            self.run(pos + 1, chosen, bound.max(self.single[p]), want);
            chosen.pop();
        }
    }
}
