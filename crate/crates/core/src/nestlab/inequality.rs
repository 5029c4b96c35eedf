use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::operator::BlockOperator;
use super::seminorm::{cell_values, compressed_seminorm, BlockSet};

/// Both sides of `i(E_i XY E_j) ≤ Σ_{b<r} i(E_i X E_b)·i(E_b Y E_j)
/// + i(E_i X M_r^⊥)·i(M_r^⊥ Y E_j)` at one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductInequality {
    pub cell: usize,
    pub r: usize,
    pub w_floor: usize,
    pub left: f64,
    /// `i(E_i X E_b)·i(E_b Y E_j)` for `b < r`.
    pub terms: Vec<f64>,
    pub remainder: f64,
    pub right: f64,
    pub holds: bool,
}

/// Slack allowed for rounding when deciding `holds`.
pub const SLACK: f64 = 1e-9;

/// Evaluates both sides. The bound is guaranteed for nest-algebra operators
/// at `w_floor = 1`, where the cell compression of a product is the product
/// of the cell compressions; at wider floors it can fail.
pub fn product_inequality_check(
    x: &BlockOperator,
    y: &BlockOperator,
    i: usize,
    j: usize,
    cell: usize,
    r: usize,
    w_floor: usize,
) -> Result<ProductInequality> {
    let sp = x.space();
    if r >= sp.k {
        return Err(Error::Domain(format!("truncation {r} must be below k = {}", sp.k)));
    }
    let xy = x * y;
    let left = compressed_seminorm(&xy, &BlockSet::entry(i, j), cell, w_floor)?;
    let terms = (0..r)
        .map(|b| {
            Ok(compressed_seminorm(x, &BlockSet::entry(i, b), cell, w_floor)?
                * compressed_seminorm(y, &BlockSet::entry(b, j), cell, w_floor)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let tail: Vec<usize> = (r..sp.k).collect();
    let remainder = compressed_seminorm(x, &BlockSet { rows: vec![i], cols: tail.clone() }, cell, w_floor)?
        * compressed_seminorm(y, &BlockSet { rows: tail, cols: vec![j] }, cell, w_floor)?;
    let right = terms.iter().sum::<f64>() + remainder;
    Ok(ProductInequality { cell, r, w_floor, left, terms, remainder, right, holds: left <= right + SLACK })
}

/// `E_i XY E_j` from block row `i` of `X` and block column `j` of `Y`.
fn entry_product(x: &BlockOperator, y: &BlockOperator, i: usize, j: usize) -> Result<BlockOperator> {
    let sp = x.space();
    sp.check_block(i)?;
    sp.check_block(j)?;
    let rows = sp.indices(0..sp.m, &[i]);
    let cols = sp.indices(0..sp.m, &[j]);
    let block = x.matrix().select_rows(rows.iter()) * y.matrix().select_columns(cols.iter());
    let n = sp.dim();
    let mut mat = DMatrix::zeros(n, n);
    for (a, &r) in rows.iter().enumerate() {
        for (b, &c) in cols.iter().enumerate() {
            mat[(r, c)] = block[(a, b)];
        }
    }
    BlockOperator::from_matrix(sp, mat)
}

/// [`product_inequality_check`] at every cell, forming `XY` once.
pub fn product_inequality_cells(
    x: &BlockOperator,
    y: &BlockOperator,
    i: usize,
    j: usize,
    r: usize,
    w_floor: usize,
) -> Result<Vec<ProductInequality>> {
    let sp = x.space();
    if r >= sp.k {
        return Err(Error::Domain(format!("truncation {r} must be below k = {}", sp.k)));
    }
    let left = cell_values(&entry_product(x, y, i, j)?, &BlockSet::entry(i, j), w_floor)?;
    let mut terms = Vec::with_capacity(r);
    for b in 0..r {
        let xs = cell_values(x, &BlockSet::entry(i, b), w_floor)?;
        let ys = cell_values(y, &BlockSet::entry(b, j), w_floor)?;
        terms.push(xs.iter().zip(&ys).map(|(a, b)| a * b).collect::<Vec<f64>>());
    }
    let tail: Vec<usize> = (r..sp.k).collect();
    let xt = cell_values(x, &BlockSet { rows: vec![i], cols: tail.clone() }, w_floor)?;
    let yt = cell_values(y, &BlockSet { rows: tail, cols: vec![j] }, w_floor)?;
    Ok((0..sp.m)
        .map(|q| {
            let terms: Vec<f64> = terms.iter().map(|t| t[q]).collect();
            let remainder = xt[q] * yt[q];
            let right = terms.iter().sum::<f64>() + remainder;
            ProductInequality { cell: q, r, w_floor, left: left[q], terms, remainder, right, holds: left[q] <= right + SLACK }
        })
        .collect())
}
