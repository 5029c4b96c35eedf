//! Link-list operators reproducing the constructive witnesses.

use crate::borel::{rat, BorelSet, Interval};
use crate::error::{Error, Result};
use crate::tsys::ExtTriSystem;

use super::operator::{BlockOperator, Link, LinkOperator};
use super::space::{ModelSpace, Site};

#[derive(Clone, Debug, PartialEq)]
pub enum FixtureSpec {
    /// `X = E_i X`, `Y = Y E_j` whose entries all vanish cell by cell while
    /// `E_i XY E_j` has norm one on every width-3 window.
    Nonclosure { i: usize, j: usize },
    /// `T = T E_j` with one unit link per carrier block on each width-2
    /// window meeting `set`; carriers are blocks `0..depth`.
    RinfWitness { set: BorelSet, j: usize, depth: usize },
    /// Upper-triangular on blocks, with a within-cell entry carrying the last
    /// block onto row 0 and cross-cell entries below the block diagonal.
    Nonsimple,
    /// Every within-cell entry the system permits, plus cross-cell entries.
    Member { system: ExtTriSystem },
    /// Within-cell entries on `region` breaking membership condition
    /// `condition` (1, 2 or 3) for entry `(i, j)`, row `i` or column `j`.
    Violator { system: ExtTriSystem, condition: u8, i: usize, j: usize, region: BorelSet },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    Single(LinkOperator),
    Pair(LinkOperator, LinkOperator),
}

impl Fixture {
    pub fn operators(&self) -> Vec<BlockOperator> {
        match self {
            Fixture::Single(x) => vec![x.to_operator()],
            Fixture::Pair(x, y) => vec![x.to_operator(), y.to_operator()],
        }
    }
}

pub fn build_fixture(space: &ModelSpace, spec: &FixtureSpec) -> Result<Fixture> {
    match spec {
        FixtureSpec::Nonclosure { i, j } => {
            let (x, y) = nonclosure(space, *i, *j)?;
            Ok(Fixture::Pair(x, y))
        }
        FixtureSpec::RinfWitness { set, j, depth } => Ok(Fixture::Single(rinf_witness(space, set, *j, *depth)?)),
        FixtureSpec::Nonsimple => Ok(Fixture::Single(nonsimple(space)?)),
        FixtureSpec::Member { system } => Ok(Fixture::Single(member(space, system)?)),
        FixtureSpec::Violator { system, condition, i, j, region } => {
            Ok(Fixture::Single(violator(space, system, *condition, *i, *j, region)?))
        }
    }
}

/// For each window of cells `[s, s+3)` a chain `γ → β → α` on channel `s`:
/// `α = (s, i)`, `β = (s+1, b)`, `γ = (s+2, j)` where `b` is the first block
/// other than `i` and `j` (or `i` when there is none). `X` carries `β` to
/// `α`, `Y` carries `γ` to `β`.
pub fn nonclosure(space: &ModelSpace, i: usize, j: usize) -> Result<(LinkOperator, LinkOperator)> {
    space.check_block(i)?;
    space.check_block(j)?;
    if space.m < 3 {
        return Err(Error::Capacity(format!("nonclosure needs at least 3 cells (m = {})", space.m)));
    }
    let windows = space.m - 2;
    if space.c < windows {
        return Err(Error::Capacity(format!(
            "nonclosure needs one channel per width-3 window: c >= {windows} (c = {})",
            space.c
        )));
    }
    let mid = (0..space.k).find(|&b| b != i && b != j).unwrap_or(i);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for s in 0..windows {
        let alpha = Site::new(s, i, s);
        let beta = Site::new(s + 1, mid, s);
        let gamma = Site::new(s + 2, j, s);
        xs.push(Link::unit(beta, alpha));
        ys.push(Link::unit(gamma, beta));
    }
    Ok((LinkOperator::new(space, xs)?, LinkOperator::new(space, ys)?))
}

/// Physical extent `[min cell, max cell + 1) / m` of a link.
pub fn link_extent(space: &ModelSpace, link: &Link) -> Interval {
    let lo = link.from.cell.min(link.to.cell) as i64;
    let hi = link.from.cell.max(link.to.cell) as i64 + 1;
    let m = space.m as i64;
    Interval::new(rat(lo, m), rat(hi, m)).expect("link cells lie on the grid")
}

/// For each width-2 window `[s, s+2)` meeting `set` and each carrier block
/// `b < depth`, a unit link from `(s+1, j, b)` to `(s, b, 0)`.
pub fn rinf_witness(space: &ModelSpace, set: &BorelSet, j: usize, depth: usize) -> Result<LinkOperator> {
    space.check_block(j)?;
    if depth == 0 {
        return Err(Error::Parameter("rinf witness needs at least one carrier block".into()));
    }
    if space.k < depth {
        return Err(Error::Capacity(format!("rinf witness needs k >= depth = {depth} (k = {})", space.k)));
    }
    if space.c < depth {
        return Err(Error::Capacity(format!(
            "rinf witness needs one source channel per carrier: c >= {depth} (c = {})",
            space.c
        )));
    }
    if space.m < 2 {
        return Err(Error::Capacity("rinf witness needs at least 2 cells".into()));
    }
    let cells = space.cells_of(set)?;
    let mut links = Vec::new();
    for s in 0..space.m - 1 {
        if !(cells.contains(&s) || cells.contains(&(s + 1))) {
            continue;
        }
        for b in 0..depth {
            links.push(Link::unit(Site::new(s + 1, j, b), Site::new(s, b, 0)));
        }
    }
    LinkOperator::new(space, links)
}

/// Within each cell, channel 0 of the last block is carried onto block 0;
/// across neighbouring cells, channel `1 mod c` of block 0 is carried onto
/// the last block one cell earlier.
pub fn nonsimple(space: &ModelSpace) -> Result<LinkOperator> {
    if space.k < 2 || space.m < 2 {
        return Err(Error::Capacity(format!(
            "nonsimple fixture needs k >= 2 and m >= 2 (k = {}, m = {})",
            space.k, space.m
        )));
    }
    let last = space.k - 1;
    let ch = 1 % space.c;
    let mut links = Vec::new();
    for q in 0..space.m {
        links.push(Link::unit(Site::new(q, last, 0), Site::new(q, 0, 0)));
        if q > 0 {
            links.push(Link::unit(Site::new(q, 0, ch), Site::new(q - 1, last, ch)));
        }
    }
    LinkOperator::new(space, links)
}

fn check_system(space: &ModelSpace, sys: &ExtTriSystem) -> Result<()> {
    if sys.size() != space.k {
        return Err(Error::Shape(format!("system has {} indices but the space has {} blocks", sys.size(), space.k)));
    }
    Ok(())
}

/// Within-cell links `(q, j) → (q, i)` on channel 0 wherever the cell lies
/// in `S_ij` (and in `R_i` when `j` is the last block, in `C_j` when `i` is),
/// plus unit links from each cell to the previous one on every block.
pub fn member(space: &ModelSpace, sys: &ExtTriSystem) -> Result<LinkOperator> {
    check_system(space, sys)?;
    let n = space.k;
    let last = n - 1;
    let mask = |set: &BorelSet| -> Result<Vec<bool>> {
        let mut v = vec![false; space.m];
        for q in space.cells_of(set)? {
            v[q] = true;
        }
        Ok(v)
    };
    let rows = sys.rows().iter().map(&mask).collect::<Result<Vec<_>>>()?;
    let cols = sys.cols().iter().map(&mask).collect::<Result<Vec<_>>>()?;
    let mut links = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = mask(sys.s(i, j))?;
            for q in 0..space.m {
                let ok = s[q] && (j != last || i == j || rows[i][q]) && (i != last || i == j || cols[j][q]);
                if ok {
                    links.push(Link::unit(Site::new(q, j, 0), Site::new(q, i, 0)));
                }
            }
        }
    }
    for q in 1..space.m {
        for b in 0..n {
            links.push(Link::unit(Site::new(q, b, 0), Site::new(q - 1, b, 0)));
        }
    }
    LinkOperator::new(space, links)
}

/// Within-cell unit links on `region` that break one membership condition:
/// 1: `(q, j) → (q, i)` with `region ⊆ S_ij^c`;
/// 2: `(q, last) → (q, i)` with `region ⊆ R_i^c`;
/// 3: `(q, j) → (q, last)` with `region ⊆ C_j^c`.
pub fn violator(
    space: &ModelSpace,
    sys: &ExtTriSystem,
    condition: u8,
    i: usize,
    j: usize,
    region: &BorelSet,
) -> Result<LinkOperator> {
    check_system(space, sys)?;
    space.check_block(i)?;
    space.check_block(j)?;
    let cells = space.cells_of(region)?;
    if cells.is_empty() {
        return Err(Error::InvalidInput("violation region is empty".into()));
    }
    let last = space.k - 1;
    let (allowed, from, to) = match condition {
        1 => (sys.s(i, j), j, i),
        2 if i != last => (sys.r(i), last, i),
        3 if j != last => (sys.c(j), j, last),
        2 | 3 => {
            return Err(Error::Parameter(format!(
                "the last block has an empty tail, so condition {condition} cannot fail for index {last}"
            )))
        }
        _ => return Err(Error::Parameter(format!("membership conditions are 1, 2 and 3 (got {condition})"))),
    };
    if !region.intersect(allowed).is_empty() {
        return Err(Error::InvalidInput(format!(
            "region {region} meets {allowed}, where condition {condition} permits the entry"
        )));
    }
    let links = cells.into_iter().map(|q| Link::unit(Site::new(q, from, 0), Site::new(q, to, 0))).collect();
    LinkOperator::new(space, links)
}
