//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;

use rand::seq::SliceRandom;
use rand::Rng;
use trilab::borel::{rat, BorelSet, Interval, Rational};
use trilab::lemmas::{interval_family, Window};
use trilab::nestlab::{weight, BlockOperator, Link, LinkOperator, ModelSpace, Site, Weight};
use trilab::tsys::{ExtTriSystem, IndexTemplate, OrderKind, TriSystem};

/// Interior cut points drawn from twelfths, at most `max` of them.
pub fn random_points<R: Rng>(rng: &mut R, max: usize) -> Vec<Rational> {
    let n = rng.gen_range(0..=max);
    let mut pts: Vec<Rational> = (0..n).map(|_| rat(rng.gen_range(1..12), 12)).collect();
    pts.sort();
    pts.dedup();
    pts
}

pub fn pieces(points: &[Rational]) -> Vec<Interval> {
    let mut ends = vec![rat(0, 1)];
    ends.extend_from_slice(points);
    ends.push(rat(1, 1));
    ends.windows(2).map(|w| Interval::new(w[0], w[1]).unwrap()).collect()
}

pub fn union_of(pieces: &[Interval], mask: &[bool]) -> BorelSet {
    BorelSet::canonicalize(pieces.iter().zip(mask).filter(|(_, &m)| m).map(|(p, _)| *p))
}

pub fn random_set<R: Rng>(rng: &mut R, pieces: &[Interval], p: f64) -> BorelSet {
    let mask: Vec<bool> = pieces.iter().map(|_| rng.gen_bool(p)).collect();
    union_of(pieces, &mask)
}

pub fn random_kind<R: Rng>(rng: &mut R) -> OrderKind {
    *[OrderKind::Finite, OrderKind::Nat, OrderKind::Int, OrderKind::Rat, OrderKind::WellOrdered]
        .choose(rng)
        .unwrap()
}

fn template(kind: OrderKind, n: usize) -> IndexTemplate {
    if kind == OrderKind::Finite {
        IndexTemplate::finite(n)
    } else {
        IndexTemplate::integers(kind, 1, n)
    }
}

/// Per-piece data of a pointwise-constant extended system.
#[derive(Clone, Debug)]
pub struct PieceOrder {
    pub le: Vec<Vec<bool>>,
    pub a: Vec<bool>,
    pub b: Vec<bool>,
}

/// A random partial order (a sub-order of a random linear order, closed
/// transitively) with a random compatible cut.
pub fn random_piece<R: Rng>(rng: &mut R, n: usize) -> PieceOrder {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pos = vec![0; n];
    for (p, &i) in perm.iter().enumerate() {
        pos[i] = p;
    }
    let density = rng.gen_range(0.0..=1.0);
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            le[i][j] = i == j || (pos[i] < pos[j] && rng.gen_bool(density));
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][m] && le[m][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    let seeds: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    let a: Vec<bool> = (0..n).map(|j| seeds.iter().any(|&s| le[s][j])).collect();
    let below_a: Vec<bool> = (0..n).map(|x| (0..n).all(|y| !a[y] || le[x][y])).collect();
    let low: Vec<usize> = (0..n).filter(|&x| below_a[x] && rng.gen_bool(0.4)).collect();
    let b: Vec<bool> = (0..n).map(|x| low.iter().any(|&s| le[x][s])).collect();
    PieceOrder { le, a, b }
}

pub fn assemble(kind: OrderKind, pieces: &[Interval], orders: &[PieceOrder]) -> ExtTriSystem {
    let n = orders[0].le.len();
    let col = |f: &dyn Fn(&PieceOrder) -> bool| -> BorelSet {
        let mask: Vec<bool> = orders.iter().map(f).collect();
        union_of(pieces, &mask)
    };
    let s: Vec<Vec<BorelSet>> = (0..n).map(|i| (0..n).map(|j| col(&|o| o.le[i][j])).collect()).collect();
    let r = (0..n).map(|i| col(&|o| o.b[i])).collect();
    let c = (0..n).map(|i| col(&|o| o.a[i])).collect();
    ExtTriSystem::new(TriSystem::new(template(kind, n), s).unwrap(), r, c).unwrap()
}

/// A valid extended triangular system of the given size with at most
/// `max_points` interior endpoints.
pub fn random_valid_system<R: Rng>(rng: &mut R, size: usize, max_points: usize) -> ExtTriSystem {
    let pcs = pieces(&random_points(rng, max_points));
    let orders: Vec<PieceOrder> = pcs.iter().map(|_| random_piece(rng, size)).collect();
    let kind = random_kind(rng);
    assemble(kind, &pcs, &orders)
}

/// Either unconstrained random sets or a valid system with a few sets
/// perturbed, so that both passing and failing inputs are common.
pub fn random_any_system<R: Rng>(rng: &mut R, size: usize, max_points: usize) -> ExtTriSystem {
    let points = random_points(rng, max_points);
    let pcs = pieces(&points);
    if rng.gen_bool(0.5) {
        let n = size;
        let s: Vec<Vec<BorelSet>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j && rng.gen_bool(0.9) { BorelSet::full() } else { random_set(rng, &pcs, 0.4) })
                    .collect()
            })
            .collect();
        let r = (0..n).map(|_| random_set(rng, &pcs, 0.3)).collect();
        let c = (0..n).map(|_| random_set(rng, &pcs, 0.3)).collect();
        return ExtTriSystem::new(TriSystem::new(IndexTemplate::finite(n), s).unwrap(), r, c).unwrap();
    }
    let mut orders: Vec<PieceOrder> = pcs.iter().map(|_| random_piece(rng, size)).collect();
    for _ in 0..rng.gen_range(0..3) {
        let o = &mut orders[rng.gen_range(0..pcs.len())];
        let (i, j) = (rng.gen_range(0..size), rng.gen_range(0..size));
        match rng.gen_range(0..3) {
            0 => o.le[i][j] = !o.le[i][j],
            1 => o.a[i] = !o.a[i],
            _ => o.b[i] = !o.b[i],
        }
    }
    assemble(OrderKind::Finite, &pcs, &orders)
}

/// Cells cut out by every endpoint of every set in `sets`.
pub fn brute_cells<'a>(sets: impl IntoIterator<Item = &'a BorelSet>) -> Vec<Interval> {
    let mut pts: BTreeSet<Rational> = [rat(0, 1), rat(1, 1)].into_iter().collect();
    for s in sets {
        for iv in s.intervals() {
            pts.insert(iv.lo());
            pts.insert(iv.hi());
        }
    }
    let pts: Vec<Rational> = pts.into_iter().collect();
    pts.windows(2).map(|w| Interval::new(w[0], w[1]).unwrap()).collect()
}

pub type Key = (u8, Vec<usize>, Interval);

/// Every `(axiom, indices, cell)` failure, found by evaluating each axiom
/// at the midpoint of each cell. `axioms` bounds which are checked (3, 5
/// or 6).
pub fn oracle_violations(sys: &ExtTriSystem, axioms: u8) -> BTreeSet<Key> {
    let n = sys.size();
    let mut out = BTreeSet::new();
    for cell in brute_cells(sys.all_sets()) {
        let x = cell.midpoint();
        let s = |i: usize, j: usize| sys.s(i, j).contains_point(x);
        let r = |i: usize| sys.r(i).contains_point(x);
        let c = |i: usize| sys.c(i).contains_point(x);
        let mut fail = |axiom: u8, idx: Vec<usize>| {
            out.insert((axiom, idx, cell));
        };
        for i in 0..n {
            if !s(i, i) {
                fail(1, vec![i]);
            }
            for j in (i + 1)..n {
                if s(i, j) && s(j, i) {
                    fail(2, vec![i, j]);
                }
            }
            for j in 0..n {
                for k in 0..n {
                    if s(i, j) && s(j, k) && !s(i, k) {
                        fail(3, vec![i, j, k]);
                    }
                }
                if axioms >= 5 {
                    if c(i) && s(i, j) && !c(j) {
                        fail(4, vec![i, j]);
                    }
                    if s(i, j) && r(j) && !r(i) {
                        fail(5, vec![i, j]);
                    }
                }
                if axioms >= 6 && r(i) && c(j) && !s(i, j) {
                    fail(6, vec![i, j]);
                }
            }
        }
    }
    out
}

/// Merges adjacent cells so that a failure set can be compared with one
/// computed on a coarser partition: each key is expanded to the brute cells
/// it covers.
pub fn expand(keys: impl IntoIterator<Item = Key>, cells: &[Interval]) -> BTreeSet<Key> {
    let mut out = BTreeSet::new();
    for (a, idx, cell) in keys {
        for c in cells {
            if c.within(&cell) {
                out.insert((a, idx.clone(), *c));
            }
        }
    }
    out
}

/// Whether every pointwise cut of a valid extended system is maximal:
/// linear order, `A ∪ B` everything, and either `A ∩ B ≠ ∅` or (when
/// `truncated`) a cut shape the ambient order has.
pub fn oracle_maximal(sys: &ExtTriSystem, truncated: bool) -> bool {
    let n = sys.size();
    let kind = sys.template().kind;
    brute_cells(sys.all_sets()).into_iter().all(|cell| {
        let x = cell.midpoint();
        let s = |i: usize, j: usize| sys.s(i, j).contains_point(x);
        let linear = (0..n).all(|i| (0..n).all(|j| s(i, j) || s(j, i)));
        let a: Vec<bool> = (0..n).map(|i| sys.c(i).contains_point(x)).collect();
        let b: Vec<bool> = (0..n).map(|i| sys.r(i).contains_point(x)).collect();
        let covered = (0..n).all(|i| a[i] || b[i]);
        let meet = (0..n).any(|i| a[i] && b[i]);
        let (a_empty, b_empty) = (!a.contains(&true), !b.contains(&true));
        let shape_ok = match kind {
            OrderKind::Finite => false,
            OrderKind::Nat | OrderKind::WellOrdered => a_empty,
            OrderKind::Int => a_empty || b_empty,
            OrderKind::Rat | OrderKind::Mixed => true,
        };
        linear && covered && (meet || (truncated && shape_ok))
    })
}

/// Entrywise inclusion of every set of `small` in the matching set of `big`.
pub fn extends(small: &ExtTriSystem, big: &ExtTriSystem) -> bool {
    let n = small.size();
    (0..n).all(|i| {
        small.r(i).is_subset(big.r(i))
            && small.c(i).is_subset(big.c(i))
            && (0..n).all(|j| small.s(i, j).is_subset(big.s(i, j)))
    })
}

/// Largest singular value via the eigenvalues of `A* A`.
pub fn top_singular(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    gram.symmetric_eigenvalues().iter().fold(0.0f64, |m, &v| m.max(v.max(0.0))).sqrt()
}

/// A nonempty union of grid cells.
pub fn grid_set<R: Rng>(rng: &mut R, m: usize, p: f64) -> (BorelSet, Vec<usize>) {
    let mut cells: Vec<usize> = (0..m).filter(|_| rng.gen_bool(p)).collect();
    if cells.is_empty() {
        cells.push(rng.gen_range(0..m));
    }
    (cells_set(&cells, m), cells)
}

pub fn cells_set(cells: &[usize], m: usize) -> BorelSet {
    BorelSet::canonicalize(cells.iter().map(|&q| Interval::new(rat(q as i64, m as i64), rat(q as i64 + 1, m as i64)).unwrap()))
}

/// Grid cells whose interval meets the open window.
pub fn window_cells(w: &Window, m: usize) -> Vec<usize> {
    (0..m).filter(|&q| rat(q as i64, m as i64) < w.t && w.s < rat(q as i64 + 1, m as i64)).collect()
}

fn diagonal(sp: &ModelSpace, cells: &[usize], block: usize) -> BlockOperator {
    let links = cells
        .iter()
        .flat_map(|&q| (0..sp.c).map(move |ch| Site::new(q, block, ch)))
        .map(|s| Link::unit(s, s))
        .collect();
    LinkOperator::new(sp, links).unwrap().to_operator()
}

pub struct LinkingInstance {
    pub a: Vec<BlockOperator>,
    pub b: Vec<BlockOperator>,
    pub d: Vec<BlockOperator>,
    pub subsets: Vec<Vec<usize>>,
    /// Cell carrying `D_n`.
    pub carrier: Vec<usize>,
}

/// One triple per window of the interval family of a grid set `K` made of
/// at least three pairwise non-adjacent cells (`m ≥ 6`):
/// `A_n = E(W_n ∩ K) E_i`, `B_n = E(W_n) E_j` and `D_n` a single link from
/// `(c_n, j)` to `(c_n, i)` for a random cell `c_n` of `W_n ∩ K`. Windows are
/// split into two round-robin subsets by the parity of their denominator.
pub fn linking_instance<R: Rng>(rng: &mut R, sp: &ModelSpace, q_max: usize) -> LinkingInstance {
    let mut k_cells: Vec<usize> = (0..sp.m).step_by(2).collect();
    k_cells.shuffle(rng);
    k_cells.truncate(rng.gen_range(3..=k_cells.len().max(3)));
    k_cells.sort();
    let k = cells_set(&k_cells, sp.m);
    let fam = interval_family(&k, q_max).unwrap();
    let (i, j) = (0, sp.k - 1);
    let mut inst = LinkingInstance { a: vec![], b: vec![], d: vec![], subsets: vec![vec![], vec![]], carrier: vec![] };
    for w in &fam.windows {
        let cells = window_cells(w, sp.m);
        let in_k: Vec<usize> = cells.iter().copied().filter(|q| k_cells.contains(q)).collect();
        assert!(!in_k.is_empty(), "family window {w:?} misses K");
        let c = *in_k.choose(rng).unwrap();
        let ch = rng.gen_range(0..sp.c);
        inst.subsets[(w.q % 2) as usize].push(inst.a.len());
        inst.a.push(diagonal(sp, &in_k, i));
        inst.b.push(diagonal(sp, &cells, j));
        inst.d.push(LinkOperator::new(sp, vec![Link::unit(Site::new(c, j, ch), Site::new(c, i, ch))]).unwrap().to_operator());
        inst.carrier.push(c);
    }
    inst
}

/// `X` with one isolated link into each site of `K × {i}` from a distinct
/// source outside `K × {i}`, weights of modulus above `a`, plus noise links
/// that avoid `K × {i}`.
pub fn factor_instance<R: Rng>(rng: &mut R, sp: &ModelSpace, k_cells: &[usize], i: usize, a: i64) -> LinkOperator {
    let targets: Vec<Site> = k_cells.iter().flat_map(|&q| (0..sp.c).map(move |ch| Site::new(q, i, ch))).collect();
    let mut sources: Vec<Site> = (0..sp.dim()).map(|n| sp.site(n)).filter(|s| !targets.contains(s)).collect();
    sources.shuffle(rng);
    let mut links = Vec::new();
    for (t, s) in targets.iter().zip(&sources) {
        let mut w = weight(0, 0);
        while w.norm_sqr() <= weight(a * a, 0).re {
            w = weight(rng.gen_range(-3 * a..=3 * a), rng.gen_range(-3 * a..=3 * a));
        }
        links.push(Link::new(*s, *t, w));
    }
    for _ in 0..sp.dim() {
        let from = sp.site(rng.gen_range(0..sp.dim()));
        let to = sp.site(rng.gen_range(0..sp.dim()));
        if !targets.contains(&to) {
            links.push(Link::new(from, to, weight(rng.gen_range(-4..=4), rng.gen_range(-4..=4))));
        }
    }
    LinkOperator::new(sp, links).unwrap()
}

/// Exact sparse product `lhs · rhs` as a map `(from, to) → weight`.
pub fn sparse_product(lhs: &[Link], rhs: &[Link]) -> BTreeMap<(Site, Site), Weight> {
    let mut out: BTreeMap<(Site, Site), Weight> = BTreeMap::new();
    for r in rhs {
        for l in lhs.iter().filter(|l| l.from == r.to) {
            let e = out.entry((r.from, l.to)).or_insert_with(|| weight(0, 0));
            *e = &*e + &l.weight * &r.weight;
        }
    }
    out.retain(|_, w| *w != weight(0, 0));
    out
}

/// A nearly orthogonal sequence: each operator is a random 2×2 block of norm
/// at most one on a random pair of basis rows and columns, plus dense noise
/// with entries below `noise`.
pub fn sub_sum_instance<R: Rng>(rng: &mut R, sp: &ModelSpace, len: usize, noise: f64) -> Vec<BlockOperator> {
    let n = sp.dim();
    let draw = |rng: &mut R, scale: f64| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut mat = DMatrix::from_fn(n, n, |_, _| draw(rng, noise));
        let block = DMatrix::from_fn(2, 2, |_, _| draw(rng, 1.0));
        let block = block.unscale(top_singular(&block).max(1.0));
        let rows = rand::seq::index::sample(rng, n, 2).into_vec();
        let cols = rand::seq::index::sample(rng, n, 2).into_vec();
        for a in 0..2 {
            for b in 0..2 {
                mat[(rows[a], cols[b])] += block[(a, b)];
            }
        }
        out.push(BlockOperator::from_matrix(sp, mat).unwrap());
    }
    out
}
