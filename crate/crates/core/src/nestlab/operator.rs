use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::borel::BorelSet;
use crate::error::{Error, Result};

use super::space::{ModelSpace, Site};

/// Exact complex weight of a link.
pub type Weight = Complex<BigRational>;

pub fn weight(re: i64, im: i64) -> Weight {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn unit() -> Weight {
    Complex::new(BigRational::one(), BigRational::zero())
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn weight_to_c64(w: &Weight) -> Complex64 {
    Complex64::new(to_f64(&w.re), to_f64(&w.im))
}

/// Exact conversion of a finite float (every finite `f64` is a dyadic
/// rational).
pub fn weight_from_f64(re: f64, im: f64) -> Result<Weight> {
    let conv = |x: f64| {
        BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("weight component {x} is not finite")))
    };
    Ok(Complex::new(conv(re)?, conv(im)?))
}

/// `|w|² > a²` evaluated exactly (`a` is converted exactly).
pub fn modulus_exceeds(w: &Weight, a: f64) -> bool {
    match BigRational::from_float(a) {
        Some(a) if !a.is_negative() => w.norm_sqr() > &a * &a,
        Some(_) => true,
        None => false,
    }
}

/// `X e_from = weight · e_to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub from: Site,
    pub to: Site,
    pub weight: Weight,
}

impl Link {
    pub fn new(from: Site, to: Site, weight: Weight) -> Self {
        Self { from, to, weight }
    }

    pub fn unit(from: Site, to: Site) -> Self {
        Self::new(from, to, unit())
    }

    /// Cells spanned by the link, as a count (`1` for a within-cell link).
    pub fn cell_span(&self) -> usize {
        self.from.cell.abs_diff(self.to.cell) + 1
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    from: Site,
    to: Site,
    re: f64,
    im: f64,
}

/// Sparse operator given by an exact weighted link list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkOperator {
    space: ModelSpace,
    links: Vec<Link>,
}

impl LinkOperator {
    pub fn new(space: &ModelSpace, links: Vec<Link>) -> Result<Self> {
        for l in &links {
            space.check_site(l.from)?;
            space.check_site(l.to)?;
        }
        Ok(Self { space: space.clone(), links }.canonical())
    }

    pub fn zero(space: &ModelSpace) -> Self {
        Self { space: space.clone(), links: Vec::new() }
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Merges links with equal endpoints, drops zero weights and sorts by
    /// `(from, to)`.
    fn canonical(mut self) -> Self {
        let mut acc: BTreeMap<(Site, Site), Weight> = BTreeMap::new();
        for l in self.links.drain(..) {
            let e = acc.entry((l.from, l.to)).or_insert_with(Weight::zero);
            *e = &*e + &l.weight;
        }
        self.links = acc
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|((from, to), weight)| Link { from, to, weight })
            .collect();
        self
    }

    /// `self · rhs`, exactly.
    pub fn compose(&self, rhs: &LinkOperator) -> Result<LinkOperator> {
        if self.space != rhs.space {
            return Err(Error::Shape("operators live on different model spaces".into()));
        }
        let mut by_from: BTreeMap<Site, Vec<&Link>> = BTreeMap::new();
        for l in &self.links {
            by_from.entry(l.from).or_default().push(l);
        }
        let mut out = Vec::new();
        for r in &rhs.links {
            if let Some(ls) = by_from.get(&r.to) {
                for l in ls {
                    out.push(Link { from: r.from, to: l.to, weight: &l.weight * &r.weight });
                }
            }
        }
        Ok(Self { space: self.space.clone(), links: out }.canonical())
    }

    pub fn sum(&self, rhs: &LinkOperator) -> Result<LinkOperator> {
        if self.space != rhs.space {
            return Err(Error::Shape("operators live on different model spaces".into()));
        }
        let links = self.links.iter().chain(&rhs.links).cloned().collect();
        Ok(Self { space: self.space.clone(), links }.canonical())
    }

    pub fn adjoint(&self) -> LinkOperator {
        let links = self
            .links
            .iter()
            .map(|l| Link { from: l.to, to: l.from, weight: l.weight.conj() })
            .collect();
        Self { space: self.space.clone(), links }.canonical()
    }

    /// The links satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Link) -> bool) -> LinkOperator {
        let links = self.links.iter().filter(|l| keep(l)).cloned().collect();
        Self { space: self.space.clone(), links }
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.space.dim();
        let mut mat = DMatrix::zeros(n, n);
        for l in &self.links {
            mat[(self.space.index(l.to), self.space.index(l.from))] += weight_to_c64(&l.weight);
        }
        mat
    }

    pub fn to_operator(&self) -> BlockOperator {
        BlockOperator { space: self.space.clone(), mat: self.to_matrix(), links: Some(self.clone()) }
    }

    /// Fixture JSON: `[{"from": [q,i,ch], "to": [q,i,ch], "re": .., "im": ..}]`.
    pub fn to_json(&self) -> String {
        let docs: Vec<LinkDoc> = self
            .links
            .iter()
            .map(|l| {
                let w = weight_to_c64(&l.weight);
                LinkDoc { from: l.from, to: l.to, re: w.re, im: w.im }
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("links serialize")
    }

    pub fn from_json(space: &ModelSpace, text: &str) -> Result<LinkOperator> {
        let docs: Vec<LinkDoc> = serde_json::from_str(text).map_err(|e| {
            Error::InvalidInput(format!("fixture JSON at line {}, column {}: {e}", e.line(), e.column()))
        })?;
        let links = docs
            .into_iter()
            .map(|d| Ok(Link { from: d.from, to: d.to, weight: weight_from_f64(d.re, d.im)? }))
            .collect::<Result<Vec<_>>>()?;
        LinkOperator::new(space, links)
    }
}

/// Dense operator on a model space. Operators built from link lists keep
/// the exact list alongside the matrix; arithmetic drops it.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    space: ModelSpace,
    mat: DMatrix<Complex64>,
    links: Option<LinkOperator>,
}

impl BlockOperator {
    pub fn zeros(space: &ModelSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), mat: DMatrix::zeros(n, n), links: None }
    }

    pub fn identity(space: &ModelSpace) -> Self {
        let n = space.dim();
        Self { space: space.clone(), mat: DMatrix::identity(n, n), links: None }
    }

    pub fn from_matrix(space: &ModelSpace, mat: DMatrix<Complex64>) -> Result<Self> {
        let n = space.dim();
        if mat.shape() != (n, n) {
            return Err(Error::Shape(format!("matrix is {:?}, space needs {n}×{n}", mat.shape())));
        }
        Ok(Self { space: space.clone(), mat, links: None })
    }

    pub fn from_links(links: &LinkOperator) -> Self {
        links.to_operator()
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// The exact link list, for operators built from one.
    pub fn links(&self) -> Option<&LinkOperator> {
        self.links.as_ref()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            mat: self.mat.adjoint(),
            links: self.links.as_ref().map(LinkOperator::adjoint),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self { space: self.space.clone(), mat: &self.mat * z, links: None }
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.mat)
    }

    /// `E_rows X E_cols` for sets of blocks, as a full-size operator.
    pub fn compress(&self, row_blocks: &[usize], col_blocks: &[usize]) -> Self {
        let sp = &self.space;
        let n = sp.dim();
        let mat = DMatrix::from_fn(n, n, |r, c| {
            if row_blocks.contains(&sp.site(r).block) && col_blocks.contains(&sp.site(c).block) {
                self.mat[(r, c)]
            } else {
                Complex64::zero()
            }
        });
        Self { space: sp.clone(), mat, links: None }
    }

    /// Largest modulus of an entry mapping a cell to a strictly later cell,
    /// i.e. the distance from leaving every `N_t` invariant.
    pub fn nest_defect(&self) -> f64 {
        let sp = &self.space;
        let n = sp.dim();
        let mut worst = 0.0f64;
        for c in 0..n {
            let from = sp.site(c).cell;
            for r in 0..n {
                if sp.site(r).cell > from {
                    worst = worst.max(self.mat[(r, c)].norm());
                }
            }
        }
        worst
    }

    fn same_space(&self, rhs: &Self) {
        assert_eq!(self.space, rhs.space, "operators live on different model spaces");
    }
}

impl Mul for &BlockOperator {
    type Output = BlockOperator;

    fn mul(self, rhs: &BlockOperator) -> BlockOperator {
        self.same_space(rhs);
        BlockOperator { space: self.space.clone(), mat: &self.mat * &rhs.mat, links: None }
    }
}

impl Add for &BlockOperator {
    type Output = BlockOperator;

    fn add(self, rhs: &BlockOperator) -> BlockOperator {
        self.same_space(rhs);
        BlockOperator { space: self.space.clone(), mat: &self.mat + &rhs.mat, links: None }
    }
}

impl Sub for &BlockOperator {
    type Output = BlockOperator;

    fn sub(self, rhs: &BlockOperator) -> BlockOperator {
        self.same_space(rhs);
        BlockOperator { space: self.space.clone(), mat: &self.mat - &rhs.mat, links: None }
    }
}

/// Largest singular value (0 for an empty matrix).
pub fn spectral_norm(mat: &DMatrix<Complex64>) -> f64 {
    if mat.is_empty() || mat.iter().all(|z| z.is_zero()) {
        return 0.0;
    }
    let svd = mat.clone().try_svd(false, false, 1e-12, 0).expect("SVD converges without an iteration cap");
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// Named projections and partial isometries of the model space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    /// `N_{q/m}`: the first `q` cells.
    NestPrefix(usize),
    /// `E_i`.
    Block(usize),
    /// `E_{i,j}`: block `j` carried onto block `i`, cell and channel kept.
    BlockPair(usize, usize),
    /// `M_n`: blocks `0..n`.
    Truncation(usize),
    /// `E(K) E_{i,j}` for a grid-aligned `K`.
    Marker { set: BorelSet, i: usize, j: usize },
}

/// Link form of a selector.
pub fn selector_links(space: &ModelSpace, sel: &Selector) -> Result<LinkOperator> {
    let diag = |cells: Vec<usize>, blocks: Vec<usize>| -> Vec<Link> {
        let mut out = Vec::new();
        for &q in &cells {
            for &b in &blocks {
                for ch in 0..space.c {
                    let s = Site::new(q, b, ch);
                    out.push(Link::unit(s, s));
                }
            }
        }
        out
    };
    let pair = |cells: Vec<usize>, i: usize, j: usize| -> Vec<Link> {
        let mut out = Vec::new();
        for &q in &cells {
            for ch in 0..space.c {
                out.push(Link::unit(Site::new(q, j, ch), Site::new(q, i, ch)));
            }
        }
        out
    };
    let links = match sel {
        Selector::NestPrefix(q) => {
            if *q > space.m {
                return Err(Error::Domain(format!("nest prefix {q} exceeds m = {}", space.m)));
            }
            diag((0..*q).collect(), space.all_blocks())
        }
        Selector::Block(i) => {
            space.check_block(*i)?;
            diag((0..space.m).collect(), vec![*i])
        }
        Selector::BlockPair(i, j) => {
            space.check_block(*i)?;
            space.check_block(*j)?;
            pair((0..space.m).collect(), *i, *j)
        }
        Selector::Truncation(n) => {
            if *n > space.k {
                return Err(Error::Domain(format!("truncation {n} exceeds k = {}", space.k)));
            }
            diag((0..space.m).collect(), (0..*n).collect())
        }
        Selector::Marker { set, i, j } => {
            space.check_block(*i)?;
            space.check_block(*j)?;
            pair(space.cells_of(set)?, *i, *j)
        }
    };
    LinkOperator::new(space, links)
}

pub fn project(space: &ModelSpace, sel: &Selector) -> Result<BlockOperator> {
    Ok(selector_links(space, sel)?.to_operator())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::rat;

    fn sp() -> ModelSpace {
        ModelSpace::new(4, 3, 2).unwrap()
    }

    #[test]
    fn nest_prefix_rank() {
        let s = sp();
        assert_eq!(project(&s, &Selector::NestPrefix(0)).unwrap().norm(), 0.0);
        let p = project(&s, &Selector::NestPrefix(3)).unwrap();
        let rank = (0..s.dim()).filter(|&n| p.matrix()[(n, n)].re == 1.0).count();
        assert_eq!(rank, 3 * s.k * s.c);
        assert!(project(&s, &Selector::NestPrefix(5)).is_err());
    }

    #[test]
    fn blocks_resolve_identity() {
        let s = sp();
        let mut total = BlockOperator::zeros(&s);
        for i in 0..s.k {
            total = &total + &project(&s, &Selector::Block(i)).unwrap();
        }
        assert_eq!(total.matrix(), BlockOperator::identity(&s).matrix());
    }

    #[test]
    fn marker_times_adjoint_is_support_projection() {
        let s = sp();
        let set = BorelSet::interval(rat(0, 1), rat(1, 2)).unwrap();
        let mk = selector_links(&s, &Selector::Marker { set: set.clone(), i: 1, j: 2 }).unwrap();
        let prod = mk.compose(&mk.adjoint()).unwrap();
        let mut want = Vec::new();
        for q in 0..2 {
            for ch in 0..s.c {
                let site = Site::new(q, 1, ch);
                want.push(Link::unit(site, site));
            }
        }
        assert_eq!(prod, LinkOperator::new(&s, want).unwrap());
    }

    #[test]
    fn compose_merges_and_cancels() {
        let s = sp();
        let a = Site::new(0, 0, 0);
        let b = Site::new(1, 1, 1);
        let c = Site::new(2, 2, 0);
        let x = LinkOperator::new(&s, vec![Link::new(a, b, weight(2, 0)), Link::new(c, b, weight(-1, 0))]).unwrap();
        let y = LinkOperator::new(&s, vec![Link::new(b, c, weight(3, 0))]).unwrap();
        let yx = y.compose(&x).unwrap();
        assert_eq!(yx.links().len(), 2);
        let dense = y.to_operator().matrix() * x.to_operator().matrix();
        assert_eq!(&yx.to_matrix(), &dense);
        let cancel = LinkOperator::new(&s, vec![Link::new(a, b, weight(1, 0)), Link::new(a, b, weight(-1, 0))]).unwrap();
        assert!(cancel.is_empty());
    }

    #[test]
    fn fixture_json_is_exact() {
        let s = sp();
        let l = LinkOperator::new(
            &s,
            vec![Link::new(Site::new(1, 0, 1), Site::new(0, 2, 0), weight_from_f64(0.1, -2.5).unwrap())],
        )
        .unwrap();
        let back = LinkOperator::from_json(&s, &l.to_json()).unwrap();
        assert_eq!(back, l);
        assert!(LinkOperator::from_json(&s, "[{\"from\":[9,0,0],\"to\":[0,0,0],\"re\":1,\"im\":0}]").is_err());
    }

    #[test]
    fn rank_one_norm() {
        let s = ModelSpace::new(8, 2, 1).unwrap();
        let x = LinkOperator::new(&s, vec![Link::new(Site::new(5, 0, 0), Site::new(2, 1, 0), weight(3, 0))])
            .unwrap()
            .to_operator();
        assert!((x.norm() - 3.0).abs() < 1e-12);
        assert!(modulus_exceeds(&weight(3, 0), 2.999));
        assert!(!modulus_exceeds(&weight(3, 0), 3.0));
    }
}
