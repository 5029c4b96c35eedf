use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::borel::BorelSet;
use crate::error::{Error, Result};
use crate::nestlab::{modulus_exceeds, selector_links, BlockOperator, Link, LinkOperator, Selector, Site, Weight};

/// Factors `A = E(K) E_i` and `B = B E_j` with `A X B = E(K) E_{i,j}`
/// exactly, for an operator given by a link list.
///
/// For each cell `q` of `K` and channel `ch`, `X` must carry some unused
/// site `s` onto `(q, i, ch)` with weight of modulus above `a`, and no other
/// link out of `s` may land in `K × {i}`. `B` then sends `(q, j, ch)` to
/// `s / w`.
pub fn row_column_factors(
    x: &BlockOperator,
    k: &BorelSet,
    i: usize,
    j: usize,
    a: f64,
) -> Result<(BlockOperator, BlockOperator)> {
    let Some(links) = x.links() else {
        return Err(Error::Unsupported("row/column factors need an operator given by links".into()));
    };
    let sp = x.space();
    sp.check_block(i)?;
    sp.check_block(j)?;
    let cells = sp.cells_of(k)?;
    let cell_set: BTreeSet<usize> = cells.iter().copied().collect();
    let in_target = |s: &Site| s.block == i && cell_set.contains(&s.cell);

    let mut hits: BTreeMap<Site, usize> = BTreeMap::new();
    for l in links.links() {
        if in_target(&l.to) {
            *hits.entry(l.from).or_default() += 1;
        }
    }
    let mut used = BTreeSet::new();
    let mut a_links = Vec::new();
    let mut b_links = Vec::new();
    for &q in &cells {
        for ch in 0..sp.c {
            let target = Site::new(q, i, ch);
            let pick = links
                .links()
                .iter()
                .find(|l| l.to == target && !used.contains(&l.from) && hits[&l.from] == 1 && modulus_exceeds(&l.weight, a));
            let Some(l) = pick else {
                return Err(Error::Capacity(format!(
                    "cell {q} {} channel {ch}: no isolated link into block {i} with modulus above {a}",
                    sp.cell_interval(q)
                )));
            };
            used.insert(l.from);
            a_links.push(Link::unit(target, target));
            b_links.push(Link::new(Site::new(q, j, ch), l.from, reciprocal(&l.weight)));
        }
    }
    let a_op = LinkOperator::new(sp, a_links)?;
    let b_op = LinkOperator::new(sp, b_links)?;
    let product = a_op.compose(links)?.compose(&b_op)?;
    let marker = selector_links(sp, &Selector::Marker { set: k.clone(), i, j })?;
    if product != marker {
        return Err(Error::InvalidInput("A X B does not reproduce the marker".into()));
    }
    Ok((a_op.to_operator(), b_op.to_operator()))
}

fn reciprocal(w: &Weight) -> Weight {
    let one = Weight::new(One::one(), Zero::zero());
    one / w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::rat;
    use crate::nestlab::{diag_seminorm, weight, ModelSpace};

    fn window_links(sp: &ModelSpace, cells: &[usize], skip: Option<usize>) -> BlockOperator {
        let mut links = Vec::new();
        for &q in cells {
            if Some(q) == skip {
                continue;
            }
            links.push(Link::new(Site::new(q, 1, 0), Site::new(q, 0, 0), weight(2, 1)));
        }
        LinkOperator::new(sp, links).unwrap().to_operator()
    }

    #[test]
    fn marker_factorization() {
        let sp = ModelSpace::new(8, 2, 1).unwrap();
        let k = BorelSet::interval(rat(1, 4), rat(1, 2)).unwrap();
        let x = window_links(&sp, &[2, 3], None);
        let (a, b) = row_column_factors(&x, &k, 0, 1, 1.0).unwrap();
        let marker = selector_links(&sp, &Selector::Marker { set: k, i: 0, j: 1 }).unwrap().to_operator();
        assert!((&(&(&a * &x) * &b) - &marker).norm() < 1e-12);
        for q in [0, 1, 4, 5, 6, 7] {
            assert_eq!(diag_seminorm(&b, q, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn empty_set_gives_zero_factors() {
        let sp = ModelSpace::new(8, 2, 1).unwrap();
        let x = window_links(&sp, &[2], None);
        let (a, b) = row_column_factors(&x, &BorelSet::empty(), 0, 1, 1.0).unwrap();
        assert_eq!(a.norm(), 0.0);
        assert_eq!(b.norm(), 0.0);
    }

    #[test]
    fn missing_link_and_dense_input() {
        let sp = ModelSpace::new(8, 2, 1).unwrap();
        let k = BorelSet::interval(rat(1, 4), rat(1, 2)).unwrap();
        let x = window_links(&sp, &[2, 3], Some(3));
        let err = row_column_factors(&x, &k, 0, 1, 1.0).unwrap_err();
        assert!(matches!(&err, Error::Capacity(m) if m.contains("cell 3")), "{err}");
        let dense = BlockOperator::identity(&sp);
        assert!(matches!(row_column_factors(&dense, &k, 0, 1, 0.5), Err(Error::Unsupported(_))));
    }
}
