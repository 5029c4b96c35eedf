use serde::{Deserialize, Serialize};

use crate::borel::{rat, BorelSet, Interval, RefinementPartition};
use crate::error::{Error, Result};
use crate::tsys::IndexTemplate;

/// Grid cells × blocks × channels. Cell `q` (0-based) is `[q/m, (q+1)/m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpace {
    pub m: usize,
    pub k: usize,
    pub c: usize,
    pub template: IndexTemplate,
}

/// A basis vector `(cell, block, channel)`; serialized as `[q, i, ch]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Site {
    pub cell: usize,
    pub block: usize,
    pub channel: usize,
}

impl Site {
    pub fn new(cell: usize, block: usize, channel: usize) -> Self {
        Self { cell, block, channel }
    }
}

impl From<[usize; 3]> for Site {
    fn from([cell, block, channel]: [usize; 3]) -> Self {
        Self { cell, block, channel }
    }
}

impl From<Site> for [usize; 3] {
    fn from(s: Site) -> Self {
        [s.cell, s.block, s.channel]
    }
}

impl ModelSpace {
    pub fn new(m: usize, k: usize, c: usize) -> Result<Self> {
        if m == 0 || k == 0 || c == 0 {
            return Err(Error::Parameter(format!("model space needs m, k, c >= 1 (got {m}, {k}, {c})")));
        }
        if m > i64::MAX as usize {
            return Err(Error::Parameter("grid too fine".into()));
        }
        Ok(Self { m, k, c, template: IndexTemplate::finite(k) })
    }

    pub fn with_template(mut self, template: IndexTemplate) -> Result<Self> {
        template.validate()?;
        if template.size != self.k {
            return Err(Error::Shape(format!(
                "template has {} indices but the space has {} blocks",
                template.size, self.k
            )));
        }
        self.template = template;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.m * self.k * self.c
    }

    pub fn index(&self, s: Site) -> usize {
        (s.cell * self.k + s.block) * self.c + s.channel
    }

    pub fn site(&self, index: usize) -> Site {
        Site {
            cell: index / (self.k * self.c),
            block: (index / self.c) % self.k,
            channel: index % self.c,
        }
    }

    pub fn contains(&self, s: Site) -> bool {
        s.cell < self.m && s.block < self.k && s.channel < self.c
    }

    pub fn check_site(&self, s: Site) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "site {:?} outside the {}×{}×{} space",
                [s.cell, s.block, s.channel],
                self.m,
                self.k,
                self.c
            )))
        }
    }

    pub fn check_block(&self, i: usize) -> Result<()> {
        if i < self.k {
            Ok(())
        } else {
            Err(Error::Domain(format!("block {i} out of range (k = {})", self.k)))
        }
    }

    pub fn check_cell(&self, q: usize) -> Result<()> {
        if q < self.m {
            Ok(())
        } else {
            Err(Error::Domain(format!("cell {q} out of range (m = {})", self.m)))
        }
    }

    pub fn grid(&self) -> RefinementPartition {
        RefinementPartition::grid(self.m)
    }

    pub fn cell_interval(&self, q: usize) -> Interval {
        let m = self.m as i64;
        Interval::new(rat(q as i64, m), rat(q as i64 + 1, m)).expect("cell inside [0,1)")
    }

    /// Cells of the grid contained in `set`, or an alignment error if `set`
    /// is not a union of whole cells.
    pub fn cells_of(&self, set: &BorelSet) -> Result<Vec<usize>> {
        let grid = self.grid();
        if !grid.resolves(set) {
            return Err(Error::Alignment(format!("{set} is not a union of cells of the {}-cell grid", self.m)));
        }
        Ok(grid.cells_in(set))
    }

    /// Basis indices with cell in `cells` and block in `blocks`, in basis
    /// order.
    pub fn indices(&self, cells: impl IntoIterator<Item = usize>, blocks: &[usize]) -> Vec<usize> {
        let mut blocks = blocks.to_vec();
        blocks.sort_unstable();
        blocks.dedup();
        let mut out = Vec::new();
        for q in cells {
            for &b in &blocks {
                for ch in 0..self.c {
                    out.push(self.index(Site::new(q, b, ch)));
                }
            }
        }
        out
    }

    pub fn all_blocks(&self) -> Vec<usize> {
        (0..self.k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let sp = ModelSpace::new(5, 3, 2).unwrap();
        for n in 0..sp.dim() {
            assert_eq!(sp.index(sp.site(n)), n);
        }
        assert_eq!(sp.index(Site::new(1, 2, 1)), ((1 * 3) + 2) * 2 + 1);
    }

    #[test]
    fn misaligned_sets_are_rejected() {
        let sp = ModelSpace::new(4, 1, 1).unwrap();
        let aligned = BorelSet::interval(rat(1, 4), rat(3, 4)).unwrap();
        assert_eq!(sp.cells_of(&aligned).unwrap(), vec![1, 2]);
        let off = BorelSet::interval(rat(1, 3), rat(1, 2)).unwrap();
        assert!(matches!(sp.cells_of(&off), Err(Error::Alignment(_))));
    }

    #[test]
    fn zero_sizes_are_parameter_errors() {
        assert!(ModelSpace::new(0, 1, 1).is_err());
        assert!(ModelSpace::new(2, 2, 2).unwrap().with_template(IndexTemplate::finite(3)).is_err());
    }
}
