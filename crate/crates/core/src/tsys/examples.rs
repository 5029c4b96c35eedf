//! Ready-made maximal systems: constant orders on `ℕ`, `ℤ`, a well-ordered
//! set and `ℚ` with each of their cut types, a grid-approximate mixture of
//! all four, and the (non-extended) upper-triangular system on `ℤ` with full
//! rows and columns.

use serde::{Deserialize, Serialize};

use crate::borel::{rat, BorelSet, Interval, Rational, RefinementPartition};
use crate::error::{Error, Result};

use super::system::{ExtTriSystem, IndexTemplate, OrderKind, TriSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleKind {
    Nat,
    Int,
    WellOrdered,
    Cantor,
    Mixed,
}

/// Which maximal cut to install.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutCase {
    /// `A = ∅`, `B` = everything.
    AEmpty,
    /// `A` = everything, `B = ∅`.
    BEmpty,
    /// `A = [label, ∞)`, `B = (−∞, label]`.
    At(#[serde(with = "crate::borel::rational_pair")] Rational),
    /// `A = (γ, ∞)`, `B = (−∞, γ)` for `γ` strictly between labels.
    Gap(#[serde(with = "crate::borel::rational_pair")] Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub kind: ExampleKind,
    /// Number of represented indices.
    pub size: usize,
    /// Ignored by [`ExampleKind::Mixed`], which cycles through cuts.
    pub cut: CutCase,
    /// Grid cells for [`ExampleKind::Mixed`]; each is split into one
    /// sub-cell per constituent order.
    pub resolution: usize,
}

impl ExampleSpec {
    pub fn new(kind: ExampleKind, size: usize, cut: CutCase) -> Self {
        Self { kind, size, cut, resolution: 8 }
    }

    pub fn mixed(size: usize, resolution: usize) -> Self {
        Self { kind: ExampleKind::Mixed, size, cut: CutCase::AEmpty, resolution }
    }

    pub fn template(&self) -> IndexTemplate {
        let n = self.size;
        match self.kind {
            ExampleKind::Nat => IndexTemplate::integers(OrderKind::Nat, 1, n),
            ExampleKind::Int => IndexTemplate::integers(OrderKind::Int, -((n as i64) / 2), n),
            ExampleKind::WellOrdered => IndexTemplate::integers(OrderKind::WellOrdered, 0, n),
            ExampleKind::Cantor => IndexTemplate {
                kind: OrderKind::Rat,
                size: n,
                labels: (1..=n as i64).map(|p| rat(p, n as i64 + 1)).collect(),
            },
            ExampleKind::Mixed => IndexTemplate::integers(OrderKind::Mixed, 1, n),
        }
    }
}

/// Order type of one constituent of the mixed example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constituent {
    Nat,
    Int,
    WellOrdered,
    Rat,
}

impl Constituent {
    pub const ALL: [Constituent; 4] =
        [Constituent::Nat, Constituent::Int, Constituent::WellOrdered, Constituent::Rat];

    /// Sort keys for indices `1..=size` realizing this order type on `ℕ`.
    ///
    /// `Int` uses the zigzag `1, 2, 3, 4, 5, … ↦ 0, 1, −1, 2, −2, …`; the
    /// well-ordered constituent is `ω·2` (odd numbers, then even numbers);
    /// `Rat` is the Calkin–Wilf enumeration of the positive rationals.
    pub fn keys(self, size: usize) -> Vec<Rational> {
        let ns = 1..=size as i64;
        match self {
            Constituent::Nat => ns.map(Rational::from_integer).collect(),
            Constituent::Int => ns
                .map(|n| Rational::from_integer(if n % 2 == 0 { n / 2 } else { -(n - 1) / 2 }))
                .collect(),
            Constituent::WellOrdered => ns
                .map(|n| {
                    let copy = if n % 2 == 1 { 1 } else { 2 };
                    Rational::from_integer(copy) - rat(1, n + 1)
                })
                .collect(),
            Constituent::Rat => {
                let mut q = Rational::from_integer(1);
                let mut out = Vec::with_capacity(size);
                for _ in 0..size {
                    out.push(q);
                    let two_floor = Rational::from_integer(2 * q.floor().to_integer());
                    q = (two_floor - q + Rational::from_integer(1)).recip();
                }
                out
            }
        }
    }

    /// The ambient order's maximal cuts visible on the represented keys, in
    /// a fixed enumeration.
    pub fn cuts(self, keys: &[Rational]) -> Vec<CutCase> {
        let mut sorted = keys.to_vec();
        sorted.sort();
        let mut out = vec![CutCase::AEmpty];
        if matches!(self, Constituent::Int | Constituent::Rat) {
            out.push(CutCase::BEmpty);
        }
        out.extend(sorted.iter().map(|&k| CutCase::At(k)));
        if self == Constituent::Rat {
            out.extend(sorted.windows(2).map(|w| CutCase::Gap((w[0] + w[1]) / 2)));
        }
        out
    }
}

/// Membership of an index with key `key` in `(A, B)` for a cut.
fn sides(cut: CutCase, key: Rational) -> (bool, bool) {
    match cut {
        CutCase::AEmpty => (false, true),
        CutCase::BEmpty => (true, false),
        CutCase::At(p) => (key >= p, key <= p),
        CutCase::Gap(g) => (key > g, key < g),
    }
}

/// A constant-on-pieces system: on each piece, indices are ordered by `keys`
/// and split by `cut`.
fn assemble(template: IndexTemplate, pieces: &[(Interval, Vec<Rational>, CutCase)]) -> ExtTriSystem {
    let n = template.size;
    let mut s = vec![vec![Vec::new(); n]; n];
    let mut r = vec![Vec::new(); n];
    let mut c = vec![Vec::new(); n];
    for (cell, keys, cut) in pieces {
        for i in 0..n {
            for j in 0..n {
                if keys[i] <= keys[j] {
                    s[i][j].push(*cell);
                }
            }
            let (in_a, in_b) = sides(*cut, keys[i]);
            if in_a {
                c[i].push(*cell);
            }
            if in_b {
                r[i].push(*cell);
            }
        }
    }
    let set = |v: Vec<Interval>| BorelSet::canonicalize(v);
    let s = s.into_iter().map(|row| row.into_iter().map(set).collect()).collect();
    let base = TriSystem::new(template, s).expect("square by construction");
    ExtTriSystem::new(base, r.into_iter().map(set).collect(), c.into_iter().map(set).collect())
        .expect("lengths match by construction")
}

fn check_cut(spec: &ExampleSpec, template: &IndexTemplate) -> Result<()> {
    let supported = match (spec.kind, spec.cut) {
        (_, CutCase::AEmpty) => true,
        (ExampleKind::Int | ExampleKind::Cantor, CutCase::BEmpty) => true,
        (_, CutCase::At(p)) => {
            if template.position(p).is_none() {
                return Err(Error::Parameter(format!("cut label {p} is not a represented index")));
            }
            true
        }
        (ExampleKind::Cantor, CutCase::Gap(g)) => {
            let (lo, hi) = (template.labels[0], template.labels[template.size - 1]);
            if template.position(g).is_some() || g <= lo || g >= hi {
                return Err(Error::Parameter(format!(
                    "gap point {g} must lie strictly between labels {lo} and {hi} and not be one"
                )));
            }
            true
        }
        _ => false,
    };
    if supported {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{:?} cut is not available for the {:?} example", spec.cut, spec.kind)))
    }
}

/// Builds the requested example system.
pub fn build_example(spec: &ExampleSpec) -> Result<ExtTriSystem> {
    if spec.size == 0 {
        return Err(Error::Parameter("example needs at least one index".into()));
    }
    let template = spec.template();
    if spec.kind == ExampleKind::Mixed {
        return build_mixed(template, spec.resolution);
    }
    check_cut(spec, &template)?;
    let whole = Interval::new(rat(0, 1), rat(1, 1))?;
    let keys = template.labels.clone();
    Ok(assemble(template, &[(whole, keys, spec.cut)]))
}

/// Every grid cell is split into four sub-cells, one per [`Constituent`];
/// sub-cell `j` of grid cell `g` uses constituent `j` with its `g`-th cut
/// (cyclically).
fn build_mixed(template: IndexTemplate, resolution: usize) -> Result<ExtTriSystem> {
    if resolution == 0 {
        return Err(Error::Parameter("mixed example needs a positive resolution".into()));
    }
    let parts = Constituent::ALL.len();
    let total = (resolution * parts) as i64;
    let sub = RefinementPartition::from_cuts((0..=total).map(|q| rat(q, total)));
    let mut pieces = Vec::with_capacity(sub.len());
    for (n, cell) in sub.cells().iter().enumerate() {
        let (g, part) = (n / parts, Constituent::ALL[n % parts]);
        let keys = part.keys(template.size);
        let cuts = part.cuts(&keys);
        pieces.push((*cell, keys, cuts[g % cuts.len()]));
    }
    Ok(assemble(template, &pieces))
}

/// The upper-triangular system on a window of `ℤ` with every row and column
/// set full. It is nearly triangular but violates `R_i ∩ C_j ⊆ S_ij` for
/// `i > j`.
pub fn nonsimple_system(size: usize) -> Result<ExtTriSystem> {
    let base = upper_triangular_int(size)?;
    ExtTriSystem::new(base, vec![BorelSet::full(); size], vec![BorelSet::full(); size])
}

/// As [`nonsimple_system`] but with empty rows and columns, which is an
/// extended triangular system.
pub fn upper_triangular_empty_cut(size: usize) -> Result<ExtTriSystem> {
    Ok(ExtTriSystem::with_empty_cut(upper_triangular_int(size)?))
}

fn upper_triangular_int(size: usize) -> Result<TriSystem> {
    if size == 0 {
        return Err(Error::Parameter("system needs at least one index".into()));
    }
    let template = IndexTemplate::integers(OrderKind::Int, -((size as i64) / 2), size);
    let s = (0..size)
        .map(|i| (0..size).map(|j| if i <= j { BorelSet::full() } else { BorelSet::empty() }).collect())
        .collect();
    TriSystem::new(template, s)
}
