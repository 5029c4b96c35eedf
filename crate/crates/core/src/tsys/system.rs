use serde::{Deserialize, Serialize};

use crate::borel::{self, BorelSet, Rational, RefinementPartition};
use crate::error::{Error, Result};

/// Ambient ordered set that a finite index template truncates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    /// The index set is literally `{1..size}`.
    Finite,
    Nat,
    Int,
    Rat,
    WellOrdered,
    /// Per-cell orders drawn from several of the above (grid-approximate
    /// mixtures).
    Mixed,
}

/// Shape of a cut with `A ∩ B = ∅`, i.e. a cut that points at a missing
/// element of the ambient order rather than at a represented index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VirtualTag {
    None,
    /// `A = ∅`: the point at `+∞`.
    AEmptyAtInfinity,
    /// `B = ∅`: the point at `−∞`.
    BEmptyAtInfinity,
    /// Both sides nonempty with nothing in between (an irrational for `ℚ`).
    Gap,
}

impl OrderKind {
    /// Whether the full (untruncated) ordered set admits a maximal cut of
    /// this shape that is not realized by a represented index.
    pub fn admits(self, tag: VirtualTag) -> bool {
        use VirtualTag::*;
        match (self, tag) {
            (_, None) => false,
            (OrderKind::Finite, _) => false,
            (OrderKind::Nat | OrderKind::WellOrdered, AEmptyAtInfinity) => true,
            (OrderKind::Int, AEmptyAtInfinity | BEmptyAtInfinity) => true,
            (OrderKind::Rat | OrderKind::Mixed, _) => true,
            _ => false,
        }
    }
}

/// Finite window onto an ordered index set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexTemplate {
    pub kind: OrderKind,
    pub size: usize,
    #[serde(with = "borel::rational_list")]
    pub labels: Vec<Rational>,
}

impl IndexTemplate {
    pub fn new(kind: OrderKind, labels: Vec<Rational>) -> Result<Self> {
        let t = Self { kind, size: labels.len(), labels };
        t.validate()?;
        Ok(t)
    }

    /// `{1..size}` with the finite kind.
    pub fn finite(size: usize) -> Self {
        Self::integers(OrderKind::Finite, 1, size)
    }

    /// Consecutive integer labels starting at `first`.
    pub fn integers(kind: OrderKind, first: i64, size: usize) -> Self {
        let labels = (0..size as i64).map(|n| Rational::from_integer(first + n)).collect();
        Self { kind, size, labels }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Shape("index template must have at least one index".into()));
        }
        if self.labels.len() != self.size {
            return Err(Error::Shape(format!(
                "template declares size {} but carries {} labels",
                self.size,
                self.labels.len()
            )));
        }
        if self.labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Shape("template labels must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn position(&self, label: Rational) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }
}

/// Matrix of sets `S` satisfying (ideally) reflexivity, antisymmetry and
/// transitivity pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriSystem {
    template: IndexTemplate,
    s: Vec<Vec<BorelSet>>,
}

impl TriSystem {
    pub fn new(template: IndexTemplate, s: Vec<Vec<BorelSet>>) -> Result<Self> {
        template.validate()?;
        let n = template.size;
        if s.len() != n || s.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "S must be a {n}x{n} matrix of sets (template size {n})"
            )));
        }
        Ok(Self { template, s })
    }

    pub fn template(&self) -> &IndexTemplate {
        &self.template
    }

    pub fn size(&self) -> usize {
        self.template.size
    }

    pub fn s(&self, i: usize, j: usize) -> &BorelSet {
        &self.s[i][j]
    }

    pub fn s_matrix(&self) -> &[Vec<BorelSet>] {
        &self.s
    }

    pub(crate) fn s_mut(&mut self) -> &mut Vec<Vec<BorelSet>> {
        &mut self.s
    }

    pub fn refinement(&self) -> RefinementPartition {
        RefinementPartition::of(self.s.iter().flatten())
    }
}

/// Triangular system together with row sets `R` and column sets `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTriSystem {
    base: TriSystem,
    r: Vec<BorelSet>,
    c: Vec<BorelSet>,
}

impl ExtTriSystem {
    pub fn new(base: TriSystem, r: Vec<BorelSet>, c: Vec<BorelSet>) -> Result<Self> {
        let n = base.size();
        if r.len() != n || c.len() != n {
            return Err(Error::Shape(format!(
                "R and C must have length {n}, got {} and {}",
                r.len(),
                c.len()
            )));
        }
        Ok(Self { base, r, c })
    }

    /// `(S, ∅, ∅)`.
    pub fn with_empty_cut(base: TriSystem) -> Self {
        let n = base.size();
        Self { base, r: vec![BorelSet::empty(); n], c: vec![BorelSet::empty(); n] }
    }

    pub fn base(&self) -> &TriSystem {
        &self.base
    }

    pub fn template(&self) -> &IndexTemplate {
        self.base.template()
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn s(&self, i: usize, j: usize) -> &BorelSet {
        self.base.s(i, j)
    }

    pub fn r(&self, i: usize) -> &BorelSet {
        &self.r[i]
    }

    pub fn c(&self, j: usize) -> &BorelSet {
        &self.c[j]
    }

    pub fn rows(&self) -> &[BorelSet] {
        &self.r
    }

    pub fn cols(&self) -> &[BorelSet] {
        &self.c
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (&mut Vec<Vec<BorelSet>>, &mut Vec<BorelSet>, &mut Vec<BorelSet>) {
        (self.base.s_mut(), &mut self.r, &mut self.c)
    }

    /// Every set of the system, in a fixed order.
    pub fn all_sets(&self) -> impl Iterator<Item = &BorelSet> {
        self.base.s.iter().flatten().chain(self.r.iter()).chain(self.c.iter())
    }

    pub fn refinement(&self) -> RefinementPartition {
        RefinementPartition::of(self.all_sets())
    }

    /// Entrywise inclusion `self ⊆ other`.
    pub fn is_extended_by(&self, other: &ExtTriSystem) -> bool {
        self.size() == other.size()
            && self.all_sets().zip(other.all_sets()).all(|(a, b)| a.is_subset(b))
    }
}

/// On-disk form: `{"template": ..., "S": [[...]], "R": [...], "C": [...]}`.
/// `R` and `C` are optional; a document without them is a plain triangular
/// system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub template: IndexTemplate,
    #[serde(rename = "S")]
    pub s: Vec<Vec<BorelSet>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<BorelSet>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<BorelSet>>,
}

/// A parsed system document: either bare or extended.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySystem {
    Triangular(TriSystem),
    Extended(ExtTriSystem),
}

impl SystemDoc {
    pub fn into_system(self) -> Result<AnySystem> {
        let base = TriSystem::new(self.template, self.s)?;
        match (self.r, self.c) {
            (None, None) => Ok(AnySystem::Triangular(base)),
            (Some(r), Some(c)) => Ok(AnySystem::Extended(ExtTriSystem::new(base, r, c)?)),
            _ => Err(Error::Shape("R and C must be given together".into())),
        }
    }
}

impl From<&TriSystem> for SystemDoc {
    fn from(sys: &TriSystem) -> Self {
        Self { template: sys.template.clone(), s: sys.s.clone(), r: None, c: None }
    }
}

impl From<&ExtTriSystem> for SystemDoc {
    fn from(sys: &ExtTriSystem) -> Self {
        Self {
            template: sys.base.template.clone(),
            s: sys.base.s.clone(),
            r: Some(sys.r.clone()),
            c: Some(sys.c.clone()),
        }
    }
}

impl ExtTriSystem {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemDoc::from(self)).expect("system serializes")
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, SystemParseError> {
        match parse_system(text)? {
            AnySystem::Extended(sys) => Ok(sys),
            AnySystem::Triangular(_) => {
                Err(SystemParseError::Contract(Error::Shape("document has no R/C sets".into())))
            }
        }
    }
}

/// Failure to read a system document.
#[derive(Debug, thiserror::Error)]
pub enum SystemParseError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Contract(#[from] Error),
}

pub fn parse_system(text: &str) -> std::result::Result<AnySystem, SystemParseError> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| SystemParseError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(doc.into_system()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::rat;

    #[test]
    fn ragged_matrices_are_shape_errors() {
        let t = IndexTemplate::finite(2);
        let bad = vec![vec![BorelSet::full(), BorelSet::empty()], vec![BorelSet::full()]];
        assert!(matches!(TriSystem::new(t.clone(), bad), Err(Error::Shape(_))));
        let good = vec![vec![BorelSet::full(); 2]; 2];
        let base = TriSystem::new(t, good).unwrap();
        assert!(matches!(
            ExtTriSystem::new(base, vec![BorelSet::empty()], vec![BorelSet::empty(); 2]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn template_labels_must_increase() {
        assert!(IndexTemplate::new(OrderKind::Rat, vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(IndexTemplate::new(OrderKind::Rat, vec![rat(1, 3), rat(1, 2)]).is_ok());
    }

    #[test]
    fn document_round_trip() {
        let t = IndexTemplate::integers(OrderKind::Nat, 1, 2);
        let s = vec![
            vec![BorelSet::full(), BorelSet::interval(rat(0, 1), rat(1, 2)).unwrap()],
            vec![BorelSet::empty(), BorelSet::full()],
        ];
        let sys = ExtTriSystem::new(
            TriSystem::new(t, s).unwrap(),
            vec![BorelSet::full(), BorelSet::empty()],
            vec![BorelSet::empty(), BorelSet::empty()],
        )
        .unwrap();
        let text = sys.to_json();
        assert!(text.contains("\"kind\": \"nat\""));
        assert_eq!(ExtTriSystem::from_json(&text).unwrap(), sys);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_system("{\"template\": {\"kind\": \"nat\"").unwrap_err();
        assert!(matches!(err, SystemParseError::Json { line: 1, .. }));
    }

    #[test]
    fn admissible_virtual_cuts_per_kind() {
        use VirtualTag::*;
        assert!(OrderKind::Nat.admits(AEmptyAtInfinity));
        assert!(!OrderKind::Nat.admits(BEmptyAtInfinity));
        assert!(!OrderKind::Nat.admits(Gap));
        assert!(OrderKind::Int.admits(BEmptyAtInfinity));
        assert!(!OrderKind::Int.admits(Gap));
        assert!(OrderKind::Rat.admits(Gap));
        assert!(!OrderKind::Finite.admits(AEmptyAtInfinity));
        assert!(!OrderKind::WellOrdered.admits(BEmptyAtInfinity));
    }
}
