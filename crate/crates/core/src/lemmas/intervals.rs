use serde::{Deserialize, Serialize};

use crate::borel::{rat, BorelSet, Rational};
use crate::error::{Error, Result};

/// The open window `((p−1)/q, (p+1)/q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "crate::borel::rational_pair")]
    pub s: Rational,
    #[serde(with = "crate::borel::rational_pair")]
    pub t: Rational,
    pub p: i64,
    pub q: i64,
}

impl Window {
    pub fn new(p: i64, q: i64) -> Self {
        Self { s: rat(p - 1, q), t: rat(p + 1, q), p, q }
    }

    pub fn width(&self) -> Rational {
        self.t - self.s
    }

    pub fn contains_point(&self, x: Rational) -> bool {
        self.s < x && x < self.t
    }

    pub fn within(&self, other: &Window) -> bool {
        other.s <= self.s && self.t <= other.t
    }

    /// Whether the open window meets `set`.
    pub fn meets(&self, set: &BorelSet) -> bool {
        set.intervals().iter().any(|iv| iv.lo() < self.t && self.s < iv.hi())
    }
}

/// Windows meeting a set, enumerated by `q` then `p`, with their
/// containment sets `S_n = {m : window m ⊆ window n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalFamily {
    pub windows: Vec<Window>,
    pub containment: Vec<Vec<usize>>,
}

impl IntervalFamily {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Indices of the windows containing `x`.
    pub fn covering(&self, x: Rational) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.windows[n].contains_point(x)).collect()
    }
}

/// All windows `((p−1)/q, (p+1)/q)` with `1 ≤ p < q ≤ q_max` that meet `k`.
pub fn interval_family(k: &BorelSet, q_max: usize) -> Result<IntervalFamily> {
    if k.is_empty() {
        return Err(Error::Domain("interval family of the empty set".into()));
    }
    if q_max < 2 {
        return Err(Error::Domain(format!("q_max must be at least 2 (got {q_max})")));
    }
    let q_max = i64::try_from(q_max).map_err(|_| Error::Domain("q_max too large".into()))?;
    let windows: Vec<Window> =
        (2..=q_max).flat_map(|q| (1..q).map(move |p| Window::new(p, q))).filter(|w| w.meets(k)).collect();
    let containment = windows
        .iter()
        .map(|outer| (0..windows.len()).filter(|&m| windows[m].within(outer)).collect())
        .collect();
    Ok(IntervalFamily { windows, containment })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_like_cell() {
        let k = BorelSet::interval(rat(1, 2), rat(5, 8)).unwrap();
        let fam = interval_family(&k, 8).unwrap();
        for q in 2..=8 {
            for p in 1..q {
                let w = Window::new(p, q);
                if w.contains_point(rat(1, 2)) {
                    assert!(fam.windows.contains(&w));
                }
            }
        }
        assert!(fam.windows.iter().all(|w| w.meets(&k)));
    }

    #[test]
    fn widths_nonincreasing_and_self_contained() {
        let k = BorelSet::interval(rat(1, 4), rat(3, 4)).unwrap();
        let fam = interval_family(&k, 16).unwrap();
        assert!(fam.windows.windows(2).all(|w| w[0].width() >= w[1].width()));
        assert!(fam.containment.iter().enumerate().all(|(n, s)| s.contains(&n)));
        assert!(fam.containment[0].len() >= 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(interval_family(&BorelSet::empty(), 8), Err(Error::Domain(_))));
        assert!(matches!(interval_family(&BorelSet::full(), 1), Err(Error::Domain(_))));
    }
}
