//! Windowed dimension tables, the common output shape of every computation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A closed interval of internal degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub fn new(lo: i32, hi: i32) -> Self {
        Window { lo, hi }
    }

    pub fn contains(&self, j: i32) -> bool {
        self.lo <= j && j <= self.hi
    }

    pub fn degrees(&self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        self.lo..=self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn widen(&self, by: i32) -> Window {
        Window::new(self.lo - by, self.hi + by)
    }

    pub fn shrink(&self, by: i32) -> Window {
        Window::new(self.lo + by, self.hi - by)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Degree → dimension over a window (Hilbert functions, socles, duals).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedTable {
    pub window: Window,
    dims: BTreeMap<i32, usize>,
}

impl GradedTable {
    pub fn new(window: Window) -> Self {
        GradedTable {
            window,
            dims: BTreeMap::new(),
        }
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(i32) -> usize) -> Self {
        let mut t = Self::new(window);
        for j in window.degrees() {
            t.set(j, f(j));
        }
        t
    }

    pub fn set(&mut self, j: i32, dim: usize) {
        if !self.window.contains(j) {
            return;
        }
        if dim == 0 {
            self.dims.remove(&j);
        } else {
            self.dims.insert(j, dim);
        }
    }

    /// Zero outside the window.
    pub fn get(&self, j: i32) -> usize {
        self.dims.get(&j).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.dims.iter().map(|(&j, &d)| (j, d))
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }
}

/// (index, internal degree) → dimension, with a set of flagged cells whose
/// values could not be certified.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradedTable {
    dims: BTreeMap<(i32, i32), usize>,
    flagged: BTreeSet<(i32, i32)>,
}

impl BigradedTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, s: i32, j: i32, dim: usize) {
        if dim == 0 {
            self.dims.remove(&(s, j));
        } else {
            self.dims.insert((s, j), dim);
        }
    }

    pub fn get(&self, s: i32, j: i32) -> usize {
        self.dims.get(&(s, j)).copied().unwrap_or(0)
    }

    pub fn flag(&mut self, s: i32, j: i32) {
        self.flagged.insert((s, j));
    }

    pub fn is_flagged(&self, s: i32, j: i32) -> bool {
        self.flagged.contains(&(s, j))
    }

    pub fn flagged(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.flagged.iter().copied()
    }

    pub fn has_flags(&self) -> bool {
        !self.flagged.is_empty()
    }

    /// Nonzero entries sorted by (index, degree).
    pub fn nonzero(&self) -> impl Iterator<Item = ((i32, i32), usize)> + '_ {
        self.dims.iter().map(|(&k, &d)| (k, d))
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Sum over the index for one internal degree.
    pub fn column_total(&self, j: i32) -> usize {
        self.dims.iter().filter(|((_, jj), _)| *jj == j).map(|(_, d)| d).sum()
    }

    /// Indices carrying any nonzero entry.
    pub fn support_indices(&self) -> BTreeSet<i32> {
        self.dims.keys().map(|(s, _)| *s).collect()
    }

    pub fn row(&self, s: i32) -> impl Iterator<Item = (i32, usize)> + '_ {
        self.dims
            .iter()
            .filter(move |((ss, _), _)| *ss == s)
            .map(|((_, j), d)| (*j, *d))
    }

    /// Regrades `j ↦ -j` (and optionally `s ↦ -s`) for the homological mirror.
    pub fn mirrored(&self, negate_index: bool) -> BigradedTable {
        let sgn = if negate_index { -1 } else { 1 };
        BigradedTable {
            dims: self.dims.iter().map(|(&(s, j), &d)| ((sgn * s, -j), d)).collect(),
            flagged: self.flagged.iter().map(|&(s, j)| (sgn * s, -j)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_table_is_zero_outside_window() {
        let mut t = GradedTable::new(Window::new(0, 3));
        t.set(2, 5);
        t.set(7, 1);
        assert_eq!(t.get(2), 5);
        assert_eq!(t.get(7), 0);
        assert_eq!(t.total(), 5);
    }

    #[test]
    fn mirror_negates_degrees() {
        let mut b = BigradedTable::new();
        b.set(1, -3, 2);
        b.flag(1, -3);
        let m = b.mirrored(true);
        assert_eq!(m.get(-1, 3), 2);
        assert!(m.is_flagged(-1, 3));
    }
}
