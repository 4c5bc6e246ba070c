//! Chain complexes of graded vector spaces.
//!
//! Terms are indexed by a homological index `s` and an internal degree `j`;
//! the differential `d_s : C_s → C_{s-1}` preserves internal degree and is
//! stored as one matrix per `(s, j)`. Cohomologically indexed complexes are
//! stored with `s = -i`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel, Matrix};
use crate::table::{GradedTable, Window};

/// Windowed dimensions with optional basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    pub window: Window,
    dims: BTreeMap<i32, usize>,
    labels: Option<BTreeMap<i32, Vec<String>>>,
}

impl GradedVectorSpace {
    pub fn zero(window: Window) -> Self {
        GradedVectorSpace {
            window,
            dims: BTreeMap::new(),
            labels: None,
        }
    }

    pub fn from_dims(window: Window, dims: impl IntoIterator<Item = (i32, usize)>) -> Self {
        let mut v = Self::zero(window);
        for (j, d) in dims {
            v.set_dim(j, d);
        }
        v
    }

    pub fn set_dim(&mut self, j: i32, d: usize) {
        if !self.window.contains(j) {
            return;
        }
        if d == 0 {
            self.dims.remove(&j);
        } else {
            self.dims.insert(j, d);
        }
        if let Some(l) = &mut self.labels {
            l.remove(&j);
        }
    }

    /// Attaches labels for degree `j`; must match the dimension there.
    pub fn set_labels(&mut self, j: i32, labels: Vec<String>) {
        assert_eq!(labels.len(), self.dim(j), "label count must equal dimension");
        self.labels.get_or_insert_with(BTreeMap::new).insert(j, labels);
    }

    pub fn labels(&self, j: i32) -> Option<&[String]> {
        self.labels.as_ref()?.get(&j).map(|v| v.as_slice())
    }

    pub fn dim(&self, j: i32) -> usize {
        self.dims.get(&j).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn to_table(&self) -> GradedTable {
        GradedTable::from_fn(self.window, |j| self.dim(j))
    }
}

#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    s_min: i32,
    s_max: i32,
    window: Window,
    terms: BTreeMap<i32, GradedVectorSpace>,
    /// `(s, j)` ↦ matrix of `d_s` in degree `j`, shape `dim C_{s-1,j} × dim C_{s,j}`.
    diffs: BTreeMap<(i32, i32), Matrix<F>>,
}

impl<F: Field> ChainComplex<F> {
    /// Validates shapes and `d∘d = 0`; missing differentials are zero.
    pub fn new(
        field: F,
        range: (i32, i32),
        window: Window,
        terms: BTreeMap<i32, GradedVectorSpace>,
        diffs: BTreeMap<(i32, i32), Matrix<F>>,
    ) -> Result<Self> {
        let c = ChainComplex {
            field,
            s_min: range.0,
            s_max: range.1,
            window,
            terms,
            diffs,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for (&(s, j), m) in &self.diffs {
            let (rows, cols) = (self.dim(s - 1, j), self.dim(s, j));
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::MalformedComplex(format!(
                    "d_{s} in degree {j} has shape {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        for (&(s, j), m) in &self.diffs {
            if let Some(next) = self.diffs.get(&(s - 1, j)) {
                if !next.mul(&self.field, m).is_zero(&self.field) {
                    return Err(Error::MalformedComplex(format!(
                        "d_{} ∘ d_{} ≠ 0 in internal degree {j}",
                        s - 1,
                        s
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn range(&self) -> (i32, i32) {
        (self.s_min, self.s_max)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn term(&self, s: i32) -> Option<&GradedVectorSpace> {
        self.terms.get(&s)
    }

    pub fn dim(&self, s: i32, j: i32) -> usize {
        if s < self.s_min || s > self.s_max {
            return 0;
        }
        self.terms.get(&s).map_or(0, |t| t.dim(j))
    }

    /// `d_s` in degree `j` (a zero matrix of the right shape if unset).
    pub fn differential(&self, s: i32, j: i32) -> Matrix<F> {
        self.diffs
            .get(&(s, j))
            .cloned()
            .unwrap_or_else(|| Matrix::zero(&self.field, self.dim(s - 1, j), self.dim(s, j)))
    }

    fn rank_of(&self, s: i32, j: i32) -> usize {
        self.diffs.get(&(s, j)).map_or(0, |m| m.rank(&self.field))
    }

    /// `H_s` degreewise: `dim ker d_s − rank d_{s+1}`.
    pub fn homology(&self, s: i32) -> GradedVectorSpace {
        let mut h = GradedVectorSpace::zero(self.window);
        for j in self.window.degrees() {
            let n = self.dim(s, j);
            if n == 0 {
                continue;
            }
            let ker = n - self.rank_of(s, j);
            h.set_dim(j, ker - self.rank_of(s + 1, j));
        }
        h
    }

    /// Homology at every index of the range.
    pub fn all_homology(&self) -> BTreeMap<i32, GradedVectorSpace> {
        (self.s_min..=self.s_max).map(|s| (s, self.homology(s))).collect()
    }

    pub fn euler_characteristic(&self, j: i32) -> i64 {
        (self.s_min..=self.s_max)
            .map(|s| if s.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(s, j) as i64)
            .sum()
    }

    /// Good truncation keeping `H_i` for `i ≤ n`: terms above `n + 1` are
    /// dropped and `C_{n+1}` is replaced by the image of `d_{n+1}` in `C_n`.
    pub fn truncate_above(&self, n: i32) -> ChainComplex<F> {
        let f = &self.field;
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for s in self.s_min..=self.s_max.min(n) {
            if let Some(t) = self.terms.get(&s) {
                terms.insert(s, t.clone());
            }
        }
        for (&(s, j), m) in &self.diffs {
            if s <= n && s > self.s_min {
                diffs.insert((s, j), m.clone());
            }
        }
        let mut top = GradedVectorSpace::zero(self.window);
        if n < self.s_max && n >= self.s_min {
            for j in self.window.degrees() {
                let d = self.differential(n + 1, j);
                let mut t = d.transpose(f);
                let piv = t.row_reduce(f);
                if piv.is_empty() {
                    continue;
                }
                top.set_dim(j, piv.len());
                let image: Vec<_> = t.row_vectors()[..piv.len()].to_vec();
                diffs.insert((n + 1, j), Matrix::from_columns(f, d.rows(), &image));
            }
            terms.insert(n + 1, top);
        }
        let s_max = if n < self.s_max { n + 1 } else { self.s_max.min(n) };
        ChainComplex::new(
            f.clone(),
            (self.s_min, s_max.max(self.s_min)),
            self.window,
            terms,
            diffs,
        )
        .expect("truncation of a complex is a complex")
    }

    /// Good truncation keeping `H_i` for `i ≥ n`: terms below `n` are dropped
    /// and `C_n` is replaced by `ker d_n`.
    pub fn truncate_below(&self, n: i32) -> ChainComplex<F> {
        let f = &self.field;
        let mut terms = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for s in (n + 1).max(self.s_min)..=self.s_max {
            if let Some(t) = self.terms.get(&s) {
                terms.insert(s, t.clone());
            }
        }
        for (&(s, j), m) in &self.diffs {
            if s > n + 1 {
                diffs.insert((s, j), m.clone());
            }
        }
        if n >= self.s_min && n <= self.s_max {
            let mut bottom = GradedVectorSpace::zero(self.window);
            for j in self.window.degrees() {
                let cycles = kernel(f, &self.differential(n, j));
                if cycles.is_empty() {
                    continue;
                }
                bottom.set_dim(j, cycles.len());
                // d_{n+1} lands in the cycles; rewrite it in the cycle basis.
                let d = self.differential(n + 1, j);
                let cols: Vec<Vec<F::Elem>> = (0..d.cols())
                    .map(|c| coordinates_in(f, &cycles, &d.column(c)))
                    .collect();
                if d.cols() > 0 {
                    diffs.insert((n + 1, j), Matrix::from_columns(f, cycles.len(), &cols));
                }
            }
            terms.insert(n, bottom);
        }
        let s_min = n.max(self.s_min).min(self.s_max);
        ChainComplex::new(f.clone(), (s_min, self.s_max), self.window, terms, diffs)
            .expect("truncation of a complex is a complex")
    }

    /// Degreewise direct sum of two complexes over the same window.
    pub fn direct_sum(&self, other: &ChainComplex<F>) -> ChainComplex<F> {
        assert_eq!(self.window, other.window);
        let f = &self.field;
        let s_min = self.s_min.min(other.s_min);
        let s_max = self.s_max.max(other.s_max);
        let mut terms = BTreeMap::new();
        for s in s_min..=s_max {
            let t = GradedVectorSpace::from_dims(
                self.window,
                self.window.degrees().map(|j| (j, self.dim(s, j) + other.dim(s, j))),
            );
            terms.insert(s, t);
        }
        let mut diffs = BTreeMap::new();
        for s in s_min..=s_max {
            for j in self.window.degrees() {
                let (a, b) = (self.differential(s, j), other.differential(s, j));
                let mut m = Matrix::zero(f, a.rows() + b.rows(), a.cols() + b.cols());
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        m.set(r, c, a.get(r, c).clone());
                    }
                }
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        m.set(a.rows() + r, a.cols() + c, b.get(r, c).clone());
                    }
                }
                if m.rows() > 0 && m.cols() > 0 {
                    diffs.insert((s, j), m);
                }
            }
        }
        ChainComplex::new(f.clone(), (s_min, s_max), self.window, terms, diffs).expect("sum of complexes is a complex")
    }
}

/// Coordinates of `v` (known to lie in the span) with respect to `basis`.
fn coordinates_in<F: Field>(f: &F, basis: &[Vec<F::Elem>], v: &[F::Elem]) -> Vec<F::Elem> {
    // Solve basis^T x = v.
    let m = Matrix::from_columns(f, v.len(), basis);
    let mut aug = Matrix::zero(f, v.len(), basis.len() + 1);
    for r in 0..v.len() {
        for c in 0..basis.len() {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, basis.len(), v[r].clone());
    }
    let piv = aug.row_reduce(f);
    assert!(!piv.contains(&basis.len()), "vector not in span");
    let mut x = vec![f.zero(); basis.len()];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = aug.get(i, basis.len()).clone();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn f2() -> Fp {
        Fp::new(2).unwrap()
    }

    /// `Σ¹R →x R` for R = F_2[x], |x| = 1, in degrees [0, w].
    pub(crate) fn koszul_x(w: i32) -> ChainComplex<Fp> {
        let f = f2();
        let win = Window::new(0, w);
        let mut terms = BTreeMap::new();
        terms.insert(0, GradedVectorSpace::from_dims(win, win.degrees().map(|j| (j, 1))));
        terms.insert(1, GradedVectorSpace::from_dims(win, (1..=w).map(|j| (j, 1))));
        let mut diffs = BTreeMap::new();
        for j in 1..=w {
            diffs.insert((1, j), Matrix::identity(&f, 1));
        }
        ChainComplex::new(f, (0, 1), win, terms, diffs).unwrap()
    }

    #[test]
    fn zero_differentials_give_terms() {
        let f = f2();
        let win = Window::new(0, 2);
        let mut terms = BTreeMap::new();
        terms.insert(0, GradedVectorSpace::from_dims(win, [(0, 2), (2, 1)]));
        terms.insert(1, GradedVectorSpace::from_dims(win, [(1, 3)]));
        let c = ChainComplex::new(f, (0, 1), win, terms.clone(), BTreeMap::new()).unwrap();
        assert_eq!(c.homology(0), terms[&0]);
        assert_eq!(c.homology(1), terms[&1]);
    }

    #[test]
    fn koszul_on_x_has_homology_k() {
        let c = koszul_x(6);
        assert!(c.homology(1).is_zero());
        let h0 = c.homology(0);
        assert_eq!(h0.dim(0), 1);
        assert_eq!(h0.total_dim(), 1);
    }

    #[test]
    fn identity_complex_is_acyclic() {
        let f = f2();
        let win = Window::new(0, 0);
        let mut terms = BTreeMap::new();
        terms.insert(0, GradedVectorSpace::from_dims(win, [(0, 2)]));
        terms.insert(1, GradedVectorSpace::from_dims(win, [(0, 2)]));
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 0), Matrix::identity(&f, 2));
        let c = ChainComplex::new(f, (0, 1), win, terms, diffs).unwrap();
        assert!(c.homology(0).is_zero() && c.homology(1).is_zero());
    }

    #[test]
    fn rejects_nonzero_square() {
        let f = f2();
        let win = Window::new(0, 0);
        let mut terms = BTreeMap::new();
        for s in 0..3 {
            terms.insert(s, GradedVectorSpace::from_dims(win, [(0, 1)]));
        }
        let mut diffs = BTreeMap::new();
        diffs.insert((1, 0), Matrix::identity(&f, 1));
        diffs.insert((2, 0), Matrix::identity(&f, 1));
        let err = ChainComplex::new(f, (0, 2), win, terms, diffs).unwrap_err();
        assert!(matches!(err, Error::MalformedComplex(_)));
    }

    #[test]
    fn truncating_koszul_keeps_cokernel() {
        let c = koszul_x(5);
        let t = c.truncate_above(0);
        assert_eq!(t.homology(0), c.homology(0));
        assert!(t.homology(1).is_zero());
        let below = t.truncate_below(0);
        assert_eq!(below.homology(0), c.homology(0));
    }

    #[test]
    fn truncate_above_of_low_complex_is_unchanged_in_homology() {
        let c = koszul_x(4);
        let t = c.truncate_above(3);
        for s in 0..=1 {
            assert_eq!(t.homology(s), c.homology(s));
        }
    }
}
