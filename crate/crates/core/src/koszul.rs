//! Koszul complexes, graded localization, the Čech complex and local
//! cohomology, computed along two independent routes.
//!
//! Both routes work with finite levels of a direct system indexed by a power
//! `N`. For generators `y_1, …, y_n` of (a power of) the ideal, level `N` is
//! the cohomological Koszul complex on `y_1^N, …, y_n^N`:
//!
//! ```text
//! K^s_N(j) = ⊕_{|S| = s} M_{j + N·e_S},    e_S = Σ_{i ∈ S} |y_i|,
//! ```
//!
//! with `S → S ∪ {k}` acting by `(-1)^{#{i ∈ S : i < k}} · y_k^N`. The tower
//! route takes the colimit of `H(K_N)` along the maps given by `y_S` on each
//! summand. The Čech route first divides each summand by its `y_S`-torsion,
//! which turns level `N` into the subcomplex of the Čech complex
//! `⊕ M[1/y_S]` consisting of fractions with denominator `y_S^N`.
//!
//! A bidegree counts as stable once two consecutive transition maps are
//! isomorphisms, starting from the first level at which every summand sits
//! in degrees at or above [`stable_degree`]. Bidegrees that do not settle
//! within the level cap are flagged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::algebra::{Algebra, Element};
use crate::complex::{ChainComplex, GradedVectorSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{induced_rank, kernel, rank_kernel_image, Matrix, Subspace};
use crate::module::GradedModule;
use crate::table::{BigradedTable, GradedTable, Window};

/// Default number of levels examined per bidegree.
pub const DEFAULT_LEVELS: usize = 8;

/// Extra degrees past a module's generators after which multiplication by
/// ideal elements is assumed to have settled: `2 · (d_max + top relation degree)`.
pub fn padding<F: Field>(algebra: &Algebra<F>) -> i32 {
    let p = algebra.presentation();
    2 * (p.max_generator_degree() + p.max_relation_degree())
}

pub fn stable_degree<F: Field, M: GradedModule<F> + ?Sized>(m: &M) -> i32 {
    m.generation_bound().max(m.min_degree()) + padding(m.algebra())
}

/// The algebra generators, as elements.
pub fn augmentation_ideal_generators<F: Field>(algebra: &Algebra<F>) -> Vec<Element<F::Elem>> {
    (0..algebra.num_generators())
        .map(|g| algebra.generator_element(g))
        .collect()
}

/// Whether `x^k = 0` for some `k` with `k·|x|` within the padding range.
pub fn is_nilpotent<F: Field>(algebra: &Algebra<F>, x: &Element<F::Elem>) -> bool {
    let f = algebra.field();
    let bound = padding(algebra) + 2 * algebra.presentation().max_generator_degree();
    let mut p = x.clone();
    loop {
        if p.1.iter().all(|c| f.is_zero(c)) {
            return true;
        }
        if p.0 + x.0 > bound.max(2 * x.0) {
            return false;
        }
        p = (p.0 + x.0, algebra.multiply(p.0, &p.1, x.0, &x.1));
    }
}

/// Generators with the same radical, suited to the direct-system routes:
/// nilpotent elements are dropped, and each survivor `x_i` is replaced by
/// `x_i^{w_i}` with `w_i = ⌈d / |x_i|⌉`, `d` the top surviving degree, so all
/// weights are comparable.
pub fn radical_generators<F: Field>(algebra: &Algebra<F>, gens: &[Element<F::Elem>]) -> Vec<Element<F::Elem>> {
    let kept: Vec<_> = gens.iter().filter(|x| !is_nilpotent(algebra, x)).collect();
    let d = kept.iter().map(|x| x.0).max().unwrap_or(1);
    kept.into_iter()
        .map(|x| {
            let w = (d + x.0 - 1) / x.0;
            algebra.power(x, w as u32)
        })
        .collect()
}

fn check_elements<E>(elements: &[Element<E>]) -> Result<()> {
    if let Some(x) = elements.iter().find(|x| x.0 < 1) {
        return Err(Error::InvalidPresentation(format!(
            "Koszul elements need positive degree, found degree {}",
            x.0
        )));
    }
    Ok(())
}

/// Subsets of `0..n` of each size, as bit masks in lexicographic order of
/// their sorted index lists.
fn subsets_by_size(n: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, left: usize, mask: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for i in start..n {
            rec(i + 1, n, left - 1, mask | 1 << i, out);
        }
    }
    (0..=n)
        .map(|s| {
            let mut v = Vec::new();
            rec(0, n, s, 0, &mut v);
            v
        })
        .collect()
}

/// Shared machinery for both routes and for explicit Koszul complexes.
struct Levels<'a, F: Field, M: GradedModule<F> + ?Sized> {
    m: &'a M,
    elems: Vec<Element<F::Elem>>,
    subsets: Vec<Vec<u32>>,
    /// Divide summands by torsion (the Čech route).
    cech: bool,
    stable: i32,
    products: HashMap<u32, Element<F::Elem>>,
    powers: RwLock<HashMap<(usize, u32), Arc<Element<F::Elem>>>>,
    torsion: RwLock<HashMap<(u32, i32), Arc<Subspace<F>>>>,
}

struct Summand {
    mask: u32,
    t: i32,
    dim: usize,
    offset: usize,
}

impl<'a, F: Field, M: GradedModule<F> + ?Sized> Levels<'a, F, M> {
    fn new(m: &'a M, elems: Vec<Element<F::Elem>>, cech: bool) -> Self {
        let algebra = m.algebra();
        let n = elems.len();
        let subsets = subsets_by_size(n);
        let mut products = HashMap::new();
        for &mask in subsets.iter().flatten() {
            let mut p = algebra.one();
            for (i, x) in elems.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p = (p.0 + x.0, algebra.multiply(p.0, &p.1, x.0, &x.1));
                }
            }
            products.insert(mask, p);
        }
        Levels {
            m,
            elems,
            subsets,
            cech,
            stable: stable_degree(m),
            products,
            powers: RwLock::new(HashMap::new()),
            torsion: RwLock::new(HashMap::new()),
        }
    }

    fn field(&self) -> &F {
        self.m.field()
    }

    fn n(&self) -> usize {
        self.elems.len()
    }

    fn weight(&self, mask: u32) -> i32 {
        self.products[&mask].0
    }

    fn power(&self, i: usize, n: u32) -> Arc<Element<F::Elem>> {
        if let Some(p) = self.powers.read().unwrap().get(&(i, n)) {
            return p.clone();
        }
        let p = Arc::new(self.m.algebra().power(&self.elems[i], n));
        self.powers.write().unwrap().entry((i, n)).or_insert(p).clone()
    }

    /// First level at which every nonempty summand in degree `j` lies at or
    /// above the stable degree.
    fn start_level(&self, j: i32) -> u32 {
        let min_e = self.elems.iter().map(|x| x.0).min().unwrap_or(1);
        let need = self.stable - j;
        if need <= min_e {
            1
        } else {
            ((need + min_e - 1) / min_e) as u32
        }
    }

    /// `y_S`-power torsion of `M_t`, grown until the kernel stops changing
    /// for two consecutive powers past the stable degree.
    fn torsion(&self, mask: u32, t: i32) -> Option<Arc<Subspace<F>>> {
        if !self.cech || mask == 0 {
            return None;
        }
        if let Some(s) = self.torsion.read().unwrap().get(&(mask, t)) {
            return Some(s.clone());
        }
        let f = self.field();
        let dim = self.m.dimension(t);
        let (e, y) = &self.products[&mask];
        let built = if dim == 0 {
            Subspace::new(0)
        } else {
            let start = ((self.stable - t).max(0) + e - 1) / e;
            let mut p = Matrix::identity(f, dim);
            let mut deg = t;
            let mut history = Vec::new();
            let mut l = 0;
            loop {
                p = self.m.action_matrix(*e, y, deg).mul(f, &p);
                deg += e;
                l += 1;
                let ker = kernel(f, &p);
                let k = ker.len();
                history.push(k);
                let settled = history.len() >= 3 && history[history.len() - 3..].iter().all(|&x| x == k);
                if k == dim || (l >= start && settled) || l > start + 64 {
                    break Subspace::spanned_by(f, dim, &ker);
                }
            }
        };
        let built = Arc::new(built);
        Some(self.torsion.write().unwrap().entry((mask, t)).or_insert(built).clone())
    }

    fn summand_dim(&self, mask: u32, t: i32) -> usize {
        let d = self.m.dimension(t);
        match self.torsion(mask, t) {
            Some(tor) => d - tor.dim(),
            None => d,
        }
    }

    fn layout(&self, level: u32, s: usize, j: i32) -> (Vec<Summand>, usize) {
        let mut off = 0;
        let mut out = Vec::new();
        for &mask in &self.subsets[s] {
            let t = j + level as i32 * self.weight(mask);
            let dim = self.summand_dim(mask, t);
            out.push(Summand {
                mask,
                t,
                dim,
                offset: off,
            });
            off += dim;
        }
        (out, off)
    }

    /// Matrix of `x` from summand `(from_mask, t)` to `(to_mask, t + |x|)`,
    /// in quotient coordinates when dividing by torsion.
    fn block(&self, x: &Element<F::Elem>, from_mask: u32, t: i32, to_mask: u32) -> Matrix<F> {
        let f = self.field();
        let full = self.m.action_matrix(x.0, &x.1, t);
        let cols: Vec<usize> = match self.torsion(from_mask, t) {
            Some(tor) => tor.complement_columns(),
            None => (0..self.m.dimension(t)).collect(),
        };
        let target = self.torsion(to_mask, t + x.0);
        let rows = self.summand_dim(to_mask, t + x.0);
        let columns: Vec<Vec<F::Elem>> = cols
            .into_iter()
            .map(|c| {
                let v = full.column(c);
                match &target {
                    Some(tor) => tor.quotient_coordinates(f, &v),
                    None => v,
                }
            })
            .collect();
        Matrix::from_columns(f, rows, &columns)
    }

    /// `d^s : K^s_N(j) → K^{s+1}_N(j)`.
    fn differential(&self, level: u32, s: usize, j: i32) -> Matrix<F> {
        let f = self.field();
        let (src, cols) = self.layout(level, s, j);
        let (dst, rows) = self.layout(level, s + 1, j);
        let mut out = Matrix::zero(f, rows, cols);
        let index: HashMap<u32, &Summand> = dst.iter().map(|d| (d.mask, d)).collect();
        for a in &src {
            if a.dim == 0 {
                continue;
            }
            for k in 0..self.n() {
                if a.mask >> k & 1 == 1 {
                    continue;
                }
                let b = index[&(a.mask | 1 << k)];
                if b.dim == 0 {
                    continue;
                }
                let mut blk = self.block(&self.power(k, level), a.mask, a.t, b.mask);
                if (a.mask & ((1 << k) - 1)).count_ones() % 2 == 1 {
                    blk = blk.scaled(f, &f.neg(&f.one()));
                }
                place(&mut out, &blk, b.offset, a.offset);
            }
        }
        out
    }

    /// The transition `K^s_N(j) → K^s_{N+1}(j)`, multiplication by `y_S` on each summand.
    fn transition(&self, level: u32, s: usize, j: i32) -> Matrix<F> {
        let f = self.field();
        let (src, cols) = self.layout(level, s, j);
        let (dst, rows) = self.layout(level + 1, s, j);
        let mut out = Matrix::zero(f, rows, cols);
        for (a, b) in src.iter().zip(&dst) {
            if a.dim == 0 || b.dim == 0 {
                continue;
            }
            let blk = self.block(&self.products[&a.mask], a.mask, a.t, b.mask);
            place(&mut out, &blk, b.offset, a.offset);
        }
        out
    }

    fn term_dim(&self, level: u32, s: usize, j: i32) -> usize {
        self.layout(level, s, j).1
    }

    /// Colimit dimensions of `H^s` in degree `j` for every `s`, with a
    /// stability flag for each.
    fn stable_cohomology(&self, j: i32, levels: usize) -> Vec<(usize, bool)> {
        let f = self.field();
        let n = self.n();
        let level_data = |lv: u32| -> Vec<Matrix<F>> { (0..n).map(|s| self.differential(lv, s, j)).collect() };
        let cohomology = |diffs: &[Matrix<F>], lv: u32, s: usize| -> (Vec<Vec<F::Elem>>, Subspace<F>) {
            let dim = self.term_dim(lv, s, j);
            let cycles = if s == n {
                (0..dim)
                    .map(|i| (0..dim).map(|k| if k == i { f.one() } else { f.zero() }).collect())
                    .collect()
            } else {
                kernel(f, &diffs[s])
            };
            let boundaries = if s == 0 {
                Subspace::new(dim)
            } else {
                Subspace::spanned_by(f, dim, &rank_kernel_image(f, &diffs[s - 1]).image)
            };
            (cycles, boundaries)
        };
        let mut level = self.start_level(j);
        let mut cur = level_data(level);
        let mut dims: Vec<usize> = (0..=n)
            .map(|s| {
                let (z, b) = cohomology(&cur, level, s);
                z.len() - b.dim()
            })
            .collect();
        let mut runs = vec![0usize; n + 1];
        let mut done = vec![false; n + 1];
        for _ in 1..levels {
            let next = level_data(level + 1);
            for s in 0..=n {
                if done[s] {
                    continue;
                }
                let (z, _) = cohomology(&cur, level, s);
                let (z1, b1) = cohomology(&next, level + 1, s);
                let h1 = z1.len() - b1.dim();
                let r = induced_rank(f, &self.transition(level, s, j), &z, &b1);
                if r == dims[s] && r == h1 {
                    runs[s] += 1;
                    done[s] = runs[s] >= 2;
                } else {
                    runs[s] = 0;
                }
                dims[s] = h1;
            }
            if done.iter().all(|&d| d) {
                break;
            }
            cur = next;
            level += 1;
        }
        dims.into_iter().zip(done).collect()
    }

    fn table(&self, window: Window, levels: usize) -> BigradedTable {
        let rows: Vec<(i32, Vec<(usize, bool)>)> = window
            .degrees()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| (j, self.stable_cohomology(j, levels)))
            .collect();
        let mut t = BigradedTable::new();
        for (j, per_s) in rows {
            for (s, (dim, stable)) in per_s.into_iter().enumerate() {
                t.set(s as i32, j, dim);
                if !stable {
                    t.flag(s as i32, j);
                }
            }
        }
        t
    }
}

fn place<F: Field>(out: &mut Matrix<F>, blk: &Matrix<F>, row: usize, col: usize) {
    for r in 0..blk.rows() {
        for c in 0..blk.cols() {
            out.set(row + r, col + c, blk.get(r, c).clone());
        }
    }
}

/// The cohomological Koszul complex on `x_1^power, …, x_n^power` with
/// coefficients in `m`, stored with stage `s` at homological index `-s`.
pub fn koszul_complex<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    elements: &[Element<F::Elem>],
    power: u32,
    window: Window,
) -> Result<ChainComplex<F>> {
    check_elements(elements)?;
    let lv = Levels::new(m, elements.to_vec(), false);
    let n = elements.len();
    let mut terms = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for s in 0..=n {
        let dims = window.degrees().map(|j| (j, lv.term_dim(power, s, j)));
        terms.insert(-(s as i32), GradedVectorSpace::from_dims(window, dims));
        if s < n {
            for j in window.degrees() {
                diffs.insert((-(s as i32), j), lv.differential(power, s, j));
            }
        }
    }
    ChainComplex::new(m.field().clone(), (-(n as i32), 0), window, terms, diffs)
}

/// Windowed dimensions of `M[1/x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedModule {
    pub degree: i32,
    pub dims: GradedTable,
    /// Degrees where multiplication by `x` did not become bijective within
    /// the padding; these include every degree of an infinite-dimensional piece.
    pub flagged: BTreeSet<i32>,
}

/// `M[1/x]_j` as the stable value of `M_{j + k|x|}` under multiplication by
/// `x`, certified by two consecutive bijective steps past the stable degree.
pub fn localize<F: Field, M: GradedModule<F> + ?Sized>(m: &M, x: &Element<F::Elem>, window: Window) -> LocalizedModule {
    assert!(x.0 >= 1, "localization needs a positive-degree element");
    let f = m.field();
    let d = x.0;
    let stable = stable_degree(m);
    let steps = padding(m.algebra()).max(2) + 2;
    let mut dims = GradedTable::new(window);
    let mut flagged = BTreeSet::new();
    for j in window.degrees() {
        let start = ((stable - j).max(0) + d - 1) / d;
        let mut run = 0;
        let mut result = None;
        for k in start..start + steps {
            let t = j + k * d;
            let (a, b) = (m.dimension(t), m.dimension(t + d));
            let bijective = a == b && (a == 0 || m.action_matrix(d, &x.1, t).rank(f) == a);
            if bijective {
                run += 1;
                if run == 2 {
                    result = Some(b);
                    break;
                }
            } else {
                run = 0;
            }
        }
        match result {
            Some(v) => dims.set(j, v),
            None => {
                flagged.insert(j);
            }
        }
    }
    LocalizedModule {
        degree: d,
        dims,
        flagged,
    }
}

/// Term dimensions of the Čech complex `M → ⊕ M[1/y_i] → ⊕ M[1/y_i y_k] → …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechComplex {
    pub window: Window,
    /// `terms[s]` is `⊕_{|S| = s} M[1/y_S]`, which is also the `s`-th
    /// filtration quotient of the stable Koszul complex.
    pub terms: Vec<GradedTable>,
    /// `(s, j)` cells with an uncertified localization.
    pub flagged: BTreeSet<(i32, i32)>,
}

impl CechComplex {
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn filtration_quotient(&self, s: usize) -> &GradedTable {
        &self.terms[s]
    }

    pub fn euler_characteristic(&self, j: i32) -> i64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(s, t)| if s % 2 == 0 { 1 } else { -1 } * t.get(j) as i64)
            .sum()
    }
}

/// The Čech complex on the given generators (after passing to
/// [`radical_generators`]).
pub fn cech_complex<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    generators: &[Element<F::Elem>],
    window: Window,
) -> Result<CechComplex> {
    check_elements(generators)?;
    let algebra = m.algebra();
    let ys = radical_generators(algebra, generators);
    let lv = Levels::new(m, ys, true);
    let mut terms = Vec::new();
    let mut flagged = BTreeSet::new();
    for (s, masks) in lv.subsets.iter().enumerate() {
        let mut t = GradedTable::new(window);
        for &mask in masks {
            if mask == 0 {
                for j in window.degrees() {
                    t.set(j, m.dimension(j));
                }
                continue;
            }
            let loc = localize(m, &lv.products[&mask], window);
            for j in window.degrees() {
                t.set(j, t.get(j) + loc.dims.get(j));
            }
            flagged.extend(loc.flagged.iter().map(|&j| (s as i32, j)));
        }
        terms.push(t);
    }
    Ok(CechComplex { window, terms, flagged })
}

/// `H^c_I(M)_j` via the Čech complex. Unsettled bidegrees are flagged.
pub fn local_cohomology<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    generators: &[Element<F::Elem>],
    window: Window,
) -> Result<BigradedTable> {
    local_cohomology_levels(m, generators, window, DEFAULT_LEVELS)
}

pub fn local_cohomology_levels<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    generators: &[Element<F::Elem>],
    window: Window,
    levels: usize,
) -> Result<BigradedTable> {
    check_elements(generators)?;
    let ys = radical_generators(m.algebra(), generators);
    Ok(Levels::new(m, ys, true).table(window, levels))
}

/// `H^c_I(M)_j` as the colimit of Koszul cohomology, examining `m_max`
/// levels per bidegree. Unsettled bidegrees are flagged.
pub fn koszul_tower_table<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    generators: &[Element<F::Elem>],
    window: Window,
    m_max: usize,
) -> Result<BigradedTable> {
    check_elements(generators)?;
    if m_max == 0 {
        return Err(Error::Usage("the Koszul tower needs at least one level".into()));
    }
    let ys = radical_generators(m.algebra(), generators);
    Ok(Levels::new(m, ys, false).table(window, m_max))
}

/// As [`koszul_tower_table`], but any unsettled bidegree is an error.
pub fn local_cohomology_via_koszul_tower<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    generators: &[Element<F::Elem>],
    window: Window,
    m_max: usize,
) -> Result<BigradedTable> {
    let t = koszul_tower_table(m, generators, window, m_max)?;
    let count = t.flagged().count();
    if count > 0 {
        return Err(Error::TowerNotStabilized {
            m_max: m_max as u32,
            count,
        });
    }
    Ok(t)
}

/// The `E_2` page `H^c_I(M)_j` for `I` the augmentation ideal, in both gradings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Page {
    /// Indexed by `(c, j)`: cohomological degree and internal degree.
    pub tool: BigradedTable,
    /// Indexed by `(i, j) = (-c, -j)`; the entry at `(i, j)` contributes to
    /// the homotopy of the cellular approximation in degree `i + j`.
    pub paper: BigradedTable,
}

impl E2Page {
    pub fn abutment_degree(i: i32, j: i32) -> i32 {
        i + j
    }

    /// Total dimension in each abutment degree.
    pub fn abutment_totals(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for ((i, j), d) in self.paper.nonzero() {
            *out.entry(Self::abutment_degree(i, j)).or_insert(0) += d;
        }
        out
    }

    /// Columns (values of `i`) carrying nonzero entries.
    pub fn columns(&self) -> BTreeSet<i32> {
        self.paper.support_indices()
    }
}

pub fn e2_page<F: Field, M: GradedModule<F> + ?Sized>(m: &M, window: Window) -> Result<E2Page> {
    let gens = augmentation_ideal_generators(m.algebra());
    let tool = local_cohomology(m, &gens, window)?;
    let paper = tool.mirrored(true);
    Ok(E2Page { tool, paper })
}
