//! Graded modules over a presented algebra.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::algebra::Algebra;
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::table::{GradedTable, Window};

/// A left module over `algebra()`, bounded below, with a fixed basis in each degree.
pub trait GradedModule<F: Field>: Send + Sync {
    fn algebra(&self) -> &Arc<Algebra<F>>;

    /// No basis elements below this degree.
    fn min_degree(&self) -> i32;

    /// Every generator lies in degree at most this, so the module vanishes
    /// from some degree on once `d_max` consecutive degrees above it are zero.
    fn generation_bound(&self) -> i32;

    fn dimension(&self, j: i32) -> usize;

    /// Product of basis element `op` of `A_{op_deg}` with basis element `m`
    /// of `M_{mod_deg}`, in the basis of `M_{op_deg + mod_deg}`.
    fn act_on_basis(&self, op_deg: i32, op: usize, mod_deg: i32, m: usize) -> Vec<F::Elem>;

    fn field(&self) -> &F {
        self.algebra().field()
    }

    /// Matrix of multiplication by basis element `op` of `A_{op_deg}` on `M_{mod_deg}`.
    fn basis_action_matrix(&self, op_deg: i32, op: usize, mod_deg: i32) -> Matrix<F> {
        let f = self.field();
        let cols: Vec<_> = (0..self.dimension(mod_deg))
            .map(|m| self.act_on_basis(op_deg, op, mod_deg, m))
            .collect();
        Matrix::from_columns(f, self.dimension(op_deg + mod_deg), &cols)
    }

    /// Matrix of multiplication by an arbitrary element of `A_{op_deg}`.
    fn action_matrix(&self, op_deg: i32, op: &[F::Elem], mod_deg: i32) -> Matrix<F> {
        let f = self.field();
        let mut out = Matrix::zero(f, self.dimension(op_deg + mod_deg), self.dimension(mod_deg));
        for (i, c) in op.iter().enumerate() {
            if !f.is_zero(c) {
                out.add_assign(f, &self.basis_action_matrix(op_deg, i, mod_deg).scaled(f, c));
            }
        }
        out
    }

    fn act(&self, op_deg: i32, op: &[F::Elem], mod_deg: i32, m: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let mut out = vec![f.zero(); self.dimension(op_deg + mod_deg)];
        for (i, a) in op.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (k, b) in m.iter().enumerate() {
                if !f.is_zero(b) {
                    f.axpy(&mut out, &f.mul(a, b), &self.act_on_basis(op_deg, i, mod_deg, k));
                }
            }
        }
        out
    }

    fn hilbert_function(&self, window: Window) -> GradedTable {
        GradedTable::from_fn(window, |j| self.dimension(j))
    }

    /// Multiplication by the `g`-th algebra generator, `M_j → M_{j + |x_g|}`.
    fn generator_action(&self, g: usize, j: i32) -> Matrix<F> {
        let (d, x) = self.algebra().generator_element(g);
        self.action_matrix(d, &x, j)
    }
}

/// Highest nonzero degree when the module provably vanishes above it, found
/// by scanning up to `limit`. `Some(min_degree - 1)` encodes the zero module.
pub fn top_degree<F: Field, M: GradedModule<F> + ?Sized>(m: &M, limit: i32) -> Option<i32> {
    let dmax = m.algebra().presentation().max_generator_degree().max(1);
    let start = m.min_degree();
    let mut last = start - 1;
    let mut run = 0;
    for j in start..=limit {
        if m.dimension(j) == 0 {
            run += 1;
            if j > m.generation_bound() && run >= dmax {
                return Some(last);
            }
        } else {
            last = j;
            run = 0;
        }
    }
    None
}

/// A free module `⊕_g Σ^{d_g} A` with generators sorted by degree.
///
/// Degree-`j` coordinates are the concatenation over generators of the
/// bases of `A_{j - d_g}`.
#[derive(Clone, Debug)]
pub struct FreeModule<F: Field> {
    algebra: Arc<Algebra<F>>,
    degrees: Vec<i32>,
}

impl<F: Field> FreeModule<F> {
    pub fn new(algebra: Arc<Algebra<F>>, mut degrees: Vec<i32>) -> Self {
        degrees.sort_unstable();
        FreeModule { algebra, degrees }
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Appends a generator; it must not lie below an existing one.
    pub fn push_generator(&mut self, degree: i32) {
        assert!(self.degrees.last().is_none_or(|&d| d <= degree));
        self.degrees.push(degree);
    }

    /// `(generator, offset, block dimension)` for each generator in degree `j`.
    pub fn blocks(&self, j: i32) -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        self.degrees
            .iter()
            .enumerate()
            .map(|(g, &d)| {
                let n = self.algebra.dim(j - d);
                let b = (g, off, n);
                off += n;
                b
            })
            .collect()
    }

    /// Block `g` of an element of degree `j`: an element of `A_{j - d_g}`.
    pub fn coefficient<'a>(&self, j: i32, v: &'a [F::Elem], g: usize) -> &'a [F::Elem] {
        let (_, off, n) = self.blocks(j)[g];
        &v[off..off + n]
    }
}

impl<F: Field> GradedModule<F> for FreeModule<F> {
    fn algebra(&self) -> &Arc<Algebra<F>> {
        &self.algebra
    }

    fn min_degree(&self) -> i32 {
        self.degrees.first().copied().unwrap_or(0)
    }

    fn generation_bound(&self) -> i32 {
        self.degrees.last().copied().unwrap_or(0)
    }

    fn dimension(&self, j: i32) -> usize {
        self.degrees.iter().map(|&d| self.algebra.dim(j - d)).sum()
    }

    fn act_on_basis(&self, op_deg: i32, op: usize, mod_deg: i32, m: usize) -> Vec<F::Elem> {
        let f = self.algebra.field();
        let target = self.blocks(op_deg + mod_deg);
        let mut out = vec![f.zero(); self.dimension(op_deg + mod_deg)];
        let mut rest = m;
        for (g, _, n) in self.blocks(mod_deg) {
            if rest < n {
                let table = self.algebra.product_table(op_deg, mod_deg - self.degrees[g]);
                let (_, off, len) = target[g];
                out[off..off + len].clone_from_slice(&table[op][rest]);
                return out;
            }
            rest -= n;
        }
        panic!("module basis index out of range");
    }
}

/// The degree-`j` piece of a finitely presented module.
#[derive(Debug)]
struct ModuleDegree<F: Field> {
    relations: Subspace<F>,
    standard: Vec<usize>,
}

/// A finitely presented module `F / R`, where `F` is free and `R` is the
/// submodule generated by the given relations.
pub struct FpModule<F: Field> {
    free: FreeModule<F>,
    relations: Vec<(i32, Vec<F::Elem>)>,
    degrees: RwLock<HashMap<i32, Arc<ModuleDegree<F>>>>,
    actions: RwLock<HashMap<(i32, usize, i32), Arc<Vec<Vec<F::Elem>>>>>,
}

impl<F: Field> std::fmt::Debug for FpModule<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FpModule")
            .field("generators", &self.free.degrees)
            .field("relations", &self.relations.len())
            .finish()
    }
}

impl<F: Field> FpModule<F> {
    /// Relations are `(degree, coordinates in the free module of that degree)`.
    pub fn new(algebra: Arc<Algebra<F>>, generator_degrees: Vec<i32>, relations: Vec<(i32, Vec<F::Elem>)>) -> Self {
        let free = FreeModule::new(algebra, generator_degrees);
        for (d, r) in &relations {
            assert_eq!(r.len(), free.dimension(*d), "relation has the wrong length");
        }
        FpModule {
            free,
            relations,
            degrees: RwLock::new(HashMap::new()),
            actions: RwLock::new(HashMap::new()),
        }
    }

    pub fn free(algebra: Arc<Algebra<F>>, generator_degrees: Vec<i32>) -> Self {
        Self::new(algebra, generator_degrees, Vec::new())
    }

    /// `A` as a module over itself.
    pub fn algebra_module(algebra: Arc<Algebra<F>>) -> Self {
        Self::free(algebra, vec![0])
    }

    /// The residue field `k = A / I`, in degree 0.
    pub fn residue_field(algebra: Arc<Algebra<F>>) -> Self {
        let rels = (0..algebra.num_generators())
            .map(|g| algebra.generator_element(g))
            .collect();
        Self::new(algebra, vec![0], rels)
    }

    pub fn zero(algebra: Arc<Algebra<F>>) -> Self {
        Self::free(algebra, Vec::new())
    }

    pub fn generator_degrees(&self) -> &[i32] {
        self.free.degrees()
    }

    fn degree(&self, j: i32) -> Arc<ModuleDegree<F>> {
        if let Some(d) = self.degrees.read().unwrap().get(&j) {
            return d.clone();
        }
        let f = self.free.algebra.field().clone();
        let mut relations = Subspace::new(self.free.dimension(j));
        for (d, r) in &self.relations {
            let a = self.free.algebra.dim(j - d);
            for op in 0..a {
                let basis: Vec<F::Elem> = (0..a).map(|i| if i == op { f.one() } else { f.zero() }).collect();
                relations.add_vector(&f, &self.free.act(j - d, &basis, *d, r));
            }
        }
        let standard = relations.complement_columns();
        let built = Arc::new(ModuleDegree { relations, standard });
        self.degrees.write().unwrap().entry(j).or_insert(built).clone()
    }

    /// Quotient coordinates of a free-module element of degree `j`.
    pub fn project(&self, j: i32, v: &[F::Elem]) -> Vec<F::Elem> {
        self.degree(j).relations.quotient_coordinates(self.field(), v)
    }

    /// The free-module element represented by a quotient basis vector.
    pub fn lift(&self, j: i32, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let d = self.degree(j);
        let mut out = vec![f.zero(); self.free.dimension(j)];
        for (b, c) in v.iter().enumerate() {
            out[d.standard[b]] = c.clone();
        }
        out
    }

    fn action_table(&self, op_deg: i32, op: usize, mod_deg: i32) -> Arc<Vec<Vec<F::Elem>>> {
        let key = (op_deg, op, mod_deg);
        if let Some(t) = self.actions.read().unwrap().get(&key) {
            return t.clone();
        }
        let d = self.degree(mod_deg);
        let table: Vec<Vec<F::Elem>> = d
            .standard
            .iter()
            .map(|&col| {
                let image = self.free.act_on_basis(op_deg, op, mod_deg, col);
                self.project(op_deg + mod_deg, &image)
            })
            .collect();
        let table = Arc::new(table);
        self.actions.write().unwrap().entry(key).or_insert(table).clone()
    }
}

impl<F: Field> GradedModule<F> for FpModule<F> {
    fn algebra(&self) -> &Arc<Algebra<F>> {
        &self.free.algebra
    }

    fn min_degree(&self) -> i32 {
        self.free.min_degree()
    }

    fn generation_bound(&self) -> i32 {
        self.free.generation_bound()
    }

    fn dimension(&self, j: i32) -> usize {
        if self.free.degrees.is_empty() || j < self.min_degree() {
            return 0;
        }
        self.degree(j).standard.len()
    }

    fn act_on_basis(&self, op_deg: i32, op: usize, mod_deg: i32, m: usize) -> Vec<F::Elem> {
        self.action_table(op_deg, op, mod_deg)[m].clone()
    }
}

/// Socle dimensions: `{m ∈ M_j : x_g m = 0 for every generator x_g}`.
pub fn socle<F: Field, M: GradedModule<F> + ?Sized>(m: &M, window: Window) -> GradedTable {
    let f = m.field().clone();
    let n = m.algebra().num_generators();
    GradedTable::from_fn(window, |j| {
        let dim = m.dimension(j);
        if dim == 0 {
            return 0;
        }
        let mut stacked = Matrix::zero(&f, 0, dim);
        for g in 0..n {
            stacked = stacked.vstack(&m.generator_action(g, j));
        }
        dim - stacked.rank(&f)
    })
}
