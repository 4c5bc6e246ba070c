//! Finitely presented graded-commutative algebras.
//!
//! Degree-`j` pieces are computed by linear algebra alone: the degree-`j` part
//! of the ideal is spanned by the generator multiples of the ideal one
//! generator-degree lower together with the relations of degree `j`, and the
//! quotient basis consists of the monomials that are not leading monomials of
//! the reduced ideal. Monomials are ordered degree-lexicographically with the
//! generators in declaration order (`x_1 > x_2 > …`).
//!
//! Sign rule: generators of odd parity anticommute with each other and square
//! to zero, except in characteristic 2 where every generator commutes and no
//! square is forced to vanish.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Subspace;
use crate::table::{GradedTable, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    pub parity: Parity,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32, parity: Parity) -> Self {
        Generator {
            name: name.into(),
            degree,
            parity,
        }
    }

    pub fn even(name: impl Into<String>, degree: i32) -> Self {
        Self::new(name, degree, Parity::Even)
    }

    pub fn odd(name: impl Into<String>, degree: i32) -> Self {
        Self::new(name, degree, Parity::Odd)
    }
}

/// Exponent vector, one entry per generator.
pub type Monomial = Vec<u32>;

/// A polynomial in the free graded-commutative algebra: terms sorted by
/// decreasing monomial, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<F: Field> {
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> Polynomial<F> {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn from_map(field: &F, map: HashMap<Monomial, F::Elem>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }
}

/// Generators, relations and field: the data defining `A = k⟨gens⟩ / (rels)`.
#[derive(Clone, Debug)]
pub struct AlgebraPresentation<F: Field> {
    field: F,
    generators: Vec<Generator>,
    relations: Vec<Polynomial<F>>,
}

impl<F: Field> AlgebraPresentation<F> {
    /// Checks generator names and degrees and the homogeneity of each relation.
    /// Relations that vanish identically are dropped.
    pub fn new(field: F, generators: Vec<Generator>, relations: Vec<Polynomial<F>>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.degree < 1 {
                return Err(Error::InvalidPresentation(format!(
                    "generator `{}` has degree {}; generators need degree ≥ 1",
                    g.name, g.degree
                )));
            }
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidPresentation(format!("duplicate generator `{}`", g.name)));
            }
        }
        let p = AlgebraPresentation {
            field,
            generators,
            relations: Vec::new(),
        };
        let mut kept = Vec::new();
        for (i, r) in relations.into_iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            if r.terms.iter().any(|(m, _)| m.len() != p.generators.len()) {
                return Err(Error::InvalidPresentation(format!("relation {i} has wrong arity")));
            }
            let d0 = p.monomial_degree(&r.terms[0].0);
            if let Some((m, _)) = r.terms.iter().find(|(m, _)| p.monomial_degree(m) != d0) {
                return Err(Error::Inhomogeneous {
                    line: i + 1,
                    first: d0,
                    second: p.monomial_degree(m),
                });
            }
            if d0 == 0 {
                return Err(Error::InvalidPresentation(
                    "a nonzero constant relation kills the algebra".into(),
                ));
            }
            kept.push(r);
        }
        Ok(AlgebraPresentation { relations: kept, ..p })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Polynomial<F>] {
        &self.relations
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// True when generator `g` anticommutes and squares to zero.
    pub fn is_exterior(&self, g: usize) -> bool {
        self.generators[g].parity == Parity::Odd && self.field.characteristic() != 2
    }

    pub fn monomial_degree(&self, m: &[u32]) -> i32 {
        m.iter().zip(&self.generators).map(|(&e, g)| e as i32 * g.degree).sum()
    }

    pub fn relation_degree(&self, r: &Polynomial<F>) -> i32 {
        r.terms.first().map_or(0, |(m, _)| self.monomial_degree(m))
    }

    pub fn max_generator_degree(&self) -> i32 {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }

    pub fn min_generator_degree(&self) -> i32 {
        self.generators.iter().map(|g| g.degree).min().unwrap_or(0)
    }

    pub fn max_relation_degree(&self) -> i32 {
        self.relations
            .iter()
            .map(|r| self.relation_degree(r))
            .max()
            .unwrap_or(0)
    }

    /// Product of two monomials with its sign, or `None` when it vanishes.
    pub fn multiply_monomials(&self, a: &[u32], b: &[u32]) -> Option<(Monomial, bool)> {
        let n = self.generators.len();
        let mut out = Vec::with_capacity(n);
        let mut odd_in_a_after = 0u32;
        let mut negative = false;
        // Walk generators from last to first: b's odd x_k passes a's odd x_i with i > k.
        for k in (0..n).rev() {
            let e = a[k] + b[k];
            if self.is_exterior(k) {
                if e > 1 {
                    return None;
                }
                if b[k] == 1 && odd_in_a_after % 2 == 1 {
                    negative = !negative;
                }
                odd_in_a_after += a[k];
            }
            out.push(e);
        }
        out.reverse();
        Some((out, negative))
    }

    pub fn variable(&self, g: usize) -> Polynomial<F> {
        let mut m = vec![0; self.generators.len()];
        m[g] = 1;
        Polynomial {
            terms: vec![(m, self.field.one())],
        }
    }

    pub fn constant(&self, c: F::Elem) -> Polynomial<F> {
        if self.field.is_zero(&c) {
            return Polynomial::zero();
        }
        Polynomial {
            terms: vec![(vec![0; self.generators.len()], c)],
        }
    }

    pub fn poly_add(&self, a: &Polynomial<F>, b: &Polynomial<F>) -> Polynomial<F> {
        let f = &self.field;
        let mut map: HashMap<Monomial, F::Elem> = HashMap::new();
        for (m, c) in a.terms.iter().chain(&b.terms) {
            let e = map.entry(m.clone()).or_insert_with(|| f.zero());
            *e = f.add(e, c);
        }
        Polynomial::from_map(f, map)
    }

    pub fn poly_neg(&self, a: &Polynomial<F>) -> Polynomial<F> {
        Polynomial {
            terms: a.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect(),
        }
    }

    pub fn poly_mul(&self, a: &Polynomial<F>, b: &Polynomial<F>) -> Polynomial<F> {
        let f = &self.field;
        let mut map: HashMap<Monomial, F::Elem> = HashMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, neg)) = self.multiply_monomials(ma, mb) {
                    let mut c = f.mul(ca, cb);
                    if neg {
                        c = f.neg(&c);
                    }
                    let e = map.entry(m).or_insert_with(|| f.zero());
                    *e = f.add(e, &c);
                }
            }
        }
        Polynomial::from_map(f, map)
    }

    pub fn poly_pow(&self, a: &Polynomial<F>, n: u32) -> Polynomial<F> {
        let mut acc = self.constant(self.field.one());
        for _ in 0..n {
            acc = self.poly_mul(&acc, a);
        }
        acc
    }

    /// All monomials of degree `j`, in decreasing order.
    pub fn monomials_of_degree(&self, j: i32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if j < 0 {
            return out;
        }
        let mut cur = vec![0u32; self.generators.len()];
        self.enumerate(0, j, &mut cur, &mut out);
        out
    }

    fn enumerate(&self, g: usize, remaining: i32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if g == self.generators.len() {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let d = self.generators[g].degree;
        let mut max = (remaining / d) as u32;
        if self.is_exterior(g) {
            max = max.min(1);
        }
        for e in (0..=max).rev() {
            cur[g] = e;
            self.enumerate(g + 1, remaining - e as i32 * d, cur, out);
        }
        cur[g] = 0;
    }

    pub fn format_monomial(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.generators)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, g)| {
                if e == 1 {
                    g.name.clone()
                } else {
                    format!("{}^{}", g.name, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// The degree-`j` component: monomials, the ideal inside their span, the
/// standard monomials and the normal-form map.
#[derive(Debug)]
pub struct DegreeBasis<F: Field> {
    pub degree: i32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    ideal: Subspace<F>,
    standard: Vec<usize>,
    normal_forms: Vec<Vec<F::Elem>>,
}

impl<F: Field> DegreeBasis<F> {
    pub fn dim(&self) -> usize {
        self.standard.len()
    }

    /// Every monomial of this degree, in decreasing order.
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// The standard monomials forming the quotient basis.
    pub fn basis(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.standard.iter().map(move |&i| &self.monomials[i])
    }

    pub fn basis_monomial(&self, b: usize) -> &Monomial {
        &self.monomials[self.standard[b]]
    }

    pub fn monomial_index(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Dimension of the degree-`j` part of the ideal of relations.
    pub fn ideal_dim(&self) -> usize {
        self.ideal.dim()
    }

    /// Normal form of the monomial with the given index, in basis coordinates.
    pub fn monomial_normal_form(&self, i: usize) -> &[F::Elem] {
        &self.normal_forms[i]
    }

    /// Normal form of a vector in monomial coordinates.
    pub fn normal_form(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.monomials.len());
        let mut out = vec![field.zero(); self.dim()];
        for (i, c) in v.iter().enumerate() {
            field.axpy(&mut out, c, &self.normal_forms[i]);
        }
        out
    }

    /// Embeds basis coordinates into monomial coordinates.
    pub fn lift(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = vec![field.zero(); self.monomials.len()];
        for (b, c) in v.iter().enumerate() {
            out[self.standard[b]] = c.clone();
        }
        out
    }
}

/// `table[a][b]` is the product of basis elements `a` (degree i) and `b`
/// (degree j) in the basis of degree `i + j`.
pub type ProductTable<E> = Vec<Vec<Vec<E>>>;

/// A presented algebra with memoized degree bases and product tables.
///
/// Memo tables are filled under a write lock by whichever caller first needs
/// a degree; afterwards they are read concurrently.
pub struct Algebra<F: Field> {
    presentation: AlgebraPresentation<F>,
    bases: RwLock<HashMap<i32, Arc<DegreeBasis<F>>>>,
    products: RwLock<HashMap<(i32, i32), Arc<ProductTable<F::Elem>>>>,
}

impl<F: Field> fmt::Debug for Algebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Algebra")
            .field("presentation", &self.presentation)
            .finish()
    }
}

/// Element of a single degree: `(degree, coordinates in the degree basis)`.
pub type Element<E> = (i32, Vec<E>);

impl<F: Field> Algebra<F> {
    pub fn new(presentation: AlgebraPresentation<F>) -> Self {
        Algebra {
            presentation,
            bases: RwLock::new(HashMap::new()),
            products: RwLock::new(HashMap::new()),
        }
    }

    pub fn presentation(&self) -> &AlgebraPresentation<F> {
        &self.presentation
    }

    pub fn field(&self) -> &F {
        &self.presentation.field
    }

    pub fn generators(&self) -> &[Generator] {
        &self.presentation.generators
    }

    pub fn num_generators(&self) -> usize {
        self.presentation.generators.len()
    }

    pub fn degree_basis(&self, j: i32) -> Arc<DegreeBasis<F>> {
        if let Some(b) = self.bases.read().unwrap().get(&j) {
            return b.clone();
        }
        let built = Arc::new(self.build_degree(j));
        self.bases.write().unwrap().entry(j).or_insert(built).clone()
    }

    fn build_degree(&self, j: i32) -> DegreeBasis<F> {
        let p = &self.presentation;
        let f = &p.field;
        let monomials = p.monomials_of_degree(j);
        let index: HashMap<Monomial, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ideal = Subspace::new(monomials.len());
        if j > 0 {
            for (g, gen) in p.generators.iter().enumerate() {
                if gen.degree > j {
                    continue;
                }
                let lower = self.degree_basis(j - gen.degree);
                let mut x = vec![0; p.generators.len()];
                x[g] = 1;
                for row in lower.ideal.basis() {
                    let mut v = vec![f.zero(); monomials.len()];
                    for (i, c) in row.iter().enumerate() {
                        if f.is_zero(c) {
                            continue;
                        }
                        if let Some((m, neg)) = p.multiply_monomials(&x, &lower.monomials[i]) {
                            let k = index[&m];
                            let c = if neg { f.neg(c) } else { c.clone() };
                            v[k] = f.add(&v[k], &c);
                        }
                    }
                    ideal.add_vector(f, &v);
                }
            }
            for r in &p.relations {
                if p.relation_degree(r) != j {
                    continue;
                }
                let mut v = vec![f.zero(); monomials.len()];
                for (m, c) in &r.terms {
                    v[index[m]] = c.clone();
                }
                ideal.add_vector(f, &v);
            }
        }
        let standard = ideal.complement_columns();
        let normal_forms = (0..monomials.len())
            .map(|i| {
                let mut e = vec![f.zero(); monomials.len()];
                e[i] = f.one();
                ideal.quotient_coordinates(f, &e)
            })
            .collect();
        DegreeBasis {
            degree: j,
            monomials,
            index,
            ideal,
            standard,
            normal_forms,
        }
    }

    pub fn dim(&self, j: i32) -> usize {
        if j < 0 {
            return 0;
        }
        self.degree_basis(j).dim()
    }

    pub fn hilbert_function(&self, window: Window) -> GradedTable {
        GradedTable::from_fn(window, |j| self.dim(j))
    }

    pub fn product_table(&self, i: i32, j: i32) -> Arc<ProductTable<F::Elem>> {
        if let Some(t) = self.products.read().unwrap().get(&(i, j)) {
            return t.clone();
        }
        let f = self.field();
        let (bi, bj, bk) = (self.degree_basis(i), self.degree_basis(j), self.degree_basis(i + j));
        let zero = vec![f.zero(); bk.dim()];
        let table: ProductTable<F::Elem> = (0..bi.dim())
            .map(|a| {
                (0..bj.dim())
                    .map(|b| {
                        match self
                            .presentation
                            .multiply_monomials(bi.basis_monomial(a), bj.basis_monomial(b))
                        {
                            None => zero.clone(),
                            Some((m, neg)) => {
                                let mut v = bk.normal_forms[bk.index[&m]].clone();
                                if neg {
                                    f.scale(&mut v, &f.neg(&f.one()));
                                }
                                v
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let table = Arc::new(table);
        self.products.write().unwrap().entry((i, j)).or_insert(table).clone()
    }

    /// Product of homogeneous elements given in basis coordinates.
    pub fn multiply(&self, i: i32, u: &[F::Elem], j: i32, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let mut out = vec![f.zero(); self.dim(i + j)];
        if i < 0 || j < 0 {
            return out;
        }
        let table = self.product_table(i, j);
        for (a, ca) in u.iter().enumerate() {
            if f.is_zero(ca) {
                continue;
            }
            for (b, cb) in v.iter().enumerate() {
                if f.is_zero(cb) {
                    continue;
                }
                f.axpy(&mut out, &f.mul(ca, cb), &table[a][b]);
            }
        }
        out
    }

    pub fn one(&self) -> Element<F::Elem> {
        (0, vec![self.field().one()])
    }

    /// The image of generator `g` in the quotient.
    pub fn generator_element(&self, g: usize) -> Element<F::Elem> {
        let p = &self.presentation;
        let mut m = vec![0; p.generators.len()];
        m[g] = 1;
        let d = p.generators[g].degree;
        let basis = self.degree_basis(d);
        (d, basis.normal_forms[basis.index[&m]].clone())
    }

    /// Reduces a homogeneous polynomial of the free algebra.
    pub fn element_from_polynomial(&self, poly: &Polynomial<F>) -> Result<Element<F::Elem>> {
        let p = &self.presentation;
        let f = self.field();
        let Some((m0, _)) = poly.terms.first() else {
            return Ok((0, vec![f.zero(); 1]));
        };
        let d = p.monomial_degree(m0);
        let basis = self.degree_basis(d);
        let mut v = vec![f.zero(); basis.monomials.len()];
        for (m, c) in &poly.terms {
            let dm = p.monomial_degree(m);
            if dm != d {
                return Err(Error::Inhomogeneous {
                    line: 0,
                    first: d,
                    second: dm,
                });
            }
            v[basis.index[m]] = c.clone();
        }
        Ok((d, basis.normal_form(f, &v)))
    }

    pub fn power(&self, x: &Element<F::Elem>, n: u32) -> Element<F::Elem> {
        let mut acc = self.one();
        for _ in 0..n {
            let prod = self.multiply(acc.0, &acc.1, x.0, &x.1);
            acc = (acc.0 + x.0, prod);
        }
        acc
    }

    pub fn format_element(&self, j: i32, v: &[F::Elem]) -> String {
        let f = self.field();
        let basis = self.degree_basis(j);
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(b, c)| {
                let m = self.presentation.format_monomial(basis.basis_monomial(b));
                if f.is_one(c) {
                    m
                } else {
                    format!("{}*{}", f.format(c), m)
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn basis_labels(&self, j: i32) -> Vec<String> {
        let basis = self.degree_basis(j);
        basis.basis().map(|m| self.presentation.format_monomial(m)).collect()
    }

    /// `Some(top)` when the algebra provably vanishes above degree `top`: a run
    /// of `d_max` consecutive zero degrees forces every higher degree to vanish.
    pub fn top_degree(&self, search_limit: i32) -> Option<i32> {
        let dmax = self.presentation.max_generator_degree();
        if dmax == 0 {
            return Some(0);
        }
        let mut last_nonzero = 0;
        let mut run = 0;
        for j in 1..=search_limit {
            if self.dim(j) == 0 {
                run += 1;
                if run >= dmax {
                    return Some(last_nonzero);
                }
            } else {
                last_nonzero = j;
                run = 0;
            }
        }
        None
    }
}
