//! Minimal free resolutions, Betti tables, `Ext_A(k, M)` and smallness.
//!
//! The resolution is built degree by degree: in internal degree `j`, stage
//! `s` receives one new generator for each vector of `ker d_{s-1}` (taken in
//! echelon order) that is not already in the image of the generators found
//! so far. Generators are therefore added only where forced, which makes the
//! result minimal.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::complex::{ChainComplex, GradedVectorSpace};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{kernel, Matrix, Subspace};
use crate::module::{top_degree, FpModule, FreeModule, GradedModule};
use crate::table::{BigradedTable, Window};

/// Degree step used to bound where syzygy generators can appear: the larger
/// of the top generator degree and the top relation degree of `A`.
pub fn syzygy_step<F: Field>(algebra: &Algebra<F>) -> i32 {
    let p = algebra.presentation();
    p.max_generator_degree().max(p.max_relation_degree()).max(1)
}

/// `Σ_k v_k · (op ⋅ basis_k)` for a single algebra basis element `op`.
fn act_basis<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    op_deg: i32,
    op: usize,
    deg: i32,
    v: &[F::Elem],
) -> Vec<F::Elem> {
    let f = m.field();
    let mut out = vec![f.zero(); m.dimension(op_deg + deg)];
    for (k, c) in v.iter().enumerate() {
        if !f.is_zero(c) {
            f.axpy(&mut out, c, &m.act_on_basis(op_deg, op, deg, k));
        }
    }
    out
}

/// Multiplication of an arbitrary algebra element on a module vector.
fn act_element<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    op_deg: i32,
    op: &[F::Elem],
    deg: i32,
    v: &[F::Elem],
) -> Vec<F::Elem> {
    let f = m.field();
    let mut out = vec![f.zero(); m.dimension(op_deg + deg)];
    for (i, a) in op.iter().enumerate() {
        if !f.is_zero(a) {
            f.axpy(&mut out, a, &act_basis(m, op_deg, i, deg, v));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Stage<F: Field> {
    pub module: FreeModule<F>,
    /// `d(e_h)` for each generator `h`, in the previous stage (or in `M` for
    /// stage 0) in degree `|e_h|`.
    pub images: Vec<Vec<F::Elem>>,
}

#[derive(Clone, Debug)]
pub struct FreeResolution<F: Field> {
    algebra: Arc<Algebra<F>>,
    computed: Window,
    guaranteed: Window,
    stages: Vec<Stage<F>>,
    /// `(s, j)` ↦ `d_s` in degree `j`; `s = 0` is the augmentation onto `M`.
    matrices: BTreeMap<(usize, i32), Matrix<F>>,
    target_dims: BTreeMap<i32, usize>,
}

/// Resolves `m` through stage `s_max` in every internal degree up to `window.hi`.
///
/// The window must start at or below the lowest degree of `m` and leave
/// `s_max · d_max` degrees of headroom above its generators and relations.
pub fn minimal_free_resolution<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    s_max: usize,
    window: Window,
) -> Result<FreeResolution<F>> {
    let algebra = m.algebra().clone();
    let dmax = algebra.presentation().max_generator_degree();
    let headroom = s_max as i32 * dmax;
    let top = m.generation_bound().max(m.min_degree());
    if window.lo > m.min_degree() || window.hi < top + headroom {
        return Err(Error::WindowInsufficient {
            window,
            reason: format!(
                "need degrees {} through {} for generators in [{}, {top}] and {s_max} stages",
                m.min_degree(),
                top + headroom,
                m.min_degree()
            ),
        });
    }
    Ok(resolve(
        m,
        s_max,
        m.min_degree(),
        window.hi,
        Window::new(window.lo, window.hi - headroom),
    ))
}

fn resolve<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    s_max: usize,
    lo: i32,
    hi: i32,
    guaranteed: Window,
) -> FreeResolution<F> {
    let algebra = m.algebra().clone();
    let f = algebra.field().clone();
    let mut stages: Vec<Stage<F>> = (0..=s_max)
        .map(|_| Stage {
            module: FreeModule::new(algebra.clone(), Vec::new()),
            images: Vec::new(),
        })
        .collect();
    let mut matrices = BTreeMap::new();
    let mut target_dims = BTreeMap::new();
    for j in lo..=hi {
        target_dims.insert(j, m.dimension(j));
        for s in 0..=s_max {
            let (before, rest) = stages.split_at_mut(s);
            let stage = &mut rest[0];
            let target_dim = if s == 0 {
                m.dimension(j)
            } else {
                before[s - 1].module.dimension(j)
            };
            let cycles: Vec<Vec<F::Elem>> = if s == 0 {
                identity_basis(&f, target_dim)
            } else {
                kernel(&f, &matrices[&(s - 1, j)])
            };
            let mut columns = Vec::new();
            for (h, &dh) in stage.module.degrees().iter().enumerate() {
                let n = algebra.dim(j - dh);
                for b in 0..n {
                    let col = if s == 0 {
                        act_basis(m, j - dh, b, dh, &stage.images[h])
                    } else {
                        act_basis(&before[s - 1].module, j - dh, b, dh, &stage.images[h])
                    };
                    columns.push(col);
                }
            }
            if !cycles.is_empty() {
                let mut image = Subspace::spanned_by(&f, target_dim, &columns);
                for z in cycles {
                    if image.add_vector(&f, &z) {
                        stage.module.push_generator(j);
                        stage.images.push(z.clone());
                        columns.push(z);
                    }
                }
            }
            matrices.insert((s, j), Matrix::from_columns(&f, target_dim, &columns));
        }
    }
    FreeResolution {
        algebra,
        computed: Window::new(lo, hi),
        guaranteed,
        stages,
        matrices,
        target_dims,
    }
}

fn identity_basis<F: Field>(f: &F, n: usize) -> Vec<Vec<F::Elem>> {
    (0..n)
        .map(|i| (0..n).map(|k| if k == i { f.one() } else { f.zero() }).collect())
        .collect()
}

impl<F: Field> FreeResolution<F> {
    pub fn algebra(&self) -> &Arc<Algebra<F>> {
        &self.algebra
    }

    /// Internal degrees in which every stage was computed.
    pub fn computed_window(&self) -> Window {
        self.computed
    }

    /// Sub-window in which exactness is certified by the headroom rule.
    pub fn guaranteed_window(&self) -> Window {
        self.guaranteed
    }

    pub fn stages(&self) -> &[Stage<F>] {
        &self.stages
    }

    pub fn s_max(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn generator_degrees(&self, s: usize) -> &[i32] {
        self.stages[s].module.degrees()
    }

    /// `d_s : F_s → F_{s-1}` in degree `j` (`s = 0` maps onto the resolved module).
    pub fn differential(&self, s: usize, j: i32) -> Option<&Matrix<F>> {
        self.matrices.get(&(s, j))
    }

    pub fn betti_table(&self) -> BigradedTable {
        let mut t = BigradedTable::new();
        for (s, st) in self.stages.iter().enumerate() {
            for &d in st.module.degrees() {
                t.set(s as i32, d, t.get(s as i32, d) + 1);
            }
        }
        t
    }

    /// Total rank of each stage.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.module.rank()).collect()
    }

    /// Length of the resolution when some stage within range is zero.
    pub fn length(&self) -> Option<usize> {
        let s = self.stages.iter().position(|s| s.module.rank() == 0)?;
        Some(s.saturating_sub(1))
    }

    /// Generators found above `base + s · step` at stage `s`.
    pub fn degree_bound_violations(&self, base: i32, step: i32) -> Vec<(usize, i32)> {
        let mut out = Vec::new();
        for (s, st) in self.stages.iter().enumerate() {
            for &d in st.module.degrees() {
                if d > base + s as i32 * step {
                    out.push((s, d));
                }
            }
        }
        out
    }

    /// Every differential coefficient lies in the augmentation ideal: no
    /// generator maps onto a unit multiple of a same-degree generator.
    pub fn is_minimal(&self) -> bool {
        let f = self.algebra.field();
        self.stages.iter().enumerate().skip(1).all(|(s, st)| {
            let prev = &self.stages[s - 1].module;
            st.module.degrees().iter().zip(&st.images).all(|(&dh, img)| {
                prev.degrees()
                    .iter()
                    .enumerate()
                    .filter(|(_, &dg)| dg == dh)
                    .all(|(g, _)| prev.coefficient(dh, img, g).iter().all(|c| f.is_zero(c)))
            })
        })
    }

    /// The resolution `F_{s_max} → … → F_0` as a chain complex over the computed window.
    pub fn to_chain_complex(&self) -> ChainComplex<F> {
        let w = self.computed;
        let terms = self
            .stages
            .iter()
            .enumerate()
            .map(|(s, st)| {
                (
                    s as i32,
                    GradedVectorSpace::from_dims(w, w.degrees().map(|j| (j, st.module.dimension(j)))),
                )
            })
            .collect();
        let diffs = self
            .matrices
            .iter()
            .filter(|((s, _), _)| *s > 0)
            .map(|(&(s, j), m)| ((s as i32, j), m.clone()))
            .collect();
        ChainComplex::new(self.algebra.field().clone(), (0, self.s_max() as i32), w, terms, diffs)
            .expect("resolution differentials compose to zero")
    }

    /// Homology vanishes at stages `1 ≤ s < s_max` and `H_0` matches the
    /// resolved module, throughout the guaranteed window.
    pub fn is_exact(&self) -> bool {
        let f = self.algebra.field();
        let c = self.to_chain_complex();
        for j in self.guaranteed.degrees() {
            if !self.computed.contains(j) {
                continue;
            }
            let eps_rank = self.matrices.get(&(0, j)).map_or(0, |m| m.rank(f));
            if eps_rank != self.target_dims.get(&j).copied().unwrap_or(0) {
                return false;
            }
            let d1_rank = self.matrices.get(&(1, j)).map_or(0, |m| m.rank(f));
            if c.dim(0, j) - eps_rank != d1_rank {
                return false;
            }
        }
        (1..self.s_max() as i32).all(|s| {
            let h = c.homology(s);
            self.guaranteed.degrees().all(|j| h.dim(j) == 0)
        })
    }
}

/// `Ext^s_A(k, M)_j` for `0 ≤ s ≤ s_max`, `j` in `window`.
///
/// Computed from the minimal resolution `F_•` of `k` as the cohomology of
/// `C^s_j = ⊕_{g ∈ F_s} M_{|g| + j}`, so a map out of `Σ^d A` carries
/// internal degree `-d`. The resolution runs to stage `s_max + 1` and degree
/// `(s_max + 2) · step`, which covers every generator that can contribute.
pub fn ext_into<F: Field, M: GradedModule<F> + ?Sized>(m: &M, s_max: usize, window: Window) -> BigradedTable {
    let algebra = m.algebra().clone();
    let k = FpModule::residue_field(algebra.clone());
    let step = syzygy_step(&algebra);
    let bound = (s_max as i32 + 2) * step;
    let res = resolve(&k, s_max + 1, 0, bound, Window::new(0, bound));
    let mut table = BigradedTable::new();
    for (s, j) in res.degree_bound_violations(0, step) {
        table.flag(s as i32, -j);
    }
    ext_from_resolution(&res, m, s_max, window, &mut table);
    table
}

/// Cohomology of `Hom_A(F_•, M)` for a resolution of `k`.
pub fn ext_from_resolution<F: Field, M: GradedModule<F> + ?Sized>(
    res: &FreeResolution<F>,
    m: &M,
    s_max: usize,
    window: Window,
    table: &mut BigradedTable,
) {
    let f = m.field().clone();
    assert!(res.s_max() > s_max, "resolution must reach stage s_max + 1");
    for j in window.degrees() {
        let coboundaries: Vec<Matrix<F>> = (0..=s_max).map(|s| hom_coboundary(res, m, s, j)).collect();
        for s in 0..=s_max {
            let dim: usize = res.generator_degrees(s).iter().map(|&d| m.dimension(d + j)).sum();
            if dim == 0 {
                continue;
            }
            let cycles = dim - coboundaries[s].rank(&f);
            let boundaries = if s == 0 { 0 } else { coboundaries[s - 1].rank(&f) };
            table.set(s as i32, j, cycles - boundaries);
        }
    }
}

/// `δ^s_j : C^s_j → C^{s+1}_j`, `(δφ)(e_h) = Σ_g a_{hg} φ(e_g)` where `d e_h = Σ_g a_{hg} e_g`.
fn hom_coboundary<F: Field, M: GradedModule<F> + ?Sized>(
    res: &FreeResolution<F>,
    m: &M,
    s: usize,
    j: i32,
) -> Matrix<F> {
    let f = m.field();
    let src = &res.stages[s];
    let dst = &res.stages[s + 1];
    let src_dims: Vec<usize> = src.module.degrees().iter().map(|&d| m.dimension(d + j)).collect();
    let dst_dims: Vec<usize> = dst.module.degrees().iter().map(|&d| m.dimension(d + j)).collect();
    let rows: usize = dst_dims.iter().sum();
    let cols: usize = src_dims.iter().sum();
    let mut out = Matrix::zero(f, rows, cols);
    if rows == 0 || cols == 0 {
        return out;
    }
    let mut row_off = 0;
    for (h, &dh) in dst.module.degrees().iter().enumerate() {
        let img = &dst.images[h];
        let mut col_off = 0;
        for (g, &dg) in src.module.degrees().iter().enumerate() {
            let a = src.module.coefficient(dh, img, g);
            if a.iter().any(|c| !f.is_zero(c)) {
                for b in 0..src_dims[g] {
                    let mut e = vec![f.zero(); src_dims[g]];
                    e[b] = f.one();
                    let v = act_element(m, dh - dg, a, dg + j, &e);
                    for (r, x) in v.into_iter().enumerate() {
                        out.set(row_off + r, col_off + b, x);
                    }
                }
            }
            col_off += src_dims[g];
        }
        row_off += dst_dims[h];
    }
    out
}

/// Bounded-window smallness judgment for a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallnessVerdict {
    /// Length of a terminating minimal resolution, when one was found.
    pub small: Option<usize>,
    pub s_max: usize,
    /// Total rank of each resolution stage `0..=s_max`.
    pub betti: Vec<usize>,
    /// Total dimension of the module, when certified finite.
    pub finite_dimension: Option<usize>,
    /// Total dimension of the algebra when it is finite (the algebra is then
    /// built from `k` in finitely many steps).
    pub cosmall: Option<usize>,
}

impl SmallnessVerdict {
    pub fn label(&self) -> &'static str {
        if self.small.is_some() {
            "small"
        } else {
            "not-small-up-to-bound"
        }
    }
}

pub fn classify_smallness<F: Field, M: GradedModule<F> + ?Sized>(
    m: &M,
    s_max: usize,
    window: Window,
) -> SmallnessVerdict {
    let algebra = m.algebra().clone();
    let step = syzygy_step(&algebra);
    let base = m.generation_bound().max(m.min_degree());
    let hi = base + (s_max as i32 + 1) * step;
    let res = resolve(m, s_max, m.min_degree(), hi, Window::new(m.min_degree(), hi));
    let limit = window.hi.max(hi);
    let finite_dimension = top_degree(m, limit).map(|top| (m.min_degree()..=top).map(|j| m.dimension(j)).sum());
    let cosmall = algebra
        .top_degree(limit)
        .map(|top| (0..=top).map(|j| algebra.dim(j)).sum());
    SmallnessVerdict {
        small: res.length(),
        s_max,
        betti: res.betti_numbers(),
        finite_dimension,
        cosmall,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tests::algebra;
    use crate::algebra::Generator;
    use crate::field::Fp;

    fn f2() -> Fp {
        Fp::new(2).unwrap()
    }

    fn poly1() -> Arc<Algebra<Fp>> {
        Arc::new(algebra(f2(), vec![Generator::even("x", 1)], &[]))
    }

    fn truncated(p: u32, n: u32) -> Arc<Algebra<Fp>> {
        Arc::new(algebra(
            Fp::new(p).unwrap(),
            vec![Generator::even("x", 1)],
            &[&[(&[n], 1)]],
        ))
    }

    fn square_zero() -> Arc<Algebra<Fp>> {
        Arc::new(algebra(
            f2(),
            vec![Generator::even("x", 1), Generator::even("y", 1)],
            &[&[(&[2, 0], 1)], &[(&[1, 1], 1)], &[(&[0, 2], 1)]],
        ))
    }

    #[test]
    fn residue_field_of_polynomial_ring() {
        let k = FpModule::residue_field(poly1());
        let res = minimal_free_resolution(&k, 3, Window::new(0, 8)).unwrap();
        let b: Vec<_> = res.betti_table().nonzero().collect();
        assert_eq!(b, vec![((0, 0), 1), ((1, 1), 1)]);
        assert!(res.is_minimal());
        assert!(res.is_exact());
        assert_eq!(res.length(), Some(1));
    }

    #[test]
    fn square_zero_betti_numbers_double() {
        let k = FpModule::residue_field(square_zero());
        let res = minimal_free_resolution(&k, 6, Window::new(0, 8)).unwrap();
        assert_eq!(res.betti_numbers(), vec![1, 2, 4, 8, 16, 32, 64]);
        for s in 0..=6 {
            assert_eq!(res.betti_table().get(s, s), 1 << s);
        }
        assert!(res.is_minimal());
        assert!(res.is_exact());
    }

    #[test]
    fn free_module_resolves_in_one_stage() {
        let a = square_zero();
        let m = FpModule::algebra_module(a);
        let res = minimal_free_resolution(&m, 2, Window::new(0, 6)).unwrap();
        assert_eq!(res.betti_numbers(), vec![1, 0, 0]);
    }

    #[test]
    fn window_must_have_headroom() {
        let k = FpModule::residue_field(poly1());
        let err = minimal_free_resolution(&k, 4, Window::new(0, 3)).unwrap_err();
        assert!(matches!(err, Error::WindowInsufficient { .. }));
        assert!(minimal_free_resolution(&k, 1, Window::new(1, 5)).is_err());
    }

    #[test]
    fn zero_module_has_empty_resolution() {
        let z = FpModule::zero(poly1());
        let res = minimal_free_resolution(&z, 2, Window::new(0, 4)).unwrap();
        assert!(res.betti_table().is_zero());
    }

    #[test]
    fn ext_conventions() {
        let a = poly1();
        let k = FpModule::residue_field(a.clone());
        let e = ext_into(&k, 3, Window::new(-6, 6));
        assert_eq!(e.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1), ((1, -1), 1)]);
        let e = ext_into(&FpModule::algebra_module(a), 3, Window::new(-6, 6));
        assert_eq!(e.nonzero().collect::<Vec<_>>(), vec![((1, -1), 1)]);
    }

    #[test]
    fn ext_zero_into_algebra_is_socle() {
        let e = ext_into(&FpModule::algebra_module(square_zero()), 2, Window::new(-6, 6));
        assert_eq!(e.row(0).collect::<Vec<_>>(), vec![(1, 2)]);
        for (p, n) in [(2, 2), (3, 3), (2, 5)] {
            let e = ext_into(&FpModule::algebra_module(truncated(p, n)), 3, Window::new(-10, 10));
            assert_eq!(e.nonzero().collect::<Vec<_>>(), vec![((0, n as i32 - 1), 1)]);
        }
    }

    #[test]
    fn smallness_examples() {
        let v = classify_smallness(&FpModule::residue_field(poly1()), 3, Window::new(-8, 8));
        assert_eq!(v.small, Some(1));
        assert_eq!(v.label(), "small");
        for p in [2, 3] {
            let a = truncated(p, 2);
            let v = classify_smallness(&FpModule::residue_field(a), 10, Window::new(-8, 8));
            assert_eq!(v.small, None);
            assert_eq!(v.betti, vec![1; 11]);
            assert_eq!(v.cosmall, Some(2));
            assert_eq!(v.finite_dimension, Some(1));
        }
        let v = classify_smallness(&FpModule::algebra_module(poly1()), 3, Window::new(-8, 8));
        assert_eq!(v.cosmall, None);
        assert_eq!(v.finite_dimension, None);
    }
}
