//! The two-sided bar construction `B(k, E, k)` and `Tor^E(k, k)`.
//!
//! The normalized complex has `Ī^{⊗s}` in weight `s` with differential
//! `d(a₁|…|a_s) = Σ (-1)^{e_i} a₁|…|a_i a_{i+1}|…|a_s`, where
//! `e_i = Σ_{k ≤ i} (|a_k| + 1)`; the outer faces vanish because they apply the
//! augmentation to elements of `Ī`. The unnormalized complex uses `E^{⊗s}` with
//! plain simplicial signs and is kept as a cross-check.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::Algebra;
use crate::complex::{ChainComplex, GradedVectorSpace};
use crate::duality::{gorenstein_verdict, GorensteinVerdict, Outcome};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::koszul::{augmentation_ideal_generators, local_cohomology};
use crate::linalg::{Matrix, Subspace};
use crate::module::FpModule;
use crate::resolution::ext_into;
use crate::table::{BigradedTable, GradedTable, Window};

/// Basis of one bar term in one internal degree, grouped by degree composition.
struct Layout {
    blocks: Vec<Block>,
    index: HashMap<Vec<i32>, usize>,
    dim: usize,
}

struct Block {
    degrees: Vec<i32>,
    dims: Vec<usize>,
    offset: usize,
    size: usize,
}

impl Layout {
    fn new<F: Field>(alg: &Algebra<F>, s: usize, j: i32, normalized: bool) -> Layout {
        let lo = i32::from(normalized);
        let mut comps = Vec::new();
        compositions(alg, s, j, lo, &mut Vec::new(), &mut comps);
        let mut layout = Layout {
            blocks: Vec::new(),
            index: HashMap::new(),
            dim: 0,
        };
        for degrees in comps {
            let dims: Vec<usize> = degrees.iter().map(|&d| alg.dim(d)).collect();
            let size = dims.iter().product();
            layout.index.insert(degrees.clone(), layout.blocks.len());
            layout.blocks.push(Block {
                degrees,
                dims,
                offset: layout.dim,
                size,
            });
            layout.dim += size;
        }
        layout
    }

    /// Flat position of a tensor of basis elements; the last factor varies fastest.
    fn position(&self, degrees: &[i32], factors: &[usize]) -> Option<usize> {
        let b = &self.blocks[*self.index.get(degrees)?];
        let mut pos = 0;
        for (&x, &n) in factors.iter().zip(&b.dims) {
            pos = pos * n + x;
        }
        Some(b.offset + pos)
    }
}

fn compositions<F: Field>(alg: &Algebra<F>, s: usize, j: i32, lo: i32, prefix: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
    if s == 0 {
        if j == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let rest_min = lo * (s as i32 - 1);
    for d in lo..=j - rest_min {
        if alg.dim(d) == 0 {
            continue;
        }
        prefix.push(d);
        compositions(alg, s - 1, j - d, lo, prefix, out);
        prefix.pop();
    }
}

fn unflatten(mut pos: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = pos % dims[k];
        pos /= dims[k];
    }
    out
}

/// Matrix of the bar differential from weight `s` to weight `s - 1` in degree `j`.
fn differential<F: Field>(alg: &Algebra<F>, s: usize, j: i32, normalized: bool) -> Matrix<F> {
    let f = alg.field();
    let source = Layout::new(alg, s, j, normalized);
    let target = Layout::new(alg, s - 1, j, normalized);
    let mut m = Matrix::zero(f, target.dim, source.dim);
    let add = |m: &mut Matrix<F>, r: usize, c: usize, x: F::Elem| {
        let v = f.add(m.get(r, c), &x);
        m.set(r, c, v);
    };
    for block in &source.blocks {
        let degs = &block.degrees;
        for local in 0..block.size {
            let col = block.offset + local;
            let a = unflatten(local, &block.dims);
            if !normalized {
                // Outer faces: the augmentation is nonzero only on the unit.
                let last = s - 1;
                if degs[0] == 0 {
                    if let Some(r) = target.position(&degs[1..], &a[1..]) {
                        add(&mut m, r, col, f.one());
                    }
                }
                if degs[last] == 0 {
                    if let Some(r) = target.position(&degs[..last], &a[..last]) {
                        let x = if s.is_multiple_of(2) { f.one() } else { f.neg(&f.one()) };
                        add(&mut m, r, col, x);
                    }
                }
            }
            let mut e = 0i32;
            for p in 0..s - 1 {
                e += degs[p] + 1;
                let negative = if normalized { e % 2 != 0 } else { (p + 1) % 2 != 0 };
                let merged_deg = degs[p] + degs[p + 1];
                let mut t_degs = degs.clone();
                t_degs[p] = merged_deg;
                t_degs.remove(p + 1);
                if !target.index.contains_key(&t_degs) {
                    continue;
                }
                let table = alg.product_table(degs[p], degs[p + 1]);
                let product = &table[a[p]][a[p + 1]];
                let mut t_fac = a.clone();
                t_fac.remove(p + 1);
                for (b, c) in product.iter().enumerate() {
                    if f.is_zero(c) {
                        continue;
                    }
                    t_fac[p] = b;
                    let r = target.position(&t_degs, &t_fac).unwrap();
                    add(&mut m, r, col, if negative { f.neg(c) } else { c.clone() });
                }
            }
        }
    }
    m
}

fn check_connected<F: Field>(alg: &Algebra<F>) -> Result<()> {
    if alg.dim(0) != 1 {
        return Err(Error::InvalidPresentation(
            "bar construction needs a connected algebra".into(),
        ));
    }
    Ok(())
}

/// The bar complex in weights `0..=w_max + 1` over the nonnegative part of `window`.
pub fn bar_complex<F: Field>(
    alg: &Algebra<F>,
    w_max: usize,
    window: Window,
    normalized: bool,
) -> Result<ChainComplex<F>> {
    check_connected(alg)?;
    let degrees: Vec<i32> = window.degrees().filter(|&j| j >= 0).collect();
    let mut terms = BTreeMap::new();
    for s in 0..=w_max + 1 {
        let dims = degrees.iter().map(|&j| (j, Layout::new(alg, s, j, normalized).dim));
        terms.insert(s as i32, GradedVectorSpace::from_dims(window, dims));
    }
    let mut diffs = BTreeMap::new();
    for s in 1..=w_max + 1 {
        for &j in &degrees {
            let d = differential(alg, s, j, normalized);
            if d.rows() > 0 && d.cols() > 0 {
                diffs.insert((s as i32, j), d);
            }
        }
    }
    ChainComplex::new(alg.field().clone(), (0, w_max as i32 + 1), window, terms, diffs)
}

/// `Tor^E_s(k, k)_j` for `s ≤ w_max` from the normalized bar complex.
///
/// Weight `s` lives in degrees `≥ s · min_deg`, so degree `j` is complete once
/// `(w_max + 1) · min_deg > j`. Degrees that are not are flagged at `(w_max + 1, j)`.
pub fn bar_tor<F: Field>(alg: &Algebra<F>, w_max: usize, window: Window) -> Result<BigradedTable> {
    tor_table(alg, w_max, window, true)
}

/// The same table from the unnormalized complex. Much larger; for cross-checks.
pub fn bar_tor_unnormalized<F: Field>(alg: &Algebra<F>, w_max: usize, window: Window) -> Result<BigradedTable> {
    tor_table(alg, w_max, window, false)
}

/// Largest differential block, in matrix entries, that [`bar_tor`] will build.
pub const MAX_BLOCK_ENTRIES: u128 = 60_000_000;

/// `dims[s][j]` of the bar terms for `j ≤ j_max`, saturating.
fn term_dims<F: Field>(alg: &Algebra<F>, s_max: usize, j_max: i32, normalized: bool) -> Vec<Vec<u128>> {
    let lo = i32::from(normalized);
    let n = j_max.max(0) as usize + 1;
    let mut dims = vec![vec![0u128; n]; s_max + 1];
    dims[0][0] = 1;
    for s in 1..=s_max {
        for j in 0..n {
            let mut total = 0u128;
            for d in lo..=j as i32 {
                let prev = dims[s - 1][j - d as usize];
                total = total.saturating_add(prev.saturating_mul(alg.dim(d) as u128));
            }
            dims[s][j] = total;
        }
    }
    dims
}

fn tor_table<F: Field>(alg: &Algebra<F>, w_max: usize, window: Window, normalized: bool) -> Result<BigradedTable> {
    check_connected(alg)?;
    let f = alg.field();
    let min_deg = alg.presentation().min_generator_degree().max(1);
    let degrees: Vec<i32> = window.degrees().filter(|&j| j >= 0).collect();
    let cells: Vec<(usize, i32)> = degrees
        .iter()
        .flat_map(|&j| (1..=w_max + 1).map(move |s| (s, j)))
        .filter(|&(s, j)| !normalized || s as i32 * min_deg <= j)
        .collect();
    let sizes = term_dims(alg, w_max + 1, window.hi, normalized);
    for &(s, j) in &cells {
        let entries = sizes[s][j as usize].saturating_mul(sizes[s - 1][j as usize]);
        if entries > MAX_BLOCK_ENTRIES {
            return Err(Error::SizeLimit(format!(
                "bar differential d_{s} in degree {j} has {entries} entries; narrow the window"
            )));
        }
    }
    let ranks: HashMap<(usize, i32), usize> = cells
        .par_iter()
        .map(|&(s, j)| ((s, j), differential(alg, s, j, normalized).rank(f)))
        .collect();
    let rank = |s: usize, j: i32| ranks.get(&(s, j)).copied().unwrap_or(0);
    let mut table = BigradedTable::new();
    for &j in &degrees {
        for s in 0..=w_max {
            let n = Layout::new(alg, s, j, normalized).dim;
            let d = n - if s == 0 { 0 } else { rank(s, j) } - rank(s + 1, j);
            table.set(s as i32, j, d);
        }
        if (w_max as i32 + 1) * min_deg <= j {
            table.flag(w_max as i32 + 1, j);
        }
    }
    Ok(table)
}

/// `dim (Ī/Ī²)_j`: the minimal number of algebra generators in degree `j`.
pub fn indecomposables<F: Field>(alg: &Algebra<F>, window: Window) -> GradedTable {
    let f = alg.field();
    GradedTable::from_fn(window, |j| {
        if j <= 0 {
            return 0;
        }
        let n = alg.dim(j);
        let mut decomposable = Subspace::new(n);
        for a in 1..j {
            let table = alg.product_table(a, j - a);
            for row in table.iter() {
                for v in row {
                    decomposable.add_vector(f, v);
                }
            }
        }
        n - decomposable.dim()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessComparison {
    /// Internal degree `j` of `R`.
    pub degree: i32,
    /// `Σ_c dim H^c_I(R)_j`.
    pub local_cohomology: usize,
    /// `Σ_s dim Tor^E_s(k, k)_{j₀ - j}`.
    pub tor: usize,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftWitness {
    pub verdict: GorensteinVerdict,
    /// Degrees `t` at which `dim E_t` was matched against `Ext_R(k, k)`.
    pub gate_window: Window,
    pub tor: BigradedTable,
    pub local_cohomology: BigradedTable,
    pub comparisons: Vec<WitnessComparison>,
}

impl LiftWitness {
    pub fn failures(&self) -> usize {
        self.comparisons.iter().filter(|c| c.outcome == Outcome::Fail).count()
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_gorenstein() && self.comparisons.iter().all(|c| c.outcome == Outcome::Pass)
    }
}

/// Checks `dim E_t = Σ_s dim Ext^s_R(k, k)` in internal degree `-t` for `t` in `window`.
pub fn formality_gate<F: Field>(r: &Arc<Algebra<F>>, e: &Algebra<F>, window: Window) -> Result<()> {
    let top = window.hi.max(0);
    let s_max = (top / r.presentation().min_generator_degree().max(1)) as usize;
    let k = FpModule::residue_field(r.clone());
    let ext = ext_into(&k, s_max, Window::new(-top, -window.lo.max(0)));
    for t in window.degrees().filter(|&t| t >= 0) {
        let total: usize = (0..=s_max as i32).map(|s| ext.get(s, -t)).sum();
        if total != e.dim(t) {
            return Err(Error::FormalityGateFailed {
                degree: t,
                algebra_dim: e.dim(t),
                ext_dim: total,
            });
        }
    }
    Ok(())
}

/// Compares `Σ_c H^c_I(R)_j` with `Σ_s Tor^E_s(k, k)_{j₀ - j}` over `window`,
/// where `(s₀, j₀)` is the Gorenstein shift of `R`. `E` must pass
/// [`formality_gate`] on the degrees the comparison touches.
pub fn matlis_lift_witness<F: Field>(
    r: &Arc<Algebra<F>>,
    e: &Algebra<F>,
    s_max: usize,
    w_max: usize,
    window: Window,
) -> Result<LiftWitness> {
    let verdict = gorenstein_verdict(r, s_max, window);
    let Some((_, j0)) = verdict.shift else {
        return Ok(LiftWitness {
            verdict,
            gate_window: Window::new(0, -1),
            tor: BigradedTable::new(),
            local_cohomology: BigradedTable::new(),
            comparisons: Vec::new(),
        });
    };
    let gate_window = Window::new(0, (j0 - window.lo).max(0));
    formality_gate(r, e, gate_window)?;
    let tor = bar_tor(e, w_max, Window::new(j0 - window.hi, j0 - window.lo))?;
    let dmax = r.presentation().max_generator_degree();
    let a = FpModule::algebra_module(r.clone());
    let lc = local_cohomology(&a, &augmentation_ideal_generators(r), window.widen(dmax))?;
    let ncols = r.num_generators() as i32;
    let comparisons = window
        .degrees()
        .map(|j| {
            let t = j0 - j;
            let lhs: usize = (0..=ncols).map(|c| lc.get(c, j)).sum();
            let rhs: usize = (0..=w_max as i32).map(|s| tor.get(s, t)).sum();
            let certified = !(0..=ncols).any(|c| lc.is_flagged(c, j)) && !tor.is_flagged(w_max as i32 + 1, t);
            let outcome = match (certified, lhs == rhs) {
                (false, _) => Outcome::Unverified,
                (true, true) => Outcome::Pass,
                (true, false) => Outcome::Fail,
            };
            WitnessComparison {
                degree: j,
                local_cohomology: lhs,
                tor: rhs,
                outcome,
            }
        })
        .collect();
    let mut local = BigradedTable::new();
    for ((c, j), d) in lc.nonzero() {
        if window.contains(j) {
            local.set(c, j, d);
        }
    }
    Ok(LiftWitness {
        verdict,
        gate_window,
        tor,
        local_cohomology: local,
        comparisons,
    })
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

    fn exterior_f2(n: usize) -> Algebra<Fp> {
        let names = ["e", "f"];
        let gens = (0..n).map(|i| Generator::even(names[i], 1)).collect();
        let rels: Vec<Vec<(Vec<u32>, i64)>> = (0..n)
            .map(|i| {
                let mut m = vec![0; n];
                m[i] = 2;
                vec![(m, 1)]
            })
            .collect();
        let rels: Vec<Vec<(&[u32], i64)>> = rels
            .iter()
            .map(|r| r.iter().map(|(m, c)| (m.as_slice(), *c)).collect())
            .collect();
        let rels: Vec<&[(&[u32], i64)]> = rels.iter().map(|r| r.as_slice()).collect();
        algebra(f2(), gens, &rels)
    }

    #[test]
    fn tor_of_ground_field() {
        let k = algebra(f2(), vec![], &[]);
        let t = bar_tor(&k, 3, Window::new(-4, 4)).unwrap();
        assert_eq!(t.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
    }

    #[test]
    fn tor_of_exterior_is_divided_powers() {
        let e = exterior_f2(1);
        let t = bar_tor(&e, 6, Window::new(0, 6)).unwrap();
        let expected: Vec<_> = (0..=6).map(|s| ((s, s), 1)).collect();
        assert_eq!(t.nonzero().collect::<Vec<_>>(), expected);
        assert!(!t.has_flags());
        let odd = algebra(Fp::new(3).unwrap(), vec![Generator::odd("e", 1)], &[]);
        let t = bar_tor(&odd, 5, Window::new(0, 5)).unwrap();
        assert_eq!(t.nonzero().count(), 6);
    }

    #[test]
    fn tor_of_polynomial_ring() {
        let p = algebra(f2(), vec![Generator::even("x", 1)], &[]);
        let t = bar_tor(&p, 5, Window::new(0, 5)).unwrap();
        assert_eq!(t.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1), ((1, 1), 1)]);
    }

    #[test]
    fn weight_bound_flags() {
        let e = exterior_f2(1);
        let t = bar_tor(&e, 2, Window::new(0, 5)).unwrap();
        assert_eq!(t.flagged().collect::<Vec<_>>(), vec![(3, 3), (3, 4), (3, 5)]);
    }

    #[test]
    fn bar_complex_squares_to_zero() {
        let q = algebra(
            Fp::new(3).unwrap(),
            vec![Generator::even("x", 1), Generator::odd("y", 1)],
            &[&[(&[3, 0], 1)]],
        );
        for normalized in [true, false] {
            bar_complex(&q, 3, Window::new(0, 4), normalized).unwrap();
        }
    }

    #[test]
    fn normalized_matches_unnormalized() {
        let e = exterior_f2(2);
        let w = Window::new(0, 3);
        assert_eq!(
            bar_tor(&e, 3, w).unwrap().nonzero().collect::<Vec<_>>(),
            bar_tor_unnormalized(&e, 3, w).unwrap().nonzero().collect::<Vec<_>>()
        );
    }

    #[test]
    fn tor_one_counts_generators() {
        let a = algebra(
            f2(),
            vec![Generator::even("x", 1), Generator::even("y", 2)],
            &[&[(&[2, 0], 1), (&[0, 1], 1)]],
        );
        let w = Window::new(0, 4);
        let t = bar_tor(&a, 2, w).unwrap();
        let g = indecomposables(&a, w);
        for j in w.degrees() {
            assert_eq!(t.get(1, j), g.get(j));
        }
        assert_eq!(g.total(), 1);
    }

    #[test]
    fn witness_for_koszul_pair() {
        let r = Arc::new(algebra(f2(), vec![Generator::even("x", 1)], &[]));
        let e = exterior_f2(1);
        let w = matlis_lift_witness(&r, &e, 3, 16, Window::new(-8, 8)).unwrap();
        assert!(w.passed());
        assert_eq!(w.comparisons.iter().filter(|c| c.tor == 1).count(), 8);
        let wrong = algebra(f2(), vec![Generator::even("x", 1)], &[]);
        match matlis_lift_witness(&r, &wrong, 3, 16, Window::new(-8, 8)) {
            Err(Error::FormalityGateFailed { degree, .. }) => assert_eq!(degree, 2),
            other => panic!("{other:?}"),
        }
    }
}
