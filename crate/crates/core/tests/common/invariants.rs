//! Randomized invariant checks on small instances, driven by a fixed seed so
//! every run sees the same instances.

use std::sync::Arc;

use dualab::algebra::Algebra;
use dualab::bar::{bar_complex, bar_tor, bar_tor_unnormalized, indecomposables};
use dualab::complex::ChainComplex;
use dualab::duality::{dual_table, matlis_dual};
use dualab::field::{Field, FieldKind, Fp};
use dualab::koszul::{koszul_complex, local_cohomology};
use dualab::linalg::{kernel, rank_kernel_image, Matrix};
use dualab::module::{FpModule, GradedModule};
use dualab::parse::PresentationDocument;
use dualab::resolution::{ext_into, minimal_free_resolution};
use dualab::table::Window;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: [u8; 32] = *b"dualab invariant suite, seed 001";

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

/// A small random presentation: up to three generators of degree 1 or 2,
/// at most two homogeneous relations of degree 2 to 4.
pub fn random_presentation(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = [2u32, 3, 5][rng.gen_range(0..3)];
    let n = rng.gen_range(1..=3);
    let names = ["x", "y", "z"];
    let degrees: Vec<i32> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let mut text = format!("field F{p}\n");
    for i in 0..n {
        let odd = p != 2 && rng.gen_bool(0.25);
        text += &format!("gen {} {}{}\n", names[i], degrees[i], if odd { " odd" } else { "" });
    }
    for _ in 0..rng.gen_range(0..=2) {
        let d = rng.gen_range(2..=4);
        let monos = monomials(&degrees, d);
        if monos.is_empty() {
            continue;
        }
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let m = &monos[rng.gen_range(0..monos.len())];
            let c = rng.gen_range(1..p);
            let factors: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        names[i].to_string()
                    } else {
                        format!("{}^{e}", names[i])
                    }
                })
                .collect();
            terms.push(format!("{c}*{}", factors.join("*")));
        }
        text += &format!("rel {}\n", terms.join(" + "));
    }
    text
}

fn monomials(degrees: &[i32], d: i32) -> Vec<Vec<u32>> {
    fn go(degrees: &[i32], d: i32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == degrees.len() {
            if d == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let g = degrees[prefix.len()];
        for e in 0..=d / g {
            prefix.push(e as u32);
            go(degrees, d - e * g, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(degrees, d, &mut Vec::new(), &mut out);
    out
}

pub fn random_algebra(seed: u64) -> Arc<Algebra<Fp>> {
    let doc = PresentationDocument::parse(&random_presentation(seed)).unwrap();
    let FieldKind::Prime(p) = doc.field else { unreachable!() };
    Arc::new(Algebra::new(doc.presentation(Fp::new(p).unwrap()).unwrap()))
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn check(cases: u32, f: impl Fn(u64) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases).run(&any::<u64>(), f).map_err(|e| e.to_string())
}

fn homology_equal<F: Field>(a: &ChainComplex<F>, b: &ChainComplex<F>, s: i32, w: Window) -> bool {
    let (ha, hb) = (a.homology(s), b.homology(s));
    w.degrees().all(|j| ha.dim(j) == hb.dim(j))
}

pub fn d_squared_zero(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let a = FpModule::algebra_module(alg.clone());
        let gens: Vec<_> = (0..alg.num_generators()).map(|g| alg.generator_element(g)).collect();
        // Construction validates d∘d = 0 degree by degree.
        koszul_complex(&a, &gens, 2, Window::new(-2, 6)).map_err(fail)?;
        bar_complex(&alg, 3, Window::new(0, 4), true).map_err(fail)?;
        bar_complex(&alg, 2, Window::new(0, 3), false).map_err(fail)?;
        Ok(())
    })
}

pub fn rank_nullity(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [2u32, 3, 7][rng.gen_range(0..3)];
        let f = Fp::new(p).unwrap();
        let (r, c) = (rng.gen_range(0..7), rng.gen_range(0..7));
        let density = rng.gen_range(0.1..0.9);
        let rows: Vec<Vec<u32>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if rng.gen_bool(density) { rng.gen_range(0..p) } else { 0 })
                    .collect()
            })
            .collect();
        let m = Matrix::<Fp>::from_rows(c, rows);
        let rki = rank_kernel_image(&f, &m);
        prop_assert_eq!(rki.rank + rki.kernel.len(), c);
        prop_assert_eq!(rki.image.len(), rki.rank);
        prop_assert_eq!(m.rank(&f), rki.rank);
        prop_assert_eq!(m.transpose(&f).rank(&f), rki.rank);
        for v in &rki.kernel {
            prop_assert!(m.apply(&f, v).iter().all(|x| f.is_zero(x)));
        }
        Ok(())
    })
}

pub fn truncation_identities(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let a = FpModule::algebra_module(alg.clone());
        let gens: Vec<_> = (0..alg.num_generators()).map(|g| alg.generator_element(g)).collect();
        let w = Window::new(-2, 5);
        let c = koszul_complex(&a, &gens, 1, w).map_err(fail)?;
        let (lo, hi) = c.range();
        for n in lo..=hi {
            let above = c.truncate_above(n);
            let below = c.truncate_below(n);
            for s in lo..=hi {
                let h = c.homology(s);
                let (ha, hb) = (above.homology(s), below.homology(s));
                for j in w.degrees() {
                    prop_assert_eq!(ha.dim(j), if s <= n { h.dim(j) } else { 0 });
                    prop_assert_eq!(hb.dim(j), if s >= n { h.dim(j) } else { 0 });
                }
            }
        }
        Ok(())
    })
}

pub fn direct_sum_additivity(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let w = Window::new(-2, 5);
        let a = FpModule::algebra_module(alg.clone());
        let gens: Vec<_> = (0..alg.num_generators()).map(|g| alg.generator_element(g)).collect();
        let c = koszul_complex(&a, &gens, 1, w).map_err(fail)?;
        let d = koszul_complex(&a, &gens, 2, w).map_err(fail)?;
        let sum = c.direct_sum(&d);
        for s in sum.range().0..=sum.range().1 {
            let (hs, hc, hd) = (sum.homology(s), c.homology(s), d.homology(s));
            for j in w.degrees() {
                prop_assert_eq!(hs.dim(j), hc.dim(j) + hd.dim(j));
            }
        }
        prop_assert!(homology_equal(&sum, &d.direct_sum(&c), 0, w));
        Ok(())
    })
}

pub fn dual_involutivity(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let a = FpModule::algebra_module(alg.clone());
        let w = Window::new(-3, 6);
        let h = a.hilbert_function(w);
        prop_assert_eq!(dual_table(&dual_table(&h)), h.clone());
        let d = matlis_dual(&a, Window::new(-6, 3));
        prop_assert_eq!(dual_table(&d), h);
        Ok(())
    })
}

/// `H^0_I(A)` against the annihilator of high powers of the generators.
pub fn torsion_identification(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let f = *alg.field();
        let a = FpModule::algebra_module(alg.clone());
        let gens: Vec<_> = (0..alg.num_generators()).map(|g| alg.generator_element(g)).collect();
        let w = Window::new(0, 5);
        let lc = local_cohomology(&a, &gens, w).map_err(fail)?;
        let torsion = |n: u32, j: i32| -> usize {
            let dim = a.dimension(j);
            if dim == 0 {
                return 0;
            }
            let mut stacked = Matrix::zero(&f, 0, dim);
            for g in &gens {
                let (deg, v) = alg.power(g, n);
                stacked = stacked.vstack(&a.action_matrix(deg, &v, j));
            }
            kernel(&f, &stacked).len()
        };
        for j in w.degrees() {
            if (0..alg.num_generators() as i32 + 1).any(|c| lc.is_flagged(c, j)) {
                continue;
            }
            let (t1, t2) = (torsion(12, j), torsion(16, j));
            prop_assert_eq!(t1, t2, "torsion not settled in degree {}", j);
            prop_assert_eq!(lc.get(0, j), t1, "degree {}", j);
        }
        Ok(())
    })
}

pub fn generator_redundancy(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let a = FpModule::algebra_module(alg.clone());
        let n = alg.num_generators();
        let gens: Vec<_> = (0..n).map(|g| alg.generator_element(g)).collect();
        // The product of the two lowest-degree generators (or a square) keeps
        // the weighted degrees small.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&g| gens[g].0);
        let (d0, v0) = gens[order[0]].clone();
        let (d1, v1) = gens[order[1.min(n - 1)]].clone();
        let mut extended = gens.clone();
        extended.push((d0 + d1, alg.multiply(d0, &v0, d1, &v1)));
        let w = Window::new(-4, 4);
        let base = local_cohomology(&a, &gens, w).map_err(fail)?;
        let more = local_cohomology(&a, &extended, w).map_err(fail)?;
        prop_assert_eq!(base, more);
        Ok(())
    })
}

pub fn tor_one_generators(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let w = Window::new(0, 6);
        let t = bar_tor(&alg, 2, w).map_err(fail)?;
        let g = indecomposables(&alg, w);
        prop_assert_eq!(t.get(0, 0), 1);
        for j in w.degrees() {
            prop_assert_eq!(t.get(1, j), g.get(j), "degree {}", j);
            if j != 0 {
                prop_assert_eq!(t.get(0, j), 0);
            }
        }
        Ok(())
    })
}

pub fn associativity_and_commutativity(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let f = *alg.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let odd = |deg: i32, b: usize| -> usize {
            let basis = alg.degree_basis(deg);
            let m = basis.basis_monomial(b);
            m.iter()
                .enumerate()
                .filter(|&(g, _)| alg.presentation().is_exterior(g))
                .map(|(_, &e)| e as usize)
                .sum()
        };
        for _ in 0..8 {
            let degs: Vec<i32> = (0..3).map(|_| rng.gen_range(0..=3)).collect();
            if degs.iter().any(|&d| alg.dim(d) == 0) {
                continue;
            }
            let pick = |rng: &mut ChaCha8Rng, d: i32| rng.gen_range(0..alg.dim(d));
            let idx: Vec<usize> = degs.iter().map(|&d| pick(&mut rng, d)).collect();
            let unit = |d: i32, i: usize| {
                let mut v = vec![f.zero(); alg.dim(d)];
                v[i] = f.one();
                v
            };
            let (a, b, c) = (unit(degs[0], idx[0]), unit(degs[1], idx[1]), unit(degs[2], idx[2]));
            let ab = alg.multiply(degs[0], &a, degs[1], &b);
            let bc = alg.multiply(degs[1], &b, degs[2], &c);
            let left = alg.multiply(degs[0] + degs[1], &ab, degs[2], &c);
            let right = alg.multiply(degs[0], &a, degs[1] + degs[2], &bc);
            prop_assert_eq!(left, right);
            let ba = alg.multiply(degs[1], &b, degs[0], &a);
            let sign_flip = odd(degs[0], idx[0]) * odd(degs[1], idx[1]) % 2 == 1;
            let expected: Vec<u32> = if sign_flip {
                ab.iter().map(|x| f.neg(x)).collect()
            } else {
                ab
            };
            prop_assert_eq!(ba, expected);
        }
        Ok(())
    })
}

pub fn normal_form_idempotent(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let f = *alg.field();
        let p = f.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xface);
        for j in 0..=4 {
            let basis = alg.degree_basis(j);
            let v: Vec<u32> = (0..basis.monomials().len()).map(|_| rng.gen_range(0..p)).collect();
            let nf = basis.normal_form(&f, &v);
            let again = basis.normal_form(&f, &basis.lift(&f, &nf));
            prop_assert_eq!(nf, again);
            prop_assert_eq!(basis.dim() + basis.ideal_dim(), basis.monomials().len());
        }
        Ok(())
    })
}

pub fn bar_normalization(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let w = Window::new(0, 3);
        let a = bar_tor(&alg, 3, w).map_err(fail)?;
        let b = bar_tor_unnormalized(&alg, 3, w).map_err(fail)?;
        prop_assert_eq!(a.nonzero().collect::<Vec<_>>(), b.nonzero().collect::<Vec<_>>());
        Ok(())
    })
}

/// `Ext^s(k, k)` in internal degree `-j` against Betti numbers `b_{s,j}`.
pub fn ext_matches_betti(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let alg = random_algebra(seed);
        let k = FpModule::residue_field(alg.clone());
        let s_max = 3;
        let dmax = alg.presentation().max_generator_degree();
        let res = minimal_free_resolution(&k, s_max, Window::new(0, 5 + s_max as i32 * dmax)).map_err(fail)?;
        let betti = res.betti_table();
        let ext = ext_into(&k, s_max, Window::new(-5, 0));
        for s in 0..=s_max as i32 {
            for j in 0..=5 {
                prop_assert_eq!(ext.get(s, -j), betti.get(s, j), "s = {}, j = {}", s, j);
            }
        }
        Ok(())
    })
}

pub type Invariant = (&'static str, fn(u32) -> Result<(), String>);

pub const ALL: [Invariant; 13] = [
    ("d-squared-zero", d_squared_zero),
    ("rank-nullity", rank_nullity),
    ("truncation-identities", truncation_identities),
    ("direct-sum-additivity", direct_sum_additivity),
    ("dual-involutivity", dual_involutivity),
    ("torsion-identification", torsion_identification),
    ("generator-redundancy", generator_redundancy),
    ("tor1-minimal-generators", tor_one_generators),
    ("associativity-commutativity", associativity_and_commutativity),
    ("normal-form-idempotence", normal_form_idempotent),
    ("bar-normalization", bar_normalization),
    ("ext-betti-consistency", ext_matches_betti),
    ("parse-round-trip", parse_round_trip),
];

pub fn parse_round_trip(cases: u32) -> Result<(), String> {
    check(cases, |seed| {
        let text = random_presentation(seed);
        let doc = PresentationDocument::parse(&text).map_err(fail)?;
        let again = PresentationDocument::parse(&doc.to_string()).map_err(fail)?;
        prop_assert_eq!(doc, again);
        Ok(())
    })
}
