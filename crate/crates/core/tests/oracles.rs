//! Frozen values for the corpus, each derived independently of the engine.

mod common;

use common::{corpus_algebra, corpus_names};
use dualab::bar::{bar_tor, indecomposables};
use dualab::duality::{check_poincare_duality, gorenstein_verdict, matlis_dual};
use dualab::koszul::{augmentation_ideal_generators, local_cohomology};
use dualab::module::{socle, FpModule};
use dualab::resolution::{classify_smallness, minimal_free_resolution};
use dualab::table::Window;

/// Dimensions of `F = F2[x,y]/(x²+xy+y², x²y+xy²)`: the quotient of Q8 by `e`.
const Q8_FIBRE: [usize; 4] = [1, 2, 2, 1];

fn fibre(j: i32) -> usize {
    usize::try_from(j)
        .ok()
        .and_then(|j| Q8_FIBRE.get(j))
        .copied()
        .unwrap_or(0)
}

fn q8_dim(j: i32) -> usize {
    (0..=j.max(0) / 4).map(|k| fibre(j - 4 * k)).sum()
}

#[test]
fn hilbert_functions() {
    let w = Window::new(-4, 20);
    let cases: [(&str, fn(i32) -> usize); 6] = [
        ("k", |j| usize::from(j == 0)),
        ("f2_xy", |j| if j < 0 { 0 } else { j as usize + 1 }),
        ("f2_xy_ci", |j| match j {
            0 => 1,
            j if j > 0 => 2,
            _ => 0,
        }),
        ("f2_xy_sqzero", |j| match j {
            0 => 1,
            1 => 2,
            _ => 0,
        }),
        ("f3_x2", |j| usize::from(j >= 0 && j % 2 == 0)),
        ("q8", q8_dim),
    ];
    for (name, expected) in cases {
        let h = corpus_algebra(name).hilbert_function(w);
        for j in w.degrees() {
            assert_eq!(h.get(j), expected(j), "{name} in degree {j}");
        }
    }
}

#[test]
fn q8_series_matches_closed_form() {
    // (1 + 2t + 2t² + t³) / (1 - t⁴), expanded by hand.
    let h = corpus_algebra("q8").hilbert_function(Window::new(0, 11));
    let dims: Vec<usize> = (0..=11).map(|j| h.get(j)).collect();
    assert_eq!(dims, [1, 2, 2, 1, 1, 2, 2, 1, 1, 2, 2, 1]);
}

#[test]
fn socles() {
    let w = Window::new(-8, 8);
    let sq = socle(&FpModule::algebra_module(corpus_algebra("f2_xy_sqzero")), w);
    assert_eq!(sq.nonzero().collect::<Vec<_>>(), [(1, 2)]);
    for (name, top) in [
        ("f2_trunc5", 4),
        ("f3_trunc3", 2),
        ("f3_ext3", 3),
        ("f2_ext11", 2),
        ("k", 0),
    ] {
        let s = socle(&FpModule::algebra_module(corpus_algebra(name)), w);
        assert_eq!(s.nonzero().collect::<Vec<_>>(), [(top, 1)], "{name}");
    }
    for name in ["f2_x", "f2_xy", "q8", "f3_x2"] {
        assert!(
            socle(&FpModule::algebra_module(corpus_algebra(name)), w).is_zero(),
            "{name}"
        );
    }
}

/// Total Betti numbers of `k`, `s = 0..=6`.
///
/// Complete intersections on `n` generators with `c` relations have Poincare
/// series `(1+t)^n / (1-t²)^c`; a polynomial generator contributes `1+t`.
#[test]
fn betti_numbers() {
    let cases: [(&str, [usize; 7]); 8] = [
        ("k", [1, 0, 0, 0, 0, 0, 0]),
        ("f2_x", [1, 1, 0, 0, 0, 0, 0]),
        ("f2_xy", [1, 2, 1, 0, 0, 0, 0]),
        ("f2_xy_ci", [1, 2, 2, 2, 2, 2, 2]),
        ("f2_xy_sqzero", [1, 2, 4, 8, 16, 32, 64]),
        ("f3_trunc3", [1, 1, 1, 1, 1, 1, 1]),
        ("f2_ext11", [1, 2, 3, 4, 5, 6, 7]),
        ("q8", [1, 3, 5, 7, 9, 11, 13]),
    ];
    for (name, expected) in cases {
        let alg = corpus_algebra(name);
        let dmax = alg.presentation().max_generator_degree().max(1);
        let k = FpModule::residue_field(alg);
        let res = minimal_free_resolution(&k, 6, Window::new(0, 8 * dmax + 8)).unwrap();
        assert_eq!(res.betti_numbers(), expected, "{name}");
    }
}

#[test]
fn truncated_ring_betti_degrees() {
    // k over F_p[x]/(x^n): generators in degrees 0, 1, n, n+1, 2n, ...
    let alg = corpus_algebra("f3_trunc3");
    let res = minimal_free_resolution(&FpModule::residue_field(alg), 5, Window::new(0, 16)).unwrap();
    let t = res.betti_table();
    let support: Vec<(i32, i32)> = t.nonzero().map(|(sj, _)| sj).collect();
    assert_eq!(support, [(0, 0), (1, 1), (2, 3), (3, 4), (4, 6), (5, 7)]);
}

#[test]
fn bar_tor_agrees_with_betti_table() {
    let window = Window::new(0, 6);
    for name in corpus_names() {
        let alg = corpus_algebra(&name);
        let min = alg.presentation().min_generator_degree().max(1);
        let tor = bar_tor(&alg, (window.hi / min) as usize + 1, window).unwrap();
        let dmax = alg.presentation().max_generator_degree().max(1);
        let res =
            minimal_free_resolution(&FpModule::residue_field(alg.clone()), 7, Window::new(0, 8 * dmax + 8)).unwrap();
        let betti = res.betti_table();
        for s in 0..=6 {
            for j in window.degrees() {
                if !tor.is_flagged(s, j) {
                    assert_eq!(tor.get(s, j), betti.get(s, j), "{name} at ({s}, {j})");
                }
            }
        }
        let ind = indecomposables(&alg, window);
        for j in window.degrees() {
            assert_eq!(ind.get(j), betti.get(1, j), "{name}: indecomposables in degree {j}");
        }
    }
}

fn h(name: &str, window: Window) -> dualab::table::BigradedTable {
    let alg = corpus_algebra(name);
    let gens = augmentation_ideal_generators(&alg);
    local_cohomology(&FpModule::algebra_module(alg), &gens, window).unwrap()
}

#[test]
fn local_cohomology_of_polynomial_rings() {
    let w = Window::new(-12, 12);
    let t = h("f2_xy", w);
    assert!(!t.has_flags());
    for j in w.degrees() {
        assert_eq!(
            t.get(2, j),
            if j <= -2 { (-j - 1) as usize } else { 0 },
            "H2 in degree {j}"
        );
        assert_eq!(t.get(0, j) + t.get(1, j), 0);
    }
    let t = h("f3_x2", w);
    for j in w.degrees() {
        assert_eq!(t.get(1, j), usize::from(j < 0 && j % 2 == 0), "degree {j}");
    }
}

#[test]
fn local_cohomology_of_hypersurface_and_q8() {
    let w = Window::new(-12, 12);
    let t = h("f2_xy_ci", w);
    for j in w.degrees() {
        // x^a y^-b with a in {0, 1}, b >= 1
        let expected = match j {
            0 => 1,
            j if j < 0 => 2,
            _ => 0,
        };
        assert_eq!(t.get(1, j), expected, "f2_xy_ci degree {j}");
        assert_eq!(t.get(0, j), 0);
    }
    let t = h("q8", w);
    for j in w.degrees() {
        // F ⊗ e^{-1} F2[e^{-1}]
        let expected: usize = (1..=8).map(|k| fibre(j + 4 * k)).sum();
        assert_eq!(t.get(1, j), expected, "q8 degree {j}");
        assert_eq!(t.get(0, j), 0);
    }
}

#[test]
fn gorenstein_shifts() {
    // Polynomial and complete-intersection rings: s₀ is the Krull dimension and
    // j₀ = Σ relation degrees - Σ generator degrees. Artinian rings: the socle degree.
    let cases = [
        ("k", (0, 0)),
        ("f2_x", (1, -1)),
        ("f2_xy", (2, -2)),
        ("f2_xy_ci", (1, 0)),
        ("q8", (1, -1)),
        ("f3_x2", (1, -2)),
        ("f3_ext3", (0, 3)),
        ("f2_ext1", (0, 1)),
        ("f2_ext11", (0, 2)),
        ("f2_trunc3", (0, 2)),
    ];
    for (name, shift) in cases {
        let alg = corpus_algebra(name);
        let dmax = alg.presentation().max_generator_degree().max(1);
        let v = gorenstein_verdict(&alg, alg.num_generators() + 2, Window::new(-8 * dmax, 8 * dmax));
        assert_eq!(v.shift, Some(shift), "{name}: {}", v.status.label());
        assert_eq!(v.paper_internal_shift(), Some(-shift.1));
        assert_eq!(v.total_shift(), Some(-(shift.0 + shift.1)));
    }
}

#[test]
fn poincare_duality_dimensions() {
    let w = Window::new(-8, 8);
    for (name, dim) in [
        ("k", 0),
        ("f2_ext1", 1),
        ("f2_ext11", 2),
        ("f2_trunc5", 4),
        ("f3_trunc3", 2),
    ] {
        let d = check_poincare_duality(&corpus_algebra(name), w).unwrap();
        assert!(d.is_pd, "{name}");
        assert_eq!(d.dimension, dim, "{name}");
    }
    let d = check_poincare_duality(&corpus_algebra("f3_ext3"), Window::new(-24, 24)).unwrap();
    assert!(d.is_pd && d.dimension == 3);
    let d = check_poincare_duality(&corpus_algebra("f2_xy_sqzero"), w).unwrap();
    assert!(!d.is_pd);
    assert_eq!(d.dimension, 1);
    assert!(check_poincare_duality(&corpus_algebra("f2_x"), w).is_err());
}

#[test]
fn matlis_duals() {
    let w = Window::new(-6, 6);
    let d = matlis_dual(&FpModule::algebra_module(corpus_algebra("f2_xy")), w);
    for j in w.degrees() {
        assert_eq!(d.get(j), if j <= 0 { (1 - j) as usize } else { 0 });
    }
}

#[test]
fn smallness_of_corpus_modules() {
    let w = Window::new(-8, 8);
    let k = |name: &str| FpModule::residue_field(corpus_algebra(name));
    assert_eq!(classify_smallness(&k("f2_xy"), 4, w).small, Some(2));
    assert_eq!(classify_smallness(&k("q8"), 4, w).small, None);
    let v = classify_smallness(&k("f2_xy_ci"), 5, w);
    assert_eq!(v.small, None);
    assert_eq!(v.betti, [1, 2, 2, 2, 2, 2]);
    assert_eq!(classify_smallness(&k("f2_xy_sqzero"), 3, w).cosmall, Some(3));
    assert_eq!(classify_smallness(&k("f2_xy"), 3, w).cosmall, None);
    assert_eq!(classify_smallness(&k("f2_xy"), 3, w).finite_dimension, Some(1));
}
