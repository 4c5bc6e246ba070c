//! Gorenstein detection, graded Matlis duality, Poincaré duality and the
//! local cohomology theorem check.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::koszul::{augmentation_ideal_generators, local_cohomology};
use crate::linalg::Matrix;
use crate::module::{socle, FpModule, GradedModule};
use crate::resolution::ext_into;
use crate::table::{BigradedTable, GradedTable, Window};

/// `D(M)_j = dim M_{-j}` over `window`.
pub fn matlis_dual<F: Field, M: GradedModule<F> + ?Sized>(m: &M, window: Window) -> GradedTable {
    GradedTable::from_fn(window, |j| m.dimension(-j))
}

/// The same regrading applied to a table; the window is reflected too.
pub fn dual_table(t: &GradedTable) -> GradedTable {
    let w = Window::new(-t.window.hi, -t.window.lo);
    GradedTable::from_fn(w, |j| t.get(-j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GorensteinStatus {
    Gorenstein,
    NotGorenstein,
    UndeterminedWithinBounds,
}

impl GorensteinStatus {
    pub fn label(self) -> &'static str {
        match self {
            GorensteinStatus::Gorenstein => "gorenstein",
            GorensteinStatus::NotGorenstein => "not-gorenstein",
            GorensteinStatus::UndeterminedWithinBounds => "undetermined-within-bounds",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GorensteinVerdict {
    pub status: GorensteinStatus,
    /// `(s₀, j₀)` with `Ext^{s₀}_A(k, A)` one-dimensional in internal degree `j₀`.
    pub shift: Option<(i32, i32)>,
    /// The witness: `Ext^s_A(k, A)_j` over the certified window.
    pub ext: BigradedTable,
    pub socle: GradedTable,
    pub window: Window,
    pub s_max: usize,
}

impl GorensteinVerdict {
    pub fn is_gorenstein(&self) -> bool {
        self.status == GorensteinStatus::Gorenstein
    }

    /// The internal shift in the homological grading: `-j₀`.
    pub fn paper_internal_shift(&self) -> Option<i32> {
        self.shift.map(|(_, j)| -j)
    }

    /// Total shift `a` with `Hom_A(k, A) ≃ Σ^a k` in homological degrees: `-(s₀ + j₀)`.
    pub fn total_shift(&self) -> Option<i32> {
        self.shift.map(|(s, j)| -(s + j))
    }
}

/// Gorenstein iff `Ext^*_A(k, A)` is one-dimensional in total across the
/// window. More than one dimension anywhere already rules it out; a single
/// class within `d_max` of the window edge, or none at all, is inconclusive.
pub fn gorenstein_verdict<F: Field>(algebra: &Arc<Algebra<F>>, s_max: usize, window: Window) -> GorensteinVerdict {
    let a = FpModule::algebra_module(algebra.clone());
    let ext = ext_into(&a, s_max, window);
    let soc = socle(&a, window);
    let dmax = algebra.presentation().max_generator_degree();
    let total: usize = ext.nonzero().map(|(_, d)| d).sum();
    let (status, shift) = if total > 1 {
        (GorensteinStatus::NotGorenstein, None)
    } else if total == 0 || ext.has_flags() {
        (GorensteinStatus::UndeterminedWithinBounds, None)
    } else {
        let ((s, j), _) = ext.nonzero().next().unwrap();
        if j - window.lo < dmax || window.hi - j < dmax {
            (GorensteinStatus::UndeterminedWithinBounds, None)
        } else {
            (GorensteinStatus::Gorenstein, Some((s, j)))
        }
    };
    GorensteinVerdict {
        status,
        shift,
        ext,
        socle: soc,
        window,
        s_max,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoincareDuality {
    pub is_pd: bool,
    /// Top nonzero degree.
    pub dimension: i32,
    /// Basis label of the top class when it is one-dimensional.
    pub orientation: Option<String>,
    /// Degrees `j` whose pairing `A_j ⊗ A_{a-j} → A_a` is degenerate.
    pub degenerate: Vec<i32>,
}

/// Checks one-dimensional top degree and perfect pairings into it. The
/// algebra must vanish above some degree not exceeding `window.hi`.
pub fn check_poincare_duality<F: Field>(algebra: &Algebra<F>, window: Window) -> Result<PoincareDuality> {
    let f = algebra.field();
    let top = algebra
        .top_degree(window.hi.max(1))
        .ok_or_else(|| Error::NotFiniteDimensional(format!("no vanishing run found up to degree {}", window.hi)))?;
    if algebra.dim(top) != 1 {
        return Ok(PoincareDuality {
            is_pd: false,
            dimension: top,
            orientation: None,
            degenerate: Vec::new(),
        });
    }
    let mut degenerate = Vec::new();
    for j in 0..=top {
        let (p, q) = (algebra.dim(j), algebra.dim(top - j));
        if p != q {
            degenerate.push(j);
            continue;
        }
        let table = algebra.product_table(j, top - j);
        let rows: Vec<Vec<F::Elem>> = (0..p)
            .map(|a| (0..q).map(|b| table[a][b][0].clone()).collect())
            .collect();
        if Matrix::<F>::from_rows(q, rows).rank(f) != p {
            degenerate.push(j);
        }
    }
    Ok(PoincareDuality {
        is_pd: degenerate.is_empty(),
        dimension: top,
        orientation: algebra.basis_labels(top).pop(),
        degenerate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LctMode {
    CollapseExact,
    EulerCharacteristic,
}

impl LctMode {
    pub fn label(self) -> &'static str {
        match self {
            LctMode::CollapseExact => "collapse-exact",
            LctMode::EulerCharacteristic => "euler-characteristic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Some input cell was not certified.
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctComparison {
    /// Internal degree `j` in collapse mode, total homological degree in Euler mode.
    pub degree: i32,
    pub local_cohomology: i64,
    pub dual: i64,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LctStatus {
    Verified,
    Failed,
    HypothesisFailure,
    Undetermined,
}

impl LctStatus {
    pub fn label(self) -> &'static str {
        match self {
            LctStatus::Verified => "verified",
            LctStatus::Failed => "failed",
            LctStatus::HypothesisFailure => "hypothesis-failure",
            LctStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LctReport {
    pub status: LctStatus,
    pub verdict: GorensteinVerdict,
    /// `H^c_I(A)_j` indexed by `(c, j)`.
    pub e2: BigradedTable,
    /// Matlis dual of `A` over the comparison window.
    pub dual: GradedTable,
    pub mode: Option<LctMode>,
    pub comparisons: Vec<LctComparison>,
}

impl LctReport {
    pub fn failures(&self) -> usize {
        self.comparisons.iter().filter(|c| c.outcome == Outcome::Fail).count()
    }

    pub fn unverified(&self) -> Vec<i32> {
        self.comparisons
            .iter()
            .filter(|c| c.outcome == Outcome::Unverified)
            .map(|c| c.degree)
            .collect()
    }
}

/// Compares local cohomology of a Gorenstein `A` at its augmentation ideal
/// with the shifted Matlis dual of `A`.
///
/// With shift `(s₀, j₀)`, the expected answer is `H^{s₀}_I(A)_j = dim A_{j₀ - j}`
/// and nothing in other cohomological degrees. When local cohomology is
/// concentrated in one degree this is checked dimension by dimension;
/// otherwise alternating sums are compared along each total degree
/// `t = -c - j`. Local cohomology is computed on the window widened by
/// `d_max`, so every degree of `window` is an interior degree.
pub fn verify_lct<F: Field>(algebra: &Arc<Algebra<F>>, s_max: usize, window: Window) -> Result<LctReport> {
    let verdict = gorenstein_verdict(algebra, s_max, window);
    let a = FpModule::algebra_module(algebra.clone());
    let dual = matlis_dual(&a, window);
    let Some((s0, j0)) = verdict.shift else {
        let status = if verdict.status == GorensteinStatus::NotGorenstein {
            LctStatus::HypothesisFailure
        } else {
            LctStatus::Undetermined
        };
        return Ok(LctReport {
            status,
            verdict,
            e2: BigradedTable::new(),
            dual,
            mode: None,
            comparisons: Vec::new(),
        });
    };
    let dmax = algebra.presentation().max_generator_degree();
    let wide = window.widen(dmax);
    let lc = local_cohomology(&a, &augmentation_ideal_generators(algebra), wide)?;
    let mut e2 = BigradedTable::new();
    for ((c, j), d) in lc.nonzero() {
        if window.contains(j) {
            e2.set(c, j, d);
        }
    }
    for (c, j) in lc.flagged() {
        if window.contains(j) {
            e2.flag(c, j);
        }
    }
    let columns: BTreeSet<i32> = e2.support_indices();
    let collapse = columns.is_empty() || columns.iter().all(|&c| c == s0);
    let mut comparisons = Vec::new();
    if collapse {
        for j in window.degrees() {
            let lhs = e2.get(s0, j) as i64;
            let rhs = algebra.dim(j0 - j) as i64;
            let certified = !(0..=algebra.num_generators() as i32 + s_max as i32).any(|c| e2.is_flagged(c, j));
            comparisons.push(LctComparison {
                degree: j,
                local_cohomology: lhs,
                dual: rhs,
                outcome: outcome(certified, lhs == rhs),
            });
        }
    } else {
        // Total homological degree t = -c - j; the dual side sits in A_{t - a}
        // with a = -(s₀ + j₀).
        let shift = -(s0 + j0);
        let cmax = *columns.iter().max().unwrap();
        let tmin = -cmax - window.hi;
        let tmax = -window.lo;
        for t in tmin..=tmax {
            let mut chi = 0i64;
            let mut certified = true;
            for c in 0..=cmax {
                let j = -t - c;
                if !window.contains(j) {
                    certified &= e2.get(c, j) == 0 && lc.get(c, j) == 0;
                    continue;
                }
                certified &= !e2.is_flagged(c, j);
                let sign = if (c - s0).rem_euclid(2) == 0 { 1 } else { -1 };
                chi += sign * e2.get(c, j) as i64;
            }
            let rhs = algebra.dim(t - shift) as i64;
            comparisons.push(LctComparison {
                degree: t,
                local_cohomology: chi,
                dual: rhs,
                outcome: outcome(certified, chi == rhs),
            });
        }
    }
    let status = if comparisons.iter().any(|c| c.outcome == Outcome::Fail) {
        LctStatus::Failed
    } else if comparisons.iter().all(|c| c.outcome == Outcome::Pass) {
        LctStatus::Verified
    } else {
        LctStatus::Undetermined
    };
    Ok(LctReport {
        status,
        verdict,
        e2,
        dual,
        mode: Some(if collapse {
            LctMode::CollapseExact
        } else {
            LctMode::EulerCharacteristic
        }),
        comparisons,
    })
}

fn outcome(certified: bool, equal: bool) -> Outcome {
    match (certified, equal) {
        (false, _) => Outcome::Unverified,
        (true, true) => Outcome::Pass,
        (true, false) => Outcome::Fail,
    }
}
