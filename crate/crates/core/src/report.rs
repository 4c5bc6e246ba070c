//! Command dispatch and report emission.
//!
//! Every table appears twice: once in the tool's cohomological grading and once
//! as `<name>.paper` with internal degrees negated (and, for local cohomology,
//! the cohomological index negated too).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::Algebra;
use crate::bar::{bar_tor, indecomposables, matlis_lift_witness};
use crate::duality::{check_poincare_duality, gorenstein_verdict, matlis_dual, verify_lct, Outcome};
use crate::error::{Error, Result};
use crate::field::{Field, FieldKind, Fp, Rationals};
use crate::koszul::{augmentation_ideal_generators, e2_page, koszul_tower_table, local_cohomology, DEFAULT_LEVELS};
use crate::module::{socle, FpModule};
use crate::parse::PresentationDocument;
use crate::resolution::{classify_smallness, ext_into, minimal_free_resolution};
use crate::table::{BigradedTable, GradedTable, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Hilbert,
    Resolve,
    Ext,
    Smallness,
    Localcoh,
    E2,
    Gorenstein,
    Matlisdual,
    Pd,
    Lct,
    Bartor,
    Liftwitness,
}

impl Command {
    pub const ALL: [Command; 12] = [
        Command::Hilbert,
        Command::Resolve,
        Command::Ext,
        Command::Smallness,
        Command::Localcoh,
        Command::E2,
        Command::Gorenstein,
        Command::Matlisdual,
        Command::Pd,
        Command::Lct,
        Command::Bartor,
        Command::Liftwitness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Hilbert => "hilbert",
            Command::Resolve => "resolve",
            Command::Ext => "ext",
            Command::Smallness => "smallness",
            Command::Localcoh => "localcoh",
            Command::E2 => "e2",
            Command::Gorenstein => "gorenstein",
            Command::Matlisdual => "matlisdual",
            Command::Pd => "pd",
            Command::Lct => "lct",
            Command::Bartor => "bartor",
            Command::Liftwitness => "liftwitness",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown command '{s}'")))
    }
}

/// User-supplied bounds; anything left out gets a default from the presentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    pub window: Option<Window>,
    pub s_max: Option<usize>,
    pub w_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolvedBounds {
    pub window: [i32; 2],
    pub s_max: usize,
    pub w_max: usize,
}

impl ResolvedBounds {
    pub fn window(&self) -> Window {
        Window::new(self.window[0], self.window[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub s: i32,
    pub j: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub name: String,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub s: i32,
    pub j: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flag {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Location>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Flag {
    fn at(kind: &str, s: i32, j: i32) -> Flag {
        Flag {
            kind: kind.into(),
            location: Some(Location { s, j }),
            detail: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub input_hash: String,
    pub field: String,
    pub bounds: ResolvedBounds,
    pub tables: Vec<Table>,
    pub verdicts: BTreeMap<String, Value>,
    pub flags: Vec<Flag>,
}

const BOUND_KINDS: [&str; 6] = [
    "unstabilized",
    "unverified",
    "weight-bound",
    "degree-bound",
    "window-insufficient",
    "tower-not-stabilized",
];

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// 0 when clean, 3 when some bound was insufficient, 1 for other failures.
    pub fn exit_code(&self) -> i32 {
        if self.flags.is_empty() {
            0
        } else if self.flags.iter().all(|f| BOUND_KINDS.contains(&f.kind.as_str())) {
            3
        } else {
            1
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Plain-text rendering. `paper` selects the mirrored tables.
    pub fn to_text(&self, paper: bool) -> String {
        let mut out = String::new();
        let b = &self.bounds;
        let _ = writeln!(out, "{} over {}", self.command, self.field);
        let _ = writeln!(
            out,
            "window [{}, {}]  s_max {}  w_max {}  grading {}",
            b.window[0],
            b.window[1],
            b.s_max,
            b.w_max,
            if paper { "homological" } else { "cohomological" }
        );
        for t in self.tables.iter().filter(|t| t.name.ends_with(".paper") == paper) {
            let _ = writeln!(out, "\n{}", t.name);
            if t.entries.is_empty() {
                let _ = writeln!(out, "  (zero)");
            }
            let mut rows: BTreeMap<i32, Vec<String>> = BTreeMap::new();
            for e in &t.entries {
                rows.entry(e.s).or_default().push(format!("{}:{}", e.j, e.dim));
            }
            for (s, cells) in rows {
                let _ = writeln!(out, "  s={s:<3} {}", cells.join(" "));
            }
        }
        if !self.verdicts.is_empty() {
            let _ = writeln!(out);
            for (k, v) in &self.verdicts {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        for f in &self.flags {
            let loc = f
                .location
                .as_ref()
                .map(|l| format!(" at ({}, {})", l.s, l.j))
                .unwrap_or_default();
            let detail = f.detail.as_ref().map(|d| format!(": {d}")).unwrap_or_default();
            let _ = writeln!(out, "flag {}{loc}{detail}", f.kind);
        }
        out
    }
}

fn graded_entries(t: &GradedTable, negate: bool) -> Vec<Entry> {
    let mut v: Vec<Entry> = t
        .nonzero()
        .map(|(j, dim)| Entry {
            s: 0,
            j: if negate { -j } else { j },
            dim,
        })
        .collect();
    v.sort_by_key(|e| (e.s, e.j));
    v
}

fn bigraded_entries(t: &BigradedTable) -> Vec<Entry> {
    let mut v: Vec<Entry> = t.nonzero().map(|((s, j), dim)| Entry { s, j, dim }).collect();
    v.sort_by_key(|e| (e.s, e.j));
    v
}

struct Builder {
    tables: Vec<Table>,
    verdicts: BTreeMap<String, Value>,
    flags: Vec<Flag>,
}

impl Builder {
    fn graded(&mut self, name: &str, t: &GradedTable) {
        self.push(name, graded_entries(t, false), graded_entries(t, true));
    }

    /// `negate_index` negates the first index in the mirror as well.
    fn bigraded(&mut self, name: &str, t: &BigradedTable, negate_index: bool) {
        self.push(name, bigraded_entries(t), bigraded_entries(&t.mirrored(negate_index)));
    }

    fn push(&mut self, name: &str, tool: Vec<Entry>, paper: Vec<Entry>) {
        self.tables.push(Table {
            name: name.into(),
            entries: tool,
        });
        self.tables.push(Table {
            name: format!("{name}.paper"),
            entries: paper,
        });
    }

    fn verdict(&mut self, key: &str, v: impl Into<Value>) {
        self.verdicts.insert(key.into(), v.into());
    }

    fn flag_table(&mut self, kind: &str, t: &BigradedTable) {
        self.flags.extend(t.flagged().map(|(s, j)| Flag::at(kind, s, j)));
    }
}

pub fn input_hash(text: &str, dual: Option<&str>) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    if let Some(d) = dual {
        h.update([0u8]);
        h.update(d.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Defaults: window `[-8 d_max, 8 d_max]`, `s_max = n + 2`, and
/// `w_max = ⌈span / min generator degree⌉`.
pub fn resolve_bounds(doc: &PresentationDocument, bounds: &Bounds, bar_min_degree: i32) -> ResolvedBounds {
    let dmax = doc.generators.iter().map(|g| g.degree).max().unwrap_or(1).max(1);
    let window = bounds.window.unwrap_or(Window::new(-8 * dmax, 8 * dmax));
    let s_max = bounds.s_max.unwrap_or(doc.generators.len() + 2);
    let span = (window.hi - window.lo).max(0);
    let m = bar_min_degree.max(1);
    let w_max = bounds.w_max.unwrap_or(((span + m - 1) / m) as usize);
    ResolvedBounds {
        window: [window.lo, window.hi],
        s_max,
        w_max,
    }
}

fn min_degree(doc: &PresentationDocument) -> i32 {
    doc.generators.iter().map(|g| g.degree).min().unwrap_or(1)
}

/// Runs `command` on a presentation document. Only malformed input is an
/// error; failures inside the computation are reported as flags.
pub fn run(command: Command, text: &str, dual: Option<&str>, bounds: &Bounds) -> Result<Report> {
    let doc = PresentationDocument::parse(text)?;
    let dual_doc = match (command, dual) {
        (Command::Liftwitness, Some(d)) => Some(PresentationDocument::parse(d)?),
        (Command::Liftwitness, None) => {
            return Err(Error::Usage(
                "liftwitness needs the Koszul-dual presentation (--dual FILE)".into(),
            ))
        }
        _ => None,
    };
    if let Some(d) = &dual_doc {
        if d.field != doc.field {
            return Err(Error::Usage(format!("field mismatch: {} vs {}", doc.field, d.field)));
        }
    }
    let bar_doc = dual_doc.as_ref().unwrap_or(&doc);
    let resolved = resolve_bounds(&doc, bounds, min_degree(bar_doc));
    let hash = input_hash(text, dual);
    let mut b = Builder {
        tables: Vec::new(),
        verdicts: BTreeMap::new(),
        flags: Vec::new(),
    };
    let outcome = match doc.field {
        FieldKind::Prime(p) => dispatch(
            Fp::new(p).expect("parser checks primality"),
            command,
            &doc,
            dual_doc.as_ref(),
            &resolved,
            &mut b,
        ),
        FieldKind::Rational => dispatch(Rationals, command, &doc, dual_doc.as_ref(), &resolved, &mut b),
    };
    if let Err(e) = outcome {
        if e.exit_code() == 2 {
            return Err(e);
        }
        b.flags.push(Flag {
            kind: error_kind(&e).into(),
            location: None,
            detail: Some(e.to_string()),
        });
    }
    Ok(Report {
        command: command.name().into(),
        input_hash: hash,
        field: doc.field.to_string(),
        bounds: resolved,
        tables: b.tables,
        verdicts: b.verdicts,
        flags: b.flags,
    })
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::WindowInsufficient { .. } => "window-insufficient",
        Error::TowerNotStabilized { .. } => "tower-not-stabilized",
        Error::WeightBoundInsufficient { .. } => "weight-bound",
        Error::NotFiniteDimensional(_) => "not-finite-dimensional",
        Error::FormalityGateFailed { .. } => "formality-gate-failed",
        Error::MalformedComplex(_) => "malformed-complex",
        Error::SizeLimit(_) => "size-limit",
        _ => "error",
    }
}

fn build<F: Field>(field: F, doc: &PresentationDocument) -> Result<Arc<Algebra<F>>> {
    Ok(Arc::new(Algebra::new(doc.presentation(field)?)))
}

fn dispatch<F: Field>(
    field: F,
    command: Command,
    doc: &PresentationDocument,
    dual: Option<&PresentationDocument>,
    bounds: &ResolvedBounds,
    b: &mut Builder,
) -> Result<()> {
    let alg = build(field.clone(), doc)?;
    let window = bounds.window();
    let (s_max, w_max) = (bounds.s_max, bounds.w_max);
    let a = FpModule::algebra_module(alg.clone());
    let k = FpModule::residue_field(alg.clone());
    match command {
        Command::Hilbert => {
            let h = alg.hilbert_function(window);
            b.verdict("total_in_window", h.total());
            b.graded("hilbert", &h);
        }
        Command::Resolve => {
            let res = minimal_free_resolution(&k, s_max, window)?;
            let g = res.guaranteed_window();
            let mut betti = BigradedTable::new();
            for ((s, j), d) in res.betti_table().nonzero() {
                if g.contains(j) {
                    betti.set(s, j, d);
                }
            }
            b.verdict("guaranteed_window", json!([g.lo, g.hi]));
            b.verdict("length", json!(res.length()));
            b.verdict("minimal", res.is_minimal());
            b.bigraded("betti", &betti, false);
        }
        Command::Ext => {
            let kk = ext_into(&k, s_max, window);
            let ka = ext_into(&a, s_max, window);
            b.flag_table("degree-bound", &kk);
            b.flag_table("degree-bound", &ka);
            b.bigraded("ext_k_k", &kk, false);
            b.bigraded("ext_k_a", &ka, false);
        }
        Command::Smallness => {
            let v = classify_smallness(&k, s_max, window);
            b.verdict("status", v.label());
            b.verdict("length", json!(v.small));
            b.verdict("betti", json!(v.betti));
            b.verdict("finite_dimension", json!(v.finite_dimension));
            b.verdict("cosmall", v.cosmall.is_some());
            b.verdict("algebra_dimension", json!(v.cosmall));
        }
        Command::Localcoh => {
            let gens = augmentation_ideal_generators(&alg);
            let lc = local_cohomology(&a, &gens, window)?;
            let tower = koszul_tower_table(&a, &gens, window, DEFAULT_LEVELS)?;
            let cols = alg.num_generators() as i32;
            let agree = window.degrees().all(|j| {
                (0..=cols).all(|c| lc.is_flagged(c, j) || tower.is_flagged(c, j) || lc.get(c, j) == tower.get(c, j))
            });
            b.verdict("route", "cech");
            b.verdict("koszul_tower_agrees", agree);
            b.flag_table("unstabilized", &lc);
            b.bigraded("local_cohomology", &lc, true);
        }
        Command::E2 => {
            let e2 = e2_page(&a, window)?;
            b.verdict("columns", json!(e2.columns().into_iter().collect::<Vec<_>>()));
            let totals: BTreeMap<String, usize> = e2
                .abutment_totals()
                .into_iter()
                .map(|(t, d)| (t.to_string(), d))
                .collect();
            b.verdict("abutment_totals", json!(totals));
            b.flag_table("unstabilized", &e2.tool);
            b.bigraded("e2", &e2.tool, true);
        }
        Command::Gorenstein => {
            let v = gorenstein_verdict(&alg, s_max, window);
            b.verdict("status", v.status.label());
            b.verdict("shift", json!(v.shift.map(|(s, j)| [s, j])));
            b.verdict("paper_internal_shift", json!(v.paper_internal_shift()));
            b.verdict("total_shift", json!(v.total_shift()));
            b.verdict("socle_dimension", v.socle.total());
            b.verdict("criterion", "Ext_A(k, A) one-dimensional (graded-local setting)");
            b.flag_table("degree-bound", &v.ext);
            b.bigraded("ext_k_a", &v.ext, false);
            b.graded("socle", &v.socle);
        }
        Command::Matlisdual => {
            b.graded("algebra", &alg.hilbert_function(window));
            b.graded("matlis_dual", &matlis_dual(&a, window));
            b.verdict("socle_dimension", socle(&a, window).total());
        }
        Command::Pd => match check_poincare_duality(&alg, window) {
            Ok(pd) => {
                b.verdict("finite_dimensional", true);
                b.verdict("is_pd", pd.is_pd);
                b.verdict("dimension", pd.dimension);
                b.verdict("orientation", json!(pd.orientation));
                b.verdict("degenerate_degrees", json!(pd.degenerate));
            }
            Err(Error::NotFiniteDimensional(_)) => {
                b.verdict("finite_dimensional", false);
                b.verdict("is_pd", false);
            }
            Err(e) => return Err(e),
        },
        Command::Lct => {
            let r = verify_lct(&alg, s_max, window)?;
            b.verdict("status", r.status.label());
            b.verdict("mode", json!(r.mode.map(|m| m.label())));
            b.verdict("gorenstein", r.verdict.status.label());
            b.verdict("shift", json!(r.verdict.shift.map(|(s, j)| [s, j])));
            b.verdict("failures", r.failures());
            b.verdict("unverified", json!(r.unverified()));
            let s0 = r.verdict.shift.map_or(0, |(s, _)| s);
            b.flags
                .extend(r.unverified().into_iter().map(|j| Flag::at("unverified", s0, j)));
            let mut expected = BigradedTable::new();
            for c in &r.comparisons {
                expected.set(s0, c.degree, c.dual.max(0) as usize);
            }
            b.bigraded("local_cohomology", &r.e2, true);
            if r.mode.is_some() {
                b.bigraded("shifted_dual", &expected, true);
            }
        }
        Command::Bartor => {
            let t = bar_tor(&alg, w_max, window)?;
            let gens = indecomposables(&alg, window);
            let agree = window.degrees().all(|j| t.get(1, j) == gens.get(j));
            b.verdict("tor1_equals_indecomposables", agree);
            b.flag_table("weight-bound", &t);
            b.bigraded("tor", &t, false);
        }
        Command::Liftwitness => {
            let dual = dual.expect("checked by run");
            let e = build(field, dual)?;
            let w = matlis_lift_witness(&alg, &e, s_max, w_max, window)?;
            b.verdict("gorenstein", w.verdict.status.label());
            b.verdict("shift", json!(w.verdict.shift.map(|(s, j)| [s, j])));
            b.verdict("formality_gate", json!([w.gate_window.lo, w.gate_window.hi]));
            b.verdict("failures", w.failures());
            b.verdict("passed", w.passed());
            let mut unverified = false;
            for c in &w.comparisons {
                if c.outcome == Outcome::Unverified {
                    unverified = true;
                    b.flags.push(Flag::at("unverified", 0, c.degree));
                }
            }
            let status = if !w.verdict.is_gorenstein() {
                "hypothesis-failure"
            } else if w.failures() > 0 {
                "failed"
            } else if unverified {
                "undetermined"
            } else {
                "verified"
            };
            b.verdict("status", status);
            let mut shifted = GradedTable::new(window);
            for c in &w.comparisons {
                shifted.set(c.degree, c.tor);
            }
            b.bigraded("tor", &w.tor, false);
            b.bigraded("local_cohomology", &w.local_cohomology, true);
            b.graded("shifted_tor", &shifted);
        }
    }
    Ok(())
}
